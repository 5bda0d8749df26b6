use super::word::{Letter, Word};

/// A conjugacy class, represented by a cyclically reduced word.
///
/// When `canonical` is set the word is the lexicographically least among all
/// rotations of itself and of its inverse, so it can be used as a map key.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ConjClass {
    word: Word,
    canonical: bool,
}

impl ConjClass {
    /// Canonical class of an arbitrary reduced word.
    pub fn of(w: &Word) -> Self {
        cyclic_reduce(w).0.canonicalize()
    }

    /// Canonical class of a letter sequence that is already freely reduced.
    pub(crate) fn of_letters(letters: &[Letter]) -> Self {
        let w = Word::from_reduced_unchecked(letters.to_vec());
        Self::of(&w)
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.word.is_empty()
    }

    pub fn canonicalize(&self) -> ConjClass {
        if self.canonical {
            return self.clone();
        }
        let fwd = least_rotation(self.word.letters());
        let inv = self.word.inverse();
        let bwd = least_rotation(inv.letters());
        let best = if rotated_cmp(self.word.letters(), fwd, inv.letters(), bwd).is_le() {
            self.word.rotate(fwd)
        } else {
            inv.rotate(bwd)
        };
        ConjClass {
            word: best,
            canonical: true,
        }
    }

    pub fn inverse(&self) -> ConjClass {
        let c = ConjClass {
            word: self.word.inverse(),
            canonical: false,
        };
        if self.canonical {
            c.canonicalize()
        } else {
            c
        }
    }

    /// Splits the class as `root^k` with `root` not a proper power.
    pub fn root(&self) -> (ConjClass, usize) {
        let n = self.word.len();
        if n == 0 {
            return (self.clone(), 1);
        }
        let p = smallest_period(self.word.letters());
        let root = Word::from_reduced_unchecked(self.word.letters()[..p].to_vec());
        let root = ConjClass {
            word: root,
            canonical: self.canonical,
        };
        (root, n / p)
    }

    pub fn is_proper_power(&self) -> bool {
        self.root().1 > 1
    }
}

/// Splits `w = conjugator · core · conjugator⁻¹` with `core` cyclically reduced.
pub fn cyclic_reduce(w: &Word) -> (ConjClass, Word) {
    let k = w.cyclic_overlap();
    let letters = w.letters();
    let core = Word::from_reduced_unchecked(letters[k..letters.len() - k].to_vec());
    let conjugator = Word::from_reduced_unchecked(letters[..k].to_vec());
    (
        ConjClass {
            word: core,
            canonical: false,
        },
        conjugator,
    )
}

fn rotated_cmp(a: &[Letter], ka: usize, b: &[Letter], kb: usize) -> std::cmp::Ordering {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    for t in 0..n {
        let o = a[(ka + t) % n].cmp(&b[(kb + t) % n]);
        if o.is_ne() {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Start index of the lexicographically least rotation (two-pointer minimum
/// expression algorithm, linear time).
pub(crate) fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    if n < 2 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => k += 1,
            std::cmp::Ordering::Greater => {
                i += k + 1;
                if i == j {
                    i += 1;
                }
                k = 0;
            }
            std::cmp::Ordering::Less => {
                j += k + 1;
                if i == j {
                    j += 1;
                }
                k = 0;
            }
        }
    }
    i.min(j)
}

/// Smallest `p` dividing `len` with `s` invariant under rotation by `p`.
pub(crate) fn smallest_period(s: &[Letter]) -> usize {
    let n = s.len();
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && s[i] != s[k] {
            k = fail[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let p = n - fail[n - 1];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i32]) -> Word {
        Word::reduce(v.iter().map(|&s| Letter::from_signed(s).unwrap()))
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (c, u) = cyclic_reduce(&w(&[1, 2, -1]));
        assert_eq!(c.word(), &w(&[2]));
        assert_eq!(u, w(&[1]));
        let (c, u) = cyclic_reduce(&w(&[1, 2]));
        assert_eq!(c.word(), &w(&[1, 2]));
        assert!(u.is_empty());
        let (c, u) = cyclic_reduce(&w(&[1, 2, 2, -1]));
        assert_eq!(c.word(), &w(&[2, 2]));
        assert_eq!(u, w(&[1]));
        let (c, _) = cyclic_reduce(&Word::identity());
        assert!(c.is_trivial());
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(ConjClass::of(&w(&[2, 1])).word(), &w(&[1, 2]));
        assert_eq!(ConjClass::of(&w(&[-1, -2])).word(), &w(&[1, 2]));
        assert_eq!(ConjClass::of(&w(&[1])).word(), &w(&[1]));
        assert_eq!(ConjClass::of(&w(&[-1])).word(), &w(&[1]));
        assert_eq!(ConjClass::of(&w(&[-2, 1])).word(), &w(&[1, -2]));
    }

    #[test]
    fn least_rotation_matches_brute_force() {
        let s = w(&[2, 1, 2, 1, 1, -2, 1]);
        let k = least_rotation(s.letters());
        let best = (0..s.len()).map(|r| s.rotate(r)).min().unwrap();
        assert_eq!(s.rotate(k), best);
    }

    #[test]
    fn proper_powers() {
        let c = ConjClass::of(&w(&[1, 2, 1, 2, 1, 2]));
        let (r, k) = c.root();
        assert_eq!(k, 3);
        assert_eq!(r.word(), &w(&[1, 2]));
        assert!(!ConjClass::of(&w(&[1, 2, 1])).is_proper_power());
        assert_eq!(ConjClass::of(&w(&[1, 1])).root().1, 2);
    }
}
