use rand::Rng;

use super::word::{substitute, Letter, Word};
use crate::error::{Error, Result};

/// An automorphism of `F_N` given by generator images, carrying a verified
/// inverse.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Automorphism {
    images: Vec<Word>,
    inverse_images: Vec<Word>,
}

impl Automorphism {
    /// Builds an automorphism, checking that both compositions reduce to the
    /// identity on every generator.
    pub fn new(images: Vec<Word>, inverse_images: Vec<Word>) -> Result<Self> {
        let a = Self::from_parts_unchecked(images, inverse_images)?;
        a.verify()?;
        Ok(a)
    }

    fn from_parts_unchecked(images: Vec<Word>, inverse_images: Vec<Word>) -> Result<Self> {
        let n = images.len();
        if n < 2 {
            return Err(Error::Input(format!("rank must be at least 2, got {n}")));
        }
        if inverse_images.len() != n {
            return Err(Error::Input(format!(
                "{} images but {} inverse images",
                n,
                inverse_images.len()
            )));
        }
        for (i, w) in images.iter().chain(&inverse_images).enumerate() {
            if w.rank_hint() > n {
                return Err(Error::Input(format!(
                    "image {} uses a generator outside rank {n}",
                    i % n
                )));
            }
        }
        Ok(Automorphism {
            images,
            inverse_images,
        })
    }

    fn verify(&self) -> Result<()> {
        for i in 0..self.rank() {
            let there = substitute(&self.inverse_images, self.images[i].letters(), None)?;
            let back = substitute(&self.images, self.inverse_images[i].letters(), None)?;
            let x = Word::generator(i);
            if there != x || back != x {
                return Err(Error::Internal(format!(
                    "inverse images do not invert generator {i}"
                )));
            }
        }
        Ok(())
    }

    pub fn identity(rank: usize) -> Self {
        let gens: Vec<Word> = (0..rank).map(Word::generator).collect();
        Automorphism {
            images: gens.clone(),
            inverse_images: gens,
        }
    }

    /// `x ↦ xy, y ↦ x` on `F_2`.
    pub fn fibonacci() -> Self {
        let x = Letter::generator(0);
        let y = Letter::generator(1);
        Automorphism {
            images: vec![Word::reduce([x, y]), Word::reduce([x])],
            inverse_images: vec![Word::reduce([y]), Word::reduce([y.inverse(), x])],
        }
    }

    /// `x ↔ y` on `F_2`.
    pub fn swap() -> Self {
        Self::permutation(&[1, 0])
    }

    /// Generator permutation `x_i ↦ x_{perm[i]}`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut inv = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        Automorphism {
            images: perm.iter().map(|&p| Word::generator(p)).collect(),
            inverse_images: inv.iter().map(|&p| Word::generator(p)).collect(),
        }
    }

    /// `x_i ↦ x_i⁻¹`, other generators fixed.
    pub fn inversion(rank: usize, i: usize) -> Self {
        let mut images: Vec<Word> = (0..rank).map(Word::generator).collect();
        images[i] = images[i].inverse();
        Automorphism {
            inverse_images: images.clone(),
            images,
        }
    }

    /// Right transvection `x_i ↦ x_i x_j^{±1}` (i ≠ j).
    pub fn right_transvection(rank: usize, i: usize, j: usize, inverse: bool) -> Self {
        assert_ne!(i, j);
        let mut images: Vec<Word> = (0..rank).map(Word::generator).collect();
        let mut inverse_images = images.clone();
        let xi = Letter::generator(i);
        let xj = Letter::new(j, inverse);
        images[i] = Word::reduce([xi, xj]);
        inverse_images[i] = Word::reduce([xi, xj.inverse()]);
        Automorphism {
            images,
            inverse_images,
        }
    }

    /// Left transvection `x_i ↦ x_j^{±1} x_i` (i ≠ j).
    pub fn left_transvection(rank: usize, i: usize, j: usize, inverse: bool) -> Self {
        assert_ne!(i, j);
        let mut images: Vec<Word> = (0..rank).map(Word::generator).collect();
        let mut inverse_images = images.clone();
        let xi = Letter::generator(i);
        let xj = Letter::new(j, inverse);
        images[i] = Word::reduce([xj, xi]);
        inverse_images[i] = Word::reduce([xj.inverse(), xi]);
        Automorphism {
            images,
            inverse_images,
        }
    }

    /// Symmetric Nielsen generating set: all transvections, inversions and
    /// adjacent transpositions.
    pub fn nielsen_generators(rank: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for i in 0..rank {
            for j in 0..rank {
                if i != j {
                    for inv in [false, true] {
                        out.push(Self::right_transvection(rank, i, j, inv));
                        out.push(Self::left_transvection(rank, i, j, inv));
                    }
                }
            }
        }
        for i in 0..rank {
            out.push(Self::inversion(rank, i));
        }
        for i in 0..rank - 1 {
            let mut p: Vec<usize> = (0..rank).collect();
            p.swap(i, i + 1);
            out.push(Self::permutation(&p));
        }
        out
    }

    /// Product of `radius` uniformly drawn Nielsen generators.
    pub fn random_in_ball<R: Rng + ?Sized>(rank: usize, radius: usize, rng: &mut R) -> Self {
        let gens = Self::nielsen_generators(rank);
        let mut a = Self::identity(rank);
        for _ in 0..radius {
            let g = &gens[rng.gen_range(0..gens.len())];
            a = a.compose_capped(g, None).expect("uncapped composition");
        }
        a
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> &[Word] {
        &self.inverse_images
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| *w == Word::generator(i))
    }

    /// Total letters stored in images and inverse images.
    pub fn letter_count(&self) -> usize {
        self.images
            .iter()
            .chain(&self.inverse_images)
            .map(Word::len)
            .sum()
    }

    /// Image of a word.
    pub fn apply(&self, w: &Word) -> Word {
        substitute(&self.images, w.letters(), None).expect("word within rank")
    }

    pub fn apply_capped(&self, w: &[Letter], cap: Option<usize>) -> Result<Word> {
        substitute(&self.images, w, cap)
    }

    /// Image of a word under the inverse automorphism.
    pub fn apply_inverse(&self, w: &Word) -> Word {
        substitute(&self.inverse_images, w.letters(), None).expect("word within rank")
    }

    pub fn apply_inverse_capped(&self, w: &[Letter], cap: Option<usize>) -> Result<Word> {
        substitute(&self.inverse_images, w, cap)
    }

    pub fn invert(&self) -> Self {
        Automorphism {
            images: self.inverse_images.clone(),
            inverse_images: self.images.clone(),
        }
    }

    /// `self ∘ other`, with the inverse invariant re-verified.
    pub fn compose(&self, other: &Automorphism) -> Result<Self> {
        let c = self.compose_capped(other, None)?;
        c.verify()?;
        Ok(c)
    }

    /// `self ∘ other` without re-verification (both factors already carry
    /// verified inverses, so the product does too). Fails if any stored
    /// image exceeds `cap` letters.
    pub fn compose_capped(&self, other: &Automorphism, cap: Option<usize>) -> Result<Self> {
        if self.rank() != other.rank() {
            return Err(Error::Input(format!(
                "cannot compose automorphisms of rank {} and {}",
                self.rank(),
                other.rank()
            )));
        }
        let images = other
            .images
            .iter()
            .map(|w| substitute(&self.images, w.letters(), cap))
            .collect::<Result<Vec<_>>>()?;
        let inverse_images = self
            .inverse_images
            .iter()
            .map(|w| substitute(&other.inverse_images, w.letters(), cap))
            .collect::<Result<Vec<_>>>()?;
        Ok(Automorphism {
            images,
            inverse_images,
        })
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut a = Self::identity(self.rank());
        for _ in 0..k {
            a = a.compose_capped(self, None).expect("uncapped composition");
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i32]) -> Word {
        Word::reduce(v.iter().map(|&s| Letter::from_signed(s).unwrap()))
    }

    #[test]
    fn fibonacci_apply() {
        let phi = Automorphism::fibonacci();
        assert_eq!(phi.apply(&w(&[1])), w(&[1, 2]));
        let phi2 = phi.compose(&phi).unwrap();
        assert_eq!(phi2.apply(&w(&[1])), w(&[1, 2, 1]));
        assert_eq!(phi2.images(), &[w(&[1, 2, 1]), w(&[1, 2])]);
        let id = Automorphism::identity(2);
        assert_eq!(id.apply(&w(&[2, -1, 2])), w(&[2, -1, 2]));
    }

    #[test]
    fn compose_with_inverse_and_identity() {
        let phi = Automorphism::fibonacci();
        assert!(phi.compose(&phi.invert()).unwrap().is_identity());
        assert_eq!(Automorphism::identity(2).compose(&phi).unwrap(), phi);
    }

    #[test]
    fn invert_fibonacci() {
        let phi = Automorphism::fibonacci();
        let inv = phi.invert();
        assert_eq!(inv.images(), &[w(&[2]), w(&[-2, 1])]);
        assert!(Automorphism::new(inv.images().to_vec(), inv.inverse_images().to_vec()).is_ok());
        assert_eq!(inv.invert(), phi);
        assert_eq!(
            Automorphism::identity(3).invert(),
            Automorphism::identity(3)
        );
    }

    #[test]
    fn bad_inverse_rejected() {
        let r = Automorphism::new(vec![w(&[1, 2]), w(&[1])], vec![w(&[2]), w(&[1])]);
        assert!(matches!(r, Err(Error::Internal(_))));
        let r = Automorphism::new(vec![w(&[1, 2])], vec![w(&[1])]);
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn nielsen_generators_are_automorphisms() {
        for n in 2..=4 {
            for g in Automorphism::nielsen_generators(n) {
                Automorphism::new(g.images().to_vec(), g.inverse_images().to_vec()).unwrap();
            }
        }
    }
}
