use super::conj::{least_rotation, ConjClass};
use super::word::{Letter, Word};
use crate::error::{Error, Result};

/// Default cap on the number of classes [`enumerate_conj_classes`] may return.
pub const DEFAULT_CLASS_BUDGET: usize = 5_000_000;

/// All canonical conjugacy classes of `F_rank` with cyclic length in
/// `1..=max_len`, in order of length, then lexicographically.
pub fn enumerate_conj_classes(
    rank: usize,
    max_len: usize,
    budget: usize,
) -> Result<Vec<ConjClass>> {
    if rank < 2 {
        return Err(Error::Input(format!("rank must be at least 2, got {rank}")));
    }
    if max_len == 0 {
        return Err(Error::Input("max_len must be at least 1".into()));
    }
    let alphabet: Vec<Letter> = (0..2 * rank as u32).map(Letter::from_order_key).collect();
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(max_len);
    for len in 1..=max_len {
        extend(&alphabet, len, &mut buf, &mut out, budget)?;
    }
    Ok(out)
}

fn extend(
    alphabet: &[Letter],
    len: usize,
    buf: &mut Vec<Letter>,
    out: &mut Vec<ConjClass>,
    budget: usize,
) -> Result<()> {
    if buf.len() == len {
        if is_canonical(buf) {
            if out.len() >= budget {
                return Err(Error::Resource(format!(
                    "more than {budget} conjugacy classes up to length {len}"
                )));
            }
            out.push(ConjClass::of_letters(buf));
        }
        return Ok(());
    }
    for &l in alphabet {
        if let Some(&prev) = buf.last() {
            if prev == l.inverse() {
                continue;
            }
        }
        // A canonical word starts with its least letter.
        if let Some(&first) = buf.first() {
            if l < first {
                continue;
            }
        }
        buf.push(l);
        extend(alphabet, len, buf, out, budget)?;
        buf.pop();
    }
    Ok(())
}

fn is_canonical(s: &[Letter]) -> bool {
    let n = s.len();
    if n > 1 && s[0] == s[n - 1].inverse() {
        return false;
    }
    if least_rotation(s) != 0 && rotation_less(s, least_rotation(s), s, 0) {
        return false;
    }
    let inv: Vec<Letter> = s.iter().rev().map(|l| l.inverse()).collect();
    let k = least_rotation(&inv);
    !rotation_less(&inv, k, s, 0)
}

fn rotation_less(a: &[Letter], ka: usize, b: &[Letter], kb: usize) -> bool {
    let n = a.len();
    for t in 0..n {
        let (x, y) = (a[(ka + t) % n], b[(kb + t) % n]);
        if x != y {
            return x < y;
        }
    }
    false
}

/// All reduced words of length exactly `len` (test oracle universe).
pub fn reduced_words(rank: usize, len: usize) -> Vec<Word> {
    let alphabet: Vec<Letter> = (0..2 * rank as u32).map(Letter::from_order_key).collect();
    let mut out = vec![Vec::<Letter>::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * (2 * rank - 1));
        for w in &out {
            for &l in &alphabet {
                if w.last() != Some(&l.inverse()) {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out.into_iter().map(Word::from_reduced_unchecked).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn w(v: &[i32]) -> Word {
        Word::reduce(v.iter().map(|&s| Letter::from_signed(s).unwrap()))
    }

    #[test]
    fn rank_two_small_lengths() {
        let one = enumerate_conj_classes(2, 1, DEFAULT_CLASS_BUDGET).unwrap();
        let words: Vec<_> = one.iter().map(|c| c.word().clone()).collect();
        assert_eq!(words, vec![w(&[1]), w(&[2])]);

        let two = enumerate_conj_classes(2, 2, DEFAULT_CLASS_BUDGET).unwrap();
        let got: BTreeSet<_> = two.iter().map(|c| c.word().clone()).collect();
        let want: BTreeSet<_> = [
            w(&[1]),
            w(&[2]),
            w(&[1, 1]),
            w(&[2, 2]),
            w(&[1, 2]),
            w(&[1, -2]),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
        assert_eq!(two.len(), 6);
    }

    #[test]
    fn degenerate_and_budget() {
        assert!(matches!(
            enumerate_conj_classes(2, 0, 10),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            enumerate_conj_classes(2, 4, 5),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn matches_brute_force_canonicalization() {
        for rank in 2..=3 {
            for max_len in 1..=5 {
                let fast: BTreeSet<_> = enumerate_conj_classes(rank, max_len, DEFAULT_CLASS_BUDGET)
                    .unwrap()
                    .into_iter()
                    .collect();
                let mut slow = BTreeSet::new();
                for len in 1..=max_len {
                    for word in reduced_words(rank, len) {
                        if word.is_cyclically_reduced() {
                            slow.insert(ConjClass::of(&word));
                        }
                    }
                }
                assert_eq!(fast, slow, "rank {rank} max_len {max_len}");
            }
        }
    }
}
