use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A generator or its inverse, stored as a signed index `±(i + 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
#[repr(transparent)]
pub struct Letter(i32);

impl Letter {
    pub fn new(index: usize, inverse: bool) -> Self {
        let v = index as i32 + 1;
        Letter(if inverse { -v } else { v })
    }

    pub fn generator(index: usize) -> Self {
        Self::new(index, false)
    }

    /// Raw signed encoding `±(index + 1)`.
    pub fn from_signed(v: i32) -> Option<Self> {
        (v != 0).then_some(Letter(v))
    }

    pub fn signed(self) -> i32 {
        self.0
    }

    pub fn index(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    /// Position in the order `x_1 < x_1^-1 < x_2 < x_2^-1 < ...`.
    #[inline]
    pub fn order_key(self) -> u32 {
        2 * (self.0.unsigned_abs() - 1) + u32::from(self.0 < 0)
    }

    /// Inverse of [`Letter::order_key`].
    pub fn from_order_key(key: u32) -> Self {
        Self::new((key / 2) as usize, key % 2 == 1)
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Appends `l` to a freely reduced buffer, cancelling against the last letter.
#[inline]
pub(crate) fn push_reduced(buf: &mut Vec<Letter>, l: Letter) {
    if buf.last() == Some(&l.inverse()) {
        buf.pop();
    } else {
        buf.push(l);
    }
}

/// A freely reduced word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(index: usize) -> Self {
        Word(vec![Letter::generator(index)])
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Self {
        let mut buf = Vec::new();
        for l in raw {
            push_reduced(&mut buf, l);
        }
        Word(buf)
    }

    /// Reduces `(generator index, sign)` pairs, rejecting indices outside the
    /// basis.
    pub fn from_signed_indices(rank: usize, raw: &[(usize, i8)]) -> Result<Self> {
        let mut buf = Vec::with_capacity(raw.len());
        for (pos, &(i, sign)) in raw.iter().enumerate() {
            if i >= rank {
                return Err(Error::Input(format!(
                    "letter {pos}: generator index {i} outside basis of rank {rank}"
                )));
            }
            if sign != 1 && sign != -1 {
                return Err(Error::Input(format!(
                    "letter {pos}: sign must be ±1, got {sign}"
                )));
            }
            push_reduced(&mut buf, Letter::new(i, sign < 0));
        }
        Ok(Word(buf))
    }

    /// Wraps letters that are already known to be reduced.
    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|p| p[0] != p[1].inverse()));
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest generator index used, plus one.
    pub fn rank_hint(&self) -> usize {
        self.0.iter().map(|l| l.index() + 1).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut buf = Vec::with_capacity(self.len() + other.len());
        buf.extend_from_slice(&self.0);
        for &l in &other.0 {
            push_reduced(&mut buf, l);
        }
        Word(buf)
    }

    pub fn pow(&self, k: usize) -> Word {
        let mut out = Word::identity();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Conjugate `u · self · u⁻¹`.
    pub fn conjugate_by(&self, u: &Word) -> Word {
        u.mul(self).mul(&u.inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(&a), Some(&b)) => self.0.len() == 1 || a != b.inverse(),
            _ => true,
        }
    }

    /// Number of leading letters that cancel cyclically: `self = p · core · p⁻¹`
    /// with `|p|` returned.
    pub fn cyclic_overlap(&self) -> usize {
        let n = self.0.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        k
    }

    /// The cyclically reduced core `self[k..n-k]`.
    pub fn cyclic_core(&self) -> &[Letter] {
        let k = self.cyclic_overlap();
        &self.0[k..self.0.len() - k]
    }

    /// Rotation starting at position `k`.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return Word::identity();
        }
        let k = k % self.0.len();
        let mut v = Vec::with_capacity(self.0.len());
        v.extend_from_slice(&self.0[k..]);
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word::reduce(v)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word{:?}", self.0)
    }
}

/// Substitutes `images[i]` for generator `i` throughout `w` and reduces.
///
/// Linear in the size of the unreduced result. `cap` bounds the length of the
/// working buffer.
pub fn substitute(images: &[Word], w: &[Letter], cap: Option<usize>) -> Result<Word> {
    let mut buf: Vec<Letter> = Vec::new();
    for &l in w {
        let img = images.get(l.index()).ok_or_else(|| {
            Error::Input(format!(
                "letter index {} outside substitution of rank {}",
                l.index(),
                images.len()
            ))
        })?;
        if l.is_inverse() {
            for &m in img.0.iter().rev() {
                push_reduced(&mut buf, m.inverse());
            }
        } else {
            for &m in &img.0 {
                push_reduced(&mut buf, m);
            }
        }
        if let Some(cap) = cap {
            if buf.len() > cap {
                return Err(Error::Resource(format!(
                    "word length {} exceeds cap of {cap} letters",
                    buf.len()
                )));
            }
        }
    }
    Ok(Word(buf))
}
