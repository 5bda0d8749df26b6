//! Exact word algebra in a free group `F_N`.
//!
//! Letters are signed generator indices; words are always kept freely
//! reduced. Conjugacy classes are cyclically reduced words, canonicalized to
//! the least rotation of the word or its inverse.

mod automorphism;
mod basis;
mod conj;
mod enumerate;
mod word;

pub use automorphism::Automorphism;
pub use basis::Basis;
pub use conj::{cyclic_reduce, ConjClass};
pub use enumerate::{enumerate_conj_classes, reduced_words, DEFAULT_CLASS_BUDGET};
pub(crate) use word::push_reduced;
pub use word::{substitute, Letter, Word};
