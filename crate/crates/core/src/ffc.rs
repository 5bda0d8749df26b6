//! Coarse projection from outer space to cyclic free factors: a marked
//! graph maps to the classes carried by its embedded circles.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_group::{Automorphism, Basis, ConjClass};
use crate::outer_space::{candidates, CandidateShape, MarkedMetricGraph};
use crate::scalar::Scalar;
use crate::walk::{SamplePath, WalkCaps};

/// Conjugacy class of a cyclic free factor `⟨g⟩`, up to orientation of `g`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeFactorLabel {
    generator_class: ConjClass,
}

impl FreeFactorLabel {
    /// `⟨g⟩ = ⟨g⁻¹⟩`, so the label keeps the smaller of the two classes.
    pub fn new(c: &ConjClass) -> Result<Self> {
        if c.is_trivial() {
            return Err(Error::Input(
                "the trivial class generates no free factor".into(),
            ));
        }
        let c = c.canonicalize();
        let inv = c.inverse();
        Ok(FreeFactorLabel {
            generator_class: c.min(inv),
        })
    }

    pub fn generator_class(&self) -> &ConjClass {
        &self.generator_class
    }

    pub fn act(&self, a: &Automorphism) -> Self {
        FreeFactorLabel::new(&ConjClass::of(&a.apply(self.generator_class.word())))
            .expect("automorphisms preserve nontriviality")
    }

    pub fn format(&self, basis: &Basis) -> String {
        basis.format_word(self.generator_class.word())
    }
}

impl Serialize for FreeFactorLabel {
    fn serialize<Ser: serde::Serializer>(
        &self,
        s: Ser,
    ) -> std::result::Result<Ser::Ok, Ser::Error> {
        let signed: Vec<i32> = self
            .generator_class
            .word()
            .letters()
            .iter()
            .map(|l| l.signed())
            .collect();
        signed.serialize(s)
    }
}

/// Labels of every embedded circle of `T`.
pub fn psi<S: Scalar>(t: &MarkedMetricGraph<S>) -> BTreeSet<FreeFactorLabel> {
    candidates(t)
        .expect("candidate enumeration within budget")
        .of_shape(CandidateShape::Circle)
        .map(|c| FreeFactorLabel::new(&c.class).expect("circles carry nontrivial classes"))
        .collect()
}

/// `ψ(g_k T0)` along a path.
pub fn psi_track<S: Scalar>(
    path: &SamplePath,
    t0: &MarkedMetricGraph<S>,
    caps: WalkCaps,
) -> Result<Vec<BTreeSet<FreeFactorLabel>>> {
    let mut out = Vec::with_capacity(path.positions.len());
    for (k, g) in path.positions.iter().enumerate() {
        let t = t0
            .act_capped(g, Some(caps.letters))
            .map_err(|e| Error::Truncated {
                last_valid_step: k.saturating_sub(1),
                message: e.to_string(),
            })?;
        out.push(psi(&t));
    }
    path.require_complete()?;
    Ok(out)
}

/// Labels as ` | `-separated words in `basis`.
pub fn format_labels(labels: &BTreeSet<FreeFactorLabel>, basis: &Basis) -> String {
    labels
        .iter()
        .map(|l| l.format(basis))
        .collect::<Vec<_>>()
        .join(" | ")
}
