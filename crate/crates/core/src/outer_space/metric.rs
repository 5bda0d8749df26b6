use super::candidates::{candidates, Candidate, CandidateSet};
use super::marked::MarkedMetricGraph;
use crate::error::{Error, Result};
use crate::free_group::ConjClass;
use crate::scalar::{ratio_gt, FieldScalar, Scalar};

/// A maximal length ratio `target / source` with the class realizing it.
#[derive(Clone, Debug, PartialEq)]
pub struct Stretch<S> {
    /// Translation length in the target tree.
    pub target: S,
    /// Translation length in the source tree.
    pub source: S,
    pub witness: ConjClass,
}

impl<S: Scalar> Stretch<S> {
    pub fn to_f64(&self) -> f64 {
        self.target.to_f64_lossy() / self.source.to_f64_lossy()
    }

    /// Exact comparison of two ratios.
    pub fn exceeds(&self, target: S, source: S) -> bool {
        ratio_gt(self.target, self.source, target, source)
    }
}

impl<S: FieldScalar> Stretch<S> {
    pub fn value(&self) -> S {
        self.target / self.source
    }
}

fn check_ranks<S: Scalar>(t: &MarkedMetricGraph<S>, t2: &MarkedMetricGraph<S>) -> Result<()> {
    if t.rank() != t2.rank() {
        return Err(Error::Input(format!(
            "trees of rank {} and {}",
            t.rank(),
            t2.rank()
        )));
    }
    Ok(())
}

/// Maximal ratio `‖c‖_{T2} / ‖c‖_T` over the candidates of `T`, on raw
/// (unnormalized) lengths.
pub fn lipschitz<S: Scalar>(
    t: &MarkedMetricGraph<S>,
    t2: &MarkedMetricGraph<S>,
) -> Result<Stretch<S>> {
    check_ranks(t, t2)?;
    let cands = candidates(t)?;
    lipschitz_over(&cands, t2, None)
}

/// Same as [`lipschitz`] with precomputed candidates and a word cap.
pub fn lipschitz_over<S: Scalar>(
    cands: &CandidateSet<S>,
    t2: &MarkedMetricGraph<S>,
    cap: Option<usize>,
) -> Result<Stretch<S>> {
    let mut best: Option<Stretch<S>> = None;
    for Candidate { class, length, .. } in cands.candidates() {
        let target = t2.translation_length_capped(class.word().letters(), cap)?;
        if best
            .as_ref()
            .is_none_or(|b| ratio_gt(target, *length, b.target, b.source))
        {
            best = Some(Stretch {
                target,
                source: *length,
                witness: class.clone(),
            });
        }
    }
    best.ok_or_else(|| Error::Internal("tree has no candidates".into()))
}

/// `log` of a ratio of products, computed in the scalar type first.
fn log_ratio<S: Scalar>(num: S, den: S) -> f64 {
    if S::is_exact() && num == den {
        return 0.0;
    }
    (num.to_f64_lossy() / den.to_f64_lossy()).ln()
}

/// Lipschitz distance `d(T, T2) = log Lip(T̂, T̂2)` between covolume-1
/// representatives.
pub fn distance<S: Scalar>(t: &MarkedMetricGraph<S>, t2: &MarkedMetricGraph<S>) -> Result<f64> {
    let s = lipschitz(t, t2)?;
    Ok(normalized_log(&s, t, t2))
}

/// `log` of a raw stretch corrected for the two volumes.
pub fn normalized_log<S: Scalar>(
    s: &Stretch<S>,
    t: &MarkedMetricGraph<S>,
    t2: &MarkedMetricGraph<S>,
) -> f64 {
    log_ratio(s.target * t.volume(), s.source * t2.volume())
}

pub fn sym_distance<S: Scalar>(t: &MarkedMetricGraph<S>, t2: &MarkedMetricGraph<S>) -> Result<f64> {
    Ok(distance(t, t2)? + distance(t2, t)?)
}

/// Translation lengths of `classes` in `T`.
pub fn length_spectrum<S: Scalar>(
    t: &MarkedMetricGraph<S>,
    classes: &[ConjClass],
) -> Result<Vec<S>> {
    length_spectrum_capped(t, classes, None)
}

pub fn length_spectrum_capped<S: Scalar>(
    t: &MarkedMetricGraph<S>,
    classes: &[ConjClass],
    cap: Option<usize>,
) -> Result<Vec<S>> {
    if classes.is_empty() {
        return Err(Error::Input(
            "length spectrum needs at least one class".into(),
        ));
    }
    classes
        .iter()
        .map(|c| t.translation_length_capped(c.word().letters(), cap))
        .collect()
}

/// Spectrum divided by its sum (a point of the simplex).
pub fn projectivize<S: FieldScalar>(spectrum: &[S]) -> Result<Vec<S>> {
    let total = spectrum.iter().fold(S::zero(), |a, &b| a + b);
    if !(total > S::zero()) {
        return Err(Error::Degenerate(
            "length spectrum is identically zero".into(),
        ));
    }
    Ok(spectrum.iter().map(|&l| l / total).collect())
}

pub fn projective_length_spectrum<S: FieldScalar>(
    t: &MarkedMetricGraph<S>,
    classes: &[ConjClass],
) -> Result<Vec<S>> {
    projectivize(&length_spectrum(t, classes)?)
}
