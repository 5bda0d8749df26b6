use rayon::prelude::*;
use serde::Serialize;

use super::measure::WalkMeasure;
use super::path::{sample_path_capped, SamplePath, WalkCaps};
use crate::currents::{
    base_current, cylinder_distance, normalize_against_capped, RationalCurrent,
    DEFAULT_CYLINDER_WINDOW,
};
use crate::error::{Error, Result};
use crate::free_group::ConjClass;
use crate::outer_space::{length_spectrum_capped, projectivize, sym_distance, MarkedMetricGraph};
use crate::scalar::FieldScalar;

fn truncated(step: usize, e: Error) -> Error {
    match e {
        Error::Truncated { .. } => e,
        other if other.is_resource() => Error::Truncated {
            last_valid_step: step.saturating_sub(1),
            message: other.to_string(),
        },
        other => other,
    }
}

/// `ℓ∞` distance.
pub fn linf<S: FieldScalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |m, (&x, &y)| {
        let d = if x > y { x - y } else { y - x };
        if d > m {
            d
        } else {
            m
        }
    })
}

/// Projectivized length spectra of `g_k T0` with Cauchy gaps
/// `ε_k = ℓ∞(v_k, v_{k−1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTrack<S> {
    pub classes: Vec<ConjClass>,
    pub rows: Vec<Vec<S>>,
    /// `epsilons[k]` for `k ≥ 1`; `None` at step 0.
    pub epsilons: Vec<Option<S>>,
}

impl<S: FieldScalar> SpectrumTrack<S> {
    pub fn final_gap(&self) -> Option<S> {
        self.epsilons.last().copied().flatten()
    }

    /// Ratio of two spectrum coordinates at the last step.
    pub fn final_ratio(&self, num: usize, den: usize) -> S {
        let r = self.rows.last().expect("nonempty track");
        r[num] / r[den]
    }
}

pub fn spectrum_track<S: FieldScalar>(
    path: &SamplePath,
    t0: &MarkedMetricGraph<S>,
    classes: &[ConjClass],
    caps: WalkCaps,
) -> Result<SpectrumTrack<S>> {
    if classes.is_empty() {
        return Err(Error::Input(
            "spectrum track needs at least one class".into(),
        ));
    }
    let cap = Some(caps.letters);
    let mut rows: Vec<Vec<S>> = Vec::with_capacity(path.positions.len());
    let mut epsilons = Vec::with_capacity(path.positions.len());
    for (k, g) in path.positions.iter().enumerate() {
        let t = t0.act_capped(g, cap).map_err(|e| truncated(k, e))?;
        let v =
            projectivize(&length_spectrum_capped(&t, classes, cap).map_err(|e| truncated(k, e))?)?;
        epsilons.push(rows.last().map(|prev| linf(prev, &v)));
        rows.push(v);
    }
    path.require_complete()?;
    Ok(SpectrumTrack {
        classes: classes.to_vec(),
        rows,
        epsilons,
    })
}

/// Normalized currents `g_k η₀ / ⟨T0, g_k η₀⟩` with consecutive projective
/// distances in cylinder coordinates.
///
/// Pushing `η₀` forward is a proxy for a current dual to the forward limit
/// tree. For a Dirac measure on a fully irreducible `φ` with stretch `λ`,
/// equivariance and homogeneity give `⟨T_+, μ_+⟩ = λ²⟨T_+, μ_+⟩`, so the
/// attracting current pairs to zero with the attracting tree. For mixed
/// walks this is a heuristic, not a theorem.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentTrack<S> {
    pub proxies: Vec<RationalCurrent<S>>,
    pub distances: Vec<Option<S>>,
}

impl<S: FieldScalar> CurrentTrack<S> {
    pub fn terminal(&self) -> &RationalCurrent<S> {
        self.proxies.last().expect("nonempty track")
    }
}

pub fn current_track<S: FieldScalar>(
    path: &SamplePath,
    t0: &MarkedMetricGraph<S>,
    caps: WalkCaps,
) -> Result<CurrentTrack<S>> {
    current_track_from(path, t0, &base_current(t0.rank()), caps)
}

pub fn current_track_from<S: FieldScalar>(
    path: &SamplePath,
    t0: &MarkedMetricGraph<S>,
    eta0: &RationalCurrent<S>,
    caps: WalkCaps,
) -> Result<CurrentTrack<S>> {
    if eta0.len() > caps.atoms {
        return Err(Error::Resource(format!(
            "current has {} atoms, cap is {}",
            eta0.len(),
            caps.atoms
        )));
    }
    let cap = Some(caps.letters);
    let mut proxies: Vec<RationalCurrent<S>> = Vec::with_capacity(path.positions.len());
    let mut distances = Vec::with_capacity(path.positions.len());
    for (k, g) in path.positions.iter().enumerate() {
        let pushed = eta0.act_capped(g, cap).map_err(|e| truncated(k, e))?;
        if pushed.len() > caps.atoms {
            return Err(Error::Truncated {
                last_valid_step: k.saturating_sub(1),
                message: format!("current has {} atoms, cap is {}", pushed.len(), caps.atoms),
            });
        }
        let c = normalize_against_capped(&pushed, t0, cap).map_err(|e| truncated(k, e))?;
        distances.push(
            proxies
                .last()
                .map(|prev| cylinder_distance(prev, &c, t0.rank(), DEFAULT_CYLINDER_WINDOW)),
        );
        proxies.push(c);
    }
    path.require_complete()?;
    Ok(CurrentTrack { proxies, distances })
}

/// `d_sym(T0, g_k T0) / k` for `k ≥ 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftTrack {
    pub seed: u64,
    /// `d_sym(T0, g_k T0)` for `k = 0..=n`.
    pub distances: Vec<f64>,
    /// `distances[k] / k` for `k = 1..=n`.
    pub normalized: Vec<f64>,
    /// Mean of the last quartile of `normalized`.
    pub limit_estimate: f64,
    /// `d_n − d_{n−1}`; converges faster than `d_n / n` when `d_n` is
    /// asymptotically affine.
    pub increment_estimate: f64,
}

pub fn drift_track<S: FieldScalar>(
    path: &SamplePath,
    t0: &MarkedMetricGraph<S>,
    caps: WalkCaps,
) -> Result<DriftTrack> {
    if path.is_empty() {
        return Err(Error::Input("drift needs a path of length ≥ 1".into()));
    }
    let cap = Some(caps.letters);
    let mut distances = Vec::with_capacity(path.positions.len());
    for (k, g) in path.positions.iter().enumerate() {
        let t = t0.act_capped(g, cap).map_err(|e| truncated(k, e))?;
        distances.push(sym_distance(t0, &t)?);
    }
    path.require_complete()?;
    let n = path.len();
    let normalized: Vec<f64> = (1..=n).map(|k| distances[k] / k as f64).collect();
    let q = n.div_ceil(4);
    let limit_estimate = normalized[n - q..].iter().sum::<f64>() / q as f64;
    Ok(DriftTrack {
        seed: path.seed,
        increment_estimate: distances[n] - distances[n - 1],
        distances,
        normalized,
        limit_estimate,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftEnsemble {
    pub tracks: Vec<DriftTrack>,
    pub mean: f64,
    /// Standard error of the mean over seeds; `None` for a single seed.
    pub stderr: Option<f64>,
}

/// Runs [`drift_track`] for every seed in parallel, results in seed order.
pub fn drift_ensemble<S: FieldScalar>(
    m: &WalkMeasure,
    n: usize,
    seeds: &[u64],
    t0: &MarkedMetricGraph<S>,
    caps: WalkCaps,
) -> Result<DriftEnsemble> {
    if seeds.is_empty() {
        return Err(Error::Input(
            "drift ensemble needs at least one seed".into(),
        ));
    }
    let tracks = seeds
        .par_iter()
        .map(|&s| drift_track(&sample_path_capped(m, n, s, caps), t0, caps))
        .collect::<Result<Vec<_>>>()?;
    let k = tracks.len() as f64;
    let mean = tracks.iter().map(|t| t.limit_estimate).sum::<f64>() / k;
    let stderr = (tracks.len() > 1).then(|| {
        let var = tracks
            .iter()
            .map(|t| (t.limit_estimate - mean).powi(2))
            .sum::<f64>()
            / (k - 1.0);
        (var / k).sqrt()
    });
    Ok(DriftEnsemble {
        tracks,
        mean,
        stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::currents::pair;
    use crate::free_group::{enumerate_conj_classes, Automorphism, Word};
    use crate::walk::sample_path;

    const GOLDEN: f64 = 1.618_033_988_749_895;

    fn dirac(a: Automorphism) -> WalkMeasure {
        WalkMeasure::dirac("d", a)
    }

    fn x_y() -> Vec<ConjClass> {
        vec![
            ConjClass::of(&Word::generator(0)),
            ConjClass::of(&Word::generator(1)),
        ]
    }

    #[test]
    fn fibonacci_spectrum_ratio() {
        let t0 = MarkedMetricGraph::<f64>::unit_rose(2).unwrap();
        let p = sample_path(&dirac(Automorphism::fibonacci()), 20, 0);
        let tr = spectrum_track(&p, &t0, &x_y(), WalkCaps::default()).unwrap();
        assert!((tr.final_ratio(1, 0) - GOLDEN).abs() < 1e-3);
        // Power-iteration oracle: ‖φ⁻ⁿ x‖ and ‖φ⁻ⁿ y‖ are consecutive
        // Fibonacci numbers.
        let (mut a, mut b) = (1u64, 1u64);
        for _ in 0..20 {
            (a, b) = (b, a + b);
        }
        assert!((tr.final_ratio(1, 0) - b as f64 / a as f64).abs() < 1e-12);
        let gaps: Vec<f64> = tr.epsilons.iter().skip(2).flatten().copied().collect();
        assert!(gaps.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn identity_spectrum_is_constant() {
        let t0 = MarkedMetricGraph::<f64>::rose(&[1.0, 2.5]).unwrap();
        let classes = enumerate_conj_classes(2, 3, 1000).unwrap();
        let p = sample_path(&dirac(Automorphism::identity(2)), 6, 0);
        let tr = spectrum_track(&p, &t0, &classes, WalkCaps::default()).unwrap();
        assert!(tr.epsilons.iter().flatten().all(|&e| e == 0.0));
        assert!(spectrum_track(&p, &t0, &[], WalkCaps::default()).is_err());
    }

    #[test]
    fn spectrum_shift_equivariance() {
        let t0 = MarkedMetricGraph::<f64>::unit_rose(2).unwrap();
        let classes = enumerate_conj_classes(2, 3, 1000).unwrap();
        let psi = Automorphism::right_transvection(2, 0, 1, false);
        let p = sample_path(&WalkMeasure::default_nonelementary(), 8, 4);
        let shifted = spectrum_track(
            &p.left_translate(&psi).unwrap(),
            &t0,
            &classes,
            WalkCaps::default(),
        )
        .unwrap();
        let moved: Vec<ConjClass> = classes
            .iter()
            .map(|c| ConjClass::of(&psi.apply_inverse(c.word())))
            .collect();
        let base = spectrum_track(&p, &t0, &moved, WalkCaps::default()).unwrap();
        assert_eq!(shifted.rows, base.rows);
    }

    #[test]
    fn fibonacci_currents_converge() {
        let t0 = MarkedMetricGraph::<f64>::unit_rose(2).unwrap();
        let p = sample_path(&dirac(Automorphism::fibonacci()), 20, 0);
        let tr = current_track(&p, &t0, WalkCaps::default()).unwrap();
        assert!(tr.distances.last().unwrap().unwrap() < 1e-3);
        for c in &tr.proxies {
            assert!((pair(&t0, c) - 1.0).abs() < 1e-12);
        }
        let id = sample_path(&dirac(Automorphism::identity(2)), 5, 0);
        let tr = current_track(&id, &t0, WalkCaps::default()).unwrap();
        assert!(tr.distances.iter().flatten().all(|&d| d == 0.0));
    }

    #[test]
    fn current_shift_equivariance() {
        let t0 = MarkedMetricGraph::<f64>::unit_rose(2).unwrap();
        let psi = Automorphism::left_transvection(2, 1, 0, true);
        let p = sample_path(&WalkMeasure::default_nonelementary(), 6, 2);
        let shifted =
            current_track(&p.left_translate(&psi).unwrap(), &t0, WalkCaps::default()).unwrap();
        let base = current_track(&p, &t0, WalkCaps::default()).unwrap();
        for (a, b) in shifted.proxies.iter().zip(&base.proxies) {
            let moved = normalize_against_capped(&b.act(&psi).unwrap(), &t0, None).unwrap();
            assert_eq!(
                a.atoms().keys().collect::<Vec<_>>(),
                moved.atoms().keys().collect::<Vec<_>>()
            );
            for (w1, w2) in a.atoms().values().zip(moved.atoms().values()) {
                assert!((w1 - w2).abs() < 1e-12 * w1.abs().max(1.0));
            }
        }
    }

    #[test]
    fn drift_examples() {
        let t0 = MarkedMetricGraph::<f64>::unit_rose(2).unwrap();
        let id = sample_path(&dirac(Automorphism::identity(2)), 5, 0);
        assert_eq!(
            drift_track(&id, &t0, WalkCaps::default())
                .unwrap()
                .limit_estimate,
            0.0
        );
        let p = sample_path(&dirac(Automorphism::fibonacci()), 20, 0);
        let d = drift_track(&p, &t0, WalkCaps::default()).unwrap();
        assert!((d.increment_estimate - 2.0 * GOLDEN.ln()).abs() < 1e-3);
        let other = MarkedMetricGraph::<f64>::rose(&[1.0, 3.0]).unwrap();
        let d2 = drift_track(&p, &other, WalkCaps::default()).unwrap();
        assert!((d.increment_estimate - d2.increment_estimate).abs() < 1e-2);
        let e = drift_ensemble(
            &WalkMeasure::default_nonelementary(),
            8,
            &[1, 2, 3],
            &t0,
            WalkCaps::default(),
        )
        .unwrap();
        assert_eq!(e.tracks.len(), 3);
        assert!(e.stderr.unwrap() >= 0.0);
    }

    #[test]
    fn truncation_reported() {
        let t0 = MarkedMetricGraph::<f64>::unit_rose(2).unwrap();
        let caps = WalkCaps {
            letters: 40,
            atoms: 64,
        };
        let p = sample_path_capped(&dirac(Automorphism::fibonacci()), 20, 0, caps);
        let err = spectrum_track(&p, &t0, &x_y(), caps).unwrap_err();
        assert!(matches!(err, Error::Truncated { last_valid_step, .. } if last_valid_step < 20));
    }
}
