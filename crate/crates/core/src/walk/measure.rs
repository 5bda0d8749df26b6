use std::collections::HashMap;

use serde::Serialize;

use crate::axes::symmetrize;
use crate::error::{Error, Result};
use crate::free_group::Automorphism;

/// Tolerance on the total mass of a measure.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Finitely supported probability measure on automorphisms.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkMeasure {
    name: String,
    support: Vec<(Automorphism, f64)>,
}

impl WalkMeasure {
    pub fn new(name: impl Into<String>, support: Vec<(Automorphism, f64)>) -> Result<Self> {
        let name = name.into();
        if support.is_empty() {
            return Err(Error::Input(format!("measure {name}: empty support")));
        }
        let rank = support[0].0.rank();
        let mut total = 0.0;
        for (i, (a, p)) in support.iter().enumerate() {
            if !(p.is_finite() && *p > 0.0) {
                return Err(Error::Input(format!(
                    "measure {name}: probability {p} of atom {i} is not positive"
                )));
            }
            if a.rank() != rank {
                return Err(Error::Input(format!(
                    "measure {name}: atom {i} has rank {}",
                    a.rank()
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::Input(format!(
                "measure {name}: probabilities sum to {total}, not 1"
            )));
        }
        Ok(WalkMeasure { name, support })
    }

    pub fn dirac(name: impl Into<String>, a: Automorphism) -> Self {
        WalkMeasure {
            name: name.into(),
            support: vec![(a, 1.0)],
        }
    }

    pub fn uniform(name: impl Into<String>, atoms: Vec<Automorphism>) -> Result<Self> {
        let p = 1.0 / atoms.len().max(1) as f64;
        Self::new(name, atoms.into_iter().map(|a| (a, p)).collect())
    }

    /// Uniform measure on `φ_fib` and its conjugate by the swap `x ↔ y`, two
    /// independent fully irreducible automorphisms of `F_2`.
    pub fn default_nonelementary() -> Self {
        let phi = Automorphism::fibonacci();
        let swap = Automorphism::swap();
        let psi = swap
            .compose(&phi)
            .and_then(|a| a.compose(&swap))
            .expect("conjugate of a verified automorphism");
        Self::uniform("uniform{fib, swap.fib.swap}", vec![phi, psi]).expect("valid measure")
    }

    /// `μ̌(g) = μ(g⁻¹)`.
    pub fn reflected(&self) -> Self {
        WalkMeasure {
            name: format!("{}^reflected", self.name),
            support: self.support.iter().map(|(a, p)| (a.invert(), *p)).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.support[0].0.rank()
    }

    pub fn support(&self) -> &[(Automorphism, f64)] {
        &self.support
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Automorphism> {
        self.support.iter().map(|(a, _)| a)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.support.iter().map(|(_, p)| *p).collect()
    }

    /// `H(μ) = Σ −μ(g) log μ(g)`.
    pub fn entropy(&self) -> f64 {
        self.support.iter().map(|(_, p)| -p * p.ln()).sum()
    }

    /// Longest image or inverse image among the atoms.
    pub fn max_image_len(&self) -> usize {
        self.atoms()
            .flat_map(|a| a.images().iter().chain(a.inverse_images()))
            .map(|w| w.len())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasureStats {
    pub entropy: f64,
    /// `Σ μ(g) log d(e, g)` with `log 0 = 0`.
    pub log_moment: f64,
}

/// Entropy and first logarithmic moment. Word lengths come from a BFS in the
/// Cayley graph of the symmetrized `generators`, distinguishing
/// automorphisms exactly.
pub fn measure_stats(
    m: &WalkMeasure,
    generators: &[Automorphism],
    radius_cap: usize,
) -> Result<MeasureStats> {
    let gens = symmetrize(generators);
    let id = Automorphism::identity(m.rank());
    let mut dist: HashMap<Automorphism, usize> = HashMap::from([(id.clone(), 0)]);
    let mut frontier = vec![id];
    let mut log_moment = 0.0;
    let mut pending: Vec<usize> = (0..m.support.len()).collect();
    let mut radius = 0;
    loop {
        pending.retain(|&i| {
            let (a, p) = &m.support[i];
            match dist.get(a) {
                Some(&d) => {
                    if d > 0 {
                        log_moment += p * (d as f64).ln();
                    }
                    false
                }
                None => true,
            }
        });
        if pending.is_empty() {
            break;
        }
        if radius == radius_cap || frontier.is_empty() {
            let i = pending[0];
            return Err(Error::Input(format!(
                "unresolved word length: atom {i} of {} is not within radius {radius_cap} of the generators",
                m.name
            )));
        }
        radius += 1;
        let mut next = Vec::new();
        for g in &frontier {
            for s in &gens {
                let h = g.compose_capped(s, None)?;
                if !dist.contains_key(&h) {
                    dist.insert(h.clone(), radius);
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    Ok(MeasureStats {
        entropy: m.entropy(),
        log_moment,
    })
}
