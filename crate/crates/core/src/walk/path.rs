use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::measure::WalkMeasure;
use crate::error::{Error, Result};
use crate::free_group::Automorphism;

/// Caps on intermediate sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WalkCaps {
    /// Maximum letters in any stored image word.
    pub letters: usize,
    /// Maximum atoms in a tracked current.
    pub atoms: usize,
}

impl Default for WalkCaps {
    fn default() -> Self {
        WalkCaps {
            letters: 10_000_000,
            atoms: 64,
        }
    }
}

/// `g_0 = e`, `g_k = g_{k−1} · s_k`. Positions stop early, with a note in
/// `truncation`, once an image would exceed the letter cap.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplePath {
    pub seed: u64,
    /// Support indices of the increments.
    pub draws: Vec<usize>,
    pub increments: Vec<Automorphism>,
    pub positions: Vec<Automorphism>,
    pub truncation: Option<String>,
}

impl SamplePath {
    /// Requested length `n`.
    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    /// Last step with a computed position.
    pub fn last_valid_step(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn is_complete(&self) -> bool {
        self.truncation.is_none()
    }

    /// Fails with a truncation error if the positions stop before `n`.
    pub fn require_complete(&self) -> Result<()> {
        match &self.truncation {
            None => Ok(()),
            Some(m) => Err(Error::Truncated {
                last_valid_step: self.last_valid_step(),
                message: m.clone(),
            }),
        }
    }

    /// Path with positions `Ψ g_k`.
    pub fn left_translate(&self, psi: &Automorphism) -> Result<SamplePath> {
        Ok(SamplePath {
            positions: self
                .positions
                .iter()
                .map(|g| psi.compose(g))
                .collect::<Result<_>>()?,
            ..self.clone()
        })
    }
}

fn draw_path(m: &WalkMeasure, n: usize, seed: u64, stream: u64, caps: WalkCaps) -> SamplePath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let dist = WeightedIndex::new(m.probabilities()).expect("validated probabilities");
    let draws: Vec<usize> = (0..n).map(|_| dist.sample(&mut rng)).collect();
    let increments: Vec<Automorphism> = draws.iter().map(|&i| m.support()[i].0.clone()).collect();
    let mut positions = vec![Automorphism::identity(m.rank())];
    positions.reserve(n);
    let mut truncation = None;
    for (k, s) in increments.iter().enumerate() {
        match positions[k].compose_capped(s, Some(caps.letters)) {
            Ok(g) => positions.push(g),
            Err(e) => {
                truncation = Some(format!("position {}: {e}", k + 1));
                break;
            }
        }
    }
    SamplePath {
        seed,
        draws,
        increments,
        positions,
        truncation,
    }
}

/// Path of length `n` with i.i.d. `m`-increments from the seeded generator.
pub fn sample_path(m: &WalkMeasure, n: usize, seed: u64) -> SamplePath {
    sample_path_capped(m, n, seed, WalkCaps::default())
}

pub fn sample_path_capped(m: &WalkMeasure, n: usize, seed: u64, caps: WalkCaps) -> SamplePath {
    draw_path(m, n, seed, 0, caps)
}

/// Two independent halves indexed `−n…n` with `g_0 = e`: the forward walk
/// of `μ` and the backward walk of `μ̌`, drawn from a separate generator
/// stream.
#[derive(Clone, Debug, PartialEq)]
pub struct BilateralPath {
    pub forward: SamplePath,
    pub backward: SamplePath,
}

impl BilateralPath {
    /// `g_k` for `−n ≤ k ≤ n`.
    pub fn position(&self, k: isize) -> Option<&Automorphism> {
        if k >= 0 {
            self.forward.positions.get(k as usize)
        } else {
            self.backward.positions.get(k.unsigned_abs())
        }
    }

    pub fn require_complete(&self) -> Result<()> {
        self.forward.require_complete()?;
        self.backward.require_complete()
    }
}

pub fn bilateral_path(m: &WalkMeasure, n: usize, seed: u64) -> Result<BilateralPath> {
    bilateral_path_capped(m, n, seed, WalkCaps::default())
}

pub fn bilateral_path_capped(
    m: &WalkMeasure,
    n: usize,
    seed: u64,
    caps: WalkCaps,
) -> Result<BilateralPath> {
    if n == 0 {
        return Err(Error::Input("bilateral paths need n ≥ 1".into()));
    }
    Ok(BilateralPath {
        forward: draw_path(m, n, seed, 0, caps),
        backward: draw_path(&m.reflected(), n, seed, 1, caps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_path_is_power() {
        let phi = Automorphism::fibonacci();
        let p = sample_path(&WalkMeasure::dirac("d", phi.clone()), 6, 1);
        for (k, g) in p.positions.iter().enumerate() {
            assert_eq!(*g, phi.pow(k));
        }
        let z = sample_path(&WalkMeasure::dirac("d", phi), 0, 1);
        assert_eq!(z.positions, vec![Automorphism::identity(2)]);
    }

    #[test]
    fn determinism_and_independence() {
        let m = WalkMeasure::default_nonelementary();
        assert_eq!(sample_path(&m, 30, 9), sample_path(&m, 30, 9));
        assert_ne!(sample_path(&m, 30, 9).draws, sample_path(&m, 30, 10).draws);
        let b = bilateral_path(&m, 30, 9).unwrap();
        assert_ne!(b.forward.draws, b.backward.draws);
        assert_eq!(b.position(0), Some(&Automorphism::identity(2)));
    }

    #[test]
    fn dirac_bilateral() {
        let phi = Automorphism::fibonacci();
        let b = bilateral_path(&WalkMeasure::dirac("d", phi.clone()), 4, 0).unwrap();
        assert_eq!(b.position(3), Some(&phi.pow(3)));
        assert_eq!(b.position(-3), Some(&phi.invert().pow(3)));
        assert!(bilateral_path(&WalkMeasure::dirac("d", phi), 0, 0).is_err());
    }

    #[test]
    fn positions_compose_exactly() {
        let m = WalkMeasure::default_nonelementary();
        let p = sample_path(&m, 12, 3);
        for k in 1..=12 {
            assert_eq!(
                p.positions[k],
                p.positions[k - 1].compose(&p.increments[k - 1]).unwrap()
            );
        }
    }

    #[test]
    fn letter_cap_truncates() {
        let caps = WalkCaps {
            letters: 50,
            atoms: 64,
        };
        let p = sample_path_capped(
            &WalkMeasure::dirac("d", Automorphism::fibonacci()),
            20,
            0,
            caps,
        );
        assert!(!p.is_complete());
        assert!(matches!(p.require_complete(), Err(Error::Truncated { .. })));
    }
}
