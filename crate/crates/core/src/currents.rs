//! Rational geodesic currents: finite weighted sums of conjugacy classes,
//! with the length pairing `⟨T, η⟩` and the `Out(F_N)`-action.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::free_group::{Automorphism, Basis, ConjClass, Letter, Word};
use crate::outer_space::MarkedMetricGraph;
use crate::scalar::{ratio_gt, FieldScalar, Scalar};

/// Finite positive combination `Σ w_g η_g` keyed by canonical, non-power
/// classes. A proper power `h^k` is stored as `k·η_h`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalCurrent<S> {
    atoms: BTreeMap<ConjClass, S>,
}

impl<S: Scalar> Default for RationalCurrent<S> {
    fn default() -> Self {
        RationalCurrent {
            atoms: BTreeMap::new(),
        }
    }
}

impl<S: Scalar> RationalCurrent<S> {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `weight · η_c`.
    pub fn of_class(c: &ConjClass, weight: S) -> Result<Self> {
        let mut out = Self::empty();
        out.add_class(c, weight)?;
        Ok(out)
    }

    pub fn of_word(w: &Word, weight: S) -> Result<Self> {
        Self::of_class(&ConjClass::of(w), weight)
    }

    pub fn from_atoms<I: IntoIterator<Item = (ConjClass, S)>>(atoms: I) -> Result<Self> {
        let mut out = Self::empty();
        for (c, w) in atoms {
            out.add_class(&c, w)?;
        }
        Ok(out)
    }

    pub fn add_class(&mut self, c: &ConjClass, weight: S) -> Result<()> {
        if c.is_trivial() {
            return Err(Error::Input("the trivial class carries no current".into()));
        }
        if !(weight > S::zero()) {
            return Err(Error::Input(format!(
                "current weight {weight} is not positive"
            )));
        }
        let (root, k) = c.canonicalize().root();
        let w = weight * S::from_count(k);
        let slot = self.atoms.entry(root).or_insert_with(S::zero);
        *slot = *slot + w;
        Ok(())
    }

    pub fn atoms(&self) -> &BTreeMap<ConjClass, S> {
        &self.atoms
    }

    pub fn weight(&self, c: &ConjClass) -> S {
        self.atoms.get(c).copied().unwrap_or_else(S::zero)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Longest atom word.
    pub fn max_atom_len(&self) -> usize {
        self.atoms.keys().map(ConjClass::len).max().unwrap_or(0)
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (c, &w) in &other.atoms {
            let slot = out.atoms.entry(c.clone()).or_insert_with(S::zero);
            *slot = *slot + w;
        }
        out
    }

    pub fn scaled(&self, factor: S) -> Result<Self> {
        if !(factor > S::zero()) {
            return Err(Error::Input(format!(
                "scale factor {factor} is not positive"
            )));
        }
        Ok(RationalCurrent {
            atoms: self
                .atoms
                .iter()
                .map(|(c, &w)| (c.clone(), w * factor))
                .collect(),
        })
    }

    /// `Φ(η)`: each atom `η_g` goes to `η_{φ(g)}`.
    pub fn act(&self, a: &Automorphism) -> Result<Self> {
        self.act_capped(a, None)
    }

    pub fn act_capped(&self, a: &Automorphism, cap: Option<usize>) -> Result<Self> {
        let mut out = Self::empty();
        for (c, &w) in &self.atoms {
            let img = a.apply_capped(c.word().letters(), cap)?;
            let class = ConjClass::of(&img);
            if class.is_proper_power() {
                return Err(Error::Internal(
                    "automorphism image of a non-power became a proper power".into(),
                ));
            }
            let slot = out.atoms.entry(class).or_insert_with(S::zero);
            *slot = *slot + w;
        }
        Ok(out)
    }

    /// `(canonical word, weight)` pairs for serialization.
    pub fn to_pairs(&self, basis: &Basis) -> Vec<(String, f64)> {
        self.atoms
            .iter()
            .map(|(c, w)| (basis.format_word(c.word()), w.to_f64_lossy()))
            .collect()
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(S) -> T) -> RationalCurrent<T> {
        RationalCurrent {
            atoms: self.atoms.iter().map(|(c, &w)| (c.clone(), f(w))).collect(),
        }
    }
}

/// `η₀ = [x_1] + … + [x_N] + [x_1x_2] + … + [x_1x_N]`, which pairs positively
/// with every tree in the closure of outer space.
pub fn base_current<S: Scalar>(rank: usize) -> RationalCurrent<S> {
    let mut out = RationalCurrent::empty();
    for i in 0..rank {
        out.add_class(&ConjClass::of(&Word::generator(i)), S::one())
            .expect("generator class");
    }
    for j in 1..rank {
        let w = Word::reduce([Letter::generator(0), Letter::generator(j)]);
        out.add_class(&ConjClass::of(&w), S::one())
            .expect("product class");
    }
    out
}

/// `⟨T, η⟩ = Σ w_g ‖g‖_T`.
pub fn pair<S: Scalar>(t: &MarkedMetricGraph<S>, c: &RationalCurrent<S>) -> S {
    pair_capped(t, c, None).expect("uncapped pairing")
}

pub fn pair_capped<S: Scalar>(
    t: &MarkedMetricGraph<S>,
    c: &RationalCurrent<S>,
    cap: Option<usize>,
) -> Result<S> {
    let mut total = S::zero();
    for (g, &w) in c.atoms() {
        total = total + w * t.translation_length_capped(g.word().letters(), cap)?;
    }
    Ok(total)
}

/// Largest pairing ratio `⟨T2, η⟩ / ⟨T, η⟩` over a family of currents.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentStretch<S> {
    pub target: S,
    pub source: S,
    /// Index of the maximizing current in the family.
    pub index: usize,
}

impl<S: Scalar> CurrentStretch<S> {
    pub fn to_f64(&self) -> f64 {
        self.target.to_f64_lossy() / self.source.to_f64_lossy()
    }
}

impl<S: FieldScalar> CurrentStretch<S> {
    pub fn value(&self) -> S {
        self.target / self.source
    }
}

/// `Λ_X(T, T2)` for a finite family `X`.
pub fn stretch<S: Scalar>(
    family: &[RationalCurrent<S>],
    t: &MarkedMetricGraph<S>,
    t2: &MarkedMetricGraph<S>,
) -> Result<CurrentStretch<S>> {
    let pairs: Vec<(S, S)> = family.iter().map(|c| (pair(t, c), pair(t2, c))).collect();
    stretch_from_pairings(&pairs)
}

/// `Λ` from precomputed `(⟨T, η⟩, ⟨T2, η⟩)` pairs.
pub fn stretch_from_pairings<S: Scalar>(pairs: &[(S, S)]) -> Result<CurrentStretch<S>> {
    if pairs.is_empty() {
        return Err(Error::Input("stretch over an empty family".into()));
    }
    let mut best: Option<CurrentStretch<S>> = None;
    for (i, &(source, target)) in pairs.iter().enumerate() {
        if !(source > S::zero()) {
            return Err(Error::Degenerate(format!(
                "current {i} pairs to zero with the source tree"
            )));
        }
        if best
            .as_ref()
            .is_none_or(|b| ratio_gt(target, source, b.target, b.source))
        {
            best = Some(CurrentStretch {
                target,
                source,
                index: i,
            });
        }
    }
    Ok(best.expect("nonempty family"))
}

/// Rescales `c` so that `⟨T, c⟩ = 1`.
pub fn normalize_against<S: FieldScalar>(
    c: &RationalCurrent<S>,
    t: &MarkedMetricGraph<S>,
) -> Result<RationalCurrent<S>> {
    normalize_against_capped(c, t, None)
}

pub fn normalize_against_capped<S: FieldScalar>(
    c: &RationalCurrent<S>,
    t: &MarkedMetricGraph<S>,
    cap: Option<usize>,
) -> Result<RationalCurrent<S>> {
    if c.is_empty() {
        return Err(Error::Input("cannot normalize the empty current".into()));
    }
    let p = pair_capped(t, c, cap)?;
    if !(p > S::zero()) {
        return Err(Error::Degenerate("current pairs to zero".into()));
    }
    c.scaled(S::one() / p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PositivityVerdict {
    /// Positive on every probe; not a proof of positivity.
    NotFalsified,
    Falsified,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositivityReport<S> {
    /// `min_T ⟨T, c1 + c2⟩ / vol(T)` over the probes.
    pub min_margin: S,
    /// Probe index attaining the minimum.
    pub argmin: usize,
    pub verdict: PositivityVerdict,
}

/// Probe-level positivity check for a pair of currents.
pub fn check_positive_pair<S: FieldScalar>(
    c1: &RationalCurrent<S>,
    c2: &RationalCurrent<S>,
    probes: &[MarkedMetricGraph<S>],
) -> Result<PositivityReport<S>> {
    if probes.is_empty() {
        return Err(Error::Input(
            "positivity check needs at least one probe".into(),
        ));
    }
    let sum = c1.plus(c2);
    let mut best: Option<(S, usize)> = None;
    for (i, t) in probes.iter().enumerate() {
        let m = pair(t, &sum) / t.volume();
        if best.is_none_or(|(b, _)| m < b) {
            best = Some((m, i));
        }
    }
    let (min_margin, argmin) = best.expect("nonempty probes");
    Ok(PositivityReport {
        min_margin,
        argmin,
        verdict: if min_margin > S::zero() {
            PositivityVerdict::NotFalsified
        } else {
            PositivityVerdict::Falsified
        },
    })
}

/// Default subword window for [`projective_current_distance`].
pub const DEFAULT_CYLINDER_WINDOW: usize = 3;

/// Cylinder key: subword length and its letters packed base `2N`.
type CylinderKey = (usize, u64);

/// `η(C(v))` for all reduced `v` with `1 ≤ |v| ≤ window`: weighted counts of
/// cyclic occurrences of `v` in each atom and its inverse.
pub fn cylinder_counts<S: Scalar>(
    c: &RationalCurrent<S>,
    rank: usize,
    window: usize,
) -> HashMap<CylinderKey, S> {
    let base = 2 * rank as u64;
    let mut out: HashMap<CylinderKey, S> = HashMap::new();
    for (g, &w) in c.atoms() {
        let fwd = g.word().letters();
        let inv: Vec<Letter> = g.word().inverse().into_letters();
        for letters in [fwd, &inv[..]] {
            let n = letters.len();
            if n == 0 {
                continue;
            }
            for start in 0..n {
                let mut code = 0u64;
                for len in 1..=window {
                    let l = letters[(start + len - 1) % n];
                    code = code * base + u64::from(l.order_key());
                    let slot = out.entry((len, code)).or_insert_with(S::zero);
                    *slot = *slot + w;
                }
            }
        }
    }
    out
}

/// Projective distance between currents, computed on cylinder coordinates
/// after normalizing both against `t_ref`: the `ℓ∞` distance between the
/// normalized subword-occurrence vectors of length `≤ window`.
pub fn projective_current_distance<S: FieldScalar>(
    c1: &RationalCurrent<S>,
    c2: &RationalCurrent<S>,
    t_ref: &MarkedMetricGraph<S>,
    window: usize,
) -> Result<S> {
    let n1 = normalize_against(c1, t_ref)?;
    let n2 = normalize_against(c2, t_ref)?;
    Ok(cylinder_distance(&n1, &n2, t_ref.rank(), window))
}

/// `ℓ∞` distance of cylinder vectors, no normalization.
pub fn cylinder_distance<S: Scalar>(
    c1: &RationalCurrent<S>,
    c2: &RationalCurrent<S>,
    rank: usize,
    window: usize,
) -> S {
    let a = cylinder_counts(c1, rank, window);
    let b = cylinder_counts(c2, rank, window);
    let mut worst = S::zero();
    for (k, &va) in &a {
        let vb = b.get(k).copied().unwrap_or_else(S::zero);
        let d = if va > vb { va - vb } else { vb - va };
        if d > worst {
            worst = d;
        }
    }
    for (k, &vb) in &b {
        if !a.contains_key(k) && vb > worst {
            worst = vb;
        }
    }
    worst
}
