//! Axes of positive current pairs, the height function `σ`, and strips.
//!
//! The distortion `L(T)` is a supremum over the closure of outer space; here
//! it is a maximum over an explicit [`ProbeSet`] of interior trees, hence a
//! lower bound, and every axis verdict holds "up to probes".

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::currents::{pair, stretch_from_pairings, RationalCurrent};
use crate::error::{Error, Result};
use crate::free_group::{
    enumerate_conj_classes, Automorphism, ConjClass, Word, DEFAULT_CLASS_BUDGET,
};
use crate::outer_space::{lipschitz, sym_distance, MarkedMetricGraph};
use crate::scalar::FieldScalar;

/// Slack on theorem inequalities evaluated in floating point.
pub const THEOREM_SLACK: f64 = 1e-9;

/// Finite family of interior trees standing in for the closure of outer
/// space.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSet<S> {
    trees: Vec<MarkedMetricGraph<S>>,
    description: String,
}

impl<S: FieldScalar> ProbeSet<S> {
    pub fn new(trees: Vec<MarkedMetricGraph<S>>, description: impl Into<String>) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::Input("probe set is empty".into()));
        }
        Ok(ProbeSet {
            trees,
            description: description.into(),
        })
    }

    pub fn trees(&self) -> &[MarkedMetricGraph<S>] {
        &self.trees
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn contains(&self, t: &MarkedMetricGraph<S>) -> bool {
        self.trees.iter().any(|p| p == t)
    }

    /// Adds trees not already present.
    pub fn with(
        mut self,
        extra: impl IntoIterator<Item = MarkedMetricGraph<S>>,
        note: &str,
    ) -> Self {
        for t in extra {
            if !self.contains(&t) {
                self.trees.push(t);
            }
        }
        if !note.is_empty() {
            self.description = format!("{} + {note}", self.description);
        }
        self
    }

    /// Image of every probe under `a`.
    pub fn act(&self, a: &Automorphism) -> Result<Self> {
        Ok(ProbeSet {
            trees: self.trees.iter().map(|t| t.act(a)).collect::<Result<_>>()?,
            description: format!("{} (translated)", self.description),
        })
    }
}

/// Closes a generating set under inverses, dropping duplicates.
pub fn symmetrize(generators: &[Automorphism]) -> Vec<Automorphism> {
    let mut out: Vec<Automorphism> = Vec::new();
    for g in generators {
        for h in [g.clone(), g.invert()] {
            if !out.contains(&h) {
                out.push(h);
            }
        }
    }
    out
}

/// Elements of the word ball `B_radius` of the (symmetrized) generators, Aut-level
/// duplicates removed.
pub fn word_ball(generators: &[Automorphism], radius: usize) -> Vec<Automorphism> {
    let gens = symmetrize(generators);
    let rank = gens.first().map(Automorphism::rank).unwrap_or(2);
    let mut ball = vec![Automorphism::identity(rank)];
    let mut frontier = ball.clone();
    for _ in 0..radius {
        let mut next = Vec::new();
        for g in &frontier {
            for s in &gens {
                let h = g.compose_capped(s, None).expect("uncapped composition");
                if !ball.contains(&h) {
                    ball.push(h.clone());
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    ball
}

/// Number of random-length roses in [`default_probes`].
pub const DEFAULT_RANDOM_ROSES: usize = 16;

/// Default probe recipe: points of interest, the orbit of `basepoint` under
/// the ball of radius 2, and random-length roses (lengths in `[1/4, 4]`,
/// multiples of `1/8`).
pub fn default_probes<S: FieldScalar>(
    points: &[MarkedMetricGraph<S>],
    generators: &[Automorphism],
    basepoint: &MarkedMetricGraph<S>,
    random_roses: usize,
    seed: u64,
) -> Result<ProbeSet<S>> {
    let mut trees: Vec<MarkedMetricGraph<S>> = Vec::new();
    let push = |t: MarkedMetricGraph<S>, trees: &mut Vec<_>| {
        if !trees.contains(&t) {
            trees.push(t);
        }
    };
    for p in points {
        push(p.clone(), &mut trees);
    }
    for g in word_ball(generators, 2) {
        push(basepoint.act(&g)?, &mut trees);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eighth = S::one() / S::from_count(8);
    for _ in 0..random_roses {
        let lengths: Vec<S> = (0..basepoint.rank())
            .map(|_| S::from_count(rng.gen_range(2..=32)) * eighth)
            .collect();
        push(MarkedMetricGraph::rose(&lengths)?, &mut trees);
    }
    ProbeSet::new(
        trees,
        format!(
            "{} points of interest + B_2 orbit of basepoint + {random_roses} random roses (seed {seed})",
            points.len()
        ),
    )
}

fn positivity(e: Error) -> Error {
    match e {
        Error::Degenerate(m) => Error::Positivity(m),
        other => other,
    }
}

/// `l(T, T2) = Lip(T, T2) / Λ_{c1,c2}(T, T2)`; always `≥ 1`.
pub fn l_value<S: FieldScalar>(
    c1: &RationalCurrent<S>,
    c2: &RationalCurrent<S>,
    t: &MarkedMetricGraph<S>,
    t2: &MarkedMetricGraph<S>,
) -> Result<S> {
    let lip = lipschitz(t, t2)?;
    let pairs = [(pair(t, c1), pair(t2, c1)), (pair(t, c2), pair(t2, c2))];
    l_value_from_parts(lip.target, lip.source, &pairs)
}

/// `l` from a raw Lipschitz ratio and `(⟨T, η⟩, ⟨T2, η⟩)` pairings.
pub fn l_value_from_parts<S: FieldScalar>(
    lip_target: S,
    lip_source: S,
    pairs: &[(S, S)],
) -> Result<S> {
    let st = stretch_from_pairings(pairs).map_err(positivity)?;
    if !(st.target > S::zero()) {
        return Err(Error::Positivity(
            "pair stretches to zero: not positive on this input".into(),
        ));
    }
    Ok((lip_target * st.source) / (lip_source * st.target))
}

/// Maximum of `l` over the probes.
#[derive(Clone, Debug, PartialEq)]
pub struct LValue<S> {
    pub value: S,
    pub argmax: usize,
}

pub fn big_l_value<S: FieldScalar>(
    c1: &RationalCurrent<S>,
    c2: &RationalCurrent<S>,
    t: &MarkedMetricGraph<S>,
    probes: &ProbeSet<S>,
) -> Result<LValue<S>> {
    let (s1, s2) = (pair(t, c1), pair(t, c2));
    let mut best: Option<LValue<S>> = None;
    for (i, p) in probes.trees().iter().enumerate() {
        let lip = lipschitz(t, p)?;
        let v = l_value_from_parts(
            lip.target,
            lip.source,
            &[(s1, pair(p, c1)), (s2, pair(p, c2))],
        )?;
        if best.as_ref().is_none_or(|b| v > b.value) {
            best = Some(LValue {
                value: v,
                argmax: i,
            });
        }
    }
    Ok(best.expect("probe sets are nonempty"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisVerdict {
    InAxisUpToProbes,
    Excluded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxisCertificate<S> {
    pub tree_id: String,
    pub pair: (RationalCurrent<S>, RationalCurrent<S>),
    /// Max of `l` over the probes: a lower bound for `L(T)`.
    pub l_lower: S,
    pub argmax_probe: usize,
    pub threshold: S,
    pub verdict: AxisVerdict,
}

impl<S: FieldScalar> AxisCertificate<S> {
    pub fn in_axis(&self) -> bool {
        self.verdict == AxisVerdict::InAxisUpToProbes
    }

    /// `threshold − l_lower`.
    pub fn margin(&self) -> S {
        self.threshold - self.l_lower
    }
}

pub fn axis_membership<S: FieldScalar>(
    c1: &RationalCurrent<S>,
    c2: &RationalCurrent<S>,
    t: &MarkedMetricGraph<S>,
    threshold: S,
    probes: &ProbeSet<S>,
    tree_id: &str,
) -> Result<AxisCertificate<S>> {
    if threshold < S::one() {
        return Err(Error::Input(format!(
            "axis threshold {threshold} is below 1"
        )));
    }
    let l = big_l_value(c1, c2, t, probes)?;
    Ok(AxisCertificate {
        tree_id: tree_id.to_string(),
        pair: (c1.clone(), c2.clone()),
        verdict: if l.value > threshold {
            AxisVerdict::Excluded
        } else {
            AxisVerdict::InAxisUpToProbes
        },
        l_lower: l.value,
        argmax_probe: l.argmax,
        threshold,
    })
}

/// Axis of a tree pair given by finite proxy lists: the best (minimal) pair.
pub fn axis_membership_lists<S: FieldScalar>(
    minus: &[RationalCurrent<S>],
    plus: &[RationalCurrent<S>],
    t: &MarkedMetricGraph<S>,
    threshold: S,
    probes: &ProbeSet<S>,
    tree_id: &str,
) -> Result<AxisCertificate<S>> {
    if minus.is_empty() || plus.is_empty() {
        return Err(Error::Input("proxy current lists must be nonempty".into()));
    }
    let mut best: Option<AxisCertificate<S>> = None;
    for cm in minus {
        for cp in plus {
            let cert = axis_membership(cm, cp, t, threshold, probes, tree_id)?;
            if best.as_ref().is_none_or(|b| cert.l_lower < b.l_lower) {
                best = Some(cert);
            }
        }
    }
    Ok(best.expect("nonempty lists"))
}

/// Height `σ(T) = log(⟨T, c+⟩ / ⟨T, c-⟩)`.
pub fn sigma<S: FieldScalar>(
    t: &MarkedMetricGraph<S>,
    c_minus: &RationalCurrent<S>,
    c_plus: &RationalCurrent<S>,
) -> Result<f64> {
    sigma_from_pairings(pair(t, c_minus), pair(t, c_plus))
}

pub fn sigma_from_pairings<S: FieldScalar>(minus: S, plus: S) -> Result<f64> {
    if !(minus > S::zero()) || !(plus > S::zero()) {
        return Err(Error::Positivity("σ needs both pairings positive".into()));
    }
    Ok((plus / minus).to_f64_lossy().ln())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub sigma_s: f64,
    pub sigma_t: f64,
    pub d_sym: f64,
    /// `2 log L1`.
    pub gap_bound: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

impl SandwichReport {
    pub fn sigma_gap(&self) -> f64 {
        (self.sigma_s - self.sigma_t).abs()
    }

    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds
    }
}

/// Lower half `|σ(S) − σ(T)| ≤ d_sym(S, T)`, valid for every pair.
pub fn sandwich_lower<S: FieldScalar>(
    s: &MarkedMetricGraph<S>,
    t: &MarkedMetricGraph<S>,
    c_minus: &RationalCurrent<S>,
    c_plus: &RationalCurrent<S>,
) -> Result<SandwichReport> {
    let sigma_s = sigma(s, c_minus, c_plus)?;
    let sigma_t = sigma(t, c_minus, c_plus)?;
    let d_sym = sym_distance(s, t)?;
    Ok(SandwichReport {
        sigma_s,
        sigma_t,
        d_sym,
        gap_bound: f64::INFINITY,
        lower_holds: (sigma_s - sigma_t).abs() <= d_sym + THEOREM_SLACK,
        upper_holds: true,
    })
}

/// Both halves `|σ(S)−σ(T)| ≤ d_sym(S,T) ≤ |σ(S)−σ(T)| + 2 log L1`, for `S`
/// and `T` certified in the `L1`-axis with probes containing both.
pub fn sandwich_check<S: FieldScalar>(
    s: &MarkedMetricGraph<S>,
    t: &MarkedMetricGraph<S>,
    c_minus: &RationalCurrent<S>,
    c_plus: &RationalCurrent<S>,
    l1: S,
    probes: &ProbeSet<S>,
) -> Result<SandwichReport> {
    if !probes.contains(s) || !probes.contains(t) {
        return Err(Error::Contract(
            "sandwich check needs both trees in the probe set".into(),
        ));
    }
    for (tree, id) in [(s, "S"), (t, "T")] {
        let cert = axis_membership(c_minus, c_plus, tree, l1, probes, id)?;
        if !cert.in_axis() {
            return Err(Error::Contract(format!(
                "{id} is not in the axis at threshold {l1} (L ≥ {})",
                cert.l_lower
            )));
        }
    }
    let mut rep = sandwich_lower(s, t, c_minus, c_plus)?;
    rep.gap_bound = 2.0 * l1.to_f64_lossy().ln();
    rep.upper_holds = rep.d_sym <= rep.sigma_gap() + rep.gap_bound + THEOREM_SLACK;
    Ok(rep)
}

/// Whether `a` moves `basepoint` into the `L`-axis of `(c_minus, c_plus)`.
pub fn strip_membership<S: FieldScalar>(
    a: &Automorphism,
    c_minus: &RationalCurrent<S>,
    c_plus: &RationalCurrent<S>,
    threshold: S,
    probes: &ProbeSet<S>,
    basepoint: &MarkedMetricGraph<S>,
) -> Result<bool> {
    Ok(strip_certificate(a, c_minus, c_plus, threshold, probes, basepoint)?.in_axis())
}

pub fn strip_certificate<S: FieldScalar>(
    a: &Automorphism,
    c_minus: &RationalCurrent<S>,
    c_plus: &RationalCurrent<S>,
    threshold: S,
    probes: &ProbeSet<S>,
    basepoint: &MarkedMetricGraph<S>,
) -> Result<AxisCertificate<S>> {
    let t = basepoint.act(a)?;
    axis_membership(c_minus, c_plus, &t, threshold, probes, "a·basepoint")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusRow {
    pub k: usize,
    pub ball_size: usize,
    pub strip_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusReport {
    pub rows: Vec<CensusRow>,
    /// `max_{k ≥ 1} strip_count(k) / k`.
    pub lambda: f64,
    /// Least-squares slope of `strip_count` against `k`, through the origin.
    pub fitted_slope: f64,
    /// Distinct automorphisms merged because they give the same orbit tree.
    pub collisions: usize,
    /// Largest `L` lower bound among strip members.
    pub max_member_l: f64,
}

impl CensusReport {
    fn finish(rows: Vec<CensusRow>, collisions: usize, max_member_l: f64) -> Self {
        let lambda = rows
            .iter()
            .filter(|r| r.k >= 1)
            .map(|r| r.strip_count as f64 / r.k as f64)
            .fold(0.0, f64::max);
        let (num, den) = rows.iter().fold((0.0, 0.0), |(n, d), r| {
            (n + (r.k * r.strip_count) as f64, d + (r.k * r.k) as f64)
        });
        CensusReport {
            rows,
            lambda,
            fitted_slope: if den > 0.0 { num / den } else { 0.0 },
            collisions,
            max_member_l,
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[0].strip_count <= w[1].strip_count && w[0].ball_size <= w[1].ball_size)
    }
}

/// A census that stopped at the ball-size budget.
#[derive(Clone, Debug, PartialEq)]
pub struct CensusTruncated {
    pub partial: CensusReport,
    pub message: String,
}

impl std::fmt::Display for CensusTruncated {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "census truncated: {}", self.message)
    }
}

impl std::error::Error for CensusTruncated {}

/// Orbit-tree fingerprint: per-edge multiplicities of the tight loops of the
/// fingerprint classes. Exact in any scalar type.
fn fingerprint<S: FieldScalar>(t: &MarkedMetricGraph<S>, classes: &[ConjClass]) -> Vec<u32> {
    let e = t.graph().edge_count();
    let mut out = Vec::with_capacity(classes.len() * e);
    for c in classes {
        let lp = t
            .edge_loop(c.word().letters(), None)
            .expect("uncapped loop");
        let mut counts = vec![0u32; e];
        for l in lp.cyclic_core() {
            counts[l.index()] += 1;
        }
        out.extend(counts);
    }
    out
}

/// Counts strip members in word balls `B_0 ⊆ … ⊆ B_{k_max}`. Group elements
/// are identified when their orbit trees agree on the fingerprint classes
/// (cyclic words up to length 3 plus the images of the basis under each
/// generator).
#[allow(clippy::too_many_arguments)]
pub fn strip_ball_census<S: FieldScalar>(
    c_minus: &RationalCurrent<S>,
    c_plus: &RationalCurrent<S>,
    threshold: S,
    probes: &ProbeSet<S>,
    generators: &[Automorphism],
    basepoint: &MarkedMetricGraph<S>,
    k_max: usize,
    ball_budget: usize,
) -> std::result::Result<CensusReport, Box<CensusTruncated>> {
    let gens = symmetrize(generators);
    let rank = basepoint.rank();
    let mut classes =
        enumerate_conj_classes(rank, 3, DEFAULT_CLASS_BUDGET).expect("small enumeration");
    for g in &gens {
        for i in 0..rank {
            let c = ConjClass::of(&g.apply(&Word::generator(i)));
            if !classes.contains(&c) {
                classes.push(c);
            }
        }
    }
    let member = |a: &Automorphism| -> Result<(bool, f64)> {
        let cert = strip_certificate(a, c_minus, c_plus, threshold, probes, basepoint)?;
        Ok((cert.in_axis(), cert.l_lower.to_f64_lossy()))
    };
    let fail = |rows: Vec<CensusRow>, collisions, max_l, message: String| {
        Box::new(CensusTruncated {
            partial: CensusReport::finish(rows, collisions, max_l),
            message,
        })
    };

    let id = Automorphism::identity(rank);
    let mut seen: HashMap<Vec<u32>, Automorphism> = HashMap::new();
    seen.insert(fingerprint(basepoint, &classes), id.clone());
    let mut rows = Vec::new();
    let mut collisions = 0;
    let mut max_l = 0.0f64;
    let (in0, l0) = member(&id).map_err(|e| fail(vec![], 0, 0.0, e.to_string()))?;
    let mut strip_count = usize::from(in0);
    if in0 {
        max_l = l0;
    }
    rows.push(CensusRow {
        k: 0,
        ball_size: 1,
        strip_count,
    });
    let mut frontier: VecDeque<Automorphism> = VecDeque::from([id]);
    for k in 1..=k_max {
        let mut next = VecDeque::new();
        while let Some(g) = frontier.pop_front() {
            for s in &gens {
                let h = g.compose_capped(s, None).expect("uncapped composition");
                let tree = basepoint
                    .act(&h)
                    .map_err(|e| fail(rows.clone(), collisions, max_l, e.to_string()))?;
                let key = fingerprint(&tree, &classes);
                if let Some(prev) = seen.get(&key) {
                    if *prev != h {
                        collisions += 1;
                    }
                    continue;
                }
                if seen.len() >= ball_budget {
                    return Err(fail(
                        rows,
                        collisions,
                        max_l,
                        format!("ball B_{k} exceeds {ball_budget} elements"),
                    ));
                }
                let (inside, l) =
                    member(&h).map_err(|e| fail(rows.clone(), collisions, max_l, e.to_string()))?;
                if inside {
                    strip_count += 1;
                    max_l = max_l.max(l);
                }
                seen.insert(key, h.clone());
                next.push_back(h);
            }
        }
        rows.push(CensusRow {
            k,
            ball_size: seen.len(),
            strip_count,
        });
        frontier = next;
    }
    Ok(CensusReport::finish(rows, collisions, max_l))
}
