use serde::Serialize;

use super::measure::WalkMeasure;
use super::path::{bilateral_path_capped, BilateralPath, WalkCaps};
use super::track::current_track;
use crate::axes::{
    big_l_value, default_probes, l_value_from_parts, ProbeSet, DEFAULT_RANDOM_ROSES,
};
use crate::currents::{check_positive_pair, pair_capped, PositivityVerdict};
use crate::error::{Error, Result};
use crate::free_group::Automorphism;
use crate::outer_space::lipschitz;
use crate::{Current, MarkedGraph};

/// `1.05^k` from 1 up to 20.
pub fn default_l_grid() -> Vec<f64> {
    let mut grid = Vec::new();
    let mut l: f64 = 1.0;
    while l <= 20.0 {
        grid.push(l);
        l *= 1.05;
    }
    grid
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityConfig {
    pub n: usize,
    pub l_grid: Vec<f64>,
    pub random_roses: usize,
    pub probe_seed: u64,
    pub caps: WalkCaps,
}

impl DensityConfig {
    pub fn new(n: usize) -> Self {
        DensityConfig {
            n,
            l_grid: default_l_grid(),
            random_roses: DEFAULT_RANDOM_ROSES,
            probe_seed: 0,
            caps: WalkCaps::default(),
        }
    }
}

/// Everything the strip test depends on: the bilateral path, the proxy
/// pair, and the probes. Forward orbit points `g_k T0` come first in the
/// probe list.
#[derive(Clone, Debug)]
pub struct DensityInputs {
    pub seed: u64,
    pub path: BilateralPath,
    pub t0: MarkedGraph,
    pub orbit: Vec<MarkedGraph>,
    pub c_minus: Current,
    pub c_plus: Current,
    pub probes: ProbeSet<f64>,
    pub positivity_margin: f64,
    caps: WalkCaps,
}

/// Builds the path, proxies `c+ = g_n η₀` and `c- = g_{−n} η₀` (both
/// normalized against `T0`), and the probes; checks positivity on the probes.
pub fn prepare_density(
    m: &WalkMeasure,
    seed: u64,
    t0: &MarkedGraph,
    cfg: &DensityConfig,
) -> Result<DensityInputs> {
    let path = bilateral_path_capped(m, cfg.n, seed, cfg.caps)?;
    path.require_complete()?;
    let c_plus = current_track(&path.forward, t0, cfg.caps)?
        .terminal()
        .clone();
    let c_minus = current_track(&path.backward, t0, cfg.caps)?
        .terminal()
        .clone();
    let cap = Some(cfg.caps.letters);
    let orbit = path
        .forward
        .positions
        .iter()
        .map(|g| t0.act_capped(g, cap))
        .collect::<Result<Vec<_>>>()?;
    let atoms: Vec<Automorphism> = m.atoms().cloned().collect();
    let defaults = default_probes(&[], &atoms, t0, cfg.random_roses, cfg.probe_seed)?;
    let note = defaults.description().to_string();
    let probes = ProbeSet::new(orbit.clone(), "forward orbit points")?
        .with(defaults.trees().to_vec(), &note);
    let report = check_positive_pair(&c_minus, &c_plus, probes.trees())?;
    if report.verdict == PositivityVerdict::Falsified {
        return Err(Error::Positivity(format!(
            "proxy pair vanishes on probe {} (margin {})",
            report.argmin, report.min_margin
        )));
    }
    Ok(DensityInputs {
        seed,
        path,
        t0: t0.clone(),
        orbit,
        c_minus,
        c_plus,
        probes,
        positivity_margin: report.min_margin,
        caps: cfg.caps,
    })
}

/// `L(g_k T0)` for `k = 0..=n` by direct evaluation.
pub fn l_values_reference(inp: &DensityInputs) -> Result<Vec<f64>> {
    inp.orbit
        .iter()
        .map(|t| Ok(big_l_value(&inp.c_minus, &inp.c_plus, t, &inp.probes)?.value))
        .collect()
}

/// Same values as [`l_values_reference`], with pairings cached per probe
/// and orbit-to-orbit stretches computed from the unit-length increments
/// `Lip(g_k T0, g_j T0) = Lip(T0, g_k⁻¹ g_j T0)`.
pub fn l_values(inp: &DensityInputs) -> Result<Vec<f64>> {
    let cap = Some(inp.caps.letters);
    let pairings: Vec<(f64, f64)> = inp
        .probes
        .trees()
        .iter()
        .map(|p| {
            Ok((
                pair_capped(p, &inp.c_minus, cap)?,
                pair_capped(p, &inp.c_plus, cap)?,
            ))
        })
        .collect::<Result<_>>()?;
    let n = inp.orbit.len() - 1;
    let inc = &inp.path.forward.increments;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        // g_k⁻¹ g_j for every j.
        let mut rel: Vec<Automorphism> = vec![Automorphism::identity(inp.t0.rank()); n + 1];
        for j in k + 1..=n {
            rel[j] = rel[j - 1].compose_capped(&inc[j - 1], cap)?;
        }
        let mut u = Automorphism::identity(inp.t0.rank());
        for j in (0..k).rev() {
            u = inc[j].compose_capped(&u, cap)?;
            rel[j] = u.invert();
        }
        let mut best = f64::NEG_INFINITY;
        for (i, p) in inp.probes.trees().iter().enumerate() {
            let lip = if i <= n {
                lipschitz(&inp.t0, &inp.t0.act_capped(&rel[i], cap)?)?
            } else {
                lipschitz(&inp.orbit[k], p)?
            };
            let pairs = [
                (pairings[k].0, pairings[i].0),
                (pairings[k].1, pairings[i].1),
            ];
            best = best.max(l_value_from_parts(lip.target, lip.source, &pairs)?);
        }
        out.push(best);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityResult {
    pub seed: u64,
    /// `L(g_k T0)` lower bounds, `k = 0..=n`.
    pub l_values: Vec<f64>,
    /// `(L, density)` on the grid.
    pub densities: Vec<(f64, f64)>,
    /// Smallest grid value with density `≥ 1/2`.
    pub minimal_l_grid: Option<f64>,
    /// Smallest `L` with density `≥ 1/2`: an order statistic of `l_values`.
    pub minimal_l: f64,
    pub density_at_minimal: f64,
    pub positivity_margin: f64,
    pub probe_count: usize,
}

/// Density of `{k ∈ [0, n] : L(g_k T0) ≤ L}`.
pub fn density_at(l_values: &[f64], l: f64) -> f64 {
    l_values.iter().filter(|&&v| v <= l).count() as f64 / l_values.len() as f64
}

pub fn summarize_density(inp: &DensityInputs, l_values: Vec<f64>, grid: &[f64]) -> DensityResult {
    let densities: Vec<(f64, f64)> = grid
        .iter()
        .map(|&l| (l, density_at(&l_values, l)))
        .collect();
    let minimal_l_grid = densities.iter().find(|(_, d)| *d >= 0.5).map(|(l, _)| *l);
    let mut sorted = l_values.clone();
    sorted.sort_by(f64::total_cmp);
    let minimal_l = sorted[sorted.len().div_ceil(2) - 1];
    DensityResult {
        seed: inp.seed,
        density_at_minimal: density_at(&l_values, minimal_l),
        l_values,
        densities,
        minimal_l_grid,
        minimal_l,
        positivity_margin: inp.positivity_margin,
        probe_count: inp.probes.len(),
    }
}

/// Density of strip visits along one bilateral path.
pub fn strip_density_experiment(
    m: &WalkMeasure,
    seed: u64,
    t0: &MarkedGraph,
    cfg: &DensityConfig,
) -> Result<DensityResult> {
    let inp = prepare_density(m, seed, t0, cfg)?;
    let ls = l_values(&inp)?;
    Ok(summarize_density(&inp, ls, &cfg.l_grid))
}
