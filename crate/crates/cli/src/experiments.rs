//! Experiment dispatch. Every experiment yields one or more records; all
//! per-seed work runs in parallel and is merged in seed order.

use outspace::axes::{axis_membership, big_l_value, default_probes, strip_ball_census, ProbeSet};
use outspace::ffc::{format_labels, psi_track};
use outspace::free_group::{Automorphism, Basis};
use outspace::outer_space::{candidates, distance, lipschitz, sym_distance};
use outspace::walk::{
    current_track, drift_ensemble, sample_path_capped, spectrum_track, strip_density_experiment,
    Cell, DensityConfig, ExperimentRecord,
};
use outspace::{Error, MarkedGraph, Result};
use rayon::prelude::*;

use crate::config::{CensusSpec, CurrentPair, ExperimentConfig, ExperimentKind};

pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

const FLOAT: &str = "float: f64 arithmetic throughout";
const PROBE_BOUND: &str = "probe-lower-bound: L values are maxima over a finite probe set, so axis verdicts hold up to probes";
const PROXY: &str = "proxy currents: pushed-forward base current stands in for a current dual to the limit tree; heuristic for non-Dirac measures";

/// A record and the file stem it is written under.
pub struct Output {
    pub stem: &'static str,
    pub record: ExperimentRecord,
}

pub fn run_experiment(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<Vec<Output>> {
    match cfg.experiment {
        ExperimentKind::Walk => walk(cfg, seeds),
        ExperimentKind::NsDynamics => ns_dynamics(cfg, seeds),
        ExperimentKind::Drift => drift(cfg, seeds),
        ExperimentKind::StripDensity => density(cfg, seeds),
        ExperimentKind::Lip => lip(cfg),
        ExperimentKind::Axis => axis(cfg),
        ExperimentKind::Census => census(cfg),
    }
}

fn common_params(rec: &mut ExperimentRecord, cfg: &ExperimentConfig, seeds: &[u64]) {
    rec.seeds = seeds.to_vec();
    rec.param("rank", cfg.basis.rank());
    rec.param("n", cfg.n);
    if let Some(m) = &cfg.measure {
        rec.param("measure", m.name());
        rec.param(
            "measure_support",
            m.support()
                .iter()
                .map(|(a, p)| (cfg.basis.format_automorphism("atom", a), *p))
                .collect::<Vec<_>>(),
        );
    }
    rec.param(
        "automorphisms",
        cfg.automorphisms
            .iter()
            .map(|(name, a)| cfg.basis.format_automorphism(name, a))
            .collect::<Vec<_>>(),
    );
    rec.param("letter_cap", cfg.caps.letters);
    rec.param("atom_cap", cfg.caps.atoms);
}

fn spectrum_record(
    cfg: &ExperimentConfig,
    seeds: &[u64],
    name: &str,
) -> Result<(ExperimentRecord, Vec<f64>)> {
    let m = cfg.measure();
    let tracks = seeds
        .par_iter()
        .map(|&s| {
            spectrum_track(
                &sample_path_capped(m, cfg.n, s, cfg.caps),
                &cfg.basepoint,
                &cfg.classes,
                cfg.caps,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cols = vec!["seed".to_string(), "step".to_string()];
    cols.extend(cfg.classes.iter().map(|c| cfg.basis.format_word(c.word())));
    cols.push("epsilon".into());
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut rec = ExperimentRecord::new(name, &cols);
    common_params(&mut rec, cfg, seeds);
    rec.param("classes", &cols[2..cols.len() - 1]);
    let mut final_gaps = Vec::new();
    for (tr, &seed) in tracks.iter().zip(seeds) {
        for (k, (row, eps)) in tr.rows.iter().zip(&tr.epsilons).enumerate() {
            let mut cells: Vec<Cell> = vec![seed.into(), k.into()];
            cells.extend(row.iter().map(|&v| Cell::Float(v)));
            cells.push((*eps).into());
            rec.push_row(cells);
        }
        final_gaps.push(tr.final_gap().unwrap_or(0.0));
    }
    rec.summarize("final_gap", &final_gaps);
    rec.summarize(
        "final_gap_max",
        final_gaps.iter().copied().fold(0.0, f64::max),
    );
    rec.caveat(FLOAT);
    let ratios = tracks
        .iter()
        .map(|t| {
            if cfg.classes.len() >= 2 {
                t.final_ratio(1, 0)
            } else {
                f64::NAN
            }
        })
        .collect();
    Ok((rec, ratios))
}

fn walk(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<Vec<Output>> {
    let (spec, _) = spectrum_record(cfg, seeds, "walk")?;
    let m = cfg.measure();
    let per_seed = seeds
        .par_iter()
        .map(|&s| {
            let path = sample_path_capped(m, cfg.n, s, cfg.caps);
            let cur = current_track(&path, &cfg.basepoint, cfg.caps)?;
            let labels = psi_track(&path, &cfg.basepoint, cfg.caps)?;
            Ok((cur, labels))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rec = ExperimentRecord::new(
        "walk",
        &["seed", "step", "epsilon", "current_distance", "psi"],
    );
    common_params(&mut rec, cfg, seeds);
    let eps_rows: Vec<&Vec<Cell>> = spec.rows.iter().collect();
    let mut i = 0;
    for ((cur, labels), &seed) in per_seed.iter().zip(seeds) {
        for (k, (d, l)) in cur.distances.iter().zip(labels).enumerate() {
            let eps = eps_rows[i].last().cloned().unwrap_or(Cell::Empty);
            i += 1;
            rec.push_row(vec![
                seed.into(),
                k.into(),
                eps,
                (*d).into(),
                Cell::Text(format_labels(l, &cfg.basis)),
            ]);
        }
    }
    rec.summarize("final_gap", spec.summary["final_gap"].clone());
    rec.summarize(
        "final_current_distance",
        per_seed
            .iter()
            .map(|(c, _)| c.distances.last().copied().flatten())
            .collect::<Vec<_>>(),
    );
    rec.caveat(FLOAT);
    rec.caveat(PROXY);
    rec.caveat("psi labels: all embedded-circle classes (the coarse fibre), no free-factor metric");
    Ok(vec![
        Output {
            stem: "spectrum",
            record: spec,
        },
        Output {
            stem: "walk",
            record: rec,
        },
    ])
}

fn ns_dynamics(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<Vec<Output>> {
    let (mut rec, ratios) = spectrum_record(cfg, seeds, "ns-dynamics")?;
    rec.summarize("final_ratio", &ratios);
    rec.summarize("oracle_ratio", GOLDEN_RATIO);
    rec.summarize(
        "oracle",
        "Perron eigenvalue of the Fibonacci transition matrix",
    );
    Ok(vec![Output {
        stem: "spectrum",
        record: rec,
    }])
}

fn drift(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<Vec<Output>> {
    let ens = drift_ensemble(cfg.measure(), cfg.n, seeds, &cfg.basepoint, cfg.caps)?;
    let mut rec = ExperimentRecord::new("drift", &["seed", "step", "dsym_over_n"]);
    common_params(&mut rec, cfg, seeds);
    for t in &ens.tracks {
        for (i, &v) in t.normalized.iter().enumerate() {
            rec.push_row(vec![t.seed.into(), (i + 1).into(), v.into()]);
        }
    }
    rec.summarize("limit_estimate_mean", ens.mean);
    rec.summarize("limit_estimate_stderr", ens.stderr);
    rec.summarize(
        "increment_estimates",
        ens.tracks
            .iter()
            .map(|t| t.increment_estimate)
            .collect::<Vec<_>>(),
    );
    rec.caveat(FLOAT);
    rec.caveat("limit estimate: mean of the last quartile of d_sym/k, biased at rate O(1/n)");
    Ok(vec![Output {
        stem: "drift",
        record: rec,
    }])
}

fn density(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<Vec<Output>> {
    let dcfg = DensityConfig {
        n: cfg.n,
        l_grid: cfg.l_grid.clone(),
        random_roses: cfg.random_roses,
        probe_seed: cfg.probe_seed,
        caps: cfg.caps,
    };
    let m = cfg.measure();
    let results = seeds
        .par_iter()
        .map(|&s| strip_density_experiment(m, s, &cfg.basepoint, &dcfg))
        .collect::<Result<Vec<_>>>()?;
    let mut rec = ExperimentRecord::new("strip-density", &["seed", "L", "density"]);
    common_params(&mut rec, cfg, seeds);
    rec.param("random_roses", cfg.random_roses);
    rec.param("probe_seed", cfg.probe_seed);
    for r in &results {
        for &(l, d) in &r.densities {
            rec.push_row(vec![r.seed.into(), l.into(), d.into()]);
        }
    }
    let mut minimal: Vec<f64> = results.iter().map(|r| r.minimal_l).collect();
    rec.summarize("minimal_l", &minimal);
    rec.summarize(
        "minimal_l_grid",
        results.iter().map(|r| r.minimal_l_grid).collect::<Vec<_>>(),
    );
    rec.summarize(
        "density_at_minimal",
        results
            .iter()
            .map(|r| r.density_at_minimal)
            .collect::<Vec<_>>(),
    );
    rec.summarize(
        "l_values",
        results
            .iter()
            .map(|r| r.l_values.clone())
            .collect::<Vec<_>>(),
    );
    rec.summarize(
        "probe_count",
        results.iter().map(|r| r.probe_count).collect::<Vec<_>>(),
    );
    minimal.sort_by(f64::total_cmp);
    rec.summarize("median_minimal_l", minimal[(minimal.len() - 1) / 2]);
    rec.caveat(FLOAT);
    rec.caveat(PROBE_BOUND);
    rec.caveat(PROXY);
    rec.caveat("probes: forward orbit points of the path, the radius-2 orbit of the basepoint under the measure's support, and seeded random roses");
    Ok(vec![Output {
        stem: "density",
        record: rec,
    }])
}

fn witness_text(basis: &Basis, a: &MarkedGraph, b: &MarkedGraph) -> Result<(String, String)> {
    let s = lipschitz(a, b)?;
    let cands = candidates(a)?;
    let shape = cands
        .candidates()
        .iter()
        .find(|c| c.class == s.witness)
        .map(|c| format!("{:?}", c.shape).to_lowercase())
        .unwrap_or_default();
    Ok((basis.format_word(s.witness.word()), shape))
}

fn lip(cfg: &ExperimentConfig) -> Result<Vec<Output>> {
    let (a, b, basis) = cfg.lip.as_ref().expect("validated: lip section");
    let mut rec = ExperimentRecord::new("lip", &["direction", "d", "witness", "shape"]);
    for (dir, s, t) in [("source->target", a, b), ("target->source", b, a)] {
        let (w, shape) = witness_text(basis, s, t)?;
        rec.push_row(vec![
            Cell::Text(dir.into()),
            distance(s, t)?.into(),
            Cell::Text(w),
            Cell::Text(shape),
        ]);
    }
    rec.summarize("d_sym", sym_distance(a, b)?);
    rec.caveat(FLOAT);
    Ok(vec![Output {
        stem: "lip",
        record: rec,
    }])
}

/// Probes: points of interest (the proxy automorphism's powers when
/// available) plus the default recipe.
fn probes_for(
    cfg: &ExperimentConfig,
    pair: &CurrentPair,
    extra: &[MarkedGraph],
    radius: i64,
) -> Result<ProbeSet<f64>> {
    let mut points: Vec<MarkedGraph> = extra.to_vec();
    let mut gens: Vec<Automorphism> = Vec::new();
    if let Some((_, a, _)) = &pair.source {
        for k in -radius..=radius {
            let g = if k >= 0 {
                a.pow(k as usize)
            } else {
                a.invert().pow(k.unsigned_abs() as usize)
            };
            points.push(cfg.basepoint.act(&g)?);
        }
        gens.push(a.clone());
    }
    if let Some(m) = &cfg.measure {
        gens.extend(m.atoms().cloned());
    }
    if gens.is_empty() {
        gens = Automorphism::nielsen_generators(cfg.basis.rank());
    }
    default_probes(
        &points,
        &gens,
        &cfg.basepoint,
        cfg.random_roses,
        cfg.probe_seed,
    )
}

fn pair_params(rec: &mut ExperimentRecord, basis: &Basis, pair: &CurrentPair) {
    rec.param("c_minus", pair.minus.to_pairs(basis));
    rec.param("c_plus", pair.plus.to_pairs(basis));
    if let Some((name, _, n)) = &pair.source {
        rec.param(
            "proxy",
            format!("{name}^(±{n}) applied to the base current, normalized against the basepoint"),
        );
    }
}

fn axis(cfg: &ExperimentConfig) -> Result<Vec<Output>> {
    let spec = cfg.axis.as_ref().expect("validated: axis section");
    let trees: Vec<MarkedGraph> = spec.trees.iter().map(|(_, t)| t.clone()).collect();
    let probes = probes_for(cfg, &spec.pair, &trees, 2)?;
    let mut rec = ExperimentRecord::new(
        "axis",
        &["tree_id", "l_lower", "threshold", "argmax_probe", "verdict"],
    );
    pair_params(&mut rec, &cfg.basis, &spec.pair);
    rec.param("probes", probes.description());
    let mut certs = Vec::new();
    for (id, t) in &spec.trees {
        let c = axis_membership(
            &spec.pair.minus,
            &spec.pair.plus,
            t,
            spec.threshold,
            &probes,
            id,
        )?;
        let verdict = if c.in_axis() {
            "in-axis-up-to-probes"
        } else {
            "excluded"
        };
        rec.push_row(vec![
            Cell::Text(id.clone()),
            c.l_lower.into(),
            c.threshold.into(),
            c.argmax_probe.into(),
            Cell::Text(verdict.into()),
        ]);
        certs.push(serde_json::json!({
            "tree_id": id,
            "l_lower": c.l_lower,
            "threshold": c.threshold,
            "argmax_probe": c.argmax_probe,
            "verdict": verdict,
        }));
    }
    rec.summarize("certificates", certs);
    rec.caveat(FLOAT);
    rec.caveat(PROBE_BOUND);
    Ok(vec![Output {
        stem: "axis",
        record: rec,
    }])
}

fn census_threshold(
    cfg: &ExperimentConfig,
    spec: &CensusSpec,
    probes: &ProbeSet<f64>,
) -> Result<(f64, Option<f64>)> {
    if let Some(t) = spec.threshold {
        return Ok((t, None));
    }
    let (_, a, _) = spec
        .pair
        .source
        .as_ref()
        .expect("validated: proxy pair without threshold");
    let mut max_l: f64 = 1.0;
    for k in -(spec.k_max as i64)..=spec.k_max as i64 {
        let g = if k >= 0 {
            a.pow(k as usize)
        } else {
            a.invert().pow(k.unsigned_abs() as usize)
        };
        let t = cfg.basepoint.act(&g)?;
        max_l = max_l.max(big_l_value(&spec.pair.minus, &spec.pair.plus, &t, probes)?.value);
    }
    Ok((spec.threshold_factor * max_l, Some(max_l)))
}

fn census(cfg: &ExperimentConfig) -> Result<Vec<Output>> {
    let spec = cfg.census.as_ref().expect("validated: census section");
    let probes = probes_for(cfg, &spec.pair, &[], spec.k_max as i64)?;
    let (threshold, observed) = census_threshold(cfg, spec, &probes)?;
    let mut rec = ExperimentRecord::new("census", &["k", "ball_size", "strip_count"]);
    pair_params(&mut rec, &cfg.basis, &spec.pair);
    rec.param("k_max", spec.k_max);
    rec.param("threshold", threshold);
    rec.param("generators", &spec.generator_names);
    rec.param("probes", probes.description());
    rec.summarize("max_observed_l", observed);
    let report = match strip_ball_census(
        &spec.pair.minus,
        &spec.pair.plus,
        threshold,
        &probes,
        &spec.generators,
        &cfg.basepoint,
        spec.k_max,
        spec.ball_budget,
    ) {
        Ok(r) => r,
        Err(t) => {
            return Err(Error::Resource(format!(
                "{} (partial counts: {:?})",
                t.message,
                t.partial
                    .rows
                    .iter()
                    .map(|r| (r.k, r.ball_size, r.strip_count))
                    .collect::<Vec<_>>()
            )))
        }
    };
    for r in &report.rows {
        rec.push_row(vec![r.k.into(), r.ball_size.into(), r.strip_count.into()]);
    }
    rec.summarize("lambda", report.lambda);
    rec.summarize("fitted_slope", report.fitted_slope);
    rec.summarize("fingerprint_merges", report.collisions);
    rec.summarize("monotone", report.is_monotone());
    rec.caveat(FLOAT);
    rec.caveat(PROBE_BOUND);
    rec.caveat("ball elements are identified by orbit-tree fingerprints: per-edge multiplicities of cyclic words of length <= 3 and generator images");
    Ok(vec![Output {
        stem: "census",
        record: rec,
    }])
}
