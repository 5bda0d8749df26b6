//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use outspace::axes::{
    axis_membership, big_l_value, default_probes, sandwich_check, sandwich_lower, sigma,
    strip_ball_census, strip_membership, ProbeSet,
};
use outspace::currents::{base_current, normalize_against, pair, RationalCurrent};
use outspace::free_group::{enumerate_conj_classes, Automorphism, ConjClass};
use outspace::outer_space::{candidates, distance, lipschitz, MarkedMetricGraph};
use outspace::walk::{
    drift_track, sample_path, spectrum_track, strip_density_experiment, DensityConfig, WalkCaps,
    WalkMeasure,
};
use outspace::{Current, MarkedGraph, Rational};
use rand::Rng;
use rayon::prelude::*;

const GOLDEN: f64 = 1.618_033_988_749_895;

type Criterion = (&'static str, u64, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn run(name: &str, budget: Duration, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        verdict(false, format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = out.pass && in_time;
    let timing = if in_time {
        format!("{:.2}s", elapsed.as_secs_f64())
    } else {
        format!(
            "{:.2}s exceeds {}s",
            elapsed.as_secs_f64(),
            budget.as_secs()
        )
    };
    println!(
        "{} {name}: {} [{timing}]",
        if pass { "PASS" } else { "FAIL" },
        out.detail
    );
    pass
}

fn info(line: String) {
    println!("     {line}");
}

fn t0() -> MarkedGraph {
    MarkedGraph::unit_rose(2).unwrap()
}

fn random_f64_tree<R: Rng>(r: &mut R) -> MarkedGraph {
    let t = to_f64(&random_tree_f2(r, 2));
    let l: Vec<f64> = (0..t.graph().edge_count())
        .map(|_| r.gen_range(0.5..3.0))
        .collect();
    t.with_lengths(&l).unwrap()
}

fn random_current<R: Rng>(r: &mut R) -> Current {
    let mut c = RationalCurrent::empty();
    for _ in 0..r.gen_range(1..=3) {
        c.add_class(&random_class(2, 5, r), r.gen_range(0.25..4.0))
            .unwrap();
    }
    c
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// `φ^{±n} η₀` normalized against `T0`: the Fibonacci proxy pair.
fn fibonacci_pair(n: usize) -> (Current, Current) {
    let phi = Automorphism::fibonacci();
    let eta = base_current::<f64>(2);
    let plus = normalize_against(&eta.act(&phi.pow(n)).unwrap(), &t0()).unwrap();
    let minus = normalize_against(&eta.act(&phi.invert().pow(n)).unwrap(), &t0()).unwrap();
    (minus, plus)
}

fn phi_power(k: i64) -> Automorphism {
    let phi = Automorphism::fibonacci();
    if k >= 0 {
        phi.pow(k as usize)
    } else {
        phi.invert().pow(k.unsigned_abs() as usize)
    }
}

fn translation_oracle() -> Verdict {
    let mut checked = 0;
    let mut mismatches = 0;
    for rank in [2, 3] {
        let mut r = rng(1000 + rank as u64);
        let rose = MarkedMetricGraph::<i64>::unit_rose(rank).unwrap();
        for _ in 0..1000 {
            let a = random_aut(rank, 3, &mut r);
            let c = random_class(rank, 8, &mut r);
            let got = rose.act(&a).unwrap().translation_length(&c);
            let want = ConjClass::of(&a.invert().apply(c.word())).len() as i64;
            checked += 1;
            mismatches += usize::from(got != want);
        }
    }
    verdict(
        mismatches == 0,
        format!("{checked} pairs in F_2 and F_3, {mismatches} mismatches"),
    )
}

fn white_exactness() -> Verdict {
    let classes = enumerate_conj_classes(2, 10, 10_000_000).unwrap();
    let mut r = rng(7);
    let mut pairs = 0;
    let mut failures = Vec::new();
    let mut rejected = 0;
    while pairs < 20 {
        let a = random_aut(2, 3, &mut r);
        let t = to_rational(
            &MarkedMetricGraph::rose(&lengths(2, 4, &mut r))
                .unwrap()
                .act(&a)
                .unwrap(),
        );
        // The exhaustive window must contain the source's candidates.
        if candidates(&t).unwrap().classes().any(|c| c.len() > 10) {
            rejected += 1;
            continue;
        }
        let b = random_aut(2, 3, &mut r);
        let t2 = to_rational(
            &MarkedMetricGraph::rose(&lengths(2, 4, &mut r))
                .unwrap()
                .act(&b)
                .unwrap(),
        );
        let lip = lipschitz(&t, &t2).unwrap().value();
        let best: Rational = classes
            .iter()
            .map(|c| t2.translation_length(c) / t.translation_length(c))
            .max()
            .unwrap();
        if best != lip {
            failures.push(format!("pair {pairs}: classes {best}, candidates {lip}"));
        }
        pairs += 1;
    }
    verdict(
        failures.is_empty(),
        format!(
            "{pairs} orbit pairs x {} classes of length <= 10, exact; {} mismatches ({rejected} sources resampled) {}",
            classes.len(),
            failures.len(),
            failures.join("; ")
        ),
    )
}

fn equivariance() -> Verdict {
    let mut r = rng(11);
    let mut worst = [0.0f64; 5];
    let mut verdict_flips = 0;
    let phi = Automorphism::fibonacci();
    for _ in 0..100 {
        let t = random_f64_tree(&mut r);
        let t2 = random_f64_tree(&mut r);
        let a = random_aut(2, 3, &mut r);
        let (at, at2) = (t.act(&a).unwrap(), t2.act(&a).unwrap());
        let (c1, c2) = (random_current(&mut r), random_current(&mut r));
        let (ac1, ac2) = (c1.act(&a).unwrap(), c2.act(&a).unwrap());

        worst[0] = worst[0].max((distance(&at, &at2).unwrap() - distance(&t, &t2).unwrap()).abs());
        worst[1] = worst[1].max(rel(pair(&at, &ac1), pair(&t, &c1)));
        worst[2] =
            worst[2].max((sigma(&at, &ac1, &ac2).unwrap() - sigma(&t, &c1, &c2).unwrap()).abs());

        let probes =
            ProbeSet::new((0..3).map(|_| random_f64_tree(&mut r)).collect(), "random").unwrap();
        let moved = probes.act(&a).unwrap();
        let l = big_l_value(&c1, &c2, &t, &probes).unwrap().value;
        let al = big_l_value(&ac1, &ac2, &at, &moved).unwrap().value;
        worst[3] = worst[3].max(rel(l, al));
        let threshold = l * r.gen_range(0.9..1.1f64).max(1.0 / l);
        let v = axis_membership(&c1, &c2, &t, threshold, &probes, "T")
            .unwrap()
            .verdict;
        let av = axis_membership(&ac1, &ac2, &at, threshold, &moved, "aT")
            .unwrap()
            .verdict;
        verdict_flips += usize::from(v != av && (l - threshold).abs() > 1e-9);

        let g = random_aut(2, 2, &mut r).compose(&phi).unwrap();
        let base = t0();
        let s = strip_membership(&g, &c1, &c2, 1.5, &probes, &base).unwrap();
        let ag = a.compose(&g).unwrap();
        let as_ = strip_membership(&ag, &ac1, &ac2, 1.5, &moved, &base).unwrap();
        let lg = big_l_value(&c1, &c2, &base.act(&g).unwrap(), &probes)
            .unwrap()
            .value;
        let lag = big_l_value(&ac1, &ac2, &base.act(&ag).unwrap(), &moved)
            .unwrap()
            .value;
        worst[4] = worst[4].max(rel(lg, lag));
        verdict_flips += usize::from(s != as_ && (lg - 1.5).abs() > 1e-9);
    }
    let max = worst.iter().copied().fold(0.0, f64::max);
    verdict(
        max <= 1e-12 && verdict_flips == 0,
        format!(
            "100 instances each; max discrepancy d {:.1e}, pairing {:.1e}, sigma {:.1e}, axis {:.1e}, strip {:.1e}; {verdict_flips} verdict flips",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn north_south() -> Verdict {
    let n = 20;
    let path = sample_path(&WalkMeasure::dirac("fib", Automorphism::fibonacci()), n, 0);
    let x_y = [ConjClass::of(&word(&[1])), ConjClass::of(&word(&[2]))];
    let spec = spectrum_track(&path, &t0(), &x_y, WalkCaps::default()).unwrap();
    let ratio = spec.final_ratio(1, 0);
    let drift = drift_track(&path, &t0(), WalkCaps::default()).unwrap();
    let target = 2.0 * GOLDEN.ln();
    let per_n = drift.normalized[n - 1];
    let ratio_ok = (ratio - GOLDEN).abs() < 1e-3;
    let drift_ok = (per_n - target).abs() < 1e-3;
    info(format!(
        "increment d_n - d_(n-1) = {:.9} (error {:.1e}); d_n/n approaches the limit only at rate O(1/n)",
        drift.increment_estimate,
        (drift.increment_estimate - target).abs()
    ));
    verdict(
        ratio_ok && drift_ok,
        format!(
            "n = {n}: spectrum ratio {ratio:.9} (error {:.1e}, tol 1e-3); d_sym/n {per_n:.6} vs {target:.6} (error {:.1e}, tol 1e-3)",
            (ratio - GOLDEN).abs(),
            (per_n - target).abs()
        ),
    )
}

fn sandwich() -> Verdict {
    let mut r = rng(13);
    let mut lower_fail = 0;
    for i in 0..1000 {
        let rank = if i % 2 == 0 { 2 } else { 3 };
        let base = MarkedGraph::unit_rose(rank).unwrap();
        let s = base.act(&random_aut(rank, 3, &mut r)).unwrap();
        let t = base.act(&random_aut(rank, 3, &mut r)).unwrap();
        let mut cur = || {
            let mut c = RationalCurrent::empty();
            for _ in 0..r.gen_range(1..=3) {
                c.add_class(&random_class(rank, 5, &mut r), r.gen_range(0.25..4.0))
                    .unwrap();
            }
            c
        };
        let (cm, cp) = (cur(), cur());
        lower_fail += usize::from(!sandwich_lower(&s, &t, &cm, &cp).unwrap().lower_holds);
    }

    let (cm, cp) = fibonacci_pair(20);
    let points: Vec<MarkedGraph> = (0..=10).map(|k| t0().act(&phi_power(k)).unwrap()).collect();
    let probes = default_probes(&points, &[Automorphism::fibonacci()], &t0(), 16, 0).unwrap();
    let max_l = points
        .iter()
        .map(|p| big_l_value(&cm, &cp, p, &probes).unwrap().value)
        .fold(0.0, f64::max);
    let l1 = 1.05 * max_l;
    let mut two_sided = 0;
    let mut two_fail = Vec::new();
    let mut tightest = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let rep = sandwich_check(&points[i], &points[j], &cm, &cp, l1, &probes).unwrap();
            two_sided += 1;
            tightest = tightest.min(rep.sigma_gap() + rep.gap_bound - rep.d_sym);
            if !rep.holds() {
                two_fail.push(format!("({i},{j})"));
            }
        }
    }
    verdict(
        lower_fail == 0 && two_fail.is_empty(),
        format!(
            "lower bound on 1000 orbit pairs: {lower_fail} violations; two-sided on {two_sided} axis pairs (k <= 10, L1 = {l1:.6}): {} violations, min upper slack {tightest:.3e}",
            two_fail.len()
        ),
    )
}

fn census() -> Verdict {
    let (cm, cp) = fibonacci_pair(20);
    let points: Vec<MarkedGraph> = (-6..=6).map(|k| t0().act(&phi_power(k)).unwrap()).collect();
    let probes = default_probes(&points, &[Automorphism::fibonacci()], &t0(), 16, 0).unwrap();
    let max_l = points
        .iter()
        .map(|p| big_l_value(&cm, &cp, p, &probes).unwrap().value)
        .fold(0.0, f64::max);
    let l1 = 1.05 * max_l;
    let gens = Automorphism::nielsen_generators(2);
    let rep = strip_ball_census(&cm, &cp, l1, &probes, &gens, &t0(), 6, 5_000_000).unwrap();
    let counts: Vec<String> = rep
        .rows
        .iter()
        .map(|r| format!("{}/{}", r.strip_count, r.ball_size))
        .collect();
    let bounded = rep
        .rows
        .iter()
        .filter(|r| r.k >= 1)
        .all(|r| r.strip_count as f64 <= rep.lambda * r.k as f64 + 1e-12);
    verdict(
        rep.lambda.is_finite() && rep.is_monotone() && bounded,
        format!(
            "L1 = {l1:.6}; strip/ball counts k=0..6: {}; lambda = {:.4}, fitted slope {:.4}, {} fingerprint merges",
            counts.join(" "),
            rep.lambda,
            rep.fitted_slope,
            rep.collisions
        ),
    )
}

fn monte_carlo() -> Verdict {
    let m = WalkMeasure::default_nonelementary();
    let classes = enumerate_conj_classes(2, 3, 1000).unwrap();
    let gaps: Vec<f64> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            spectrum_track(
                &sample_path(&m, 25, seed),
                &t0(),
                &classes,
                WalkCaps::default(),
            )
            .unwrap()
            .final_gap()
            .unwrap()
        })
        .collect();
    let converged = gaps.iter().filter(|&&g| g < 1e-2).count();
    let worst_gap = gaps.iter().copied().fold(0.0, f64::max);

    let cfg = DensityConfig::new(15);
    let results: Vec<_> = (0..20u64)
        .into_par_iter()
        .map(|seed| strip_density_experiment(&m, seed, &t0(), &cfg).unwrap())
        .collect();
    let positive = results
        .iter()
        .filter(|r| r.density_at_minimal > 0.0)
        .count();
    let mut minimal: Vec<f64> = results.iter().map(|r| r.minimal_l).collect();
    minimal.sort_by(f64::total_cmp);
    verdict(
        converged >= 90 && positive * 10 >= 9 * results.len(),
        format!(
            "final gap < 1e-2 on {converged}/100 seeds (worst {worst_gap:.2e}); positive density at minimal L on {positive}/20 seeds (median minimal L {:.4})",
            minimal[minimal.len() / 2]
        ),
    )
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("translation-length oracle", 10, translation_oracle),
        ("candidate sufficiency (exact)", 60, white_exactness),
        ("equivariance suite", 600, equivariance),
        ("north-south / fibonacci", 5, north_south),
        ("sandwich inequality", 600, sandwich),
        ("strip census", 600, census),
        ("monte carlo convergence", 1800, monte_carlo),
    ];
    let mut failed = 0;
    for (name, secs, f) in criteria {
        if !run(name, Duration::from_secs(secs), f) {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
