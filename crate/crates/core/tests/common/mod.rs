#![allow(dead_code)]

use outspace::free_group::{Automorphism, ConjClass, Letter, Word};
use outspace::outer_space::{Edge, MarkedMetricGraph, MetricGraph};
use outspace::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn word(signed: &[i32]) -> Word {
    Word::reduce(signed.iter().map(|&s| Letter::from_signed(s).unwrap()))
}

pub fn random_word<R: Rng>(rank: usize, len: usize, rng: &mut R) -> Word {
    Word::reduce((0..len).map(|_| Letter::new(rng.gen_range(0..rank), rng.gen_bool(0.5))))
}

/// Random nontrivial class of cyclic length at most `max_len`.
pub fn random_class<R: Rng>(rank: usize, max_len: usize, rng: &mut R) -> ConjClass {
    loop {
        let len = rng.gen_range(1..=max_len);
        let c = ConjClass::of(&random_word(rank, len, rng));
        if !c.is_trivial() {
            return c;
        }
    }
}

pub fn random_aut<R: Rng>(rank: usize, max_radius: usize, rng: &mut R) -> Automorphism {
    let r = rng.gen_range(0..=max_radius);
    Automorphism::random_in_ball(rank, r, rng)
}

pub fn theta<S: Scalar>(lengths: [S; 3]) -> MarkedMetricGraph<S> {
    let edges = lengths
        .iter()
        .map(|&length| Edge {
            tail: 0,
            head: 1,
            length,
        })
        .collect();
    let g = MetricGraph::new(2, edges).unwrap();
    MarkedMetricGraph::new(g, 0, vec![word(&[1, -2]), word(&[1, -3])]).unwrap()
}

pub fn barbell<S: Scalar>(lengths: [S; 3]) -> MarkedMetricGraph<S> {
    let edges = vec![
        Edge {
            tail: 0,
            head: 0,
            length: lengths[0],
        },
        Edge {
            tail: 1,
            head: 1,
            length: lengths[1],
        },
        Edge {
            tail: 0,
            head: 1,
            length: lengths[2],
        },
    ];
    let g = MetricGraph::new(2, edges).unwrap();
    MarkedMetricGraph::new(g, 0, vec![word(&[1]), word(&[3, 2, -3])]).unwrap()
}

/// Random integer lengths in `1..=max`.
pub fn lengths<R: Rng>(n: usize, max: i64, rng: &mut R) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(1..=max)).collect()
}

/// Random rank-2 tree: a rose, theta or barbell with integer lengths, moved
/// by a random automorphism.
pub fn random_tree_f2<R: Rng>(rng: &mut R, radius: usize) -> MarkedMetricGraph<i64> {
    let l = lengths(3, 5, rng);
    let base = match rng.gen_range(0..3) {
        0 => MarkedMetricGraph::rose(&l[..2]).unwrap(),
        1 => theta([l[0], l[1], l[2]]),
        _ => barbell([l[0], l[1], l[2]]),
    };
    base.act(&random_aut(2, radius, rng)).unwrap()
}

pub fn to_f64(t: &MarkedMetricGraph<i64>) -> MarkedMetricGraph<f64> {
    t.map_scalar(|v| v as f64).unwrap()
}

pub fn to_rational(t: &MarkedMetricGraph<i64>) -> MarkedMetricGraph<outspace::Rational> {
    t.map_scalar(outspace::Rational::from_integer).unwrap()
}
