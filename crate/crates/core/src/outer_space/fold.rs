//! Certifies a marking by Stallings folding.
//!
//! The wedge of the `N` marking loops is folded onto the target graph while
//! every edge carries an `F_N`-label, maintained so that each based loop reads
//! the element it represents. If the folded graph is isomorphic to the
//! target, the marking is a homotopy equivalence and the edge labels give the
//! inverse map from edge paths back to `F_N`.

use std::collections::HashMap;

use super::graph::MetricGraph;
use crate::error::{Error, Result};
use crate::free_group::{substitute, Letter, Word};
use crate::scalar::Scalar;

struct FoldEdge {
    from: usize,
    to: usize,
    letter: Letter,
    label: Word,
}

/// Per-edge `F_N` labels inverting the marking `x_i ↦ marking[i]`.
pub(crate) fn marking_labels<S: Scalar>(
    graph: &MetricGraph<S>,
    basepoint: usize,
    marking: &[Word],
) -> Result<Vec<Word>> {
    let mut image = vec![basepoint];
    let mut edges = Vec::new();
    for (i, path) in marking.iter().enumerate() {
        let letters = path.letters();
        if letters.is_empty() {
            return Err(Error::Input(format!(
                "marking of generator {i} is the trivial loop"
            )));
        }
        let mut prev = 0;
        for (j, &l) in letters.iter().enumerate() {
            let next = if j + 1 == letters.len() {
                0
            } else {
                image.push(graph.terminus(l));
                image.len() - 1
            };
            let label = if j == 0 {
                Word::generator(i)
            } else {
                Word::identity()
            };
            edges.push(FoldEdge {
                from: prev,
                to: next,
                letter: l,
                label,
            });
            prev = next;
        }
    }

    while let Some((a, b)) = find_fold(&edges) {
        fold(&mut edges, a, b)?;
    }

    let live: Vec<usize> = {
        let mut v: Vec<usize> = edges.iter().flat_map(|e| [e.from, e.to]).collect();
        v.push(0);
        v.sort_unstable();
        v.dedup();
        v
    };
    if live.len() != graph.vertex_count() || edges.len() != graph.edge_count() {
        return Err(Error::Input(format!(
            "marking is not a homotopy equivalence: folded to {} vertices and {} edges, graph has {} and {}",
            live.len(),
            edges.len(),
            graph.vertex_count(),
            graph.edge_count()
        )));
    }
    let mut seen_vertex = vec![false; graph.vertex_count()];
    for &v in &live {
        let gv = image[v];
        if seen_vertex[gv] {
            return Err(Error::Input("marking does not fold onto the graph".into()));
        }
        seen_vertex[gv] = true;
    }
    let mut labels: Vec<Option<Word>> = vec![None; graph.edge_count()];
    for e in &edges {
        let k = e.letter.index();
        if labels[k].is_some() {
            return Err(Error::Input("marking does not fold onto the graph".into()));
        }
        labels[k] = Some(if e.letter.is_inverse() {
            e.label.inverse()
        } else {
            e.label.clone()
        });
    }
    let labels: Vec<Word> = labels
        .into_iter()
        .map(|l| l.expect("every edge labelled"))
        .collect();

    for (i, path) in marking.iter().enumerate() {
        let back = substitute(&labels, path.letters(), None)?;
        if back != Word::generator(i) {
            return Err(Error::Internal(format!(
                "folded labels do not invert the marking of generator {i}"
            )));
        }
    }
    Ok(labels)
}

/// Two half-edges leaving the same vertex with the same letter. Half-edge
/// `2k` is edge `k` forwards, `2k + 1` backwards.
fn find_fold(edges: &[FoldEdge]) -> Option<(usize, usize)> {
    let mut seen: HashMap<(usize, Letter), usize> = HashMap::new();
    for (k, e) in edges.iter().enumerate() {
        for (h, key) in [
            (2 * k, (e.from, e.letter)),
            (2 * k + 1, (e.to, e.letter.inverse())),
        ] {
            if let Some(&other) = seen.get(&key) {
                return Some((other, h));
            }
            seen.insert(key, h);
        }
    }
    None
}

fn half(edges: &[FoldEdge], h: usize) -> (usize, Word) {
    let e = &edges[h / 2];
    if h.is_multiple_of(2) {
        (e.to, e.label.clone())
    } else {
        (e.from, e.label.inverse())
    }
}

/// Changes the potential at `u` by `g`: based loops keep their labels.
fn repotential(edges: &mut [FoldEdge], u: usize, g: &Word) {
    let ginv = g.inverse();
    for e in edges.iter_mut() {
        if e.from == u {
            e.label = ginv.mul(&e.label);
        }
        if e.to == u {
            e.label = e.label.mul(g);
        }
    }
}

fn fold(edges: &mut Vec<FoldEdge>, h1: usize, h2: usize) -> Result<()> {
    let (u1, a1) = half(edges, h1);
    let (u2, a2) = half(edges, h2);
    let drop = h2 / 2;
    if u1 == u2 {
        if a1 != a2 {
            return Err(Error::Input(
                "marking is not injective on the fundamental group".into(),
            ));
        }
        edges.swap_remove(drop);
        return Ok(());
    }
    let (keep_v, gone_v, g) = if u2 != 0 {
        (u1, u2, a2.inverse().mul(&a1))
    } else {
        (u2, u1, a1.inverse().mul(&a2))
    };
    repotential(edges, gone_v, &g);
    for e in edges.iter_mut() {
        if e.from == gone_v {
            e.from = keep_v;
        }
        if e.to == gone_v {
            e.to = keep_v;
        }
    }
    edges.swap_remove(drop);
    Ok(())
}
