//! Candidate loops of a marked graph: embedded circles, figure-eights and
//! barbells. The maximal stretch of any conjugacy class between two points of
//! outer space is realized by one of these.

use std::collections::{BTreeSet, HashMap};

use super::graph::MetricGraph;
use super::marked::MarkedMetricGraph;
use crate::error::{Error, Result};
use crate::free_group::{ConjClass, Letter, Word};
use crate::scalar::Scalar;

/// Default cap on the number of candidate loops explored.
pub const DEFAULT_CANDIDATE_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CandidateShape {
    Circle,
    FigureEight,
    Barbell,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate<S> {
    pub class: ConjClass,
    /// Translation length in the source graph.
    pub length: S,
    pub shape: CandidateShape,
    /// The tight edge loop in the source graph.
    pub edge_loop: Word,
}

/// Candidate classes of one marked graph, deduplicated by canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSet<S> {
    candidates: Vec<Candidate<S>>,
}

impl<S: Scalar> CandidateSet<S> {
    pub fn candidates(&self) -> &[Candidate<S>] {
        &self.candidates
    }

    pub fn classes(&self) -> impl Iterator<Item = &ConjClass> {
        self.candidates.iter().map(|c| &c.class)
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn of_shape(&self, shape: CandidateShape) -> impl Iterator<Item = &Candidate<S>> {
        self.candidates.iter().filter(move |c| c.shape == shape)
    }
}

type Cycle = Vec<Letter>;

/// Embedded circles as closed letter sequences, one orientation each.
fn simple_cycles<S: Scalar>(g: &MetricGraph<S>, budget: usize) -> Result<Vec<Cycle>> {
    let mut found: HashMap<Vec<usize>, Cycle> = HashMap::new();
    let mut order: Vec<Vec<usize>> = Vec::new();
    for s in 0..g.vertex_count() {
        let mut path: Vec<Letter> = Vec::new();
        let mut on_path = vec![false; g.vertex_count()];
        on_path[s] = true;
        cycles_from(
            g,
            s,
            s,
            &mut path,
            &mut on_path,
            &mut found,
            &mut order,
            budget,
        )?;
    }
    Ok(order
        .into_iter()
        .map(|k| found.remove(&k).unwrap())
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn cycles_from<S: Scalar>(
    g: &MetricGraph<S>,
    start: usize,
    at: usize,
    path: &mut Vec<Letter>,
    on_path: &mut [bool],
    found: &mut HashMap<Vec<usize>, Cycle>,
    order: &mut Vec<Vec<usize>>,
    budget: usize,
) -> Result<()> {
    for l in g.outgoing(at) {
        if path.iter().any(|p| p.index() == l.index()) {
            continue;
        }
        let next = g.terminus(l);
        if next == start {
            path.push(l);
            let mut key: Vec<usize> = path.iter().map(|p| p.index()).collect();
            key.sort_unstable();
            if !found.contains_key(&key) {
                if found.len() >= budget {
                    return Err(Error::Resource(format!(
                        "more than {budget} embedded circles"
                    )));
                }
                found.insert(key.clone(), path.clone());
                order.push(key);
            }
            path.pop();
        } else if next > start && !on_path[next] {
            on_path[next] = true;
            path.push(l);
            cycles_from(g, start, next, path, on_path, found, order, budget)?;
            path.pop();
            on_path[next] = false;
        }
    }
    Ok(())
}

fn cycle_vertices<S: Scalar>(g: &MetricGraph<S>, c: &[Letter]) -> BTreeSet<usize> {
    c.iter().map(|&l| g.origin(l)).collect()
}

/// Rotation of a cycle so that it starts at vertex `v`.
fn rotate_to<S: Scalar>(g: &MetricGraph<S>, c: &[Letter], v: usize) -> Cycle {
    let k = c
        .iter()
        .position(|&l| g.origin(l) == v)
        .expect("vertex on cycle");
    c[k..].iter().chain(&c[..k]).copied().collect()
}

fn inverse_loop(c: &[Letter]) -> Cycle {
    c.iter().rev().map(|l| l.inverse()).collect()
}

/// Simple paths of length ≥ 1 from `from` to any vertex of `to`, with interior
/// vertices outside `avoid`.
fn bridges<S: Scalar>(
    g: &MetricGraph<S>,
    from: usize,
    to: &BTreeSet<usize>,
    avoid: &BTreeSet<usize>,
    budget: usize,
) -> Result<Vec<(Vec<Letter>, usize)>> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    let mut on_path = vec![false; g.vertex_count()];
    on_path[from] = true;
    bridge_dfs(
        g,
        from,
        to,
        avoid,
        &mut path,
        &mut on_path,
        &mut out,
        budget,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn bridge_dfs<S: Scalar>(
    g: &MetricGraph<S>,
    at: usize,
    to: &BTreeSet<usize>,
    avoid: &BTreeSet<usize>,
    path: &mut Vec<Letter>,
    on_path: &mut [bool],
    out: &mut Vec<(Vec<Letter>, usize)>,
    budget: usize,
) -> Result<()> {
    for l in g.outgoing(at) {
        if path.iter().any(|p| p.index() == l.index()) {
            continue;
        }
        let next = g.terminus(l);
        if to.contains(&next) {
            if out.len() >= budget {
                return Err(Error::Resource(format!("more than {budget} barbell bars")));
            }
            let mut p = path.clone();
            p.push(l);
            out.push((p, next));
        } else if !avoid.contains(&next) && !on_path[next] {
            on_path[next] = true;
            path.push(l);
            bridge_dfs(g, next, to, avoid, path, on_path, out, budget)?;
            path.pop();
            on_path[next] = false;
        }
    }
    Ok(())
}

/// All candidate loops of `t`, as classes of `F_N`.
pub fn candidates<S: Scalar>(t: &MarkedMetricGraph<S>) -> Result<CandidateSet<S>> {
    candidates_with_budget(t, DEFAULT_CANDIDATE_BUDGET)
}

pub fn candidates_with_budget<S: Scalar>(
    t: &MarkedMetricGraph<S>,
    budget: usize,
) -> Result<CandidateSet<S>> {
    let g = t.graph();
    let cycles = simple_cycles(g, budget)?;
    let verts: Vec<BTreeSet<usize>> = cycles.iter().map(|c| cycle_vertices(g, c)).collect();
    let mut loops: Vec<(Cycle, CandidateShape)> = cycles
        .iter()
        .map(|c| (c.clone(), CandidateShape::Circle))
        .collect();

    for i in 0..cycles.len() {
        for j in i + 1..cycles.len() {
            let edges_i: BTreeSet<usize> = cycles[i].iter().map(|l| l.index()).collect();
            if cycles[j].iter().any(|l| edges_i.contains(&l.index())) {
                continue;
            }
            let common: Vec<usize> = verts[i].intersection(&verts[j]).copied().collect();
            match common.len() {
                1 => {
                    let v = common[0];
                    let a = rotate_to(g, &cycles[i], v);
                    let b = rotate_to(g, &cycles[j], v);
                    for b in [b.clone(), inverse_loop(&b)] {
                        loops.push((
                            a.iter().chain(&b).copied().collect(),
                            CandidateShape::FigureEight,
                        ));
                    }
                }
                0 => {
                    let avoid: BTreeSet<usize> = verts[i].union(&verts[j]).copied().collect();
                    for &start in &verts[i] {
                        for (bar, end) in bridges(g, start, &verts[j], &avoid, budget)? {
                            let a = rotate_to(g, &cycles[i], start);
                            let b = rotate_to(g, &cycles[j], end);
                            let back = inverse_loop(&bar);
                            for b in [b.clone(), inverse_loop(&b)] {
                                let lp: Cycle = a
                                    .iter()
                                    .chain(&bar)
                                    .chain(&b)
                                    .chain(&back)
                                    .copied()
                                    .collect();
                                loops.push((lp, CandidateShape::Barbell));
                            }
                        }
                    }
                }
                _ => {}
            }
            if loops.len() > budget {
                return Err(Error::Resource(format!(
                    "more than {budget} candidate loops"
                )));
            }
        }
    }

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (lp, shape) in loops {
        let class = t.loop_class(&lp);
        if seen.insert(class.clone()) {
            out.push(Candidate {
                class,
                length: g.path_length(&lp),
                shape,
                edge_loop: Word::from(lp),
            });
        }
    }
    Ok(CandidateSet { candidates: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::{enumerate_conj_classes, DEFAULT_CLASS_BUDGET};
    use crate::outer_space::graph::Edge;

    fn w(v: &[i32]) -> Word {
        Word::reduce(v.iter().map(|&s| Letter::from_signed(s).unwrap()))
    }

    #[test]
    fn unit_rose_rank_two() {
        let r = MarkedMetricGraph::<i64>::unit_rose(2).unwrap();
        let c = candidates(&r).unwrap();
        let got: BTreeSet<_> = c.classes().cloned().collect();
        let want: BTreeSet<_> = [w(&[1]), w(&[2]), w(&[1, 2]), w(&[1, -2])]
            .iter()
            .map(ConjClass::of)
            .collect();
        assert_eq!(got, want);
    }

    /// Brute-force oracle: embedded circles are the classes realized by a
    /// tight loop visiting each edge once; figure-eights, each edge of two
    /// circles once; all such loops of a rose are the products of distinct
    /// petals, so the count for a rank-N rose is N + N(N-1).
    #[test]
    fn unit_rose_rank_three_matches_enumeration() {
        let r = MarkedMetricGraph::<i64>::unit_rose(3).unwrap();
        let c = candidates(&r).unwrap();
        let mut oracle = BTreeSet::new();
        for class in enumerate_conj_classes(3, 2, DEFAULT_CLASS_BUDGET).unwrap() {
            let ls = class.word().letters();
            let distinct: BTreeSet<usize> = ls.iter().map(|l| l.index()).collect();
            if distinct.len() == ls.len() {
                oracle.insert(class);
            }
        }
        let got: BTreeSet<_> = c.classes().cloned().collect();
        assert_eq!(got, oracle);
        assert_eq!(c.len(), 9);
    }

    #[test]
    fn candidates_have_positive_length() {
        let edges = vec![
            Edge {
                tail: 0,
                head: 1,
                length: 1i64,
            },
            Edge {
                tail: 0,
                head: 1,
                length: 2,
            },
            Edge {
                tail: 0,
                head: 1,
                length: 3,
            },
        ];
        let g = MetricGraph::new(2, edges).unwrap();
        let t = MarkedMetricGraph::new(g, 0, vec![w(&[1, -2]), w(&[1, -3])]).unwrap();
        let c = candidates(&t).unwrap();
        // Theta graph: three circles, no figure-eights or barbells.
        assert_eq!(c.len(), 3);
        for cand in c.candidates() {
            assert!(cand.length > 0);
            assert_eq!(t.translation_length(&cand.class), cand.length);
        }
    }

    #[test]
    fn barbell_graph_candidates() {
        let edges = vec![
            Edge {
                tail: 0,
                head: 0,
                length: 1i64,
            },
            Edge {
                tail: 1,
                head: 1,
                length: 1,
            },
            Edge {
                tail: 0,
                head: 1,
                length: 1,
            },
        ];
        let g = MetricGraph::new(2, edges).unwrap();
        let t = MarkedMetricGraph::new(g, 0, vec![w(&[1]), w(&[3, 2, -3])]).unwrap();
        let c = candidates(&t).unwrap();
        assert_eq!(c.of_shape(CandidateShape::Circle).count(), 2);
        assert_eq!(c.of_shape(CandidateShape::Barbell).count(), 2);
        let bar: BTreeSet<_> = c
            .of_shape(CandidateShape::Barbell)
            .map(|c| c.class.clone())
            .collect();
        let want: BTreeSet<_> = [w(&[1, 2]), w(&[1, -2])]
            .iter()
            .map(ConjClass::of)
            .collect();
        assert_eq!(bar, want);
        for cand in c.candidates() {
            assert_eq!(t.translation_length(&cand.class), cand.length);
        }
    }
}
