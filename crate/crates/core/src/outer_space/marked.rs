use super::fold::marking_labels;
use super::graph::{Edge, MetricGraph};
use crate::error::{Error, Result};
use crate::free_group::{push_reduced, substitute, Automorphism, ConjClass, Letter, Word};
use crate::scalar::{FieldScalar, Scalar};

/// A point of unprojectivized outer space: a metric graph with a marking
/// `x_i ↦` based edge loop.
///
/// Besides the marking, each edge carries an `F_N`-label such that reading
/// the labels along any based loop gives the element it represents. The
/// labels are the certificate that the marking is a homotopy equivalence and
/// are how graph loops (candidates) are expressed back in `F_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkedMetricGraph<S> {
    graph: MetricGraph<S>,
    basepoint: usize,
    marking: Vec<Word>,
    labels: Vec<Word>,
    volume: S,
}

impl<S: Scalar> MarkedMetricGraph<S> {
    /// Validates and normalizes a marked graph: marking paths are tightened,
    /// valence-2 vertices are smoothed away, and the marking is certified by
    /// folding.
    pub fn new(graph: MetricGraph<S>, basepoint: usize, marking: Vec<Word>) -> Result<Self> {
        let rank = marking.len();
        if rank < 2 {
            return Err(Error::Input(format!("rank must be at least 2, got {rank}")));
        }
        if graph.betti() != rank as isize {
            return Err(Error::Input(format!(
                "graph has Betti number {} but the marking has rank {rank}",
                graph.betti()
            )));
        }
        if basepoint >= graph.vertex_count() {
            return Err(Error::Input(format!(
                "basepoint {basepoint} is not a vertex"
            )));
        }
        for (i, path) in marking.iter().enumerate() {
            match graph.path_endpoints(path)? {
                Some((a, b)) if a == basepoint && b == basepoint => {}
                Some(_) => {
                    return Err(Error::Input(format!(
                        "marking of generator {i} is not a loop at the basepoint"
                    )))
                }
                None => return Err(Error::Input(format!("marking of generator {i} is empty"))),
            }
        }
        for v in 0..graph.vertex_count() {
            if graph.valence(v) == 1 {
                return Err(Error::Input(format!("vertex {v} has valence 1")));
            }
        }
        let (graph, basepoint, marking) = smooth_valence_two(graph, basepoint, marking)?;
        let labels = marking_labels(&graph, basepoint, &marking)?;
        let volume = graph.total_length();
        Ok(MarkedMetricGraph {
            graph,
            basepoint,
            marking,
            labels,
            volume,
        })
    }

    /// Rose with petal `i` of length `lengths[i]`, marked `x_i ↦ petal i`.
    pub fn rose(lengths: &[S]) -> Result<Self> {
        if lengths.len() < 2 {
            return Err(Error::Input(format!(
                "rose needs at least 2 petals, got {}",
                lengths.len()
            )));
        }
        for (i, &l) in lengths.iter().enumerate() {
            if !(l > S::zero()) {
                return Err(Error::Input(format!(
                    "petal {i} has nonpositive length {l}"
                )));
            }
        }
        let edges = lengths
            .iter()
            .map(|&length| Edge {
                tail: 0,
                head: 0,
                length,
            })
            .collect();
        let graph = MetricGraph::new(1, edges)?;
        let gens: Vec<Word> = (0..lengths.len()).map(Word::generator).collect();
        Ok(MarkedMetricGraph {
            volume: graph.total_length(),
            graph,
            basepoint: 0,
            marking: gens.clone(),
            labels: gens,
        })
    }

    pub fn unit_rose(rank: usize) -> Result<Self> {
        Self::rose(&vec![S::one(); rank])
    }

    pub fn rank(&self) -> usize {
        self.marking.len()
    }

    pub fn graph(&self) -> &MetricGraph<S> {
        &self.graph
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn marking(&self) -> &[Word] {
        &self.marking
    }

    /// `F_N`-label of each edge.
    pub fn edge_labels(&self) -> &[Word] {
        &self.labels
    }

    pub fn volume(&self) -> S {
        self.volume
    }

    pub fn is_rose(&self) -> bool {
        self.graph.vertex_count() == 1
    }

    /// Marking letter count (size of the stored marking paths).
    pub fn marking_size(&self) -> usize {
        self.marking.iter().map(Word::len).sum()
    }

    /// The tightened edge loop representing `w`.
    pub fn edge_loop(&self, w: &[Letter], cap: Option<usize>) -> Result<Word> {
        substitute(&self.marking, w, cap)
    }

    /// `‖w‖_T`: metric length of the cyclically tightened loop of `w`.
    pub fn translation_length_of(&self, w: &[Letter]) -> S {
        self.translation_length_capped(w, None)
            .expect("uncapped translation length")
    }

    pub fn translation_length(&self, c: &ConjClass) -> S {
        self.translation_length_of(c.word().letters())
    }

    pub fn translation_length_capped(&self, w: &[Letter], cap: Option<usize>) -> Result<S> {
        let lp = self.edge_loop(w, cap)?;
        Ok(self.graph.path_length(lp.cyclic_core()))
    }

    /// Conjugacy class in `F_N` of a closed edge path.
    pub fn loop_class(&self, edge_loop: &[Letter]) -> ConjClass {
        let mut buf = Vec::with_capacity(edge_loop.len());
        for &l in edge_loop {
            push_reduced(&mut buf, l);
        }
        let w = substitute(&self.labels, &buf, None).expect("edge letters within graph");
        ConjClass::of(&w)
    }

    /// `Φ·T`: same graph, marking precomposed with `a⁻¹`, so that
    /// `‖g‖_{a·T} = ‖a⁻¹(g)‖_T`.
    pub fn act(&self, a: &Automorphism) -> Result<Self> {
        self.act_capped(a, None)
    }

    pub fn act_capped(&self, a: &Automorphism, cap: Option<usize>) -> Result<Self> {
        if a.rank() != self.rank() {
            return Err(Error::Input(format!(
                "automorphism of rank {} acting on a graph of rank {}",
                a.rank(),
                self.rank()
            )));
        }
        let marking = a
            .inverse_images()
            .iter()
            .map(|w| substitute(&self.marking, w.letters(), cap))
            .collect::<Result<Vec<_>>>()?;
        let labels = self
            .labels
            .iter()
            .map(|l| a.apply_capped(l.letters(), cap))
            .collect::<Result<Vec<_>>>()?;
        Ok(MarkedMetricGraph {
            graph: self.graph.clone(),
            basepoint: self.basepoint,
            marking,
            labels,
            volume: self.volume,
        })
    }

    /// Same marked graph with edge lengths rescaled by `factor > 0`.
    pub fn scaled(&self, factor: S) -> Result<Self> {
        if !(factor > S::zero()) {
            return Err(Error::Input(format!(
                "scale factor {factor} is not positive"
            )));
        }
        let graph = self.graph.map_lengths(|l| l * factor);
        Ok(MarkedMetricGraph {
            volume: graph.total_length(),
            graph,
            basepoint: self.basepoint,
            marking: self.marking.clone(),
            labels: self.labels.clone(),
        })
    }

    /// Replaces edge lengths, keeping the marking.
    pub fn with_lengths(&self, lengths: &[S]) -> Result<Self> {
        if lengths.len() != self.graph.edge_count() {
            return Err(Error::Input(format!(
                "{} lengths for {} edges",
                lengths.len(),
                self.graph.edge_count()
            )));
        }
        let edges = self
            .graph
            .edges()
            .iter()
            .zip(lengths)
            .map(|(e, &length)| Edge {
                tail: e.tail,
                head: e.head,
                length,
            })
            .collect();
        let graph = MetricGraph::new(self.graph.vertex_count(), edges)?;
        Ok(MarkedMetricGraph {
            volume: graph.total_length(),
            graph,
            basepoint: self.basepoint,
            marking: self.marking.clone(),
            labels: self.labels.clone(),
        })
    }

    /// Converts edge lengths to another scalar type.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(S) -> T) -> Result<MarkedMetricGraph<T>> {
        let graph = self.graph.map_lengths(f);
        let graph = MetricGraph::new(graph.vertex_count(), graph.edges().to_vec())?;
        Ok(MarkedMetricGraph {
            volume: graph.total_length(),
            graph,
            basepoint: self.basepoint,
            marking: self.marking.clone(),
            labels: self.labels.clone(),
        })
    }
}

impl<S: FieldScalar> MarkedMetricGraph<S> {
    /// Covolume-1 representative of the projective class.
    pub fn normalized(&self) -> Self {
        self.scaled(S::one() / self.volume)
            .expect("volume of a valid graph is positive")
    }
}

/// Removes valence-2 vertices by merging their two edges. A valence-2
/// basepoint is first moved across one of its edges, which conjugates the
/// whole marking.
fn smooth_valence_two<S: Scalar>(
    mut graph: MetricGraph<S>,
    mut basepoint: usize,
    mut marking: Vec<Word>,
) -> Result<(MetricGraph<S>, usize, Vec<Word>)> {
    loop {
        let Some(v) = (0..graph.vertex_count()).find(|&v| graph.valence(v) == 2) else {
            return Ok((graph, basepoint, marking));
        };
        let out = graph.outgoing(v);
        if out.len() != 2 || out[0].index() == out[1].index() {
            return Err(Error::Input(format!(
                "vertex {v} lies on an isolated circle"
            )));
        }
        if v == basepoint {
            let e = out[0];
            basepoint = graph.terminus(e);
            let ew = Word::reduce([e]);
            marking = marking
                .iter()
                .map(|m| m.conjugate_by(&ew.inverse()))
                .collect();
            continue;
        }
        // Path a·b through v, with a entering v and b leaving it.
        let a = out[0].inverse();
        let b = out[1];
        let new_edge = Edge {
            tail: graph.origin(a),
            head: graph.terminus(b),
            length: graph.edge(a.index()).length + graph.edge(b.index()).length,
        };
        let (ia, ib) = (a.index(), b.index());
        let mut edges = Vec::with_capacity(graph.edge_count() - 1);
        let mut renumber = vec![usize::MAX; graph.edge_count()];
        for (i, e) in graph.edges().iter().enumerate() {
            if i != ia && i != ib {
                renumber[i] = edges.len();
                edges.push(e.clone());
            }
        }
        let merged = edges.len();
        edges.push(new_edge);
        let mut vmap = vec![0; graph.vertex_count()];
        let mut next = 0;
        for (u, slot) in vmap.iter_mut().enumerate() {
            if u != v {
                *slot = next;
                next += 1;
            }
        }
        for e in edges.iter_mut() {
            e.tail = vmap[e.tail];
            e.head = vmap[e.head];
        }
        let new_marking = marking
            .iter()
            .map(|m| {
                let mut out = Vec::with_capacity(m.len());
                let ls = m.letters();
                let mut i = 0;
                while i < ls.len() {
                    let l = ls[i];
                    if l == a {
                        if ls.get(i + 1) != Some(&b) {
                            return Err(Error::Internal(
                                "marking path stops at a valence-2 vertex".into(),
                            ));
                        }
                        out.push(Letter::new(merged, false));
                        i += 2;
                    } else if l == b.inverse() {
                        if ls.get(i + 1) != Some(&a.inverse()) {
                            return Err(Error::Internal(
                                "marking path stops at a valence-2 vertex".into(),
                            ));
                        }
                        out.push(Letter::new(merged, true));
                        i += 2;
                    } else if l.index() == ia || l.index() == ib {
                        return Err(Error::Internal(
                            "marking path stops at a valence-2 vertex".into(),
                        ));
                    } else {
                        out.push(Letter::new(renumber[l.index()], l.is_inverse()));
                        i += 1;
                    }
                }
                Ok(Word::reduce(out))
            })
            .collect::<Result<Vec<_>>>()?;
        basepoint = vmap[basepoint];
        graph = graph.with_edges(edges, graph.vertex_count() - 1);
        marking = new_marking;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i32]) -> Word {
        Word::reduce(v.iter().map(|&s| Letter::from_signed(s).unwrap()))
    }

    #[test]
    fn rose_examples() {
        let r = MarkedMetricGraph::<i64>::unit_rose(2).unwrap();
        assert_eq!(r.volume(), 2);
        let r12 = MarkedMetricGraph::rose(&[1i64, 2]).unwrap();
        assert_eq!(r12.translation_length_of(w(&[1, 2]).letters()), 3);
        assert!(MarkedMetricGraph::rose(&[0i64, 1]).is_err());
    }

    #[test]
    fn fibonacci_action_lengths() {
        let r = MarkedMetricGraph::<i64>::unit_rose(2).unwrap();
        let phi = Automorphism::fibonacci();
        let t = r.act(&phi).unwrap();
        assert_eq!(t.translation_length(&ConjClass::of(&w(&[2]))), 2);
        assert_eq!(t.translation_length(&ConjClass::of(&w(&[1]))), 1);
        assert_eq!(t.translation_length(&ConjClass::of(&w(&[1, -2]))), 3);
        assert_eq!(r.act(&Automorphism::identity(2)).unwrap(), r);
    }

    #[test]
    fn conjugates_have_equal_length() {
        let r = MarkedMetricGraph::<i64>::rose(&[2, 3]).unwrap();
        assert_eq!(r.translation_length_of(w(&[1, 2, -1]).letters()), 3);
    }

    fn theta(lengths: [i64; 3]) -> MarkedMetricGraph<i64> {
        let edges = lengths
            .iter()
            .map(|&length| Edge {
                tail: 0,
                head: 1,
                length,
            })
            .collect();
        let g = MetricGraph::new(2, edges).unwrap();
        // x = e0 e1⁻¹, y = e0 e2⁻¹
        MarkedMetricGraph::new(g, 0, vec![w(&[1, -2]), w(&[1, -3])]).unwrap()
    }

    #[test]
    fn theta_graph_marking_certified() {
        let t = theta([1, 2, 3]);
        assert_eq!(t.translation_length_of(w(&[1]).letters()), 3);
        assert_eq!(t.translation_length_of(w(&[2]).letters()), 4);
        assert_eq!(t.translation_length_of(w(&[-1, 2]).letters()), 5);
        // Labels invert the marking.
        for (i, m) in t.marking().iter().enumerate() {
            assert_eq!(
                substitute(t.edge_labels(), m.letters(), None).unwrap(),
                Word::generator(i)
            );
        }
    }

    #[test]
    fn non_equivalence_rejected() {
        let edges = vec![
            Edge {
                tail: 0,
                head: 0,
                length: 1i64,
            },
            Edge {
                tail: 0,
                head: 0,
                length: 1i64,
            },
        ];
        let g = MetricGraph::new(1, edges).unwrap();
        // ⟨x², y⟩ is a proper subgroup.
        assert!(MarkedMetricGraph::new(g.clone(), 0, vec![w(&[1, 1]), w(&[2])]).is_err());
        // x ↦ e0, y ↦ e0: not injective.
        assert!(MarkedMetricGraph::new(g.clone(), 0, vec![w(&[1]), w(&[1])]).is_err());
        let ok = MarkedMetricGraph::new(g, 0, vec![w(&[1, 2]), w(&[2])]).unwrap();
        assert_eq!(
            ok.loop_class(&[Letter::new(0, false)]),
            ConjClass::of(&w(&[1, -2]))
        );
    }

    #[test]
    fn valence_two_vertices_smoothed() {
        // Rose with petal 0 subdivided by vertex 1.
        let edges = vec![
            Edge {
                tail: 0,
                head: 1,
                length: 1i64,
            },
            Edge {
                tail: 1,
                head: 0,
                length: 2i64,
            },
            Edge {
                tail: 0,
                head: 0,
                length: 5i64,
            },
        ];
        let g = MetricGraph::new(2, edges).unwrap();
        let t = MarkedMetricGraph::new(g, 0, vec![w(&[1, 2]), w(&[3])]).unwrap();
        assert_eq!(t.graph().vertex_count(), 1);
        assert_eq!(t.graph().edge_count(), 2);
        assert_eq!(t.translation_length_of(w(&[1]).letters()), 3);
        assert_eq!(t.translation_length_of(w(&[1, 2]).letters()), 8);

        // Same, but the basepoint is the subdivision vertex.
        let edges = vec![
            Edge {
                tail: 0,
                head: 1,
                length: 1i64,
            },
            Edge {
                tail: 1,
                head: 0,
                length: 2i64,
            },
            Edge {
                tail: 1,
                head: 1,
                length: 5i64,
            },
        ];
        let g = MetricGraph::new(2, edges).unwrap();
        let t = MarkedMetricGraph::new(g, 0, vec![w(&[1, 2]), w(&[1, 3, -1])]).unwrap();
        assert_eq!(t.graph().vertex_count(), 1);
        assert_eq!(t.translation_length_of(w(&[1]).letters()), 3);
        assert_eq!(t.translation_length_of(w(&[2]).letters()), 5);
        assert_eq!(t.volume(), 8);
    }
}
