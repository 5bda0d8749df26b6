use crate::error::{Error, Result};
use crate::free_group::{Letter, Word};
use crate::scalar::Scalar;

/// A geometric edge `tail → head`. Traversing it backwards is the inverse
/// letter of the edge alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge<S> {
    pub tail: usize,
    pub head: usize,
    pub length: S,
}

/// Finite connected metric graph. Edge paths are [`Word`]s over the edge
/// alphabet: letter `e` runs along edge `e`, `e⁻¹` against it.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricGraph<S> {
    vertex_count: usize,
    edges: Vec<Edge<S>>,
}

impl<S: Scalar> MetricGraph<S> {
    pub fn new(vertex_count: usize, edges: Vec<Edge<S>>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Input("graph has no vertices".into()));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= vertex_count || e.head >= vertex_count {
                return Err(Error::Input(format!(
                    "edge {i} references a vertex outside 0..{vertex_count}"
                )));
            }
            if !(e.length > S::zero()) {
                return Err(Error::Input(format!(
                    "edge {i} has nonpositive length {}",
                    e.length
                )));
            }
        }
        let g = MetricGraph {
            vertex_count,
            edges,
        };
        if !g.is_connected() {
            return Err(Error::Input("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge<S> {
        &self.edges[i]
    }

    /// First Betti number `E − V + 1`.
    pub fn betti(&self) -> isize {
        self.edges.len() as isize - self.vertex_count as isize + 1
    }

    pub fn origin(&self, l: Letter) -> usize {
        let e = &self.edges[l.index()];
        if l.is_inverse() {
            e.head
        } else {
            e.tail
        }
    }

    pub fn terminus(&self, l: Letter) -> usize {
        let e = &self.edges[l.index()];
        if l.is_inverse() {
            e.tail
        } else {
            e.head
        }
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.tail == v) + usize::from(e.head == v))
            .sum()
    }

    /// Outgoing oriented letters at `v` (a loop contributes both orientations).
    pub fn outgoing(&self, v: usize) -> Vec<Letter> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail == v {
                out.push(Letter::new(i, false));
            }
            if e.head == v {
                out.push(Letter::new(i, true));
            }
        }
        out
    }

    pub fn total_length(&self) -> S {
        self.edges.iter().fold(S::zero(), |acc, e| acc + e.length)
    }

    /// Metric length of a letter sequence.
    pub fn path_length(&self, letters: &[Letter]) -> S {
        letters
            .iter()
            .fold(S::zero(), |acc, l| acc + self.edges[l.index()].length)
    }

    /// Checks that consecutive letters are adjacent; returns the endpoints.
    pub fn path_endpoints(&self, w: &Word) -> Result<Option<(usize, usize)>> {
        let letters = w.letters();
        for (i, &l) in letters.iter().enumerate() {
            if l.index() >= self.edges.len() {
                return Err(Error::Input(format!(
                    "path uses unknown edge {}",
                    l.index()
                )));
            }
            if i > 0 && self.terminus(letters[i - 1]) != self.origin(l) {
                return Err(Error::Input(format!("path is not connected at letter {i}")));
            }
        }
        Ok(match (letters.first(), letters.last()) {
            (Some(&a), Some(&b)) => Some((self.origin(a), self.terminus(b))),
            _ => None,
        })
    }

    pub(crate) fn with_edges(&self, edges: Vec<Edge<S>>, vertex_count: usize) -> Self {
        MetricGraph {
            vertex_count,
            edges,
        }
    }

    pub(crate) fn map_lengths<T: Scalar>(&self, f: impl Fn(S) -> T) -> MetricGraph<T> {
        MetricGraph {
            vertex_count: self.vertex_count,
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    tail: e.tail,
                    head: e.head,
                    length: f(e.length),
                })
                .collect(),
        }
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for (a, b) in [(e.tail, e.head), (e.head, e.tail)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}
