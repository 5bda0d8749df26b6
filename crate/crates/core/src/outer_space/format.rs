//! Text document format for marked graphs.
//!
//! ```toml
//! generators = ["x", "y"]
//! vertices = 2
//! basepoint = 0
//! marking = ["e0 e1^-1", "e0 e2^-1"]
//!
//! [[edges]]
//! tail = 0
//! head = 1
//! length = 1
//! ```
//!
//! Lengths may be integers, floats, or strings parsed by the scalar type
//! (`"3/2"` for rationals). Edge paths name edges `e0, e1, …`, with `^-1` for
//! reversed traversal.

use serde::{Deserialize, Serialize};

use super::graph::{Edge, MetricGraph};
use super::marked::MarkedMetricGraph;
use crate::error::{Error, Result};
use crate::free_group::{Basis, Letter, Word};
use crate::scalar::Scalar;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LengthRepr {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    tail: usize,
    head: usize,
    length: LengthRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<String>>,
    vertices: usize,
    basepoint: usize,
    marking: Vec<String>,
    edges: Vec<EdgeDoc>,
}

fn parse_length<S: Scalar>(edge: usize, l: &LengthRepr) -> Result<S> {
    let v = match l {
        LengthRepr::Int(i) => S::from_i64(*i),
        LengthRepr::Float(f) => S::from_f64(*f),
        LengthRepr::Text(t) => t.trim().parse::<S>().ok().or_else(|| {
            // `p/q` for scalars whose own syntax has no fractions.
            let (p, q) = t.split_once('/')?;
            let (p, q) = (p.trim().parse::<S>().ok()?, q.trim().parse::<S>().ok()?);
            (q != S::zero()).then(|| p / q)
        }),
    };
    v.ok_or_else(|| {
        Error::Input(format!(
            "edge {edge}: length not representable in the scalar type"
        ))
    })
}

fn format_length<S: Scalar>(l: S) -> LengthRepr {
    let text = l.to_string();
    if let Ok(i) = text.parse::<i64>() {
        LengthRepr::Int(i)
    } else if !S::is_exact() {
        text.parse::<f64>()
            .map(LengthRepr::Float)
            .unwrap_or(LengthRepr::Text(text))
    } else {
        LengthRepr::Text(text)
    }
}

pub fn parse_edge_path(text: &str, edge_count: usize) -> Result<Word> {
    let mut letters = Vec::new();
    for tok in text.split_whitespace() {
        let (body, inverse) = match tok.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (tok, false),
        };
        let idx: usize = body
            .strip_prefix('e')
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| Error::Input(format!("bad edge token {tok:?}")))?;
        if idx >= edge_count {
            return Err(Error::Input(format!("edge {idx} does not exist")));
        }
        letters.push(Letter::new(idx, inverse));
    }
    Ok(Word::reduce(letters))
}

pub fn format_edge_path(w: &Word) -> String {
    w.letters()
        .iter()
        .map(|l| {
            if l.is_inverse() {
                format!("e{}^-1", l.index())
            } else {
                format!("e{}", l.index())
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses a marked graph document; the basis defaults to the standard names.
pub fn parse_marked_graph<S: Scalar>(text: &str) -> Result<(Basis, MarkedMetricGraph<S>)> {
    let doc: GraphDoc = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
        message: e.message().to_string(),
    })?;
    let basis = match doc.generators {
        Some(names) => Basis::new(names)?,
        None => Basis::standard(doc.marking.len()),
    };
    if basis.rank() != doc.marking.len() {
        return Err(Error::Input(format!(
            "{} generators but {} marking paths",
            basis.rank(),
            doc.marking.len()
        )));
    }
    let edges = doc
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            Ok(Edge {
                tail: e.tail,
                head: e.head,
                length: parse_length(i, &e.length)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n_edges = edges.len();
    let graph = MetricGraph::new(doc.vertices, edges)?;
    let marking = doc
        .marking
        .iter()
        .map(|p| parse_edge_path(p, n_edges))
        .collect::<Result<Vec<_>>>()?;
    let t = MarkedMetricGraph::new(graph, doc.basepoint, marking)?;
    Ok((basis, t))
}

pub fn format_marked_graph<S: Scalar>(basis: &Basis, t: &MarkedMetricGraph<S>) -> String {
    let doc = GraphDoc {
        generators: Some(basis.names().to_vec()),
        vertices: t.graph().vertex_count(),
        basepoint: t.basepoint(),
        marking: t.marking().iter().map(format_edge_path).collect(),
        edges: t
            .graph()
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                tail: e.tail,
                head: e.head,
                length: format_length(e.length),
            })
            .collect(),
    };
    toml::to_string(&doc).expect("graph document serializes")
}
