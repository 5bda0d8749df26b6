//! Points of outer space as marked metric graphs, candidate loops, and the
//! Lipschitz metric.

mod candidates;
mod fold;
mod format;
mod graph;
mod marked;
mod metric;

pub use candidates::{
    candidates, candidates_with_budget, Candidate, CandidateSet, CandidateShape,
    DEFAULT_CANDIDATE_BUDGET,
};
pub use format::{format_edge_path, format_marked_graph, parse_edge_path, parse_marked_graph};
pub use graph::{Edge, MetricGraph};
pub use marked::MarkedMetricGraph;
pub use metric::{
    distance, length_spectrum, length_spectrum_capped, lipschitz, lipschitz_over, normalized_log,
    projective_length_spectrum, projectivize, sym_distance, Stretch,
};
