//! Computational toolkit for the geometry of `Out(F_N)`.
//!
//! * [`free_group`]: reduced words, conjugacy classes, automorphisms.
//! * [`outer_space`]: marked metric graphs, candidates, the Lipschitz metric.
//! * [`currents`]: rational geodesic currents and the length pairing.
//! * [`axes`]: axes of current pairs, the height function, strips.
//! * [`walk`]: seeded random walks and the convergence/strip experiments.
//! * [`ffc`]: projection to cyclic free-factor labels.
//!
//! Geometry is generic over the length scalar ([`Scalar`]); the aliases below
//! fix the common choices.

// `!(x > 0)` deliberately rejects NaN as well as nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axes;
pub mod currents;
pub mod error;
pub mod ffc;
pub mod free_group;
pub mod outer_space;
pub mod scalar;
pub mod walk;

pub use error::{Error, Result};
pub use scalar::{FieldScalar, Scalar};

pub use num_rational::Ratio;

/// Exact rational scalar.
pub type Rational = Ratio<i64>;

/// Floating-point marked graph, used by the walk engine.
pub type MarkedGraph = outer_space::MarkedMetricGraph<f64>;
/// Integer-length marked graph (exact lengths on rose-orbit points).
pub type IntMarkedGraph = outer_space::MarkedMetricGraph<i64>;
/// Rational-length marked graph.
pub type ExactMarkedGraph = outer_space::MarkedMetricGraph<Rational>;

/// Floating-point rational current.
pub type Current = currents::RationalCurrent<f64>;
/// Exact rational current.
pub type ExactCurrent = currents::RationalCurrent<Rational>;
