// SPDX-License-Identifier: Apache-2.0
//! Distributed list defective coloring: a synchronous round simulator with
//! bit accounting, oriented list defective coloring algorithms, color-space
//! reduction, the arbdefective degree-halving framework, and sequential
//! oracles used to check all of them.

pub mod conflict;
pub mod error;
pub mod generate;
pub mod graph;
pub mod io;
pub mod linial;
pub mod oldc;
pub mod oracle;
pub mod reductions;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use graph::{check_existence_condition, validate_ldc, Color, ColoredGraph, ColoringOutput, Flavor, LdcInstance, ValidityReport};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Exact = num_rational::BigRational;

/// OLDC tunables in floating point.
pub type Config = oldc::OldcConfig<f64>;
/// OLDC tunables in exact rationals.
pub type ExactConfig = oldc::OldcConfig<Exact>;
