//! Runtime experiments for a (1+1) genetic programming algorithm on the
//! ORDER and MAJORITY problems, with the analytical instruments used to
//! study it: leaf classification, potentials, drift estimation, drift-theorem
//! calculators and a scaling-experiment runner.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod drift_lab;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod fitness;
pub mod literal;
pub mod mutation;
pub mod tree;

pub use error::{Error, Result};
pub use evolution::{run, Fitness, InitSpec, RunConfig, RunResult, TraceMode};
pub use fitness::Problem;
pub use literal::Literal;
pub use mutation::{KDistribution, MutationOp, RngStream, Side};
pub use tree::{GpTree, OrderTracking};
