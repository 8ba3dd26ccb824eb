//! Exact computations on log surface germs in positive characteristic.

pub mod bstar;
pub mod complements;
pub mod corpus;
pub mod dual_graph;
pub mod error;
pub mod exact_arith;
pub mod fedder_p1;
pub mod linalg;
pub mod padic;

pub use error::{Error, Result};
pub use dual_graph::{DualGraph, LogPair, SingularityClass};
pub use exact_arith::{CoeffVector, Rational};
