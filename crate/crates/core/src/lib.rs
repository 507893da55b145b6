//! Quantum speed limits for unitary and open qubit dynamics.
//!
//! Distances between states, quantum Fisher information along channel
//! trajectories, and the distance/time bounds built from them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod channels;
pub mod elliptic;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod metric;
pub mod minimize;
pub mod qfi;
pub mod quadrature;
pub mod states;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use states::DensityOperator;
