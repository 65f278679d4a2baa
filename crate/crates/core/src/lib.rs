//! Pure steady states of Markovian Gaussian dissipative systems.
//!
//! The crate analyzes a system `(G, C)` for a unique pure steady state,
//! synthesizes systems whose unique steady state is a chosen pure Gaussian
//! state, and integrates the moment equations.
//!
//! Quadratures are ordered `(q_1, …, q_n, p_1, …, p_n)` with vacuum
//! covariance `I/2`.

// `!(x > 0.0)` is how NaN is rejected along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod dynamics;
pub mod engineer;
pub mod error;
pub mod model;
pub mod numkit;
pub mod steady;

pub use catalog::CatalogItem;
pub use dynamics::Trajectory;
pub use engineer::{EngineeringParameters, LocalityProfile, PureStateSpec};
pub use error::{Error, Result};
pub use model::{CovarianceMatrix, GaussianDynamics, GaussianState, SymplecticForm};
pub use num_complex::Complex64;
pub use numkit::{ComplexMatrix, RealMatrix, RealVector, Tolerances};
pub use steady::{KMatrix, Theorem1Report};
