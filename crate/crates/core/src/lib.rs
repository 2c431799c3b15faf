//! Quantum stochastic flows from unbounded generators, at desk scale.

pub mod algebra;
pub mod config;
pub mod error;
pub mod evolution;
pub mod generator;
pub mod ito;
pub mod oracles;
pub mod qrw;
pub mod report;
pub mod scalar;

pub use algebra::{Algebra, AlgebraElement, BasisWord};
pub use error::{Error, Result};
pub use scalar::{Exact, Scalar, C64};
