//! Numerical verification toolkit for hypoelliptic heat kernels on model
//! foliations: the Heisenberg group, the Hopf fibration and the quaternionic
//! Hopf fibration, together with the kinetic Fokker-Planck operator.

pub mod cli;
pub mod error;
pub mod fd;
pub mod geometry_estimates;
pub mod heat_kernels;
pub mod jet;
pub mod kfp;
pub mod linalg;
pub mod model_spaces;
pub mod poly;
pub mod quadrature;
pub mod specfun;
pub mod spectral_bounds;
pub mod suites;

pub use error::{Error, Result};
