//! Numerical laboratory for competitive Hele-Shaw flow.

pub mod cli;
pub mod compare;
pub mod config;
pub mod curve;
pub mod erosion;
pub mod error;
pub mod greens_surface;
pub mod kernels;
pub mod lattice;
pub mod poly;
pub mod quad_diff;
pub mod quadrature;
pub mod stationary;
pub mod svg;

pub use curve::PathCurve;
pub use error::{Error, Result};
pub use num_complex::Complex64;
