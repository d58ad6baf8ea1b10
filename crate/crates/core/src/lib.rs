//! Discrete curvature varifolds, graph currents of piecewise-affine
//! deformations, an extended Griffith energy, and a quasistatic minimizer
//! over (deformation, crack pattern) pairs.

pub mod currents;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod solver;
pub mod sum;
pub mod varifold;

pub use error::{Error, Result};
