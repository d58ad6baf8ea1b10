//! Discrete integer-density varifolds, their generalized curvature and
//! boundary, and the ball-wise measure comparisons between strata.

mod curvature;
mod discrete;
mod dump;
mod stratified;
mod weak;

pub use curvature::{estimate_curvature, BoundaryAtom, BoundaryMeasure, CurvatureField, CurvatureTensor};
pub use discrete::{mass, pushforward_measure, DiscreteVarifold, VarifoldAtom};
pub use dump::{AtomJson, BoundaryAtomJson, VarifoldDump};
pub use stratified::{
    dominance_report, dominates, is_stratified, DominanceReport, StratificationReport, StratifiedFamily, Stratum,
    StratumCheck,
};
pub use weak::{atom_bump_family, bump_family, linear_family, weak_identity_residual, BundleFunction, PolynomialTest};

#[cfg(test)]
mod tests;
