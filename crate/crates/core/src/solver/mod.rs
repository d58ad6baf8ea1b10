//! Quasistatic crack growth on planar meshes: elastic equilibria on
//! crack-split meshes, edge-aligned crack moves and the step acceptance rule.

mod brute;
mod crack;
mod elasticity;
mod quasistatic;
mod scenario;

pub use brute::{brute_force_minimizer, BruteForceResult, MAX_FREE_EDGES};
pub use crack::{propose_moves, CrackState, MoveHeuristics, CRACK_QUADRATURE_ORDER};
pub use elasticity::{solve_elasticity, transfer_values, DirichletData, ElasticityOptions, ElasticitySolution};
pub use quasistatic::{
    format_value, minors_integral, rank, write_trajectory_csv, Candidate, LoadProgram, MinimizationConfig, QuasistaticState,
    Simulation, StepRecord, Trajectory, CSV_HEADER, TIE_TOL,
};
pub use scenario::{BcGroup, DensityConfig, DiagonalPattern, EdgeList, MeshSource, Scenario, ScenarioFile, Side, SolverConfig};
