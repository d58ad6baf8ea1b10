//! Bulk stored energy, crack energy terms of a stratified family, the
//! classical Griffith comparison functional and sampled checks of the
//! structural hypotheses on the bulk density.

mod coefficients;
mod density;
mod functional;
mod hypotheses;

pub use coefficients::{EnergyCoefficients, EnergyConfig, PhiMode};
pub use density::{BulkEnergyDensity, GrowthViolator, NeoHookean, OrientationViolator};
pub use functional::{bulk_energy, element_energies, griffith_energy, total_energy, varifold_energy, EnergyBreakdown};
pub use hypotheses::{hypothesis_check, sample_states, HypothesisConfig, HypothesisOutcome, HypothesisReport, SampleState};
