use crate::energy::BulkEnergyDensity;
use crate::error::{Error, Result};

use super::crack::CrackState;
use super::elasticity::DirichletData;
use super::quasistatic::{better, Candidate, QuasistaticState, Simulation};

/// Largest number of free edges the exhaustive search accepts.
pub const MAX_FREE_EDGES: usize = 20;

#[derive(Clone, Debug)]
pub struct BruteForceResult {
    pub best: Candidate,
    /// Subsets whose equilibrium was found.
    pub evaluated: usize,
    /// Subsets whose elasticity solve failed.
    pub failed: usize,
}

/// Exhaustive minimization of the total over every crack containing the
/// current one, at one load step. Warm starts come from the unchanged crack
/// relaxed at `bc`.
pub fn brute_force_minimizer<D: BulkEnergyDensity + ?Sized>(
    sim: &Simulation<D>,
    state: &QuasistaticState,
    bc: &DirichletData,
) -> Result<BruteForceResult> {
    use rayon::prelude::*;
    let base = sim.base;
    let free: Vec<usize> = (0..base.n_simplices(1))
        .filter(|&e| base.is_interior_edge(e) && !state.crack.edges.contains(&e))
        .collect();
    if free.len() > MAX_FREE_EDGES {
        return Err(Error::Invalid(format!("{} free edges exceed the exhaustive limit", free.len())));
    }
    let start = sim.evaluate(&state.crack, bc, &state.split, state.u.values())?;
    let results: Vec<Option<Candidate>> = (0u64..1 << free.len())
        .into_par_iter()
        .map(|mask| {
            let edges = free.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
            let crack = CrackState { edges: state.crack.edges.iter().copied().chain(edges).collect() };
            sim.evaluate(&crack, bc, &start.split, start.u.values()).ok().filter(|c| c.energy.is_finite())
        })
        .collect();
    let failed = results.iter().filter(|r| r.is_none()).count();
    let ok: Vec<Candidate> = results.into_iter().flatten().collect();
    let evaluated = ok.len();
    let best = ok.into_iter().reduce(|a, b| if better(&b, &a) { b } else { a }).ok_or(Error::StepFailure { step: 0, reason: "no feasible subset".into() })?;
    Ok(BruteForceResult { best, evaluated, failed })
}
