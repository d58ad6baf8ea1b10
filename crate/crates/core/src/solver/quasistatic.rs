use std::io::Write;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::currents::{admissibility_report, minors, AdmissibilityOptions, DeformationField};
use crate::energy::{element_energies, total_energy, BulkEnergyDensity, EnergyBreakdown, EnergyCoefficients};
use crate::error::{Error, Result};
use crate::geometry::{SimplicialComplex, SplitMesh};
use crate::sum;
use crate::varifold::{dominance_report, DiscreteVarifold};

use super::crack::{propose_moves, CrackState, MoveHeuristics};
use super::elasticity::{solve_elasticity, transfer_values, DirichletData, ElasticityOptions};

/// Relative gap below which two candidate totals count as tied.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MinimizationConfig {
    /// Bound `K` on `|u|`.
    pub k_bound: f64,
    /// Exponent of the `∫|M(Du)|^q` diagnostic.
    pub q: f64,
    /// Accepted crack moves per load step.
    pub move_budget: usize,
    pub nucleations: usize,
    pub elasticity_tol: f64,
    pub seed: u64,
    /// Ball radius of the boundary item; twice the longest edge when unset.
    pub resolution: Option<f64>,
    pub admissibility_tol: f64,
}

impl Default for MinimizationConfig {
    fn default() -> Self {
        Self {
            k_bound: 100.0,
            q: 2.0,
            move_budget: 8,
            nucleations: 3,
            elasticity_tol: 1e-9,
            seed: 0,
            resolution: None,
            admissibility_tol: 1e-8,
        }
    }
}

impl MinimizationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_bound > 0.0) {
            return Err(Error::Invalid(format!("K = {} must be positive", self.k_bound)));
        }
        if !(self.q > 1.0) {
            return Err(Error::Invalid(format!("q = {} must exceed 1", self.q)));
        }
        if !(self.elasticity_tol > 0.0) {
            return Err(Error::Invalid("elasticity tolerance must be positive".into()));
        }
        Ok(())
    }

    fn elasticity(&self) -> ElasticityOptions {
        ElasticityOptions { tol: self.elasticity_tol, k_bound: self.k_bound, ..ElasticityOptions::default() }
    }
}

/// Dirichlet data per step and an optional comparison varifold `Ṽ₁` that
/// every accepted crack must dominate.
#[derive(Clone, Debug)]
pub struct LoadProgram {
    pub steps: Vec<DirichletData>,
    pub comparison: Option<DiscreteVarifold>,
}

impl LoadProgram {
    pub fn new(steps: Vec<DirichletData>, comparison: Option<DiscreteVarifold>) -> Result<Self> {
        if steps.iter().any(|s| s.nodes.is_empty()) {
            return Err(Error::Invalid("every load step needs boundary nodes".into()));
        }
        Ok(Self { steps, comparison })
    }
}

#[derive(Clone, Debug)]
pub struct QuasistaticState {
    pub crack: CrackState,
    pub split: SplitMesh,
    pub u: DeformationField,
    pub energy: EnergyBreakdown,
    /// Energy gap per completed step.
    pub dissipation: Vec<f64>,
}

/// Outcome of one load step.
#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub energy: EnergyBreakdown,
    pub crack_length: f64,
    pub crack_mass: f64,
    pub cracked_edges: Vec<usize>,
    /// Edges added during this step, in acceptance order.
    pub accepted_edges: Vec<usize>,
    /// Total before any move, then after each accepted move (same bc).
    pub inner_totals: Vec<f64>,
    pub dissipation: f64,
    /// Candidates rejected by the admissibility or dominance checks.
    pub rejected: usize,
    pub admissible: bool,
    pub minors_integral: f64,
}

/// One evaluated candidate.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub crack: CrackState,
    pub split: SplitMesh,
    pub u: DeformationField,
    pub energy: EnergyBreakdown,
}

/// Static data of a quasistatic run.
pub struct Simulation<'a, D: BulkEnergyDensity + ?Sized> {
    pub base: &'a SimplicialComplex,
    pub density: &'a D,
    pub coeffs: &'a EnergyCoefficients,
    pub config: &'a MinimizationConfig,
    pub comparison: Option<&'a DiscreteVarifold>,
}

/// `∫ |M(Du)|^q dx`.
pub fn minors_integral(u: &DeformationField, q: f64) -> f64 {
    sum::sum((0..u.n_elements()).map(|e| u.element_volume(e) * minors(u.gradient(e)).norm().powf(q)))
}

pub(crate) fn better(a: &Candidate, b: &Candidate) -> bool {
    let (ta, tb) = (a.energy.total, b.energy.total);
    let scale = ta.abs().max(tb.abs()).max(1.0);
    if (ta - tb).abs() > TIE_TOL * scale {
        return ta < tb;
    }
    (a.crack.len(), &a.crack.edges) < (b.crack.len(), &b.crack.edges)
}

/// Candidates ordered best first under the tie rule.
pub fn rank(mut cands: Vec<Candidate>) -> Vec<Candidate> {
    let mut out = Vec::with_capacity(cands.len());
    while !cands.is_empty() {
        let mut best = 0;
        for i in 1..cands.len() {
            if better(&cands[i], &cands[best]) {
                best = i;
            }
        }
        out.push(cands.swap_remove(best));
    }
    out
}

impl<'a, D: BulkEnergyDensity + ?Sized> Simulation<'a, D> {
    pub fn new(
        base: &'a SimplicialComplex,
        density: &'a D,
        coeffs: &'a EnergyCoefficients,
        config: &'a MinimizationConfig,
    ) -> Result<Self> {
        config.validate()?;
        coeffs.validate()?;
        if base.ambient_dim() != 2 || base.top_dim() != 2 || density.dim() != 2 || coeffs.strata() != 1 {
            return Err(Error::DimensionError("the quasistatic solver runs on planar triangle meshes".into()));
        }
        Ok(Self { base, density, coeffs, config, comparison: None })
    }

    pub fn with_comparison(mut self, v: Option<&'a DiscreteVarifold>) -> Self {
        self.comparison = v;
        self
    }

    fn radius(&self) -> f64 {
        self.config.resolution.unwrap_or_else(|| 2.0 * self.base.max_edge_length())
    }

    /// Energy of a crack state with a given deformation.
    pub fn energy_of(&self, crack: &CrackState, u: &DeformationField) -> Result<EnergyBreakdown> {
        let family = crack.family(self.base, self.coeffs.p(1))?;
        total_energy(u, &family, self.density, self.coeffs)
    }

    /// Undeformed initial state.
    pub fn initial_state(&self, crack: CrackState) -> Result<QuasistaticState> {
        let split = crack.split(self.base)?;
        let u = DeformationField::identity(split.mesh.clone())?
            .with_duplicated_pairs(split.duplicated_pairs.clone())?
            .with_bound(self.config.k_bound);
        let energy = self.energy_of(&crack, &u)?;
        Ok(QuasistaticState { crack, split, u, energy, dissipation: Vec::new() })
    }

    /// Equilibrium of `crack` under `bc`, warm-started from `(from, values)`.
    pub fn evaluate(
        &self,
        crack: &CrackState,
        bc: &DirichletData,
        from: &SplitMesh,
        values: &[DVector<f64>],
    ) -> Result<Candidate> {
        let split = crack.split(self.base)?;
        let guess = transfer_values(from, values, &split);
        let sol = solve_elasticity(&split, bc, self.density, &self.config.elasticity(), &guess)?;
        let energy = self.energy_of(crack, &sol.u)?;
        Ok(Candidate { crack: crack.clone(), split, u: sol.u, energy })
    }

    /// Items (iii) to (v) and dominance over `previous` and `Ṽ₁`.
    pub fn acceptable(&self, cand: &Candidate, previous: &CrackState) -> Result<bool> {
        let tol = self.config.admissibility_tol;
        let r = self.radius();
        let v_new = cand.crack.varifold(self.base)?;
        let v_old = previous.varifold(self.base)?;
        if !dominance_report(&v_old, &v_new, r, tol).dominated {
            return Ok(false);
        }
        if let Some(c) = self.comparison {
            if !dominance_report(c, &v_new, r, tol).dominated {
                return Ok(false);
            }
        }
        let family = cand.crack.family(self.base, self.coeffs.p(1))?;
        let opts = AdmissibilityOptions { tol, resolution: Some(r), probes: None };
        let rep = admissibility_report(&cand.u, &family, Some(self.config.k_bound), &opts)?;
        Ok(rep.item_iii_orientation && rep.item_iv_ciarlet_necas && rep.item_v_boundary)
    }

    /// One load step: relax at the new data, then accept crack moves while
    /// they lower the total.
    pub fn step(&self, state: &QuasistaticState, bc: &DirichletData, n: usize) -> Result<(QuasistaticState, StepRecord)> {
        let fail = |e: Error| Error::StepFailure { step: n, reason: e.to_string() };
        let mut current = self.evaluate(&state.crack, bc, &state.split, state.u.values()).map_err(fail)?;
        let e_before = current.energy.total;
        let admissible = self.acceptable(&current, &state.crack).map_err(fail)?;
        let mut inner_totals = vec![e_before];
        let mut accepted_edges = Vec::new();
        let mut rejected = 0;
        let heuristics = MoveHeuristics { nucleations: self.config.nucleations };
        for _ in 0..self.config.move_budget {
            let dens: Vec<f64> = element_energies(&current.u, self.density)
                .iter()
                .enumerate()
                .map(|(e, w)| w / current.u.element_volume(e))
                .collect();
            let moves = propose_moves(&current.crack, self.base, &dens, &heuristics);
            let evaluated: Vec<Candidate> = moves[1..]
                .par_iter()
                .map(|c| self.evaluate(c, bc, &current.split, current.u.values()).ok())
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .filter(|c| c.energy.is_finite())
                .collect();
            let mut all = evaluated;
            all.push(current.clone());
            let mut next = None;
            for cand in rank(all) {
                if cand.crack == current.crack {
                    break;
                }
                if self.acceptable(&cand, &current.crack).map_err(fail)? {
                    next = Some(cand);
                    break;
                }
                rejected += 1;
            }
            let Some(next) = next else { break };
            accepted_edges.extend(next.crack.edges.difference(&current.crack.edges).copied());
            inner_totals.push(next.energy.total);
            current = next;
        }
        let record_edges_empty = accepted_edges.is_empty();
        let dissipation = e_before - current.energy.total;
        let mut ledger = state.dissipation.clone();
        ledger.push(dissipation);
        let record = StepRecord {
            step: n,
            energy: current.energy.clone(),
            crack_length: current.crack.length(self.base),
            crack_mass: current.crack.varifold(self.base).map_err(fail)?.mass(),
            cracked_edges: current.crack.edges.iter().copied().collect(),
            accepted_edges,
            inner_totals,
            dissipation,
            rejected,
            // accepted moves are admissible by construction
            admissible: admissible || !record_edges_empty,
            minors_integral: minors_integral(&current.u, self.config.q),
        };
        let next = QuasistaticState {
            crack: current.crack,
            split: current.split,
            u: current.u,
            energy: current.energy,
            dissipation: ledger,
        };
        Ok((next, record))
    }

    /// Run every step of a program; `on_step` sees each new state. On failure
    /// the records completed so far are returned with the error.
    pub fn run_program<F: FnMut(&QuasistaticState, &StepRecord)>(
        &self,
        initial: QuasistaticState,
        program: &LoadProgram,
        mut on_step: F,
    ) -> std::result::Result<Trajectory, (Trajectory, Error)> {
        let r0 = self.initial_record(&initial);
        on_step(&initial, &r0);
        let mut traj = Trajectory { records: vec![r0], final_state: None };
        let mut state = initial;
        for (i, bc) in program.steps.iter().enumerate() {
            match self.step(&state, bc, i + 1) {
                Ok((s, rec)) => {
                    on_step(&s, &rec);
                    traj.records.push(rec);
                    state = s;
                }
                Err(e) => {
                    traj.final_state = Some(state);
                    return Err((traj, e));
                }
            }
        }
        traj.final_state = Some(state);
        Ok(traj)
    }

    fn initial_record(&self, s: &QuasistaticState) -> StepRecord {
        StepRecord {
            step: 0,
            energy: s.energy.clone(),
            crack_length: s.crack.length(self.base),
            crack_mass: s.crack.varifold(self.base).map(|v| v.mass()).unwrap_or(0.0),
            cracked_edges: s.crack.edges.iter().copied().collect(),
            accepted_edges: Vec::new(),
            inner_totals: vec![s.energy.total],
            dissipation: 0.0,
            rejected: 0,
            admissible: true,
            minors_integral: minors_integral(&s.u, self.config.q),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub final_state: Option<QuasistaticState>,
}

pub const CSV_HEADER: [&str; 8] =
    ["step", "bulk", "curvature1", "surface1", "corner", "total", "crack_length", "dissipation"];

/// Shortest round-trip decimal, in exponent form outside `[1e-4, 1e16)`.
pub fn format_value(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Trajectory CSV in the fixed column order.
pub fn write_trajectory_csv<W: Write>(records: &[StepRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        let e = &r.energy;
        let curv = e.curvature.first().copied().unwrap_or(0.0);
        let surf = e.surface.first().copied().unwrap_or(0.0);
        let mut row = vec![r.step.to_string()];
        row.extend([e.bulk, curv, surf, e.corner, e.total, r.crack_length, r.dissipation].map(format_value));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
