use std::collections::BTreeSet;
use std::path::Path;

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use varifrac::energy::{griffith_energy, EnergyCoefficients, NeoHookean};
use varifrac::error::Error;
use varifrac::geometry::shapes::{grid_vertex, rectangle, Diagonals};
use varifrac::geometry::SimplicialComplex;
use varifrac::solver::{
    propose_moves, solve_elasticity, write_trajectory_csv, CrackState, DirichletData, ElasticityOptions, LoadProgram,
    MinimizationConfig, MoveHeuristics, Scenario, Simulation,
};

fn boundary_nodes(m: &SimplicialComplex) -> Vec<usize> {
    m.boundary_vertex_mask().iter().enumerate().filter(|(_, b)| **b).map(|(v, _)| v).collect()
}

fn mapped_bc<F: Fn(&DVector<f64>) -> DVector<f64>>(m: &SimplicialComplex, nodes: &[usize], f: F) -> DirichletData {
    DirichletData::new(nodes.to_vec(), nodes.iter().map(|&v| f(m.vertex(v))).collect()).unwrap()
}

/// Top and bottom rows pulled apart by `delta` each.
fn opening(m: &SimplicialComplex, delta: f64) -> DirichletData {
    let nodes: Vec<usize> = (0..m.n_vertices()).filter(|&v| m.vertex(v)[1] == 0.0 || m.vertex(v)[1] == 1.0).collect();
    mapped_bc(m, &nodes, |x| {
        let s = if x[1] > 0.5 { delta } else { -delta };
        DVector::from_vec(vec![x[0], x[1] + s])
    })
}

fn midline(m: &SimplicialComplex, nx: usize, ny: usize, from: usize, to: usize) -> CrackState {
    let pairs: Vec<[usize; 2]> = (from..to).map(|i| [grid_vertex(nx, i, ny / 2), grid_vertex(nx, i + 1, ny / 2)]).collect();
    CrackState::from_vertex_pairs(m, &pairs).unwrap()
}

fn identity_start(m: &SimplicialComplex, crack: &CrackState) -> (varifrac::geometry::SplitMesh, Vec<DVector<f64>>) {
    let split = crack.split(m).unwrap();
    let v = split.mesh.vertices().to_vec();
    (split, v)
}

#[test]
fn zero_data_leaves_the_body_undeformed() {
    let m = rectangle(4, 4, 1.0, 1.0, Diagonals::Alternating).unwrap();
    let nh = NeoHookean::from_lame(2, 1.0, 1.0).unwrap();
    let bc = mapped_bc(&m, &boundary_nodes(&m), |x| x.clone());
    let (split, start) = identity_start(&m, &CrackState::default());
    let sol = solve_elasticity(&split, &bc, &nh, &ElasticityOptions::default(), &start).unwrap();
    assert!(sol.bulk.abs() < 1e-14);
    for (u, x) in sol.u.values().iter().zip(m.vertices()) {
        assert!((u - x).norm() < 1e-14);
    }
}

#[test]
fn homogeneous_stretch_has_constant_gradient() {
    let m = rectangle(6, 6, 1.0, 1.0, Diagonals::Alternating).unwrap();
    let nh = NeoHookean::from_lame(2, 1.0, 2.0).unwrap();
    let bc = mapped_bc(&m, &boundary_nodes(&m), |x| x * 1.05);
    let (split, start) = identity_start(&m, &CrackState::default());
    let sol = solve_elasticity(&split, &bc, &nh, &ElasticityOptions::default(), &start).unwrap();
    let expect = DMatrix::identity(2, 2) * 1.05;
    for g in sol.u.gradients() {
        assert!((g - &expect).amax() < 1e-9, "{g}");
    }
    assert!(sol.gradient_norm <= 1e-10);
    assert!(sol.u.min_det() > 0.0);
}

#[test]
fn a_cut_sheet_stores_less_energy() {
    let (nx, ny) = (4, 4);
    let m = rectangle(nx, ny, 1.0, 1.0, Diagonals::Alternating).unwrap();
    let nh = NeoHookean::from_lame(2, 1.0, 1.0).unwrap();
    let bc = opening(&m, 0.05);
    let opts = ElasticityOptions::default();
    let (s0, x0) = identity_start(&m, &CrackState::default());
    let whole = solve_elasticity(&s0, &bc, &nh, &opts, &x0).unwrap();
    let cut = midline(&m, nx, ny, 0, nx);
    let (s1, x1) = identity_start(&m, &cut);
    let halves = solve_elasticity(&s1, &bc, &nh, &opts, &x1).unwrap();
    assert!(whole.bulk > 1e-3);
    assert!(halves.bulk < 1e-12 * whole.bulk.max(1.0), "{}", halves.bulk);
}

#[test]
fn data_beyond_the_bound_is_rejected_and_inversion_fails() {
    let m = rectangle(2, 2, 1.0, 1.0, Diagonals::Uniform).unwrap();
    let nh = NeoHookean::from_lame(2, 1.0, 1.0).unwrap();
    let (split, start) = identity_start(&m, &CrackState::default());
    let far = mapped_bc(&m, &boundary_nodes(&m), |x| x * 50.0);
    let opts = ElasticityOptions { k_bound: 10.0, ..ElasticityOptions::default() };
    assert!(matches!(solve_elasticity(&split, &far, &nh, &opts, &start), Err(Error::Invalid(_))));
    // reflect every boundary node: no orientation-preserving path exists
    let flip = mapped_bc(&m, &boundary_nodes(&m), |x| DVector::from_vec(vec![x[0], -x[1]]));
    assert!(matches!(solve_elasticity(&split, &flip, &nh, &opts, &start), Err(Error::StepFailure { .. })));
}

fn small_setup() -> (SimplicialComplex, NeoHookean, MinimizationConfig) {
    let m = rectangle(8, 4, 2.0, 1.0, Diagonals::Alternating).unwrap();
    let nh = NeoHookean::from_lame(2, 1.0, 1.0).unwrap();
    let cfg = MinimizationConfig { k_bound: 10.0, move_budget: 2, ..MinimizationConfig::default() };
    (m, nh, cfg)
}

#[test]
fn unloaded_body_does_not_crack() {
    let (m, nh, cfg) = small_setup();
    let coeffs = EnergyCoefficients::uniform(2, 1e-3, 1e-2, 2.0, 1e-3);
    let sim = Simulation::new(&m, &nh, &coeffs, &cfg).unwrap();
    let state = sim.initial_state(CrackState::default()).unwrap();
    let bc = opening(&m, 0.0);
    let (next, rec) = sim.step(&state, &bc, 1).unwrap();
    assert!(next.crack.is_empty());
    assert!(rec.accepted_edges.is_empty());
    assert_eq!(rec.energy.total, 0.0);
    assert_eq!(rec.dissipation, 0.0);
}

#[test]
fn griffith_limit_of_accepted_states() {
    let (m, nh, cfg) = small_setup();
    let coeffs = EnergyCoefficients::uniform(2, 0.0, 1e-2, 2.0, 0.0);
    let sim = Simulation::new(&m, &nh, &coeffs, &cfg).unwrap();
    let mut state = sim.initial_state(midline(&m, 8, 4, 0, 3)).unwrap();
    for n in 1..=3 {
        let (s, _) = sim.step(&state, &opening(&m, 0.04 * n as f64), n).unwrap();
        state = s;
        let crack = state.crack.complex(&m).unwrap().unwrap();
        let g = griffith_energy(&crack, &state.u, &nh, coeffs.phi_griffith).unwrap();
        assert_relative_eq!(state.energy.total, g, max_relative = 1e-10);
    }
}

fn ramp_hold_program(m: &SimplicialComplex, ramp: usize, hold: usize, peak: f64) -> LoadProgram {
    let steps = (1..=ramp)
        .map(|n| opening(m, peak * n as f64 / ramp as f64))
        .chain((0..hold).map(|_| opening(m, peak)))
        .collect();
    LoadProgram::new(steps, None).unwrap()
}

#[test]
fn ramp_then_hold_is_monotone_and_stabilizes() {
    let (m, nh, cfg) = small_setup();
    let coeffs = EnergyCoefficients::uniform(2, 1e-3, 1e-2, 2.0, 1e-3);
    let sim = Simulation::new(&m, &nh, &coeffs, &cfg).unwrap();
    let init = sim.initial_state(midline(&m, 8, 4, 0, 2)).unwrap();
    let traj = sim.run_program(init, &ramp_hold_program(&m, 5, 3, 0.08), |_, _| {}).map_err(|(_, e)| e).unwrap();
    let recs = &traj.records;
    assert!(recs.iter().any(|r| !r.accepted_edges.is_empty()), "no growth under the ramp");
    for w in recs.windows(2) {
        assert!(w[1].crack_mass >= w[0].crack_mass);
        assert!(w[1].cracked_edges.len() >= w[0].cracked_edges.len());
        let before: BTreeSet<_> = w[0].cracked_edges.iter().collect();
        assert!(w[1].cracked_edges.iter().collect::<BTreeSet<_>>().is_superset(&before));
    }
    for r in recs {
        assert!(r.dissipation >= 0.0);
        assert!(r.inner_totals.windows(2).all(|t| t[1] <= t[0]));
        assert!(r.admissible);
    }
    // the last hold step accepts nothing
    let last = recs.last().unwrap();
    assert!(last.accepted_edges.is_empty());
    assert_eq!(last.dissipation, 0.0);
}

#[test]
fn unloading_leaves_a_closed_crack() {
    let (m, nh, cfg) = small_setup();
    let coeffs = EnergyCoefficients::uniform(2, 1e-3, 1e-2, 2.0, 1e-3);
    let sim = Simulation::new(&m, &nh, &coeffs, &cfg).unwrap();
    let init = sim.initial_state(midline(&m, 8, 4, 0, 2)).unwrap();
    let mut steps: Vec<DirichletData> = (1..=5).map(|n| opening(&m, 0.02 * n as f64)).collect();
    steps.push(opening(&m, 0.0));
    let program = LoadProgram::new(steps, None).unwrap();
    let traj = sim.run_program(init, &program, |_, _| {}).map_err(|(_, e)| e).unwrap();
    let fin = traj.final_state.unwrap();
    let grown = traj.records[5].cracked_edges.len();
    assert!(grown > 2);
    assert_eq!(fin.crack.len(), grown);
    assert!(fin.crack.varifold(&m).unwrap().mass() > 0.0);
    let jump = fin
        .split
        .duplicated_pairs
        .iter()
        .map(|[a, b]| (&fin.u.values()[*a] - &fin.u.values()[*b]).norm())
        .fold(0.0, f64::max);
    assert!(jump <= 1e-8, "jump {jump}");
}

#[test]
fn trajectories_are_reproducible() {
    let (m, nh, cfg) = small_setup();
    let coeffs = EnergyCoefficients::uniform(2, 1e-3, 1e-2, 2.0, 1e-3);
    let sim = Simulation::new(&m, &nh, &coeffs, &cfg).unwrap();
    let run = || {
        let init = sim.initial_state(midline(&m, 8, 4, 0, 2)).unwrap();
        let traj = sim.run_program(init, &ramp_hold_program(&m, 4, 0, 0.08), |_, _| {}).map_err(|(_, e)| e).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&traj.records, &mut buf).unwrap();
        buf
    };
    let a = run();
    assert_eq!(a, run());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("step,bulk,curvature1,surface1,corner,total,crack_length,dissipation\n"));
}

#[test]
fn scenario_errors_name_the_problem() {
    let dir = Path::new(".");
    let ok = r#"
steps = 2
[mesh]
nx = 4
ny = 2
width = 2.0
height = 1.0
[density]
mu = 1.0
lambda = 1.0
[energy]
alpha = [0.0]
beta = [0.01]
p = [2.0]
[[bc]]
side = "bottom"
ramp_to = [0.0, 0.0]
[[bc]]
side = "top"
displacements = [[0.0, 0.01], [0.0, 0.02]]
"#;
    let sc = Scenario::from_toml_str(ok, dir).unwrap();
    let program = sc.program().unwrap();
    assert_eq!(program.steps.len(), 2);
    let top = &program.steps[1];
    let v = top.nodes.iter().position(|&n| sc.mesh.vertex(n)[1] == 1.0).unwrap();
    assert!((top.values[v][1] - 1.02).abs() < 1e-15);

    let missing = ok.replace("steps = 2\n", "");
    let err = Scenario::from_toml_str(&missing, dir).unwrap_err().to_string();
    assert!(err.contains("steps"), "{err}");
    let short = ok.replace("[[0.0, 0.01], [0.0, 0.02]]", "[[0.0, 0.01]]");
    assert!(Scenario::from_toml_str(&short, dir).is_err());
    let unknown = ok.replace("mu = 1.0", "mu = 1.0\nnu = 0.3");
    assert!(Scenario::from_toml_str(&unknown, dir).unwrap_err().to_string().contains("nu"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn moves_only_add_interior_edges(seed in 0u64..1000, picks in 0usize..6, m_nuc in 0usize..5) {
        let m = rectangle(5, 4, 1.0, 1.0, Diagonals::Alternating).unwrap();
        let interior: Vec<usize> = (0..m.n_simplices(1)).filter(|&e| m.is_interior_edge(e)).collect();
        let edges: Vec<usize> = (0..picks).map(|i| interior[(seed as usize * 31 + i * 17) % interior.len()]).collect();
        let crack = CrackState::new(&m, edges).unwrap();
        let dens: Vec<f64> = (0..m.n_simplices(2)).map(|t| ((t as u64 * 2654435761 + seed) % 97) as f64).collect();
        let moves = propose_moves(&crack, &m, &dens, &MoveHeuristics { nucleations: m_nuc });
        prop_assert_eq!(&moves[0], &crack);
        let tips = crack.tips(&m).len();
        prop_assert!(moves.len() <= 1 + 8 * tips + m_nuc);
        for c in &moves[1..] {
            prop_assert_eq!(c.len(), crack.len() + 1);
            prop_assert!(c.contains(&crack));
            prop_assert!(c.edges.iter().all(|&e| m.is_interior_edge(e)));
        }
        let unique: BTreeSet<_> = moves.iter().collect();
        prop_assert_eq!(unique.len(), moves.len());
    }
}
