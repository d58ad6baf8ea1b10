use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};
use varifrac::energy::EnergyConfig;
use varifrac::solver::{write_trajectory_csv, Scenario, Simulation, StepRecord};

use crate::io::{self, RuntimeError};
use crate::{manifest, svg, Common, Ctx, EXIT_OK};

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct RunArgs {
    /// Scenario TOML.
    pub scenario: PathBuf,
    /// Skip the SVG frames.
    #[arg(long)]
    #[serde(default)]
    pub no_frames: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct FinalState<'a> {
    cracked_edges: Vec<[usize; 2]>,
    deformation: varifrac::currents::DeformationDump,
    dissipation: &'a [f64],
}

pub fn run(args: &RunArgs, ctx: &Ctx) -> Result<u8> {
    let mut scenario = Scenario::load(&args.scenario).with_context(|| format!("loading {}", args.scenario.display()))?;
    let mut inputs = vec![io::absolute(&args.scenario)?];
    if let Some(p) = &scenario.mesh_path {
        inputs.push(io::absolute(p)?);
    }
    if let Some(p) = &args.common.config {
        scenario.file.energy =
            EnergyConfig::from_toml_str(&io::read_text(p)?).with_context(|| format!("{}", p.display()))?;
        inputs.push(io::absolute(p)?);
    }
    let mut config = scenario.config(args.common.seed);
    if let Some(t) = args.common.tol {
        config.admissibility_tol = t;
    }
    let density = scenario.density()?;
    let coeffs = scenario.file.energy.coefficients();
    let program = scenario.program()?;
    let sim = Simulation::new(&scenario.mesh, &density, &coeffs, &config)?.with_comparison(program.comparison.as_ref());
    let initial = sim.initial_state(scenario.initial_crack()?)?;

    let out = &args.common.out;
    let frames = out.join("frames");
    fs::create_dir_all(&frames).with_context(|| format!("creating {}", frames.display()))?;
    let resolved = serde_json::json!({ "scenario": &scenario.file, "minimization": &config });
    manifest::write_resolved(out, &crate::Command::FractureRun(args.clone()), inputs, config.seed, Some(resolved))?;

    let mut frame_err = None;
    let outcome = sim.run_program(initial, &program, |state, rec| {
        ctx.note(format!(
            "step {:>3}: total {:.6e} crack {:.4} dissipation {:.3e}",
            rec.step, rec.energy.total, rec.crack_length, rec.dissipation
        ));
        if !args.no_frames && frame_err.is_none() {
            let path = frames.join(format!("step_{:04}.svg", rec.step));
            if let Err(e) = fs::write(&path, svg::frame(&scenario.mesh, state)) {
                frame_err = Some(e);
            }
        }
    });
    if let Some(e) = frame_err {
        return Err(e).context("writing frames");
    }
    let (traj, failure) = match outcome {
        Ok(t) => (t, None),
        Err((t, e)) => (t, Some(e)),
    };
    write_outputs(out, &traj.records)?;
    if let Some(state) = &traj.final_state {
        let pairs = state.crack.edges.iter().map(|&e| {
            let s = &scenario.mesh.simplices(1)[e];
            [s[0], s[1]]
        });
        let fin = FinalState {
            cracked_edges: pairs.collect(),
            deformation: state.u.to_dump(),
            dissipation: &state.dissipation,
        };
        io::write_json(&out.join("final_state.json"), &fin)?;
    }
    if let Some(e) = failure {
        return Err(anyhow::Error::new(e).context(RuntimeError(format!(
            "run stopped after {} completed steps; partial outputs kept in {}",
            traj.records.len() - 1,
            out.display()
        ))));
    }
    Ok(EXIT_OK)
}

fn write_outputs(out: &std::path::Path, records: &[StepRecord]) -> Result<()> {
    let mut buf = Vec::new();
    write_trajectory_csv(records, &mut buf)?;
    fs::write(out.join("trajectory.csv"), buf)?;
    io::write_json(&out.join("steps.json"), &records)
}
