use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

mod admit;
mod analyze;
mod io;
mod manifest;
mod run;
mod svg;

/// Exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CONSISTENCY: u8 = 3;
pub const EXIT_RUNTIME: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "varifrac", version, about = "Varifold crack analysis and quasistatic fracture runs")]
struct Cli {
    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct Common {
    /// Energy config (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Seed for every random choice (overrides the config seed).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Residual tolerance for a pass/fail verdict.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Curvature, boundary and weak-identity residual of a mesh varifold.
    VarifoldAnalyze(analyze::AnalyzeArgs),
    /// Admissibility report of a deformation against crack varifolds.
    Admit(admit::AdmitArgs),
    /// Quasistatic fracture run from a scenario file.
    FractureRun(run::RunArgs),
    /// Repeat a command recorded in a manifest.
    #[serde(skip)]
    Rerun {
        manifest: PathBuf,
        /// Write to this directory instead of the recorded one.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    /// Make every path absolute so that a manifest can be replayed anywhere.
    fn absolutize(&mut self) -> Result<()> {
        let abs = |p: &mut PathBuf| -> Result<()> {
            *p = io::absolute(p)?;
            Ok(())
        };
        let common = |c: &mut Common| -> Result<()> {
            abs(&mut c.out)?;
            if let Some(p) = &mut c.config {
                abs(p)?;
            }
            Ok(())
        };
        match self {
            Command::VarifoldAnalyze(a) => {
                abs(&mut a.mesh)?;
                common(&mut a.common)
            }
            Command::Admit(a) => {
                abs(&mut a.mesh)?;
                abs(&mut a.deformation)?;
                a.varifolds.iter_mut().try_for_each(abs)?;
                common(&mut a.common)
            }
            Command::FractureRun(a) => {
                abs(&mut a.scenario)?;
                common(&mut a.common)
            }
            Command::Rerun { .. } => Ok(()),
        }
    }
}

pub struct Ctx {
    pub quiet: bool,
}

impl Ctx {
    pub fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

/// Run a command; returns the exit code on success.
pub fn dispatch(cmd: &Command, ctx: &Ctx) -> Result<u8> {
    match cmd {
        Command::VarifoldAnalyze(a) => analyze::run(a, ctx),
        Command::Admit(a) => admit::run(a, ctx),
        Command::FractureRun(a) => run::run(a, ctx),
        Command::Rerun { manifest, out } => manifest::rerun(manifest, out.as_deref(), ctx),
    }
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("VARIFRAC_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| io::InputError(format!("VARIFRAC_THREADS must be a nonnegative integer, got {v:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let mut cli = Cli::parse();
    let ctx = Ctx { quiet: cli.quiet };
    let result = init_threads()
        .and_then(|_| cli.command.absolutize())
        .and_then(|_| dispatch(&cli.command, &ctx));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(io::exit_code(&e))
        }
    }
}
