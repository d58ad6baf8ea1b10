use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::io::{self, InputError};
use crate::{dispatch, Command, Ctx};

pub const FILE: &str = "manifest.json";

/// Everything needed to repeat a command.
#[derive(Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub invocation: Command,
    pub inputs: Vec<PathBuf>,
    pub seed: u64,
    pub out: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved: Option<serde_json::Value>,
}

pub fn write(out: &Path, cmd: &Command, inputs: Vec<PathBuf>, seed: u64) -> Result<()> {
    write_resolved(out, cmd, inputs, seed, None)
}

pub fn write_resolved(
    out: &Path,
    cmd: &Command,
    inputs: Vec<PathBuf>,
    seed: u64,
    resolved: Option<serde_json::Value>,
) -> Result<()> {
    let m = RunManifest {
        tool: "varifrac".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        invocation: cmd.clone(),
        inputs,
        seed,
        out: io::absolute(out)?,
        resolved,
    };
    io::write_json(&out.join(FILE), &m)
}

pub fn rerun(path: &Path, out: Option<&Path>, ctx: &Ctx) -> Result<u8> {
    let m: RunManifest = io::parse_json(path)?;
    if m.tool != "varifrac" {
        return Err(InputError(format!("{} is not a varifrac manifest", path.display())).into());
    }
    let mut cmd = m.invocation;
    let target = out.map(Path::to_path_buf).unwrap_or(m.out);
    match &mut cmd {
        Command::VarifoldAnalyze(a) => a.common.out = target,
        Command::Admit(a) => a.common.out = target,
        Command::FractureRun(a) => a.common.out = target,
        Command::Rerun { .. } => return Err(InputError("nested rerun manifest".into()).into()),
    }
    dispatch(&cmd, ctx).with_context(|| format!("rerunning {}", path.display()))
}
