use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};
use varifrac::currents::{admissibility_report, AdmissibilityOptions, DeformationDump, DeformationField};
use varifrac::energy::EnergyConfig;
use varifrac::varifold::{StratifiedFamily, Stratum, VarifoldDump};

use crate::io::{self, ConsistencyError, InputError};
use crate::{manifest, Common, Ctx, EXIT_NEGATIVE, EXIT_OK};

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct AdmitArgs {
    /// Mesh JSON of the (crack-split) body.
    pub mesh: PathBuf,
    /// Deformation JSON (`nodes`, `values`, `duplicated_pairs`).
    pub deformation: PathBuf,
    /// Crack varifold dumps with `A` and `dV`.
    #[arg(long = "varifold")]
    #[serde(default)]
    pub varifolds: Vec<PathBuf>,
    /// Ball radius of the boundary item.
    #[arg(long)]
    pub resolution: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

fn load_family(paths: &[PathBuf], ambient: usize, p: impl Fn(usize) -> f64) -> Result<StratifiedFamily> {
    let mut fam = StratifiedFamily::new(ambient);
    for path in paths {
        let dump: VarifoldDump = io::parse_json(path)?;
        let v = dump.to_varifold().with_context(|| format!("{}", path.display()))?;
        if !v.is_empty() && v.ambient_dim() != ambient {
            return Err(ConsistencyError(format!(
                "{} lives in R^{}, the deformation in R^{ambient}",
                path.display(),
                v.ambient_dim()
            ))
            .into());
        }
        let (Some(curvature), Some(boundary)) = (dump.curvature()?, dump.boundary()?) else {
            return Err(InputError(format!("{} lacks the `A` or `dV` fields", path.display())).into());
        };
        if curvature.tensors.len() != v.atoms().len() {
            return Err(ConsistencyError(format!("{}: `A` does not match the atoms", path.display())).into());
        }
        let k = dump.k;
        if fam.get(k).is_some() {
            return Err(InputError(format!("two varifolds of dimension {k}")).into());
        }
        fam.insert(Stratum { varifold: v, curvature, boundary, exponent: p(k) })
            .with_context(|| format!("{}", path.display()))?;
    }
    Ok(fam)
}

pub fn run(args: &AdmitArgs, ctx: &Ctx) -> Result<u8> {
    let mesh = io::read_mesh(&args.mesh)?;
    let dump: DeformationDump = io::parse_json(&args.deformation)?;
    let u = DeformationField::from_dump(mesh, &dump)?;
    let cfg = match &args.common.config {
        Some(p) => Some(EnergyConfig::from_toml_str(&io::read_text(p)?).with_context(|| format!("{}", p.display()))?),
        None => None,
    };
    let p_of = |k: usize| cfg.as_ref().and_then(|c| c.p.get(k.wrapping_sub(1)).copied()).unwrap_or(2.0);
    let family = load_family(&args.varifolds, u.dim(), p_of)?;
    let mut options = AdmissibilityOptions { resolution: args.resolution, ..AdmissibilityOptions::default() };
    if let Some(t) = args.common.tol {
        options.tol = t;
    }
    let report = admissibility_report(&u, &family, cfg.as_ref().map(|c| c.k), &options)?;
    ctx.note(format!(
        "iii={} iv={} (margin {:.3e}) v={} (margin {:.3e})",
        report.item_iii_orientation,
        report.item_iv_ciarlet_necas,
        report.ciarlet_necas.worst_margin,
        report.item_v_boundary,
        report.boundary.worst_margin
    ));
    fs::create_dir_all(&args.common.out)?;
    io::write_json(&args.common.out.join("admissibility.json"), &report)?;
    let mut inputs = vec![io::absolute(&args.mesh)?, io::absolute(&args.deformation)?];
    for v in &args.varifolds {
        inputs.push(io::absolute(v)?);
    }
    manifest::write(&args.common.out, &crate::Command::Admit(args.clone()), inputs, args.common.seed.unwrap_or(0))?;
    Ok(if report.admissible { EXIT_OK } else { EXIT_NEGATIVE })
}
