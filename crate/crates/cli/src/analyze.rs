use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};
use varifrac::energy::{varifold_energy, EnergyBreakdown, EnergyConfig};
use varifrac::geometry::{shapes, SimplexId, SimplicialComplex};
use varifrac::varifold::{
    atom_bump_family, weak_identity_residual, BoundaryMeasure, CurvatureField, DiscreteVarifold, StratifiedFamily,
    Stratum, VarifoldDump,
};

use crate::io::{self, InputError};
use crate::{manifest, Common, Ctx, EXIT_NEGATIVE, EXIT_OK};

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct AnalyzeArgs {
    /// Mesh JSON.
    pub mesh: PathBuf,
    /// Varifold dimension; defaults to the mesh dimension. One less analyses
    /// the boundary faces of the mesh.
    #[arg(long)]
    pub k: Option<usize>,
    /// Quadrature order of the atoms.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Number of bump centres in the residual test family.
    #[arg(long, default_value_t = 4)]
    pub centers: usize,
    /// Midpoint refinements for a convergence study.
    #[arg(long, default_value_t = 0)]
    pub refine: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct Level {
    level: usize,
    atoms: usize,
    max_edge: f64,
    residual: f64,
    /// Residual of the previous level over this one.
    ratio: Option<f64>,
}

#[derive(Serialize)]
struct Report {
    k: usize,
    ambient: usize,
    atoms: usize,
    mass: f64,
    boundary_total_variation: f64,
    boundary_atoms: usize,
    max_curvature_norm: f64,
    max_mean_curvature: f64,
    isolated: usize,
    test_functions: usize,
    residual: f64,
    tolerance: Option<f64>,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<EnergyBreakdown>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    convergence: Vec<Level>,
}

fn support_of(mesh: &SimplicialComplex, k: usize) -> Result<SimplicialComplex> {
    let top = mesh.top_dim();
    if k == top {
        Ok(mesh.clone())
    } else if k + 1 == top {
        let ids: Vec<SimplexId> = mesh.boundary_faces().into_iter().map(|f| SimplexId::new(k, f)).collect();
        if ids.is_empty() {
            return Err(InputError("mesh has no boundary faces".into()).into());
        }
        Ok(mesh.subcomplex(&ids)?)
    } else {
        Err(InputError(format!("cannot analyse k = {k} on a {top}-dimensional mesh")).into())
    }
}

struct Analysis {
    v: DiscreteVarifold,
    a: CurvatureField,
    b: BoundaryMeasure,
    residual: f64,
    tests: usize,
}

fn analyse(support: &SimplicialComplex, order: usize, centers: usize) -> Result<Analysis> {
    let v = DiscreteVarifold::unit_density(support, order)?;
    let (a, b) = v.estimate_curvature()?;
    let family = atom_bump_family(&v, centers);
    let residual = weak_identity_residual(&v, &a, &b, &family);
    Ok(Analysis { v, a, b, residual, tests: family.len() })
}

pub fn run(args: &AnalyzeArgs, ctx: &Ctx) -> Result<u8> {
    let mesh = io::read_mesh(&args.mesh)?;
    let k = args.k.unwrap_or(mesh.top_dim());
    let support = support_of(&mesh, k)?;
    let energy_cfg = match &args.common.config {
        Some(p) => Some(EnergyConfig::from_toml_str(&io::read_text(p)?).with_context(|| format!("{}", p.display()))?),
        None => None,
    };
    let out = &args.common.out;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let main = analyse(&support, args.order, args.centers)?;
    ctx.note(format!("k={k} atoms={} residual={:.3e}", main.v.atoms().len(), main.residual));

    let mut convergence = Vec::new();
    if args.refine > 0 {
        let mut mesh_l = support.clone();
        let mut prev = main.residual;
        convergence.push(Level {
            level: 0,
            atoms: main.v.atoms().len(),
            max_edge: mesh_l.max_edge_length(),
            residual: prev,
            ratio: None,
        });
        for level in 1..=args.refine {
            mesh_l = shapes::refine(&mesh_l)?;
            let an = analyse(&mesh_l, args.order, args.centers)?;
            let ratio = (an.residual > 0.0).then(|| prev / an.residual);
            ctx.note(format!("level {level}: residual={:.3e} ratio={:?}", an.residual, ratio));
            convergence.push(Level {
                level,
                atoms: an.v.atoms().len(),
                max_edge: mesh_l.max_edge_length(),
                residual: an.residual,
                ratio,
            });
            prev = an.residual;
        }
        let mut csv = String::from("level,atoms,max_edge,residual,ratio\n");
        for l in &convergence {
            let ratio = l.ratio.map(|r| r.to_string()).unwrap_or_default();
            writeln!(csv, "{},{},{},{},{}", l.level, l.atoms, l.max_edge, l.residual, ratio)?;
        }
        fs::write(out.join("convergence.csv"), csv)?;
    }

    let energy = match &energy_cfg {
        Some(cfg) => {
            let coeffs = cfg.coefficients();
            let mut fam = StratifiedFamily::new(mesh.ambient_dim());
            let p = *coeffs.p.get(k.wrapping_sub(1)).ok_or_else(|| InputError(format!("config has no entry for k = {k}")))?;
            fam.insert(Stratum { varifold: main.v.clone(), curvature: main.a.clone(), boundary: main.b.clone(), exponent: p })?;
            Some(varifold_energy(&fam, &coeffs)?)
        }
        None => None,
    };

    io::write_json(&out.join("varifold.json"), &VarifoldDump::new(&main.v, Some(&main.a), Some(&main.b)))?;
    let d = main.v.ambient_dim();
    let mut csv = String::from("atom");
    for i in 0..d {
        write!(csv, ",x{i}")?;
    }
    csv.push_str(",weight,mean_curvature,a_norm,isolated\n");
    for (i, (atom, t)) in main.v.atoms().iter().zip(&main.a.tensors).enumerate() {
        write!(csv, "{i}")?;
        for x in atom.x.iter() {
            write!(csv, ",{x}")?;
        }
        writeln!(csv, ",{},{},{},{}", atom.weight, t.mean_curvature().norm(), t.norm(), main.a.isolated[i])?;
    }
    fs::write(out.join("curvature.csv"), csv)?;
    let mut csv = String::new();
    let cols: Vec<String> = (0..d).map(|i| format!("x{i}")).chain((0..d).map(|i| format!("b{i}"))).collect();
    writeln!(csv, "{}", cols.join(","))?;
    for atom in &main.b.atoms {
        let vals: Vec<String> = atom.x.iter().chain(atom.b.iter()).map(|x| x.to_string()).collect();
        writeln!(csv, "{}", vals.join(","))?;
    }
    fs::write(out.join("boundary.csv"), csv)?;

    let final_residual = convergence.last().map_or(main.residual, |l| l.residual);
    let passed = args.common.tol.map_or(true, |t| final_residual <= t);
    let report = Report {
        k,
        ambient: d,
        atoms: main.v.atoms().len(),
        mass: main.v.mass(),
        boundary_total_variation: main.b.total_variation(),
        boundary_atoms: main.b.atoms.len(),
        max_curvature_norm: main.a.max_norm(),
        max_mean_curvature: main.a.tensors.iter().map(|t| t.mean_curvature().norm()).fold(0.0, f64::max),
        isolated: main.a.n_isolated(),
        test_functions: main.tests,
        residual: main.residual,
        tolerance: args.common.tol,
        passed,
        energy,
        convergence,
    };
    io::write_json(&out.join("report.json"), &report)?;
    manifest::write(
        out,
        &crate::Command::VarifoldAnalyze(args.clone()),
        vec![io::absolute(&args.mesh)?],
        args.common.seed.unwrap_or(0),
    )?;
    Ok(if passed { EXIT_OK } else { EXIT_NEGATIVE })
}
