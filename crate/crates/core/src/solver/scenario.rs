use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::energy::{EnergyConfig, NeoHookean};
use crate::error::{Error, Result};
use crate::geometry::shapes::{rectangle, Diagonals};
use crate::geometry::SimplicialComplex;
use crate::varifold::DiscreteVarifold;

use super::crack::CrackState;
use super::elasticity::DirichletData;
use super::quasistatic::{LoadProgram, MinimizationConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalPattern {
    Uniform,
    Alternating,
}

/// Mesh file (relative to the scenario) or a generated rectangle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeshSource {
    Path(PathBuf),
    Rectangle {
        nx: usize,
        ny: usize,
        width: f64,
        height: f64,
        #[serde(default = "default_pattern")]
        diagonals: DiagonalPattern,
    },
}

fn default_pattern() -> DiagonalPattern {
    DiagonalPattern::Alternating
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub mu: f64,
    pub lambda: f64,
    #[serde(default)]
    pub gravity: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_budget")]
    pub move_budget: usize,
    #[serde(default = "default_nucleations")]
    pub nucleations: usize,
    #[serde(default = "default_tol")]
    pub elasticity_tol: f64,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default)]
    pub resolution: Option<f64>,
    #[serde(default = "default_adm_tol")]
    pub admissibility_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            move_budget: default_budget(),
            nucleations: default_nucleations(),
            elasticity_tol: default_tol(),
            q: default_q(),
            resolution: None,
            admissibility_tol: default_adm_tol(),
        }
    }
}

fn default_budget() -> usize {
    8
}
fn default_nucleations() -> usize {
    3
}
fn default_tol() -> f64 {
    1e-9
}
fn default_q() -> f64 {
    2.0
}
fn default_adm_tol() -> f64 {
    1e-8
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

/// Dirichlet group: a node set and its displacement per step, either listed
/// or ramped linearly from zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcGroup {
    #[serde(default)]
    pub side: Option<Side>,
    #[serde(default)]
    pub nodes: Option<Vec<usize>>,
    #[serde(default)]
    pub displacements: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub ramp_to: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeList {
    pub edges: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub mesh: MeshSource,
    pub steps: usize,
    pub density: DensityConfig,
    pub energy: EnergyConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    pub bc: Vec<BcGroup>,
    #[serde(default)]
    pub initial_crack: Option<EdgeList>,
    #[serde(default)]
    pub comparison: Option<EdgeList>,
}

/// Parsed scenario with its mesh loaded.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub mesh: SimplicialComplex,
    pub mesh_path: Option<PathBuf>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parse a scenario; relative mesh paths resolve against `dir`.
    pub fn from_toml_str(text: &str, dir: &Path) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text)?;
        let (mesh, mesh_path) = match &file.mesh {
            MeshSource::Path(p) => {
                let full = dir.join(p);
                let text = std::fs::read_to_string(&full)?;
                (SimplicialComplex::from_json_str(&text)?, Some(full))
            }
            MeshSource::Rectangle { nx, ny, width, height, diagonals } => {
                let pattern = match diagonals {
                    DiagonalPattern::Uniform => Diagonals::Uniform,
                    DiagonalPattern::Alternating => Diagonals::Alternating,
                };
                (rectangle(*nx, *ny, *width, *height, pattern)?, None)
            }
        };
        let s = Self { file, mesh, mesh_path };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let f = &self.file;
        if f.steps == 0 {
            return Err(Error::Invalid("steps must be positive".into()));
        }
        if f.bc.is_empty() {
            return Err(Error::Invalid("at least one [[bc]] group is required".into()));
        }
        self.file.energy.coefficients().validate()?;
        self.config(None).validate()?;
        self.density()?;
        self.program()?;
        self.initial_crack()?;
        Ok(())
    }

    pub fn density(&self) -> Result<NeoHookean> {
        let d = &self.file.density;
        let mut nh = NeoHookean::from_lame(2, d.mu, d.lambda)?;
        if let Some(g) = &d.gravity {
            nh = nh.with_gravity(DVector::from_vec(g.clone()))?;
        }
        Ok(nh)
    }

    /// Minimization settings; `seed` overrides the energy block's seed.
    pub fn config(&self, seed: Option<u64>) -> MinimizationConfig {
        let s = &self.file.solver;
        MinimizationConfig {
            k_bound: self.file.energy.k,
            q: s.q,
            move_budget: s.move_budget,
            nucleations: s.nucleations,
            elasticity_tol: s.elasticity_tol,
            seed: seed.unwrap_or(self.file.energy.seed),
            resolution: s.resolution,
            admissibility_tol: s.admissibility_tol,
        }
    }

    fn side_nodes(&self, side: Side) -> Vec<usize> {
        let m = &self.mesh;
        let coord = |v: usize| match side {
            Side::Left | Side::Right => m.vertex(v)[0],
            Side::Bottom | Side::Top => m.vertex(v)[1],
        };
        let vals: Vec<f64> = (0..m.n_vertices()).map(coord).collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let target = if matches!(side, Side::Left | Side::Bottom) { lo } else { hi };
        let tol = 1e-9 * (hi - lo).max(1.0);
        (0..m.n_vertices()).filter(|&v| (vals[v] - target).abs() <= tol).collect()
    }

    fn group_nodes(&self, g: &BcGroup) -> Result<Vec<usize>> {
        match (&g.side, &g.nodes) {
            (Some(s), None) => Ok(self.side_nodes(*s)),
            (None, Some(n)) => {
                if let Some(&bad) = n.iter().find(|&&v| v >= self.mesh.n_vertices()) {
                    return Err(Error::IdError { what: "bc node", id: bad });
                }
                Ok(n.clone())
            }
            _ => Err(Error::Invalid("each [[bc]] group needs exactly one of `side` or `nodes`".into())),
        }
    }

    fn displacement(&self, g: &BcGroup, step: usize) -> Result<DVector<f64>> {
        let n = self.file.steps;
        let v = match (&g.displacements, &g.ramp_to) {
            (Some(list), None) => {
                if list.len() != n {
                    return Err(Error::Invalid(format!("displacements has {} rows for {n} steps", list.len())));
                }
                list[step - 1].clone()
            }
            (None, Some(end)) => end.iter().map(|x| x * step as f64 / n as f64).collect(),
            _ => return Err(Error::Invalid("each [[bc]] group needs exactly one of `displacements` or `ramp_to`".into())),
        };
        if v.len() != 2 {
            return Err(Error::DimensionError(format!("displacement of length {} in 2-D", v.len())));
        }
        Ok(DVector::from_vec(v))
    }

    /// The load program; later groups override earlier ones on shared nodes.
    pub fn program(&self) -> Result<LoadProgram> {
        let mut groups = Vec::new();
        for g in &self.file.bc {
            groups.push((g, self.group_nodes(g)?));
        }
        let mut steps = Vec::with_capacity(self.file.steps);
        for n in 1..=self.file.steps {
            let mut disp: Vec<Option<DVector<f64>>> = vec![None; self.mesh.n_vertices()];
            for (g, nodes) in &groups {
                let d = self.displacement(g, n)?;
                for &v in nodes {
                    disp[v] = Some(d.clone());
                }
            }
            let (nodes, values): (Vec<usize>, Vec<DVector<f64>>) = disp
                .into_iter()
                .enumerate()
                .filter_map(|(v, d)| d.map(|d| (v, self.mesh.vertex(v) + d)))
                .unzip();
            steps.push(DirichletData::new(nodes, values)?);
        }
        let comparison = match &self.file.comparison {
            Some(c) => Some(CrackState::from_vertex_pairs(&self.mesh, &c.edges)?.varifold(&self.mesh)?),
            None => None::<DiscreteVarifold>,
        };
        LoadProgram::new(steps, comparison)
    }

    pub fn initial_crack(&self) -> Result<CrackState> {
        match &self.file.initial_crack {
            Some(c) => CrackState::from_vertex_pairs(&self.mesh, &c.edges),
            None => Ok(CrackState::default()),
        }
    }
}
