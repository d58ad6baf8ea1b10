use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{GrassmannPoint, SimplexId, SimplicialComplex};
use crate::quadrature::SimplexRule;
use crate::sum;

use super::DiscreteVarifold;

/// Third-order tensor `a[i][j][l] = δ_i Π_{jl}`: tangential derivative of the
/// plane field in direction `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    d: usize,
    data: Vec<f64>,
}

impl CurvatureTensor {
    pub fn zeros(d: usize) -> Self {
        Self { d, data: vec![0.0; d * d * d] }
    }

    pub fn from_nested(a: &[Vec<Vec<f64>>]) -> Result<Self> {
        let d = a.len();
        let mut t = Self::zeros(d);
        for (i, ai) in a.iter().enumerate() {
            if ai.len() != d || ai.iter().any(|r| r.len() != d) {
                return Err(Error::DimensionError("curvature tensor is not d x d x d".into()));
            }
            for (j, aij) in ai.iter().enumerate() {
                for (l, v) in aij.iter().enumerate() {
                    t.set(i, j, l, *v);
                }
            }
        }
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize, l: usize) -> f64 {
        self.data[(i * self.d + j) * self.d + l]
    }

    pub fn set(&mut self, i: usize, j: usize, l: usize, v: f64) {
        self.data[(i * self.d + j) * self.d + l] = v;
    }

    /// Frobenius norm over all three indices.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Mean curvature vector `H_m = Σ_j a[j][m][j]`.
    pub fn mean_curvature(&self) -> DVector<f64> {
        DVector::from_fn(self.d, |m, _| (0..self.d).map(|j| self.get(j, m, j)).sum())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { d: self.d, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.d)
            .map(|i| (0..self.d).map(|j| (0..self.d).map(|l| self.get(i, j, l)).collect()).collect())
            .collect()
    }
}

/// One curvature tensor per atom of a varifold.
#[derive(Clone, Debug)]
pub struct CurvatureField {
    pub tensors: Vec<CurvatureTensor>,
    /// Atoms whose simplex had too few neighbours for a fit; their tensor is 0.
    pub isolated: Vec<bool>,
}

impl CurvatureField {
    pub fn zeros(v: &DiscreteVarifold) -> Self {
        let n = v.atoms().len();
        Self {
            tensors: vec![CurvatureTensor::zeros(v.ambient_dim()); n],
            isolated: vec![false; n],
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.tensors.iter().map(CurvatureTensor::norm).fold(0.0, f64::max)
    }

    pub fn n_isolated(&self) -> usize {
        self.isolated.iter().filter(|f| **f).count()
    }

    /// `Σ w ‖A‖^p` over the atoms of `v`.
    pub fn integral_norm_pow(&self, v: &DiscreteVarifold, p: f64) -> f64 {
        sum::sum(v.atoms().iter().zip(&self.tensors).map(|(a, t)| a.weight * t.norm().powf(p)))
    }
}

#[derive(Clone, Debug)]
pub struct BoundaryAtom {
    pub x: DVector<f64>,
    pub plane: GrassmannPoint,
    pub b: DVector<f64>,
}

/// Vector measure `∂V` on the Grassmann bundle.
#[derive(Clone, Debug, Default)]
pub struct BoundaryMeasure {
    pub atoms: Vec<BoundaryAtom>,
}

impl BoundaryMeasure {
    pub fn total_variation(&self) -> f64 {
        sum::sum(self.atoms.iter().map(|a| a.b.norm()))
    }

    /// `|∂V|` of the closed ball `B(center, radius)`.
    pub fn ball_variation(&self, center: &DVector<f64>, radius: f64) -> f64 {
        sum::sum(
            self.atoms
                .iter()
                .filter(|a| (&a.x - center).norm() <= radius)
                .map(|a| a.b.norm()),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.b.norm() == 0.0)
    }
}

/// Least-squares tangential derivative of the plane field on each top
/// simplex, fitted against every simplex sharing a vertex with it.
fn fit_simplex_tensors(support: &SimplicialComplex) -> Result<(Vec<CurvatureTensor>, Vec<bool>)> {
    let k = support.top_dim();
    let d = support.ambient_dim();
    let n = support.n_simplices(k);
    let mut planes = Vec::with_capacity(n);
    let mut centers = Vec::with_capacity(n);
    for s in 0..n {
        planes.push(support.tangent_plane(SimplexId::new(k, s))?);
        centers.push(support.barycenter(SimplexId::new(k, s))?);
    }
    let mut star: Vec<Vec<usize>> = vec![Vec::new(); support.n_vertices()];
    for (s, verts) in support.simplices(k).iter().enumerate() {
        for &v in verts {
            star[v].push(s);
        }
    }
    let mut tensors = Vec::with_capacity(n);
    let mut isolated = Vec::with_capacity(n);
    for s in 0..n {
        let mut nbrs: Vec<usize> = support.simplices(k)[s].iter().flat_map(|&v| star[v].iter().copied()).collect();
        nbrs.sort_unstable();
        nbrs.dedup();
        nbrs.retain(|&b| b != s);
        let basis = planes[s].basis();
        // design rows: tangential offsets of neighbour barycentres
        let rows = DMatrix::from_fn(nbrs.len(), k, |r, m| basis.column(m).dot(&(&centers[nbrs[r]] - &centers[s])));
        let normal = rows.transpose() * &rows;
        let chol = if nbrs.len() >= k { normal.clone().cholesky() } else { None };
        let scale = normal.trace().max(f64::MIN_POSITIVE);
        let well_posed = chol.is_some() && normal.determinant() > 1e-12 * scale.powi(k as i32);
        if !well_posed {
            tensors.push(CurvatureTensor::zeros(d));
            isolated.push(true);
            continue;
        }
        let chol = chol.unwrap();
        let mut g = vec![DMatrix::<f64>::zeros(d, d); k];
        for j in 0..d {
            for l in j..d {
                let rhs = DVector::from_fn(nbrs.len(), |r, _| planes[nbrs[r]].proj()[(j, l)] - planes[s].proj()[(j, l)]);
                let coef = chol.solve(&(rows.transpose() * rhs));
                for m in 0..k {
                    g[m][(j, l)] = coef[m];
                    g[m][(l, j)] = coef[m];
                }
            }
        }
        let mut t = CurvatureTensor::zeros(d);
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    t.set(i, j, l, (0..k).map(|m| basis[(i, m)] * g[m][(j, l)]).sum());
                }
            }
        }
        tensors.push(t);
        isolated.push(false);
    }
    Ok((tensors, isolated))
}

fn simplex_theta(v: &DiscreteVarifold, n: usize) -> Vec<u32> {
    let mut theta = vec![1; n];
    for a in v.atoms() {
        if a.simplex < n {
            theta[a.simplex] = a.theta;
        }
    }
    theta
}

fn boundary_of(v: &DiscreteVarifold, support: &SimplicialComplex) -> Result<BoundaryMeasure> {
    let k = support.top_dim();
    let theta = simplex_theta(v, support.n_simplices(k));
    let mut atoms = Vec::new();
    match k {
        1 => {
            for bv in support.boundary_vertices() {
                for (e, tau) in bv.edges.iter().zip(&bv.tangents) {
                    atoms.push(BoundaryAtom {
                        x: support.vertex(bv.vertex).clone(),
                        plane: support.tangent_plane(SimplexId::new(1, *e))?,
                        b: tau * theta[*e] as f64,
                    });
                }
            }
        }
        2 => {
            let rule = SimplexRule::segment(v.quadrature_order());
            for e in 0..support.n_simplices(1) {
                let tris = support.cofaces(1, e);
                if tris.len() % 2 == 0 {
                    continue;
                }
                let ev = support.simplices(1)[e].clone();
                let (p0, p1) = (support.vertex(ev[0]), support.vertex(ev[1]));
                let len = (p1 - p0).norm();
                let dir = (p1 - p0) / len;
                for &t in tris {
                    let opp = support.simplices(2)[t].iter().copied().find(|w| !ev.contains(w)).unwrap();
                    let w = support.vertex(opp) - p0;
                    let nu = &w - &dir * dir.dot(&w);
                    let nu = nu.normalize();
                    let plane = support.tangent_plane(SimplexId::new(2, t))?;
                    for (bary, qw) in rule.points.iter().zip(&rule.weights) {
                        let x = p0 * bary[0] + p1 * bary[1];
                        atoms.push(BoundaryAtom {
                            x,
                            plane: plane.clone(),
                            b: &nu * (qw * len * theta[t] as f64),
                        });
                    }
                }
            }
        }
        _ => {
            return Err(Error::DimensionError(format!("boundary measure of a {k}-varifold")));
        }
    }
    Ok(BoundaryMeasure { atoms })
}

/// Generalized curvature and boundary measure of a varifold carried by
/// `support`.
pub fn estimate_curvature(v: &DiscreteVarifold, support: &SimplicialComplex) -> Result<(CurvatureField, BoundaryMeasure)> {
    if v.is_empty() {
        return Ok((CurvatureField::zeros(v), BoundaryMeasure::default()));
    }
    let k = support.top_dim();
    if k != v.k() || support.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionError(format!(
            "{}-varifold in R^{} on a {k}-complex in R^{}",
            v.k(),
            v.ambient_dim(),
            support.ambient_dim()
        )));
    }
    let n = support.n_simplices(k);
    if let Some(a) = v.atoms().iter().find(|a| a.simplex >= n) {
        return Err(Error::IdError { what: "atom simplex", id: a.simplex });
    }
    let (tensors, flags) = fit_simplex_tensors(support)?;
    let field = CurvatureField {
        tensors: v.atoms().iter().map(|a| tensors[a.simplex].clone()).collect(),
        isolated: v.atoms().iter().map(|a| flags[a.simplex]).collect(),
    };
    Ok((field, boundary_of(v, support)?))
}

impl DiscreteVarifold {
    /// Curvature and boundary on the varifold's own support complex.
    pub fn estimate_curvature(&self) -> Result<(CurvatureField, BoundaryMeasure)> {
        match self.support() {
            Some(s) => estimate_curvature(self, s),
            None if self.is_empty() => Ok((CurvatureField::zeros(self), BoundaryMeasure::default())),
            None => Err(Error::MissingCurvature(self.k())),
        }
    }
}
