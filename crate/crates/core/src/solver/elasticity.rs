use nalgebra::{DMatrix, DVector};

use crate::currents::DeformationField;
use crate::energy::BulkEnergyDensity;
use crate::error::{Error, Result};
use crate::geometry::SplitMesh;
use crate::sum::CompensatedSum;

/// Prescribed positions `u` on base-mesh nodes; every copy of a node
/// receives the same value.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletData {
    pub nodes: Vec<usize>,
    pub values: Vec<DVector<f64>>,
}

impl DirichletData {
    pub fn new(nodes: Vec<usize>, values: Vec<DVector<f64>>) -> Result<Self> {
        if nodes.len() != values.len() || nodes.is_empty() {
            return Err(Error::Invalid("boundary data needs one value per node and at least one node".into()));
        }
        Ok(Self { nodes, values })
    }

    /// Prescribed value per split-mesh node.
    pub fn on_split(&self, split: &SplitMesh) -> Result<Vec<Option<DVector<f64>>>> {
        let n_base = split.parent.iter().copied().max().map_or(0, |m| m + 1);
        if let Some(&bad) = self.nodes.iter().find(|&&n| n >= n_base) {
            return Err(Error::IdError { what: "boundary node", id: bad });
        }
        let mut by_base: Vec<Option<&DVector<f64>>> = vec![None; n_base];
        for (n, v) in self.nodes.iter().zip(&self.values) {
            by_base[*n] = Some(v);
        }
        Ok(split.parent.iter().map(|&p| by_base[p].cloned()).collect())
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct ElasticityOptions {
    /// Stop when the largest free gradient entry is below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Nodal bound `|u| <= K`.
    pub k_bound: f64,
}

impl Default for ElasticityOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 60, k_bound: 100.0 }
    }
}

#[derive(Clone, Debug)]
pub struct ElasticitySolution {
    pub u: DeformationField,
    pub bulk: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

struct Element {
    nodes: Vec<usize>,
    grads: DMatrix<f64>,
    vol: f64,
}

struct Assembly<'a, D: ?Sized> {
    d: usize,
    elems: Vec<Element>,
    dof: Vec<Option<usize>>,
    n_dof: usize,
    density: &'a D,
}

impl<'a, D: BulkEnergyDensity + ?Sized> Assembly<'a, D> {
    fn new(split: &SplitMesh, fixed: &[bool], density: &'a D) -> Result<Self> {
        let mesh = &split.mesh;
        let d = mesh.ambient_dim();
        let mut elems = Vec::with_capacity(mesh.n_simplices(d));
        for s in mesh.simplices(d) {
            let p0 = mesh.vertex(s[0]);
            let e = DMatrix::from_fn(d, d, |i, j| mesh.vertex(s[j + 1])[i] - p0[i]);
            let vol = e.determinant().abs() / (1..=d).product::<usize>() as f64;
            let inv = e
                .try_inverse()
                .ok_or_else(|| Error::DegenerateSimplex { dim: d, vertices: s.clone(), measure: 0.0 })?;
            // row n: gradient of the hat function of local node n
            let mut grads = DMatrix::zeros(d + 1, d);
            for n in 1..=d {
                for j in 0..d {
                    grads[(n, j)] = inv[(n - 1, j)];
                    grads[(0, j)] -= inv[(n - 1, j)];
                }
            }
            elems.push(Element { nodes: s.clone(), grads, vol });
        }
        let mut dof = vec![None; mesh.n_vertices()];
        let mut n_dof = 0;
        for (v, slot) in dof.iter_mut().enumerate() {
            if !fixed[v] {
                *slot = Some(n_dof);
                n_dof += d;
            }
        }
        Ok(Self { d, elems, dof, n_dof, density })
    }

    fn gradient_of(&self, el: &Element, u: &[DVector<f64>]) -> DMatrix<f64> {
        let d = self.d;
        DMatrix::from_fn(d, d, |i, j| el.nodes.iter().enumerate().map(|(n, &v)| u[v][i] * el.grads[(n, j)]).sum())
    }

    fn energy(&self, u: &[DVector<f64>]) -> f64 {
        let mut acc = CompensatedSum::new();
        let k = (self.d + 1) as f64;
        for el in &self.elems {
            let f = self.gradient_of(el, u);
            let e = self.density.stored(&f);
            if !e.is_finite() {
                return f64::INFINITY;
            }
            let ub = el.nodes.iter().fold(DVector::zeros(self.d), |a, &v| a + &u[v]) / k;
            acc.add(el.vol * (e - self.density.body_force(&ub)));
        }
        acc.value()
    }

    fn gradient_and_hessian(&self, u: &[DVector<f64>]) -> (DVector<f64>, DMatrix<f64>) {
        let d = self.d;
        let mut g = DVector::zeros(self.n_dof);
        let mut h = DMatrix::zeros(self.n_dof, self.n_dof);
        let k = (d + 1) as f64;
        for el in &self.elems {
            let f = self.gradient_of(el, u);
            let p = self.density.stress(&f);
            let t = self.density.tangent(&f);
            let ub = el.nodes.iter().fold(DVector::zeros(d), |a, &v| a + &u[v]) / k;
            let gw = self.density.body_force_gradient(&ub);
            for (a, &va) in el.nodes.iter().enumerate() {
                let Some(da) = self.dof[va] else { continue };
                for i in 0..d {
                    let mut s = -gw[i] / k;
                    for j in 0..d {
                        s += p[(i, j)] * el.grads[(a, j)];
                    }
                    g[da + i] += el.vol * s;
                }
                for (b, &vb) in el.nodes.iter().enumerate() {
                    let Some(db) = self.dof[vb] else { continue };
                    for i in 0..d {
                        for kk in 0..d {
                            let mut s = 0.0;
                            for j in 0..d {
                                for l in 0..d {
                                    s += t[(i * d + j, kk * d + l)] * el.grads[(a, j)] * el.grads[(b, l)];
                                }
                            }
                            h[(da + i, db + kk)] += el.vol * s;
                        }
                    }
                }
            }
        }
        (g, h)
    }

    fn apply(&self, u: &[DVector<f64>], step: &DVector<f64>, alpha: f64, k_bound: f64) -> Vec<DVector<f64>> {
        let mut out = u.to_vec();
        for (v, slot) in self.dof.iter().enumerate() {
            if let Some(base) = slot {
                for i in 0..self.d {
                    out[v][i] += alpha * step[base + i];
                }
                let n = out[v].norm();
                if n > k_bound {
                    out[v] *= k_bound / n;
                }
            }
        }
        out
    }
}

fn newton<D: BulkEnergyDensity + ?Sized>(
    asm: &Assembly<D>,
    mut u: Vec<DVector<f64>>,
    opts: &ElasticityOptions,
) -> Result<(Vec<DVector<f64>>, f64, usize, f64)> {
    let mut e0 = asm.energy(&u);
    if !e0.is_finite() {
        return Err(Error::StepFailure { step: 0, reason: "initial guess inverts an element".into() });
    }
    if asm.n_dof == 0 {
        return Ok((u, e0, 0, 0.0));
    }
    let mut gnorm = f64::INFINITY;
    for it in 0..opts.max_iter {
        let (g, h) = asm.gradient_and_hessian(&u);
        gnorm = g.amax();
        if gnorm <= opts.tol {
            return Ok((u, e0, it, gnorm));
        }
        let scale = (0..h.nrows()).map(|i| h[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
        let mut shift = 0.0;
        let chol = loop {
            let mut hs = h.clone();
            for i in 0..hs.nrows() {
                hs[(i, i)] += shift;
            }
            if let Some(c) = hs.cholesky() {
                break c;
            }
            shift = if shift == 0.0 { 1e-10 * scale } else { shift * 10.0 };
            if shift > 1e6 * scale {
                return Err(Error::StepFailure { step: it, reason: "no positive definite Levenberg shift".into() });
            }
        };
        let dir = -chol.solve(&g);
        let slope = g.dot(&dir);
        let mut alpha = 1.0;
        loop {
            let trial = asm.apply(&u, &dir, alpha, opts.k_bound);
            let e1 = asm.energy(&trial);
            if e1.is_finite() && e1 <= e0 + 1e-4 * alpha * slope {
                u = trial;
                e0 = e1;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-10 {
                if gnorm <= opts.tol.sqrt() * 1e-2 {
                    // rounding floor of the energy reached
                    return Ok((u, e0, it, gnorm));
                }
                return Err(Error::StepFailure {
                    step: it,
                    reason: format!("line search failed to keep det > 0 with decrease (|g| = {gnorm:e})"),
                });
            }
        }
    }
    if gnorm <= opts.tol.sqrt() {
        return Ok((u, e0, opts.max_iter, gnorm));
    }
    Err(Error::StepFailure { step: opts.max_iter, reason: format!("Newton did not converge (|g| = {gnorm:e})") })
}

/// Minimize the bulk energy on a split mesh under Dirichlet data, starting
/// from `initial` (per split node). Prescribed nodes are moved to their data
/// by continuation so that no element inverts on the way.
pub fn solve_elasticity<D: BulkEnergyDensity + ?Sized>(
    split: &SplitMesh,
    bc: &DirichletData,
    density: &D,
    opts: &ElasticityOptions,
    initial: &[DVector<f64>],
) -> Result<ElasticitySolution> {
    if bc.max_norm() > opts.k_bound {
        return Err(Error::Invalid(format!("boundary data exceeds K = {}", opts.k_bound)));
    }
    let target = bc.on_split(split)?;
    let fixed: Vec<bool> = target.iter().map(Option::is_some).collect();
    let asm = Assembly::new(split, &fixed, density)?;
    if initial.len() != split.mesh.n_vertices() {
        return Err(Error::MeshError("initial guess does not match the split mesh".into()));
    }
    let start: Vec<DVector<f64>> = initial.to_vec();
    let mut current = start.clone();
    let mut t = 0.0_f64;
    let mut dt = 1.0_f64;
    let mut iterations = 0;
    let mut last = (f64::NAN, 0.0);
    while t < 1.0 {
        let t_try = (t + dt).min(1.0);
        let mut guess = current.clone();
        for (v, tv) in target.iter().enumerate() {
            if let Some(b) = tv {
                guess[v] = &start[v] + (b - &start[v]) * t_try;
            }
        }
        match newton(&asm, guess, opts) {
            Ok((u, e, it, gn)) => {
                current = u;
                t = t_try;
                iterations += it;
                last = (e, gn);
                dt = (dt * 2.0).min(1.0);
            }
            Err(err) => {
                dt *= 0.5;
                if dt < 1.0 / 4096.0 {
                    return Err(err);
                }
            }
        }
    }
    let u = DeformationField::new(split.mesh.clone(), current)?
        .with_duplicated_pairs(split.duplicated_pairs.clone())?
        .with_bound(opts.k_bound);
    Ok(ElasticitySolution { u, bulk: last.0, iterations, gradient_norm: last.1 })
}

/// Transfer nodal values between two splits of the same base mesh: each
/// new node takes the value of the old copy of its parent inside the same
/// element.
pub fn transfer_values(from: &SplitMesh, values: &[DVector<f64>], to: &SplitMesh) -> Vec<DVector<f64>> {
    let d = to.mesh.ambient_dim();
    let mut out: Vec<Option<DVector<f64>>> = vec![None; to.mesh.n_vertices()];
    for (t, s) in to.mesh.simplices(d).iter().enumerate() {
        let old = &from.mesh.simplices(d)[t];
        for &v in s {
            if out[v].is_none() {
                if let Some(&o) = old.iter().find(|&&o| from.parent[o] == to.parent[v]) {
                    out[v] = Some(values[o].clone());
                }
            }
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(v, x)| x.unwrap_or_else(|| to.mesh.vertex(v).clone()))
        .collect()
}
