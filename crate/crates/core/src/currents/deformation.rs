use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{SimplexId, SimplicialComplex};

/// Continuous piecewise-affine map on a (possibly split) full-dimensional
/// mesh; jumps live on duplicated-node faces.
#[derive(Clone, Debug)]
pub struct DeformationField {
    mesh: SimplicialComplex,
    values: Vec<DVector<f64>>,
    gradients: Vec<DMatrix<f64>>,
    offsets: Vec<DVector<f64>>,
    duplicated_pairs: Vec<[usize; 2]>,
    bound: Option<f64>,
}

/// Serialized deformation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeformationDump {
    pub nodes: Vec<Vec<f64>>,
    pub values: Vec<Vec<f64>>,
    #[serde(default)]
    pub duplicated_pairs: Vec<[usize; 2]>,
}

impl DeformationField {
    pub fn new(mesh: SimplicialComplex, values: Vec<DVector<f64>>) -> Result<Self> {
        let d = mesh.ambient_dim();
        if mesh.top_dim() != d {
            return Err(Error::MeshError(format!("deformations need a {d}-dimensional mesh")));
        }
        if values.len() != mesh.n_vertices() || values.iter().any(|v| v.len() != d) {
            return Err(Error::MeshError(format!(
                "{} nodal values for {} nodes in R^{d}",
                values.len(),
                mesh.n_vertices()
            )));
        }
        let mut gradients = Vec::with_capacity(mesh.n_simplices(d));
        let mut offsets = Vec::with_capacity(mesh.n_simplices(d));
        for s in mesh.simplices(d) {
            let p0 = mesh.vertex(s[0]);
            let e = DMatrix::from_fn(d, d, |i, j| mesh.vertex(s[j + 1])[i] - p0[i]);
            let du = DMatrix::from_fn(d, d, |i, j| values[s[j + 1]][i] - values[s[0]][i]);
            let inv = e
                .try_inverse()
                .ok_or_else(|| Error::DegenerateSimplex { dim: d, vertices: s.clone(), measure: 0.0 })?;
            let g = du * inv;
            offsets.push(&values[s[0]] - &g * p0);
            gradients.push(g);
        }
        Ok(Self { mesh, values, gradients, offsets, duplicated_pairs: Vec::new(), bound: None })
    }

    pub fn from_fn<F: Fn(&DVector<f64>) -> DVector<f64>>(mesh: SimplicialComplex, f: F) -> Result<Self> {
        let values = mesh.vertices().iter().map(f).collect();
        Self::new(mesh, values)
    }

    pub fn identity(mesh: SimplicialComplex) -> Result<Self> {
        Self::from_fn(mesh, |x| x.clone())
    }

    pub fn with_duplicated_pairs(mut self, pairs: Vec<[usize; 2]>) -> Result<Self> {
        let n = self.mesh.n_vertices();
        if let Some(p) = pairs.iter().find(|p| p[0] >= n || p[1] >= n) {
            return Err(Error::IdError { what: "duplicated node", id: p[0].max(p[1]) });
        }
        self.duplicated_pairs = pairs;
        Ok(self)
    }

    /// Attach the essential bound `K` on `|u|`.
    pub fn with_bound(mut self, k: f64) -> Self {
        self.bound = Some(k);
        self
    }

    pub fn from_dump(mesh: SimplicialComplex, dump: &DeformationDump) -> Result<Self> {
        if dump.nodes.len() != mesh.n_vertices() {
            return Err(Error::MeshError(format!(
                "deformation has {} nodes, mesh has {}",
                dump.nodes.len(),
                mesh.n_vertices()
            )));
        }
        for (i, n) in dump.nodes.iter().enumerate() {
            let v = mesh.vertex(i);
            if n.len() != v.len() || n.iter().zip(v.iter()).any(|(a, b)| (a - b).abs() > 1e-9 * (1.0 + b.abs())) {
                return Err(Error::MeshError(format!("node {i} does not match the mesh vertex")));
            }
        }
        let values = dump.values.iter().map(|v| DVector::from_vec(v.clone())).collect();
        Self::new(mesh, values)?.with_duplicated_pairs(dump.duplicated_pairs.clone())
    }

    pub fn to_dump(&self) -> DeformationDump {
        DeformationDump {
            nodes: self.mesh.vertices().iter().map(|v| v.iter().copied().collect()).collect(),
            values: self.values.iter().map(|v| v.iter().copied().collect()).collect(),
            duplicated_pairs: self.duplicated_pairs.clone(),
        }
    }

    pub fn mesh(&self) -> &SimplicialComplex {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.mesh.ambient_dim()
    }

    pub fn values(&self) -> &[DVector<f64>] {
        &self.values
    }

    pub fn n_elements(&self) -> usize {
        self.gradients.len()
    }

    pub fn gradient(&self, e: usize) -> &DMatrix<f64> {
        &self.gradients[e]
    }

    pub fn gradients(&self) -> &[DMatrix<f64>] {
        &self.gradients
    }

    /// `u(x) = offset + Du x` on element `e`.
    pub fn offset(&self, e: usize) -> &DVector<f64> {
        &self.offsets[e]
    }

    pub fn eval_on(&self, e: usize, x: &DVector<f64>) -> DVector<f64> {
        &self.offsets[e] + &self.gradients[e] * x
    }

    pub fn duplicated_pairs(&self) -> &[[usize; 2]] {
        &self.duplicated_pairs
    }

    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    pub fn element_volume(&self, e: usize) -> f64 {
        let d = self.dim();
        self.mesh.simplex_measure(SimplexId::new(d, e)).map(|m| m.value()).unwrap_or(0.0)
    }

    pub fn element_points(&self, e: usize) -> Vec<&DVector<f64>> {
        let d = self.dim();
        self.mesh.simplices(d)[e].iter().map(|&v| self.mesh.vertex(v)).collect()
    }

    pub fn min_det(&self) -> f64 {
        self.gradients.iter().map(|g| g.determinant()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest operator norm of `Du` over elements.
    pub fn lipschitz(&self) -> f64 {
        self.gradients
            .iter()
            .map(|g| g.clone().singular_values().max())
            .fold(0.0, f64::max)
    }

    /// Node each copy was duplicated from (the root of the copy chain).
    pub fn root_nodes(&self) -> Vec<usize> {
        let mut root: Vec<usize> = (0..self.mesh.n_vertices()).collect();
        for p in &self.duplicated_pairs {
            root[p[1]] = p[0];
        }
        for i in 0..root.len() {
            let mut r = i;
            while root[r] != r {
                r = root[r];
            }
            root[i] = r;
        }
        root
    }

    /// Boundary `(d-1)`-faces of the body proper, excluding the two sides of
    /// duplicated (cracked) faces.
    pub fn outer_boundary_faces(&self) -> Vec<usize> {
        let d = self.dim();
        let root = self.root_nodes();
        let faces = self.mesh.boundary_faces();
        let key = |f: usize| {
            let mut k: Vec<usize> = self.mesh.simplices(d - 1)[f].iter().map(|&v| root[v]).collect();
            k.sort_unstable();
            k
        };
        let mut count: HashMap<Vec<usize>, usize> = HashMap::new();
        for &f in &faces {
            *count.entry(key(f)).or_default() += 1;
        }
        faces.into_iter().filter(|&f| count[&key(f)] == 1).collect()
    }

    /// Element containing `x`, if any.
    pub fn locate(&self, x: &DVector<f64>) -> Option<usize> {
        let d = self.dim();
        (0..self.n_elements()).find(|&e| {
            let pts = self.element_points(e);
            let m = DMatrix::from_fn(d, d, |i, j| pts[j + 1][i] - pts[0][i]);
            match m.try_inverse() {
                Some(inv) => {
                    let l = inv * (x - pts[0]);
                    let tol = -1e-12;
                    l.iter().all(|v| *v >= tol) && l.sum() <= 1.0 - tol
                }
                None => false,
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{rectangle, Diagonals};

    #[test]
    fn affine_maps_have_exact_gradients() {
        let mesh = rectangle(3, 2, 1.0, 1.0, Diagonals::Alternating).unwrap();
        let a = DMatrix::from_row_slice(2, 2, &[1.2, 0.3, -0.1, 0.9]);
        let b = DVector::from_vec(vec![0.5, -2.0]);
        let u = DeformationField::from_fn(mesh, |x| &a * x + &b).unwrap();
        for e in 0..u.n_elements() {
            assert!((u.gradient(e) - &a).norm() < 1e-13);
            assert!((u.offset(e) - &b).norm() < 1e-13);
        }
        assert_eq!(u.outer_boundary_faces().len(), 10);
    }

    #[test]
    fn dump_round_trip_and_mismatch() {
        let mesh = rectangle(2, 2, 1.0, 1.0, Diagonals::Uniform).unwrap();
        let u = DeformationField::identity(mesh.clone()).unwrap();
        let text = serde_json::to_string(&u.to_dump()).unwrap();
        let back: DeformationDump = serde_json::from_str(&text).unwrap();
        assert!(DeformationField::from_dump(mesh, &back).is_ok());
        let other = rectangle(3, 2, 1.0, 1.0, Diagonals::Uniform).unwrap();
        assert!(matches!(DeformationField::from_dump(other, &back), Err(Error::MeshError(_))));
    }
}
