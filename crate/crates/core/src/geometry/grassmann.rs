use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A point of the Grassmannian of `k`-planes in `R^d`, stored as the
/// orthogonal projection onto the plane together with an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannPoint {
    proj: DMatrix<f64>,
    basis: DMatrix<f64>,
}

impl GrassmannPoint {
    /// Plane spanned by the columns of `spanning` (Gram–Schmidt with
    /// re-orthogonalization). Fails when the vectors are numerically dependent.
    pub fn from_spanning(spanning: &[DVector<f64>]) -> Result<Self> {
        let d = spanning
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::DimensionError("empty spanning set".into()))?;
        let scale = spanning.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(spanning.len());
        for v in spanning {
            if v.len() != d {
                return Err(Error::DimensionError("spanning vectors differ in length".into()));
            }
            let mut w = v.clone();
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dot(&w);
                    w.axpy(-c, q, 1.0);
                }
            }
            let n = w.norm();
            if n <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::DegenerateSimplex {
                    dim: spanning.len(),
                    vertices: vec![],
                    measure: n,
                });
            }
            basis.push(w / n);
        }
        let basis = DMatrix::from_columns(&basis);
        Ok(Self::from_orthonormal(basis))
    }

    /// Plane with the given orthonormal basis (columns).
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        let mut proj = &basis * basis.transpose();
        // exact symmetry
        let d = proj.nrows();
        for i in 0..d {
            for j in (i + 1)..d {
                let m = 0.5 * (proj[(i, j)] + proj[(j, i)]);
                proj[(i, j)] = m;
                proj[(j, i)] = m;
            }
        }
        Self { proj, basis }
    }

    /// Recover a plane from a projection matrix of rank `k`.
    pub fn from_projection(proj: DMatrix<f64>, k: usize) -> Result<Self> {
        let d = proj.nrows();
        if proj.ncols() != d || k > d {
            return Err(Error::DimensionError(format!("{}x{} projection of rank {k}", d, proj.ncols())));
        }
        let eig = nalgebra::SymmetricEigen::new(proj.clone());
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let cols: Vec<DVector<f64>> = order[..k].iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
        let basis = if k == 0 { DMatrix::zeros(d, 0) } else { DMatrix::from_columns(&cols) };
        let candidate = Self::from_orthonormal(basis);
        if (&candidate.proj - &proj).norm() > 1e-8 {
            return Err(Error::Invalid("matrix is not an orthogonal projection of the stated rank".into()));
        }
        Ok(Self { proj, basis: candidate.basis })
    }

    pub fn proj(&self) -> &DMatrix<f64> {
        &self.proj
    }

    /// Orthonormal basis of the plane, `d x k`.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn k(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.proj.nrows()
    }

    /// Symmetry, idempotence and trace residuals.
    pub fn invariant_residuals(&self) -> (f64, f64, f64) {
        let p = &self.proj;
        let sym = (p - p.transpose()).norm();
        let idem = (p * p - p).norm();
        let trace = (p.trace() - self.k() as f64).abs();
        (sym, idem, trace)
    }

    pub fn satisfies_invariants(&self) -> bool {
        let (s, i, t) = self.invariant_residuals();
        s <= 1e-12 && i <= 1e-10 && t <= 1e-10
    }
}
