use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GrassmannPoint;

use super::{BoundaryAtom, BoundaryMeasure, CurvatureField, CurvatureTensor, DiscreteVarifold, VarifoldAtom};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomJson {
    pub x: Vec<f64>,
    pub pi: Vec<Vec<f64>>,
    pub w: f64,
    pub theta: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryAtomJson {
    pub x: Vec<f64>,
    pub pi: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

/// Serialized varifold with optional curvature and boundary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VarifoldDump {
    pub k: usize,
    pub atoms: Vec<AtomJson>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<Vec<Vec<f64>>>>>,
    #[serde(rename = "dV", default, skip_serializing_if = "Option::is_none")]
    pub dv: Option<Vec<BoundaryAtomJson>>,
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn rows_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionError("projection matrix is not square".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn plane_from_rows(rows: &[Vec<f64>], k: usize) -> Result<GrassmannPoint> {
    GrassmannPoint::from_projection(rows_matrix(rows)?, k)
}

impl VarifoldDump {
    pub fn new(v: &DiscreteVarifold, curvature: Option<&CurvatureField>, boundary: Option<&BoundaryMeasure>) -> Self {
        Self {
            k: v.k(),
            atoms: v
                .atoms()
                .iter()
                .map(|a| AtomJson {
                    x: a.x.iter().copied().collect(),
                    pi: matrix_rows(a.plane.proj()),
                    w: a.weight,
                    theta: a.theta,
                })
                .collect(),
            a: curvature.map(|c| c.tensors.iter().map(CurvatureTensor::to_nested).collect()),
            dv: boundary.map(|b| {
                b.atoms
                    .iter()
                    .map(|a| BoundaryAtomJson {
                        x: a.x.iter().copied().collect(),
                        pi: matrix_rows(a.plane.proj()),
                        b: a.b.iter().copied().collect(),
                    })
                    .collect()
            }),
        }
    }

    pub fn to_varifold(&self) -> Result<DiscreteVarifold> {
        let d = self.atoms.first().map(|a| a.x.len()).unwrap_or(self.k + 1);
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                Ok(VarifoldAtom {
                    x: DVector::from_vec(a.x.clone()),
                    plane: plane_from_rows(&a.pi, self.k)?,
                    weight: a.w,
                    theta: a.theta,
                    simplex: 0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteVarifold::from_atoms(self.k, d, atoms)
    }

    pub fn curvature(&self) -> Result<Option<CurvatureField>> {
        let Some(a) = &self.a else { return Ok(None) };
        let tensors = a.iter().map(|t| CurvatureTensor::from_nested(t)).collect::<Result<Vec<_>>>()?;
        let n = tensors.len();
        Ok(Some(CurvatureField { tensors, isolated: vec![false; n] }))
    }

    pub fn boundary(&self) -> Result<Option<BoundaryMeasure>> {
        let Some(dv) = &self.dv else { return Ok(None) };
        let atoms = dv
            .iter()
            .map(|a| {
                Ok(BoundaryAtom {
                    x: DVector::from_vec(a.x.clone()),
                    plane: plane_from_rows(&a.pi, self.k)?,
                    b: DVector::from_vec(a.b.clone()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(BoundaryMeasure { atoms }))
    }
}
