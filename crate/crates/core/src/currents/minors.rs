use nalgebra::DMatrix;

/// `M(F) = (F, adj F, det F)` for `d = 3` and `(F, det F)` for `d = 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorsVector {
    pub gradient: DMatrix<f64>,
    pub adjugate: Option<DMatrix<f64>>,
    pub det: f64,
}

/// Adjugate (transposed cofactor matrix) of a 2x2 or 3x3 matrix.
pub fn adjugate(f: &DMatrix<f64>) -> DMatrix<f64> {
    let d = f.nrows();
    match d {
        1 => DMatrix::from_element(1, 1, 1.0),
        2 => DMatrix::from_row_slice(2, 2, &[f[(1, 1)], -f[(0, 1)], -f[(1, 0)], f[(0, 0)]]),
        _ => DMatrix::from_fn(d, d, |i, j| {
            // cofactor (j, i)
            let minor = f.clone().remove_row(j).remove_column(i);
            let s = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            s * minor.determinant()
        }),
    }
}

/// Cofactor matrix `cof F = (adj F)^T`.
pub fn cofactor(f: &DMatrix<f64>) -> DMatrix<f64> {
    adjugate(f).transpose()
}

pub fn minors(f: &DMatrix<f64>) -> MinorsVector {
    let d = f.nrows();
    MinorsVector {
        gradient: f.clone(),
        adjugate: if d >= 3 { Some(adjugate(f)) } else { None },
        det: f.determinant(),
    }
}

impl MinorsVector {
    pub fn flatten(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.gradient.iter().copied().collect();
        if let Some(a) = &self.adjugate {
            out.extend(a.iter().copied());
        }
        out.push(self.det);
        out
    }

    pub fn norm(&self) -> f64 {
        self.flatten().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}
