use crate::error::{Error, Result};

/// `β(t) = (1 - t²)²` on `|t| < 1`, zero outside, and its derivatives.
pub fn beta(t: f64, order: u8) -> f64 {
    if t.abs() >= 1.0 {
        return 0.0;
    }
    let t2 = t * t;
    match order {
        0 => 1.0 - 2.0 * t2 + t2 * t2,
        1 => -4.0 * t + 4.0 * t2 * t,
        2 => -4.0 + 12.0 * t2,
        3 => 24.0 * t,
        4 => 24.0,
        _ => 0.0,
    }
}

/// `sup |β^(n)|`.
pub fn beta_sup(order: u8) -> f64 {
    match order {
        0 => 1.0,
        1 => 8.0 / (3.0 * 3f64.sqrt()),
        2 => 8.0,
        3 | 4 => 24.0,
        _ => 0.0,
    }
}

/// `∫ β((t - c) / ρ) dt`.
pub fn beta_integral(radius: f64) -> f64 {
    16.0 / 15.0 * radius
}

/// Tensor product `Π_a β((z_a - c_a) / ρ_a)` over the coordinates of
/// `R^n`; an infinite radius makes that factor identically one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductBump {
    pub center: Vec<f64>,
    pub radius: Vec<f64>,
}

impl ProductBump {
    pub fn new(center: Vec<f64>, radius: Vec<f64>) -> Result<Self> {
        if center.len() != radius.len() {
            return Err(Error::DimensionError("bump centre and radii differ in length".into()));
        }
        if radius.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Invalid("bump radii must be positive".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn len(&self) -> usize {
        self.center.len()
    }

    pub fn is_empty(&self) -> bool {
        self.center.is_empty()
    }

    fn factor(&self, a: usize, z: f64, order: u8) -> f64 {
        let r = self.radius[a];
        if r.is_infinite() {
            return if order == 0 { 1.0 } else { 0.0 };
        }
        beta((z - self.center[a]) / r, order) * r.powi(-(order as i32))
    }

    /// Mixed partial derivative with orders `derivs` at `z`.
    pub fn eval(&self, z: &[f64], derivs: &[u8]) -> f64 {
        let mut v = 1.0;
        for a in 0..self.len() {
            v *= self.factor(a, z[a], derivs[a]);
            if v == 0.0 {
                return 0.0;
            }
        }
        v
    }

    pub fn sup(&self, derivs: &[u8]) -> f64 {
        (0..self.len())
            .map(|a| {
                let r = self.radius[a];
                if r.is_infinite() {
                    if derivs[a] == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    beta_sup(derivs[a]) * r.powi(-(derivs[a] as i32))
                }
            })
            .product()
    }

    /// Support interval of coordinate `a`.
    pub fn interval(&self, a: usize) -> (f64, f64) {
        (self.center[a] - self.radius[a], self.center[a] + self.radius[a])
    }
}

/// `coeff · ∂^derivs(bump) dz^index` with `index` strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct FormTerm {
    pub index: Vec<usize>,
    pub coeff: f64,
    pub derivs: Vec<u8>,
}

/// Terms sharing one bump (hence one support box).
#[derive(Clone, Debug, PartialEq)]
pub struct FormPiece {
    pub bump: ProductBump,
    pub terms: Vec<FormTerm>,
}

/// Compactly supported `r`-form on `R^d × R^d` (coordinates `x` then `y`)
/// with closed-form exterior derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct TestForm {
    dim: usize,
    degree: usize,
    pieces: Vec<FormPiece>,
}

/// Sign of moving `m` into sorted position within `index`, and the new index;
/// `None` when `m` already occurs.
fn wedge_front(m: usize, index: &[usize]) -> Option<(f64, Vec<usize>)> {
    if index.contains(&m) {
        return None;
    }
    let before = index.iter().filter(|&&i| i < m).count();
    let mut out = index.to_vec();
    out.insert(before, m);
    Some((if before % 2 == 0 { 1.0 } else { -1.0 }, out))
}

impl TestForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self { dim, degree, pieces: Vec::new() }
    }

    /// Single term `coeff · bump · dz^index`.
    pub fn monomial(dim: usize, bump: ProductBump, index: Vec<usize>, coeff: f64) -> Result<Self> {
        if bump.len() != 2 * dim {
            return Err(Error::DimensionError(format!("bump over R^{} for forms on R^{}", bump.len(), 2 * dim)));
        }
        if index.windows(2).any(|w| w[0] >= w[1]) || index.iter().any(|&i| i >= 2 * dim) {
            return Err(Error::Invalid(format!("multi-index {index:?} is not increasing in 0..{}", 2 * dim)));
        }
        let degree = index.len();
        let derivs = vec![0; 2 * dim];
        Ok(Self {
            dim,
            degree,
            pieces: vec![FormPiece { bump, terms: vec![FormTerm { index, coeff, derivs }] }],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn pieces(&self) -> &[FormPiece] {
        &self.pieces
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &TestForm, b: f64) -> Result<TestForm> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::DimensionError("combining forms of different type".into()));
        }
        fn scale(f: &TestForm, s: f64) -> impl Iterator<Item = FormPiece> + '_ {
            f.pieces.iter().map(move |p| FormPiece {
                bump: p.bump.clone(),
                terms: p.terms.iter().map(|t| FormTerm { coeff: t.coeff * s, ..t.clone() }).collect(),
            })
        }
        Ok(TestForm {
            dim: self.dim,
            degree: self.degree,
            pieces: scale(self, a).chain(scale(other, b)).collect(),
        })
    }

    /// Exterior derivative, exact for the bump family.
    pub fn exterior_derivative(&self) -> TestForm {
        let n = 2 * self.dim;
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut terms: Vec<FormTerm> = Vec::new();
                for t in &p.terms {
                    for m in 0..n {
                        if p.bump.radius[m].is_infinite() {
                            continue;
                        }
                        let Some((sign, index)) = wedge_front(m, &t.index) else { continue };
                        let mut derivs = t.derivs.clone();
                        derivs[m] += 1;
                        let coeff = sign * t.coeff;
                        match terms.iter_mut().find(|o| o.index == index && o.derivs == derivs) {
                            Some(o) => o.coeff += coeff,
                            None => terms.push(FormTerm { index, coeff, derivs }),
                        }
                    }
                }
                FormPiece { bump: p.bump.clone(), terms }
            })
            .collect();
        TestForm { dim: self.dim, degree: self.degree + 1, pieces }
    }

    /// Component `ω_I(z)`.
    pub fn component(&self, z: &[f64], index: &[usize]) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| p.terms.iter().filter(|t| t.index == index).map(move |t| t.coeff * p.bump.eval(z, &t.derivs)))
            .sum()
    }

    /// Upper bound on `sup_z |ω(z)|` (sum of term bounds).
    pub fn sup_norm_bound(&self) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| p.terms.iter().map(move |t| t.coeff.abs() * p.bump.sup(&t.derivs)))
            .sum()
    }
}

/// Increasing multi-indices of length `r` in `0..n`.
pub fn multi_indices(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// Family of `(d-1)`-forms: one bump per centre and radius pair, paired with
/// every increasing `(d-1)`-index.
pub fn boundary_form_family(dim: usize, bumps: &[ProductBump]) -> Result<Vec<TestForm>> {
    let mut out = Vec::new();
    for b in bumps {
        for idx in multi_indices(2 * dim, dim - 1) {
            out.push(TestForm::monomial(dim, b.clone(), idx, 1.0)?);
        }
    }
    Ok(out)
}
