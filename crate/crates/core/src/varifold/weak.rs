use nalgebra::{DMatrix, DVector};

use crate::sum::CompensatedSum;

use super::{BoundaryMeasure, CurvatureField, DiscreteVarifold};

/// Smooth function on the Grassmann bundle with evaluable first derivatives.
pub trait BundleFunction: Sync {
    fn value(&self, x: &DVector<f64>, pi: &DMatrix<f64>) -> f64;
    fn grad_x(&self, x: &DVector<f64>, pi: &DMatrix<f64>) -> DVector<f64>;
    /// Derivative with respect to each entry of `Π`, entries treated as independent.
    fn grad_pi(&self, x: &DVector<f64>, pi: &DMatrix<f64>) -> DMatrix<f64>;
}

/// `φ(x, Π) = (a·x + c) · bump(x) · (q0 + <Q, Π>)` with the optional bump
/// `(1 - |x - center|² / radius²)³` cut off at `radius`.
#[derive(Clone, Debug)]
pub struct PolynomialTest {
    pub linear: DVector<f64>,
    pub offset: f64,
    pub bump: Option<(DVector<f64>, f64)>,
    pub pi_linear: DMatrix<f64>,
    pub pi_const: f64,
}

const BUMP_POWER: i32 = 3;

impl PolynomialTest {
    /// Constant 1 in `R^d`.
    pub fn one(d: usize) -> Self {
        Self {
            linear: DVector::zeros(d),
            offset: 1.0,
            bump: None,
            pi_linear: DMatrix::zeros(d, d),
            pi_const: 1.0,
        }
    }

    /// Coordinate function `x_i`.
    pub fn coordinate(d: usize, i: usize) -> Self {
        let mut t = Self::one(d);
        t.offset = 0.0;
        t.linear[i] = 1.0;
        t
    }

    pub fn with_bump(mut self, center: DVector<f64>, radius: f64) -> Self {
        self.bump = Some((center, radius));
        self
    }

    /// Replace the Grassmann factor by `Π_{jl}`.
    pub fn with_pi_entry(mut self, j: usize, l: usize) -> Self {
        self.pi_const = 0.0;
        self.pi_linear.fill(0.0);
        self.pi_linear[(j, l)] = 1.0;
        self
    }

    fn spatial(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let aff = self.linear.dot(x) + self.offset;
        let mut grad = self.linear.clone();
        let mut val = aff;
        if let Some((c, r)) = &self.bump {
            let dx = x - c;
            let s = 1.0 - dx.norm_squared() / (r * r);
            if s <= 0.0 {
                return (0.0, DVector::zeros(x.len()));
            }
            let b = s.powi(BUMP_POWER);
            let db = dx * (-2.0 * BUMP_POWER as f64 * s.powi(BUMP_POWER - 1) / (r * r));
            grad = grad * b + db * aff;
            val = aff * b;
        }
        (val, grad)
    }

    fn grassmann(&self, pi: &DMatrix<f64>) -> f64 {
        self.pi_const + self.pi_linear.dot(pi)
    }
}

impl BundleFunction for PolynomialTest {
    fn value(&self, x: &DVector<f64>, pi: &DMatrix<f64>) -> f64 {
        self.spatial(x).0 * self.grassmann(pi)
    }

    fn grad_x(&self, x: &DVector<f64>, pi: &DMatrix<f64>) -> DVector<f64> {
        self.spatial(x).1 * self.grassmann(pi)
    }

    fn grad_pi(&self, x: &DVector<f64>, _pi: &DMatrix<f64>) -> DMatrix<f64> {
        &self.pi_linear * self.spatial(x).0
    }
}

/// Products of `{1, x_i}` with `{1, Π_jl (j <= l)}`.
pub fn linear_family(d: usize) -> Vec<PolynomialTest> {
    let mut spatial = vec![PolynomialTest::one(d)];
    spatial.extend((0..d).map(|i| PolynomialTest::coordinate(d, i)));
    let mut out = Vec::new();
    for s in &spatial {
        out.push(s.clone());
        for j in 0..d {
            for l in j..d {
                out.push(s.clone().with_pi_entry(j, l));
            }
        }
    }
    out
}

/// Bumps of radius `radius` at each centre, times `{1, x_i}` and `{1, Π_jl}`.
pub fn bump_family(d: usize, centers: &[DVector<f64>], radius: f64) -> Vec<PolynomialTest> {
    let mut out = Vec::new();
    for c in centers {
        for s in linear_family(d) {
            out.push(s.with_bump(c.clone(), radius));
        }
    }
    out
}

/// Linear family plus bumps at `centers` atoms spread evenly through the
/// atom list, with radius `0.3` times the diameter of the atom bounding box.
pub fn atom_bump_family(v: &DiscreteVarifold, centers: usize) -> Vec<PolynomialTest> {
    let d = v.ambient_dim();
    let atoms = v.atoms();
    let mut out = linear_family(d);
    if atoms.is_empty() || centers == 0 {
        return out;
    }
    let mut lo = atoms[0].x.clone();
    let mut hi = atoms[0].x.clone();
    for a in atoms {
        lo = lo.inf(&a.x);
        hi = hi.sup(&a.x);
    }
    let radius = 0.3 * (hi - lo).norm();
    if radius <= 0.0 {
        return out;
    }
    let picks: Vec<DVector<f64>> =
        (0..centers.min(atoms.len())).map(|i| atoms[i * atoms.len() / centers.min(atoms.len())].x.clone()).collect();
    out.extend(bump_family(d, &picks, radius));
    out
}

/// Worst normalized defect of the weak first-variation identity over a test
/// family: `max |∫(Π_ij D_jφ + A_ijl ∂φ/∂Π_jl + H_i φ) dV + ∫φ d∂V^i| / (1 + ‖φ‖_C¹)`.
pub fn weak_identity_residual<F: BundleFunction>(
    v: &DiscreteVarifold,
    curvature: &CurvatureField,
    boundary: &BoundaryMeasure,
    family: &[F],
) -> f64 {
    family
        .iter()
        .map(|phi| single_residual(v, curvature, boundary, phi))
        .fold(0.0, f64::max)
}

fn single_residual<F: BundleFunction>(
    v: &DiscreteVarifold,
    curvature: &CurvatureField,
    boundary: &BoundaryMeasure,
    phi: &F,
) -> f64 {
    let d = v.ambient_dim();
    let mut acc = vec![CompensatedSum::new(); d];
    let mut c1: f64 = 0.0;
    for (atom, a) in v.atoms().iter().zip(&curvature.tensors) {
        let p = atom.plane.proj();
        let val = phi.value(&atom.x, p);
        let gx = phi.grad_x(&atom.x, p);
        let gp = phi.grad_pi(&atom.x, p);
        c1 = c1.max(val.abs() + gx.norm() + gp.norm());
        let h = a.mean_curvature();
        for (i, slot) in acc.iter_mut().enumerate() {
            let mut local = (p.row(i) * &gx)[0] + h[i] * val;
            for j in 0..d {
                for l in 0..d {
                    local += a.get(i, j, l) * gp[(j, l)];
                }
            }
            slot.add(atom.weight * local);
        }
    }
    for b in &boundary.atoms {
        let p = b.plane.proj();
        let val = phi.value(&b.x, p);
        let gx = phi.grad_x(&b.x, p);
        let gp = phi.grad_pi(&b.x, p);
        c1 = c1.max(val.abs() + gx.norm() + gp.norm());
        for (i, slot) in acc.iter_mut().enumerate() {
            slot.add(val * b.b[i]);
        }
    }
    acc.iter().map(|s| s.value().abs()).fold(0.0, f64::max) / (1.0 + c1)
}
