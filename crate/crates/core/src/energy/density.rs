use nalgebra::{DMatrix, DVector};

use crate::currents::{cofactor, minors};
use crate::error::{Error, Result};

/// Stored energy `ẽ(F)`, body-force potential `w(u)` and the polyconvex
/// representative `Pe(u, ξ)` with `ẽ(F) - w(u) = Pe(u, M(F))` for `det F > 0`.
pub trait BulkEnergyDensity: Send + Sync {
    fn dim(&self) -> usize;

    /// `ẽ(F)`, `+∞` when the state is not admissible.
    fn stored(&self, f: &DMatrix<f64>) -> f64;

    fn body_force(&self, u: &DVector<f64>) -> f64;

    fn body_force_gradient(&self, u: &DVector<f64>) -> DVector<f64>;

    /// `Pe(u, ξ)` on flattened minors vectors.
    fn polyconvex(&self, u: &DVector<f64>, xi: &[f64]) -> f64;

    /// Constant `κ` such that `e + κ` satisfies the growth bound.
    fn growth_shift(&self) -> f64 {
        0.0
    }

    /// `e(u, F) = ẽ(F) - w(u)`.
    fn energy(&self, u: &DVector<f64>, f: &DMatrix<f64>) -> f64 {
        self.stored(f) - self.body_force(u)
    }

    /// First Piola stress `∂ẽ/∂F`; central differences unless overridden.
    fn stress(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        let h = 1e-6;
        DMatrix::from_fn(f.nrows(), f.ncols(), |i, j| {
            let mut fp = f.clone();
            let mut fm = f.clone();
            fp[(i, j)] += h;
            fm[(i, j)] -= h;
            (self.stored(&fp) - self.stored(&fm)) / (2.0 * h)
        })
    }

    /// `∂²ẽ/∂F∂F` with rows and columns indexed by `i * d + j`.
    fn tangent(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        let d = f.nrows();
        let h = 1e-6;
        let mut t = DMatrix::zeros(d * d, d * d);
        for k in 0..d {
            for l in 0..d {
                let mut fp = f.clone();
                let mut fm = f.clone();
                fp[(k, l)] += h;
                fm[(k, l)] -= h;
                let ds = (self.stress(&fp) - self.stress(&fm)) / (2.0 * h);
                for i in 0..d {
                    for j in 0..d {
                        t[(i * d + j, k * d + l)] = ds[(i, j)];
                    }
                }
            }
        }
        t
    }
}

/// Compressible neo-Hookean-type polyconvex density
/// `a(|F|² - d) + b(|cof F|² - d) + c(J² - 1) - (2a + 2(d-1)b + 2c) ln J`
/// with a linear body-force potential `w(u) = g · u`.
#[derive(Clone, Debug, PartialEq)]
pub struct NeoHookean {
    pub d: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub gravity: DVector<f64>,
}

impl NeoHookean {
    pub fn new(d: usize, a: f64, b: f64, c: f64) -> Result<Self> {
        if !(d == 2 || d == 3) {
            return Err(Error::DimensionError(format!("bulk density in R^{d}")));
        }
        if !(a > 0.0 && c > 0.0 && b >= 0.0) || (d == 3 && b <= 0.0) {
            return Err(Error::Invalid(format!("density constants a={a}, b={b}, c={c}")));
        }
        Ok(Self { d, a, b: if d == 2 { 0.0 } else { b }, c, gravity: DVector::zeros(d) })
    }

    /// From Lamé-like constants: `a = μ/2`, `c = λ/4`, and `b = μ/4` in 3-D.
    pub fn from_lame(d: usize, mu: f64, lambda: f64) -> Result<Self> {
        Self::new(d, mu / 2.0, if d == 3 { mu / 4.0 } else { 0.0 }, lambda / 4.0)
    }

    pub fn with_gravity(mut self, g: DVector<f64>) -> Result<Self> {
        if g.len() != self.d {
            return Err(Error::DimensionError("gravity vector length".into()));
        }
        self.gravity = g;
        Ok(self)
    }

    fn log_coeff(&self) -> f64 {
        2.0 * self.a + 2.0 * (self.d as f64 - 1.0) * self.b + 2.0 * self.c
    }

    fn reference_value(&self) -> f64 {
        self.a * self.d as f64 + self.b * self.d as f64 + self.c
    }

    /// Largest `C₁` with `e + κ >= C₁ |M|²` for `w = 0`.
    pub fn growth_constant(&self) -> f64 {
        let mut c1 = self.a.min(self.c / 2.0);
        if self.d == 3 {
            c1 = c1.min(self.b);
        }
        c1
    }

    fn cof_norm_sq(&self, f: &DMatrix<f64>) -> f64 {
        if self.d == 2 {
            f.norm_squared()
        } else {
            cofactor(f).norm_squared()
        }
    }
}

impl BulkEnergyDensity for NeoHookean {
    fn dim(&self) -> usize {
        self.d
    }

    fn stored(&self, f: &DMatrix<f64>) -> f64 {
        let j = f.determinant();
        if !(j > 0.0) {
            return f64::INFINITY;
        }
        let d = self.d as f64;
        let mut e = self.a * (f.norm_squared() - d) + self.c * (j * j - 1.0) - self.log_coeff() * j.ln();
        if self.b != 0.0 {
            e += self.b * (self.cof_norm_sq(f) - d);
        }
        e
    }

    fn body_force(&self, u: &DVector<f64>) -> f64 {
        self.gravity.dot(u)
    }

    fn body_force_gradient(&self, _u: &DVector<f64>) -> DVector<f64> {
        self.gravity.clone()
    }

    fn polyconvex(&self, u: &DVector<f64>, xi: &[f64]) -> f64 {
        let d = self.d;
        let j = xi[xi.len() - 1];
        if !(j > 0.0) {
            return f64::INFINITY;
        }
        let f2: f64 = xi[..d * d].iter().map(|v| v * v).sum();
        let adj2: f64 = if d == 3 { xi[d * d..2 * d * d].iter().map(|v| v * v).sum() } else { f2 };
        self.a * f2 + self.b * adj2 + self.c * j * j - self.log_coeff() * j.ln()
            - self.reference_value()
            - self.body_force(u)
    }

    fn growth_shift(&self) -> f64 {
        let c3 = self.log_coeff();
        let h0 = (0.5 * c3 * ((c3 / self.c).ln() - 1.0)).max(0.0);
        h0 + self.reference_value()
    }

    fn stress(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        let d = self.d;
        let j = f.determinant();
        let Some(finv) = f.clone().try_inverse() else {
            return DMatrix::from_element(d, d, f64::NAN);
        };
        let fit = finv.transpose();
        let mut p = f * (2.0 * self.a) + &fit * (2.0 * self.c * j * j - self.log_coeff());
        if self.b != 0.0 {
            if d == 2 {
                p += f * (2.0 * self.b);
            } else {
                let c = f.transpose() * f;
                let s = c.trace();
                p += f * (DMatrix::identity(d, d) * s - c) * (2.0 * self.b);
            }
        }
        p
    }

    fn tangent(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        let d = self.d;
        let j = f.determinant();
        let n = d * d;
        let mut t = DMatrix::zeros(n, n);
        let Some(finv) = f.clone().try_inverse() else {
            return DMatrix::from_element(n, n, f64::NAN);
        };
        let g = finv.transpose();
        let c3 = self.log_coeff();
        let j2 = j * j;
        let quad = if d == 2 { 2.0 * (self.a + self.b) } else { 2.0 * self.a };
        let (cmat, s, f_ft) = if d == 3 {
            let c = f.transpose() * f;
            let s = c.trace();
            (c, s, f * f.transpose())
        } else {
            (DMatrix::zeros(d, d), 0.0, DMatrix::zeros(d, d))
        };
        for i in 0..d {
            for jj in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut v = 0.0;
                        if i == k && jj == l {
                            v += quad;
                        }
                        v += 2.0 * self.c * (2.0 * j2 * g[(k, l)] * g[(i, jj)] - j2 * g[(i, l)] * g[(k, jj)]);
                        v += c3 * g[(i, l)] * g[(k, jj)];
                        if d == 3 && self.b != 0.0 {
                            let mut w = 4.0 * f[(i, jj)] * f[(k, l)] - 2.0 * f[(i, l)] * f[(k, jj)];
                            if i == k {
                                w += 2.0 * (if jj == l { s } else { 0.0 } - cmat[(jj, l)]);
                            }
                            if jj == l {
                                w -= 2.0 * f_ft[(i, k)];
                            }
                            v += self.b * w;
                        }
                        t[(i * d + jj, k * d + l)] = v;
                    }
                }
            }
        }
        t
    }
}

/// Wrapper subtracting `factor · |M(F)|^r`, breaking the growth bound.
#[derive(Clone, Debug)]
pub struct GrowthViolator<D> {
    pub inner: D,
    pub factor: f64,
    pub r: f64,
}

impl<D: BulkEnergyDensity> BulkEnergyDensity for GrowthViolator<D> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn stored(&self, f: &DMatrix<f64>) -> f64 {
        self.inner.stored(f) - self.factor * minors(f).norm().powf(self.r)
    }

    fn body_force(&self, u: &DVector<f64>) -> f64 {
        self.inner.body_force(u)
    }

    fn body_force_gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        self.inner.body_force_gradient(u)
    }

    fn polyconvex(&self, u: &DVector<f64>, xi: &[f64]) -> f64 {
        let n = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.inner.polyconvex(u, xi) - self.factor * n.powf(self.r)
    }

    fn growth_shift(&self) -> f64 {
        self.inner.growth_shift()
    }
}

/// Wrapper that assigns the finite energy `|F|²` to orientation-reversing states.
#[derive(Clone, Debug)]
pub struct OrientationViolator<D> {
    pub inner: D,
}

impl<D: BulkEnergyDensity> BulkEnergyDensity for OrientationViolator<D> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn stored(&self, f: &DMatrix<f64>) -> f64 {
        if f.determinant() > 0.0 {
            self.inner.stored(f)
        } else {
            f.norm_squared()
        }
    }

    fn body_force(&self, u: &DVector<f64>) -> f64 {
        self.inner.body_force(u)
    }

    fn body_force_gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        self.inner.body_force_gradient(u)
    }

    fn polyconvex(&self, u: &DVector<f64>, xi: &[f64]) -> f64 {
        let j = xi[xi.len() - 1];
        if j > 0.0 {
            self.inner.polyconvex(u, xi)
        } else {
            let d = self.dim();
            xi[..d * d].iter().map(|v| v * v).sum::<f64>()
        }
    }

    fn growth_shift(&self) -> f64 {
        self.inner.growth_shift()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fd<'a>(&'a NeoHookean);

    impl BulkEnergyDensity for Fd<'_> {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn stored(&self, f: &DMatrix<f64>) -> f64 {
            self.0.stored(f)
        }
        fn body_force(&self, u: &DVector<f64>) -> f64 {
            self.0.body_force(u)
        }
        fn body_force_gradient(&self, u: &DVector<f64>) -> DVector<f64> {
            self.0.body_force_gradient(u)
        }
        fn polyconvex(&self, u: &DVector<f64>, xi: &[f64]) -> f64 {
            self.0.polyconvex(u, xi)
        }
    }

    #[test]
    fn stress_free_reference_and_closed_form_stretch() {
        for d in [2, 3] {
            let w = NeoHookean::from_lame(d, 1.0, 2.0).unwrap();
            let id = DMatrix::identity(d, d);
            assert!(w.stored(&id).abs() < 1e-15);
            assert!(w.stress(&id).norm() < 1e-14);
        }
        let w = NeoHookean::new(2, 0.5, 0.0, 0.7).unwrap();
        let lam: f64 = 1.3;
        let f = DMatrix::from_diagonal(&DVector::from_vec(vec![lam, 1.0]));
        let hand = 0.5 * (lam * lam - 1.0) + 0.7 * (lam * lam - 1.0) - (1.0 + 1.4) * lam.ln();
        assert!((w.stored(&f) - hand).abs() < 1e-14);
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        for d in [2, 3] {
            let w = NeoHookean::new(d, 0.6, 0.3, 0.9).unwrap();
            let f = if d == 2 {
                DMatrix::from_row_slice(2, 2, &[1.1, 0.2, -0.15, 0.95])
            } else {
                DMatrix::from_row_slice(3, 3, &[1.1, 0.2, 0.05, -0.15, 0.95, 0.1, 0.02, -0.08, 1.2])
            };
            let fd = Fd(&w);
            assert!((w.stress(&f) - fd.stress(&f)).norm() < 1e-7);
            let ta = w.tangent(&f);
            let tf = BulkEnergyDensity::tangent(&fd, &f);
            let tn = {
                // differences of the analytic stress
                let h = 1e-6;
                let mut t = DMatrix::zeros(d * d, d * d);
                for k in 0..d {
                    for l in 0..d {
                        let mut fp = f.clone();
                        let mut fm = f.clone();
                        fp[(k, l)] += h;
                        fm[(k, l)] -= h;
                        let ds = (w.stress(&fp) - w.stress(&fm)) / (2.0 * h);
                        for i in 0..d {
                            for j in 0..d {
                                t[(i * d + j, k * d + l)] = ds[(i, j)];
                            }
                        }
                    }
                }
                t
            };
            assert!((&ta - &tn).norm() < 1e-6, "{}", (&ta - &tn).norm());
            assert!((&ta - &tf).norm() < 1e-2);
        }
    }

    #[test]
    fn polyconvex_representative_matches() {
        let w = NeoHookean::new(3, 0.6, 0.3, 0.9).unwrap();
        let f = DMatrix::from_row_slice(3, 3, &[1.1, 0.2, 0.05, -0.15, 0.95, 0.1, 0.02, -0.08, 1.2]);
        let u = DVector::from_vec(vec![0.3, -0.2, 1.0]);
        let e = w.energy(&u, &f);
        let pe = w.polyconvex(&u, &minors(&f).flatten());
        assert!((e - pe).abs() <= 1e-10 * e.abs().max(1.0));
        assert_eq!(w.stored(&(DMatrix::identity(3, 3) * -1.0)), f64::INFINITY);
    }
}
