//! Quadrature rules on simplices and a clip-then-integrate routine for
//! integrands that are polynomial only on a convex sub-region of a triangle.

use crate::sum::CompensatedSum;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// A rule on the reference simplex: barycentric points and weights that sum
/// to one (multiply by the simplex measure to integrate).
#[derive(Clone, Debug)]
pub struct SimplexRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SimplexRule {
    /// Positive collapsed-coordinate (Duffy) rule exact for polynomials of
    /// total degree `degree` on a `dim`-simplex.
    pub fn collapsed(dim: usize, degree: usize) -> Self {
        if dim == 0 {
            return Self {
                points: vec![vec![1.0]],
                weights: vec![1.0],
            };
        }
        let q = (degree + dim).div_ceil(2).max(1);
        let (t, w) = gauss_legendre(q);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let factorial: f64 = (1..=dim).map(|i| i as f64).product();
        let mut idx = vec![0usize; dim];
        loop {
            let mut x = vec![0.0; dim];
            let mut scale = 1.0;
            let mut weight = 1.0;
            for (axis, &i) in idx.iter().enumerate() {
                x[axis] = t[i] * scale;
                weight *= w[i];
                scale *= 1.0 - t[i];
            }
            // Jacobian of the collapse: prod_i (1 - t_i)^(dim - 1 - i).
            let mut jac = 1.0;
            for (axis, &i) in idx.iter().enumerate() {
                jac *= (1.0 - t[i]).powi((dim - 1 - axis) as i32);
            }
            let mut bary = Vec::with_capacity(dim + 1);
            bary.push(1.0 - x.iter().sum::<f64>());
            bary.extend_from_slice(&x);
            points.push(bary);
            weights.push(weight * jac * factorial);
            // odometer
            let mut axis = 0;
            loop {
                if axis == dim {
                    return Self { points, weights };
                }
                idx[axis] += 1;
                if idx[axis] < q {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
        }
    }

    /// Gauss–Legendre on a segment, exact to `order`.
    pub fn segment(order: usize) -> Self {
        let n = (order + 1).div_ceil(2).max(1);
        let (t, w) = gauss_legendre(n);
        Self {
            points: t.iter().map(|&s| vec![1.0 - s, s]).collect(),
            weights: w,
        }
    }

    /// Triangle rules: centroid for order 1, the interior three-point rule
    /// for order 2, and the collapsed rule beyond.
    pub fn triangle(order: usize) -> Self {
        match order {
            0 | 1 => Self {
                points: vec![vec![1.0 / 3.0; 3]],
                weights: vec![1.0],
            },
            2 => {
                let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
                Self {
                    points: vec![vec![a, b, b], vec![b, a, b], vec![b, b, a]],
                    weights: vec![1.0 / 3.0; 3],
                }
            }
            _ => Self::collapsed(2, order),
        }
    }

    /// Rule used for varifold atoms on a `k`-simplex.
    pub fn for_simplex(k: usize, order: usize) -> Self {
        match k {
            0 => Self::collapsed(0, 0),
            1 => Self::segment(order),
            2 => Self::triangle(order),
            _ => Self::collapsed(k, order),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Half-plane `a · x + b >= 0`.
#[derive(Clone, Copy, Debug)]
pub struct HalfPlane {
    pub a: [f64; 2],
    pub b: f64,
}

impl HalfPlane {
    #[inline]
    fn eval(&self, p: [f64; 2]) -> f64 {
        self.a[0] * p[0] + self.a[1] * p[1] + self.b
    }
}

/// Sutherland–Hodgman clip of a convex polygon.
pub fn clip_polygon(mut poly: Vec<[f64; 2]>, planes: &[HalfPlane]) -> Vec<[f64; 2]> {
    for plane in planes {
        if poly.is_empty() {
            break;
        }
        let mut out = Vec::with_capacity(poly.len() + 1);
        for i in 0..poly.len() {
            let p = poly[i];
            let q = poly[(i + 1) % poly.len()];
            let (fp, fq) = (plane.eval(p), plane.eval(q));
            if fp >= 0.0 {
                out.push(p);
            }
            if (fp >= 0.0) != (fq >= 0.0) {
                let s = fp / (fp - fq);
                out.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
            }
        }
        poly = out;
    }
    poly
}

fn triangle_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs()
}

/// Integrate `f` over the part of triangle `tri` satisfying every half-plane.
///
/// `f` must be a polynomial of degree at most `rule`'s exactness on the
/// clipped region for the result to be exact.
pub fn integrate_clipped<F: FnMut([f64; 2]) -> f64>(
    tri: [[f64; 2]; 3],
    planes: &[HalfPlane],
    rule: &SimplexRule,
    mut f: F,
) -> f64 {
    let poly = clip_polygon(tri.to_vec(), planes);
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = CompensatedSum::new();
    for i in 1..poly.len() - 1 {
        let (a, b, c) = (poly[0], poly[i], poly[i + 1]);
        let area = triangle_area(a, b, c);
        if area <= 0.0 {
            continue;
        }
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let p = [
                bary[0] * a[0] + bary[1] * b[0] + bary[2] * c[0],
                bary[0] * a[1] + bary[1] * b[1] + bary[2] * c[1],
            ];
            acc.add(area * w * f(p));
        }
    }
    acc.value()
}
