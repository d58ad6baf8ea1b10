use std::sync::OnceLock;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_clipped, HalfPlane, SimplexRule};
use crate::sum;

use super::form::{FormPiece, ProductBump, TestForm};
use super::minors::minors;
use super::DeformationField;

/// Degree of the per-piece integrand on an affine graph in `d = 2`
/// (four quartic factors).
const CLIPPED_DEGREE: usize = 16;
/// Degree of the unclipped fallback rule used in `d = 3`.
const FALLBACK_DEGREE: usize = 12;

fn clipped_rule() -> &'static SimplexRule {
    static RULE: OnceLock<SimplexRule> = OnceLock::new();
    RULE.get_or_init(|| SimplexRule::collapsed(2, CLIPPED_DEGREE))
}

fn fallback_rule() -> &'static SimplexRule {
    static RULE: OnceLock<SimplexRule> = OnceLock::new();
    RULE.get_or_init(|| SimplexRule::collapsed(3, FALLBACK_DEGREE))
}

/// Range of coordinate `a` of the graph `(x, u(x))` over element `e`.
fn graph_range(u: &DeformationField, e: usize, a: usize) -> (f64, f64) {
    let d = u.dim();
    let s = &u.mesh().simplices(d)[e];
    let vals = s.iter().map(|&v| if a < d { u.mesh().vertex(v)[a] } else { u.values()[v][a - d] });
    vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn misses(u: &DeformationField, e: usize, bump: &ProductBump) -> bool {
    (0..bump.len()).any(|a| {
        if bump.radius[a].is_infinite() {
            return false;
        }
        let (lo, hi) = graph_range(u, e, a);
        let (blo, bhi) = bump.interval(a);
        hi <= blo || lo >= bhi
    })
}

/// `∫_e f(x, u(x)) dx` where `f` vanishes outside `bump`'s support box.
/// Exact in `d = 2` for integrands polynomial of degree 16 on the box.
pub(crate) fn integrate_on_graph<F: Fn(&[f64]) -> f64>(u: &DeformationField, e: usize, bump: &ProductBump, f: F) -> f64 {
    if misses(u, e, bump) {
        return 0.0;
    }
    let d = u.dim();
    let g = u.gradient(e);
    let off = u.offset(e);
    let pts = u.element_points(e);
    let mut z = [0.0; 6];
    if d == 2 {
        let mut planes = Vec::with_capacity(8);
        for a in 0..4 {
            if bump.radius[a].is_infinite() {
                continue;
            }
            let (lo, hi) = bump.interval(a);
            let (row, c) = if a < 2 {
                let mut r = [0.0; 2];
                r[a] = 1.0;
                (r, 0.0)
            } else {
                ([g[(a - 2, 0)], g[(a - 2, 1)]], off[a - 2])
            };
            planes.push(HalfPlane { a: row, b: c - lo });
            planes.push(HalfPlane { a: [-row[0], -row[1]], b: hi - c });
        }
        let tri = [[pts[0][0], pts[0][1]], [pts[1][0], pts[1][1]], [pts[2][0], pts[2][1]]];
        integrate_clipped(tri, &planes, clipped_rule(), |x| {
            z[0] = x[0];
            z[1] = x[1];
            z[2] = off[0] + g[(0, 0)] * x[0] + g[(0, 1)] * x[1];
            z[3] = off[1] + g[(1, 0)] * x[0] + g[(1, 1)] * x[1];
            f(&z[..4])
        })
    } else {
        let vol = u.element_volume(e);
        let rule = fallback_rule();
        let mut acc = sum::CompensatedSum::new();
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            for i in 0..d {
                z[i] = pts.iter().zip(bary).map(|(p, l)| p[i] * l).sum();
            }
            for i in 0..d {
                z[d + i] = off[i] + (0..d).map(|j| g[(i, j)] * z[j]).sum::<f64>();
            }
            acc.add(vol * w * f(&z[..2 * d]));
        }
        acc.value()
    }
}

/// `det` of the rows `index` of `[I_d; Du]`.
fn graph_minor(g: &DMatrix<f64>, index: &[usize]) -> f64 {
    let d = g.nrows();
    let m = DMatrix::from_fn(d, d, |r, c| {
        let row = index[r];
        if row < d {
            if row == c {
                1.0
            } else {
                0.0
            }
        } else {
            g[(row - d, c)]
        }
    });
    m.determinant()
}

fn piece_on_element(u: &DeformationField, e: usize, piece: &FormPiece) -> f64 {
    let g = u.gradient(e);
    let weights: Vec<f64> = piece.terms.iter().map(|t| t.coeff * graph_minor(g, &t.index)).collect();
    if weights.iter().all(|w| *w == 0.0) {
        return 0.0;
    }
    integrate_on_graph(u, e, &piece.bump, |z| {
        piece
            .terms
            .iter()
            .zip(&weights)
            .filter(|(_, w)| **w != 0.0)
            .map(|(t, w)| w * piece.bump.eval(z, &t.derivs))
            .sum()
    })
}

/// `G_u(ω) = ∫_B <ω(x, u(x)), M(Du(x))> dx` for a `d`-form `ω`.
pub fn current_eval(u: &DeformationField, omega: &TestForm) -> Result<f64> {
    let d = u.dim();
    if omega.dim() != d || omega.degree() != d {
        return Err(Error::DimensionError(format!(
            "current of a map on R^{d} paired with a {}-form on R^{}",
            omega.degree(),
            2 * omega.dim()
        )));
    }
    let per_element: Vec<f64> = (0..u.n_elements())
        .into_par_iter()
        .map(|e| sum::sum(omega.pieces().iter().map(|p| piece_on_element(u, e, p))))
        .collect();
    Ok(sum::sum(per_element))
}

/// `∂G_u(ω) = G_u(dω)` for a `(d-1)`-form `ω`.
pub fn boundary_current_eval(u: &DeformationField, omega: &TestForm) -> Result<f64> {
    if omega.degree() + 1 != u.dim() {
        return Err(Error::DimensionError(format!(
            "boundary current on R^{} paired with a {}-form",
            u.dim(),
            omega.degree()
        )));
    }
    current_eval(u, &omega.exterior_derivative())
}

/// `M(G_u) = ∫_B |M(Du)| dx`.
pub fn mass_of_current(u: &DeformationField) -> f64 {
    sum::sum((0..u.n_elements()).map(|e| u.element_volume(e) * minors(u.gradient(e)).norm()))
}
