use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::varifold::StratifiedFamily;

use super::form::{multi_indices, ProductBump, TestForm};
use super::graph::{boundary_current_eval, mass_of_current};
use super::injectivity::{ciarlet_necas_check, default_probes, CiarletNecasReport, Probe};
use super::DeformationField;

#[derive(Clone, Debug)]
pub struct AdmissibilityOptions {
    /// Absolute tolerance for items (iv) and (v).
    pub tol: f64,
    /// Ball resolution for item (v); defaults to twice the longest edge.
    pub resolution: Option<f64>,
    /// Probes for item (iv); defaults to [`default_probes`].
    pub probes: Option<Vec<Probe>>,
}

impl Default for AdmissibilityOptions {
    fn default() -> Self {
        Self { tol: 1e-8, resolution: None, probes: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryBall {
    pub center: Vec<f64>,
    /// Largest `|∂G_u(ω)|` over the normalized forms localized in the ball.
    pub lower_bound: f64,
    /// `Σ_k μ_{V_k} + π_#|∂V_1|` of the ball of radius `2r`.
    pub allowance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryItemReport {
    pub passed: bool,
    pub resolution: f64,
    pub forms_evaluated: usize,
    pub worst_margin: f64,
    pub balls: Vec<BoundaryBall>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub k: f64,
    pub max_abs_value: f64,
    pub passed: bool,
}

/// Items (i)-(v) of the extended weak diffeomorphism definition.
#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    /// Piecewise affine with bounded gradient: structural.
    pub item_i_sobolev: bool,
    /// Minors are piecewise constant, so integrable whenever the mass is finite.
    pub item_ii_minors_integrable: bool,
    pub item_iii_orientation: bool,
    pub min_det: f64,
    pub item_iv_ciarlet_necas: bool,
    pub ciarlet_necas: CiarletNecasReport,
    pub item_v_boundary: bool,
    pub boundary: BoundaryItemReport,
    pub bound: Option<BoundReport>,
    pub admissible: bool,
}

fn allowance(family: &StratifiedFamily, c: &DVector<f64>, radius: f64) -> f64 {
    let mut total = 0.0;
    for (k, s) in &family.strata {
        total += s.varifold.ball_measure(c, radius);
        if *k == 1 {
            total += s.boundary.ball_variation(c, radius);
        }
    }
    total
}

fn face_boxes(u: &DeformationField) -> Vec<(Vec<f64>, Vec<f64>)> {
    let d = u.dim();
    u.outer_boundary_faces()
        .into_iter()
        .map(|f| {
            let verts = &u.mesh().simplices(d - 1)[f];
            let lo = (0..d).map(|i| verts.iter().map(|&v| u.mesh().vertex(v)[i]).fold(f64::INFINITY, f64::min)).collect();
            let hi = (0..d).map(|i| verts.iter().map(|&v| u.mesh().vertex(v)[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
            (lo, hi)
        })
        .collect()
}

/// Greedy clustering of points with the given radius, in input order.
fn cluster(points: &[DVector<f64>], radius: f64) -> Vec<DVector<f64>> {
    let mut centers: Vec<DVector<f64>> = Vec::new();
    for p in points {
        if !centers.iter().any(|c| (c - p).norm() <= radius) {
            centers.push(p.clone());
        }
    }
    centers
}

/// Item (v) at resolution `r`: a lower bound on `|∂G_u|` of boxes inscribed
/// in balls `B(c, r)` against the crack allowance of `B(c, 2r)`.
pub fn boundary_item(u: &DeformationField, family: &StratifiedFamily, r: f64, tol: f64) -> BoundaryItemReport {
    let d = u.dim();
    let half = r / (d as f64).sqrt();
    let verts = u.mesh().vertices();
    let (mut lo, mut hi) = (vec![f64::INFINITY; d], vec![f64::NEG_INFINITY; d]);
    for v in verts {
        for i in 0..d {
            lo[i] = lo[i].min(v[i]);
            hi[i] = hi[i].max(v[i]);
        }
    }
    let counts: Vec<usize> = (0..d)
        .map(|i| {
            let span = hi[i] - lo[i] - 2.0 * half;
            if span < 0.0 {
                0
            } else {
                (span / r).floor() as usize + 1
            }
        })
        .collect();
    let boxes = face_boxes(u);
    let lip = u.lipschitz().max(1e-12);
    let indices = multi_indices(2 * d, d - 1);
    let total: usize = counts.iter().product();
    let centers: Vec<DVector<f64>> = (0..total)
        .map(|mut idx| {
            DVector::from_fn(d, |i, _| {
                let k = idx % counts[i];
                idx /= counts[i];
                let used = (counts[i] - 1) as f64 * r;
                0.5 * (lo[i] + hi[i]) - 0.5 * used + k as f64 * r
            })
        })
        .filter(|c| {
            let clear = boxes
                .iter()
                .all(|(flo, fhi)| (0..d).any(|i| fhi[i] <= c[i] - half || flo[i] >= c[i] + half));
            clear && u.locate(c).is_some()
        })
        .collect();
    let results: Vec<(BoundaryBall, usize)> = centers
        .par_iter()
        .map(|c| {
            let images: Vec<DVector<f64>> = verts
                .iter()
                .zip(u.values())
                .filter(|(x, _)| (0..d).all(|i| (x[i] - c[i]).abs() <= half))
                .map(|(_, y)| y.clone())
                .collect();
            let images = if images.is_empty() {
                let e = u.locate(c).unwrap_or(0);
                vec![u.eval_on(e, c)]
            } else {
                images
            };
            let mut best: f64 = 0.0;
            let mut count = 0;
            for yc in cluster(&images, 0.25 * lip * r) {
                for factor in [0.25, 1.0] {
                    let rho = factor * lip * r;
                    let bump = ProductBump {
                        center: c.iter().chain(yc.iter()).copied().collect(),
                        radius: std::iter::repeat(half).take(d).chain(std::iter::repeat(rho).take(d)).collect(),
                    };
                    for idx in &indices {
                        let Ok(omega) = TestForm::monomial(d, bump.clone(), idx.clone(), 1.0) else { continue };
                        let norm = omega.sup_norm_bound();
                        if let Ok(v) = boundary_current_eval(u, &omega) {
                            best = best.max(v.abs() / norm);
                        }
                        count += 1;
                    }
                }
            }
            let ball = BoundaryBall {
                center: c.iter().copied().collect(),
                lower_bound: best,
                allowance: allowance(family, c, 2.0 * r),
            };
            (ball, count)
        })
        .collect();
    let forms_evaluated = results.iter().map(|(_, n)| n).sum();
    let balls: Vec<BoundaryBall> = results.into_iter().map(|(b, _)| b).collect();
    let worst_margin = balls.iter().map(|b| b.allowance + tol - b.lower_bound).fold(f64::INFINITY, f64::min);
    BoundaryItemReport { passed: worst_margin >= 0.0, resolution: r, forms_evaluated, worst_margin, balls }
}

/// Full admissibility report of `u` against a crack family.
pub fn admissibility_report(
    u: &DeformationField,
    family: &StratifiedFamily,
    k: Option<f64>,
    options: &AdmissibilityOptions,
) -> Result<AdmissibilityReport> {
    if family.ambient != u.dim() {
        return Err(Error::MeshError(format!(
            "crack family over R^{} for a deformation on R^{}",
            family.ambient,
            u.dim()
        )));
    }
    let min_det = u.min_det();
    let mass = mass_of_current(u);
    let probes = options.probes.clone().unwrap_or_else(|| default_probes(u));
    let cn = ciarlet_necas_check(u, &probes, options.tol);
    let r = options.resolution.unwrap_or_else(|| 2.0 * u.mesh().max_edge_length());
    let boundary = boundary_item(u, family, r, options.tol);
    let bound = k.or(u.bound()).map(|k| {
        let m = u.max_abs_value();
        BoundReport { k, max_abs_value: m, passed: m <= k * (1.0 + 1e-12) }
    });
    let item_iii = min_det > 0.0;
    let admissible = mass.is_finite()
        && item_iii
        && cn.passed
        && boundary.passed
        && bound.as_ref().map_or(true, |b| b.passed);
    Ok(AdmissibilityReport {
        item_i_sobolev: true,
        item_ii_minors_integrable: mass.is_finite(),
        item_iii_orientation: item_iii,
        min_det,
        item_iv_ciarlet_necas: cn.passed,
        ciarlet_necas: cn,
        item_v_boundary: boundary.passed,
        boundary,
        bound,
        admissible,
    })
}
