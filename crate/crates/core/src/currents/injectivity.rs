use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sum;

use super::form::{beta_integral, ProductBump};
use super::graph::integrate_on_graph;
use super::DeformationField;

/// Separable probe `f(x, w) = g(x) h(w)`; `g ≡ 1` when `x_bump` is `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub x_bump: Option<ProductBump>,
    pub w_bump: ProductBump,
}

impl Probe {
    pub fn new(x_bump: Option<ProductBump>, w_bump: ProductBump) -> Result<Self> {
        if w_bump.radius.iter().any(|r| r.is_infinite()) || x_bump.as_ref().map_or(false, |b| b.len() != w_bump.len()) {
            return Err(Error::Invalid("probe needs a compact target bump of matching dimension".into()));
        }
        Ok(Self { x_bump, w_bump })
    }

    /// Bump over `(x, w)` space used for clipped integration.
    fn full_bump(&self) -> ProductBump {
        let d = self.w_bump.len();
        let (xc, xr) = match &self.x_bump {
            Some(b) => (b.center.clone(), b.radius.clone()),
            None => (vec![0.0; d], vec![f64::INFINITY; d]),
        };
        ProductBump {
            center: xc.into_iter().chain(self.w_bump.center.iter().copied()).collect(),
            radius: xr.into_iter().chain(self.w_bump.radius.iter().copied()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeResult {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CiarletNecasReport {
    pub passed: bool,
    /// `min (RHS - LHS)` over the probes.
    pub worst_margin: f64,
    pub worst_probe: Option<usize>,
    pub probes: Vec<ProbeResult>,
}

/// `sup_{x in B} g(x)`: one when the bump centre lies in the body, otherwise
/// the largest value at nodes and element barycentres.
fn sup_over_body(u: &DeformationField, g: &ProductBump) -> f64 {
    let c = DVector::from_vec(g.center.clone());
    if u.locate(&c).is_some() {
        return 1.0;
    }
    let zero = vec![0u8; g.len()];
    let d = u.dim();
    let nodes = u.mesh().vertices().iter().map(|v| g.eval(v.as_slice(), &zero));
    let bary = (0..u.n_elements()).map(|e| {
        let pts = u.element_points(e);
        let b = pts.iter().fold(DVector::zeros(d), |acc, p| acc + *p) / (d + 1) as f64;
        g.eval(b.as_slice(), &zero)
    });
    nodes.chain(bary).fold(0.0, f64::max)
}

/// `∫_B g(x) h(u(x)) det Du dx <= ∫ sup_B g(x) h(z) dz` for each probe.
pub fn ciarlet_necas_check(u: &DeformationField, probes: &[Probe], tol: f64) -> CiarletNecasReport {
    let d = u.dim();
    let results: Vec<ProbeResult> = probes
        .par_iter()
        .map(|p| {
            let bump = p.full_bump();
            let zero = vec![0u8; 2 * d];
            let lhs = sum::sum((0..u.n_elements()).map(|e| {
                let det = u.gradient(e).determinant();
                integrate_on_graph(u, e, &bump, |z| bump.eval(z, &zero)) * det
            }));
            let sup_g = p.x_bump.as_ref().map_or(1.0, |g| sup_over_body(u, g));
            let rhs = sup_g * p.w_bump.radius.iter().map(|r| beta_integral(*r)).product::<f64>();
            ProbeResult { lhs, rhs, margin: rhs - lhs }
        })
        .collect();
    let (worst_probe, worst_margin) = results
        .iter()
        .enumerate()
        .fold((None, f64::INFINITY), |(bi, bm), (i, r)| if r.margin < bm { (Some(i), r.margin) } else { (bi, bm) });
    CiarletNecasReport { passed: worst_margin >= -tol, worst_margin, worst_probe, probes: results }
}

fn bbox(points: impl Iterator<Item = DVector<f64>>, d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in points {
        for i in 0..d {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    (lo, hi)
}

/// Target bumps on a grid over the image bounding box, each paired with one
/// wide body bump centred on the reference bounding box.
pub fn default_probes(u: &DeformationField) -> Vec<Probe> {
    let d = u.dim();
    let (ilo, ihi) = bbox(u.values().iter().cloned(), d);
    let (blo, bhi) = bbox(u.mesh().vertices().iter().cloned(), d);
    let extent = (0..d).map(|i| ihi[i] - ilo[i]).fold(0.0, f64::max).max(1e-12);
    let rho = extent / 4.0;
    let step = rho / 2.0;
    let g = ProductBump {
        center: (0..d).map(|i| 0.5 * (blo[i] + bhi[i])).collect(),
        radius: (0..d).map(|i| (bhi[i] - blo[i]).max(1e-12)).collect(),
    };
    let counts: Vec<usize> = (0..d).map(|i| ((ihi[i] - ilo[i]) / step).floor() as usize + 1).collect();
    let total: usize = counts.iter().product();
    (0..total)
        .map(|mut idx| {
            let center = (0..d)
                .map(|i| {
                    let k = idx % counts[i];
                    idx /= counts[i];
                    let span = (counts[i] - 1) as f64 * step;
                    0.5 * (ilo[i] + ihi[i]) - 0.5 * span + k as f64 * step
                })
                .collect();
            Probe { x_bump: Some(g.clone()), w_bump: ProductBump { center, radius: vec![rho; d] } }
        })
        .collect()
}
