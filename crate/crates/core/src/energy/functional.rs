use nalgebra::DVector;
use serde::Serialize;

use crate::currents::DeformationField;
use crate::error::{Error, Result};
use crate::geometry::{SimplexId, SimplicialComplex};
use crate::sum;
use crate::varifold::StratifiedFamily;

use super::{BulkEnergyDensity, EnergyCoefficients};

/// Parts of the extended energy; vectors are indexed by `k - 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub bulk: f64,
    pub curvature: Vec<f64>,
    pub surface: Vec<f64>,
    pub corner: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    fn finish(mut self) -> Self {
        self.total = self.bulk + self.curvature.iter().sum::<f64>() + self.surface.iter().sum::<f64>() + self.corner;
        self
    }

    pub fn is_finite(&self) -> bool {
        self.total.is_finite()
    }
}

fn element_barycenter(u: &DeformationField, e: usize) -> DVector<f64> {
    let pts = u.element_points(e);
    let mut c = DVector::zeros(u.dim());
    for p in &pts {
        c += *p;
    }
    c / pts.len() as f64
}

/// Per-element bulk energies `|T| (ẽ(Du) - w(u(bary)))`, exact for linear `w`.
pub fn element_energies<D: BulkEnergyDensity + ?Sized>(u: &DeformationField, density: &D) -> Vec<f64> {
    (0..u.n_elements())
        .map(|e| {
            let stored = density.stored(u.gradient(e));
            if !stored.is_finite() {
                return f64::INFINITY;
            }
            let ub = u.eval_on(e, &element_barycenter(u, e));
            u.element_volume(e) * (stored - density.body_force(&ub))
        })
        .collect()
}

/// `∫_B e(x, u, Du) dx`, `+∞` when some element is not orientation preserving.
pub fn bulk_energy<D: BulkEnergyDensity + ?Sized>(u: &DeformationField, density: &D) -> f64 {
    let parts = element_energies(u, density);
    if parts.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    sum::sum(parts)
}

/// Curvature, mass and corner terms of a crack family.
pub fn varifold_energy(family: &StratifiedFamily, coeffs: &EnergyCoefficients) -> Result<EnergyBreakdown> {
    let n = coeffs.strata();
    if family.ambient != n + 1 {
        return Err(Error::DimensionError(format!(
            "coefficients for {n} strata with a family over R^{}",
            family.ambient
        )));
    }
    let mut out = EnergyBreakdown { bulk: 0.0, curvature: vec![0.0; n], surface: vec![0.0; n], corner: 0.0, total: 0.0 };
    for (&k, s) in &family.strata {
        let v = &s.varifold;
        if v.is_empty() {
            continue;
        }
        if s.curvature.tensors.len() != v.atoms().len() {
            return Err(Error::MissingCurvature(k));
        }
        let curv = sum::sum(
            v.atoms()
                .iter()
                .zip(&s.curvature.tensors)
                .map(|(a, t)| a.weight * coeffs.curvature_density(k, t.norm())),
        );
        out.curvature[k - 1] = coeffs.alpha(k) * curv;
        out.surface[k - 1] = coeffs.beta(k) * v.mass();
        if k == 1 {
            out.corner = coeffs.gamma * s.boundary.total_variation();
        }
    }
    Ok(out.finish())
}

/// Extended energy `E(u, {V_k}, B)`.
pub fn total_energy<D: BulkEnergyDensity + ?Sized>(
    u: &DeformationField,
    family: &StratifiedFamily,
    density: &D,
    coeffs: &EnergyCoefficients,
) -> Result<EnergyBreakdown> {
    let mut b = varifold_energy(family, coeffs)?;
    b.bulk = bulk_energy(u, density);
    Ok(b.finish())
}

/// Classical Griffith energy `∫_B e dx + φ ℋ^{d-1}(C)`.
pub fn griffith_energy<D: BulkEnergyDensity + ?Sized>(
    crack: &SimplicialComplex,
    u: &DeformationField,
    density: &D,
    phi: f64,
) -> Result<f64> {
    let d = u.dim();
    let area = if crack.is_empty() || crack.n_simplices(d - 1) == 0 {
        0.0
    } else {
        if crack.top_dim() != d - 1 {
            return Err(Error::DimensionError(format!("{}-dimensional crack in R^{d}", crack.top_dim())));
        }
        sum::sum((0..crack.n_simplices(d - 1)).map(|i| {
            crack.simplex_measure(SimplexId::new(d - 1, i)).map(|m| m.value()).unwrap_or(0.0)
        }))
    };
    Ok(bulk_energy(u, density) + phi * area)
}
