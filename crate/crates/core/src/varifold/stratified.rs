use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::{BoundaryMeasure, CurvatureField, DiscreteVarifold};

/// One stratum `V_k` with its curvature data.
#[derive(Clone, Debug)]
pub struct Stratum {
    pub varifold: DiscreteVarifold,
    pub curvature: CurvatureField,
    pub boundary: BoundaryMeasure,
    /// Curvature exponent `p_k > 1`.
    pub exponent: f64,
}

impl Stratum {
    /// Stratum with curvature estimated on the varifold's own support.
    pub fn new(varifold: DiscreteVarifold, exponent: f64) -> Result<Self> {
        if !(exponent > 1.0) {
            return Err(Error::Invalid(format!("curvature exponent {exponent} must exceed 1")));
        }
        let (curvature, boundary) = varifold.estimate_curvature()?;
        Ok(Self { varifold, curvature, boundary, exponent })
    }
}

/// Family `{V_k}` for `k = 1..d-1`; missing entries mean empty varifolds.
#[derive(Clone, Debug)]
pub struct StratifiedFamily {
    pub ambient: usize,
    pub strata: BTreeMap<usize, Stratum>,
}

impl StratifiedFamily {
    pub fn new(ambient: usize) -> Self {
        Self { ambient, strata: BTreeMap::new() }
    }

    pub fn insert(&mut self, stratum: Stratum) -> Result<()> {
        let k = stratum.varifold.k();
        if k == 0 || k >= self.ambient || stratum.varifold.ambient_dim() != self.ambient {
            return Err(Error::DimensionError(format!("{k}-stratum in a family over R^{}", self.ambient)));
        }
        self.strata.insert(k, stratum);
        Ok(())
    }

    pub fn get(&self, k: usize) -> Option<&Stratum> {
        self.strata.get(&k)
    }

    /// Largest edge length among the strata supports.
    pub fn max_edge_length(&self) -> f64 {
        self.strata
            .values()
            .filter_map(|s| s.varifold.support())
            .map(|c| c.max_edge_length())
            .fold(0.0, f64::max)
    }

    /// Run `is_stratified` with the default resolution of twice the longest edge.
    pub fn check(&self, tol: f64) -> StratificationReport {
        let r = 2.0 * self.max_edge_length();
        is_stratified(self, if r > 0.0 { r } else { 1.0 }, tol)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StratumCheck {
    pub k: usize,
    pub balls: usize,
    /// Smallest `μ_{V_{k-1}}(B) + tol - |∂V_k|(B)` over the tested balls.
    pub worst_margin: f64,
    pub lower_stratum_missing: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StratificationReport {
    pub stratified: bool,
    pub checks: Vec<StratumCheck>,
}

/// Ball-wise check of `π_#|∂V_k| <= μ_{V_{k-1}}` for every `k >= 2`.
///
/// Both measures are evaluated on the same closed ball of radius `r` around
/// each atom of `∂V_k`.
pub fn is_stratified(family: &StratifiedFamily, r: f64, tol: f64) -> StratificationReport {
    let mut checks = Vec::new();
    for (&k, stratum) in family.strata.range(2..) {
        let bnd = &stratum.boundary;
        let lower = family.strata.get(&(k - 1)).map(|s| &s.varifold).filter(|v| !v.is_empty());
        if bnd.is_zero() {
            checks.push(StratumCheck {
                k,
                balls: 0,
                worst_margin: f64::INFINITY,
                lower_stratum_missing: lower.is_none(),
                passed: true,
            });
            continue;
        }
        let Some(lower) = lower else {
            checks.push(StratumCheck {
                k,
                balls: 0,
                worst_margin: f64::NEG_INFINITY,
                lower_stratum_missing: true,
                passed: false,
            });
            continue;
        };
        let worst = bnd
            .atoms
            .iter()
            .map(|a| lower.ball_measure(&a.x, r) + tol - bnd.ball_variation(&a.x, r))
            .fold(f64::INFINITY, f64::min);
        checks.push(StratumCheck {
            k,
            balls: bnd.atoms.len(),
            worst_margin: worst,
            lower_stratum_missing: false,
            passed: worst >= 0.0,
        });
    }
    StratificationReport { stratified: checks.iter().all(|c| c.passed), checks }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominanceReport {
    pub dominated: bool,
    /// Smallest `μ_big(B) + tol - μ_small(B)`; `+inf` when `small` is empty.
    pub worst_margin: f64,
}

/// Ball-wise `μ_small <= μ_big` on balls of radius `r` centred at the atoms of `small`.
pub fn dominance_report(small: &DiscreteVarifold, big: &DiscreteVarifold, r: f64, tol: f64) -> DominanceReport {
    let worst = small
        .atoms()
        .iter()
        .map(|a| big.ball_measure(&a.x, r) + tol - small.ball_measure(&a.x, r))
        .fold(f64::INFINITY, f64::min);
    DominanceReport { dominated: worst >= 0.0, worst_margin: worst }
}

pub fn dominates(small: &DiscreteVarifold, big: &DiscreteVarifold, r: f64, tol: f64) -> bool {
    dominance_report(small, big, r, tol).dominated
}
