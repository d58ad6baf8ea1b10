use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the curvature integrand is formed from `‖A‖`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PhiMode {
    /// `‖A‖^{p_k}`.
    #[default]
    Plain,
    /// Generalized mode with `φ_k(t) = t^{p_k}`.
    Power,
    /// Generalized mode with `φ_k(t) = t^{p_k} + t`.
    PowerPlusLinear,
}

/// Constitutive coefficients of the crack terms, indexed by `k - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyCoefficients {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub p: Vec<f64>,
    pub gamma: f64,
    pub phi_mode: PhiMode,
    /// Lower-bound constant `c` in `φ_k(t) >= c t^{p_k}`.
    pub phi_c: f64,
    /// Constant surface energy of the classical Griffith functional.
    pub phi_griffith: f64,
}

impl EnergyCoefficients {
    /// Plain-mode coefficients for `R^d` with the same values at every `k`.
    pub fn uniform(d: usize, alpha: f64, beta: f64, p: f64, gamma: f64) -> Self {
        Self {
            alpha: vec![alpha; d - 1],
            beta: vec![beta; d - 1],
            p: vec![p; d - 1],
            gamma,
            phi_mode: PhiMode::Plain,
            phi_c: 1.0,
            phi_griffith: beta,
        }
    }

    /// Number of strata covered (`d - 1`).
    pub fn strata(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self, k: usize) -> f64 {
        self.alpha[k - 1]
    }

    pub fn beta(&self, k: usize) -> f64 {
        self.beta[k - 1]
    }

    pub fn p(&self, k: usize) -> f64 {
        self.p[k - 1]
    }

    /// Curvature integrand at `‖A‖ = t` for stratum `k`.
    pub fn curvature_density(&self, k: usize, t: f64) -> f64 {
        let p = self.p(k);
        match self.phi_mode {
            PhiMode::Plain => t.powf(p),
            PhiMode::Power => phi_power(t, p),
            PhiMode::PowerPlusLinear => phi_power(t, p) + t,
        }
    }

    /// Positivity of the coefficients (zero allowed for `α`, `γ` so that
    /// the Griffith limit can be evaluated) and sampled checks of `φ_k`.
    pub fn validate(&self) -> Result<()> {
        let n = self.alpha.len();
        if self.beta.len() != n || self.p.len() != n || n == 0 {
            return Err(Error::Invalid("alpha, beta and p need one entry per stratum".into()));
        }
        if self.alpha.iter().chain([&self.gamma]).any(|v| !(*v >= 0.0)) || self.beta.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Invalid("coefficients must be nonnegative (beta positive)".into()));
        }
        if self.p.iter().any(|p| !(*p > 1.0)) {
            return Err(Error::Invalid("curvature exponents must exceed 1".into()));
        }
        if !(self.phi_c > 0.0) || !(self.phi_griffith >= 0.0) {
            return Err(Error::Invalid("phi constants must be positive".into()));
        }
        for k in 1..=n {
            let grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
            for &t in &grid {
                if self.curvature_density(k, t) < self.phi_c * t.powf(self.p(k)) - 1e-12 {
                    return Err(Error::Invalid(format!("phi_{k} violates its lower bound at t={t}")));
                }
            }
            for w in grid.windows(3) {
                let mid = self.curvature_density(k, w[1]);
                let avg = 0.5 * (self.curvature_density(k, w[0]) + self.curvature_density(k, w[2]));
                if mid > avg + 1e-12 * avg.abs().max(1.0) {
                    return Err(Error::Invalid(format!("phi_{k} is not convex near t={}", w[1])));
                }
            }
        }
        Ok(())
    }
}

fn phi_power(t: f64, p: f64) -> f64 {
    t.powf(p)
}

/// Structured config file with the keys `alpha`, `beta`, `p`, `gamma`,
/// `phi_mode`, `C1`, `r`, `K`, `seed` (arrays indexed by `k = 1..d-1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyConfig {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub p: Vec<f64>,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub phi_mode: PhiMode,
    #[serde(rename = "C1", default = "default_c1")]
    pub c1: f64,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(rename = "K", default = "default_k")]
    pub k: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_phi_c")]
    pub phi_c: f64,
    #[serde(default)]
    pub phi_griffith: Option<f64>,
}

fn default_c1() -> f64 {
    0.05
}

fn default_r() -> f64 {
    2.0
}

fn default_k() -> f64 {
    100.0
}

fn default_phi_c() -> f64 {
    1.0
}

impl EnergyConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: EnergyConfig = toml::from_str(text)?;
        cfg.coefficients().validate()?;
        if !(cfg.c1 > 0.0 && cfg.r > 1.0 && cfg.k > 0.0) {
            return Err(Error::Invalid("C1 > 0, r > 1 and K > 0 are required".into()));
        }
        Ok(cfg)
    }

    pub fn coefficients(&self) -> EnergyCoefficients {
        EnergyCoefficients {
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            p: self.p.clone(),
            gamma: self.gamma,
            phi_mode: self.phi_mode,
            phi_c: self.phi_c,
            phi_griffith: self.phi_griffith.unwrap_or_else(|| self.beta.last().copied().unwrap_or(0.0)),
        }
    }
}
