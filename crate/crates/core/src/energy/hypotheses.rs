use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::currents::minors;

use super::BulkEnergyDensity;

/// One sampled state `(u, F)`.
#[derive(Clone, Debug)]
pub struct SampleState {
    pub u: DVector<f64>,
    pub f: DMatrix<f64>,
}

fn random_rotation(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let qr = m.qr();
    let mut q = qr.q();
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// States `R₁ diag(s) R₂` with `det` log-uniform in `(1e-3, 10)` and
/// `|u| <= k_bound`; every tenth state is orientation reversing.
pub fn sample_states(d: usize, n: usize, k_bound: f64, seed: u64) -> Vec<SampleState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let log_det = rng.random_range((1e-3f64).ln()..(10f64).ln());
            let mut s: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0f64)).collect();
            let mean = s.iter().sum::<f64>() / d as f64;
            for v in s.iter_mut() {
                *v = (*v - mean + log_det / d as f64).exp();
            }
            if i % 10 == 9 {
                s[0] = -s[0];
            }
            let f = random_rotation(d, &mut rng) * DMatrix::from_diagonal(&DVector::from_vec(s)) * random_rotation(d, &mut rng);
            let dir = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
            let u = dir * (k_bound * rng.random_range(0.0..1.0) / (d as f64).sqrt());
            SampleState { u, f }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisOutcome {
    pub passed: bool,
    /// Worst value of the tested quantity (its meaning is per hypothesis).
    pub worst: f64,
    pub tested: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    /// Sampled modulus of continuity in `u`.
    pub h1: HypothesisOutcome,
    /// Midpoint convexity defect of `Pe` along random segments in minors space.
    pub h2: HypothesisOutcome,
    /// `min (e + κ - C₁ |M|^r)`.
    pub h3: HypothesisOutcome,
    /// Count of finite-energy samples with `det <= 0`.
    pub h4: HypothesisOutcome,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.h1.passed && self.h2.passed && self.h3.passed && self.h4.passed
    }
}

#[derive(Clone, Debug)]
pub struct HypothesisConfig {
    pub c1: f64,
    pub r: f64,
    pub segments: usize,
    pub seed: u64,
}

impl Default for HypothesisConfig {
    fn default() -> Self {
        Self { c1: 0.05, r: 2.0, segments: 1000, seed: 0 }
    }
}

/// Sampled checks of the structural hypotheses H1-H4 on a density.
pub fn hypothesis_check<D: BulkEnergyDensity + ?Sized>(
    density: &D,
    samples: &[SampleState],
    config: &HypothesisConfig,
) -> HypothesisReport {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9);
    let d = density.dim();

    // H1: difference quotients in u at fixed F
    let delta = 1e-6;
    let mut modulus: f64 = 0.0;
    let mut h1_ok = true;
    let mut h1_n = 0;
    for s in samples {
        let e0 = density.energy(&s.u, &s.f);
        if !e0.is_finite() {
            continue;
        }
        let dir = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0)).normalize();
        let e1 = density.energy(&(&s.u + dir * delta), &s.f);
        let q = (e1 - e0).abs() / delta;
        h1_ok &= q.is_finite();
        modulus = modulus.max(q);
        h1_n += 1;
    }

    // H2: midpoint convexity in ξ between minors of admissible samples
    let admissible: Vec<&SampleState> = samples.iter().filter(|s| s.f.determinant() > 0.0).collect();
    let mut worst_h2: f64 = f64::NEG_INFINITY;
    let mut h2_n = 0;
    if admissible.len() >= 2 {
        for _ in 0..config.segments {
            let a = admissible[rng.random_range(0..admissible.len())];
            let b = admissible[rng.random_range(0..admissible.len())];
            let xa = minors(&a.f).flatten();
            let xb = minors(&b.f).flatten();
            let xm: Vec<f64> = xa.iter().zip(&xb).map(|(p, q)| 0.5 * (p + q)).collect();
            let u = &a.u;
            let (pa, pb, pm) = (density.polyconvex(u, &xa), density.polyconvex(u, &xb), density.polyconvex(u, &xm));
            let scale = 1.0 + pa.abs() + pb.abs();
            worst_h2 = worst_h2.max((pm - 0.5 * (pa + pb)) / scale);
            h2_n += 1;
        }
    }

    // H3: growth of the shifted density
    let shift = density.growth_shift();
    let mut worst_h3 = f64::INFINITY;
    let mut h3_n = 0;
    for s in samples {
        let e = density.energy(&s.u, &s.f);
        if !e.is_finite() {
            continue;
        }
        let m = minors(&s.f).norm();
        worst_h3 = worst_h3.min(e + shift - config.c1 * m.powf(config.r));
        h3_n += 1;
    }

    // H4: finite energy only for det > 0
    let offending = samples
        .iter()
        .filter(|s| density.energy(&s.u, &s.f).is_finite() && s.f.determinant() <= 0.0)
        .count();

    HypothesisReport {
        h1: HypothesisOutcome { passed: h1_ok, worst: modulus, tested: h1_n },
        h2: HypothesisOutcome { passed: h2_n > 0 && worst_h2 <= 1e-12, worst: worst_h2, tested: h2_n },
        h3: HypothesisOutcome { passed: h3_n > 0 && worst_h3 >= 0.0, worst: worst_h3, tested: h3_n },
        h4: HypothesisOutcome { passed: offending == 0, worst: offending as f64, tested: samples.len() },
    }
}
