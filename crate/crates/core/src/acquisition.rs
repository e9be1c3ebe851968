//! Scalarization, penalized improvement reward and MC expected improvement.
//!
//! All quantities are in the minimization convention: improvement is
//! `incumbent - candidate`.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::pareto::ParetoArchive;
use crate::surrogate::{reparameterize, BaseSamples, GpModel};
use crate::{Error, Result};

/// Multiplier applied to non-positive improvements.
pub const NEGATIVE_IMPROVEMENT_PENALTY: f64 = 1e-3;

/// Default weight of the additive term in the augmented Chebyshev function.
pub const DEFAULT_RHO: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarizationWeights {
    lambda: Vec<f64>,
    rho: f64,
}

impl ScalarizationWeights {
    pub fn new(lambda: Vec<f64>, rho: f64) -> Result<Self> {
        let sum: f64 = lambda.iter().sum();
        if lambda.is_empty() || lambda.iter().any(|&l| !(l >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!(
                "weights must be non-negative and sum to 1, got {lambda:?}"
            )));
        }
        if !(rho > 0.0) {
            return Err(Error::Argument(format!("rho must be positive, got {rho}")));
        }
        Ok(ScalarizationWeights { lambda, rho })
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// Draws λ uniformly from the simplex via normalized exponential spacings.
pub fn draw_weights<R: Rng + ?Sized>(rng: &mut R, n: usize, rho: f64) -> ScalarizationWeights {
    assert!(n >= 1, "need at least one objective");
    let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = e.iter().sum();
    let mut lambda: Vec<f64> = e.iter().map(|v| v / total).collect();
    // Put the rounding residue on the largest weight so the sum is exact to 1e-12.
    let residue = 1.0 - lambda.iter().sum::<f64>();
    let imax = (0..n).max_by(|&a, &b| lambda[a].total_cmp(&lambda[b])).unwrap();
    lambda[imax] += residue;
    ScalarizationWeights { lambda, rho }
}

/// `max_j(λ_j f_j) + ρ Σ_j λ_j f_j`.
pub fn chebyshev_scalarize(f_norm: &[f64], w: &ScalarizationWeights) -> f64 {
    debug_assert_eq!(f_norm.len(), w.lambda.len());
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for (f, l) in f_norm.iter().zip(&w.lambda) {
        let v = l * f;
        max = max.max(v);
        sum += v;
    }
    max + w.rho * sum
}

/// Best scalarized value in the archive under the current weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Incumbent {
    pub f_star_scalar: f64,
    pub x_star: Vec<f64>,
}

impl Incumbent {
    /// Minimum of the scalarized normalized objectives over all successful
    /// evaluations; `None` for an archive without any.
    pub fn from_archive(archive: &ParetoArchive, w: &ScalarizationWeights) -> Option<Self> {
        archive
            .successful()
            .map(|e| (chebyshev_scalarize(&e.f_norm, w), e))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(s, e)| Incumbent {
                f_star_scalar: s,
                x_star: e.x.clone(),
            })
    }
}

/// Improvement if positive, otherwise the improvement scaled by the penalty.
pub fn reward(f_scalar: f64, incumbent: &Incumbent) -> f64 {
    let delta = incumbent.f_star_scalar - f_scalar;
    if delta > 0.0 {
        delta
    } else {
        NEGATIVE_IMPROVEMENT_PENALTY * delta
    }
}

/// Scalarized rewards of the base-sample draws at unit point `u`, averaged.
pub fn mc_reward_unit(model: &GpModel, u: &[f64], base: &BaseSamples, w: &ScalarizationWeights, incumbent: &Incumbent) -> f64 {
    let (mean, var) = model.posterior_unit(u);
    mc_reward_from_moments(&mean, &var, base, w, incumbent)
}

pub fn mc_reward(model: &GpModel, x: &[f64], base: &BaseSamples, w: &ScalarizationWeights, incumbent: &Incumbent) -> f64 {
    mc_reward_unit(model, &model.space().to_unit(x), base, w, incumbent)
}

pub fn mc_reward_from_moments(mean: &[f64], var: &[f64], base: &BaseSamples, w: &ScalarizationWeights, incumbent: &Incumbent) -> f64 {
    let sd: Vec<f64> = var.iter().map(|v| v.max(0.0).sqrt()).collect();
    let mut total = 0.0;
    for z in base.rows() {
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for j in 0..mean.len() {
            let v = w.lambda[j] * (mean[j] + sd[j] * z[j]);
            max = max.max(v);
            sum += v;
        }
        total += reward(max + w.rho * sum, incumbent);
    }
    total / base.q() as f64
}

/// MC expected improvement of the scalarized objective, clamped at zero.
pub fn q_expected_improvement_unit(model: &GpModel, u: &[f64], base: &BaseSamples, w: &ScalarizationWeights, incumbent: &Incumbent) -> f64 {
    let (mean, var) = model.posterior_unit(u);
    let draws = reparameterize(&mean, &var, base);
    draws
        .iter()
        .map(|d| (incumbent.f_star_scalar - chebyshev_scalarize(d, w)).max(0.0))
        .sum::<f64>()
        / draws.len() as f64
}

pub fn q_expected_improvement(model: &GpModel, x: &[f64], base: &BaseSamples, w: &ScalarizationWeights, incumbent: &Incumbent) -> f64 {
    q_expected_improvement_unit(model, &model.space().to_unit(x), base, w, incumbent)
}
