//! Independent per-objective Gaussian-process surrogates.
//!
//! Inputs are mapped to the unit cube and targets standardized before fitting.
//! The kernel is Matern-5/2 with ARD lengthscales; hyperparameters maximize the
//! log marginal likelihood by multi-start Adam ascent in log space using the
//! analytic gradient.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::par::{self, Exec};
use crate::pareto::SearchSpace;
use crate::{Error, Result};

/// Floor applied to predictive variances.
pub const VARIANCE_FLOOR: f64 = 1e-12;

const SQRT5: f64 = 2.236_067_977_499_79;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Jitter added to the diagonal after a failed factorization, in order.
const JITTER_SCHEDULE: [f64; 7] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub lengthscales: Vec<f64>,
    pub signal_variance: f64,
    pub noise_variance: f64,
}

impl KernelParams {
    pub fn isotropic(d: usize, lengthscale: f64, signal_variance: f64, noise_variance: f64) -> Self {
        KernelParams {
            lengthscales: vec![lengthscale; d],
            signal_variance,
            noise_variance,
        }
    }

    /// `[ln l_1, .., ln l_d, ln signal, ln noise]`.
    pub fn to_log(&self) -> Vec<f64> {
        self.lengthscales
            .iter()
            .map(|l| l.ln())
            .chain([self.signal_variance.ln(), self.noise_variance.ln()])
            .collect()
    }

    pub fn from_log(theta: &[f64]) -> Self {
        let d = theta.len() - 2;
        KernelParams {
            lengthscales: theta[..d].iter().map(|t| t.exp()).collect(),
            signal_variance: theta[d].exp(),
            noise_variance: theta[d + 1].exp(),
        }
    }
}

/// Matern-5/2 ARD covariance between two unit-cube points.
pub fn matern52(a: &[f64], b: &[f64], params: &KernelParams) -> f64 {
    let r2: f64 = a
        .iter()
        .zip(b)
        .zip(&params.lengthscales)
        .map(|((x, y), l)| ((x - y) / l).powi(2))
        .sum();
    let r = r2.sqrt();
    params.signal_variance * (1.0 + SQRT5 * r + 5.0 / 3.0 * r2) * (-SQRT5 * r).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GpConfig {
    pub restarts: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub lengthscale_bounds: (f64, f64),
    pub signal_bounds: (f64, f64),
    pub noise_bounds: (f64, f64),
    pub exec: Exec,
}

impl Default for GpConfig {
    fn default() -> Self {
        GpConfig {
            restarts: 5,
            iterations: 200,
            learning_rate: 0.05,
            lengthscale_bounds: (1e-3, 10.0),
            signal_bounds: (1e-6, 100.0),
            noise_bounds: (1e-6, 1.0),
            exec: Exec::Parallel,
        }
    }
}

impl GpConfig {
    fn log_bounds(&self, d: usize) -> Vec<(f64, f64)> {
        let ln = |(a, b): (f64, f64)| (a.ln(), b.ln());
        std::iter::repeat_n(ln(self.lengthscale_bounds), d)
            .chain([ln(self.signal_bounds), ln(self.noise_bounds)])
            .collect()
    }
}

/// A single-output GP posterior over the unit cube.
#[derive(Debug, Clone)]
pub struct ObjectiveGp {
    /// Training inputs, one unit-cube point per row.
    x: Vec<Vec<f64>>,
    /// Standardized targets.
    y: DVector<f64>,
    y_mean: f64,
    y_scale: f64,
    params: KernelParams,
    jitter: f64,
    chol: DMatrix<f64>,
    alpha: DVector<f64>,
}

impl ObjectiveGp {
    /// Conditions a GP with fixed hyperparameters on `(x, y)`. `x` must already
    /// be in unit-cube coordinates; `y` is standardized internally.
    pub fn with_params(x: Vec<Vec<f64>>, y: &[f64], params: KernelParams) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::Argument(format!(
                "need matching nonempty inputs and targets, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        let d = x[0].len();
        if params.lengthscales.len() != d {
            return Err(Error::Dimension {
                expected: d,
                actual: params.lengthscales.len(),
            });
        }
        let m = y.len() as f64;
        let y_mean = y.iter().sum::<f64>() / m;
        let sd = (y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / m).sqrt();
        let y_scale = if sd > 1e-12 { sd } else { 1.0 };
        let ys = DVector::from_iterator(y.len(), y.iter().map(|v| (v - y_mean) / y_scale));
        let (chol, jitter) = factor(&x, &params)?;
        let alpha = chol.solve(&ys);
        Ok(ObjectiveGp {
            x,
            y: ys,
            y_mean,
            y_scale,
            params,
            jitter,
            chol: chol.l(),
            alpha,
        })
    }

    /// Fits hyperparameters by multi-start marginal-likelihood ascent.
    pub fn fit<R: Rng + ?Sized>(x: Vec<Vec<f64>>, y: &[f64], config: &GpConfig, rng: &mut R) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::Argument("GP fitting needs at least two points".into()));
        }
        let d = x[0].len();
        let bounds = config.log_bounds(d);
        let mut starts = vec![KernelParams::isotropic(d, 0.5, 1.0, 1e-3).to_log()];
        for _ in 1..config.restarts.max(1) {
            starts.push(
                bounds
                    .iter()
                    .enumerate()
                    .map(|(i, &(lo, hi))| {
                        // Random noise starts stay in the lower part of the range.
                        let hi = if i == d + 1 { lo + 0.5 * (hi - lo) } else { hi };
                        rng.random_range(lo..hi)
                    })
                    .collect(),
            );
        }
        let template = ObjectiveGp::with_params(x, y, KernelParams::from_log(&starts[0]))?;
        let results = par::map_indexed(starts.len(), config.exec, |i| {
            ascend(&template, starts[i].clone(), &bounds, config)
        });
        let best = results
            .into_iter()
            .flatten()
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .ok_or(Error::Conditioning {
                jitter: JITTER_SCHEDULE[JITTER_SCHEDULE.len() - 1],
            })?;
        template.refit(KernelParams::from_log(&best.1))
    }

    fn refit(&self, params: KernelParams) -> Result<Self> {
        let (chol, jitter) = factor(&self.x, &params)?;
        let alpha = chol.solve(&self.y);
        Ok(ObjectiveGp {
            x: self.x.clone(),
            y: self.y.clone(),
            y_mean: self.y_mean,
            y_scale: self.y_scale,
            params,
            jitter,
            chol: chol.l(),
            alpha,
        })
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Lower-triangular Cholesky factor of `K + (noise + jitter) I`.
    pub fn cholesky_factor(&self) -> &DMatrix<f64> {
        &self.chol
    }

    pub fn train_inputs(&self) -> &[Vec<f64>] {
        &self.x
    }

    /// `(mean, scale)` used to standardize the targets.
    pub fn standardization(&self) -> (f64, f64) {
        (self.y_mean, self.y_scale)
    }

    /// Predictive mean and variance of the latent function at unit-cube point `u`.
    pub fn predict(&self, u: &[f64]) -> (f64, f64) {
        let m = self.x.len();
        let kstar: Vec<f64> = self.x.iter().map(|xi| matern52(xi, u, &self.params)).collect();
        let mean: f64 = kstar.iter().zip(self.alpha.iter()).map(|(k, a)| k * a).sum();
        // Forward substitution L v = k*, column-major storage.
        let l = self.chol.as_slice();
        let mut v = kstar;
        for j in 0..m {
            v[j] /= l[j * m + j];
            let vj = v[j];
            for i in j + 1..m {
                v[i] -= l[j * m + i] * vj;
            }
        }
        let reduction: f64 = v.iter().map(|t| t * t).sum();
        let var = (self.params.signal_variance - reduction).max(VARIANCE_FLOOR / self.y_scale.powi(2));
        (
            mean * self.y_scale + self.y_mean,
            (var * self.y_scale * self.y_scale).max(VARIANCE_FLOOR),
        )
    }

    /// Log evidence of the standardized targets.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let m = self.y.len() as f64;
        let log_det: f64 = self.chol.diagonal().iter().map(|v| v.ln()).sum();
        -0.5 * self.y.dot(&self.alpha) - log_det - 0.5 * m * LN_2PI
    }

    /// Gradient of [`Self::log_marginal_likelihood`] with respect to
    /// [`KernelParams::to_log`].
    pub fn lml_gradient(&self) -> Vec<f64> {
        let m = self.x.len();
        let d = self.params.lengthscales.len();
        let kinv = cholesky_inverse(&self.chol);
        // A = alpha alpha^T - K^{-1}
        let a = &self.alpha * self.alpha.transpose() - kinv;
        let mut grad = vec![0.0; d + 2];
        let ls = &self.params.lengthscales;
        let s2 = self.params.signal_variance;
        for i in 0..m {
            for j in 0..m {
                let aij = a[(i, j)];
                let (xi, xj) = (&self.x[i], &self.x[j]);
                let r2: f64 = xi
                    .iter()
                    .zip(xj)
                    .zip(ls)
                    .map(|((p, q), l)| ((p - q) / l).powi(2))
                    .sum();
                let r = r2.sqrt();
                let e = (-SQRT5 * r).exp();
                let k = s2 * (1.0 + SQRT5 * r + 5.0 / 3.0 * r2) * e;
                let g = s2 * 5.0 / 3.0 * (1.0 + SQRT5 * r) * e;
                for t in 0..d {
                    let diff = (xi[t] - xj[t]) / ls[t];
                    grad[t] += aij * g * diff * diff;
                }
                grad[d] += aij * k;
            }
            grad[d + 1] += a[(i, i)] * self.params.noise_variance;
        }
        grad.iter_mut().for_each(|g| *g *= 0.5);
        grad
    }
}

fn kernel_matrix(x: &[Vec<f64>], params: &KernelParams, diag: f64) -> DMatrix<f64> {
    let m = x.len();
    let mut k = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = matern52(&x[i], &x[j], params);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
        k[(i, i)] += diag;
    }
    k
}

/// Factors `K + noise I`, escalating jitter on failure.
fn factor(x: &[Vec<f64>], params: &KernelParams) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let base = kernel_matrix(x, params, params.noise_variance);
    if let Some(c) = Cholesky::new(base.clone()) {
        return Ok((c, 0.0));
    }
    for &jitter in &JITTER_SCHEDULE {
        let mut k = base.clone();
        for i in 0..k.nrows() {
            k[(i, i)] += jitter;
        }
        if let Some(c) = Cholesky::new(k) {
            log::debug!("cholesky needed jitter {jitter:e}");
            return Ok((c, jitter));
        }
    }
    Err(Error::Conditioning {
        jitter: JITTER_SCHEDULE[JITTER_SCHEDULE.len() - 1],
    })
}

fn cholesky_inverse(l: &DMatrix<f64>) -> DMatrix<f64> {
    let m = l.nrows();
    let linv = l
        .solve_lower_triangular(&DMatrix::identity(m, m))
        .expect("cholesky factor has a positive diagonal");
    linv.transpose() * linv
}

/// Adam ascent on the log marginal likelihood from `theta`, projected onto
/// `bounds`. Returns the best `(lml, theta)` visited, or `None` if every
/// iterate failed to factor.
fn ascend(template: &ObjectiveGp, mut theta: Vec<f64>, bounds: &[(f64, f64)], config: &GpConfig) -> Option<(f64, Vec<f64>)> {
    let (b1, b2, eps) = (0.9, 0.999, 1e-8);
    let mut m1 = vec![0.0; theta.len()];
    let mut m2 = vec![0.0; theta.len()];
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut stall = 0;
    for t in 1..=config.iterations.max(1) {
        let Ok(gp) = template.refit(KernelParams::from_log(&theta)) else {
            break;
        };
        let lml = gp.log_marginal_likelihood();
        if !lml.is_finite() {
            break;
        }
        match &best {
            Some((b, _)) if lml <= b + 1e-9 => stall += 1,
            _ => stall = 0,
        }
        if best.as_ref().is_none_or(|(b, _)| lml > *b) {
            best = Some((lml, theta.clone()));
        }
        if stall >= 20 {
            break;
        }
        let grad = gp.lml_gradient();
        for i in 0..theta.len() {
            m1[i] = b1 * m1[i] + (1.0 - b1) * grad[i];
            m2[i] = b2 * m2[i] + (1.0 - b2) * grad[i] * grad[i];
            let mh = m1[i] / (1.0 - b1.powi(t as i32));
            let vh = m2[i] / (1.0 - b2.powi(t as i32));
            theta[i] = (theta[i] + config.learning_rate * mh / (vh.sqrt() + eps)).clamp(bounds[i].0, bounds[i].1);
        }
    }
    best
}

/// Independent GPs, one per objective, over a shared search space.
#[derive(Debug, Clone)]
pub struct GpModel {
    space: SearchSpace,
    objectives: Vec<ObjectiveGp>,
}

impl GpModel {
    /// Fits one GP per column of `y` (normalized objective values, one row per
    /// point in `x`, raw parameter units).
    pub fn fit<R: Rng + ?Sized>(
        space: &SearchSpace,
        x: &[Vec<f64>],
        y: &[Vec<f64>],
        config: &GpConfig,
        rng: &mut R,
    ) -> Result<Self> {
        if x.len() < 2 || x.len() != y.len() {
            return Err(Error::Argument(format!(
                "need at least two matching rows, got {} inputs and {} targets",
                x.len(),
                y.len()
            )));
        }
        for xi in x {
            space.check_dim(xi)?;
        }
        let n = y[0].len();
        let units: Vec<Vec<f64>> = x.iter().map(|xi| space.to_unit(xi)).collect();
        let seeds: Vec<u64> = (0..n).map(|_| rng.random()).collect();
        let fitted = par::map_indexed(n, config.exec, |j| {
            let col: Vec<f64> = y.iter().map(|row| row[j]).collect();
            let mut r = crate::rng::stream(seeds[j], "gp/objective");
            ObjectiveGp::fit(units.clone(), &col, config, &mut r)
        });
        Ok(GpModel {
            space: space.clone(),
            objectives: fitted.into_iter().collect::<Result<_>>()?,
        })
    }

    pub fn from_parts(space: SearchSpace, objectives: Vec<ObjectiveGp>) -> Self {
        GpModel { space, objectives }
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn objectives(&self) -> &[ObjectiveGp] {
        &self.objectives
    }

    pub fn n_objectives(&self) -> usize {
        self.objectives.len()
    }

    /// Per-objective predictive mean and variance at raw point `x`.
    pub fn posterior(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        self.posterior_unit(&self.space.to_unit(x))
    }

    pub fn posterior_unit(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        self.objectives.iter().map(|gp| gp.predict(u)).unzip()
    }

    /// Reparameterized posterior draws at raw point `x`, one row per base sample.
    pub fn sample_posterior(&self, x: &[f64], base: &BaseSamples) -> Vec<Vec<f64>> {
        self.sample_posterior_unit(&self.space.to_unit(x), base)
    }

    pub fn sample_posterior_unit(&self, u: &[f64], base: &BaseSamples) -> Vec<Vec<f64>> {
        let (mean, var) = self.posterior_unit(u);
        reparameterize(&mean, &var, base)
    }

    /// Sum of per-objective log marginal likelihoods.
    pub fn log_marginal_likelihood(&self) -> f64 {
        self.objectives.iter().map(|g| g.log_marginal_likelihood()).sum()
    }
}

/// `mean_j + sqrt(var_j) * base_ij` for every base row.
pub fn reparameterize(mean: &[f64], var: &[f64], base: &BaseSamples) -> Vec<Vec<f64>> {
    debug_assert_eq!(mean.len(), base.n_objectives());
    let sd: Vec<f64> = var.iter().map(|v| v.max(0.0).sqrt()).collect();
    base.rows()
        .map(|z| {
            z.iter()
                .zip(mean)
                .zip(&sd)
                .map(|((z, m), s)| m + s * z)
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseSampleKind {
    /// i.i.d. standard normal draws.
    #[default]
    Normal,
    /// Randomly shifted Halton points pushed through the normal quantile.
    Halton,
}

/// Fixed `q x n` standard-normal base samples for one outer iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseSamples {
    q: usize,
    n: usize,
    values: Vec<f64>,
}

const HALTON_PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * inv;
        i /= b;
        inv /= base as f64;
    }
    out
}

impl BaseSamples {
    pub fn new<R: Rng + ?Sized>(kind: BaseSampleKind, q: usize, n: usize, rng: &mut R) -> Result<Self> {
        if q == 0 || n == 0 {
            return Err(Error::Argument("base samples need q >= 1 and n >= 1".into()));
        }
        let values = match kind {
            BaseSampleKind::Normal => (0..q * n)
                .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                .collect(),
            BaseSampleKind::Halton => {
                if n > HALTON_PRIMES.len() {
                    return Err(Error::Argument(format!(
                        "Halton base samples support at most {} objectives",
                        HALTON_PRIMES.len()
                    )));
                }
                let normal = Normal::standard();
                let shift: Vec<f64> = (0..n).map(|_| rng.random()).collect();
                let mut values = Vec::with_capacity(q * n);
                for i in 0..q {
                    for j in 0..n {
                        let u = (radical_inverse(i as u64 + 1, HALTON_PRIMES[j]) + shift[j]).fract();
                        values.push(normal.inverse_cdf(u.clamp(1e-12, 1.0 - 1e-12)));
                    }
                }
                values
            }
        };
        Ok(BaseSamples { q, n, values })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let q = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if q == 0 || n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Argument("base sample rows must be nonempty and equal length".into()));
        }
        Ok(BaseSamples {
            q,
            n,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n_objectives(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n)
    }
}
