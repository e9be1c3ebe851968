//! Reference solvers: Latin-hypercube priors, uniform random search and a
//! ParEGO-style scalarized expected-improvement maximizer.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::acquisition::{draw_weights, q_expected_improvement_unit, Incumbent, ScalarizationWeights};
use crate::par::{self, Exec};
use crate::pareto::{ParetoArchive, SearchSpace};
use crate::rng::stream;
use crate::surrogate::{BaseSamples, GpModel};
use crate::{Error, Result};

/// `n_points` stratified points in `[0, 1]^d`: along every axis each of the
/// `n` strata `[j/n, (j+1)/n)` holds exactly one point.
pub fn latin_hypercube_unit<R: Rng + ?Sized>(n_points: usize, d: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; d]; n_points];
    let mut strata: Vec<usize> = (0..n_points).collect();
    for k in 0..d {
        strata.shuffle(rng);
        for (p, &s) in points.iter_mut().zip(&strata) {
            let u: f64 = rng.random();
            // Guard against rounding up into the next stratum.
            p[k] = ((s as f64 + u) / n_points as f64).min(next_down((s + 1) as f64 / n_points as f64));
        }
    }
    points
}

fn next_down(v: f64) -> f64 {
    f64::from_bits(v.to_bits() - 1)
}

/// Latin-hypercube design mapped into `space` (log axes stratified in log space).
pub fn latin_hypercube<R: Rng + ?Sized>(n_points: usize, space: &SearchSpace, rng: &mut R) -> Vec<Vec<f64>> {
    latin_hypercube_unit(n_points, space.dim(), rng)
        .iter()
        .map(|u| space.from_unit(u))
        .collect()
}

/// One uniform point (log-uniform on log-scale axes).
pub fn random_solver<R: Rng + ?Sized>(space: &SearchSpace, rng: &mut R) -> Vec<f64> {
    let u: Vec<f64> = (0..space.dim()).map(|_| rng.random()).collect();
    space.from_unit(&u)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParegoConfig {
    pub starts: usize,
    /// Initial coordinate step, in unit-cube units.
    pub initial_step: f64,
    pub tolerance: f64,
    pub rho: f64,
    pub exec: Exec,
}

impl Default for ParegoConfig {
    fn default() -> Self {
        ParegoConfig {
            starts: 64,
            initial_step: 0.1,
            tolerance: 1e-4,
            rho: crate::acquisition::DEFAULT_RHO,
            exec: Exec::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParegoProposal {
    pub x: Vec<f64>,
    pub unit: Vec<f64>,
    pub expected_improvement: f64,
    pub weights: ScalarizationWeights,
    /// EI at every start point, in start order.
    pub start_values: Vec<f64>,
    pub fallback: bool,
}

/// Compass search on `f` from `start`: try ±step on each axis, keep
/// improvements, halve the step when a sweep fails, stop below `tolerance`.
pub fn coordinate_refine<F: Fn(&[f64]) -> f64>(start: &[f64], initial_step: f64, tolerance: f64, f: F) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut best = f(&x);
    let mut step = initial_step;
    while step >= tolerance {
        let mut improved = false;
        for k in 0..x.len() {
            for sign in [1.0, -1.0] {
                let mut y = x.clone();
                y[k] = (y[k] + sign * step).clamp(0.0, 1.0);
                if y[k] == x[k] {
                    continue;
                }
                let v = f(&y);
                if v > best {
                    best = v;
                    x = y;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, best)
}

/// Maximizes MC expected improvement of a freshly drawn Chebyshev
/// scalarization by multi-start coordinate refinement from LHS starts.
pub fn parego_solver(
    archive: &ParetoArchive,
    model: &GpModel,
    base: &BaseSamples,
    config: &ParegoConfig,
    seed: u64,
) -> Result<ParegoProposal> {
    let weights = draw_weights(&mut stream(seed, "lambda"), model.n_objectives(), config.rho);
    parego_with_weights(archive, model, base, weights, config, seed)
}

pub fn parego_with_weights(
    archive: &ParetoArchive,
    model: &GpModel,
    base: &BaseSamples,
    weights: ScalarizationWeights,
    config: &ParegoConfig,
    seed: u64,
) -> Result<ParegoProposal> {
    let incumbent = Incumbent::from_archive(archive, &weights)
        .ok_or_else(|| Error::Argument("archive has no successful evaluations".into()))?;
    let space = model.space();
    let starts = latin_hypercube_unit(config.starts.max(1), space.dim(), &mut stream(seed, "parego/starts"));
    let ei = |u: &[f64]| q_expected_improvement_unit(model, u, base, &weights, &incumbent);
    let start_values: Vec<f64> = starts.iter().map(|s| ei(s)).collect();
    let refined = par::map_indexed(starts.len(), config.exec, |i| {
        coordinate_refine(&starts[i], config.initial_step, config.tolerance, ei)
    });
    let (unit, best) = refined
        .into_iter()
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .expect("at least one start");
    if best <= 0.0 {
        log::info!("expected improvement is zero everywhere searched; proposing a random point");
        let mut rng = stream(seed, "parego/fallback");
        let u: Vec<f64> = (0..space.dim()).map(|_| rng.random()).collect();
        return Ok(ParegoProposal {
            x: space.from_unit(&u),
            expected_improvement: ei(&u),
            unit: u,
            weights,
            start_values,
            fallback: true,
        });
    }
    Ok(ParegoProposal {
        x: space.from_unit(&unit),
        unit,
        expected_improvement: best,
        weights,
        start_values,
        fallback: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::{Evaluation, Objective, ObjectiveSpec, Param, Source};
    use crate::surrogate::{BaseSampleKind, KernelParams, ObjectiveGp};

    #[test]
    fn lhs_single_point_and_strata() {
        let mut rng = stream(0, "lhs");
        let one = latin_hypercube_unit(1, 3, &mut rng);
        assert_eq!(one.len(), 1);
        assert!(one[0].iter().all(|v| (0.0..1.0).contains(v)));
        let pts = latin_hypercube_unit(10, 2, &mut rng);
        for k in 0..2 {
            let mut strata: Vec<usize> = pts.iter().map(|p| (p[k] * 10.0).floor() as usize).collect();
            strata.sort();
            assert_eq!(strata, (0..10).collect::<Vec<_>>());
        }
    }

    #[test]
    fn lhs_coordinates_are_uncorrelated() {
        let mut rng = stream(1, "lhs");
        let (mut sx, mut sy, mut sxy, mut sxx, mut syy, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..10_000 {
            for p in latin_hypercube_unit(5, 2, &mut rng) {
                sx += p[0];
                sy += p[1];
                sxy += p[0] * p[1];
                sxx += p[0] * p[0];
                syy += p[1] * p[1];
                n += 1.0;
            }
        }
        let cov = sxy / n - sx / n * sy / n;
        let corr = cov / ((sxx / n - (sx / n).powi(2)) * (syy / n - (sy / n).powi(2))).sqrt();
        assert!(corr.abs() < 0.1, "{corr}");
    }

    #[test]
    fn random_solver_is_log_uniform_and_reproducible() {
        let space = SearchSpace::new(vec![Param::log("lr", 1e-5, 1e-2), Param::linear("e", 100.0, 500.0)]).unwrap();
        let mut rng = stream(2, "random");
        let xs: Vec<Vec<f64>> = (0..20_000).map(|_| random_solver(&space, &mut rng)).collect();
        assert!(xs.iter().all(|x| space.contains(x)));
        let logs: Vec<f64> = xs.iter().map(|x| x[0].log10()).collect();
        let mean = logs.iter().sum::<f64>() / logs.len() as f64;
        assert!((mean - (-3.5)).abs() < 0.03, "{mean}");
        let below = logs.iter().filter(|&&v| v < -4.0).count() as f64 / logs.len() as f64;
        assert!((below - 1.0 / 3.0).abs() < 0.02);
        let mut a = stream(5, "r");
        let mut b = stream(5, "r");
        assert_eq!(random_solver(&space, &mut a), random_solver(&space, &mut b));
    }

    fn quadratic_model() -> (GpModel, ParetoArchive) {
        // Dense noiseless samples of a bowl with its minimum at (0.3, 0.7).
        let space = SearchSpace::unit_cube(2);
        let f = |p: &[f64]| (p[0] - 0.3).powi(2) + (p[1] - 0.7).powi(2);
        let mut x = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                x.push(vec![i as f64 / 4.0, j as f64 / 4.0]);
            }
        }
        let y: Vec<f64> = x.iter().map(|p| f(p)).collect();
        let gp = ObjectiveGp::with_params(x.clone(), &y, KernelParams::isotropic(2, 0.6, 1.0, 1e-8)).unwrap();
        let spec = ObjectiveSpec::new(vec![Objective::minimize("f", 1.0)]).unwrap();
        let mut archive = ParetoArchive::new(vec![1.0]);
        for (i, (xi, yi)) in x.iter().zip(&y).enumerate() {
            archive.push(Evaluation::new(i, Source::Prior, xi.clone(), vec![*yi], &spec));
        }
        (GpModel::from_parts(space, vec![gp]), archive)
    }

    #[test]
    fn refine_never_loses_to_its_start_and_finds_optimum() {
        let (model, archive) = quadratic_model();
        let base = BaseSamples::new(BaseSampleKind::Normal, 64, 1, &mut stream(3, "b")).unwrap();
        let w = ScalarizationWeights::new(vec![1.0], 0.005).unwrap();
        let p = parego_with_weights(&archive, &model, &base, w, &ParegoConfig::default(), 7).unwrap();
        assert!(!p.fallback);
        assert!(p.start_values.iter().all(|&s| p.expected_improvement >= s));
        let d = ((p.unit[0] - 0.3).powi(2) + (p.unit[1] - 0.7).powi(2)).sqrt();
        assert!(d < 0.05, "proposal {:?} is {d} from the optimum", p.unit);
        let again = parego_with_weights(&archive, &model, &base, p.weights.clone(), &ParegoConfig { exec: Exec::Sequential, ..ParegoConfig::default() }, 7).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn zero_ei_falls_back_to_random() {
        let (model, mut archive) = quadratic_model();
        let spec = ObjectiveSpec::new(vec![Objective::minimize("f", 1.0)]).unwrap();
        archive.push(Evaluation::new(99, Source::Prior, vec![0.3, 0.7], vec![-100.0], &spec));
        let base = BaseSamples::new(BaseSampleKind::Normal, 8, 1, &mut stream(3, "b")).unwrap();
        let w = ScalarizationWeights::new(vec![1.0], 0.005).unwrap();
        let cfg = ParegoConfig { starts: 4, ..ParegoConfig::default() };
        let p = parego_with_weights(&archive, &model, &base, w, &cfg, 1).unwrap();
        assert!(p.fallback);
        assert!(p.unit.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
