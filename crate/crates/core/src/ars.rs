//! Ensemble of competing augmented-random-search policies.
//!
//! Each agent owns a two-layer MLP policy that moves a point through the unit
//! cube. Agents start from diverse members of the feasible Pareto front, are
//! trained against the surrogate's MC reward with symmetric random
//! perturbations, and the best state visited by any agent's greedy rollout is
//! proposed for evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::acquisition::{chebyshev_scalarize, mc_reward_unit, Incumbent, ScalarizationWeights};
use crate::par::{self, Exec};
use crate::pareto::{Evaluation, ParetoArchive};
use crate::rng::stream;
use crate::surrogate::{BaseSamples, GpModel};
use crate::{Error, Result};

/// Floor for the reward standard deviation in the update.
pub const SIGMA_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArsConfig {
    pub n_directions: usize,
    pub top_k_fraction: f64,
    pub horizon: usize,
    pub learning_rate: f64,
    pub exploration_noise: f64,
    pub n_agents: usize,
    pub max_train_steps: usize,
    /// Largest per-step move, as a fraction of each unit-cube axis.
    pub step_scale: f64,
    pub hidden: usize,
    pub kmeans_restarts: usize,
    pub kmeans_iterations: usize,
    pub exec: Exec,
}

impl Default for ArsConfig {
    fn default() -> Self {
        ArsConfig {
            n_directions: 3000,
            top_k_fraction: 0.01,
            horizon: 4,
            learning_rate: 1e-3,
            exploration_noise: 1e-2,
            n_agents: 5,
            max_train_steps: 30,
            step_scale: 0.1,
            hidden: 64,
            kmeans_restarts: 10,
            kmeans_iterations: 100,
            exec: Exec::Parallel,
        }
    }
}

impl ArsConfig {
    /// Number of top directions entering each update.
    pub fn top_b(&self) -> usize {
        ((self.top_k_fraction * self.n_directions as f64).ceil() as usize).clamp(1, self.n_directions.max(1))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("ars: {m}")));
        if self.n_directions == 0 {
            return bad("n_directions must be >= 1");
        }
        if !(self.top_k_fraction > 0.0 && self.top_k_fraction <= 1.0) {
            return bad("top_k_fraction must lie in (0, 1]");
        }
        if self.horizon == 0 {
            return bad("horizon must be >= 1");
        }
        if self.n_agents == 0 || self.hidden == 0 {
            return bad("n_agents and hidden must be >= 1");
        }
        if !(self.step_scale > 0.0) || !(self.exploration_noise > 0.0) || !(self.learning_rate > 0.0) {
            return bad("step_scale, exploration_noise and learning_rate must be positive");
        }
        Ok(())
    }
}

/// Running mean/variance of observed states (Welford).
#[derive(Debug, Clone, PartialEq)]
pub struct ObsNormalizer {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl ObsNormalizer {
    pub fn new(d: usize) -> Self {
        ObsNormalizer {
            count: 0,
            mean: vec![0.0; d],
            m2: vec![0.0; d],
        }
    }

    pub fn push(&mut self, s: &[f64]) {
        self.count += 1;
        let c = self.count as f64;
        for i in 0..s.len() {
            let delta = s[i] - self.mean[i];
            self.mean[i] += delta / c;
            self.m2[i] += delta * (s[i] - self.mean[i]);
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    fn normalize_into(&self, s: &[f64], out: &mut [f64]) {
        for i in 0..s.len() {
            let sd = if self.count > 1 {
                (self.m2[i] / self.count as f64).sqrt()
            } else {
                0.0
            };
            let sd = if sd < 1e-8 { 1.0 } else { sd };
            out[i] = (s[i] - self.mean[i]) / sd;
        }
    }
}

/// `tanh(W2 relu(W1 s + b1) + b2)` with flat parameter storage
/// `[W1 (hidden x d, row-major) | b1 | W2 (d x hidden, row-major) | b2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    d: usize,
    hidden: usize,
    theta: Vec<f64>,
    obs: ObsNormalizer,
}

impl Policy {
    /// The zero policy.
    pub fn zeros(d: usize, hidden: usize) -> Self {
        Policy {
            d,
            hidden,
            theta: vec![0.0; Self::param_count(d, hidden)],
            obs: ObsNormalizer::new(d),
        }
    }

    pub fn param_count(d: usize, hidden: usize) -> usize {
        2 * hidden * d + hidden + d
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    pub fn normalizer(&self) -> &ObsNormalizer {
        &self.obs
    }

    pub fn act(&self, state: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.d];
        forward(&self.theta, self.d, self.hidden, &self.obs, state, &mut out);
        out
    }
}

fn forward(theta: &[f64], d: usize, hidden: usize, obs: &ObsNormalizer, state: &[f64], out: &mut [f64]) {
    let (w1, rest) = theta.split_at(hidden * d);
    let (b1, rest) = rest.split_at(hidden);
    let (w2, b2) = rest.split_at(d * hidden);
    let mut s = [0.0; 64];
    let mut s_heap;
    let s: &mut [f64] = if d <= 64 {
        &mut s[..d]
    } else {
        s_heap = vec![0.0; d];
        &mut s_heap
    };
    obs.normalize_into(state, s);
    let mut h = vec![0.0; hidden];
    for (j, hj) in h.iter_mut().enumerate() {
        let row = &w1[j * d..(j + 1) * d];
        let z: f64 = b1[j] + row.iter().zip(s.iter()).map(|(w, x)| w * x).sum::<f64>();
        *hj = z.max(0.0);
    }
    for i in 0..d {
        let row = &w2[i * hidden..(i + 1) * hidden];
        let z: f64 = b2[i] + row.iter().zip(&h).map(|(w, x)| w * x).sum::<f64>();
        out[i] = z.tanh();
    }
}

/// What a rollout is scored against: the surrogate, the fixed base samples
/// and the weights/incumbent of the current outer iteration.
#[derive(Clone, Copy)]
pub struct RewardContext<'a> {
    pub model: &'a GpModel,
    pub base: &'a BaseSamples,
    pub weights: &'a ScalarizationWeights,
    pub incumbent: &'a Incumbent,
}

impl RewardContext<'_> {
    pub fn reward_unit(&self, u: &[f64]) -> f64 {
        mc_reward_unit(self.model, u, self.base, self.weights, self.incumbent)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    /// `horizon + 1` unit-cube states, starting with the initial state.
    pub states: Vec<Vec<f64>>,
    pub per_step_rewards: Vec<f64>,
    pub total_reward: f64,
}

fn rollout_with(
    theta: &[f64],
    policy: &Policy,
    x0: &[f64],
    ctx: &RewardContext<'_>,
    horizon: usize,
    step_scale: f64,
) -> Rollout {
    let d = policy.d;
    let mut states = Vec::with_capacity(horizon + 1);
    let mut rewards = Vec::with_capacity(horizon);
    let mut action = vec![0.0; d];
    let mut x = x0.to_vec();
    states.push(x.clone());
    for _ in 0..horizon {
        forward(theta, d, policy.hidden, &policy.obs, &x, &mut action);
        for i in 0..d {
            x[i] = (x[i] + step_scale * action[i]).clamp(0.0, 1.0);
        }
        rewards.push(ctx.reward_unit(&x));
        states.push(x.clone());
    }
    Rollout {
        total_reward: rewards.iter().sum(),
        states,
        per_step_rewards: rewards,
    }
}

/// Runs `policy` for `horizon` steps from unit-cube state `x0`.
pub fn rollout(policy: &Policy, x0: &[f64], horizon: usize, ctx: &RewardContext<'_>, config: &ArsConfig) -> Rollout {
    rollout_with(&policy.theta, policy, x0, ctx, horizon, config.step_scale)
}

/// Result of one parameter update.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateOutcome {
    /// Indices of the directions used, best first.
    pub selected: Vec<usize>,
    pub sigma_r: f64,
}

/// Indices of the `b` directions with the largest `max(r+, r-)`, best first;
/// ties go to the lower index.
pub fn rank_directions(r_plus: &[f64], r_minus: &[f64], b: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..r_plus.len()).collect();
    idx.sort_by(|&i, &j| {
        let (si, sj) = (r_plus[i].max(r_minus[i]), r_plus[j].max(r_minus[j]));
        sj.total_cmp(&si).then(i.cmp(&j))
    });
    idx.truncate(b);
    idx
}

/// Applies `θ += α / (b σ_R) Σ_top (r+ - r-) φ`, where σ_R is the standard
/// deviation of the `2b` rewards entering the update.
pub fn ars_update<F>(theta: &mut [f64], r_plus: &[f64], r_minus: &[f64], b: usize, alpha: f64, direction: F) -> UpdateOutcome
where
    F: Fn(usize) -> Vec<f64>,
{
    let selected = rank_directions(r_plus, r_minus, b);
    let b = selected.len();
    let used: Vec<f64> = selected.iter().flat_map(|&k| [r_plus[k], r_minus[k]]).collect();
    let mean = used.iter().sum::<f64>() / used.len() as f64;
    let sd = (used.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / used.len() as f64).sqrt();
    let sigma_r = sd.max(SIGMA_FLOOR);
    let scale = alpha / (b as f64 * sigma_r);
    for &k in &selected {
        let diff = r_plus[k] - r_minus[k];
        if diff == 0.0 {
            continue;
        }
        let phi = direction(k);
        debug_assert_eq!(phi.len(), theta.len());
        for (t, p) in theta.iter_mut().zip(&phi) {
            *t += scale * diff * p;
        }
    }
    UpdateOutcome { selected, sigma_r }
}

fn direction_from_seed(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Per-step training statistics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainReport {
    pub mean_rewards: Vec<f64>,
    pub sigma_r: Vec<f64>,
}

/// Trains `policy` in place for `config.max_train_steps` ARS iterations from
/// unit-cube state `x0`.
pub fn train_agent<R: Rng + ?Sized>(
    policy: &mut Policy,
    x0: &[f64],
    ctx: &RewardContext<'_>,
    config: &ArsConfig,
    rng: &mut R,
) -> TrainReport {
    let n = config.n_directions;
    let b = config.top_b();
    let p = policy.theta.len();
    let v = config.exploration_noise;
    let mut report = TrainReport::default();
    for _ in 0..config.max_train_steps {
        let seeds: Vec<u64> = (0..n).map(|_| rng.next_u64()).collect();
        let pol = &*policy;
        let results = par::map_indexed(n, config.exec, |k| {
            let phi = direction_from_seed(seeds[k], p);
            let plus: Vec<f64> = pol.theta.iter().zip(&phi).map(|(t, f)| t + v * f).collect();
            let minus: Vec<f64> = pol.theta.iter().zip(&phi).map(|(t, f)| t - v * f).collect();
            let rp = rollout_with(&plus, pol, x0, ctx, config.horizon, config.step_scale);
            let rm = rollout_with(&minus, pol, x0, ctx, config.horizon, config.step_scale);
            (rp, rm)
        });
        let r_plus: Vec<f64> = results.iter().map(|(a, _)| a.total_reward).collect();
        let r_minus: Vec<f64> = results.iter().map(|(_, b)| b.total_reward).collect();
        report
            .mean_rewards
            .push((r_plus.iter().sum::<f64>() + r_minus.iter().sum::<f64>()) / (2 * n) as f64);
        let outcome = ars_update(&mut policy.theta, &r_plus, &r_minus, b, config.learning_rate, |k| {
            direction_from_seed(seeds[k], p)
        });
        report.sigma_r.push(outcome.sigma_r);
        for (rp, rm) in &results {
            for s in rp.states[..config.horizon].iter().chain(&rm.states[..config.horizon]) {
                policy.obs.push(s);
            }
        }
    }
    report
}

/// Squared Euclidean distance.
fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Lloyd's k-means with k-means++ seeding; returns the centroids of the
/// lowest-inertia restart.
pub fn kmeans<R: Rng + ?Sized>(points: &[Vec<f64>], k: usize, restarts: usize, iterations: usize, rng: &mut R) -> Vec<Vec<f64>> {
    assert!(k >= 1 && k <= points.len());
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    for _ in 0..restarts.max(1) {
        let mut centroids = vec![points[rng.random_range(0..points.len())].clone()];
        while centroids.len() < k {
            let d2: Vec<f64> = points
                .iter()
                .map(|p| centroids.iter().map(|c| dist2(p, c)).fold(f64::INFINITY, f64::min))
                .collect();
            let total: f64 = d2.iter().sum();
            let next = if total > 0.0 {
                let mut t = rng.random::<f64>() * total;
                let mut pick = points.len() - 1;
                for (i, w) in d2.iter().enumerate() {
                    if t < *w {
                        pick = i;
                        break;
                    }
                    t -= w;
                }
                pick
            } else {
                rng.random_range(0..points.len())
            };
            centroids.push(points[next].clone());
        }
        let mut assign = vec![usize::MAX; points.len()];
        for _ in 0..iterations.max(1) {
            let mut changed = false;
            for (i, p) in points.iter().enumerate() {
                let c = (0..k)
                    .min_by(|&a, &b| dist2(p, &centroids[a]).total_cmp(&dist2(p, &centroids[b])))
                    .unwrap();
                if assign[i] != c {
                    assign[i] = c;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            for (c, centroid) in centroids.iter_mut().enumerate() {
                let members: Vec<&Vec<f64>> = points.iter().zip(&assign).filter(|(_, &a)| a == c).map(|(p, _)| p).collect();
                if members.is_empty() {
                    continue;
                }
                for t in 0..centroid.len() {
                    centroid[t] = members.iter().map(|m| m[t]).sum::<f64>() / members.len() as f64;
                }
            }
        }
        let inertia: f64 = points.iter().zip(&assign).map(|(p, &a)| dist2(p, &centroids[a])).sum();
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, centroids));
        }
    }
    best.unwrap().1
}

/// Initial states (raw parameter vectors of archive members) for up to
/// `config.n_agents` agents.
///
/// A feasible front no larger than the ensemble is used as is. Larger fronts
/// are clustered in unit-cube coordinates and the member nearest each
/// centroid is taken. Without any feasible point, the archive members with
/// the lowest scalarized objective are used.
pub fn select_initial_states<R: Rng + ?Sized>(
    archive: &ParetoArchive,
    model_space: &crate::pareto::SearchSpace,
    weights: &ScalarizationWeights,
    config: &ArsConfig,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let l = config.n_agents;
    let front = archive.pareto_front(true);
    if front.is_empty() {
        let mut pool: Vec<&Evaluation> = archive.successful().collect();
        pool.sort_by(|a, b| {
            chebyshev_scalarize(&a.f_norm, weights)
                .total_cmp(&chebyshev_scalarize(&b.f_norm, weights))
                .then(a.index.cmp(&b.index))
        });
        return pool.into_iter().take(l).map(|e| e.x.clone()).collect();
    }
    if front.len() <= l {
        return front.into_iter().map(|e| e.x.clone()).collect();
    }
    let units: Vec<Vec<f64>> = front.iter().map(|e| model_space.to_unit(&e.x)).collect();
    let centroids = kmeans(&units, l, config.kmeans_restarts, config.kmeans_iterations, rng);
    let mut taken = vec![false; front.len()];
    let mut out = Vec::with_capacity(l);
    for c in &centroids {
        let pick = (0..units.len())
            .filter(|&i| !taken[i])
            .min_by(|&a, &b| dist2(&units[a], c).total_cmp(&dist2(&units[b], c)).then(a.cmp(&b)))
            .expect("front larger than ensemble");
        taken[pick] = true;
        out.push(front[pick].x.clone());
    }
    out
}

/// A candidate produced by the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Raw parameter units.
    pub x: Vec<f64>,
    pub unit: Vec<f64>,
    pub reward: f64,
    pub agent: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Proposal {
    /// Best first; at most the requested batch size.
    pub candidates: Vec<Candidate>,
    pub initial_states: Vec<Vec<f64>>,
    pub greedy_rollouts: Vec<Rollout>,
    pub train_reports: Vec<TrainReport>,
    /// True when the reward surface was flat and a random point was returned.
    pub fallback: bool,
}

/// Trains the ensemble and returns the top `batch` distinct rollout states.
///
/// All randomness derives from `seed` through named streams, so the result
/// does not depend on the execution mode.
pub fn propose_batch(
    archive: &ParetoArchive,
    ctx: &RewardContext<'_>,
    config: &ArsConfig,
    seed: u64,
    batch: usize,
) -> Result<Proposal> {
    config.validate()?;
    if archive.successful().next().is_none() {
        return Err(Error::Argument("archive has no successful evaluations".into()));
    }
    let space = ctx.model.space();
    let starts = select_initial_states(archive, space, ctx.weights, config, &mut stream(seed, "kmeans"));
    let d = space.dim();
    let trained = par::map_indexed(starts.len(), config.exec, |i| {
        let x0 = space.to_unit(&starts[i]);
        let mut policy = Policy::zeros(d, config.hidden);
        let mut rng = stream(seed, &format!("agent/{i}"));
        let report = train_agent(&mut policy, &x0, ctx, config, &mut rng);
        let greedy = rollout(&policy, &x0, config.horizon, ctx, config);
        (report, greedy)
    });
    let (train_reports, greedy_rollouts): (Vec<_>, Vec<_>) = trained.into_iter().unzip();

    let mut pool: Vec<Candidate> = Vec::new();
    for (agent, r) in greedy_rollouts.iter().enumerate() {
        for (s, &rew) in r.states[1..].iter().zip(&r.per_step_rewards) {
            pool.push(Candidate {
                x: space.from_unit(s),
                unit: s.clone(),
                reward: rew,
                agent: Some(agent),
            });
        }
    }
    // Stable: earlier agents and steps win ties.
    pool.sort_by(|a, b| b.reward.total_cmp(&a.reward));
    let mut distinct: Vec<Candidate> = Vec::new();
    for c in pool {
        if !distinct.iter().any(|e| e.unit == c.unit) {
            distinct.push(c);
        }
    }
    let flat = distinct.len() > 1 && distinct.first().map(|c| c.reward) == distinct.last().map(|c| c.reward);
    if flat {
        log::info!("ARS reward surface is flat over all rollouts; proposing a random point");
        let mut rng = stream(seed, "fallback");
        let u: Vec<f64> = (0..d).map(|_| rng.random()).collect();
        let reward = ctx.reward_unit(&u);
        return Ok(Proposal {
            candidates: vec![Candidate {
                x: space.from_unit(&u),
                unit: u,
                reward,
                agent: None,
            }],
            initial_states: starts,
            greedy_rollouts,
            train_reports,
            fallback: true,
        });
    }
    distinct.truncate(batch.max(1));
    Ok(Proposal {
        candidates: distinct,
        initial_states: starts,
        greedy_rollouts,
        train_reports,
        fallback: false,
    })
}

/// The single best candidate (raw parameter units).
pub fn propose(archive: &ParetoArchive, ctx: &RewardContext<'_>, config: &ArsConfig, seed: u64) -> Result<Candidate> {
    let mut p = propose_batch(archive, ctx, config, seed, 1)?;
    Ok(p.candidates.remove(0))
}
