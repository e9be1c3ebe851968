//! Objective evaluators: built-in synthetic problems and the line-delimited
//! JSON protocol for external evaluator processes.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::pareto::{Objective, ObjectiveSpec, Param, SearchSpace};
use crate::{EvalFailure, Error, Result};

/// A deterministic map from parameter points to raw objective vectors.
pub trait Problem: Send + Sync {
    fn id(&self) -> &str;

    fn space(&self) -> &SearchSpace;

    fn objectives(&self) -> &ObjectiveSpec;

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// Reference point for per-run hypervolume traces, in normalized units.
    fn default_reference(&self) -> Vec<f64> {
        vec![1.0; self.objectives().len()]
    }

    fn known_optimum(&self) -> Option<Vec<f64>> {
        None
    }
}

/// Gaussian bumps and pits `(amplitude, width, centre)` of the foraging
/// landscape on `[0, 30]^2`; the deepest pit sits at (15, 5).
const PASSINO_TERMS: [(f64, f64, [f64; 2]); 10] = [
    (5.0, 0.1, [15.0, 20.0]),
    (-2.0, 0.08, [20.0, 15.0]),
    (3.0, 0.08, [25.0, 10.0]),
    (2.0, 0.1, [5.0, 10.0]),
    (-2.0, 0.5, [5.0, 10.0]),
    (-4.0, 0.1, [15.0, 5.0]),
    (-2.0, 0.5, [8.0, 25.0]),
    (-2.0, 0.5, [21.0, 25.0]),
    (2.0, 0.5, [25.0, 16.0]),
    (2.0, 0.5, [5.0, 14.0]),
];

/// The two-dimensional multi-modal landscape with broad flat regions.
pub fn passino_2d(point: &[f64]) -> f64 {
    let (a, b) = (point[0], point[1]);
    PASSINO_TERMS
        .iter()
        .map(|&(amp, width, [ca, cb])| amp * (-width * ((a - ca).powi(2) + (b - cb).powi(2))).exp())
        .sum()
}

pub struct Passino2d {
    space: SearchSpace,
    spec: ObjectiveSpec,
}

impl Default for Passino2d {
    fn default() -> Self {
        Passino2d {
            space: SearchSpace::new(vec![Param::linear("theta0", 0.0, 30.0), Param::linear("theta1", 0.0, 30.0)])
                .expect("valid space"),
            spec: ObjectiveSpec::new(vec![Objective::minimize("value", 1.0)]).expect("valid spec"),
        }
    }
}

impl Problem for Passino2d {
    fn id(&self) -> &str {
        "passino_2d"
    }

    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn objectives(&self) -> &ObjectiveSpec {
        &self.spec
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.space.check_dim(x)?;
        let clipped: Vec<f64> = x.iter().map(|v| v.clamp(0.0, 30.0)).collect();
        if clipped != x {
            log::warn!("passino_2d: {x:?} is outside [0, 30]^2, clipping");
        }
        Ok(vec![passino_2d(&clipped)])
    }

    fn default_reference(&self) -> Vec<f64> {
        // Above the landscape's highest peak.
        vec![6.0]
    }

    fn known_optimum(&self) -> Option<Vec<f64>> {
        Some(vec![15.0, 5.0])
    }
}

/// ZDT1 on `[0, 1]^d`.
pub fn zdt1(x: &[f64]) -> [f64; 2] {
    let f1 = x[0];
    let g = if x.len() > 1 {
        1.0 + 9.0 * x[1..].iter().sum::<f64>() / (x.len() - 1) as f64
    } else {
        1.0
    };
    [f1, g * (1.0 - (f1 / g).sqrt())]
}

/// Points on the ZDT1 Pareto front, `f2 = 1 - sqrt(f1)`.
pub fn zdt1_front(samples: usize) -> Vec<[f64; 2]> {
    (0..samples)
        .map(|i| {
            let f1 = i as f64 / (samples - 1).max(1) as f64;
            [f1, 1.0 - f1.sqrt()]
        })
        .collect()
}

/// DTLZ2 with `n` objectives on `[0, 1]^d`, `d >= n`.
pub fn dtlz2(x: &[f64], n: usize) -> Vec<f64> {
    let g: f64 = x[n - 1..].iter().map(|v| (v - 0.5).powi(2)).sum();
    let half_pi = std::f64::consts::FRAC_PI_2;
    (0..n)
        .map(|i| {
            let mut f = 1.0 + g;
            for v in &x[..n - 1 - i] {
                f *= (v * half_pi).cos();
            }
            if i > 0 {
                f *= (x[n - 1 - i] * half_pi).sin();
            }
            f
        })
        .collect()
}

pub struct Zdt1 {
    space: SearchSpace,
    spec: ObjectiveSpec,
}

impl Zdt1 {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Config("zdt1 needs dim >= 2".into()));
        }
        Ok(Zdt1 {
            space: SearchSpace::unit_cube(dim),
            spec: ObjectiveSpec::new(vec![Objective::minimize("f1", 1.0), Objective::minimize("f2", 1.0)])?,
        })
    }
}

impl Problem for Zdt1 {
    fn id(&self) -> &str {
        "zdt1"
    }

    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn objectives(&self) -> &ObjectiveSpec {
        &self.spec
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.space.check_dim(x)?;
        Ok(zdt1(x).to_vec())
    }

    fn default_reference(&self) -> Vec<f64> {
        // f2 never exceeds 10, so every evaluation counts.
        vec![1.1, 11.0]
    }

    fn known_optimum(&self) -> Option<Vec<f64>> {
        Some(vec![0.0; self.space.dim()])
    }
}

pub struct Dtlz2 {
    n: usize,
    space: SearchSpace,
    spec: ObjectiveSpec,
}

impl Dtlz2 {
    pub fn new(dim: usize, n_objectives: usize) -> Result<Self> {
        if n_objectives < 2 || dim < n_objectives {
            return Err(Error::Config("dtlz2 needs 2 <= objectives <= dim".into()));
        }
        Ok(Dtlz2 {
            n: n_objectives,
            space: SearchSpace::unit_cube(dim),
            spec: ObjectiveSpec::new((0..n_objectives).map(|i| Objective::minimize(format!("f{}", i + 1), 1.0)).collect())?,
        })
    }
}

impl Problem for Dtlz2 {
    fn id(&self) -> &str {
        "dtlz2"
    }

    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn objectives(&self) -> &ObjectiveSpec {
        &self.spec
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.space.check_dim(x)?;
        Ok(dtlz2(x, self.n))
    }

    fn default_reference(&self) -> Vec<f64> {
        let k = (self.space.dim() - self.n + 1) as f64;
        vec![1.0 + 0.25 * k + 0.1; self.n]
    }
}

pub const ROM_LIMIT_BYTES: f64 = 1024.0 * 1024.0;
pub const RAM_LIMIT_BYTES: f64 = 256.0 * 1024.0;
pub const FLOPS_LIMIT: f64 = 1e9;

/// Smooth stand-in for a train/prune/quantize pipeline over 7 training and 5
/// compression parameters, returning (accuracy, ROM bytes, RAM bytes, FLOPs).
pub struct SyntheticDnnCost {
    space: SearchSpace,
    spec: ObjectiveSpec,
}

impl Default for SyntheticDnnCost {
    fn default() -> Self {
        let space = SearchSpace::new(vec![
            Param::linear("epochs", 100.0, 500.0),
            Param::linear("batch_size", 20.0, 200.0),
            Param::log("learning_rate", 1e-5, 1e-2),
            Param::log("momentum", 0.7, 0.99),
            Param::linear("lr_schedule", 0.4, 0.9),
            Param::linear("lr_gamma", 0.4, 0.9),
            Param::log("weight_decay", 0.6, 0.99),
            Param::linear("pruning_start", 0.0, 0.6),
            Param::linear("pruning_end", 0.8, 0.95),
            Param::linear("pruning_steps", 1.0, 20.0),
            Param::linear("sparsity_conv", 0.1, 0.99),
            Param::linear("sparsity_linear", 0.1, 0.99),
        ])
        .expect("valid space");
        let spec = ObjectiveSpec::new(vec![
            Objective::maximize("accuracy", 1.0),
            Objective::minimize("rom", ROM_LIMIT_BYTES).with_bound(ROM_LIMIT_BYTES),
            Objective::minimize("ram", RAM_LIMIT_BYTES).with_bound(RAM_LIMIT_BYTES),
            Objective::minimize("flops", FLOPS_LIMIT).with_bound(FLOPS_LIMIT),
        ])
        .expect("valid spec");
        SyntheticDnnCost { space, spec }
    }
}

/// Evaluates the synthetic DNN cost model at a raw 12-vector.
pub fn synthetic_dnn_cost(x: &[f64]) -> [f64; 4] {
    let [epochs, batch, lr, momentum, schedule, gamma, decay, p_start, p_end, p_steps, s_conv, s_lin] =
        x.try_into().expect("12 parameters");

    let lr_q = (-((lr.log10() + 3.0) / 0.9).powi(2)).exp();
    let epoch_q = 1.0 - (-epochs / 150.0).exp();
    let batch_q = 1.0 - 0.08 * ((batch - 64.0) / 136.0).powi(2);
    let mom_q = 1.0 - 2.0 * (momentum - 0.9).powi(2);
    let sched_q = 1.0 - 0.1 * (schedule - 0.7).powi(2) - 0.1 * (gamma - 0.6).powi(2);
    let decay_q = 1.0 - 0.05 * (decay - 0.9).powi(2);
    let trained = 0.5 + 0.45 * lr_q * epoch_q * batch_q * mom_q * sched_q * decay_q;

    let sparsity = 0.7 * s_conv + 0.3 * s_lin;
    let gentle = (p_end - p_start) * (1.0 - (-p_steps / 5.0).exp());
    let drop = 0.6 * sparsity.powi(3) * (1.1 - 0.5 * gentle);
    let accuracy = (trained * (1.0 - drop)).clamp(0.0, 1.0);

    let rom = 1.2e6 * (1.0 - s_conv) + 0.4e6 * (1.0 - s_lin) + 30.0e3;
    let ram = 48.0 * 1024.0 + 420.0 * 1024.0 * (1.0 - s_conv) + 16.0 * 1024.0 * (1.0 - s_lin);
    let flops = 2.2e9 * (1.0 - s_conv) + 0.1e9 * (1.0 - s_lin) + 5.0e6;
    [accuracy, rom, ram, flops]
}

impl Problem for SyntheticDnnCost {
    fn id(&self) -> &str {
        "synthetic_dnn_cost"
    }

    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn objectives(&self) -> &ObjectiveSpec {
        &self.spec
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.space.check_dim(x)?;
        Ok(synthetic_dnn_cost(x).to_vec())
    }

    fn default_reference(&self) -> Vec<f64> {
        // Zero accuracy, every resource at its limit.
        vec![0.0, 1.0, 1.0, 1.0]
    }
}

fn default_timeout() -> f64 {
    3600.0
}

/// Configuration of an external evaluator process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalConfig {
    /// Program followed by its arguments.
    pub command: Vec<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    pub params: SearchSpace,
    pub objectives: ObjectiveSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_point: Option<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct Request<'a> {
    id: u64,
    params: BTreeMap<&'a str, f64>,
}

#[derive(Debug, Deserialize)]
struct Response {
    id: u64,
    #[serde(default)]
    objectives: Option<BTreeMap<String, Option<f64>>>,
    #[serde(default)]
    error: Option<String>,
}

struct Running {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

impl Running {
    fn kill(mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Talks to a child process over stdin/stdout, one JSON object per line.
///
/// The process is started lazily and reused; after a timeout or crash it is
/// killed and restarted on the next request.
pub struct ExternalEvaluator {
    config: ExternalConfig,
    next_id: AtomicU64,
    process: Mutex<Option<Running>>,
}

impl ExternalEvaluator {
    pub fn new(config: ExternalConfig) -> Result<Self> {
        if config.command.is_empty() {
            return Err(Error::Config("external evaluator needs a command".into()));
        }
        if !(config.timeout_secs > 0.0) {
            return Err(Error::Config("timeout_secs must be positive".into()));
        }
        Ok(ExternalEvaluator {
            config,
            next_id: AtomicU64::new(0),
            process: Mutex::new(None),
        })
    }

    fn spawn(&self) -> Result<Running> {
        let mut child = Command::new(&self.config.command[0])
            .args(&self.config.command[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::eval(EvalFailure::Io, format!("cannot start evaluator: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Running {
            child,
            stdin,
            lines: rx,
        })
    }

    /// Sends one request and waits for its response.
    pub fn external_evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.config.params.check_dim(x)?;
        let id = self.next_id.fetch_add(1, Ordering::SeqCst);
        let request = Request {
            id,
            params: self.config.params.names().zip(x.iter().copied()).collect(),
        };
        let line = serde_json::to_string(&request)?;

        let mut guard = self.process.lock().expect("evaluator lock");
        if guard.is_none() {
            *guard = Some(self.spawn()?);
        }
        let running = guard.as_mut().expect("running process");
        if let Err(e) = writeln!(running.stdin, "{line}").and_then(|_| running.stdin.flush()) {
            return Err(self.exit_failure(&mut guard, format!("write failed: {e}")));
        }
        let timeout = Duration::from_secs_f64(self.config.timeout_secs);
        let reply = match running.lines.recv_timeout(timeout) {
            Ok(Ok(reply)) => reply,
            Ok(Err(e)) => return Err(self.exit_failure(&mut guard, format!("read failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                if let Some(r) = guard.take() {
                    r.kill();
                }
                return Err(Error::eval(
                    EvalFailure::Timeout,
                    format!("no response to request {id} within {:.3}s", self.config.timeout_secs),
                ));
            }
            Err(RecvTimeoutError::Disconnected) => {
                return Err(self.exit_failure(&mut guard, "evaluator closed its output".into()))
            }
        };
        drop(guard);
        self.parse_response(id, &reply)
    }

    fn exit_failure(&self, guard: &mut Option<Running>, context: String) -> Error {
        let status = guard.take().map(|mut r| {
            let _ = r.child.kill();
            r.child.wait()
        });
        match status {
            Some(Ok(s)) if !s.success() => Error::eval(EvalFailure::ProcessExit, format!("{context}; exit status {s}")),
            _ => Error::eval(EvalFailure::ProcessExit, context),
        }
    }

    fn parse_response(&self, id: u64, reply: &str) -> Result<Vec<f64>> {
        let parsed: Response = match serde_json::from_str(reply) {
            Ok(r) => r,
            // Non-standard NaN/Infinity literals are read as missing values.
            Err(_) => serde_json::from_str(&replace_non_finite_literals(reply))
                .map_err(|e| Error::eval(EvalFailure::Malformed, format!("{e}: {reply}")))?,
        };
        if parsed.id != id {
            return Err(Error::eval(
                EvalFailure::Malformed,
                format!("response id {} does not match request id {id}", parsed.id),
            ));
        }
        if let Some(message) = parsed.error {
            return Err(Error::eval(EvalFailure::Reported, message));
        }
        let objectives = parsed
            .objectives
            .ok_or_else(|| Error::eval(EvalFailure::Malformed, "response has neither objectives nor error"))?;
        self.config
            .objectives
            .names()
            .map(|name| match objectives.get(name) {
                None => Err(Error::eval(EvalFailure::Malformed, format!("missing objective {name:?}"))),
                Some(Some(v)) if v.is_finite() => Ok(*v),
                Some(_) => Err(Error::eval(EvalFailure::NonFinite, format!("objective {name:?} is not finite"))),
            })
            .collect()
    }
}

fn replace_non_finite_literals(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut in_string = false;
    let mut escaped = false;
    let mut rest = s;
    while let Some(c) = rest.chars().next() {
        if in_string {
            out.push(c);
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            rest = &rest[c.len_utf8()..];
            continue;
        }
        if c == '"' {
            in_string = true;
        }
        let mut replaced = false;
        for lit in ["-Infinity", "Infinity", "NaN"] {
            if rest.starts_with(lit) {
                out.push_str("null");
                rest = &rest[lit.len()..];
                replaced = true;
                break;
            }
        }
        if !replaced {
            out.push(c);
            rest = &rest[c.len_utf8()..];
        }
    }
    out
}

impl Drop for ExternalEvaluator {
    fn drop(&mut self) {
        if let Ok(mut guard) = self.process.lock() {
            if let Some(r) = guard.take() {
                r.kill();
            }
        }
    }
}

impl Problem for ExternalEvaluator {
    fn id(&self) -> &str {
        "external"
    }

    fn space(&self) -> &SearchSpace {
        &self.config.params
    }

    fn objectives(&self) -> &ObjectiveSpec {
        &self.config.objectives
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.external_evaluate(x)
    }

    fn default_reference(&self) -> Vec<f64> {
        self.config
            .reference_point
            .clone()
            .unwrap_or_else(|| vec![1.0; self.config.objectives.len()])
    }
}

/// Problem selection as it appears in run configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum ProblemConfig {
    #[serde(rename = "passino_2d")]
    Passino2d,
    Zdt1 {
        #[serde(default = "default_zdt_dim")]
        dim: usize,
    },
    Dtlz2 {
        dim: usize,
        objectives: usize,
    },
    SyntheticDnnCost,
    External(ExternalConfig),
}

fn default_zdt_dim() -> usize {
    6
}

impl ProblemConfig {
    pub fn id(&self) -> &'static str {
        match self {
            ProblemConfig::Passino2d => "passino_2d",
            ProblemConfig::Zdt1 { .. } => "zdt1",
            ProblemConfig::Dtlz2 { .. } => "dtlz2",
            ProblemConfig::SyntheticDnnCost => "synthetic_dnn_cost",
            ProblemConfig::External(_) => "external",
        }
    }

    pub fn build(&self) -> Result<Box<dyn Problem>> {
        Ok(match self {
            ProblemConfig::Passino2d => Box::new(Passino2d::default()),
            ProblemConfig::Zdt1 { dim } => Box::new(Zdt1::new(*dim)?),
            ProblemConfig::Dtlz2 { dim, objectives } => Box::new(Dtlz2::new(*dim, *objectives)?),
            ProblemConfig::SyntheticDnnCost => Box::new(SyntheticDnnCost::default()),
            ProblemConfig::External(c) => Box::new(ExternalEvaluator::new(c.clone())?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::random_solver;
    use crate::rng::stream;

    #[test]
    fn passino_global_minimum_at_15_5() {
        let at_min = passino_2d(&[15.0, 5.0]);
        for i in 0..=300 {
            for j in 0..=300 {
                let v = passino_2d(&[i as f64 * 0.1, j as f64 * 0.1]);
                assert!(at_min <= v + 1e-12, "({}, {}) = {v} < {at_min}", i as f64 * 0.1, j as f64 * 0.1);
            }
        }
    }

    #[test]
    fn passino_grid_minimum_location() {
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        for i in 0..=600 {
            for j in 0..=600 {
                let p = [i as f64 * 0.05, j as f64 * 0.05];
                let v = passino_2d(&p);
                if v < best.0 {
                    best = (v, p);
                }
            }
        }
        let d = ((best.1[0] - 15.0).powi(2) + (best.1[1] - 5.0).powi(2)).sqrt();
        assert!(d <= 0.2, "grid minimum at {:?}", best.1);
    }

    #[test]
    fn passino_corners_are_flat() {
        let h = 1e-4;
        let grad = |p: [f64; 2]| {
            let gx = (passino_2d(&[p[0] + h, p[1]]) - passino_2d(&[p[0] - h, p[1]])) / (2.0 * h);
            let gy = (passino_2d(&[p[0], p[1] + h]) - passino_2d(&[p[0], p[1] - h])) / (2.0 * h);
            (gx * gx + gy * gy).sqrt()
        };
        let mut max_grad: f64 = 0.0;
        for i in 0..=150 {
            for j in 0..=150 {
                max_grad = max_grad.max(grad([i as f64 * 0.2, j as f64 * 0.2]));
            }
        }
        for corner in [[0.5, 0.5], [29.5, 0.5], [0.5, 29.5], [29.5, 29.5]] {
            assert!(grad(corner) < 1e-2 * max_grad, "corner {corner:?}: {} vs {max_grad}", grad(corner));
        }
    }

    #[test]
    fn passino_clips_and_is_deterministic() {
        let p = Passino2d::default();
        assert_eq!(p.evaluate(&[31.0, -1.0]).unwrap(), p.evaluate(&[30.0, 0.0]).unwrap());
        assert_eq!(p.evaluate(&[3.3, 7.7]).unwrap(), p.evaluate(&[3.3, 7.7]).unwrap());
    }

    #[test]
    fn zdt1_and_dtlz2_fronts() {
        assert_eq!(zdt1(&[0.0; 6]), [0.0, 1.0]);
        for f1 in [0.0, 0.1, 0.25, 0.5, 0.9, 1.0] {
            let mut x = vec![0.0; 6];
            x[0] = f1;
            let f = zdt1(&x);
            assert!((f[1] - (1.0 - f1.sqrt())).abs() < 1e-10);
        }
        let mut rng = stream(3, "dtlz");
        for _ in 0..50 {
            let mut x: Vec<f64> = (0..7).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
            for v in &mut x[2..] {
                *v = 0.5;
            }
            let f = dtlz2(&x, 3);
            assert!((f.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-10);
        }
        assert!(Dtlz2::new(2, 3).is_err());
    }

    fn dnn_at(sparsity: f64) -> [f64; 4] {
        synthetic_dnn_cost(&[300.0, 64.0, 1e-3, 0.9, 0.7, 0.6, 0.9, 0.1, 0.9, 10.0, sparsity, sparsity])
    }

    #[test]
    fn dnn_costs_fall_with_sparsity() {
        let lo = dnn_at(0.1);
        let hi = dnn_at(0.99);
        for k in 1..4 {
            assert!(hi[k] < lo[k]);
        }
        assert!(hi[0] < lo[0]);
        let p = SyntheticDnnCost::default();
        let mut rng = stream(4, "dnn");
        for _ in 0..2000 {
            let x = random_solver(p.space(), &mut rng);
            let f = p.evaluate(&x).unwrap();
            assert!((0.0..=1.0).contains(&f[0]));
            // No draw beats the all-0.99 sparsity corner on any cost.
            let mut corner = x.clone();
            corner[10] = 0.99;
            corner[11] = 0.99;
            let c = p.evaluate(&corner).unwrap();
            for k in 1..4 {
                assert!(c[k] <= f[k]);
            }
        }
    }

    #[test]
    fn dnn_feasible_fraction() {
        let p = SyntheticDnnCost::default();
        let mut rng = stream(5, "dnn-feas");
        let feasible = (0..10_000)
            .filter(|_| p.objectives().is_feasible(&p.evaluate(&random_solver(p.space(), &mut rng)).unwrap()))
            .count();
        let frac = feasible as f64 / 10_000.0;
        assert!((0.3..=0.7).contains(&frac), "feasible fraction {frac}");
    }

    #[test]
    fn non_finite_literals_become_null() {
        assert_eq!(
            replace_non_finite_literals(r#"{"id":1,"objectives":{"a":NaN,"b":-Infinity,"c":"NaN"}}"#),
            r#"{"id":1,"objectives":{"a":null,"b":null,"c":"NaN"}}"#
        );
    }

    #[test]
    fn problem_config_parses() {
        let c: ProblemConfig = toml::from_str("id = \"zdt1\"\ndim = 6").unwrap();
        assert_eq!(c, ProblemConfig::Zdt1 { dim: 6 });
        let c: ProblemConfig = toml::from_str("id = \"passino_2d\"").unwrap();
        assert_eq!(c.build().unwrap().id(), "passino_2d");
    }
}
