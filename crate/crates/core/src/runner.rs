//! The outer optimization loop, run persistence and cross-run comparison.
//!
//! A run directory holds, per seed, `archive.jsonl` (one [`Evaluation`] per
//! line, byte-identical across repeats of the same seed), `trace.csv`
//! (`sample,feasible,hv,<objective names...>`), `trace_detail.jsonl` (weights,
//! normalized objectives, wall-clock) and `summary.json`.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::acquisition::{draw_weights, Incumbent, DEFAULT_RHO};
use crate::ars::{self, ArsConfig, RewardContext};
use crate::baselines::{self, ParegoConfig};
use crate::par::{self, Exec};
use crate::pareto::{Direction, Evaluation, ParetoArchive, Source};
use crate::problems::{Problem, ProblemConfig};
use crate::rng::{iteration_stream, mix64, stream};
use crate::surrogate::{BaseSampleKind, BaseSamples, GpConfig, GpModel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverId {
    #[default]
    Ars,
    Parego,
    Random,
}

impl SolverId {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverId::Ars => "ars",
            SolverId::Parego => "parego",
            SolverId::Random => "random",
        }
    }
}

impl std::str::FromStr for SolverId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ars" => Ok(SolverId::Ars),
            "parego" => Ok(SolverId::Parego),
            "random" => Ok(SolverId::Random),
            other => Err(Error::Config(format!("unknown solver {other:?} (ars | parego | random)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub id: SolverId,
    pub ars: ArsConfig,
    pub parego: ParegoConfig,
    pub gp: GpConfig,
    /// Posterior draws per MC reward/EI estimate.
    pub base_samples: usize,
    pub base_sample_kind: BaseSampleKind,
    pub rho: f64,
}

impl SolverConfig {
    pub fn with_id(id: SolverId) -> Self {
        SolverConfig {
            id,
            base_samples: 64,
            rho: DEFAULT_RHO,
            ..Default::default()
        }
    }
}

fn default_budget() -> usize {
    150
}
fn default_priors() -> usize {
    10
}
fn default_seeds() -> Vec<u64> {
    vec![0, 1, 2, 3, 4]
}
fn default_out() -> PathBuf {
    PathBuf::from("runs")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default = "default_solver")]
    pub solver: SolverConfig,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_priors")]
    pub n_priors: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    /// Normalized-space reference point; the problem's default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_point: Option<Vec<f64>>,
    /// Explicit prior points (raw units) used instead of a Latin hypercube.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior_points: Option<Vec<Vec<f64>>>,
    /// How seeds are scheduled; each seed's loop is always sequential.
    #[serde(default)]
    pub seed_exec: Exec,
}

fn default_solver() -> SolverConfig {
    SolverConfig::with_id(SolverId::Ars)
}

impl RunConfig {
    pub fn new(problem: ProblemConfig, solver: SolverId) -> Self {
        RunConfig {
            problem,
            solver: SolverConfig::with_id(solver),
            budget: default_budget(),
            n_priors: default_priors(),
            seeds: default_seeds(),
            out_dir: default_out(),
            reference_point: None,
            prior_points: None,
            seed_exec: Exec::Parallel,
        }
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut config: RunConfig = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        // Zero means "not given" for fields whose serde default is zero.
        if config.solver.base_samples == 0 {
            config.solver.base_samples = 64;
        }
        if config.solver.rho == 0.0 {
            config.solver.rho = DEFAULT_RHO;
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must not be empty".into()));
        }
        let n_priors = self.prior_points.as_ref().map_or(self.n_priors, Vec::len);
        if n_priors == 0 || n_priors >= self.budget {
            return Err(Error::Config(format!(
                "need 0 < n_priors < budget, got {n_priors} priors for budget {}",
                self.budget
            )));
        }
        if self.solver.base_samples == 0 {
            return Err(Error::Config("base_samples must be >= 1".into()));
        }
        if self.solver.id == SolverId::Ars {
            self.solver.ars.validate()?;
        }
        Ok(())
    }

    pub fn seed_dir(&self, seed: u64) -> PathBuf {
        self.out_dir.join(format!("seed-{seed}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub sample: usize,
    pub f_raw: Vec<f64>,
    pub f_norm: Vec<f64>,
    pub feasible: bool,
    pub failed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    pub hv: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub problem: ProblemConfig,
    pub solver: SolverId,
    pub seed: u64,
    pub budget: usize,
    pub n_priors: usize,
    pub objective_names: Vec<String>,
    pub reference_point: Vec<f64>,
    pub final_hypervolume: f64,
    /// Best raw value per objective over feasible evaluations (null if none).
    pub best_per_objective: Vec<Option<f64>>,
    pub n_feasible: usize,
    pub n_failed: usize,
    /// Samples where the solver fell back to a random proposal.
    pub n_fallbacks: usize,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub archive: ParetoArchive,
    pub trace: Vec<TraceRow>,
    pub summary: RunSummary,
}

struct ProposalOutcome {
    x: Vec<f64>,
    lambda: Option<Vec<f64>>,
    fallback: bool,
}

fn propose_next(
    config: &RunConfig,
    problem: &dyn Problem,
    archive: &ParetoArchive,
    seed: u64,
    sample: usize,
) -> Result<ProposalOutcome> {
    let space = problem.space();
    let random = |why: &str| {
        if !why.is_empty() {
            log::info!("sample {sample}: {why}; proposing a random point");
        }
        baselines::random_solver(space, &mut iteration_stream(seed, "random", sample))
    };
    let solver = &config.solver;
    if solver.id == SolverId::Random {
        return Ok(ProposalOutcome {
            x: random(""),
            lambda: None,
            fallback: false,
        });
    }
    let (xs, ys): (Vec<Vec<f64>>, Vec<Vec<f64>>) = archive.successful().map(|e| (e.x.clone(), e.f_norm.clone())).unzip();
    if xs.len() < 2 {
        return Ok(ProposalOutcome {
            x: random("fewer than two successful evaluations"),
            lambda: None,
            fallback: true,
        });
    }
    let model = match GpModel::fit(space, &xs, &ys, &solver.gp, &mut iteration_stream(seed, "gp", sample)) {
        Ok(m) => m,
        Err(e @ Error::Conditioning { .. }) => {
            return Ok(ProposalOutcome {
                x: random(&format!("GP fit failed ({e})")),
                lambda: None,
                fallback: true,
            })
        }
        Err(e) => return Err(e),
    };
    let n = problem.objectives().len();
    let base = BaseSamples::new(solver.base_sample_kind, solver.base_samples, n, &mut iteration_stream(seed, "base", sample))?;
    let weights = draw_weights(&mut iteration_stream(seed, "lambda", sample), n, solver.rho);
    let solver_seed = mix64(seed ^ mix64(0x5eed_0000 + sample as u64));
    match solver.id {
        SolverId::Ars => {
            let incumbent = Incumbent::from_archive(archive, &weights).expect("successful evaluations exist");
            let ctx = RewardContext {
                model: &model,
                base: &base,
                weights: &weights,
                incumbent: &incumbent,
            };
            let proposal = ars::propose_batch(archive, &ctx, &solver.ars, solver_seed, 1)?;
            Ok(ProposalOutcome {
                x: proposal.candidates[0].x.clone(),
                lambda: Some(weights.lambda().to_vec()),
                fallback: proposal.fallback,
            })
        }
        SolverId::Parego => {
            let lambda = weights.lambda().to_vec();
            let p = baselines::parego_with_weights(archive, &model, &base, weights, &solver.parego, solver_seed)?;
            Ok(ProposalOutcome {
                x: p.x,
                lambda: Some(lambda),
                fallback: p.fallback,
            })
        }
        SolverId::Random => unreachable!(),
    }
}

fn evaluate_into(problem: &dyn Problem, x: Vec<f64>, index: usize, source: Source) -> Result<Evaluation> {
    match problem.evaluate(&x) {
        Ok(f) => {
            if f.len() != problem.objectives().len() {
                return Err(Error::Dimension {
                    expected: problem.objectives().len(),
                    actual: f.len(),
                });
            }
            if f.iter().any(|v| !v.is_finite()) {
                log::warn!("sample {index}: non-finite objectives {f:?}");
                return Ok(Evaluation::failed(index, source, x, "non-finite objective"));
            }
            Ok(Evaluation::new(index, source, x, f, problem.objectives()))
        }
        Err(Error::Evaluation { kind, message }) => {
            log::warn!("sample {index}: evaluation failed ({kind}): {message}");
            Ok(Evaluation::failed(index, source, x, format!("{kind}: {message}")))
        }
        Err(e) => Err(e),
    }
}

/// Runs the optimization loop for one seed against `problem`, without
/// touching the filesystem.
pub fn run_seed(config: &RunConfig, problem: &dyn Problem, seed: u64) -> Result<RunArtifacts> {
    config.validate()?;
    let started = Instant::now();
    let spec = problem.objectives();
    let space = problem.space();
    let reference = config.reference_point.clone().unwrap_or_else(|| problem.default_reference());
    if reference.len() != spec.len() {
        return Err(Error::Dimension {
            expected: spec.len(),
            actual: reference.len(),
        });
    }
    let mut archive = ParetoArchive::new(reference.clone());
    let mut trace = Vec::with_capacity(config.budget);
    let mut fallbacks = 0;

    let priors = match &config.prior_points {
        Some(points) => {
            for p in points {
                space.check_dim(p)?;
            }
            points.clone()
        }
        None => baselines::latin_hypercube(config.n_priors, space, &mut stream(seed, "prior")),
    };

    let mut push = |archive: &mut ParetoArchive, eval: Evaluation, lambda: Option<Vec<f64>>| -> Result<()> {
        let row = TraceRow {
            sample: eval.index,
            f_raw: eval.f_raw.clone(),
            f_norm: eval.f_norm.clone(),
            feasible: eval.feasible,
            failed: eval.is_failed(),
            lambda,
            hv: 0.0,
            wall_seconds: 0.0,
        };
        archive.push(eval);
        let hv = archive.feasible_hypervolume()?;
        trace.push(TraceRow {
            hv,
            wall_seconds: started.elapsed().as_secs_f64(),
            ..row
        });
        Ok(())
    };

    for (i, x) in priors.into_iter().enumerate() {
        let eval = evaluate_into(problem, x, i, Source::Prior)?;
        push(&mut archive, eval, None)?;
    }
    let source = match config.solver.id {
        SolverId::Ars => Source::Solver,
        SolverId::Parego | SolverId::Random => Source::Baseline,
    };
    for sample in archive.len()..config.budget {
        let proposal = propose_next(config, problem, &archive, seed, sample)?;
        debug_assert!(space.contains(&proposal.x));
        fallbacks += usize::from(proposal.fallback);
        let eval = evaluate_into(problem, proposal.x, sample, source)?;
        push(&mut archive, eval, proposal.lambda)?;
        log::debug!("seed {seed} sample {sample} evaluated");
    }

    let best_per_objective = spec
        .objectives()
        .iter()
        .enumerate()
        .map(|(j, o)| {
            let vals = archive.successful().filter(|e| e.feasible).map(|e| e.f_raw[j]);
            match o.direction {
                Direction::Minimize => vals.reduce(f64::min),
                Direction::Maximize => vals.reduce(f64::max),
            }
        })
        .collect();
    let summary = RunSummary {
        problem: config.problem.clone(),
        solver: config.solver.id,
        seed,
        budget: config.budget,
        n_priors: config.prior_points.as_ref().map_or(config.n_priors, Vec::len),
        objective_names: spec.names().map(str::to_owned).collect(),
        reference_point: reference,
        final_hypervolume: trace.last().map_or(0.0, |r| r.hv),
        best_per_objective,
        n_feasible: archive.successful().filter(|e| e.feasible).count(),
        n_failed: archive.evaluations().iter().filter(|e| e.is_failed()).count(),
        n_fallbacks: fallbacks,
        wall_seconds: started.elapsed().as_secs_f64(),
    };
    Ok(RunArtifacts { archive, trace, summary })
}

/// Writes the per-seed files into `dir`.
pub fn write_artifacts(dir: &Path, artifacts: &RunArtifacts) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(File::create(dir.join("archive.jsonl"))?);
    for e in artifacts.archive.evaluations() {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;

    let mut w = BufWriter::new(File::create(dir.join("trace.csv"))?);
    write!(w, "sample,feasible,hv")?;
    for name in &artifacts.summary.objective_names {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    for row in &artifacts.trace {
        write!(w, "{},{},{}", row.sample, row.feasible, row.hv)?;
        if row.failed {
            for _ in &artifacts.summary.objective_names {
                write!(w, ",")?;
            }
        } else {
            for v in &row.f_raw {
                write!(w, ",{v}")?;
            }
        }
        writeln!(w)?;
    }
    w.flush()?;

    let mut w = BufWriter::new(File::create(dir.join("trace_detail.jsonl"))?);
    for row in &artifacts.trace {
        serde_json::to_writer(&mut w, row)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;

    let mut w = BufWriter::new(File::create(dir.join("summary.json"))?);
    serde_json::to_writer_pretty(&mut w, &artifacts.summary)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Runs every seed of `config` and writes `out_dir/seed-<seed>/`.
pub fn run(config: &RunConfig) -> Result<Vec<RunSummary>> {
    config.validate()?;
    fs::create_dir_all(&config.out_dir)?;
    fs::write(
        config.out_dir.join("config.toml"),
        toml::to_string_pretty(config).map_err(|e| Error::Config(e.to_string()))?,
    )?;
    let results = par::map_indexed(config.seeds.len(), config.seed_exec, |i| -> Result<RunSummary> {
        let seed = config.seeds[i];
        let problem = config.problem.build()?;
        let artifacts = run_seed(config, problem.as_ref(), seed)?;
        write_artifacts(&config.seed_dir(seed), &artifacts)?;
        log::info!(
            "{} on {}: seed {seed} final hv {} ({:.1}s)",
            config.solver.id.as_str(),
            problem.id(),
            artifacts.summary.final_hypervolume,
            artifacts.summary.wall_seconds
        );
        Ok(artifacts.summary)
    });
    results.into_iter().collect()
}

pub fn load_archive(path: &Path) -> Result<Vec<Evaluation>> {
    let file = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for line in file.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

pub fn load_summary(dir: &Path) -> Result<RunSummary> {
    Ok(serde_json::from_reader(BufReader::new(File::open(dir.join("summary.json"))?))?)
}

/// Feasible hypervolume after each prefix of `evaluations` (in file order).
pub fn hv_trace(evaluations: &[Evaluation], reference: &[f64]) -> Result<Vec<f64>> {
    let mut archive = ParetoArchive::new(reference.to_vec());
    evaluations
        .iter()
        .map(|e| {
            archive.push(e.clone());
            archive.feasible_hypervolume()
        })
        .collect()
}

/// Reads `trace.csv` back into `(sample, feasible, hv)` triples.
pub fn load_trace_hv(path: &Path) -> Result<Vec<(usize, bool, f64)>> {
    let text = fs::read_to_string(path)?;
    let bad = |l: &str| Error::Config(format!("malformed trace row {l:?}"));
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let mut cols = l.split(',');
            let sample = cols.next().and_then(|v| v.parse().ok()).ok_or_else(|| bad(l))?;
            let feasible = cols.next().and_then(|v| v.parse().ok()).ok_or_else(|| bad(l))?;
            let hv = cols.next().and_then(|v| v.parse().ok()).ok_or_else(|| bad(l))?;
            Ok((sample, feasible, hv))
        })
        .collect()
}

/// A loaded seed run.
#[derive(Debug, Clone)]
pub struct LoadedRun {
    pub dir: PathBuf,
    pub summary: RunSummary,
    pub evaluations: Vec<Evaluation>,
}

/// Expands each path to the seed directories beneath it (a directory with
/// `archive.jsonl` is itself a seed directory).
pub fn discover_runs(paths: &[PathBuf]) -> Result<Vec<LoadedRun>> {
    let mut dirs = Vec::new();
    for p in paths {
        if p.join("archive.jsonl").is_file() {
            dirs.push(p.clone());
            continue;
        }
        let mut children: Vec<PathBuf> = fs::read_dir(p)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|c| c.join("archive.jsonl").is_file())
            .collect();
        if children.is_empty() {
            return Err(Error::Config(format!("no runs found under {}", p.display())));
        }
        children.sort();
        dirs.extend(children);
    }
    dirs.into_iter()
        .map(|dir| {
            Ok(LoadedRun {
                summary: load_summary(&dir)?,
                evaluations: load_archive(&dir.join("archive.jsonl"))?,
                dir,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub solver: SolverId,
    pub runs: usize,
    pub median_final_hv: f64,
    pub q1_final_hv: f64,
    pub q3_final_hv: f64,
    pub iqr_final_hv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub solver: SolverId,
    pub seed: u64,
    pub dir: PathBuf,
    pub hv: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub reference_point: Vec<f64>,
    pub solvers: Vec<SolverStats>,
    pub traces: Vec<RunTrace>,
}

impl ComparisonReport {
    pub fn stats(&self, solver: SolverId) -> Option<&SolverStats> {
        self.solvers.iter().find(|s| s.solver == solver)
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Recomputes all traces against one shared reference point: the
/// componentwise maximum of the feasible normalized objectives of every run.
pub fn compare_runs(runs: &[LoadedRun]) -> Result<ComparisonReport> {
    let first = runs.first().ok_or_else(|| Error::Config("no runs to compare".into()))?;
    for r in runs {
        if r.summary.problem != first.summary.problem {
            return Err(Error::Config(format!(
                "{} ran a different problem than {}",
                r.dir.display(),
                first.dir.display()
            )));
        }
    }
    let n = first.summary.objective_names.len();
    let mut reference = vec![f64::NEG_INFINITY; n];
    let mut any_feasible = false;
    for e in runs.iter().flat_map(|r| &r.evaluations).filter(|e| !e.is_failed() && e.feasible) {
        any_feasible = true;
        for (r, v) in reference.iter_mut().zip(&e.f_norm) {
            *r = r.max(*v);
        }
    }
    if !any_feasible {
        reference = first.summary.reference_point.clone();
    }
    let traces: Vec<RunTrace> = runs
        .iter()
        .map(|r| {
            Ok(RunTrace {
                solver: r.summary.solver,
                seed: r.summary.seed,
                dir: r.dir.clone(),
                hv: hv_trace(&r.evaluations, &reference)?,
            })
        })
        .collect::<Result<_>>()?;
    let mut solvers: Vec<SolverId> = traces.iter().map(|t| t.solver).collect();
    solvers.sort_by_key(|s| s.as_str());
    solvers.dedup();
    let stats = solvers
        .into_iter()
        .map(|solver| {
            let mut finals: Vec<f64> = traces
                .iter()
                .filter(|t| t.solver == solver)
                .map(|t| t.hv.last().copied().unwrap_or(0.0))
                .collect();
            finals.sort_by(f64::total_cmp);
            let (q1, med, q3) = (quantile(&finals, 0.25), quantile(&finals, 0.5), quantile(&finals, 0.75));
            SolverStats {
                solver,
                runs: finals.len(),
                median_final_hv: med,
                q1_final_hv: q1,
                q3_final_hv: q3,
                iqr_final_hv: q3 - q1,
            }
        })
        .collect();
    Ok(ComparisonReport {
        reference_point: reference,
        solvers: stats,
        traces,
    })
}

/// Writes `comparison.json`, `final_hv.csv`, `hv_vs_sample.csv` (long
/// format, one row per run and sample) and `hv_median_by_solver.csv`.
pub fn write_comparison(out: &Path, report: &ComparisonReport) -> Result<()> {
    fs::create_dir_all(out)?;
    serde_json::to_writer_pretty(BufWriter::new(File::create(out.join("comparison.json"))?), report)?;

    let mut w = BufWriter::new(File::create(out.join("final_hv.csv"))?);
    writeln!(w, "solver,runs,median,q1,q3,iqr")?;
    for s in &report.solvers {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            s.solver.as_str(),
            s.runs,
            s.median_final_hv,
            s.q1_final_hv,
            s.q3_final_hv,
            s.iqr_final_hv
        )?;
    }
    w.flush()?;

    let mut w = BufWriter::new(File::create(out.join("hv_vs_sample.csv"))?);
    writeln!(w, "solver,seed,sample,hv")?;
    for t in &report.traces {
        for (i, hv) in t.hv.iter().enumerate() {
            writeln!(w, "{},{},{},{}", t.solver.as_str(), t.seed, i, hv)?;
        }
    }
    w.flush()?;

    let mut w = BufWriter::new(File::create(out.join("hv_median_by_solver.csv"))?);
    let solvers: Vec<SolverId> = report.solvers.iter().map(|s| s.solver).collect();
    write!(w, "sample")?;
    for s in &solvers {
        write!(w, ",{}", s.as_str())?;
    }
    writeln!(w)?;
    let longest = report.traces.iter().map(|t| t.hv.len()).max().unwrap_or(0);
    for i in 0..longest {
        write!(w, "{i}")?;
        for s in &solvers {
            let mut vals: Vec<f64> = report
                .traces
                .iter()
                .filter(|t| t.solver == *s)
                .filter_map(|t| t.hv.get(i).copied())
                .collect();
            vals.sort_by(f64::total_cmp);
            if vals.is_empty() {
                write!(w, ",")?;
            } else {
                write!(w, ",{}", quantile(&vals, 0.5))?;
            }
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Loads `paths`, compares them and writes the report into `out`.
pub fn compare(paths: &[PathBuf], out: &Path) -> Result<ComparisonReport> {
    let runs = discover_runs(paths)?;
    let report = compare_runs(&runs)?;
    write_comparison(out, &report)?;
    Ok(report)
}
