use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use ars_mobopt::hypervolume::{hypervolume_exact, hypervolume_mc, MAX_EXACT_DIM};
use ars_mobopt::par::{self, Exec};
use ars_mobopt::pareto::pareto_front;
use ars_mobopt::runner::{self, RunConfig, SolverConfig, SolverId};

#[derive(Parser)]
#[command(name = "ars-mobopt", version, about = "Multi-objective Bayesian optimization with ARS-trained acquisition agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an optimization loop for every configured seed.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Run only this seed instead of the configured list.
        #[arg(long)]
        seed: Option<u64>,
        /// ars, parego or random.
        #[arg(long)]
        solver: Option<SolverId>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare finished runs under one shared reference point.
    Compare {
        #[arg(long, num_args = 1.., required = true)]
        runs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Feasible-front hypervolume of an archive in normalized space.
    Hv {
        #[arg(long)]
        archive: PathBuf,
        /// Comma-separated reference point, e.g. 1,1,1.
        #[arg(long = "ref", value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        reference: Vec<f64>,
    },
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    par::init_thread_pool_from_env();
    match Cli::parse().command {
        Command::Run { config, seed, solver, budget, out } => {
            let mut cfg = RunConfig::from_toml_file(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            if let Some(seed) = seed {
                cfg.seeds = vec![seed];
            }
            if let Some(id) = solver {
                // Keep tuned sub-configs, switch only the solver.
                cfg.solver = SolverConfig { id, ..cfg.solver };
            }
            if let Some(budget) = budget {
                cfg.budget = budget;
            }
            if let Some(out) = out {
                cfg.out_dir = out;
            }
            for s in runner::run(&cfg)? {
                println!(
                    "{}\t{}\tseed={}\thv={}\tfeasible={}\tfailed={}\t{:.1}s",
                    s.problem.id(),
                    s.solver.as_str(),
                    s.seed,
                    s.final_hypervolume,
                    s.n_feasible,
                    s.n_failed,
                    s.wall_seconds
                );
            }
        }
        Command::Compare { runs, out } => {
            let report = runner::compare(&runs, &out)?;
            println!("reference point: {:?}", report.reference_point);
            for s in &report.solvers {
                println!(
                    "{}\truns={}\tmedian={}\tiqr={}",
                    s.solver.as_str(),
                    s.runs,
                    s.median_final_hv,
                    s.iqr_final_hv
                );
            }
        }
        Command::Hv { archive, reference } => {
            let evaluations = runner::load_archive(&archive)
                .with_context(|| format!("reading {}", archive.display()))?;
            let front: Vec<Vec<f64>> = pareto_front(&evaluations, true)
                .into_iter()
                .map(|e| e.f_norm.clone())
                .collect();
            if let Some(p) = front.iter().find(|p| p.len() != reference.len()) {
                bail!("archive has {} objectives but --ref has {}", p.len(), reference.len());
            }
            if reference.len() <= MAX_EXACT_DIM {
                println!("{}", hypervolume_exact(&front, &reference)?);
            } else {
                let lower: Vec<f64> = (0..reference.len())
                    .map(|k| front.iter().map(|p| p[k]).fold(reference[k], f64::min))
                    .collect();
                let est = hypervolume_mc(&front, &reference, &lower, 1_000_000, 0, Exec::Parallel)?;
                println!("{} +- {}", est.value, est.std_error);
            }
        }
    }
    Ok(())
}
