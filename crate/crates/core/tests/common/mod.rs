#![allow(dead_code)]

use std::path::PathBuf;

use ars_mobopt::ars::ArsConfig;
use ars_mobopt::problems::{ExternalConfig, ProblemConfig};
use ars_mobopt::pareto::{Objective, ObjectiveSpec, Param, SearchSpace};
use ars_mobopt::runner::{RunConfig, SolverId};

/// A run small enough for a unit-test time budget.
pub fn quick_config(problem: ProblemConfig, solver: SolverId, budget: usize) -> RunConfig {
    let mut c = RunConfig::new(problem, solver);
    c.budget = budget;
    c.seeds = vec![7];
    c.solver.gp.restarts = 2;
    c.solver.gp.iterations = 40;
    c.solver.base_samples = 16;
    c.solver.ars = ArsConfig {
        n_directions: 8,
        max_train_steps: 3,
        n_agents: 3,
        hidden: 16,
        ..ArsConfig::default()
    };
    c.solver.parego.starts = 8;
    c
}

pub fn echo_script() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/echo_evaluator.py")
}

/// Two-parameter loopback problem whose objectives echo the parameters.
pub fn echo_config(extra_args: &[&str], timeout_secs: f64) -> ExternalConfig {
    let mut command = vec!["python3".to_string(), echo_script().display().to_string()];
    command.extend(extra_args.iter().map(|s| s.to_string()));
    ExternalConfig {
        command,
        timeout_secs,
        params: SearchSpace::new(vec![Param::linear("a", -1.0, 1.0), Param::log("b", 1e-6, 1e3)]).unwrap(),
        objectives: ObjectiveSpec::new(vec![Objective::minimize("f1", 1.0), Objective::minimize("f2", 1e3)]).unwrap(),
        reference_point: Some(vec![1.0, 1.0]),
    }
}
