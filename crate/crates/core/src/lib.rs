//! Multi-objective Bayesian optimization driven by an ensemble of competing
//! augmented-random-search (ARS) policies trained on Gaussian-process
//! surrogates.
//!
//! The crate is organized bottom-up:
//!
//! - [`pareto`]: domain types, dominance, front extraction and normalization.
//! - [`hypervolume`]: exact and Monte-Carlo hypervolume.
//! - [`surrogate`]: per-objective Matern-5/2 GP regression.
//! - [`acquisition`]: Chebyshev scalarization, penalized reward, MC expected improvement.
//! - [`ars`]: the policy ensemble solver.
//! - [`baselines`]: Latin hypercube priors, random search and a ParEGO-style solver.
//! - [`problems`]: synthetic benchmarks and the external evaluator protocol.
//! - [`runner`]: the outer loop, persistence and run comparison.
//!
//! With the default `parallel` feature the data-parallel inner loops (rollouts,
//! multi-start searches, MC hypervolume) run on rayon; without it they run
//! sequentially and produce bit-identical results.

pub mod acquisition;
pub mod ars;
pub mod baselines;
mod error;
pub mod hypervolume;
pub mod par;
pub mod pareto;
pub mod problems;
pub mod rng;
pub mod runner;
pub mod surrogate;

pub use error::{EvalFailure, Error, Result};
