//! Experiment runners. Each takes a validated config and returns a report.

mod bernstein;
mod clt;
mod corr;
mod ess;
mod table;

use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::SimError;
use crate::report::{Check, MonteCarloReport};

pub use bernstein::{bernstein_bound, run_bernstein_check};
pub use clt::run_clt_check;
pub use corr::run_corr_sweep;
pub use ess::{run_cluster_sweep, run_ess_sweep};
pub use table::{run_table_onegen, TABLE_ONEGEN};

/// Dispatches on the experiment kind.
pub fn run(cfg: &ExperimentConfig) -> Result<MonteCarloReport, SimError> {
    cfg.validate()?;
    match cfg.experiment.kind {
        ExperimentKind::CltCheck => run_clt_check(cfg),
        ExperimentKind::CorrSweep => run_corr_sweep(cfg),
        ExperimentKind::EssSweep => run_ess_sweep(cfg),
        ExperimentKind::TableOnegen => run_table_onegen(cfg),
        ExperimentKind::ClusterSweep => run_cluster_sweep(cfg),
        ExperimentKind::BernsteinCheck => run_bernstein_check(cfg),
    }
}

/// Runs `f` for replicates `first..first + count` concurrently and returns
/// the outputs in replicate order.
pub(crate) fn replicates<T, F>(first: u64, count: usize, f: F) -> Result<Vec<T>, SimError>
where
    T: Send,
    F: Fn(u64) -> Result<T, SimError> + Sync,
{
    (0..count as u64).into_par_iter().map(|r| f(first + r)).collect()
}

pub(crate) fn verdict(check: Option<&Check>) -> &'static str {
    match check {
        Some(c) if c.passed => "PASS",
        Some(_) => "FAIL",
        None => "",
    }
}
