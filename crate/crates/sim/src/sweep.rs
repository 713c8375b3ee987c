//! Runs trials on a worker pool and averages them.

use rayon::prelude::*;
use rayon::ThreadPoolBuilder;
use schoolchoice_core::metrics::MetricsRecord;
use schoolchoice_core::trial::{aggregate, run_trial, AggregateRow, SweepConfig, TrialError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Trial(#[from] TrialError),
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// All per-trial records plus their per-cell means.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    /// Trial-index order, then the order [`run_trial`] emits.
    pub records: Vec<MetricsRecord>,
    pub rows: Vec<AggregateRow>,
}

/// Runs `cfg.trials` trials on `jobs` workers. Output does not depend on
/// `jobs`: records are merged in trial-index order before averaging.
pub fn run_sweep(cfg: &SweepConfig, jobs: usize) -> Result<SweepOutput, SweepError> {
    cfg.validate()?;
    if jobs == 0 {
        return Err(SweepError::NoWorkers);
    }
    let per_trial: Vec<Vec<MetricsRecord>> = if jobs == 1 {
        (0..cfg.trials)
            .map(|t| run_trial(cfg, t))
            .collect::<Result<_, _>>()?
    } else {
        let pool = ThreadPoolBuilder::new().num_threads(jobs).build()?;
        pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| run_trial(cfg, t))
                .collect::<Result<_, _>>()
        })?
    };
    let records: Vec<MetricsRecord> = per_trial.into_iter().flatten().collect();
    let rows = aggregate(&records);
    Ok(SweepOutput { records, rows })
}
