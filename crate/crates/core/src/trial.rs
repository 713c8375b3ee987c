//! Seeded trials and aggregation.
//!
//! Every random stream is seeded from a hash of the master seed, the trial
//! index, what the stream is for, and (for sophisticated sampling) the
//! strategy and the number of sophisticated students. Cells therefore never
//! share randomness, and adding or removing cells leaves the others intact.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geninst::{build_instance, GenConfig, GenError};
use crate::mechanisms::{Mechanism, MechanismError};
use crate::metrics::{evaluate, MetricsRecord};
use crate::strategies::{build_plan, StrategyError, StrategyKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrialError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("no {0} selected")]
    Empty(&'static str),
    #[error("sophisticated count {k} exceeds {n} students")]
    CountTooLarge { k: usize, n: usize },
    #[error("manipulation strategies need at least two schools")]
    TooFewSchools,
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
}

/// Everything that determines the output of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub gen: GenConfig,
    pub trials: u64,
    pub strategies: Vec<StrategyKind>,
    pub mechanisms: Vec<Mechanism>,
    pub soph_counts: Vec<usize>,
    pub master_seed: u64,
}

/// `100, 200, ..., n` (or just `n` when `n < 100`).
pub fn default_soph_counts(n: usize) -> Vec<usize> {
    let counts: Vec<usize> = (1..=n / 100).map(|i| i * 100).collect();
    if counts.is_empty() {
        alloc::vec![n]
    } else {
        counts
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        let gen = GenConfig::default();
        let soph_counts = default_soph_counts(gen.n);
        Self {
            gen,
            trials: 100,
            strategies: StrategyKind::ALL.to_vec(),
            mechanisms: Mechanism::ALL.to_vec(),
            soph_counts,
            master_seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), TrialError> {
        self.gen.validate()?;
        if self.trials == 0 {
            return Err(TrialError::NoTrials);
        }
        if self.strategies.is_empty() {
            return Err(TrialError::Empty("strategies"));
        }
        if self.mechanisms.is_empty() {
            return Err(TrialError::Empty("mechanisms"));
        }
        if self.soph_counts.is_empty() {
            return Err(TrialError::Empty("sophisticated counts"));
        }
        if let Some(&k) = self.soph_counts.iter().find(|&&k| k > self.gen.n) {
            return Err(TrialError::CountTooLarge { k, n: self.gen.n });
        }
        if self.gen.m < 2 {
            return Err(TrialError::TooFewSchools);
        }
        Ok(())
    }
}

/// What a derived random stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamPurpose {
    Instance,
    Sophisticated,
}

impl StreamPurpose {
    fn tag(self) -> u64 {
        match self {
            StreamPurpose::Instance => 1,
            StreamPurpose::Sophisticated => 2,
        }
    }
}

fn strategy_tag(strategy: Option<StrategyKind>) -> u64 {
    match strategy {
        None => 0,
        Some(StrategyKind::A) => 1,
        Some(StrategyKind::B) => 2,
        Some(StrategyKind::C) => 3,
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of the stream for one purpose within one trial.
pub fn derive_seed(
    master_seed: u64,
    trial_index: u64,
    purpose: StreamPurpose,
    strategy: Option<StrategyKind>,
    k: usize,
) -> u64 {
    [trial_index, purpose.tag(), strategy_tag(strategy), k as u64]
        .into_iter()
        .fold(splitmix64(master_seed), |h, word| splitmix64(h ^ word))
}

pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Counts of the work a trial performed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialStats {
    pub mechanism_runs: usize,
    pub baseline_runs: usize,
}

/// [`run_trial`], also reporting how many mechanism calls were made.
pub fn run_trial_with_stats(
    cfg: &SweepConfig,
    trial_index: u64,
) -> Result<(Vec<MetricsRecord>, TrialStats), TrialError> {
    cfg.validate()?;
    let mut stats = TrialStats::default();
    let trial_seed = derive_seed(
        cfg.master_seed,
        trial_index,
        StreamPurpose::Instance,
        None,
        0,
    );
    let inst = build_instance(&cfg.gen, &mut stream(trial_seed))?;
    let truth = inst.true_prefs();

    let mut baselines = Vec::with_capacity(cfg.mechanisms.len());
    for &mech in &cfg.mechanisms {
        baselines.push(mech.run(&inst, truth)?);
        stats.mechanism_runs += 1;
        stats.baseline_runs += 1;
    }

    let mut records = Vec::new();
    for &strategy in &cfg.strategies {
        for &k in &cfg.soph_counts {
            let seed = derive_seed(
                cfg.master_seed,
                trial_index,
                StreamPurpose::Sophisticated,
                Some(strategy),
                k,
            );
            let plan = build_plan(&inst, strategy, k, &mut stream(seed))?;
            for (&mech, baseline) in cfg.mechanisms.iter().zip(&baselines) {
                let altered = mech.run(&inst, &plan.reported)?;
                stats.mechanism_runs += 1;
                records.push(evaluate(
                    mech,
                    &plan,
                    baseline,
                    &altered,
                    truth,
                    trial_index,
                    trial_seed,
                ));
            }
        }
    }
    Ok((records, stats))
}

/// Builds one instance and scores every (strategy, k, mechanism) cell.
pub fn run_trial(cfg: &SweepConfig, trial_index: u64) -> Result<Vec<MetricsRecord>, TrialError> {
    run_trial_with_stats(cfg, trial_index).map(|(records, _)| records)
}

/// Per-cell means over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub mechanism: Mechanism,
    pub strategy: StrategyKind,
    pub k_sophisticated: usize,
    pub mean_em_higher: f64,
    pub mean_em_top3: f64,
    pub mean_em_selected: Option<f64>,
    pub trials: u64,
}

#[derive(Default)]
struct Sums {
    higher: f64,
    top3: f64,
    selected: Option<f64>,
    count: u64,
}

/// Averages records per (strategy, mechanism, k), summing in the order
/// given. Rows come out sorted by strategy, then mechanism, then k.
pub fn aggregate(records: &[MetricsRecord]) -> Vec<AggregateRow> {
    let mut cells: BTreeMap<(StrategyKind, Mechanism, usize), Sums> = BTreeMap::new();
    for r in records {
        let sums = cells
            .entry((r.strategy, r.mechanism, r.k_sophisticated))
            .or_default();
        sums.higher += r.em_higher;
        sums.top3 += r.em_top3;
        if let Some(sel) = r.em_selected {
            *sums.selected.get_or_insert(0.0) += sel;
        }
        sums.count += 1;
    }
    cells
        .into_iter()
        .map(|((strategy, mechanism, k), s)| {
            let count = s.count as f64;
            AggregateRow {
                mechanism,
                strategy,
                k_sophisticated: k,
                mean_em_higher: s.higher / count,
                mean_em_top3: s.top3 / count,
                mean_em_selected: s.selected.map(|v| v / count),
                trials: s.count,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tiny() -> SweepConfig {
        SweepConfig {
            gen: GenConfig::with_size(12, 3),
            trials: 1,
            strategies: StrategyKind::ALL.to_vec(),
            mechanisms: Mechanism::ALL.to_vec(),
            soph_counts: vec![0, 4, 12],
            master_seed: 17,
        }
    }

    #[test]
    fn seeds_separate_cells() {
        let base = derive_seed(1, 0, StreamPurpose::Instance, None, 0);
        assert_ne!(base, derive_seed(2, 0, StreamPurpose::Instance, None, 0));
        assert_ne!(base, derive_seed(1, 1, StreamPurpose::Instance, None, 0));
        let a = derive_seed(
            1,
            0,
            StreamPurpose::Sophisticated,
            Some(StrategyKind::A),
            100,
        );
        assert_ne!(
            a,
            derive_seed(
                1,
                0,
                StreamPurpose::Sophisticated,
                Some(StrategyKind::B),
                100
            )
        );
        assert_ne!(
            a,
            derive_seed(
                1,
                0,
                StreamPurpose::Sophisticated,
                Some(StrategyKind::A),
                200
            )
        );
        assert_eq!(
            a,
            derive_seed(
                1,
                0,
                StreamPurpose::Sophisticated,
                Some(StrategyKind::A),
                100
            )
        );
    }

    #[test]
    fn default_grid() {
        let g = default_soph_counts(2000);
        assert_eq!(g.len(), 20);
        assert_eq!((g[0], g[19]), (100, 2000));
        assert_eq!(default_soph_counts(30), vec![30]);
    }

    #[test]
    fn zero_sophisticated_gives_zero_metrics() {
        let mut cfg = tiny();
        cfg.soph_counts = vec![0];
        for r in run_trial(&cfg, 0).unwrap() {
            assert_eq!((r.em_higher, r.em_top3), (0.0, 0.0));
            assert_eq!(r.em_selected.is_some(), r.strategy == StrategyKind::C);
            assert!(r.em_selected.unwrap_or(0.0) == 0.0);
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = tiny();
        assert_eq!(run_trial(&cfg, 3).unwrap(), run_trial(&cfg, 3).unwrap());
        assert_ne!(run_trial(&cfg, 3).unwrap(), run_trial(&cfg, 4).unwrap());
    }

    #[test]
    fn baselines_run_once_per_mechanism() {
        let cfg = tiny();
        let (records, stats) = run_trial_with_stats(&cfg, 0).unwrap();
        let cells = cfg.strategies.len() * cfg.soph_counts.len();
        assert_eq!(stats.baseline_runs, cfg.mechanisms.len());
        assert_eq!(stats.mechanism_runs, cfg.mechanisms.len() * (1 + cells));
        assert_eq!(records.len(), cfg.mechanisms.len() * cells);
    }

    #[test]
    fn adding_a_strategy_leaves_other_cells_alone() {
        let mut only_a = tiny();
        only_a.strategies = vec![StrategyKind::A];
        let all = run_trial(&tiny(), 2).unwrap();
        let a = run_trial(&only_a, 2).unwrap();
        let a_from_all: Vec<_> = all
            .into_iter()
            .filter(|r| r.strategy == StrategyKind::A)
            .collect();
        assert_eq!(a, a_from_all);
    }

    #[test]
    fn config_errors_come_first() {
        let mut cfg = tiny();
        cfg.soph_counts = vec![13];
        assert_eq!(
            run_trial(&cfg, 0),
            Err(TrialError::CountTooLarge { k: 13, n: 12 })
        );
        let mut cfg = tiny();
        cfg.trials = 0;
        assert_eq!(cfg.validate(), Err(TrialError::NoTrials));
        let mut cfg = tiny();
        cfg.gen = GenConfig::with_size(3, 1);
        cfg.soph_counts = vec![1];
        assert_eq!(cfg.validate(), Err(TrialError::TooFewSchools));
        let mut cfg = tiny();
        cfg.mechanisms.clear();
        assert_eq!(cfg.validate(), Err(TrialError::Empty("mechanisms")));
    }

    #[test]
    fn aggregate_of_one_trial_is_that_trial() {
        let cfg = tiny();
        let records = run_trial(&cfg, 0).unwrap();
        let rows = aggregate(&records);
        assert_eq!(rows.len(), records.len());
        for row in &rows {
            let r = records
                .iter()
                .find(|r| {
                    (r.strategy, r.mechanism, r.k_sophisticated)
                        == (row.strategy, row.mechanism, row.k_sophisticated)
                })
                .unwrap();
            assert_eq!(row.mean_em_higher, r.em_higher);
            assert_eq!(row.mean_em_top3, r.em_top3);
            assert_eq!(row.mean_em_selected, r.em_selected);
            assert_eq!(row.trials, 1);
        }
        let keys: Vec<_> = rows
            .iter()
            .map(|r| (r.strategy, r.mechanism, r.k_sophisticated))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn aggregate_means() {
        let cfg = tiny();
        let mut records = run_trial(&cfg, 0).unwrap();
        records.extend(run_trial(&cfg, 1).unwrap());
        let rows = aggregate(&records);
        for row in rows {
            let matching: Vec<_> = records
                .iter()
                .filter(|r| {
                    (r.strategy, r.mechanism, r.k_sophisticated)
                        == (row.strategy, row.mechanism, row.k_sophisticated)
                })
                .collect();
            assert_eq!(matching.len(), 2);
            let mean = (matching[0].em_higher + matching[1].em_higher) / 2.0;
            assert!((row.mean_em_higher - mean).abs() < 1e-12);
            assert_eq!(row.trials, 2);
        }
    }
}
