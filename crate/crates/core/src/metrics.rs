//! Benefit metrics for sophisticated students, comparing the matching under
//! the altered profile against the all-truthful baseline of the same
//! mechanism. All values are percentages of the sophisticated students, and
//! 0 when there are none.

use crate::mechanisms::Mechanism;
use crate::model::{Matching, PreferenceList, SchoolId, StudentId};
use crate::strategies::{AlterationPlan, StrategyKind};

/// One trial's metrics for one (mechanism, strategy, k) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub mechanism: Mechanism,
    pub strategy: StrategyKind,
    pub k_sophisticated: usize,
    pub trial_index: u64,
    /// Seed of the stream the trial's instance was generated from.
    pub trial_seed: u64,
    pub em_higher: f64,
    pub em_top3: f64,
    /// Strategy C only.
    pub em_selected: Option<f64>,
    /// Share of sophisticated students already at the selected school in the
    /// baseline. Strategy C only.
    pub baseline_selected: Option<f64>,
}

fn true_rank(true_prefs: &[PreferenceList], matching: &Matching, s: StudentId) -> usize {
    true_prefs[s.0]
        .rank_of(matching.school_of(s))
        .expect("assigned school appears in a complete list")
}

fn percentage<F: Fn(StudentId) -> bool>(soph: &[StudentId], counts: F) -> f64 {
    if soph.is_empty() {
        return 0.0;
    }
    let hits = soph.iter().filter(|&&s| counts(s)).count();
    100.0 * hits as f64 / soph.len() as f64
}

/// Share of sophisticated students whose true rank strictly improved.
pub fn em_higher(
    baseline: &Matching,
    altered: &Matching,
    soph: &[StudentId],
    true_prefs: &[PreferenceList],
) -> f64 {
    percentage(soph, |s| {
        true_rank(true_prefs, altered, s) < true_rank(true_prefs, baseline, s)
    })
}

/// Share of sophisticated students who moved into their true top 3 from
/// outside it.
pub fn em_top3(
    baseline: &Matching,
    altered: &Matching,
    soph: &[StudentId],
    true_prefs: &[PreferenceList],
) -> f64 {
    percentage(soph, |s| {
        true_rank(true_prefs, altered, s) <= 3 && true_rank(true_prefs, baseline, s) > 3
    })
}

/// Share of sophisticated students assigned to `selected`.
pub fn em_selected(matching: &Matching, soph: &[StudentId], selected: SchoolId) -> f64 {
    percentage(soph, |s| matching.school_of(s) == selected)
}

/// All metrics for one plan.
pub fn evaluate(
    mechanism: Mechanism,
    plan: &AlterationPlan,
    baseline: &Matching,
    altered: &Matching,
    true_prefs: &[PreferenceList],
    trial_index: u64,
    trial_seed: u64,
) -> MetricsRecord {
    let soph = &plan.sophisticated;
    MetricsRecord {
        mechanism,
        strategy: plan.strategy,
        k_sophisticated: soph.len(),
        trial_index,
        trial_seed,
        em_higher: em_higher(baseline, altered, soph, true_prefs),
        em_top3: em_top3(baseline, altered, soph, true_prefs),
        em_selected: plan.selected_school.map(|b| em_selected(altered, soph, b)),
        baseline_selected: plan.selected_school.map(|b| em_selected(baseline, soph, b)),
    }
}
