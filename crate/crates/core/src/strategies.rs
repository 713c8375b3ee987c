//! Sophisticated students and the three preference alterations they apply.
//!
//! Popularity targets are computed once per instance from the true profile,
//! and every sophisticated student alters their own true list independently.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::model::{Instance, PreferenceList, SchoolId, StudentId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("cannot pick {k} sophisticated students out of {n}")]
    TooManySophisticated { k: usize, n: usize },
    #[error("strategies need at least two schools, got {0}")]
    TooFewSchools(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StrategyKind {
    /// Swap ranks 1 and 2 when rank 1 is the most popular first choice.
    A,
    /// Move the most popular first choice from rank 1 to the bottom.
    B,
    /// Promote the school most often ranked in the bottom half to rank 1
    /// when it sits in one's own top half.
    C,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [StrategyKind::A, StrategyKind::B, StrategyKind::C];

    pub fn label(self) -> &'static str {
        match self {
            StrategyKind::A => "A",
            StrategyKind::B => "B",
            StrategyKind::C => "C",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown strategy (expected A, B or C)")]
pub struct ParseStrategyError;

impl FromStr for StrategyKind {
    type Err = ParseStrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(StrategyKind::A),
            "B" | "b" => Ok(StrategyKind::B),
            "C" | "c" => Ok(StrategyKind::C),
            _ => Err(ParseStrategyError),
        }
    }
}

/// Uniform `k`-subset of `0..n`, sorted ascending.
pub fn sample_sophisticated<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
) -> Result<Vec<StudentId>, StrategyError> {
    if k > n {
        return Err(StrategyError::TooManySophisticated { k, n });
    }
    let mut chosen: Vec<StudentId> = rand::seq::index::sample(rng, n, k)
        .into_iter()
        .map(StudentId)
        .collect();
    chosen.sort_unstable();
    Ok(chosen)
}

fn argmax_lowest_index(counts: &[usize]) -> SchoolId {
    let mut best = 0;
    for (j, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = j;
        }
    }
    SchoolId(best)
}

/// School ranked first by the most students; ties go to the lowest index.
///
/// # Panics
///
/// If `profile` is empty or its lists are empty.
pub fn most_popular_rank1(profile: &[PreferenceList]) -> SchoolId {
    let m = profile.first().map(PreferenceList::len).unwrap_or(0);
    assert!(m > 0, "popularity needs a nonempty profile");
    let mut counts = vec![0usize; m];
    for list in profile {
        if let Some(top) = list.first() {
            counts[top.0] += 1;
        }
    }
    argmax_lowest_index(&counts)
}

/// School placed in the bottom half (ranks `m/2 + 1 ..= m`) by the most
/// students; ties go to the lowest index.
pub fn most_bottom_half(profile: &[PreferenceList], m: usize) -> SchoolId {
    let mut counts = vec![0usize; m];
    for list in profile {
        for school in &list.as_slice()[m / 2..] {
            counts[school.0] += 1;
        }
    }
    argmax_lowest_index(&counts)
}

pub fn apply_strategy_a(list: &PreferenceList, popular: SchoolId) -> PreferenceList {
    let mut ranking = list.as_slice().to_vec();
    if ranking.len() >= 2 && ranking[0] == popular {
        ranking.swap(0, 1);
    }
    PreferenceList::new(ranking).expect("swapping preserves a permutation")
}

pub fn apply_strategy_b(list: &PreferenceList, popular: SchoolId) -> PreferenceList {
    let mut ranking = list.as_slice().to_vec();
    if ranking.first() == Some(&popular) {
        ranking.rotate_left(1);
    }
    PreferenceList::new(ranking).expect("rotation preserves a permutation")
}

pub fn apply_strategy_c(list: &PreferenceList, unpopular: SchoolId, m: usize) -> PreferenceList {
    let mut ranking = list.as_slice().to_vec();
    if let Some(pos) = ranking.iter().position(|&s| s == unpopular) {
        // top half is ranks 1..=m/2, i.e. positions 0..m/2
        if pos > 0 && pos < m / 2 {
            ranking[..=pos].rotate_right(1);
        }
    }
    PreferenceList::new(ranking).expect("rotation preserves a permutation")
}

/// The school a strategy keys on: the most popular first choice for A and
/// B, the most common bottom-half school for C.
pub fn strategy_target(strategy: StrategyKind, truth: &[PreferenceList], m: usize) -> SchoolId {
    match strategy {
        StrategyKind::A | StrategyKind::B => most_popular_rank1(truth),
        StrategyKind::C => most_bottom_half(truth, m),
    }
}

pub fn apply_strategy(
    strategy: StrategyKind,
    list: &PreferenceList,
    target: SchoolId,
    m: usize,
) -> PreferenceList {
    match strategy {
        StrategyKind::A => apply_strategy_a(list, target),
        StrategyKind::B => apply_strategy_b(list, target),
        StrategyKind::C => apply_strategy_c(list, target, m),
    }
}

/// Who is sophisticated, what they report, and which school Strategy C
/// targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlterationPlan {
    pub strategy: StrategyKind,
    /// Sorted ascending.
    pub sophisticated: Vec<StudentId>,
    pub reported: Vec<PreferenceList>,
    /// The unpopular school; set only for Strategy C.
    pub selected_school: Option<SchoolId>,
}

impl AlterationPlan {
    pub fn is_sophisticated(&self, student: StudentId) -> bool {
        self.sophisticated.binary_search(&student).is_ok()
    }
}

/// Alters the true lists of an explicit set of sophisticated students.
pub fn plan_for(
    inst: &Instance,
    strategy: StrategyKind,
    mut sophisticated: Vec<StudentId>,
) -> Result<AlterationPlan, StrategyError> {
    let m = inst.m();
    if m < 2 {
        return Err(StrategyError::TooFewSchools(m));
    }
    sophisticated.sort_unstable();
    sophisticated.dedup();
    let truth = inst.true_prefs();
    let target = strategy_target(strategy, truth, m);
    let mut reported = truth.to_vec();
    for &s in &sophisticated {
        reported[s.0] = apply_strategy(strategy, &truth[s.0], target, m);
    }
    let selected_school = (strategy == StrategyKind::C).then_some(target);
    Ok(AlterationPlan {
        strategy,
        sophisticated,
        reported,
        selected_school,
    })
}

/// Samples `k` sophisticated students uniformly and builds their plan.
pub fn build_plan<R: Rng + ?Sized>(
    inst: &Instance,
    strategy: StrategyKind,
    k: usize,
    rng: &mut R,
) -> Result<AlterationPlan, StrategyError> {
    if inst.m() < 2 {
        return Err(StrategyError::TooFewSchools(inst.m()));
    }
    let sophisticated = sample_sophisticated(rng, inst.n(), k)?;
    plan_for(inst, strategy, sophisticated)
}
