//! Brute-force verifiers. Nothing here calls into the mechanism code except
//! through the function a caller passes in, so these checks can catch
//! mechanism bugs.

use alloc::vec::Vec;

use itertools::Itertools;
use thiserror::Error;

use crate::model::{Instance, Matching, PreferenceList, SchoolId, SchoolPriority, StudentId};

/// Largest school count [`exhaustive_best_response`] will enumerate (6! = 720
/// reports per student).
pub const MAX_ENUMERATION_SCHOOLS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError<E> {
    #[error("refusing to enumerate {m}! reports (limit is {MAX_ENUMERATION_SCHOOLS} schools)")]
    TooManySchools { m: usize },
    #[error("student {0} out of range")]
    UnknownStudent(usize),
    #[error("mechanism failed: {0}")]
    Mechanism(E),
}

/// Every (student, school) pair that blocks `matching` under `reported`
/// preferences and the schools' strict priorities, sorted by student then
/// school. Inspects all `n * m` pairs.
pub fn find_blocking_pairs(
    inst: &Instance,
    reported: &[PreferenceList],
    matching: &Matching,
) -> Vec<(StudentId, SchoolId)> {
    let mut pairs = Vec::new();
    for s in inst.students() {
        let current = matching.get(s);
        let list = &reported[s.0];
        for b in inst.schools() {
            let wants = match current {
                Some(c) => list.prefers(b, c),
                None => true,
            };
            if !wants {
                continue;
            }
            let roster = matching.roster(b);
            let priority: &SchoolPriority = inst.priority(b);
            let admits = roster.len() < inst.capacity(b)
                || roster.iter().any(|&t| priority.ranks_above(s, t));
            if admits {
                pairs.push((s, b));
            }
        }
    }
    pairs
}

/// Outcome of searching all reports of one student.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponse {
    pub student: StudentId,
    pub truthful_school: SchoolId,
    pub truthful_rank: usize,
    /// Best school reachable by any report, judged by the true list.
    pub best_school: SchoolId,
    pub best_rank: usize,
    /// First report (in lexicographic order) that reaches `best_school`.
    pub misreport: PreferenceList,
}

impl BestResponse {
    pub fn is_profitable(&self) -> bool {
        self.best_rank < self.truthful_rank
    }
}

/// Runs `mechanism` once for each of the `m!` lists `student` could report,
/// everyone else truthful, and keeps the outcome the student truly likes
/// best.
pub fn exhaustive_best_response<F, E>(
    inst: &Instance,
    mut mechanism: F,
    student: StudentId,
) -> Result<BestResponse, OracleError<E>>
where
    F: FnMut(&Instance, &[PreferenceList]) -> Result<Matching, E>,
{
    let m = inst.m();
    if m > MAX_ENUMERATION_SCHOOLS {
        return Err(OracleError::TooManySchools { m });
    }
    if student.0 >= inst.n() {
        return Err(OracleError::UnknownStudent(student.0));
    }
    let truth = &inst.true_prefs()[student.0];
    let rank = |school: SchoolId| truth.rank_of(school).expect("complete list");

    let mut profile = inst.true_prefs().to_vec();
    let truthful_school = mechanism(inst, &profile)
        .map_err(OracleError::Mechanism)?
        .school_of(student);
    let mut best: Option<(SchoolId, PreferenceList)> = None;
    for order in (0..m).permutations(m) {
        let report = PreferenceList::from_indices(&order).expect("permutation");
        profile[student.0] = report.clone();
        let school = mechanism(inst, &profile)
            .map_err(OracleError::Mechanism)?
            .school_of(student);
        if best.as_ref().is_none_or(|(b, _)| rank(school) < rank(*b)) {
            best = Some((school, report));
        }
    }
    let (best_school, misreport) = best.expect("at least one report exists");
    Ok(BestResponse {
        student,
        truthful_school,
        truthful_rank: rank(truthful_school),
        best_school,
        best_rank: rank(best_school),
        misreport,
    })
}

/// Students with a profitable unilateral misreport.
pub fn profitable_deviations<F, E>(
    inst: &Instance,
    mut mechanism: F,
) -> Result<Vec<BestResponse>, OracleError<E>>
where
    F: FnMut(&Instance, &[PreferenceList]) -> Result<Matching, E>,
{
    let mut found = Vec::new();
    for s in inst.students() {
        let br = exhaustive_best_response(inst, &mut mechanism, s)?;
        if br.is_profitable() {
            found.push(br);
        }
    }
    Ok(found)
}

/// A fixed instance on which a student gains by misreporting under Boston.
#[derive(Debug, Clone)]
pub struct Witness {
    pub instance: Instance,
    pub student: StudentId,
    pub misreport: PreferenceList,
    /// True rank under truthful reporting.
    pub truthful_rank: usize,
    /// True rank after misreporting.
    pub manipulated_rank: usize,
}

impl Witness {
    /// Ranks gained by misreporting.
    pub fn gain(&self) -> usize {
        self.truthful_rank - self.manipulated_rank
    }

    /// The full reported profile with the witness student's misreport.
    pub fn manipulated_profile(&self) -> Vec<PreferenceList> {
        let mut profile = self.instance.true_prefs().to_vec();
        profile[self.student.0] = self.misreport.clone();
        profile
    }
}

/// Three students, three unit-capacity schools.
///
/// True lists: a0 and a1 rank b0 > b1 > b2, a2 ranks b1 > b0 > b2. Priorities:
/// b0 ranks a0 > a1 > a2, b1 ranks a1 > a2 > a0, b2 ranks a0 > a1 > a2.
/// Truthful Boston sends a1 to b2; reporting b1 first gets a1 into b1.
pub fn witness_instance() -> Witness {
    let list = |ix: &[usize]| PreferenceList::from_indices(ix).expect("permutation");
    let order = |ix: &[usize]| SchoolPriority::from_order(ix).expect("permutation");
    let instance = Instance::new(
        alloc::vec![1, 1, 1],
        alloc::vec![list(&[0, 1, 2]), list(&[0, 1, 2]), list(&[1, 0, 2])],
        alloc::vec![order(&[0, 1, 2]), order(&[1, 2, 0]), order(&[0, 1, 2])],
    )
    .expect("valid witness instance");
    Witness {
        instance,
        student: StudentId(1),
        misreport: list(&[1, 0, 2]),
        truthful_rank: 3,
        manipulated_rank: 2,
    }
}
