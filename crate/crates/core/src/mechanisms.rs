//! The Boston (immediate acceptance) mechanism and student-proposing
//! deferred acceptance with school quotas.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::model::{Instance, Matching, PreferenceList, SchoolId, StudentId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MechanismError {
    #[error("reported profile has {got} lists for {expected} students")]
    ProfileLength { expected: usize, got: usize },
    #[error("list of student {student} ranks {len} schools, expected {m}")]
    ListLength {
        student: usize,
        len: usize,
        m: usize,
    },
    #[error("proposal queue is not a permutation of the students")]
    BadQueue,
}

fn check_profile(inst: &Instance, reported: &[PreferenceList]) -> Result<(), MechanismError> {
    if reported.len() != inst.n() {
        return Err(MechanismError::ProfileLength {
            expected: inst.n(),
            got: reported.len(),
        });
    }
    let m = inst.m();
    match reported.iter().position(|l| l.len() != m) {
        Some(student) => Err(MechanismError::ListLength {
            student,
            len: reported[student].len(),
            m,
        }),
        None => Ok(()),
    }
}

/// Immediate acceptance. Returns the matching together with the round in
/// which each student was admitted; a student admitted in round `k` holds
/// the school at rank `k` of their reported list.
pub fn boston_with_rounds(
    inst: &Instance,
    reported: &[PreferenceList],
) -> Result<(Matching, Vec<usize>), MechanismError> {
    check_profile(inst, reported)?;
    let (n, m) = (inst.n(), inst.m());
    let mut assignment: Vec<Option<SchoolId>> = vec![None; n];
    let mut round_of = vec![0; n];
    let mut remaining = inst.capacities().to_vec();
    let mut applicants: Vec<Vec<StudentId>> = vec![Vec::new(); m];
    let mut unassigned: Vec<StudentId> = inst.students().collect();

    for round in 1..=m {
        if unassigned.is_empty() {
            break;
        }
        for &s in &unassigned {
            let school = reported[s.0].as_slice()[round - 1];
            applicants[school.0].push(s);
        }
        for (j, pool) in applicants.iter_mut().enumerate() {
            if pool.is_empty() {
                continue;
            }
            let priority = inst.priority(SchoolId(j));
            pool.sort_unstable_by_key(|&s| priority.position(s));
            let admitted = remaining[j].min(pool.len());
            for &s in &pool[..admitted] {
                assignment[s.0] = Some(SchoolId(j));
                round_of[s.0] = round;
            }
            remaining[j] -= admitted;
            pool.clear();
        }
        unassigned.retain(|s| assignment[s.0].is_none());
    }

    let assignment: Vec<SchoolId> = assignment
        .into_iter()
        .map(|a| a.expect("total capacity equals the number of students"))
        .collect();
    Ok((Matching::from_assignment(assignment, m), round_of))
}

pub fn boston(inst: &Instance, reported: &[PreferenceList]) -> Result<Matching, MechanismError> {
    boston_with_rounds(inst, reported).map(|(matching, _)| matching)
}

/// Student-proposing deferred acceptance, students queued in index order.
pub fn deferred_acceptance(
    inst: &Instance,
    reported: &[PreferenceList],
) -> Result<Matching, MechanismError> {
    let queue: Vec<StudentId> = inst.students().collect();
    deferred_acceptance_with_queue(inst, reported, &queue)
}

/// Deferred acceptance with an explicit initial proposal queue. Rejected
/// students rejoin at the back. The result does not depend on `queue`.
pub fn deferred_acceptance_with_queue(
    inst: &Instance,
    reported: &[PreferenceList],
    queue: &[StudentId],
) -> Result<Matching, MechanismError> {
    check_profile(inst, reported)?;
    let (n, m) = (inst.n(), inst.m());
    let mut seen = vec![false; n];
    if queue.len() != n
        || queue
            .iter()
            .any(|s| s.0 >= n || core::mem::replace(&mut seen[s.0], true))
    {
        return Err(MechanismError::BadQueue);
    }

    let mut next = vec![0usize; n];
    // max-heap on priority position: the top is the weakest held student
    let mut held: Vec<BinaryHeap<(usize, StudentId)>> = inst
        .capacities()
        .iter()
        .map(|&q| BinaryHeap::with_capacity(q))
        .collect();
    let mut free: VecDeque<StudentId> = queue.iter().copied().collect();

    while let Some(s) = free.pop_front() {
        let school = reported[s.0]
            .at_rank(next[s.0] + 1)
            .expect("a student cannot be rejected by every school");
        next[s.0] += 1;
        let j = school.0;
        let pos = inst.priority(school).position(s);
        if held[j].len() < inst.capacity(school) {
            held[j].push((pos, s));
        } else if held[j].peek().is_some_and(|&(worst, _)| worst > pos) {
            let (_, displaced) = held[j].pop().expect("school is full");
            held[j].push((pos, s));
            free.push_back(displaced);
        } else {
            free.push_back(s);
        }
    }

    let mut assignment = vec![SchoolId(0); n];
    for (j, heap) in held.iter().enumerate() {
        for &(_, s) in heap {
            assignment[s.0] = SchoolId(j);
        }
    }
    Ok(Matching::from_assignment(assignment, m))
}

/// Selects one of the two mechanisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mechanism {
    Boston,
    DeferredAcceptance,
}

impl Mechanism {
    pub const ALL: [Mechanism; 2] = [Mechanism::Boston, Mechanism::DeferredAcceptance];

    pub fn run(
        self,
        inst: &Instance,
        reported: &[PreferenceList],
    ) -> Result<Matching, MechanismError> {
        match self {
            Mechanism::Boston => boston(inst, reported),
            Mechanism::DeferredAcceptance => deferred_acceptance(inst, reported),
        }
    }

    /// Short name used in CSV output.
    pub fn label(self) -> &'static str {
        match self {
            Mechanism::Boston => "boston",
            Mechanism::DeferredAcceptance => "da",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown mechanism (expected `boston` or `da`)")]
pub struct ParseMechanismError;

impl FromStr for Mechanism {
    type Err = ParseMechanismError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "boston" => Ok(Mechanism::Boston),
            "da" => Ok(Mechanism::DeferredAcceptance),
            _ => Err(ParseMechanismError),
        }
    }
}
