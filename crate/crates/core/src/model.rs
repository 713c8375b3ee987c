//! Domain types for the school choice problem: students, schools, preference
//! lists, school priorities, instances and matchings.
//!
//! Ids are 0-based. Ranks are 1-based: rank 1 is the head of a list.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Index of a student, dense in `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StudentId(pub usize);

/// Index of a school, dense in `0..m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SchoolId(pub usize);

impl StudentId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl SchoolId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StudentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

impl fmt::Display for SchoolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("preference list of length {len} is not a permutation of 0..{m}")]
    NotAPermutation { len: usize, m: usize },
    #[error("school {school} out of range for {m} schools")]
    SchoolOutOfRange { school: usize, m: usize },
    #[error("priority order is not a permutation of 0..{n}")]
    PriorityNotAPermutation { n: usize },
    #[error("priority class {class} for student {student} outside 1..=4")]
    ClassOutOfRange { student: usize, class: u8 },
    #[error("priority order puts class {later} after class {earlier}")]
    OrderViolatesClasses { earlier: u8, later: u8 },
    #[error("expected {expected} {what}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("school {school} has zero capacity")]
    ZeroCapacity { school: usize },
    #[error("capacities sum to {sum}, expected {n}")]
    CapacitySum { sum: usize, n: usize },
}

fn is_permutation<I: IntoIterator<Item = usize>>(items: I, len: usize) -> bool {
    let mut seen = vec![false; len];
    let mut count = 0;
    for i in items {
        if i >= len || seen[i] {
            return false;
        }
        seen[i] = true;
        count += 1;
    }
    count == len
}

/// A strict ranking of all `m` schools. Position 0 holds rank 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreferenceList(Vec<SchoolId>);

impl PreferenceList {
    pub fn new(ranking: Vec<SchoolId>) -> Result<Self, ModelError> {
        let m = ranking.len();
        if !is_permutation(ranking.iter().map(|s| s.0), m) {
            return Err(ModelError::NotAPermutation { len: m, m });
        }
        Ok(Self(ranking))
    }

    /// Builds a list from raw school indices.
    pub fn from_indices(ranking: &[usize]) -> Result<Self, ModelError> {
        Self::new(ranking.iter().copied().map(SchoolId).collect())
    }

    /// `[b0, b1, ..., b(m-1)]`.
    pub fn identity(m: usize) -> Self {
        Self((0..m).map(SchoolId).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[SchoolId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<SchoolId> {
        self.0
    }

    /// School at 1-based `rank`, if in range.
    pub fn at_rank(&self, rank: usize) -> Option<SchoolId> {
        rank.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    pub fn first(&self) -> Option<SchoolId> {
        self.0.first().copied()
    }

    /// 1-based rank of `school` in this list.
    pub fn rank_of(&self, school: SchoolId) -> Result<usize, ModelError> {
        self.0
            .iter()
            .position(|&s| s == school)
            .map(|p| p + 1)
            .ok_or(ModelError::SchoolOutOfRange {
                school: school.0,
                m: self.0.len(),
            })
    }

    /// Whether `a` is strictly preferred to `b`.
    pub fn prefers(&self, a: SchoolId, b: SchoolId) -> bool {
        for &s in &self.0 {
            if s == a {
                return a != b;
            }
            if s == b {
                return false;
            }
        }
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = SchoolId> + '_ {
        self.0.iter().copied()
    }
}

/// Free-function form of [`PreferenceList::rank_of`].
pub fn rank_of(list: &PreferenceList, school: SchoolId) -> Result<usize, ModelError> {
    list.rank_of(school)
}

/// Lowest (best) priority class.
pub const HIGHEST_CLASS: u8 = 1;
/// Highest (worst) priority class.
pub const LOWEST_CLASS: u8 = 4;

/// One school's view of the students: a coarse class per student plus a
/// strict order that refines the classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchoolPriority {
    classes: Vec<u8>,
    strict_order: Vec<StudentId>,
    // position of each student in strict_order, 0 = top priority
    position: Vec<usize>,
}

impl SchoolPriority {
    pub fn new(classes: Vec<u8>, strict_order: Vec<StudentId>) -> Result<Self, ModelError> {
        let n = classes.len();
        if strict_order.len() != n {
            return Err(ModelError::LengthMismatch {
                what: "students in priority order",
                expected: n,
                got: strict_order.len(),
            });
        }
        if let Some((student, &class)) = classes
            .iter()
            .enumerate()
            .find(|(_, &c)| !(HIGHEST_CLASS..=LOWEST_CLASS).contains(&c))
        {
            return Err(ModelError::ClassOutOfRange { student, class });
        }
        if !is_permutation(strict_order.iter().map(|s| s.0), n) {
            return Err(ModelError::PriorityNotAPermutation { n });
        }
        for pair in strict_order.windows(2) {
            let (earlier, later) = (classes[pair[0].0], classes[pair[1].0]);
            if earlier > later {
                return Err(ModelError::OrderViolatesClasses { earlier, later });
            }
        }
        let mut position = vec![0; n];
        for (pos, s) in strict_order.iter().enumerate() {
            position[s.0] = pos;
        }
        Ok(Self {
            classes,
            strict_order,
            position,
        })
    }

    /// A priority where every student shares class 1 and the order is given.
    pub fn from_order(order: &[usize]) -> Result<Self, ModelError> {
        Self::new(
            vec![HIGHEST_CLASS; order.len()],
            order.iter().copied().map(StudentId).collect(),
        )
    }

    pub fn classes(&self) -> &[u8] {
        &self.classes
    }

    pub fn class_of(&self, student: StudentId) -> u8 {
        self.classes[student.0]
    }

    pub fn strict_order(&self) -> &[StudentId] {
        &self.strict_order
    }

    /// 0-based position in the strict order; smaller is higher priority.
    pub fn position(&self, student: StudentId) -> usize {
        self.position[student.0]
    }

    pub fn ranks_above(&self, a: StudentId, b: StudentId) -> bool {
        self.position[a.0] < self.position[b.0]
    }
}

/// A location in the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Where the synthetic features of an instance came from. Only kept for
/// debugging; mechanisms never look at it.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub student_positions: Vec<Point>,
    pub school_positions: Vec<Point>,
    pub siblings: Vec<Option<SchoolId>>,
    pub tiers: Vec<u8>,
}

/// A complete school choice problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    capacities: Vec<usize>,
    true_prefs: Vec<PreferenceList>,
    priorities: Vec<SchoolPriority>,
    provenance: Option<Provenance>,
}

impl Instance {
    pub fn new(
        capacities: Vec<usize>,
        true_prefs: Vec<PreferenceList>,
        priorities: Vec<SchoolPriority>,
    ) -> Result<Self, ModelError> {
        let n = true_prefs.len();
        let m = capacities.len();
        if priorities.len() != m {
            return Err(ModelError::LengthMismatch {
                what: "school priorities",
                expected: m,
                got: priorities.len(),
            });
        }
        for p in &true_prefs {
            if p.len() != m {
                return Err(ModelError::NotAPermutation { len: p.len(), m });
            }
        }
        for p in &priorities {
            if p.classes.len() != n {
                return Err(ModelError::LengthMismatch {
                    what: "students in priority",
                    expected: n,
                    got: p.classes.len(),
                });
            }
        }
        if let Some(school) = capacities.iter().position(|&q| q == 0) {
            return Err(ModelError::ZeroCapacity { school });
        }
        let sum: usize = capacities.iter().sum();
        if sum != n {
            return Err(ModelError::CapacitySum { sum, n });
        }
        Ok(Self {
            capacities,
            true_prefs,
            priorities,
            provenance: None,
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn n(&self) -> usize {
        self.true_prefs.len()
    }

    pub fn m(&self) -> usize {
        self.capacities.len()
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn capacity(&self, school: SchoolId) -> usize {
        self.capacities[school.0]
    }

    pub fn true_prefs(&self) -> &[PreferenceList] {
        &self.true_prefs
    }

    pub fn priorities(&self) -> &[SchoolPriority] {
        &self.priorities
    }

    pub fn priority(&self, school: SchoolId) -> &SchoolPriority {
        &self.priorities[school.0]
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn students(&self) -> impl Iterator<Item = StudentId> {
        (0..self.n()).map(StudentId)
    }

    pub fn schools(&self) -> impl Iterator<Item = SchoolId> {
        (0..self.m()).map(SchoolId)
    }
}

/// An assignment of students to schools, stored in both directions.
///
/// Mechanisms only emit total, capacity-respecting matchings. The raw
/// constructor exists so that [`validate_matching`] can be exercised on
/// broken inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    assignment: Vec<Option<SchoolId>>,
    roster: Vec<Vec<StudentId>>,
}

impl Matching {
    /// Builds a matching from a total assignment; rosters are derived and
    /// sorted by student id.
    pub fn from_assignment(assignment: Vec<SchoolId>, m: usize) -> Self {
        let mut roster = vec![Vec::new(); m];
        for (s, school) in assignment.iter().enumerate() {
            roster[school.0].push(StudentId(s));
        }
        Self {
            assignment: assignment.into_iter().map(Some).collect(),
            roster,
        }
    }

    /// Unchecked constructor; see [`validate_matching`].
    pub fn from_parts(assignment: Vec<Option<SchoolId>>, roster: Vec<Vec<StudentId>>) -> Self {
        Self { assignment, roster }
    }

    pub fn get(&self, student: StudentId) -> Option<SchoolId> {
        self.assignment.get(student.0).copied().flatten()
    }

    /// School of `student`.
    ///
    /// # Panics
    ///
    /// If the student is unassigned, which no mechanism output allows.
    pub fn school_of(&self, student: StudentId) -> SchoolId {
        match self.get(student) {
            Some(s) => s,
            None => panic!("{student} is unassigned"),
        }
    }

    pub fn roster(&self, school: SchoolId) -> &[StudentId] {
        &self.roster[school.0]
    }

    pub fn assignment(&self) -> &[Option<SchoolId>] {
        &self.assignment
    }

    pub fn num_students(&self) -> usize {
        self.assignment.len()
    }
}

/// First invariant a matching breaks, with the offending id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchingViolation {
    /// Assignment vector or roster vector has the wrong length.
    Shape {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    Unassigned {
        student: StudentId,
    },
    UnknownSchool {
        student: StudentId,
        school: usize,
    },
    OverCapacity {
        school: SchoolId,
        size: usize,
        capacity: usize,
    },
    /// Roster and assignment disagree about this pair.
    RosterMismatch {
        school: SchoolId,
        student: StudentId,
    },
}

impl fmt::Display for MatchingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shape {
                what,
                expected,
                got,
            } => {
                write!(f, "shape: expected {expected} {what}, got {got}")
            }
            Self::Unassigned { student } => write!(f, "totality: {student} is unassigned"),
            Self::UnknownSchool { student, school } => {
                write!(f, "totality: {student} assigned to unknown school {school}")
            }
            Self::OverCapacity {
                school,
                size,
                capacity,
            } => write!(f, "capacity: {school} holds {size} > {capacity}"),
            Self::RosterMismatch { school, student } => {
                write!(f, "roster: {school} and {student} disagree")
            }
        }
    }
}

/// Checks totality, capacity and roster consistency, in that order.
pub fn validate_matching(inst: &Instance, matching: &Matching) -> Result<(), MatchingViolation> {
    let (n, m) = (inst.n(), inst.m());
    if matching.assignment.len() != n {
        return Err(MatchingViolation::Shape {
            what: "assignments",
            expected: n,
            got: matching.assignment.len(),
        });
    }
    if matching.roster.len() != m {
        return Err(MatchingViolation::Shape {
            what: "rosters",
            expected: m,
            got: matching.roster.len(),
        });
    }
    for (s, slot) in matching.assignment.iter().enumerate() {
        let student = StudentId(s);
        match slot {
            None => return Err(MatchingViolation::Unassigned { student }),
            Some(b) if b.0 >= m => {
                return Err(MatchingViolation::UnknownSchool {
                    student,
                    school: b.0,
                })
            }
            Some(_) => {}
        }
    }
    let mut counts = vec![0usize; m];
    for b in matching.assignment.iter().flatten() {
        counts[b.0] += 1;
    }
    for (j, &size) in counts.iter().enumerate() {
        if size > inst.capacities[j] {
            return Err(MatchingViolation::OverCapacity {
                school: SchoolId(j),
                size,
                capacity: inst.capacities[j],
            });
        }
    }
    let mut listed = vec![false; n];
    for (j, roster) in matching.roster.iter().enumerate() {
        let school = SchoolId(j);
        for &student in roster {
            let ok = student.0 < n
                && !listed[student.0]
                && matching.assignment[student.0] == Some(school);
            if !ok {
                return Err(MatchingViolation::RosterMismatch { school, student });
            }
            listed[student.0] = true;
        }
    }
    if let Some(s) = listed.iter().position(|&l| !l) {
        let student = StudentId(s);
        return Err(MatchingViolation::RosterMismatch {
            school: matching.school_of(student),
            student,
        });
    }
    Ok(())
}
