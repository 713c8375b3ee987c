#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use schoolchoice_core::geninst::generate_capacities;
use schoolchoice_core::{Instance, PreferenceList, SchoolId, SchoolPriority, StudentId};

/// Uniformly random lists and priorities (random classes, random order
/// within class) with random capacities summing to `n`.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, m: usize) -> Instance {
    let capacities = generate_capacities(rng, n, m).unwrap();
    let prefs = (0..n).map(|_| random_list(rng, m)).collect();
    let priorities = (0..m).map(|_| random_priority(rng, n)).collect();
    Instance::new(capacities, prefs, priorities).unwrap()
}

pub fn random_list<R: Rng>(rng: &mut R, m: usize) -> PreferenceList {
    let mut ids: Vec<SchoolId> = (0..m).map(SchoolId).collect();
    ids.shuffle(rng);
    PreferenceList::new(ids).unwrap()
}

pub fn random_priority<R: Rng>(rng: &mut R, n: usize) -> SchoolPriority {
    let classes: Vec<u8> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
    let mut order: Vec<StudentId> = (0..n).map(StudentId).collect();
    order.shuffle(rng);
    order.sort_by_key(|s| classes[s.0]);
    SchoolPriority::new(classes, order).unwrap()
}

pub fn random_profile<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<PreferenceList> {
    (0..n).map(|_| random_list(rng, m)).collect()
}
