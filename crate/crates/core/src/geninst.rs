//! Synthetic instance generation.
//!
//! Students and schools are dropped uniformly in the unit square. A student's
//! score for a school is a weighted sum of four features in `[0, 1]`:
//! normalized distance, absence of a sibling at the school, normalized tier
//! and a uniform random factor. Lower scores are preferred. Schools rank
//! students only by distance, discretized into four priority classes, with
//! ties inside a class broken by a fresh uniform key.

use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use thiserror::Error;

pub use crate::model::Point;
use crate::model::{
    Instance, ModelError, PreferenceList, Provenance, SchoolId, SchoolPriority, StudentId,
};

/// Largest distance between two points of the unit square.
pub const MAX_DISTANCE: f64 = core::f64::consts::SQRT_2;

const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("need at least as many students as schools (n = {n}, m = {m})")]
    TooFewStudents { n: usize, m: usize },
    #[error("need at least one school")]
    NoSchools,
    #[error("feature weights must be non-negative and sum to 1 (sum = {sum})")]
    Weights { sum: f64 },
    #[error("tier probabilities must be non-negative and sum to 1 (sum = {sum})")]
    TierProbs { sum: f64 },
    #[error("priority bins must rise strictly from 0 to 1")]
    Bins,
    #[error("sibling probability {0} outside [0, 1]")]
    SiblingProb(f64),
    #[error("feature {name} = {value} outside its domain")]
    Feature { name: &'static str, value: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Weights of the four student-side features.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureWeights {
    pub distance: f64,
    pub sibling: f64,
    pub tier: f64,
    pub random: f64,
}

impl Default for FeatureWeights {
    fn default() -> Self {
        Self {
            distance: 0.5,
            sibling: 0.2,
            tier: 0.2,
            random: 0.1,
        }
    }
}

impl FeatureWeights {
    fn sum(&self) -> f64 {
        self.distance + self.sibling + self.tier + self.random
    }

    fn all_non_negative(&self) -> bool {
        [self.distance, self.sibling, self.tier, self.random]
            .iter()
            .all(|&w| w >= 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    pub m: usize,
    pub weights: FeatureWeights,
    pub sibling_prob: f64,
    /// Probabilities of tiers 1 through 4.
    pub tier_probs: [f64; 4],
    /// Boundaries of the four priority classes.
    pub priority_bins: [f64; 5],
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n: 2000,
            m: 20,
            weights: FeatureWeights::default(),
            sibling_prob: 0.5,
            tier_probs: [0.1, 0.2, 0.3, 0.4],
            priority_bins: [0.0, 0.3, 0.5, 0.7, 1.0],
        }
    }
}

impl GenConfig {
    pub fn with_size(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.m == 0 {
            return Err(GenError::NoSchools);
        }
        if self.n < self.m {
            return Err(GenError::TooFewStudents {
                n: self.n,
                m: self.m,
            });
        }
        let sum = self.weights.sum();
        if !self.weights.all_non_negative() || (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(GenError::Weights { sum });
        }
        let sum: f64 = self.tier_probs.iter().sum();
        if self.tier_probs.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(GenError::TierProbs { sum });
        }
        let bins = &self.priority_bins;
        if bins[0] != 0.0 || bins[4] != 1.0 || bins.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GenError::Bins);
        }
        if !(0.0..=1.0).contains(&self.sibling_prob) {
            return Err(GenError::SiblingProb(self.sibling_prob));
        }
        Ok(())
    }
}

pub fn sample_point<R: Rng + ?Sized>(rng: &mut R) -> Point {
    let x = rng.gen::<f64>();
    let y = rng.gen::<f64>();
    Point { x, y }
}

/// Euclidean distance.
pub fn distance(p: Point, q: Point) -> f64 {
    libm::hypot(p.x - q.x, p.y - q.y)
}

/// Distance scaled into `[0, 1]` by the diagonal of the unit square.
pub fn normalized_distance(p: Point, q: Point) -> f64 {
    (distance(p, q) / MAX_DISTANCE).min(1.0)
}

fn check_unit(name: &'static str, value: f64) -> Result<(), GenError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(GenError::Feature { name, value })
    }
}

/// Weighted score of one school for one student; lower is better.
///
/// `tier` is 1 (top) through 4 and maps linearly onto `[0, 1]`.
pub fn student_pref_value(
    dist_norm: f64,
    sibling_at_school: bool,
    tier: u8,
    rand: f64,
    weights: &FeatureWeights,
) -> Result<f64, GenError> {
    check_unit("distance", dist_norm)?;
    check_unit("random", rand)?;
    if !(1..=4).contains(&tier) {
        return Err(GenError::Feature {
            name: "tier",
            value: f64::from(tier),
        });
    }
    let no_sibling = if sibling_at_school { 0.0 } else { 1.0 };
    let tier_norm = f64::from(tier - 1) / 3.0;
    Ok(weights.distance * dist_norm
        + weights.sibling * no_sibling
        + weights.tier * tier_norm
        + weights.random * rand)
}

/// Schools sorted by ascending score, ties to the lower index.
pub fn rank_by_score(scores: &[f64]) -> PreferenceList {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    PreferenceList::from_indices(&order).expect("sorted indices form a permutation")
}

/// Student preference lists from fixed features. `random_factors[s][j]` is
/// the random feature of school `j` for student `s`.
pub fn prefs_from_features(
    features: &Provenance,
    weights: &FeatureWeights,
    random_factors: &[Vec<f64>],
) -> Result<Vec<PreferenceList>, GenError> {
    let m = features.school_positions.len();
    features
        .student_positions
        .iter()
        .zip(&features.siblings)
        .zip(random_factors)
        .map(|((&home, sibling), factors)| {
            let scores = (0..m)
                .map(|j| {
                    student_pref_value(
                        normalized_distance(home, features.school_positions[j]),
                        *sibling == Some(SchoolId(j)),
                        features.tiers[j],
                        factors[j],
                        weights,
                    )
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(rank_by_score(&scores))
        })
        .collect()
}

/// Draws the random factors (student-major) and ranks schools for every
/// student.
pub fn build_student_prefs<R: Rng + ?Sized>(
    features: &Provenance,
    weights: &FeatureWeights,
    rng: &mut R,
) -> Result<Vec<PreferenceList>, GenError> {
    let m = features.school_positions.len();
    let factors: Vec<Vec<f64>> = features
        .student_positions
        .iter()
        .map(|_| (0..m).map(|_| rng.gen::<f64>()).collect())
        .collect();
    prefs_from_features(features, weights, &factors)
}

/// Class of a normalized distance under left-closed bins; the last bin is
/// closed on the right.
pub fn priority_class(value: f64, bins: &[f64; 5]) -> u8 {
    let mut class = 1;
    for &edge in &bins[1..4] {
        if value >= edge {
            class += 1;
        }
    }
    class
}

/// Priority of one school from per-student normalized distances and
/// per-student tie-break keys.
pub fn priority_from_keys(
    distances: &[f64],
    keys: &[f64],
    bins: &[f64; 5],
) -> Result<SchoolPriority, ModelError> {
    let classes: Vec<u8> = distances.iter().map(|&d| priority_class(d, bins)).collect();
    let mut order: Vec<usize> = (0..distances.len()).collect();
    order.sort_by(|&a, &b| {
        classes[a]
            .cmp(&classes[b])
            .then_with(|| keys[a].total_cmp(&keys[b]))
            .then(a.cmp(&b))
    });
    SchoolPriority::new(classes, order.into_iter().map(StudentId).collect())
}

/// One priority per school. Draws one tie-break key per (school, student),
/// school-major.
pub fn build_school_priorities<R: Rng + ?Sized>(
    student_positions: &[Point],
    school_positions: &[Point],
    bins: &[f64; 5],
    rng: &mut R,
) -> Result<Vec<SchoolPriority>, ModelError> {
    school_positions
        .iter()
        .map(|&school| {
            let distances: Vec<f64> = student_positions
                .iter()
                .map(|&home| normalized_distance(school, home))
                .collect();
            let keys: Vec<f64> = student_positions.iter().map(|_| rng.gen::<f64>()).collect();
            priority_from_keys(&distances, &keys, bins)
        })
        .collect()
}

/// One seat per school, then the remaining `n - m` seats one at a time to a
/// uniformly chosen school.
pub fn generate_capacities<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
) -> Result<Vec<usize>, GenError> {
    if m == 0 {
        return Err(GenError::NoSchools);
    }
    if n < m {
        return Err(GenError::TooFewStudents { n, m });
    }
    let mut capacities = vec![1; m];
    for _ in m..n {
        capacities[rng.gen_range(0..m)] += 1;
    }
    Ok(capacities)
}

/// Generates a full instance. Draw order: student positions, school
/// positions, siblings, tiers, student random factors, school tie-break
/// keys, capacities.
pub fn build_instance<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Result<Instance, GenError> {
    cfg.validate()?;
    let (n, m) = (cfg.n, cfg.m);
    let student_positions: Vec<Point> = (0..n).map(|_| sample_point(rng)).collect();
    let school_positions: Vec<Point> = (0..m).map(|_| sample_point(rng)).collect();
    let siblings: Vec<Option<SchoolId>> = (0..n)
        .map(|_| {
            rng.gen_bool(cfg.sibling_prob)
                .then(|| SchoolId(rng.gen_range(0..m)))
        })
        .collect();
    let tier_dist = WeightedIndex::new(cfg.tier_probs).map_err(|_| GenError::TierProbs {
        sum: cfg.tier_probs.iter().sum(),
    })?;
    let tiers: Vec<u8> = (0..m).map(|_| tier_dist.sample(rng) as u8 + 1).collect();
    let features = Provenance {
        student_positions,
        school_positions,
        siblings,
        tiers,
    };
    let true_prefs = build_student_prefs(&features, &cfg.weights, rng)?;
    let priorities = build_school_priorities(
        &features.student_positions,
        &features.school_positions,
        &cfg.priority_bins,
        rng,
    )?;
    let capacities = generate_capacities(rng, n, m)?;
    Ok(Instance::new(capacities, true_prefs, priorities)?.with_provenance(features))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn points_lie_in_unit_square_and_are_reproducible() {
        let mut a = rng(7);
        for _ in 0..1000 {
            let p = sample_point(&mut a);
            assert!((0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y));
        }
        assert_eq!(sample_point(&mut rng(3)), sample_point(&mut rng(3)));
    }

    #[test]
    fn mean_x_is_one_half() {
        // 3 sigma of the mean of 10^4 U(0,1) draws: 3 * sqrt(1/12) / 100 = 0.00866
        let mut r = rng(11);
        let mean = (0..10_000).map(|_| sample_point(&mut r).x).sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn distance_examples() {
        let o = Point::new(0.0, 0.0);
        assert_eq!(distance(o, o), 0.0);
        assert!((distance(o, Point::new(1.0, 1.0)) - core::f64::consts::SQRT_2).abs() < 1e-9);
        assert!((distance(o, Point::new(0.3, 0.4)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pref_value_examples() {
        let w = FeatureWeights::default();
        assert_eq!(student_pref_value(0.0, true, 1, 0.0, &w), Ok(0.0));
        assert!((student_pref_value(1.0, false, 4, 1.0, &w).unwrap() - 1.0).abs() < 1e-12);
        // 0.5*0.5 + 0.2*1 + 0.2*(1/3) + 0.1*0.5
        let v = student_pref_value(0.5, false, 2, 0.5, &w).unwrap();
        assert!((v - 0.566_666_666_7).abs() < 1e-9, "{v}");
    }

    #[test]
    fn pref_value_rejects_out_of_domain_features() {
        let w = FeatureWeights::default();
        assert!(student_pref_value(1.5, true, 1, 0.0, &w).is_err());
        assert!(student_pref_value(0.5, true, 0, 0.0, &w).is_err());
        assert!(student_pref_value(0.5, true, 5, 0.0, &w).is_err());
        assert!(student_pref_value(0.5, true, 1, -0.1, &w).is_err());
    }

    fn features(
        student: Point,
        schools: &[Point],
        sibling: Option<usize>,
        tiers: &[u8],
    ) -> Provenance {
        Provenance {
            student_positions: vec![student],
            school_positions: schools.to_vec(),
            siblings: vec![sibling.map(SchoolId)],
            tiers: tiers.to_vec(),
        }
    }

    #[test]
    fn identical_schools_tie_break_by_index() {
        let p = Point::new(0.5, 0.5);
        let f = features(Point::new(0.0, 0.5), &[p, p], None, &[2, 2]);
        let prefs = prefs_from_features(&f, &FeatureWeights::default(), &[vec![0.3, 0.3]]).unwrap();
        assert_eq!(prefs[0], PreferenceList::from_indices(&[0, 1]).unwrap());
    }

    #[test]
    fn closer_school_ranks_first() {
        let f = features(
            Point::new(0.0, 0.0),
            &[Point::new(1.0, 1.0), Point::new(0.0, 0.0)],
            None,
            &[1, 1],
        );
        let prefs = prefs_from_features(&f, &FeatureWeights::default(), &[vec![0.5, 0.5]]).unwrap();
        assert_eq!(prefs[0].first(), Some(SchoolId(1)));
    }

    #[test]
    fn three_school_order_matches_hand_scores() {
        // student at origin
        // b0 at (0.6, 0.8): dist 1.0, norm 0.70711; tier 1; no sibling; rand 0.2
        //    0.5*0.70711 + 0.2 + 0 + 0.02 = 0.57355
        // b1 at (0.3, 0.4): dist 0.5, norm 0.35355; tier 4; sibling; rand 0.9
        //    0.5*0.35355 + 0 + 0.2 + 0.09 = 0.46678
        // b2 at (0, 0): dist 0; tier 3; no sibling; rand 0.0
        //    0 + 0.2 + 0.2*(2/3) + 0 = 0.33333
        let f = features(
            Point::new(0.0, 0.0),
            &[
                Point::new(0.6, 0.8),
                Point::new(0.3, 0.4),
                Point::new(0.0, 0.0),
            ],
            Some(1),
            &[1, 4, 3],
        );
        let prefs =
            prefs_from_features(&f, &FeatureWeights::default(), &[vec![0.2, 0.9, 0.0]]).unwrap();
        assert_eq!(prefs[0], PreferenceList::from_indices(&[2, 1, 0]).unwrap());
    }

    #[test]
    fn class_boundaries() {
        let bins = GenConfig::default().priority_bins;
        assert_eq!(priority_class(0.0, &bins), 1);
        assert_eq!(priority_class(0.3, &bins), 2);
        assert_eq!(priority_class(0.7, &bins), 4);
        assert_eq!(priority_class(1.0, &bins), 4);
        let classes: Vec<u8> = [0.1, 0.35, 0.55, 0.9]
            .iter()
            .map(|&v| priority_class(v, &bins))
            .collect();
        assert_eq!(classes, vec![1, 2, 3, 4]);
    }

    #[test]
    fn priority_orders_by_class_then_key() {
        let bins = GenConfig::default().priority_bins;
        let p = priority_from_keys(&[0.9, 0.1, 0.2, 0.4], &[0.0, 0.8, 0.1, 0.5], &bins).unwrap();
        let order: Vec<usize> = p.strict_order().iter().map(|s| s.0).collect();
        assert_eq!(order, vec![2, 1, 3, 0]);
        assert_eq!(p.classes(), &[4, 1, 1, 2]);
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(generate_capacities(&mut rng(0), 3, 3), Ok(vec![1, 1, 1]));
        assert_eq!(generate_capacities(&mut rng(0), 5, 1), Ok(vec![5]));
        assert_eq!(
            generate_capacities(&mut rng(0), 2, 3),
            Err(GenError::TooFewStudents { n: 2, m: 3 })
        );
    }

    #[test]
    fn capacity_remainder_is_binomial() {
        // q_j - 1 ~ Binomial(1980, 1/20): mean 99, sd sqrt(1980 * 0.05 * 0.95) = 9.698
        // 1000 draws of school 0: mean of (q_0 - 1) within 99 +- 3 * 9.698 / sqrt(1000)
        let mut r = rng(5);
        let mut total = 0usize;
        for _ in 0..1000 {
            let q = generate_capacities(&mut r, 2000, 20).unwrap();
            assert_eq!(q.iter().sum::<usize>(), 2000);
            assert!(q.iter().all(|&c| c >= 1));
            total += q[0] - 1;
        }
        let mean = total as f64 / 1000.0;
        let tol = 3.0 * libm::sqrt(1980.0 * 0.05 * 0.95) / libm::sqrt(1000.0);
        assert!((mean - 99.0).abs() < tol, "mean {mean}, tol {tol}");
    }

    #[test]
    fn config_validation() {
        assert_eq!(GenConfig::default().validate(), Ok(()));
        let mut c = GenConfig::default();
        c.weights.random = 0.3;
        assert!(matches!(c.validate(), Err(GenError::Weights { .. })));
        let c = GenConfig {
            tier_probs: [0.5, 0.5, 0.5, 0.0],
            ..GenConfig::default()
        };
        assert!(matches!(c.validate(), Err(GenError::TierProbs { .. })));
        let c = GenConfig {
            priority_bins: [0.0, 0.5, 0.3, 0.7, 1.0],
            ..GenConfig::default()
        };
        assert_eq!(c.validate(), Err(GenError::Bins));
        let c = GenConfig {
            sibling_prob: 1.5,
            ..GenConfig::default()
        };
        assert_eq!(c.validate(), Err(GenError::SiblingProb(1.5)));
        assert_eq!(
            GenConfig::with_size(1, 2).validate(),
            Err(GenError::TooFewStudents { n: 1, m: 2 })
        );
    }

    #[test]
    fn build_instance_is_deterministic() {
        let cfg = GenConfig::with_size(3, 2);
        let a = build_instance(&cfg, &mut rng(42)).unwrap();
        let b = build_instance(&cfg, &mut rng(42)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.capacities().iter().sum::<usize>(), 3);
    }
}
