use std::sync::Arc;

use num::{BigInt, BigRational};
use proptest::prelude::*;
use rand::Rng;

use vcl_lab::classes::{FiniteClass, ThresholdClass, TreeClass};
use vcl_lab::domain::{
    empirical_loss, vc_of_rows, Block, Constant, DomainPoint, FiniteSupportDistribution,
    HypothesisClass, HypothesisId, LabeledExample, Rational,
};
use vcl_lab::games::{ConstantStrategy, Strategy};
use vcl_lab::learners::{
    batch_count, brute_force_min_max_outdegree, min_max_outdegree_orientation, one_inclusion_predict,
    pac_amplify, pac_verdict, sample_size_estimator, worst_permutation_loo_error, ConstantLearner, Erm,
    Learner, MajorityVote, Memorizer, OneInclusionGraph, OneInclusionPredictor, OptimalRateLearner,
    PatternConstraints, PatternFn,
};
use vcl_lab::seeding::rng;

fn ex(k: i64, y: bool) -> LabeledExample {
    LabeledExample::new(DomainPoint::rational(k, 64), y)
}

fn constant_pattern(bit: bool) -> PatternFn {
    Arc::new(move |x: &[DomainPoint]| Ok(Block::new(if bit { (1 << x.len()) - 1 } else { 0 }, x.len())))
}

#[test]
fn forced_extension_is_predicted() {
    // Forbidding 1 everywhere leaves only the all-zero labeling.
    let g = constant_pattern(true);
    for k in 1..10 {
        let p = one_inclusion_predict(g.clone(), 1, &[ex(3, false)], &DomainPoint::rational(k, 16), 20).unwrap();
        assert!(!p.label && p.forced && !p.anomaly);
    }
    // With d = 2, g forbids (1,1) on pairs of distinct points: a training 1 forces a 0.
    let g: PatternFn = Arc::new(|x: &[DomainPoint]| Ok(Block::new(if x[0] == x[1] { 0b01 } else { 0b11 }, 2)));
    let p = one_inclusion_predict(g, 2, &[ex(1, true), ex(2, false)], &DomainPoint::rational(5, 64), 20).unwrap();
    assert!(!p.label && p.forced);
}

#[test]
fn inadmissible_training_data_is_projected() {
    // Forbidding 0 everywhere admits only the all-one labeling, whatever the sample says.
    let g = constant_pattern(false);
    let p = one_inclusion_predict(g, 1, &[ex(3, false)], &DomainPoint::rational(5, 64), 20).unwrap();
    assert!(p.anomaly && p.label);

    // (1,1) is forbidden on distinct pairs, so the sample 1/64 ↦ 1, 2/64 ↦ 1 is
    // inadmissible. The nearest admissible labelings are 10 and 01; the tie goes
    // to the one labeling 1/64 by 1.
    let g: PatternFn = Arc::new(|x: &[DomainPoint]| Ok(Block::new(if x[0] == x[1] { 0b01 } else { 0b11 }, 2)));
    let train = [ex(1, true), ex(2, true)];
    let a = OneInclusionPredictor::new(g, 2, &train, 20).unwrap();
    let at = |k| a.predict(&DomainPoint::rational(k, 64)).unwrap();
    assert!(at(1).anomaly && at(1).label);
    assert!(at(2).anomaly && !at(2).label);
    assert!(at(5).anomaly && !at(5).label);
}

#[test]
fn majority_vote_rules() {
    let voter = |bit: bool| OneInclusionPredictor::new(constant_pattern(!bit), 1, &[], 20).unwrap();
    let x = DomainPoint::rational(1, 2);
    let erm: Arc<dyn vcl_lab::domain::Classifier> = Arc::new(Constant(false));
    use vcl_lab::domain::Classifier;
    let one = MajorityVote::new(vec![(voter(true), 1)], erm.clone());
    assert!(one.predict(&x).unwrap());
    let three = MajorityVote::new(vec![(voter(true), 2), (voter(false), 1)], erm.clone());
    assert!(three.predict(&x).unwrap());
    assert_eq!(three.voters(), 3);
    let tie = MajorityVote::new(vec![(voter(true), 1), (voter(false), 1)], erm);
    assert!(!tie.predict(&x).unwrap());
}

#[test]
fn estimator_extremes() {
    let sample: Vec<LabeledExample> = (1..=64).map(|k| ex(k, false)).collect();
    let never: Arc<dyn Strategy> = Arc::new(ConstantStrategy { block: Block::new(1, 1) });
    let r = sample_size_estimator(&sample, &never, 1, &mut rng(1)).unwrap();
    assert_eq!(r.t_hat, Some(1));
    assert_eq!(r.e_hat(1), Some(0.0));
    let always: Arc<dyn Strategy> = Arc::new(ConstantStrategy { block: Block::new(0, 1) });
    let r = sample_size_estimator(&sample, &always, 1, &mut rng(1)).unwrap();
    assert_eq!(r.t_hat, None);
    assert!(r.rows.iter().all(|row| row.hits == row.chunks));
    assert_eq!(r.m, 32);
    assert!(sample_size_estimator(&sample[..2], &never, 1, &mut rng(1)).is_err());
}

#[test]
fn erm_examples() {
    let erm = Erm::new(Arc::new(ThresholdClass));
    let h = erm.fit(&[ex(16, false), ex(48, true)]).unwrap();
    assert_eq!(h.id, HypothesisId::Threshold(Rational::new(1, 4)));
    let s: Vec<LabeledExample> = (1..20).map(|k| ex(k, k > 7)).collect();
    assert_eq!(empirical_loss(&erm.fit(&s).unwrap(), &s).unwrap(), Rational::from_integer(0));
}

#[test]
fn erm_minimizes_on_unrealizable_samples() {
    let mut g = rng(5);
    for _ in 0..50 {
        let rows: Vec<Vec<bool>> = (0..5).map(|_| (0..4).map(|_| g.gen()).collect()).collect();
        let class = Arc::new(FiniteClass::new(FiniteClass::default_points(4), rows.clone()).unwrap());
        let s: Vec<LabeledExample> = (0..7).map(|_| LabeledExample::new(class.points()[g.gen_range(0..4)].clone(), g.gen())).collect();
        let best = (0..rows.len())
            .map(|i| vcl_lab::domain::Bound { class: class.clone(), id: HypothesisId::Index(i) })
            .map(|h| empirical_loss(&h, &s).unwrap())
            .min()
            .unwrap();
        let h = Erm::new(class.clone()).fit(&s).unwrap();
        assert_eq!(empirical_loss(&h, &s).unwrap(), best);
    }
}

#[test]
fn baselines() {
    let s = [ex(1, true), ex(2, false)];
    let m = Memorizer.train(&s, &mut rng(0)).unwrap();
    assert!(m.classifier.predict(&DomainPoint::rational(1, 64)).unwrap());
    assert!(!m.classifier.predict(&DomainPoint::rational(9, 64)).unwrap());
    let c = ConstantLearner(true).train(&s, &mut rng(0)).unwrap();
    assert!(c.classifier.predict(&DomainPoint::rational(2, 64)).unwrap());
}

#[test]
fn optimal_rate_falls_back_below_8d() {
    let l = OptimalRateLearner::for_class(Arc::new(ThresholdClass), 1).unwrap();
    let t = l.train(&[ex(1, false), ex(40, true)], &mut rng(0)).unwrap();
    assert!(t.notes.fallback.is_some());
    let s: Vec<LabeledExample> = (0..64).map(|i| ex(8 + 48 * (i % 2), i % 2 == 1)).collect();
    let t = l.train(&s, &mut rng(3)).unwrap();
    assert!(t.notes.t_hat.is_some() || t.notes.fallback.is_some());
}

#[test]
fn batch_count_formula() {
    assert_eq!(batch_count(0.5).unwrap(), 2);
    assert_eq!(batch_count(0.1).unwrap(), 5);
    assert_eq!(batch_count(1.0).unwrap(), 1);
    assert!(batch_count(0.0).is_err());
}

fn two_atoms() -> FiniteSupportDistribution {
    FiniteSupportDistribution::uniform(vec![ex(8, false), ex(56, true)]).unwrap()
}

#[test]
fn perfect_base_learner_always_succeeds() {
    struct Oracle;
    impl Learner for Oracle {
        fn name(&self) -> String {
            "oracle".into()
        }
        fn train(&self, _: &[LabeledExample], _: &mut dyn rand::RngCore) -> vcl_lab::Result<vcl_lab::learners::Trained> {
            let h = vcl_lab::domain::Bound { class: Arc::new(ThresholdClass), id: HypothesisId::Threshold(Rational::new(1, 2)) };
            Ok(vcl_lab::learners::Trained::plain(Arc::new(h)))
        }
    }
    let v = pac_verdict(&Oracle, &two_atoms(), 64, 0.01, 0.2, 50, 1).unwrap();
    assert_eq!(v.success_rate, 1.0);
}

#[test]
fn pac_thresholds() {
    let atoms: Vec<LabeledExample> = (1..64).map(|k| ex(k, k > 21)).collect();
    let dist = FiniteSupportDistribution::uniform(atoms).unwrap();
    let v = pac_verdict(&Erm::new(Arc::new(ThresholdClass)), &dist, 512, 0.05, 0.1, 500, 11).unwrap();
    assert!(v.failure_rate <= 0.1, "failure rate {}", v.failure_rate);

    let sample = dist.sample_n(512, &mut rng(2));
    let a = pac_amplify(&Erm::new(Arc::new(ThresholdClass)), &sample, 0.1, &mut rng(3)).unwrap();
    assert_eq!(a.batches, 5);
    assert_eq!(a.validation_losses.len(), 5);
    let min = a.validation_losses.iter().cloned().fold(f64::INFINITY, f64::min);
    assert_eq!(a.validation_losses[a.chosen], min);
}

/// Exact LOO bound on families drawn from random constraints.
fn random_family(seed: u64, points: usize, d: usize) -> Vec<u32> {
    random_family_with(seed, points, d, 0.4)
}

fn random_family_with(seed: u64, points: usize, d: usize, density: f64) -> Vec<u32> {
    let mut g = rng(seed);
    let mut c = PatternConstraints::new(points);
    let mut tuples = vec![Vec::new()];
    for _ in 0..d {
        tuples = tuples.into_iter().flat_map(|t: Vec<usize>| (0..points).map(move |i| { let mut t = t.clone(); t.push(i); t })).collect();
    }
    for t in tuples {
        if g.gen_bool(density) {
            c.push(t, Block::new(g.gen_range(0..1u32 << d), d));
        }
    }
    c.admissible()
}

#[test]
fn total_patterns_leave_vc_below_d() {
    // Forbidding a block on every ordered d-tuple stops any d-set from being shattered.
    for seed in 0..60 {
        for d in 1..=2 {
            let fam = random_family_with(seed, 5, d, 1.0);
            let rows: Vec<Vec<bool>> = fam.iter().map(|&m| (0..5).map(|i| m >> i & 1 == 1).collect()).collect();
            assert!(rows.is_empty() || vc_of_rows(&rows, 5) < d, "seed {seed} d {d}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn orientation_is_optimal(seed in any::<u64>(), n in 2usize..7) {
        let mut g = rng(seed);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if g.gen_bool(0.5) { edges.push((a, b)); }
            }
        }
        let o = min_max_outdegree_orientation(n, &edges);
        let best = o.out_degrees(n, &edges).into_iter().max().unwrap_or(0);
        prop_assert_eq!(best, brute_force_min_max_outdegree(n, &edges));
    }

    #[test]
    fn loo_error_within_vc_over_points(seed in any::<u64>(), points in 4usize..6, d in 1usize..3) {
        let fam = random_family(seed, points, d);
        prop_assume!(!fam.is_empty());
        let rows: Vec<Vec<bool>> = fam.iter().map(|&m| (0..points).map(|i| m >> i & 1 == 1).collect()).collect();
        let graph = OneInclusionGraph::new(points, &fam);
        let bound = BigRational::new(BigInt::from(vc_of_rows(&rows, points)), BigInt::from(points));
        prop_assert!(worst_permutation_loo_error(&graph) <= bound);
    }

    /// The prediction ignores the order in which training points arrive.
    #[test]
    fn one_inclusion_prediction_is_order_free(seed in any::<u64>()) {
        let mut g = rng(seed);
        let table: Vec<u32> = (0..4096).map(|_| g.gen_range(0..4)).collect();
        let pat: PatternFn = Arc::new(move |x: &[DomainPoint]| {
            let key = x.iter().map(|p| p.as_rational().map_or(0, |r| *r.numer() as usize)).fold(0usize, |a, b| a * 64 + b);
            Ok(Block::new(table[key % 4096], 2))
        });
        let mut s: Vec<LabeledExample> = (0..5).map(|_| ex(g.gen_range(1..40), g.gen())).collect();
        let x = DomainPoint::rational(g.gen_range(1..40), 64);
        let a = one_inclusion_predict(pat.clone(), 2, &s, &x, 20).unwrap();
        s.reverse();
        let b = one_inclusion_predict(pat, 2, &s, &x, 20).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn exact_fp_curve_matches_simulation() {
    use vcl_lab::games::{forbidden_pattern_loss, TupleDistribution};
    use vcl_lab::harness::verify::treeclass_good_sizes;
    use vcl_lab::learners::{blocks, pattern_after};
    use vcl_lab::seeding::mix;

    let (hard, curve, _) = treeclass_good_sizes(0).unwrap();
    let dist = hard.truncated(5).unwrap();
    let tuples = TupleDistribution::blocked(&dist, 2).unwrap();
    let strategy = TreeClass::new(2).strategy(2).unwrap();
    let draws = 2000;
    for t in [1usize, 4, 8, 12, 16] {
        let mut positive = 0;
        for i in 0..draws {
            let sample = dist.sample_n(2 * t, &mut rng(mix(&[t as u64, i])));
            let g = pattern_after(&strategy, &blocks(&sample, 2)).unwrap();
            if forbidden_pattern_loss(|x| g.evaluate(x), &tuples).unwrap().to_f64() > 0.0 {
                positive += 1;
            }
        }
        let p = curve[t];
        let hat = positive as f64 / draws as f64;
        let sd = (p * (1.0 - p) / draws as f64).sqrt().max(1e-3);
        assert!((hat - p).abs() <= 4.0 * sd, "t = {t}: simulated {hat}, exact {p}");
    }
}
