use std::sync::Arc;

use num::{BigInt, BigRational};
use proptest::prelude::*;
use rand::Rng;

use vcl_lab::classes::{FiniteClass, ThresholdClass};
use vcl_lab::domain::{
    empirical_loss, vc_dimension, zero_one_loss, vc_of_rows, Address, Block, Bound, Constant, DomainPoint,
    FiniteSupportDistribution, HypothesisClass, HypothesisId, LabeledExample, Rational, Restriction,
};
use vcl_lab::seeding::rng;
use vcl_lab::Error;

fn r(n: i64, q: i64) -> DomainPoint {
    DomainPoint::rational(n, q)
}

fn ex(n: i64, q: i64, y: bool) -> LabeledExample {
    LabeledExample::new(r(n, q), y)
}

fn threshold(n: i64, q: i64) -> Bound {
    Bound { class: Arc::new(ThresholdClass), id: HypothesisId::Threshold(Rational::new(n, q)) }
}

fn big(n: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(q))
}

#[test]
fn zero_one_loss_examples() {
    let p = r(1, 3);
    let d = FiniteSupportDistribution::float(vec![(LabeledExample::new(p.clone(), true), 1.0)]).unwrap();
    assert_eq!(zero_one_loss(&Constant(false), &d).unwrap().to_f64(), 1.0);
    let d = FiniteSupportDistribution::float(vec![(LabeledExample::new(p, false), 1.0)]).unwrap();
    assert_eq!(zero_one_loss(&Constant(false), &d).unwrap().to_f64(), 0.0);

    let d = FiniteSupportDistribution::exact(vec![(ex(1, 4, false), big(1, 2)), (ex(3, 4, false), big(1, 2))]).unwrap();
    let loss = zero_one_loss(&threshold(1, 2), &d).unwrap();
    assert_eq!(loss.exact(), Some(&big(1, 2)));
}

#[test]
fn empirical_loss_examples() {
    let s = [ex(1, 5, false), ex(2, 5, true)];
    assert_eq!(empirical_loss(&Constant(false), &s).unwrap(), Rational::new(1, 2));
    assert_eq!(empirical_loss(&Constant(true), &[ex(1, 5, true)]).unwrap(), Rational::from_integer(0));
    let s = [ex(1, 4, true), ex(3, 4, true), ex(7, 8, true)];
    assert_eq!(empirical_loss(&threshold(1, 2), &s).unwrap(), Rational::new(1, 3));
    assert!(matches!(empirical_loss(&Constant(true), &[]), Err(Error::EmptySample)));
}

#[test]
fn unevaluable_point_is_a_domain_mismatch() {
    let d = FiniteSupportDistribution::uniform(vec![LabeledExample::new(DomainPoint::RealVector(vec![1.0]), true)]).unwrap();
    assert!(matches!(zero_one_loss(&threshold(1, 2), &d), Err(Error::DomainMismatch { .. })));
}

#[test]
fn vc_dimension_examples() {
    let cube = FiniteClass::full_cube(3);
    assert_eq!(vc_dimension(&cube, cube.points()).unwrap(), 3);
    let single = FiniteClass::singleton(FiniteClass::default_points(3), vec![true, false, false]).unwrap();
    assert_eq!(vc_dimension(&single, single.points()).unwrap(), 0);
    let grid = [r(1, 4), r(1, 2), r(3, 4)];
    let rows = (0..4).map(|t| (1..4).map(|i| i > t).collect()).collect();
    let thresholds = FiniteClass::new(grid.to_vec(), rows).unwrap();
    assert_eq!(vc_dimension(&thresholds, &grid).unwrap(), 1);
    assert!(matches!(vc_dimension(&ThresholdClass, &grid), Err(Error::Unsupported(_))));
}

#[test]
fn distributions_reject_bad_masses() {
    assert!(FiniteSupportDistribution::float(vec![(ex(1, 2, true), 0.4)]).is_err());
    assert!(FiniteSupportDistribution::exact(vec![(ex(1, 2, true), big(3, 2)), (ex(1, 3, true), big(-1, 2))]).is_err());
    assert!(FiniteSupportDistribution::uniform(vec![]).is_err());
}

#[test]
fn shortlex_starts_at_root() {
    assert_eq!(Address::root().shortlex_index(2), 1);
    let a = Address::from_blocks(vec![Block::new(0, 2)]);
    assert_eq!(a.shortlex_index(2), 2);
    let b = Address::from_blocks(vec![Block::new(3, 2)]);
    assert_eq!(b.shortlex_index(2), 5);
    assert_eq!(Address::from_blocks(vec![Block::new(0, 2), Block::new(0, 2)]).shortlex_index(2), 6);
}

#[test]
fn block_bit_zero_is_most_significant() {
    let b = Block::new(0b10, 2);
    assert!(b.bit(0));
    assert!(!b.bit(1));
    assert_eq!(Block::from_bits(&[true, false]), b);
    assert_eq!(b.complement(), Block::new(0b01, 2));
}

#[test]
fn rational_points_round_trip_through_json() {
    let p = r(3, 8);
    let text = serde_json::to_string(&p).unwrap();
    let back: DomainPoint = serde_json::from_str(&text).unwrap();
    assert_eq!(back, p);
}

/// Brute force over all subsets, written independently of the library.
fn vc_oracle(rows: &[Vec<bool>], n: usize) -> usize {
    let mut best = 0;
    for mask in 0u32..1 << n {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let mut seen = std::collections::HashSet::new();
        for row in rows {
            seen.insert(idx.iter().map(|&i| row[i]).collect::<Vec<_>>());
        }
        if seen.len() == 1 << idx.len() {
            best = best.max(idx.len());
        }
    }
    best
}

proptest! {
    #[test]
    fn shortlex_index_round_trips(d in 1usize..4, index in 1u128..5000) {
        let a = Address::from_shortlex_index(d, index);
        prop_assert_eq!(a.shortlex_index(d), index);
    }

    #[test]
    fn shortlex_order_matches_index(d in 1usize..3, i in 1u128..2000, j in 1u128..2000) {
        let (a, b) = (Address::from_shortlex_index(d, i), Address::from_shortlex_index(d, j));
        prop_assert_eq!(a.cmp(&b), i.cmp(&j));
    }

    #[test]
    fn vc_of_rows_matches_subset_oracle(n in 1usize..6, seed in any::<u64>()) {
        let mut g = rng(seed);
        let count = g.gen_range(1..12);
        let rows: Vec<Vec<bool>> = (0..count).map(|_| (0..n).map(|_| g.gen()).collect()).collect();
        prop_assert_eq!(vc_of_rows(&rows, n), vc_oracle(&rows, n));
    }

    #[test]
    fn is_consistent_matches_enumeration(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(1..5);
        let rows: Vec<Vec<bool>> = (0..g.gen_range(1..6)).map(|_| (0..n).map(|_| g.gen()).collect()).collect();
        let class = FiniteClass::new(FiniteClass::default_points(n), rows.clone()).unwrap();
        let sample: Vec<LabeledExample> = (0..g.gen_range(0..5))
            .map(|_| { let i = g.gen_range(0..n); LabeledExample::new(class.points()[i].clone(), g.gen()) })
            .collect();
        let expect = rows.iter().any(|row| sample.iter().all(|e| row[class.points().iter().position(|p| *p == e.point).unwrap()] == e.label));
        prop_assert_eq!(class.is_consistent(&sample).unwrap(), expect);
    }

    #[test]
    fn threshold_vc_is_one_on_finite_restrictions(nums in proptest::collection::btree_set(1i64..64, 2..7)) {
        // The restriction to the domain is realized by thresholds at 0 and at every point.
        let pts: Vec<DomainPoint> = nums.iter().map(|&k| r(k, 64)).collect();
        let ids: Vec<HypothesisId> = std::iter::once(0).chain(nums.iter().copied())
            .map(|k| HypothesisId::Threshold(Rational::new(k, 64)))
            .collect();
        let res = Restriction::from_hypotheses(&ThresholdClass, &ids, &pts).unwrap();
        prop_assert_eq!(res.behaviors.len(), pts.len() + 1);
        prop_assert_eq!(vc_of_rows(&res.behaviors, pts.len()), 1);
    }
}
