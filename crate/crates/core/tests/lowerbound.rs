use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};
use proptest::prelude::*;

use vcl_lab::classes::TreeClass;
use vcl_lab::domain::{Address, DomainPoint, HypothesisClass, LabeledExample, ratio_to_f64};
use vcl_lab::learners::{Erm, Memorizer};
use vcl_lab::lowerbound::{
    event_g_kappa, mass_audit, tail_mass, n_kappa, n_kappa_guard, node_mass, run_lower_bound_experiment,
    BranchMode, Draw, HardDistribution, LowerBoundConfig, Subject, Trace, CSV_HEADER,
};
use vcl_lab::seeding::rng;
use vcl_lab::trees::Branch;
use vcl_lab::Error;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn hard(d: usize, seed: u64) -> HardDistribution {
    HardDistribution::tree_class(d, Branch::random(d, seed)).unwrap()
}

#[test]
fn n_kappa_examples() {
    assert_eq!(n_kappa(3, 2).unwrap(), 1);
    assert_eq!(n_kappa(2, 4).unwrap(), 4);
    assert_eq!(n_kappa(3, 3).unwrap(), 5);
    assert!(n_kappa(1, 3).is_err());
    for d in 2..=4usize {
        for kappa in 2..=6u32 {
            let n = n_kappa(d, kappa).unwrap();
            let exact = (d as u64).pow(kappa + 1) / (8 * (d as u64 - 1));
            assert_eq!(n, exact);
            let lower = (d as f64).powi(kappa as i32 + 1) / (9.0 * (d as f64 - 1.0));
            assert_eq!(n_kappa_guard(d, kappa).unwrap(), n as f64 >= lower);
        }
    }
}

#[test]
fn d_one_is_refused() {
    assert!(matches!(
        HardDistribution::tree_class(1, Branch::random(1, 0)),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn node_law_frequencies() {
    let h = hard(2, 3);
    let n = 100_000;
    let draws = h.sample_n(n, &mut rng(17)).unwrap();
    for (k, p) in [(1u128, 0.5), (2, 0.25), (3, 0.125)] {
        let c = draws.iter().filter(|x| x.k == k).count() as f64 / n as f64;
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!((c - p).abs() <= 3.0 * sd, "K = {k}: {c} vs {p}");
    }
    assert_eq!(node_mass(2, 1), q(1, 2));
    assert_eq!(node_mass(3, 2), q(2, 9));
}

#[test]
fn labels_follow_the_branch() {
    let d = 2;
    let branch = Branch::random(d, 9);
    let h = HardDistribution::tree_class(d, branch.clone()).unwrap();
    for draw in h.sample_n(5000, &mut rng(4)).unwrap() {
        let u = Address::from_shortlex_index(d, draw.k);
        let level = u.level();
        if branch.contains(&u) {
            assert_eq!(draw.y, branch.block(level).bit(draw.j));
        } else {
            assert!(!draw.y, "off-branch point {} labeled 1", draw.x);
        }
        assert_eq!(draw.x, DomainPoint::node(u, draw.j));
    }
}

#[test]
fn x_marginal_ignores_the_branch() {
    let a = hard(3, 1);
    let b = a.with_branch(Branch::random(3, 2));
    let xa = a.sample_n(20_000, &mut rng(8)).unwrap();
    let xb = b.sample_n(20_000, &mut rng(8)).unwrap();
    assert!(xa.iter().zip(&xb).all(|(p, r)| p.x == r.x && p.k == r.k));
    assert!(xa.iter().zip(&xb).any(|(p, r)| p.y != r.y));
}

#[test]
fn witnesses() {
    let h = hard(2, 5);
    let w = h.realizability_witness(&BigRational::one()).unwrap();
    assert_eq!(w.k, 0);
    assert_eq!(w.loss_bound, BigRational::one());

    let w = h.realizability_witness(&q(1, 16)).unwrap();
    assert_eq!(w.k, 4);
    assert_eq!(w.loss_bound, q(1, 16));
    // The witness is exact on nodes 1..=k.
    let class = TreeClass::new(2);
    for s in 1..=w.k {
        let u = Address::from_shortlex_index(2, s);
        for j in 0..2 {
            assert_eq!(class.evaluate(&w.hypothesis, &DomainPoint::node(u.clone(), j)).unwrap(), h.label(&u, j).unwrap());
        }
    }
    // Its true loss is at most the tail, checked on a deep truncation.
    let dist = h.truncated(40).unwrap();
    let bound = vcl_lab::domain::Bound { class: Arc::new(class), id: w.hypothesis.clone() };
    assert!(vcl_lab::domain::zero_one_loss(&bound, &dist).unwrap().to_f64() <= ratio_to_f64(&w.loss_bound) + 1e-12);

    let w = h.realizability_witness(&q(1, 1000)).unwrap();
    assert_eq!(w.k, 10);
    assert_eq!(w.loss_bound, q(1, 1024));
}

#[test]
fn mass_audit_is_exact() {
    for d in 2..=4 {
        let (sum, tail) = mass_audit(d, 30);
        assert_eq!(sum + tail.clone(), BigRational::one());
        assert_eq!(tail, tail_mass(d, 30));
        assert!(ratio_to_f64(&tail) <= 2f64.powi(-30));
    }
    let (sum, tail) = mass_audit(2, 0);
    assert!(sum.is_zero());
    assert_eq!(tail, BigRational::one());
}

fn draw(k: u128, x: DomainPoint) -> Draw {
    Draw { x, y: false, k, j: 0 }
}

#[test]
fn event_g_examples() {
    let x = DomainPoint::node(Address::from_shortlex_index(3, 4), 0);
    assert!(event_g_kappa(&Trace { k: 4, x: &x, train: &[] }, 4, 3));
    assert!(!event_g_kappa(&Trace { k: 3, x: &x, train: &[] }, 4, 3));
    let far = DomainPoint::node(Address::from_shortlex_index(3, 9), 0);
    assert!(!event_g_kappa(&Trace { k: 4, x: &x, train: &[draw(9, far)] }, 4, 3));
    let same_node = DomainPoint::node(Address::from_shortlex_index(3, 4), 1);
    // d = 3 allows one training point in node κ, d = 2 allows none.
    assert!(event_g_kappa(&Trace { k: 4, x: &x, train: &[draw(4, same_node.clone())] }, 4, 3));
    let x2 = DomainPoint::node(Address::from_shortlex_index(2, 4), 0);
    let other2 = DomainPoint::node(Address::from_shortlex_index(2, 4), 1);
    assert!(!event_g_kappa(&Trace { k: 4, x: &x2, train: &[draw(4, other2)] }, 4, 2));
    assert!(!event_g_kappa(&Trace { k: 4, x: &x, train: &[draw(2, x.clone())] }, 4, 3));
}

fn config(kappas: Vec<u32>, trials: usize, seed: u64) -> LowerBoundConfig {
    LowerBoundConfig { kappas, trials, seed, mode: BranchMode::ThroughKappa }
}

#[test]
fn memorizer_event_mass_at_kappa_four() {
    let r = run_lower_bound_experiment(&hard(2, 0), Subject::Learner(Arc::new(Memorizer)), &config(vec![4], 100_000, 21)).unwrap();
    let c = r.cell(4).unwrap();
    assert_eq!(c.n, 4);
    // (d − 1)·d^(−κ)/4 with d = 2, κ = 4.
    assert_eq!(c.p_g_bound, 1.0 / 64.0);
    assert!(c.p_g_hat >= c.p_g_bound - 3.0 * c.p_g_se, "{} vs {}", c.p_g_hat, c.p_g_bound);
    let e = c.cond_err.unwrap();
    assert!((e - 0.5).abs() <= 3.0 * c.cond_err_se.unwrap());
}

#[test]
fn oracle_control_never_errs() {
    let r = run_lower_bound_experiment(&hard(3, 0), Subject::Oracle, &config(vec![3, 4], 4000, 2)).unwrap();
    for c in &r.cells {
        assert_eq!(c.loss_hat, 0.0);
        assert_eq!(c.cond_err.unwrap_or(0.0), 0.0);
    }
}

#[test]
fn empty_event_cells_are_flagged() {
    let r = run_lower_bound_experiment(&hard(2, 0), Subject::Learner(Arc::new(Memorizer)), &config(vec![12], 3, 4)).unwrap();
    let c = r.cell(12).unwrap();
    assert!(c.insufficient_data());
    assert_eq!(c.cond_err, None);
    assert!(r.to_csv().lines().nth(1).unwrap().contains(",NA,NA,"));
}

#[test]
fn reports_are_reproducible() {
    let erm = Subject::Learner(Arc::new(Erm::new(Arc::new(TreeClass::new(2)))));
    let a = run_lower_bound_experiment(&hard(2, 0), erm.clone(), &config(vec![3, 4], 3000, 9)).unwrap();
    let b = run_lower_bound_experiment(&hard(2, 0), erm, &config(vec![3, 4], 3000, 9)).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.to_csv().lines().next().unwrap(), CSV_HEADER);
}

#[test]
fn truncations_sum_to_one() {
    let dist = hard(3, 7).truncated(12).unwrap();
    let total = (0..dist.len()).map(|i| dist.exact_mass(i).unwrap().clone()).fold(BigRational::zero(), |a, b| a + b);
    assert_eq!(total, BigRational::one());
    let _: &[LabeledExample] = dist.atoms();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hard_distributions_are_realizable(seed in any::<u64>(), d in 2usize..4, nodes in 1u128..40) {
        let h = hard(d, seed);
        let z: Vec<LabeledExample> = (1..=nodes)
            .flat_map(|s| {
                let u = Address::from_shortlex_index(d, s);
                (0..d).map(move |j| (u.clone(), j))
            })
            .map(|(u, j)| LabeledExample::new(h.point(&u, j).unwrap(), h.label(&u, j).unwrap()))
            .collect();
        prop_assert!(TreeClass::new(d).is_consistent(&z).unwrap());
    }

    #[test]
    fn node_index_sampler_matches_its_law(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = HardDistribution::draw_index(2, &mut r);
        prop_assert!(k >= 1);
    }
}
