use proptest::prelude::*;
use rand::Rng;

use vcl_lab::classes::{
    halfspace_fractal_tree, threshold_bisection_tree, treeclass_branch_eval, BisectionTree,
    HalfspaceClass, IdentityTree, ThresholdClass, TreeClass,
};
use vcl_lab::domain::{Address, Block, DomainPoint, HypothesisClass, HypothesisId, LabeledExample, Rational};
use vcl_lab::seeding::rng;
use vcl_lab::trees::{shatters_dvcl, TreeSource};
use vcl_lab::Error;

fn addr(d: usize, blocks: &[u32]) -> Address {
    Address::from_blocks(blocks.iter().map(|&b| Block::new(b, d)).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn branch_eval_examples() {
    let y = [Block::new(0b10, 2)];
    assert!(treeclass_branch_eval(2, &y, &DomainPoint::node(Address::root(), 0)).unwrap());
    assert!(!treeclass_branch_eval(2, &y, &DomainPoint::node(addr(2, &[0]), 1)).unwrap());
    let y = [Block::new(1, 1), Block::new(0, 1)];
    assert!(!treeclass_branch_eval(1, &y, &DomainPoint::node(addr(1, &[1]), 0)).unwrap());
    // A point whose path runs past the known prefix cannot be evaluated.
    let deep = DomainPoint::node(addr(1, &[1, 0]), 0);
    assert!(matches!(treeclass_branch_eval(1, &y, &deep), Err(Error::InsufficientPrefix { .. })));
}

#[test]
fn tree_class_hypotheses_follow_their_path() {
    let c = TreeClass::new(2);
    let h = HypothesisId::Node { address: addr(2, &[0b01]), block: Block::new(0b11, 2) };
    // Root is labeled by the first block of the path, the node itself by b.
    assert!(!c.evaluate(&h, &DomainPoint::node(Address::root(), 0)).unwrap());
    assert!(c.evaluate(&h, &DomainPoint::node(Address::root(), 1)).unwrap());
    assert!(c.evaluate(&h, &DomainPoint::node(addr(2, &[0b01]), 0)).unwrap());
    assert!(!c.evaluate(&h, &DomainPoint::node(addr(2, &[0b10]), 0)).unwrap());
    assert!(!c.evaluate(&h, &DomainPoint::node(addr(2, &[0b01, 0b11]), 1)).unwrap());
}

#[test]
fn bisection_midpoints() {
    assert_eq!(BisectionTree::midpoint(&Address::root()), Rational::new(1, 2));
    // The child at label 1 keeps the thresholds below 1/2, since h(x) = [x > θ].
    assert_eq!(BisectionTree::midpoint(&addr(1, &[1])), Rational::new(1, 4));
    assert_eq!(BisectionTree::midpoint(&addr(1, &[0])), Rational::new(3, 4));
    assert_eq!(BisectionTree::interval(&addr(1, &[1, 0])), (Rational::new(1, 4), Rational::new(1, 2)));
    let tree = threshold_bisection_tree(4).unwrap();
    assert!(shatters_dvcl(&ThresholdClass, &tree, 4).unwrap().shattered);
}

#[test]
fn erm_threshold_is_leftmost() {
    let s = [
        LabeledExample::new(DomainPoint::rational(1, 4), false),
        LabeledExample::new(DomainPoint::rational(3, 4), true),
    ];
    assert_eq!(
        ThresholdClass.consistent_hypothesis(&s).unwrap(),
        Some(HypothesisId::Threshold(Rational::new(1, 4)))
    );
    let bad = [
        LabeledExample::new(DomainPoint::rational(1, 4), true),
        LabeledExample::new(DomainPoint::rational(3, 4), false),
    ];
    assert_eq!(ThresholdClass.consistent_hypothesis(&bad).unwrap(), None);
}

#[test]
fn singleton_class_cannot_shatter_depth_one() {
    let single = vcl_lab::classes::FiniteClass::new(
        vec![DomainPoint::node(Address::root(), 0)],
        vec![vec![true]],
    )
    .unwrap();
    let tree = vcl_lab::trees::DvclTree::materialize(&IdentityTree { d: 1 }, 0).unwrap();
    assert!(shatters_dvcl(&single, &tree, 0).unwrap().shattered);
    let mut one = vcl_lab::trees::DvclTree::new(1, 1);
    one.insert(Address::root(), vec![DomainPoint::node(Address::root(), 0)], None).unwrap();
    for b in 0..2 {
        one.insert(addr(1, &[b]), vec![DomainPoint::node(addr(1, &[b]), 0)], None).unwrap();
    }
    assert!(!shatters_dvcl(&single, &one, 1).unwrap().shattered);
}

#[test]
fn tree_class_shatters_identity_tree() {
    assert!(shatters_dvcl(&TreeClass::new(2), &IdentityTree { d: 2 }, 3).unwrap().shattered);
}

#[test]
fn halfspace_root_witnesses_disagree_on_the_root() {
    let t = halfspace_fractal_tree(2, 1).unwrap();
    let x = t.tree.node(&Address::root()).unwrap();
    let DomainPoint::RealVector(x) = &x[0] else { panic!("vector point") };
    assert!((dot(x, x) - 1.0).abs() < 1e-12);
    let sign = |b: u32| {
        let Some(HypothesisId::Halfspace(w)) = t.tree.table(&addr(1, &[b])) else { panic!("witness") };
        dot(&w, x)
    };
    assert!(sign(1) > 0.0 && sign(0) < 0.0);
}

#[test]
fn halfspace_leaf_witnesses_realize_every_branch() {
    let (dim, depth) = (3, 2);
    let t = halfspace_fractal_tree(dim, depth).unwrap();
    let leaves = Address::at_level(dim - 1, depth);
    assert_eq!(leaves.len(), 16);
    for leaf in &leaves {
        let Some(HypothesisId::Halfspace(w)) = t.tree.table(leaf) else { panic!("witness at {leaf}") };
        for s in 0..depth {
            let pts = t.tree.node(&leaf.prefix(s)).unwrap();
            for (j, p) in pts.iter().enumerate() {
                let DomainPoint::RealVector(x) = p else { panic!("vector point") };
                let v = dot(&w, x);
                let want = leaf.blocks()[s].bit(j);
                assert!(v.abs() > 0.0 && (v > 0.0) == want, "{leaf} level {s} coord {j}: {v}");
            }
        }
    }
}

#[test]
fn halfspace_frames_are_orthonormal() {
    for dim in 2..=4 {
        let t = halfspace_fractal_tree(dim, 2).unwrap();
        for cell in t.cells.values() {
            for (i, a) in cell.frame.iter().enumerate() {
                for (j, b) in cell.frame.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot(a, b) - want).abs() < 1e-9);
                }
            }
        }
        assert!(shatters_dvcl(&HalfspaceClass::new(dim), &t, 2).unwrap().shattered);
    }
}

#[test]
fn halfspace_depth_limit_is_reported() {
    match halfspace_fractal_tree(2, 80) {
        Err(Error::PrecisionExhausted { .. }) => {}
        other => panic!("expected precision error, got {:?}", other.map(|t| t.tree.len())),
    }
}

fn all_points(t: &dyn TreeSource, depth: usize) -> Vec<DomainPoint> {
    Address::up_to_level(t.block_size(), depth).iter().flat_map(|u| t.node(u).unwrap()).collect()
}

#[test]
fn tree_points_are_unique() {
    for (tree, depth) in [
        (Box::new(threshold_bisection_tree(5).unwrap()) as Box<dyn TreeSource>, 5),
        (Box::new(IdentityTree { d: 2 }), 3),
        (Box::new(halfspace_fractal_tree(3, 2).unwrap()), 2),
    ] {
        let pts = all_points(tree.as_ref(), depth);
        let set: std::collections::HashSet<_> = pts.iter().cloned().collect();
        assert_eq!(set.len(), pts.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Indifference of TreeClass, checked pointwise on random triples.
    #[test]
    fn tree_class_is_indifferent(seed in any::<u64>(), d in 1usize..4) {
        let c = TreeClass::new(d);
        let mut g = rng(seed);
        let all = Address::up_to_level(d, if d == 1 { 6 } else { 3 });
        for _ in 0..16 {
            let ui = g.gen_range(1..all.len());
            let vi = g.gen_range(0..ui);
            let (u, v) = (&all[ui], &all[vi]);
            let below: Vec<&Address> = all.iter().filter(|w| u.is_strict_prefix_of(w)).collect();
            if below.is_empty() { continue; }
            let w = below[g.gen_range(0..below.len())];
            for b in Block::all(d) {
                for b2 in Block::all(d) {
                    for j in 0..d {
                        let x = DomainPoint::node(v.clone(), j);
                        let hu = HypothesisId::Node { address: u.clone(), block: b };
                        let hw = HypothesisId::Node { address: w.clone(), block: b2 };
                        prop_assert_eq!(c.evaluate(&hu, &x).unwrap(), c.evaluate(&hw, &x).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn halfspace_trees_shatter(dim in 2usize..5, t in 0usize..4) {
        let tree = halfspace_fractal_tree(dim, t).unwrap();
        let out = shatters_dvcl(&HalfspaceClass::new(dim), &tree, t).unwrap();
        prop_assert!(out.shattered);
        for cell in tree.cells.values().filter(|c| c.margin.is_finite()) {
            prop_assert!(cell.margin > 1e-9);
        }
    }
}
