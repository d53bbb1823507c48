use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::Rng;

use vcl_lab::classes::{threshold_bisection_tree, FiniteClass, IdentityTree, ThresholdClass, TreeClass};
use vcl_lab::domain::{Address, Block, DomainPoint, HypothesisId};
use vcl_lab::harness::fixtures::{parity_fixture, PARITY_DEPTH};
use vcl_lab::harness::verify::{brute_force_monochromatic, embedding_valid};
use vcl_lab::seeding::rng;
use vcl_lab::trees::{
    branch_function, brute_force_dvcl_depth, dvcl_depth, indifferent_check, make_indifferent,
    max_monochromatic_subtree, ramsey_monochromatic_subtree, shatters_dvcl, shatters_strong_vcl,
    DvclTree, StrongVclTree,
};

fn addr(d: usize, blocks: &[u32]) -> Address {
    Address::from_blocks(blocks.iter().map(|&b| Block::new(b, d)).collect())
}

#[test]
fn depth_zero_is_always_shattered() {
    let single = FiniteClass::singleton(FiniteClass::default_points(2), vec![false, true]).unwrap();
    let mut tree = DvclTree::new(1, 0);
    tree.insert(Address::root(), vec![single.points()[0].clone()], None).unwrap();
    assert!(shatters_dvcl(&single, &tree, 0).unwrap().shattered);
    assert!(shatters_dvcl(&TreeClass::new(3), &IdentityTree { d: 3 }, 0).unwrap().shattered);
}

#[test]
fn depth_examples() {
    let cube = FiniteClass::full_cube(3);
    assert_eq!(dvcl_depth(&cube, cube.points(), 1, 8).unwrap().value(), 3);
    assert_eq!(dvcl_depth(&cube, cube.points(), 2, 8).unwrap().value(), 1);
    assert_eq!(brute_force_dvcl_depth(&cube, cube.points(), 2, 8).unwrap(), 1);
    let single = FiniteClass::singleton(FiniteClass::default_points(3), vec![true, true, false]).unwrap();
    for d in 1..=3 {
        assert_eq!(dvcl_depth(&single, single.points(), d, 8).unwrap().value(), 0);
    }
}

#[test]
fn tree_class_depth_restriction_has_depth_two() {
    let c = TreeClass::new(1);
    let pts = c.points_to_depth(2);
    let rows = c.hypotheses_to_depth(2);
    let restricted = vcl_lab::domain::Restriction::from_hypotheses(&c, &rows, &pts).unwrap();
    let finite = FiniteClass::new(pts.clone(), restricted.behaviors).unwrap();
    assert_eq!(dvcl_depth(&finite, &pts, 1, 8).unwrap().value(), 2);
}

#[test]
fn strong_trees() {
    let cube = FiniteClass::full_cube(5);
    let pts = cube.points().to_vec();
    let mut next = 0;
    let tree = StrongVclTree::generate(2, |a| {
        let k = a.level() + 1;
        // Levels 0 and 1 get fresh points; level 2 is never labeled at t = 2.
        if a.level() < 2 {
            let out = pts[next..next + k].to_vec();
            next += k;
            out
        } else {
            (0..k).map(|i| DomainPoint::rational(1000 + i as i64, 1)).collect()
        }
    });
    match tree {
        Ok(tree) => {
            assert!(shatters_strong_vcl(&cube, &tree, 0, 1 << 20).unwrap());
            assert!(shatters_strong_vcl(&cube, &tree, 2, 1 << 20).unwrap());
        }
        Err(e) => panic!("strong tree: {e}"),
    }

    // TreeClass(1) pins every off-path point to 0, so a level-1 node holding
    // a child and a grandchild of a root branch cannot be labeled (1, 1).
    let tree = StrongVclTree::generate(2, |a| {
        let here: Vec<u32> = a.blocks().iter().map(|b| b.bit(0) as u32).collect();
        let mut out = vec![DomainPoint::node(addr(1, &here), 0)];
        let mut deeper = here.clone();
        for _ in 0..a.level() {
            deeper.push(0);
            out.push(DomainPoint::node(addr(1, &deeper), 0));
        }
        out
    });
    let tree = tree.unwrap();
    assert!(!shatters_strong_vcl(&TreeClass::new(1), &tree, 2, 1 << 20).unwrap());
}

#[test]
fn ramsey_examples() {
    let zero = |_: &[u32]| false;
    let e = ramsey_monochromatic_subtree(2, 3, &zero, 3).unwrap();
    assert!(!e.color);
    assert!(e.map.iter().all(|(t, s)| t == s));

    let by_level = |v: &[u32]| v.len() % 2 == 1;
    let e = ramsey_monochromatic_subtree(2, 4, &by_level, 2).unwrap();
    assert!(!e.color);
    for (t, s) in &e.map {
        assert_eq!(s.len(), 2 * t.len(), "{t:?} -> {s:?}");
    }
    assert!(embedding_valid(&e, 4, &by_level));
    assert_eq!(ramsey_monochromatic_subtree(2, 1, &zero, 2), None);
}

#[test]
fn ramsey_matches_brute_force_on_depth_three() {
    for mask in 0u32..1 << 15 {
        let color = move |v: &[u32]| {
            let idx = (1usize << v.len()) - 1 + v.iter().fold(0usize, |a, &b| a * 2 + b as usize);
            mask >> idx & 1 == 1
        };
        let best = max_monochromatic_subtree(2, 3, &color, 0).map_or(0, |e| e.height);
        let brute = (0..=3).rev().find(|&h| brute_force_monochromatic(3, &color, h)).unwrap_or(0);
        assert_eq!(best, brute, "coloring {mask:#x}");
    }
}

#[test]
fn indifferent_inputs_pass_through() {
    let tree = DvclTree::materialize(&IdentityTree { d: 1 }, 4).unwrap();
    assert_eq!(indifferent_check(&TreeClass::new(1), &tree, 4).unwrap(), None);
    let out = make_indifferent(&TreeClass::new(1), &tree, 2, 4).unwrap();
    assert_eq!(out.replacements, 0);
    assert!(out.sources.iter().all(|(a, b)| a == b));

    let bis = threshold_bisection_tree(4).unwrap();
    assert_eq!(indifferent_check(&ThresholdClass, &bis, 4).unwrap(), None);
    let out = make_indifferent(&ThresholdClass, &bis, 2, 4).unwrap();
    assert_eq!(out.replacements, 0);

    let d2 = DvclTree::materialize(&IdentityTree { d: 2 }, 2).unwrap();
    assert_eq!(indifferent_check(&TreeClass::new(2), &d2, 2).unwrap(), None);
}

#[test]
fn constant_table_is_indifferent() {
    let mut tree = threshold_bisection_tree(3).unwrap();
    let h = HypothesisId::Threshold(num::rational::Ratio::new(1, 3));
    for u in Address::up_to_level(1, 3) {
        tree.set_table(&u, h.clone()).unwrap();
    }
    assert_eq!(indifferent_check(&ThresholdClass, &tree, 3).unwrap(), None);
}

#[test]
fn parity_fixture_is_repaired() {
    let (class, tree) = parity_fixture().unwrap();
    assert!(shatters_dvcl(&class, &tree, PARITY_DEPTH).unwrap().shattered);
    let v = indifferent_check(&class, &tree, 2).unwrap().expect("fixture violates indifference");
    assert!(v.v.shortlex_index(1) < v.u.shortlex_index(1));
    assert!(v.u.is_strict_prefix_of(&v.w));
    for d_out in 1..=2 {
        let out = make_indifferent(&class, &tree, d_out, PARITY_DEPTH).unwrap();
        assert_eq!(indifferent_check(&class, &out.tree, d_out).unwrap(), None);
        assert!(shatters_dvcl(&class, &out.tree, d_out).unwrap().shattered);
    }
}

#[test]
fn branch_function_examples() {
    let c = TreeClass::new(2);
    let id = IdentityTree { d: 2 };
    let y = [Block::new(0b10, 2), Block::new(0b01, 2), Block::new(0b11, 2)];
    assert!(branch_function(&c, &id, &y, &Address::root(), 0).unwrap());
    assert!(!branch_function(&c, &id, &y, &Address::root(), 1).unwrap());
    assert!(branch_function(&c, &id, &y, &addr(2, &[0b10]), 1).unwrap());
    assert!(!branch_function(&c, &id, &y, &addr(2, &[0b11]), 0).unwrap());

    // Label 0 at the root keeps thresholds above 1/2, all of which label 1/4 as 0.
    let bis = threshold_bisection_tree(3).unwrap();
    let y = [Block::new(0, 1), Block::new(1, 1), Block::new(0, 1)];
    assert!(!branch_function(&ThresholdClass, &bis, &y, &addr(1, &[1]), 0).unwrap());
    assert!(!branch_function(&ThresholdClass, &bis, &y, &Address::root(), 0).unwrap());
    assert!(branch_function(&ThresholdClass, &bis, &y, &addr(1, &[0]), 0).unwrap());
}

#[test]
fn branch_function_needs_a_later_node() {
    let bis = threshold_bisection_tree(2).unwrap();
    let y = [Block::new(0, 1), Block::new(1, 1)];
    assert!(branch_function(&ThresholdClass, &bis, &y, &addr(1, &[1, 1]), 0).is_err());
}

#[test]
fn trees_round_trip_through_json() {
    let tree = threshold_bisection_tree(3).unwrap();
    let back = DvclTree::from_json(&tree.to_json().unwrap()).unwrap();
    assert_eq!(back, tree);
    tree.validate_distinct().unwrap();
}

/// Depth by enumerating every labeled path, independent of the game solver.
fn depth_oracle(rows: &[Vec<bool>], n: usize, cap: usize) -> usize {
    fn go(rows: &[&Vec<bool>], n: usize, left: usize) -> usize {
        if left == 0 || rows.is_empty() {
            return 0;
        }
        let mut best = 0;
        for x in 0..n {
            let (a, b): (Vec<&Vec<bool>>, Vec<&Vec<bool>>) = rows.iter().partition(|r| r[x]);
            if a.is_empty() || b.is_empty() {
                continue;
            }
            best = best.max(1 + go(&a, n, left - 1).min(go(&b, n, left - 1)));
        }
        best
    }
    let refs: Vec<&Vec<bool>> = rows.iter().collect();
    go(&refs, n, cap)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn littlestone_depth_matches_path_oracle(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(1..5);
        let mut rows: BTreeMap<Vec<bool>, ()> = BTreeMap::new();
        for _ in 0..g.gen_range(1..9) {
            rows.insert((0..n).map(|_| g.gen()).collect(), ());
        }
        let rows: Vec<Vec<bool>> = rows.into_keys().collect();
        let class = FiniteClass::new(FiniteClass::default_points(n), rows.clone()).unwrap();
        prop_assert_eq!(dvcl_depth(&class, class.points(), 1, 8).unwrap().value(), depth_oracle(&rows, n, 8));
    }

    #[test]
    fn ramsey_embeddings_are_valid(seed in any::<u64>(), h in 1usize..4) {
        let mut g = rng(seed);
        let colors: Vec<bool> = (0..31).map(|_| g.gen()).collect();
        let color = move |v: &[u32]| colors[(1usize << v.len()) - 1 + v.iter().fold(0usize, |a, &b| a * 2 + b as usize)];
        if let Some(e) = ramsey_monochromatic_subtree(2, 4, &color, h) {
            prop_assert!(embedding_valid(&e, 4, &color));
            prop_assert_eq!(e.map.len(), (1usize << (h + 1)) - 1);
        } else {
            prop_assert!(!brute_force_monochromatic(4, &color, h));
        }
    }
}
