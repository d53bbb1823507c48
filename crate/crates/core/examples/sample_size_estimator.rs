//! The chunk-size estimator on `TreeClass(2)`: the exact curve
//! `e_t = P[FP-loss(ŷ_t) > 0]`, the good sizes it implies, and where the
//! estimate `t̂` lands over seeded samples of size 256.
//!
//! cargo run --release --example sample_size_estimator -- [trials]

use std::collections::BTreeMap;

use vcl_lab::classes::TreeClass;
use vcl_lab::domain::HypothesisClass;
use vcl_lab::harness::verify::treeclass_good_sizes;
use vcl_lab::learners::sample_size_estimator;
use vcl_lab::seeding::{mix, rng};

fn main() -> vcl_lab::Result<()> {
    let trials: u64 = std::env::args().nth(1).map_or(200, |s| s.parse().expect("trials"));
    let (hard, curve, good) = treeclass_good_sizes(0)?;
    for (t, e) in curve.iter().enumerate().take(24) {
        let mark = if good.contains(t) { " good" } else { "" };
        println!("e_{t:<2} = {e:.4}{mark}");
    }
    println!("t* = {:?}", good.t_star);

    let dist = hard.truncated(5)?;
    let strategy = TreeClass::new(2).strategy(2).expect("closed form");
    let mut hist: BTreeMap<Option<usize>, usize> = BTreeMap::new();
    for t in 0..trials {
        let sample = dist.sample_n(256, &mut rng(mix(&[0, 8, t, 1])));
        let rep = sample_size_estimator(&sample, &strategy, 2, &mut rng(mix(&[0, 8, t, 2])))?;
        *hist.entry(rep.t_hat).or_default() += 1;
    }
    let hits: usize = hist.iter().filter(|(t, _)| t.is_some_and(|t| good.contains(t))).map(|(_, c)| c).sum();
    println!("t̂ histogram {hist:?}");
    println!("t̂ ∈ T_good in {hits} of {trials} trials");
    Ok(())
}
