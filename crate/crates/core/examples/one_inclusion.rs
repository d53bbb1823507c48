//! One-inclusion graphs under pattern-avoidance constraints: orientation,
//! prediction and the exact permutation leave-one-out error.
//!
//! cargo run --release --example one_inclusion

use num::{BigInt, BigRational};
use rand::Rng;

use vcl_lab::domain::{vc_of_rows, Block};
use vcl_lab::learners::{
    brute_force_min_max_outdegree, worst_permutation_loo_error, OneInclusionGraph, PatternConstraints,
};
use vcl_lab::seeding::rng;

fn main() {
    let points = 5;
    let d = 2;
    let mut r = rng(11);
    let mut c = PatternConstraints::new(points);
    for _ in 0..12 {
        let t = vec![r.gen_range(0..points), r.gen_range(0..points)];
        c.push(t, Block::new(r.gen_range(0..4), d));
    }
    let family = c.admissible();
    let rows: Vec<Vec<bool>> = family.iter().map(|&m| (0..points).map(|i| m >> i & 1 == 1).collect()).collect();
    let vc = vc_of_rows(&rows, points);
    let g = OneInclusionGraph::new(points, &family);
    println!("{} admissible labelings, {} edges, VC = {vc}", g.vertices().len(), g.edges().len());
    println!(
        "max out-degree {} (brute-force minimum {})",
        g.max_out_degree(),
        brute_force_min_max_outdegree(g.vertices().len(), g.edges())
    );
    let err = worst_permutation_loo_error(&g);
    println!(
        "worst permutation leave-one-out error {err} ≤ VC/(n+1) = {}",
        BigRational::new(BigInt::from(vc), BigInt::from(points))
    );
    if let Some(&f) = family.first() {
        let rest = f & !(1 << (points - 1));
        let p = g.predict(rest, points - 1);
        println!("predicting point {} from labeling {f:05b}: {:?}", points - 1, p);
    }
}
