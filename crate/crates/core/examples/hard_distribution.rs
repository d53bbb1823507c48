//! The branch-indexed hard distribution on `TreeClass(d)`: exact masses, the
//! `n_κ` schedule, a realizability witness and empirical node frequencies.
//!
//! cargo run --release --example hard_distribution -- [d]

use num::{BigInt, BigRational};

use vcl_lab::lowerbound::{mass_audit, n_kappa, n_kappa_guard, node_mass, HardDistribution};
use vcl_lab::seeding::rng;
use vcl_lab::trees::Branch;

fn main() -> vcl_lab::Result<()> {
    let d: usize = std::env::args().nth(1).map_or(2, |s| s.parse().expect("d"));
    println!("κ   P[K=κ]      n_κ  guard");
    for kappa in 1..=6u32 {
        println!("{kappa}   {:<10} {:>4}  {}", node_mass(d, kappa as u128), n_kappa(d, kappa)?, n_kappa_guard(d, kappa)?);
    }
    let (sum, tail) = mass_audit(d, 40);
    println!("first 40 nodes carry {:.12}, tail {tail}", vcl_lab::domain::ratio_to_f64(&sum));

    let hard = HardDistribution::tree_class(d, Branch::random(d, 5))?;
    let w = hard.realizability_witness(&BigRational::new(BigInt::from(1), BigInt::from(16)))?;
    println!("witness for ε = 1/16: {} covering nodes ≤ {}, loss ≤ {}", w.hypothesis, w.k, w.loss_bound);

    let mut r = rng(1);
    let draws = hard.sample_n(100_000, &mut r)?;
    for k in 1..=4u128 {
        let c = draws.iter().filter(|x| x.k == k).count();
        println!("K = {k}: {:.4} (exact {})", c as f64 / draws.len() as f64, node_mass(d, k));
    }
    for x in draws.iter().take(5) {
        println!("  x = {}, y = {}, K = {}", x.x, x.y as u8, x.k);
    }
    Ok(())
}
