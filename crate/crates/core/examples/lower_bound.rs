//! The hard distribution on `TreeClass(d)`: how often the test point is fresh
//! and deep, and how often each learner then guesses wrong.
//!
//! cargo run --release --example lower_bound -- [d] [trials]

use std::sync::Arc;
use std::time::Instant;

use vcl_lab::classes::TreeClass;
use vcl_lab::learners::{Erm, Memorizer, OptimalRateLearner};
use vcl_lab::lowerbound::{
    run_lower_bound_suite, BranchMode, HardDistribution, LowerBoundConfig, Subject,
};
use vcl_lab::trees::Branch;

fn main() -> vcl_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let d: usize = args.next().map_or(3, |s| s.parse().expect("d"));
    let trials: usize = args.next().map_or(20_000, |s| s.parse().expect("trials"));

    let class = Arc::new(TreeClass::new(d));
    let subjects = vec![
        Subject::Learner(Arc::new(Erm::new(class.clone()))),
        Subject::Learner(Arc::new(Memorizer)),
        Subject::Learner(Arc::new(OptimalRateLearner::for_class(class, d)?)),
        Subject::Oracle,
    ];
    let base = HardDistribution::tree_class(d, Branch::random(d, 0))?;
    let config = LowerBoundConfig {
        kappas: vec![3, 4, 5],
        trials,
        seed: 2024,
        mode: BranchMode::ThroughKappa,
    };

    let start = Instant::now();
    let reports = run_lower_bound_suite(&base, &subjects, &config)?;
    for r in &reports {
        println!("# {} (d = {d})", r.learner);
        print!("{}", r.to_csv());
    }
    eprintln!("{} trials per cell in {:.1?}", trials, start.elapsed());
    Ok(())
}
