//! Runs every acceptance criterion at quick scale and prints the report.
//!
//! cargo run --release --example verify_suite -- [seed]

use vcl_lab::harness::{verify, Scale, VerifyOptions};

fn main() -> vcl_lab::Result<()> {
    let seed: u64 = std::env::args().nth(1).map_or(0, |s| s.parse().expect("seed"));
    let report = verify(&VerifyOptions { seed, scale: Scale::Quick })?;
    print!("{}", report.to_text());
    let failed: Vec<usize> = report.results.iter().filter(|r| !r.passed()).map(|r| r.id).collect();
    println!("failed criteria: {failed:?}");
    Ok(())
}
