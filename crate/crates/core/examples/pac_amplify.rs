//! Confidence amplification: ERM on thresholds, trained on `⌈log₂(2/δ)⌉`
//! batches and validated on a held-out half.
//!
//! cargo run --release --example pac_amplify

use std::sync::Arc;

use vcl_lab::classes::ThresholdClass;
use vcl_lab::domain::{DomainPoint, FiniteSupportDistribution, LabeledExample};
use vcl_lab::learners::{batch_count, pac_verdict, Erm};

fn main() -> vcl_lab::Result<()> {
    let atoms = (1..16)
        .map(|i| LabeledExample::new(DomainPoint::rational(i, 16), i > 9))
        .collect();
    let dist = FiniteSupportDistribution::uniform(atoms)?;
    let erm = Erm::new(Arc::new(ThresholdClass));
    for delta in [0.5, 0.1, 0.01] {
        let v = pac_verdict(&erm, &dist, 512, 0.05, delta, 500, 9)?;
        println!(
            "δ = {delta:<5} batches {} (formula {}), failure rate {:.3}",
            v.batches,
            batch_count(delta)?,
            v.failure_rate
        );
    }
    Ok(())
}
