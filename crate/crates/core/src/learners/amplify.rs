use std::sync::Arc;

use rand::RngCore;
use serde::Serialize;

use crate::domain::{empirical_loss, zero_one_loss, Classifier, FiniteSupportDistribution, LabeledExample};
use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::seeding::{mix, rng, stream};

/// `⌈log₂(2/δ)⌉`.
pub fn batch_count(delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Invalid(format!("confidence δ = {delta} is outside (0, 1]")));
    }
    Ok((2.0 / delta).log2().ceil().max(1.0) as usize)
}

pub struct Amplified {
    pub classifier: Arc<dyn Classifier>,
    pub batches: usize,
    pub validation_losses: Vec<f64>,
    pub chosen: usize,
}

/// Trains `base` on `B = ⌈log₂(2/δ)⌉` disjoint contiguous batches of the first
/// `⌈n/2⌉` examples and keeps the batch hypothesis with the least error on the
/// last `⌊n/2⌋` (ties to the earliest batch).
pub fn pac_amplify(
    base: &dyn Learner,
    sample: &[LabeledExample],
    delta: f64,
    rng: &mut dyn RngCore,
) -> Result<Amplified> {
    let b = batch_count(delta)?;
    let n = sample.len();
    let train_len = n.div_ceil(2);
    if n < 2 * b || train_len / b == 0 {
        return Err(Error::InsufficientSample { needed: 2 * b, got: n });
    }
    let (train, validation) = sample.split_at(train_len);
    let size = train_len / b;
    let mut best: Option<(f64, usize, Arc<dyn Classifier>)> = None;
    let mut losses = Vec::with_capacity(b);
    for i in 0..b {
        let h = base.train(&train[i * size..(i + 1) * size], rng)?.classifier;
        let loss = if validation.is_empty() {
            0.0
        } else {
            let r = empirical_loss(h.as_ref(), validation)?;
            *r.numer() as f64 / *r.denom() as f64
        };
        losses.push(loss);
        if best.as_ref().map_or(true, |(l, _, _)| loss < *l) {
            best = Some((loss, i, h));
        }
    }
    let (_, chosen, classifier) = best.expect("at least one batch");
    Ok(Amplified {
        classifier,
        batches: b,
        validation_losses: losses,
        chosen,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PacVerdict {
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub batches: usize,
    pub repetitions: usize,
    /// Fraction of repetitions whose loss is at most `ε`.
    pub success_rate: f64,
    pub failure_rate: f64,
    pub seed: u64,
}

/// Repeats `pac_amplify` on fresh samples of size `n` and reports how often
/// the exact loss stays within `ε`.
pub fn pac_verdict(
    base: &dyn Learner,
    dist: &FiniteSupportDistribution,
    n: usize,
    epsilon: f64,
    delta: f64,
    repetitions: usize,
    seed: u64,
) -> Result<PacVerdict> {
    let mut ok = 0usize;
    let mut batches = batch_count(delta)?;
    for r in 0..repetitions {
        let mut sample_rng = rng(mix(&[seed, r as u64, stream::SAMPLE]));
        let mut learner_rng = rng(mix(&[seed, r as u64, stream::LEARNER]));
        let sample = dist.sample_n(n, &mut sample_rng);
        let out = pac_amplify(base, &sample, delta, &mut learner_rng)?;
        batches = out.batches;
        if zero_one_loss(out.classifier.as_ref(), dist)?.to_f64() <= epsilon {
            ok += 1;
        }
    }
    let success_rate = ok as f64 / repetitions.max(1) as f64;
    Ok(PacVerdict {
        n,
        epsilon,
        delta,
        batches,
        repetitions,
        success_rate,
        failure_rate: 1.0 - success_rate,
        seed,
    })
}
