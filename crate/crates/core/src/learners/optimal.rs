use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rand::RngCore;

use crate::domain::{Classifier, DomainPoint, HypothesisClass, Label, LabeledExample};
use crate::error::{Error, Result};
use crate::games::{Play, Strategy};
use crate::learners::baselines::{pattern_fn, Erm};
use crate::learners::estimator::{blocks, pattern_after, sample_size_estimator};
use crate::learners::one_inclusion::{OneInclusionPredictor, DEFAULT_EXACT_CAP};
use crate::learners::{Learner, Notes, Trained};

/// Per-query counters of a trained majority vote.
#[derive(Debug, Default)]
pub struct VoteStats {
    pub queries: AtomicUsize,
    /// Queries answered by ERM because a graph exceeded the exact cap.
    pub cap_fallbacks: AtomicUsize,
    /// Voter predictions made from a projected (inadmissible) sample.
    pub anomalies: AtomicUsize,
}

/// `x ↦ Majority(a_1(x), …, a_k(x))` with ties broken to 0. Voters sharing an
/// accepted history share one predictor and carry its multiplicity.
pub struct MajorityVote {
    voters: Vec<(OneInclusionPredictor, usize)>,
    erm: Arc<dyn Classifier>,
    pub stats: Arc<VoteStats>,
}

impl MajorityVote {
    /// `erm` answers queries on which some voter's graph exceeds its cap.
    pub fn new(voters: Vec<(OneInclusionPredictor, usize)>, erm: Arc<dyn Classifier>) -> Self {
        MajorityVote {
            voters,
            erm,
            stats: Arc::new(VoteStats::default()),
        }
    }

    pub fn voters(&self) -> usize {
        self.voters.iter().map(|v| v.1).sum()
    }
}

impl Classifier for MajorityVote {
    fn predict(&self, x: &DomainPoint) -> Result<Label> {
        self.stats.queries.fetch_add(1, Ordering::Relaxed);
        let (mut ones, mut zeros) = (0usize, 0usize);
        for (voter, weight) in &self.voters {
            match voter.predict(x) {
                Ok(p) => {
                    if p.anomaly {
                        self.stats.anomalies.fetch_add(1, Ordering::Relaxed);
                    }
                    if p.label {
                        ones += weight;
                    } else {
                        zeros += weight;
                    }
                }
                Err(Error::BudgetExceeded { .. }) => {
                    self.stats.cap_fallbacks.fetch_add(1, Ordering::Relaxed);
                    return self.erm.predict(x);
                }
                Err(e) => return Err(e),
            }
        }
        Ok(ones > zeros)
    }
}

/// Estimate `t̂`, cut the first half into `k = ⌊m_tuples/t̂⌋` chunks of
/// tuples, derive one pattern function per chunk, train a one-inclusion voter
/// under each on the second half, and take the majority.
#[derive(Clone)]
pub struct OptimalRateLearner {
    pub class: Arc<dyn HypothesisClass>,
    pub strategy: Arc<dyn Strategy>,
    pub d: usize,
    pub exact_cap: usize,
}

impl OptimalRateLearner {
    pub fn new(class: Arc<dyn HypothesisClass>, strategy: Arc<dyn Strategy>, d: usize) -> Self {
        OptimalRateLearner {
            class,
            strategy,
            d,
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }

    /// Uses the class's own strategy hook with tuple size `d`.
    pub fn for_class(class: Arc<dyn HypothesisClass>, d: usize) -> Result<Self> {
        let strategy = class.strategy(d).ok_or_else(|| {
            Error::Unsupported(format!("{} has no strategy for d = {d}", class.name()))
        })?;
        Ok(Self::new(class, strategy, d))
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.exact_cap = cap;
        self
    }

    fn erm(&self, sample: &[LabeledExample], why: String, t_hat: Option<usize>) -> Result<Trained> {
        let h = Erm::new(Arc::clone(&self.class)).fit(sample)?;
        Ok(Trained {
            classifier: Arc::new(h),
            notes: Notes {
                fallback: Some(why),
                t_hat,
                ..Notes::default()
            },
        })
    }
}

impl Learner for OptimalRateLearner {
    fn name(&self) -> String {
        "optimal_rate".into()
    }

    fn train(&self, sample: &[LabeledExample], rng: &mut dyn RngCore) -> Result<Trained> {
        let d = self.d;
        let n = sample.len();
        if n < 8 * d {
            return self.erm(sample, format!("n = {n} is below 8d = {}", 8 * d), None);
        }
        let report = sample_size_estimator(sample, &self.strategy, d, rng)?;
        let Some(t_hat) = report.t_hat else {
            return self.erm(sample, "no chunk size passed the estimator".into(), None);
        };
        let m = n / 2;
        let (s_g, s_a) = sample.split_at(m);
        let tuples = blocks(s_g, d);
        let k = tuples.len() / t_hat;
        let mut histories: Vec<(Vec<Play>, usize)> = Vec::new();
        let mut patterns = Vec::new();
        for i in 0..k {
            let end = if i + 1 == k { tuples.len() } else { (i + 1) * t_hat };
            let g = pattern_after(&self.strategy, &tuples[i * t_hat..end])?;
            match histories.iter_mut().position(|(h, _)| h.as_slice() == g.history()) {
                Some(j) => histories[j].1 += 1,
                None => {
                    histories.push((g.history().to_vec(), 1));
                    patterns.push(g);
                }
            }
        }
        let mut voters = Vec::with_capacity(patterns.len());
        for (g, (_, weight)) in patterns.into_iter().zip(&histories) {
            let p = OneInclusionPredictor::new(pattern_fn(g), d, s_a, self.exact_cap)?;
            voters.push((p, *weight));
        }
        let erm: Arc<dyn Classifier> = Arc::new(Erm::new(Arc::clone(&self.class)).fit(sample)?);
        let distinct = voters.len();
        let vote = MajorityVote::new(voters, erm);
        Ok(Trained {
            classifier: Arc::new(vote),
            notes: Notes {
                fallback: None,
                t_hat: Some(t_hat),
                voters: k,
                distinct_voters: distinct,
            },
        })
    }
}
