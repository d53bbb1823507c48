use std::collections::HashMap;
use std::sync::Arc;

use rand::RngCore;

use crate::domain::{
    Bound, Classifier, Constant, DomainPoint, HypothesisClass, Label, LabeledExample,
};
use crate::error::{Error, Result};
use crate::games::{PatternAvoidanceFunction, Strategy};
use crate::learners::estimator::{blocks, pattern_after};
use crate::learners::one_inclusion::{OneInclusionPredictor, PatternFn};
use crate::learners::{Learner, Notes, Trained};

/// Empirical risk minimisation: the class's canonical consistent hypothesis
/// when the sample is realizable (leftmost for thresholds), otherwise the first
/// enumerated minimiser.
#[derive(Clone)]
pub struct Erm {
    pub class: Arc<dyn HypothesisClass>,
}

impl Erm {
    pub fn new(class: Arc<dyn HypothesisClass>) -> Self {
        Erm { class }
    }

    pub fn fit(&self, sample: &[LabeledExample]) -> Result<Bound> {
        if let Some(id) = self.class.consistent_hypothesis(sample)? {
            return Ok(Bound {
                class: Arc::clone(&self.class),
                id,
            });
        }
        let ids = self.class.enumerate().ok_or_else(|| {
            Error::Inconsistent(format!(
                "sample is not realizable by {} and the class is not enumerable",
                self.class.name()
            ))
        })?;
        let mut best: Option<(usize, usize)> = None;
        for (k, id) in ids.iter().enumerate() {
            let mut wrong = 0;
            for ex in sample {
                if self.class.evaluate(id, &ex.point)? != ex.label {
                    wrong += 1;
                }
            }
            if best.map_or(true, |(w, _)| wrong < w) {
                best = Some((wrong, k));
            }
        }
        let (_, k) = best.ok_or_else(|| Error::Inconsistent("empty class".into()))?;
        Ok(Bound {
            class: Arc::clone(&self.class),
            id: ids[k].clone(),
        })
    }
}

impl Learner for Erm {
    fn name(&self) -> String {
        "erm".into()
    }

    fn train(&self, sample: &[LabeledExample], _rng: &mut dyn RngCore) -> Result<Trained> {
        Ok(Trained::plain(Arc::new(self.fit(sample)?)))
    }
}

/// Predicts the first training label seen at a point, 0 on unseen points.
#[derive(Clone, Copy, Debug, Default)]
pub struct Memorizer;

struct Memory(HashMap<DomainPoint, Label>);

impl Classifier for Memory {
    fn predict(&self, x: &DomainPoint) -> Result<Label> {
        Ok(self.0.get(x).copied().unwrap_or(false))
    }
}

impl Learner for Memorizer {
    fn name(&self) -> String {
        "memorizer".into()
    }

    fn train(&self, sample: &[LabeledExample], _rng: &mut dyn RngCore) -> Result<Trained> {
        let mut m = HashMap::new();
        for ex in sample {
            m.entry(ex.point.clone()).or_insert(ex.label);
        }
        Ok(Trained::plain(Arc::new(Memory(m))))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ConstantLearner(pub Label);

impl Learner for ConstantLearner {
    fn name(&self) -> String {
        format!("constant-{}", self.0 as u8)
    }

    fn train(&self, _sample: &[LabeledExample], _rng: &mut dyn RngCore) -> Result<Trained> {
        Ok(Trained::plain(Arc::new(Constant(self.0))))
    }
}

pub(crate) fn pattern_fn(g: PatternAvoidanceFunction) -> PatternFn {
    Arc::new(move |x: &[DomainPoint]| g.evaluate(x))
}

/// A single `A_g` voter: `g = ŷ_S` from the whole blocked sample, trained on
/// the whole sample.
#[derive(Clone)]
pub struct OneInclusionLearner {
    pub strategy: Arc<dyn Strategy>,
    pub d: usize,
    pub cap: usize,
}

struct Single(OneInclusionPredictor);

impl Classifier for Single {
    fn predict(&self, x: &DomainPoint) -> Result<Label> {
        Ok(self.0.predict(x)?.label)
    }
}

impl Learner for OneInclusionLearner {
    fn name(&self) -> String {
        "one_inclusion".into()
    }

    fn train(&self, sample: &[LabeledExample], _rng: &mut dyn RngCore) -> Result<Trained> {
        let g = pattern_after(&self.strategy, &blocks(sample, self.d))?;
        let p = OneInclusionPredictor::new(pattern_fn(g), self.d, sample, self.cap)?;
        Ok(Trained {
            classifier: Arc::new(Single(p)),
            notes: Notes {
                voters: 1,
                distinct_voters: 1,
                ..Notes::default()
            },
        })
    }
}
