//! Learners: the one-inclusion predictor, the sample-size estimator, the
//! optimal-rate learner, baselines and confidence amplification.

mod amplify;
mod baselines;
mod estimator;
mod one_inclusion;
mod optimal;
mod orientation;

use std::sync::Arc;

use rand::RngCore;
use serde::Serialize;

use crate::domain::{Classifier, LabeledExample};
use crate::error::Result;

pub use amplify::{batch_count, pac_amplify, pac_verdict, Amplified, PacVerdict};
pub use baselines::{ConstantLearner, Erm, Memorizer, OneInclusionLearner};
pub use estimator::{
    blocks, fp_positive_curve, good_sizes, pattern_after, sample_size_estimator, EstimateRow,
    EstimatorReport, GoodSizes, SELECT_DEN, SELECT_NUM, T_GOOD_LEVEL, T_STAR_LEVEL,
};
pub use one_inclusion::{
    one_inclusion_predict, worst_permutation_loo_error, OneInclusionGraph, OneInclusionPredictor,
    PatternConstraints, PatternFn, Prediction, DEFAULT_EXACT_CAP, MAX_EXACT_CAP,
};
pub use optimal::{MajorityVote, OptimalRateLearner, VoteStats};
pub use orientation::{brute_force_min_max_outdegree, min_max_outdegree_orientation, Orientation};

/// What a training run reports besides the classifier.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Notes {
    /// Set when the learner gave up its own rule and used ERM.
    pub fallback: Option<String>,
    pub t_hat: Option<usize>,
    pub voters: usize,
    pub distinct_voters: usize,
}

#[derive(Clone)]
pub struct Trained {
    pub classifier: Arc<dyn Classifier>,
    pub notes: Notes,
}

impl Trained {
    pub fn plain(classifier: Arc<dyn Classifier>) -> Self {
        Trained {
            classifier,
            notes: Notes::default(),
        }
    }
}

/// Maps a labeled sample to a classifier. Randomized learners draw only from
/// the handle they are given.
pub trait Learner: Send + Sync {
    fn name(&self) -> String;

    fn train(&self, sample: &[LabeledExample], rng: &mut dyn RngCore) -> Result<Trained>;
}
