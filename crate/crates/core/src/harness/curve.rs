use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{zero_one_loss, Classifier, FiniteSupportDistribution, LabeledExample};
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, LearnerSpec, NGrid};
use crate::learners::Learner;
use crate::seeding::{mix, rng, stream};

/// Test draws used by [`HoldOut`].
pub const HOLD_OUT_DRAWS: usize = 10_000;

/// Something to learn from: a sampler and a way to score a hypothesis.
pub trait Population: Sync {
    fn draw(&self, rng: &mut dyn RngCore) -> Result<LabeledExample>;

    fn loss(&self, h: &dyn Classifier, rng: &mut dyn RngCore) -> Result<f64>;
}

impl Population for FiniteSupportDistribution {
    fn draw(&self, rng: &mut dyn RngCore) -> Result<LabeledExample> {
        Ok(self.sample(rng))
    }

    /// Exact, so `rng` is unused.
    fn loss(&self, h: &dyn Classifier, _rng: &mut dyn RngCore) -> Result<f64> {
        Ok(zero_one_loss(h, self)?.to_f64())
    }
}

/// A bare sampler scored on fresh hold-out draws.
pub struct HoldOut<F> {
    pub sampler: F,
    pub draws: usize,
}

impl<F> HoldOut<F>
where
    F: Fn(&mut dyn RngCore) -> Result<LabeledExample> + Sync,
{
    pub fn new(sampler: F) -> Self {
        HoldOut {
            sampler,
            draws: HOLD_OUT_DRAWS,
        }
    }
}

impl<F> Population for HoldOut<F>
where
    F: Fn(&mut dyn RngCore) -> Result<LabeledExample> + Sync,
{
    fn draw(&self, rng: &mut dyn RngCore) -> Result<LabeledExample> {
        (self.sampler)(rng)
    }

    fn loss(&self, h: &dyn Classifier, rng: &mut dyn RngCore) -> Result<f64> {
        let mut wrong = 0usize;
        for _ in 0..self.draws {
            let ex = (self.sampler)(rng)?;
            if h.predict(&ex.point)? != ex.label {
                wrong += 1;
            }
        }
        Ok(wrong as f64 / self.draws as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub n: usize,
    pub mean_loss: f64,
    /// Sample standard deviation over `√trials`.
    pub std_error: f64,
    pub trials: usize,
    pub seed: u64,
    /// Trials where the learner fell back to ERM.
    pub fallbacks: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveReport {
    pub learner: String,
    pub seed: u64,
    pub rows: Vec<CurveRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ExperimentConfig>,
}

impl CurveReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,mean_loss,std_error,trials,seed,fallbacks\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n, r.mean_loss, r.std_error, r.trials, r.seed, r.fallbacks
            ));
        }
        out
    }
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let t = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / t;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1.0);
    (mean, (var / t).sqrt())
}

/// `E_{S∼Dⁿ}[L(ĥ_S)]` at every `n`, one independently seeded task per
/// `(n, trial)`.
pub fn estimate_curve_with(
    learner: &dyn Learner,
    population: &dyn Population,
    ns: &[usize],
    trials: usize,
    seed: u64,
) -> Result<CurveReport> {
    if trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let outcomes: Vec<(f64, bool)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let ts = mix(&[seed, n as u64, t as u64]);
                let mut sample_rng = rng(mix(&[ts, stream::SAMPLE]));
                let sample = (0..n)
                    .map(|_| population.draw(&mut sample_rng))
                    .collect::<Result<Vec<_>>>()?;
                let trained = learner.train(&sample, &mut rng(mix(&[ts, stream::LEARNER])))?;
                let loss = population.loss(
                    trained.classifier.as_ref(),
                    &mut rng(mix(&[ts, stream::TEST])),
                )?;
                Ok((loss, trained.notes.fallback.is_some()))
            })
            .collect::<Result<_>>()?;
        let losses: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
        let (mean_loss, std_error) = mean_and_se(&losses);
        rows.push(CurveRow {
            n,
            mean_loss,
            std_error,
            trials,
            seed,
            fallbacks: outcomes.iter().filter(|o| o.1).count(),
        });
    }
    Ok(CurveReport {
        learner: learner.name(),
        seed,
        rows,
        config: None,
    })
}

/// Runs the `curve` section of a configuration.
pub fn estimate_curve(config: &ExperimentConfig) -> Result<CurveReport> {
    config.validate()?;
    let spec = config
        .distribution
        .as_ref()
        .ok_or_else(|| Error::config("distribution", "required for a learning curve"))?;
    let dist = spec.build(&config.class)?;
    let class = config.class.build()?;
    if config.realizable {
        let support: Vec<LabeledExample> = dist.atoms().to_vec();
        if !class.is_consistent(&support)? {
            let shown: Vec<String> = support
                .iter()
                .map(|e| format!("({}, {})", e.point, e.label as u8))
                .collect();
            return Err(Error::config(
                "distribution",
                format!(
                    "not realizable by {}: no hypothesis fits [{}]",
                    class.name(),
                    shown.join(", ")
                ),
            ));
        }
    }
    let learner_spec = config
        .learner
        .clone()
        .unwrap_or_else(|| LearnerSpec::of(super::config::LearnerKind::Erm));
    let learner = learner_spec.build(&config.class)?.ok_or_else(|| {
        Error::config("learner.learner", "the oracle only runs in lower-bound experiments")
    })?;
    let grid = config
        .n_grid
        .clone()
        .unwrap_or(NGrid::Geometric { base: 2, from: 4, to: 9 });
    let mut report = estimate_curve_with(
        learner.as_ref(),
        &dist,
        &grid.values()?,
        config.trials,
        config.seed,
    )?;
    report.config = Some(config.clone());
    Ok(report)
}
