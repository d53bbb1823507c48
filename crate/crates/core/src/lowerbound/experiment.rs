use std::fmt::Write as _;
use std::sync::Arc;

use num::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Address, LabeledExample};
use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::lowerbound::hard::{event_g_kappa, n_kappa, n_kappa_guard, node_mass, HardDistribution, Trace};
use crate::seeding::{mix, rng, stream};
use crate::trees::Branch;

/// How each trial's branch is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchMode {
    /// Uniform among branches passing through node `κ`, so `κ` is a node of
    /// the branch as the conditional-error argument requires.
    #[default]
    ThroughKappa,
    /// Uniform over all branches.
    Uniform,
}

/// What predicts the test label in a trial.
#[derive(Clone)]
pub enum Subject {
    Learner(Arc<dyn Learner>),
    /// Knows the trial's branch and predicts `f_y` exactly.
    Oracle,
}

impl Subject {
    pub fn name(&self) -> String {
        match self {
            Subject::Learner(l) => l.name(),
            Subject::Oracle => "oracle_branch".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBoundConfig {
    pub kappas: Vec<u32>,
    pub trials: usize,
    pub seed: u64,
    pub mode: BranchMode,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KappaCell {
    pub kappa: u32,
    pub n: u64,
    pub trials: usize,
    /// `n_κ ≥ d^(κ+1)/(9(d−1))` holds.
    pub guard_ok: bool,
    pub g_count: usize,
    pub p_g_hat: f64,
    pub p_g_se: f64,
    /// `(d−1)·d^(−κ)/4`.
    pub p_g_bound: f64,
    pub errors_on_g: usize,
    /// `None` when `G(κ)` never occurred.
    pub cond_err: Option<f64>,
    pub cond_err_se: Option<f64>,
    pub loss_hat: f64,
    pub loss_se: f64,
    pub n_times_loss: f64,
    pub n_times_loss_se: f64,
    /// Trials where the learner reported an ERM fallback.
    pub fallbacks: usize,
}

impl KappaCell {
    pub fn insufficient_data(&self) -> bool {
        self.g_count == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub learner: String,
    pub d: usize,
    pub seed: u64,
    pub mode: BranchMode,
    /// Branch seeds are `branch_seed(seed, κ, trial)` for `trial < trials`.
    pub branch_seeds: String,
    pub cells: Vec<KappaCell>,
}

pub const CSV_HEADER: &str = "kappa,n,trials,p_g_hat,p_g_bound,cond_err,cond_err_se,n_times_loss";

impl LowerBoundReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        let na = |x: Option<f64>| x.map_or("NA".to_string(), |v| v.to_string());
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                c.kappa,
                c.n,
                c.trials,
                c.p_g_hat,
                c.p_g_bound,
                na(c.cond_err),
                na(c.cond_err_se),
                c.n_times_loss
            );
        }
        out
    }

    pub fn cell(&self, kappa: u32) -> Option<&KappaCell> {
        self.cells.iter().find(|c| c.kappa == kappa)
    }

    /// `max_κ n_κ·loss` over the measured cells.
    pub fn max_n_times_loss(&self) -> Option<&KappaCell> {
        self.cells
            .iter()
            .max_by(|a, b| a.n_times_loss.total_cmp(&b.n_times_loss))
    }
}

pub fn trial_seed(master: u64, kappa: u32, trial: usize) -> u64 {
    mix(&[master, kappa as u64, trial as u64])
}

pub fn branch_seed(master: u64, kappa: u32, trial: usize) -> u64 {
    mix(&[trial_seed(master, kappa, trial), stream::BRANCH])
}

struct TrialRecord {
    g: bool,
    errors: Vec<bool>,
    fallbacks: Vec<bool>,
}

fn run_trial(
    base: &HardDistribution,
    subjects: &[Subject],
    kappa: u32,
    n: usize,
    trial: usize,
    config: &LowerBoundConfig,
) -> Result<TrialRecord> {
    let d = base.d();
    let ts = trial_seed(config.seed, kappa, trial);
    let bs = branch_seed(config.seed, kappa, trial);
    let branch = match config.mode {
        BranchMode::ThroughKappa => {
            Branch::through(&Address::from_shortlex_index(d, kappa as u128), d, bs)
        }
        BranchMode::Uniform => Branch::random(d, bs),
    };
    let hard = base.with_branch(branch);
    let train = hard.sample_n(n, &mut rng(mix(&[ts, stream::SAMPLE])))?;
    let test = hard.sample(&mut rng(mix(&[ts, stream::TEST])))?;
    let g = event_g_kappa(
        &Trace {
            k: test.k,
            x: &test.x,
            train: &train,
        },
        kappa as u128,
        d,
    );
    let sample: Vec<LabeledExample> = train.iter().map(|t| t.example()).collect();
    let mut errors = Vec::with_capacity(subjects.len());
    let mut fallbacks = Vec::with_capacity(subjects.len());
    for s in subjects {
        let (pred, fell_back) = match s {
            Subject::Oracle => (hard.label_point(&test.x)?, false),
            Subject::Learner(l) => {
                let trained = l.train(&sample, &mut rng(mix(&[ts, stream::LEARNER])))?;
                (trained.classifier.predict(&test.x)?, trained.notes.fallback.is_some())
            }
        };
        errors.push(pred != test.y);
        fallbacks.push(fell_back);
    }
    Ok(TrialRecord { g, errors, fallbacks })
}

fn se(p: f64, count: usize) -> f64 {
    (p * (1.0 - p) / count as f64).sqrt()
}

/// Runs every subject on the same trials: one fresh branch, sample and test
/// draw per `(κ, trial)`, seeded independently of the thread schedule.
pub fn run_lower_bound_suite(
    base: &HardDistribution,
    subjects: &[Subject],
    config: &LowerBoundConfig,
) -> Result<Vec<LowerBoundReport>> {
    if config.trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    let d = base.d();
    let mut cells: Vec<Vec<KappaCell>> = vec![Vec::new(); subjects.len()];
    for &kappa in &config.kappas {
        let n = n_kappa(d, kappa)?;
        let guard_ok = n_kappa_guard(d, kappa)?;
        let records: Vec<TrialRecord> = (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(base, subjects, kappa, n as usize, t, config))
            .collect::<Result<_>>()?;
        let trials = records.len();
        let g_count = records.iter().filter(|r| r.g).count();
        let p_g_hat = g_count as f64 / trials as f64;
        let p_g_bound = (node_mass(d, kappa as u128) / num::BigInt::from(4))
            .to_f64()
            .unwrap_or(0.0);
        for (i, out) in cells.iter_mut().enumerate() {
            let errors = records.iter().filter(|r| r.errors[i]).count();
            let errors_on_g = records.iter().filter(|r| r.g && r.errors[i]).count();
            let loss_hat = errors as f64 / trials as f64;
            let (cond_err, cond_err_se) = if g_count == 0 {
                (None, None)
            } else {
                let c = errors_on_g as f64 / g_count as f64;
                (Some(c), Some(se(c, g_count)))
            };
            out.push(KappaCell {
                kappa,
                n,
                trials,
                guard_ok,
                g_count,
                p_g_hat,
                p_g_se: se(p_g_hat, trials),
                p_g_bound,
                errors_on_g,
                cond_err,
                cond_err_se,
                loss_hat,
                loss_se: se(loss_hat, trials),
                n_times_loss: n as f64 * loss_hat,
                n_times_loss_se: n as f64 * se(loss_hat, trials),
                fallbacks: records.iter().filter(|r| r.fallbacks[i]).count(),
            });
        }
    }
    Ok(subjects
        .iter()
        .zip(cells)
        .map(|(s, cells)| LowerBoundReport {
            learner: s.name(),
            d,
            seed: config.seed,
            mode: config.mode,
            branch_seeds: "mix(mix(seed, kappa, trial), BRANCH)".into(),
            cells,
        })
        .collect())
}

pub fn run_lower_bound_experiment(
    base: &HardDistribution,
    subject: Subject,
    config: &LowerBoundConfig,
) -> Result<LowerBoundReport> {
    Ok(run_lower_bound_suite(base, &[subject], config)?.remove(0))
}
