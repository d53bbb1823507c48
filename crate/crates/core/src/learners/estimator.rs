//! Choosing the chunk size `t̂` for the optimal-rate learner.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::RngCore;
use serde::Serialize;

use crate::domain::{Block, LabeledExample};
use crate::error::{Error, Result};
use crate::games::{
    FiniteGame, ForbiddenPatternLearner, PatternAvoidanceFunction, Play, Strategy,
    TupleDistribution, VersionSpace,
};

/// `ê_t ≤ 3/16` selects `t̂`.
pub const SELECT_NUM: usize = 3;
pub const SELECT_DEN: usize = 16;
/// `t*` is the first `t` with `e_t ≤ 1/8`.
pub const T_STAR_LEVEL: f64 = 1.0 / 8.0;
/// Good sizes up to `t*` have `e_t ≤ 1/4`.
pub const T_GOOD_LEVEL: f64 = 1.0 / 4.0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EstimateRow {
    pub t: usize,
    pub chunks: usize,
    /// Chunks whose pattern function matched some test tuple.
    pub hits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EstimatorReport {
    /// `None` when no `t` passes the test.
    pub t_hat: Option<usize>,
    pub rows: Vec<EstimateRow>,
    pub m: usize,
    pub m_tuples: usize,
}

impl EstimatorReport {
    pub fn e_hat(&self, t: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.t == t)
            .map(|r| r.hits as f64 / r.chunks as f64)
    }
}

/// Groups consecutive examples into `d`-tuples, dropping the remainder.
pub fn blocks(examples: &[LabeledExample], d: usize) -> Vec<Play> {
    examples
        .chunks_exact(d)
        .map(|c| {
            let bits: Vec<bool> = c.iter().map(|e| e.label).collect();
            Play::new(c.iter().map(|e| e.point.clone()).collect(), Block::from_bits(&bits))
        })
        .collect()
}

/// `ŷ_S`: the pattern function left by the forbidden-pattern learner after
/// the adversary plays `plays`.
pub fn pattern_after(f: &Arc<dyn Strategy>, plays: &[Play]) -> Result<PatternAvoidanceFunction> {
    let mut learner = ForbiddenPatternLearner::new(Arc::clone(f))?;
    for p in plays {
        learner.propose(&p.x)?;
        learner.reveal(p.y)?;
    }
    Ok(learner.pattern().clone())
}

/// Splits `S` into shuffled train and test halves of `⌊n/2⌋` examples and, for
/// `t = 1, 2, …`, checks `⌊m_tuples/t⌋` disjoint train chunks of `t` tuples
/// against the test tuples. Stops at the first `t` with `ê_t ≤ 3/16`.
pub fn sample_size_estimator(
    sample: &[LabeledExample],
    f: &Arc<dyn Strategy>,
    d: usize,
    rng: &mut dyn RngCore,
) -> Result<EstimatorReport> {
    let n = sample.len();
    if n < 4 * d {
        return Err(Error::InsufficientSample {
            needed: 4 * d,
            got: n,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let m = n / 2;
    let train: Vec<LabeledExample> = order[..m].iter().map(|&i| sample[i].clone()).collect();
    let test: Vec<LabeledExample> = order[m..2 * m].iter().map(|&i| sample[i].clone()).collect();
    let train = blocks(&train, d);
    let test = blocks(&test, d);
    let m_tuples = train.len();
    let mut rows = Vec::new();
    for t in 1..=m_tuples {
        let k = m_tuples / t;
        let mut hits = 0;
        for i in 0..k {
            let g = pattern_after(f, &train[i * t..(i + 1) * t])?;
            for p in &test {
                if g.evaluate(&p.x)? == p.y {
                    hits += 1;
                    break;
                }
            }
        }
        rows.push(EstimateRow { t, chunks: k, hits });
        if hits * SELECT_DEN <= SELECT_NUM * k {
            return Ok(EstimatorReport {
                t_hat: Some(t),
                rows,
                m,
                m_tuples,
            });
        }
    }
    Ok(EstimatorReport {
        t_hat: None,
        rows,
        m,
        m_tuples,
    })
}

/// `e_t = P[FP-loss(ŷ_t) > 0]` for `t = 0..=t_max`, where `ŷ_t` is the pattern
/// function after `t` tuples drawn from `dist`. Computed by propagating the
/// law of the accepted version space, so the strategy must depend on its
/// history only through the version space over `game`'s domain.
pub fn fp_positive_curve(
    f: &Arc<dyn Strategy>,
    game: &FiniteGame,
    dist: &TupleDistribution,
    t_max: usize,
) -> Result<Vec<f64>> {
    let mut states: HashMap<VersionSpace, (f64, Vec<Play>)> = HashMap::new();
    states.insert(game.full(), (1.0, Vec::new()));
    let mut curve = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let mut positive = 0.0;
        let mut next: HashMap<VersionSpace, (f64, Vec<Play>)> = HashMap::new();
        let mut keys: Vec<VersionSpace> = states.keys().copied().collect();
        keys.sort_unstable();
        for v in keys {
            let (p, history) = &states[&v];
            let g = PatternAvoidanceFunction::new(Arc::clone(f), history.clone())?;
            let mut stay = *p;
            let mut any = false;
            for (i, (x, y)) in dist.atoms().iter().enumerate() {
                let mass = dist.mass_f64(i);
                if mass == 0.0 || g.evaluate(x)? != *y {
                    continue;
                }
                any = true;
                if t == t_max {
                    continue;
                }
                stay -= p * mass;
                let w = game.restrict_points(v, x, *y)?;
                let entry = next.entry(w).or_insert_with(|| {
                    let mut h = history.clone();
                    h.push(Play::new(x.clone(), *y));
                    (0.0, h)
                });
                entry.0 += p * mass;
            }
            if any {
                positive += p;
            }
            if t < t_max {
                next.entry(v).or_insert_with(|| (0.0, history.clone())).0 += stay.max(0.0);
            }
        }
        curve.push(positive);
        states = next;
    }
    Ok(curve)
}

/// `t*` and the good sizes `{t ≤ t* : e_t ≤ 1/4}` of a curve indexed from 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoodSizes {
    pub t_star: Option<usize>,
    pub good: Vec<usize>,
}

impl GoodSizes {
    pub fn contains(&self, t: usize) -> bool {
        self.good.contains(&t)
    }
}

pub fn good_sizes(curve: &[f64]) -> GoodSizes {
    let t_star = (1..curve.len()).find(|&t| curve[t] <= T_STAR_LEVEL);
    let good = match t_star {
        Some(ts) => (1..=ts).filter(|&t| curve[t] <= T_GOOD_LEVEL).collect(),
        None => Vec::new(),
    };
    GoodSizes { t_star, good }
}
