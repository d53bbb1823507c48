use serde::Serialize;

use crate::domain::{Block, DomainPoint, HypothesisClass, LabeledExample};
use crate::error::Result;
use crate::games::{FiniteGame, GameSolver};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthBound {
    Exact(usize),
    /// The search stopped at the cap.
    AtLeast(usize),
}

impl DepthBound {
    pub fn value(&self) -> usize {
        match self {
            DepthBound::Exact(t) | DepthBound::AtLeast(t) => *t,
        }
    }
}

impl std::fmt::Display for DepthBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DepthBound::Exact(t) => write!(f, "{t}"),
            DepthBound::AtLeast(t) => write!(f, ">= {t}"),
        }
    }
}

/// Largest `t` such that some depth-`t` d-VCL tree over `domain` is shattered,
/// through the memoized version-space recursion.
pub fn dvcl_depth(
    class: &dyn HypothesisClass,
    domain: &[DomainPoint],
    d: usize,
    cap: usize,
) -> Result<DepthBound> {
    let game = FiniteGame::new(class, domain, d)?;
    let solver = GameSolver::new(game);
    let value = solver.value(solver.game().full()).max(0) as usize;
    Ok(if value >= cap {
        DepthBound::AtLeast(cap)
    } else {
        DepthBound::Exact(value)
    })
}

/// Unmemoized search over all trees through the consistency oracle. Meant as
/// an independent reference for small inputs.
pub fn brute_force_dvcl_depth(
    class: &dyn HypothesisClass,
    domain: &[DomainPoint],
    d: usize,
    cap: usize,
) -> Result<usize> {
    let tuples = all_tuples(domain, d);
    let mut best = 0;
    let mut sample = Vec::new();
    for t in 1..=cap {
        if exists_tree(class, &tuples, d, t, &mut sample)? {
            best = t;
        } else {
            break;
        }
    }
    Ok(best)
}

fn all_tuples(domain: &[DomainPoint], d: usize) -> Vec<Vec<DomainPoint>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<DomainPoint>| {
                domain.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.push(p.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn exists_tree(
    class: &dyn HypothesisClass,
    tuples: &[Vec<DomainPoint>],
    d: usize,
    t: usize,
    sample: &mut Vec<LabeledExample>,
) -> Result<bool> {
    if t == 0 {
        return class.is_consistent(sample);
    }
    let base = sample.len();
    'tuples: for x in tuples {
        for y in Block::all(d) {
            sample.truncate(base);
            sample.extend(
                x.iter()
                    .enumerate()
                    .map(|(j, p)| LabeledExample::new(p.clone(), y.bit(j))),
            );
            if !exists_tree(class, tuples, d, t - 1, sample)? {
                continue 'tuples;
            }
        }
        sample.truncate(base);
        return Ok(true);
    }
    sample.truncate(base);
    Ok(false)
}
