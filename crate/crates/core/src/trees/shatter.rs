use std::collections::BTreeMap;

use crate::domain::{Address, Block, HypothesisClass, HypothesisId, LabeledExample};
use crate::error::{Error, Result};
use crate::trees::TreeSource;

pub const DEFAULT_BUDGET: u128 = 1 << 20;

#[derive(Clone, Copy, Debug)]
pub struct ShatterOptions {
    pub budget: u128,
    /// Keep one certificate per branch (memory grows with `2^(d·t)`).
    pub collect_witness: bool,
}

impl Default for ShatterOptions {
    fn default() -> Self {
        ShatterOptions {
            budget: DEFAULT_BUDGET,
            collect_witness: true,
        }
    }
}

/// Certificates indexed by the branch, written as the address it reaches.
#[derive(Clone, Debug, Default)]
pub struct ShatteringWitness {
    pub certificates: BTreeMap<Address, HypothesisId>,
}

#[derive(Clone, Debug)]
pub struct ShatterOutcome {
    pub shattered: bool,
    pub witness: ShatteringWitness,
    pub failing_branch: Option<Address>,
    /// Branches certified by the tree's own stored witness.
    pub certified_by_tree: u128,
}

pub fn shatters_dvcl(
    class: &dyn HypothesisClass,
    tree: &dyn TreeSource,
    t: usize,
) -> Result<ShatterOutcome> {
    shatters_dvcl_with(class, tree, t, ShatterOptions::default())
}

/// True iff every branch of length `t` yields a realizable labeled path.
pub fn shatters_dvcl_with(
    class: &dyn HypothesisClass,
    tree: &dyn TreeSource,
    t: usize,
    opts: ShatterOptions,
) -> Result<ShatterOutcome> {
    let d = tree.block_size();
    if let Some(max) = tree.max_depth() {
        if t > max {
            return Err(Error::Invalid(format!("depth {t} exceeds tree depth {max}")));
        }
    }
    let bits = (d * t) as u32;
    let required = if bits >= 127 { u128::MAX } else { 1u128 << bits };
    if required > opts.budget {
        return Err(Error::BudgetExceeded {
            required,
            budget: opts.budget,
        });
    }
    let mut out = ShatterOutcome {
        shattered: true,
        witness: ShatteringWitness::default(),
        failing_branch: None,
        certified_by_tree: 0,
    };
    let mut path = Vec::with_capacity(d * t);
    walk(class, tree, t, &Address::root(), &mut path, &opts, &mut out)?;
    Ok(out)
}

fn walk(
    class: &dyn HypothesisClass,
    tree: &dyn TreeSource,
    t: usize,
    u: &Address,
    path: &mut Vec<LabeledExample>,
    opts: &ShatterOptions,
    out: &mut ShatterOutcome,
) -> Result<bool> {
    if u.level() == t {
        let mut cert = None;
        if let Some(w) = tree.table(u) {
            if certifies(class, &w, path) {
                cert = Some(w);
                out.certified_by_tree += 1;
            }
        }
        if cert.is_none() {
            cert = class.consistent_hypothesis(path)?;
        }
        return Ok(match cert {
            Some(h) => {
                if opts.collect_witness {
                    out.witness.certificates.insert(u.clone(), h);
                }
                true
            }
            None => {
                out.shattered = false;
                out.failing_branch = Some(u.clone());
                false
            }
        });
    }
    let points = tree.node(u)?;
    let d = tree.block_size();
    let base = path.len();
    for y in Block::all(d) {
        path.truncate(base);
        for (j, p) in points.iter().enumerate() {
            path.push(LabeledExample::new(p.clone(), y.bit(j)));
        }
        if !walk(class, tree, t, &u.child(y), path, opts, out)? {
            path.truncate(base);
            return Ok(false);
        }
    }
    path.truncate(base);
    Ok(true)
}

fn certifies(class: &dyn HypothesisClass, h: &HypothesisId, path: &[LabeledExample]) -> bool {
    path.iter()
        .all(|e| matches!(class.evaluate(h, &e.point), Ok(l) if l == e.label))
}
