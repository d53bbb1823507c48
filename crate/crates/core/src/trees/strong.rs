use std::collections::BTreeMap;

use crate::domain::{Address, Block, DomainPoint, HypothesisClass, LabeledExample};
use crate::error::{Error, Result};

/// A tree whose level-`s` node holds `s + 1` points; the block leaving it has
/// width `s + 1`, so addresses live in `{0,1}^1 × … × {0,1}^s`.
#[derive(Clone, Debug, Default)]
pub struct StrongVclTree {
    depth: usize,
    nodes: BTreeMap<Address, Vec<DomainPoint>>,
}

impl StrongVclTree {
    pub fn new(depth: usize) -> Self {
        StrongVclTree {
            depth,
            nodes: BTreeMap::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn insert(&mut self, address: Address, points: Vec<DomainPoint>) -> Result<()> {
        let s = address.level();
        if s > self.depth {
            return Err(Error::Invalid(format!("node {address} deeper than {}", self.depth)));
        }
        if address
            .blocks()
            .iter()
            .enumerate()
            .any(|(i, b)| b.width() != i + 1)
        {
            return Err(Error::Invalid(format!("node {address} has misshapen blocks")));
        }
        if points.len() != s + 1 {
            return Err(Error::Invalid(format!(
                "level-{s} node holds {} points, expected {}",
                points.len(),
                s + 1
            )));
        }
        self.nodes.insert(address, points);
        Ok(())
    }

    pub fn node(&self, u: &Address) -> Result<&[DomainPoint]> {
        self.nodes
            .get(u)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::Invalid(format!("no node at {u}")))
    }

    /// All addresses at `level`, in lexicographic order.
    pub fn addresses_at(level: usize) -> Vec<Address> {
        let mut out = vec![Address::root()];
        for s in 0..level {
            out = out
                .iter()
                .flat_map(|a| Block::all(s + 1).map(move |b| a.child(b)))
                .collect();
        }
        out
    }

    /// Fills every node up to the tree depth from `gen(address)`.
    pub fn generate(
        depth: usize,
        mut gen: impl FnMut(&Address) -> Vec<DomainPoint>,
    ) -> Result<Self> {
        let mut t = StrongVclTree::new(depth);
        for level in 0..=depth {
            for a in Self::addresses_at(level) {
                let pts = gen(&a);
                t.insert(a, pts)?;
            }
        }
        Ok(t)
    }
}

/// True iff every `y ∈ {0,1}^1 × … × {0,1}^t` has a realizable labeled path.
pub fn shatters_strong_vcl(
    class: &dyn HypothesisClass,
    tree: &StrongVclTree,
    t: usize,
    budget: u128,
) -> Result<bool> {
    if t > tree.depth() {
        return Err(Error::Invalid(format!("depth {t} exceeds tree depth {}", tree.depth())));
    }
    let bits = (t * (t + 1) / 2) as u32;
    let required = if bits >= 127 { u128::MAX } else { 1u128 << bits };
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let mut path = Vec::new();
    walk(class, tree, t, &Address::root(), &mut path)
}

fn walk(
    class: &dyn HypothesisClass,
    tree: &StrongVclTree,
    t: usize,
    u: &Address,
    path: &mut Vec<LabeledExample>,
) -> Result<bool> {
    if !class.is_consistent(path)? {
        return Ok(false);
    }
    if u.level() == t {
        return Ok(true);
    }
    let points = tree.node(u)?.to_vec();
    let base = path.len();
    for y in Block::all(points.len()) {
        path.truncate(base);
        for (j, p) in points.iter().enumerate() {
            path.push(LabeledExample::new(p.clone(), y.bit(j)));
        }
        if !walk(class, tree, t, &u.child(y), path)? {
            path.truncate(base);
            return Ok(false);
        }
    }
    path.truncate(base);
    Ok(true)
}
