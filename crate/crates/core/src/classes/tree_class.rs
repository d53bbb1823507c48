use std::sync::Arc;

use crate::domain::{Address, Block, DomainPoint, HypothesisClass, HypothesisId, Label, LabeledExample};
use crate::error::{Error, Result};
use crate::games::{CompiledPattern, Play, Strategy};
use crate::trees::TreeSource;

/// The synthetic class `{h_{u,b}}` over node coordinates of the identity
/// `d`-VCL tree. `h_{u,b}` labels the path to `u` by the blocks of `u`, labels
/// the node `u` itself by `b`, and everything else 0.
#[derive(Clone, Copy, Debug)]
pub struct TreeClass {
    pub d: usize,
}

impl TreeClass {
    pub fn new(d: usize) -> Self {
        assert!(d >= 1, "block size must be positive");
        TreeClass { d }
    }

    /// Every `h_{u,b}` with `u` at level at most `depth`. On points of levels
    /// below `depth` these realize all behaviors of the class.
    pub fn hypotheses_to_depth(&self, depth: usize) -> Vec<HypothesisId> {
        Address::up_to_level(self.d, depth)
            .into_iter()
            .flat_map(|u| {
                Block::all(self.d).map(move |b| HypothesisId::Node {
                    address: u.clone(),
                    block: b,
                })
            })
            .collect()
    }

    /// Coordinates of every node at levels `< depth`.
    pub fn points_to_depth(&self, depth: usize) -> Vec<DomainPoint> {
        if depth == 0 {
            return Vec::new();
        }
        Address::up_to_level(self.d, depth - 1)
            .into_iter()
            .flat_map(|u| (0..self.d).map(move |j| DomainPoint::node(u.clone(), j)))
            .collect()
    }
}

fn node_of(d: usize, x: &DomainPoint) -> Result<(&Address, usize)> {
    match x.as_node() {
        Some((a, j)) if j < d && a.blocks().iter().all(|b| b.width() == d) => Ok((a, j)),
        _ => Err(Error::DomainMismatch {
            point: x.to_string(),
            context: format!("TreeClass({d})"),
        }),
    }
}

fn eval_node(u: &Address, b: Block, v: &Address, j: usize) -> Label {
    if v.is_strict_prefix_of(u) {
        u.blocks()[v.level()].bit(j)
    } else if v == u {
        b.bit(j)
    } else {
        false
    }
}

/// Consistency oracle for `TreeClass(d)` on labeled node coordinates.
///
/// The 1-labeled nodes of a realizable sample lie on one chain; the canonical
/// witness sits at the deepest of them with the observed labels there (missing
/// coordinates 0), or is the all-zero `h_{λ,0}` when no label is 1.
pub fn tree_class_consistent(
    d: usize,
    items: &[(&Address, usize, Label)],
) -> Option<(Address, Block)> {
    let mut w: Option<&Address> = None;
    for &(v, _, l) in items {
        if l && w.map_or(true, |cur| v.level() > cur.level()) {
            w = Some(v);
        }
    }
    let Some(w) = w else {
        return Some((Address::root(), Block::zeros(d)));
    };
    let mut bits = vec![None; d];
    for &(v, j, l) in items {
        if v == w && bits[j].is_none() {
            bits[j] = Some(l);
        }
    }
    let b = Block::from_bits(&bits.iter().map(|x| x.unwrap_or(false)).collect::<Vec<_>>());
    for &(v, j, l) in items {
        if eval_node(w, b, v, j) != l {
            return None;
        }
    }
    Some((w.clone(), b))
}

impl HypothesisClass for TreeClass {
    fn name(&self) -> String {
        format!("TreeClass({})", self.d)
    }

    fn evaluate(&self, h: &HypothesisId, x: &DomainPoint) -> Result<Label> {
        let (v, j) = node_of(self.d, x)?;
        match h {
            HypothesisId::Node { address, block } if block.width() == self.d => {
                Ok(eval_node(address, *block, v, j))
            }
            other => Err(Error::Invalid(format!("{other} is not in {}", self.name()))),
        }
    }

    fn consistent_hypothesis(&self, sample: &[LabeledExample]) -> Result<Option<HypothesisId>> {
        let items = sample
            .iter()
            .map(|e| node_of(self.d, &e.point).map(|(a, j)| (a, j, e.label)))
            .collect::<Result<Vec<_>>>()?;
        Ok(tree_class_consistent(self.d, &items)
            .map(|(address, block)| HypothesisId::Node { address, block }))
    }

    fn tuple_size_hint(&self) -> Option<usize> {
        Some(self.d)
    }

    fn strategy(&self, d: usize) -> Option<Arc<dyn Strategy>> {
        (d == self.d).then(|| Arc::new(TreeClassStrategy { d }) as Arc<dyn Strategy>)
    }

    fn tree_generator(&self) -> Option<Arc<dyn TreeSource>> {
        Some(Arc::new(IdentityTree { d: self.d }))
    }
}

/// Closed-form online learner for `TreeClass(d)`: forbid the lexicographically
/// first inconsistent block, or the all-ones block when the tuple is shattered
/// (the all-zero block keeps the most surviving branches).
#[derive(Clone, Copy, Debug)]
pub struct TreeClassStrategy {
    pub d: usize,
}

impl TreeClassStrategy {
    fn base(&self, history: &[Play]) -> Result<Vec<(Address, usize, Label)>> {
        let mut out = Vec::new();
        for p in history {
            for (j, x) in p.x.iter().enumerate() {
                let (a, c) = node_of(self.d, x)?;
                out.push((a.clone(), c, p.y.bit(j)));
            }
        }
        Ok(out)
    }

    fn answer(d: usize, base: &[(Address, usize, Label)], x: &[DomainPoint]) -> Result<Block> {
        if x.len() != d {
            return Err(Error::Invalid(format!("expected a {d}-tuple, got {}", x.len())));
        }
        let coords = x
            .iter()
            .map(|p| node_of(d, p))
            .collect::<Result<Vec<_>>>()?;
        let mut items: Vec<(&Address, usize, Label)> =
            base.iter().map(|(a, j, l)| (a, *j, *l)).collect();
        let n = items.len();
        for y in Block::all(d) {
            items.truncate(n);
            items.extend(coords.iter().enumerate().map(|(j, &(a, c))| (a, c, y.bit(j))));
            if tree_class_consistent(d, &items).is_none() {
                return Ok(y);
            }
        }
        Ok(Block::ones(d))
    }
}

impl Strategy for TreeClassStrategy {
    fn name(&self) -> String {
        format!("treeclass-ones({})", self.d)
    }

    fn block_size(&self) -> usize {
        self.d
    }

    fn next(&self, history: &[Play], x: &[DomainPoint]) -> Result<Block> {
        Self::answer(self.d, &self.base(history)?, x)
    }

    fn compile(&self, history: &[Play]) -> Result<Option<CompiledPattern>> {
        let base = self.base(history)?;
        let d = self.d;
        Ok(Some(Arc::new(move |x: &[DomainPoint]| Self::answer(d, &base, x))))
    }
}

/// The identity tree `x_u = (x[u][0], …, x[u][d-1])`, tabled by `h_{u,0}`.
#[derive(Clone, Copy, Debug)]
pub struct IdentityTree {
    pub d: usize,
}

impl TreeSource for IdentityTree {
    fn block_size(&self) -> usize {
        self.d
    }

    fn max_depth(&self) -> Option<usize> {
        None
    }

    fn node(&self, u: &Address) -> Result<Vec<DomainPoint>> {
        Ok((0..self.d).map(|j| DomainPoint::node(u.clone(), j)).collect())
    }

    fn table(&self, u: &Address) -> Option<HypothesisId> {
        Some(HypothesisId::Node {
            address: u.clone(),
            block: Block::zeros(self.d),
        })
    }
}

/// Closed-form branch function of `TreeClass(d)`: the branch block following
/// an on-branch node, 0 off the branch.
pub fn treeclass_branch_eval(d: usize, y: &[Block], point: &DomainPoint) -> Result<Label> {
    let (v, j) = node_of(d, point)?;
    for (s, blk) in v.blocks().iter().enumerate() {
        if s >= y.len() {
            return Err(Error::InsufficientPrefix {
                needed: v.level() + 1,
                available: y.len(),
            });
        }
        if *blk != y[s] {
            return Ok(false);
        }
    }
    match y.get(v.level()) {
        Some(next) => Ok(next.bit(j)),
        None => Err(Error::InsufficientPrefix {
            needed: v.level() + 1,
            available: y.len(),
        }),
    }
}
