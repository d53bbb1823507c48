use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::classes::{treeclass_branch_eval, IdentityTree, TreeClass};
use crate::domain::{
    Address, DomainPoint, FiniteSupportDistribution, HypothesisClass, HypothesisId, Label,
    LabeledExample,
};
use crate::error::{Error, Result};
use crate::trees::{branch_function, Branch, TreeSource};

/// Deepest level whose shortlex indices still fit the 128-bit address index.
fn max_level(d: usize) -> usize {
    126 / d - 1
}

fn pow(d: usize, e: u32) -> BigInt {
    num::pow(BigInt::from(d), e as usize)
}

/// `P[K = s] = (d−1)·d^(−s)`.
pub fn node_mass(d: usize, s: u128) -> BigRational {
    assert!(s >= 1, "node indices start at 1");
    BigRational::new(BigInt::from(d - 1), pow(d, s as u32))
}

/// `P[K > k] = d^(−k)`.
pub fn tail_mass(d: usize, k: u128) -> BigRational {
    BigRational::new(BigInt::one(), pow(d, k as u32))
}

/// `⌊d^(κ+1) / (8(d−1))⌋`, the sample size where the bound is evaluated.
pub fn n_kappa(d: usize, kappa: u32) -> Result<u64> {
    if d < 2 {
        return Err(Error::Unsupported(format!(
            "node weights (d−1)·d^(−s) vanish for d = {d}"
        )));
    }
    if kappa < 1 {
        return Err(Error::Invalid("κ starts at 1".into()));
    }
    let num = (d as u128)
        .checked_pow(kappa + 1)
        .ok_or_else(|| Error::Invalid(format!("d^(κ+1) overflows for d = {d}, κ = {kappa}")))?;
    u64::try_from(num / (8 * (d as u128 - 1)))
        .map_err(|_| Error::Invalid(format!("n_κ overflows for d = {d}, κ = {kappa}")))
}

/// Whether `n_κ ≥ d^(κ+1)/(9(d−1))`, the lower estimate the constant chain uses.
pub fn n_kappa_guard(d: usize, kappa: u32) -> Result<bool> {
    let n = n_kappa(d, kappa)? as u128;
    Ok(9 * (d as u128 - 1) * n >= (d as u128).pow(kappa + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Labeler {
    TreeClass,
    Generic,
}

/// One draw of the sampling procedure.
#[derive(Clone, Debug, PartialEq)]
pub struct Draw {
    pub x: DomainPoint,
    pub y: Label,
    /// Shortlex index of the node holding `x`.
    pub k: u128,
    pub j: usize,
}

impl Draw {
    pub fn example(&self) -> LabeledExample {
        LabeledExample::new(self.x.clone(), self.y)
    }
}

/// `P_y`: node `K` with probability `(d−1)·d^(−K)`, coordinate `j` uniform,
/// labeled by the branch function `f_y`.
#[derive(Clone)]
pub struct HardDistribution {
    class: Arc<dyn HypothesisClass>,
    tree: Arc<dyn TreeSource>,
    branch: Branch,
    d: usize,
    labeler: Labeler,
}

impl HardDistribution {
    /// Over an indifferent tree shattered by `class`; labels come from the
    /// tree's table.
    pub fn new(
        class: Arc<dyn HypothesisClass>,
        tree: Arc<dyn TreeSource>,
        branch: Branch,
    ) -> Result<Self> {
        let d = tree.block_size();
        if d < 2 {
            return Err(Error::Unsupported(format!(
                "the geometric node law needs d ≥ 2, got {d}"
            )));
        }
        if branch.d() != d {
            return Err(Error::Invalid(format!(
                "branch blocks have width {}, tree blocks {d}",
                branch.d()
            )));
        }
        Ok(HardDistribution {
            class,
            tree,
            branch,
            d,
            labeler: Labeler::Generic,
        })
    }

    /// `TreeClass(d)` on its identity tree, labeled in closed form.
    pub fn tree_class(d: usize, branch: Branch) -> Result<Self> {
        let mut h = Self::new(
            Arc::new(TreeClass::new(d)),
            Arc::new(IdentityTree { d }),
            branch,
        )?;
        h.labeler = Labeler::TreeClass;
        Ok(h)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn branch(&self) -> &Branch {
        &self.branch
    }

    pub fn class(&self) -> &Arc<dyn HypothesisClass> {
        &self.class
    }

    pub fn tree(&self) -> &Arc<dyn TreeSource> {
        &self.tree
    }

    pub fn with_branch(&self, branch: Branch) -> Self {
        HardDistribution {
            branch,
            ..self.clone()
        }
    }

    /// `(d−1)·d^(−ind(u)−1)`.
    pub fn point_mass(&self, u: &Address) -> BigRational {
        node_mass(self.d, u.shortlex_index(self.d)) / BigInt::from(self.d)
    }

    pub fn point(&self, u: &Address, j: usize) -> Result<DomainPoint> {
        self.tree
            .node(u)?
            .into_iter()
            .nth(j)
            .ok_or_else(|| Error::Invalid(format!("coordinate {j} out of range at {u}")))
    }

    /// `f_y(x_u^j)`.
    pub fn label(&self, u: &Address, j: usize) -> Result<Label> {
        let prefix = self.branch.prefix(u.level() + 1);
        match self.labeler {
            Labeler::TreeClass => {
                treeclass_branch_eval(self.d, &prefix, &DomainPoint::node(u.clone(), j))
            }
            Labeler::Generic => branch_function(self.class.as_ref(), self.tree.as_ref(), &prefix, u, j),
        }
    }

    /// `f_y(x)` for a point of the identity tree.
    pub fn label_point(&self, x: &DomainPoint) -> Result<Label> {
        match x.as_node() {
            Some((u, j)) => self.label(u, j),
            None => Err(Error::Unsupported(format!(
                "cannot locate {x} in the tree without a search"
            ))),
        }
    }

    /// Inverse-CDF draw of `K`: one plus the run length of zeros among
    /// uniform draws on `[d]`, so `P[K > k] = d^(−k)` exactly.
    pub fn draw_index(d: usize, rng: &mut dyn RngCore) -> u128 {
        let mut k: u128 = 1;
        while rng.gen_range(0..d) == 0 {
            k += 1;
        }
        k
    }

    /// Steps 1 to 4, with `(K, j)` read from `rng` only.
    pub fn sample(&self, rng: &mut dyn RngCore) -> Result<Draw> {
        let k = Self::draw_index(self.d, rng);
        let j = rng.gen_range(0..self.d);
        let u = Address::from_shortlex_index(self.d, k);
        if u.level() > max_level(self.d) {
            return Err(Error::Unsupported(format!("node index {k} is too deep to address")));
        }
        Ok(Draw {
            x: self.point(&u, j)?,
            y: self.label(&u, j)?,
            k,
            j,
        })
    }

    pub fn sample_n(&self, n: usize, rng: &mut dyn RngCore) -> Result<Vec<Draw>> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    /// Restriction to nodes of index at most `k_max`, renormalized.
    pub fn truncated(&self, k_max: u128) -> Result<FiniteSupportDistribution> {
        let total = BigRational::one() - tail_mass(self.d, k_max);
        let mut atoms = Vec::new();
        for k in 1..=k_max {
            let u = Address::from_shortlex_index(self.d, k);
            let mass = node_mass(self.d, k) / BigInt::from(self.d) / &total;
            for j in 0..self.d {
                atoms.push((LabeledExample::new(self.point(&u, j)?, self.label(&u, j)?), mass.clone()));
            }
        }
        FiniteSupportDistribution::exact(atoms)
    }

    /// Smallest `k` with `P[K > k] ≤ ε`, and a hypothesis agreeing with every
    /// point of nodes `1..=k`.
    pub fn realizability_witness(&self, epsilon: &BigRational) -> Result<Witness> {
        if *epsilon <= BigRational::zero() {
            return Err(Error::Invalid("ε must be positive".into()));
        }
        let mut k: u128 = 0;
        while tail_mass(self.d, k) > *epsilon {
            k += 1;
        }
        let mut z = Vec::new();
        for s in 1..=k {
            let u = Address::from_shortlex_index(self.d, s);
            for j in 0..self.d {
                z.push(LabeledExample::new(self.point(&u, j)?, self.label(&u, j)?));
            }
        }
        let hypothesis = self.class.consistent_hypothesis(&z)?.ok_or_else(|| {
            Error::Inconsistent(format!(
                "no hypothesis of {} fits the first {k} nodes of the branch labeling",
                self.class.name()
            ))
        })?;
        Ok(Witness {
            k,
            hypothesis,
            loss_bound: tail_mass(self.d, k),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub k: u128,
    pub hypothesis: HypothesisId,
    /// `P[K > k]`, which bounds the witness's loss since it is exact on nodes `≤ k`.
    pub loss_bound: BigRational,
}

/// `Σ_{s ≤ k} P[K = s]` and the tail `P[K > k]`.
pub fn mass_audit(d: usize, k: u128) -> (BigRational, BigRational) {
    let mut sum = BigRational::zero();
    for s in 1..=k {
        sum += node_mass(d, s);
    }
    (sum, tail_mass(d, k))
}

/// How a branch distribution truncated at a depth spreads mass over nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelWeights {
    /// `(d−1)·d^(−ind(u))` renormalized; needs `d ≥ 2`.
    Geometric,
    /// Equal mass per level, uniform within a level; defined for every `d`.
    LevelUniform,
}

/// The branch labeling of the tree's points at levels `0..=max_level`.
pub fn truncated_branch_distribution(
    class: &dyn HypothesisClass,
    tree: &dyn TreeSource,
    branch: &Branch,
    max_level: usize,
    weights: LevelWeights,
) -> Result<FiniteSupportDistribution> {
    let d = tree.block_size();
    let prefix = branch.prefix(max_level + 1);
    let nodes = Address::up_to_level(d, max_level);
    let total = match weights {
        LevelWeights::Geometric => {
            if d < 2 {
                return Err(Error::Unsupported("geometric weights need d ≥ 2".into()));
            }
            BigRational::one() - tail_mass(d, nodes.len() as u128)
        }
        LevelWeights::LevelUniform => BigRational::one(),
    };
    let mut atoms = Vec::with_capacity(nodes.len() * d);
    for u in &nodes {
        let mass = match weights {
            LevelWeights::Geometric => node_mass(d, u.shortlex_index(d)) / &total,
            LevelWeights::LevelUniform => BigRational::new(
                BigInt::one(),
                BigInt::from(max_level + 1) << (d * u.level()),
            ),
        } / BigInt::from(d);
        let points = tree.node(u)?;
        for (j, p) in points.into_iter().enumerate() {
            let y = branch_function(class, tree, &prefix, u, j)?;
            atoms.push((LabeledExample::new(p, y), mass.clone()));
        }
    }
    FiniteSupportDistribution::exact(atoms)
}

/// Node indices and points of a test draw and its training sample.
#[derive(Clone, Debug)]
pub struct Trace<'a> {
    pub k: u128,
    pub x: &'a DomainPoint,
    pub train: &'a [Draw],
}

/// `K = κ ≥ max K_i`, fewer than `d/2` training points in node `κ`, and `X`
/// unseen.
pub fn event_g_kappa(trace: &Trace<'_>, kappa: u128, d: usize) -> bool {
    if trace.k != kappa {
        return false;
    }
    let mut same = 0usize;
    for t in trace.train {
        if t.k > kappa || t.x == *trace.x {
            return false;
        }
        if t.k == kappa {
            same += 1;
        }
    }
    2 * same < d
}
