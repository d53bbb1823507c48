//! d-VCL and strong VCL trees, shattering checks, finite-depth VCL search,
//! Ramsey pruning and indifferent trees with their branch functions.

mod branch;
mod depth;
mod indifferent;
mod ramsey;
mod shatter;
mod strong;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::domain::{Address, DomainPoint, HypothesisId};
use crate::error::{Error, Result};

pub use branch::Branch;
pub use depth::{brute_force_dvcl_depth, dvcl_depth, DepthBound};
pub use indifferent::{
    branch_function, indifferent_check, make_indifferent, IndifferentOutput, Violation,
};
pub use ramsey::{max_monochromatic_subtree, ramsey_monochromatic_subtree, Embedding, Position};
pub use shatter::{
    shatters_dvcl, shatters_dvcl_with, ShatterOptions, ShatterOutcome, ShatteringWitness,
    DEFAULT_BUDGET,
};
pub use strong::{shatters_strong_vcl, StrongVclTree};

/// Source of tree nodes, possibly unbounded and generated on demand.
pub trait TreeSource: Send + Sync {
    fn block_size(&self) -> usize;

    /// `None` for trees defined at every depth.
    fn max_depth(&self) -> Option<usize>;

    fn node(&self, u: &Address) -> Result<Vec<DomainPoint>>;

    /// A hypothesis consistent with the labeled path from the root to `u`.
    fn table(&self, _u: &Address) -> Option<HypothesisId> {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub address: Address,
    pub points: Vec<DomainPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<HypothesisId>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TableEntry {
    address: Address,
    hypothesis: HypothesisId,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TreeDocument {
    d: usize,
    depth: usize,
    nodes: Vec<TreeNode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    table: Vec<TableEntry>,
}

/// A materialized d-VCL tree of finite depth with an optional per-node table.
#[derive(Clone, Debug, PartialEq)]
pub struct DvclTree {
    d: usize,
    depth: usize,
    nodes: BTreeMap<Address, TreeNode>,
}

impl DvclTree {
    pub fn new(d: usize, depth: usize) -> Self {
        DvclTree {
            d,
            depth,
            nodes: BTreeMap::new(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn insert(
        &mut self,
        address: Address,
        points: Vec<DomainPoint>,
        witness: Option<HypothesisId>,
    ) -> Result<()> {
        if address.level() > self.depth {
            return Err(Error::Invalid(format!(
                "node {address} is deeper than the tree depth {}",
                self.depth
            )));
        }
        if address.blocks().iter().any(|b| b.width() != self.d) {
            return Err(Error::Invalid(format!("node {address} has blocks of the wrong width")));
        }
        if points.len() != self.d {
            return Err(Error::Invalid(format!(
                "node {address} holds {} points, expected {}",
                points.len(),
                self.d
            )));
        }
        self.nodes.insert(
            address.clone(),
            TreeNode {
                address,
                points,
                witness,
            },
        );
        Ok(())
    }

    pub fn set_table(&mut self, address: &Address, h: HypothesisId) -> Result<()> {
        match self.nodes.get_mut(address) {
            Some(n) => {
                n.witness = Some(h);
                Ok(())
            }
            None => Err(Error::Invalid(format!("no node at {address}"))),
        }
    }

    pub fn points(&self, address: &Address) -> Option<&[DomainPoint]> {
        self.nodes.get(address).map(|n| n.points.as_slice())
    }

    pub fn nodes(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.values()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Copies `source` down to `depth`, including its table.
    pub fn materialize(source: &dyn TreeSource, depth: usize) -> Result<Self> {
        if let Some(max) = source.max_depth() {
            if depth > max {
                return Err(Error::InsufficientDepth {
                    u: "λ".into(),
                    v: "λ".into(),
                    j: 0,
                    reason: format!("source has depth {max}, requested {depth}"),
                });
            }
        }
        let d = source.block_size();
        let mut tree = DvclTree::new(d, depth);
        for u in Address::up_to_level(d, depth) {
            let pts = source.node(&u)?;
            let w = source.table(&u);
            tree.insert(u, pts, w)?;
        }
        Ok(tree)
    }

    /// Every address of length at most `depth` carries a node.
    pub fn is_complete(&self) -> bool {
        let expected: usize = (0..=self.depth).map(|l| 1usize << (self.d * l)).sum();
        self.nodes.len() == expected
    }

    /// Every table entry down to `depth` is present.
    pub fn table_complete_to(&self, depth: usize) -> bool {
        Address::up_to_level(self.d, depth)
            .iter()
            .all(|u| self.nodes.get(u).is_some_and(|n| n.witness.is_some()))
    }

    pub fn validate_distinct(&self) -> Result<()> {
        let mut seen: HashMap<&DomainPoint, (&Address, usize)> = HashMap::new();
        for n in self.nodes.values() {
            for (j, p) in n.points.iter().enumerate() {
                if let Some((a, i)) = seen.insert(p, (&n.address, j)) {
                    return Err(Error::Invalid(format!(
                        "point {p} appears at {a}[{i}] and {}[{j}]",
                        n.address
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = TreeDocument {
            d: self.d,
            depth: self.depth,
            nodes: self.nodes.values().cloned().collect(),
            table: Vec::new(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TreeDocument = serde_json::from_str(text)?;
        let mut tree = DvclTree::new(doc.d, doc.depth);
        for n in doc.nodes {
            tree.insert(n.address, n.points, n.witness)?;
        }
        for e in doc.table {
            tree.set_table(&e.address, e.hypothesis)?;
        }
        tree.validate_distinct()?;
        Ok(tree)
    }
}

impl TreeSource for DvclTree {
    fn block_size(&self) -> usize {
        self.d
    }

    fn max_depth(&self) -> Option<usize> {
        Some(self.depth)
    }

    fn node(&self, u: &Address) -> Result<Vec<DomainPoint>> {
        self.nodes
            .get(u)
            .map(|n| n.points.clone())
            .ok_or_else(|| Error::Invalid(format!("no node at {u}")))
    }

    fn table(&self, u: &Address) -> Option<HypothesisId> {
        self.nodes.get(u).and_then(|n| n.witness.clone())
    }
}
