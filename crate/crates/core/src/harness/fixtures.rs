//! Small hand-built inputs shared by the verifier, tests and examples.

use crate::classes::FiniteClass;
use crate::domain::{Address, Block, DomainPoint, HypothesisId};
use crate::error::Result;
use crate::trees::DvclTree;

/// Depth of the parity fixture's branches.
pub const PARITY_DEPTH: usize = 4;

/// A shattered but non-indifferent Littlestone tree of depth 4.
///
/// The tree has one point per node at levels `0..=4`; the class has one
/// hypothesis `h_y` per branch `y ∈ {0,1}⁴`. `h_y` labels an on-branch node by
/// the next bit of `y` and every other point by the parity of `y`, so labels of
/// earlier off-branch nodes depend on how the branch continues later. The table
/// at `u` is `h_y` for `y` = `u` padded with zeros.
pub fn parity_fixture() -> Result<(FiniteClass, DvclTree)> {
    let nodes = Address::up_to_level(1, PARITY_DEPTH);
    let points: Vec<DomainPoint> = nodes.iter().map(|u| DomainPoint::node(u.clone(), 0)).collect();
    let branches = Address::at_level(1, PARITY_DEPTH);
    let rows: Vec<Vec<bool>> = branches
        .iter()
        .map(|y| {
            let parity = y.blocks().iter().filter(|b| b.bit(0)).count() % 2 == 1;
            nodes
                .iter()
                .map(|v| {
                    if v.is_strict_prefix_of(y) {
                        y.blocks()[v.level()].bit(0)
                    } else {
                        parity
                    }
                })
                .collect()
        })
        .collect();
    let class = FiniteClass::new(points.clone(), rows)?.with_name("parity_fixture");
    let mut tree = DvclTree::new(1, PARITY_DEPTH);
    for (u, p) in nodes.iter().zip(points) {
        let mut y = u.blocks().to_vec();
        y.resize(PARITY_DEPTH, Block::zeros(1));
        let id = branches
            .iter()
            .position(|b| b.blocks() == y.as_slice())
            .expect("padded branch exists");
        tree.insert(u.clone(), vec![p], Some(HypothesisId::Index(id)))?;
    }
    Ok((class, tree))
}
