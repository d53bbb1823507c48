use crate::domain::{Address, Block};
use crate::seeding::mix;

/// An infinite branch `y = (y_1, y_2, …)`: an optional fixed prefix followed by
/// a seeded pseudorandom function of the level, so no storage grows with depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    d: usize,
    seed: u64,
    fixed: Vec<Block>,
}

impl Branch {
    pub fn random(d: usize, seed: u64) -> Self {
        Branch {
            d,
            seed,
            fixed: Vec::new(),
        }
    }

    /// A branch whose first blocks are forced to follow `address`.
    pub fn through(address: &Address, d: usize, seed: u64) -> Self {
        Branch {
            d,
            seed,
            fixed: address.blocks().to_vec(),
        }
    }

    pub fn with_prefix(d: usize, seed: u64, prefix: Vec<Block>) -> Self {
        Branch {
            d,
            seed,
            fixed: prefix,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The block `y_{level+1}` leaving the on-branch node at `level`.
    pub fn block(&self, level: usize) -> Block {
        if let Some(b) = self.fixed.get(level) {
            return *b;
        }
        let mask = (1u64 << self.d) - 1;
        Block::new((mix(&[self.seed, level as u64]) & mask) as u32, self.d)
    }

    pub fn prefix(&self, len: usize) -> Vec<Block> {
        (0..len).map(|s| self.block(s)).collect()
    }

    /// The on-branch node at `level`.
    pub fn node(&self, level: usize) -> Address {
        Address::from_blocks(self.prefix(level))
    }

    pub fn contains(&self, u: &Address) -> bool {
        u.blocks()
            .iter()
            .enumerate()
            .all(|(s, b)| *b == self.block(s))
    }
}
