//! The online game and the forbidden-pattern game: exact solving of finite
//! restrictions, playouts with transcripts, and the reduction turning an online
//! learner into pattern-avoidance functions.

mod forbidden;
mod play;
mod solver;
mod version_space;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{Block, DomainPoint};
use crate::error::Result;

pub use forbidden::{
    forbidden_pattern_learner, forbidden_pattern_loss, play_forbidden_game, ConstantStrategy,
    ForbiddenPatternLearner, PatternAvoidanceFunction, TupleDistribution,
};
pub use play::{
    play_online_game, Adversary, Round, ScriptedAdversary, Transcript, TreeAdversary,
    VersionTracker,
};
pub use solver::{solve_online_game, GameSolver, SolvedGame, SolvedStrategy, SOLVER_BUDGET};
pub use version_space::{FiniteGame, VersionSpace};

/// One round `(x_t, y_t)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Play {
    pub x: Vec<DomainPoint>,
    pub y: Block,
}

impl Play {
    pub fn new(x: Vec<DomainPoint>, y: Block) -> Self {
        Play { x, y }
    }
}

/// A block-valued function of a tuple, frozen at some history.
pub type CompiledPattern = Arc<dyn Fn(&[DomainPoint]) -> Result<Block> + Send + Sync>;

/// A learner strategy `f` in the online game. The state is the history itself,
/// so `next` is a deterministic function of `(history, x)`.
pub trait Strategy: Send + Sync {
    fn name(&self) -> String;

    fn block_size(&self) -> usize;

    fn next(&self, history: &[Play], x: &[DomainPoint]) -> Result<Block>;

    /// `x ↦ next(history, x)` with per-history work done once. `None` means no
    /// faster form exists and callers should go through `next`.
    fn compile(&self, _history: &[Play]) -> Result<Option<CompiledPattern>> {
        Ok(None)
    }
}
