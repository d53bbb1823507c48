use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{Address, Block, DomainPoint, HypothesisClass, LabeledExample};
use crate::error::{Error, Result};
use crate::games::{FiniteGame, Play, Strategy, VersionSpace};
use crate::trees::TreeSource;

/// One transcript line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub t: usize,
    pub x: Vec<DomainPoint>,
    pub y_hat: Block,
    pub y: Block,
    pub matched: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version_space_size: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub rounds: Vec<Round>,
    /// First round after which the version space is empty.
    pub terminated_at: Option<usize>,
}

impl Transcript {
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.rounds {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn matches(&self) -> usize {
        self.rounds.iter().filter(|r| r.matched).count()
    }
}

/// Tracks the version space of a growing play sequence, exactly for finite
/// games and through the consistency oracle otherwise.
pub enum VersionTracker<'a> {
    Finite {
        game: &'a FiniteGame,
        v: VersionSpace,
    },
    Oracle {
        class: &'a dyn HypothesisClass,
        sample: Vec<LabeledExample>,
        nonempty: bool,
    },
}

impl<'a> VersionTracker<'a> {
    pub fn finite(game: &'a FiniteGame) -> Self {
        VersionTracker::Finite {
            game,
            v: game.full(),
        }
    }

    pub fn oracle(class: &'a dyn HypothesisClass) -> Result<Self> {
        let nonempty = class.is_consistent(&[])?;
        Ok(VersionTracker::Oracle {
            class,
            sample: Vec::new(),
            nonempty,
        })
    }

    pub fn push(&mut self, play: &Play) -> Result<()> {
        match self {
            VersionTracker::Finite { game, v } => *v = game.restrict_points(*v, &play.x, play.y)?,
            VersionTracker::Oracle {
                class,
                sample,
                nonempty,
            } => {
                sample.extend(
                    play.x
                        .iter()
                        .enumerate()
                        .map(|(j, p)| LabeledExample::new(p.clone(), play.y.bit(j))),
                );
                if *nonempty {
                    *nonempty = class.is_consistent(sample)?;
                }
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        match self {
            VersionTracker::Finite { v, .. } => *v == 0,
            VersionTracker::Oracle { nonempty, .. } => !nonempty,
        }
    }

    pub fn size(&self) -> Option<u64> {
        match self {
            VersionTracker::Finite { v, .. } => Some(v.count_ones() as u64),
            VersionTracker::Oracle { .. } => None,
        }
    }
}

/// The adversary in the online game: the next tuple given the history, or
/// `None` to stop.
pub trait Adversary {
    fn tuple(&mut self, history: &[Play]) -> Result<Option<Vec<DomainPoint>>>;
}

/// Plays a fixed list of tuples in order.
#[derive(Clone, Debug)]
pub struct ScriptedAdversary {
    script: Vec<Vec<DomainPoint>>,
}

impl ScriptedAdversary {
    pub fn new(script: Vec<Vec<DomainPoint>>) -> Self {
        ScriptedAdversary { script }
    }
}

impl Adversary for ScriptedAdversary {
    fn tuple(&mut self, history: &[Play]) -> Result<Option<Vec<DomainPoint>>> {
        Ok(self.script.get(history.len()).cloned())
    }
}

/// Walks a tree along the learner's answers: `x_t = x_{y_{≤t−1}}`.
#[derive(Clone)]
pub struct TreeAdversary {
    tree: Arc<dyn TreeSource>,
    depth: usize,
}

impl TreeAdversary {
    pub fn new(tree: Arc<dyn TreeSource>, depth: usize) -> Self {
        TreeAdversary { tree, depth }
    }

    pub fn address(history: &[Play]) -> Address {
        Address::from_blocks(history.iter().map(|p| p.y).collect())
    }
}

impl Adversary for TreeAdversary {
    fn tuple(&mut self, history: &[Play]) -> Result<Option<Vec<DomainPoint>>> {
        if history.len() >= self.depth {
            return Ok(None);
        }
        self.tree.node(&Self::address(history)).map(Some)
    }
}

/// Alternates adversary tuples and learner blocks until the version space is
/// empty, the adversary stops, or `max_rounds` pass.
pub fn play_online_game(
    learner: &dyn Strategy,
    adversary: &mut dyn Adversary,
    tracker: &mut VersionTracker<'_>,
    max_rounds: usize,
) -> Result<Transcript> {
    if max_rounds == 0 {
        return Err(Error::Invalid("max_rounds must be at least 1".into()));
    }
    let mut history: Vec<Play> = Vec::new();
    let mut out = Transcript::default();
    for t in 1..=max_rounds {
        let Some(x) = adversary.tuple(&history)? else {
            break;
        };
        let y = learner.next(&history, &x)?;
        let play = Play::new(x, y);
        tracker.push(&play)?;
        out.rounds.push(Round {
            t,
            x: play.x.clone(),
            y_hat: y,
            y,
            matched: true,
            version_space_size: tracker.size(),
        });
        history.push(play);
        if tracker.is_empty() {
            out.terminated_at = Some(t);
            break;
        }
    }
    Ok(out)
}
