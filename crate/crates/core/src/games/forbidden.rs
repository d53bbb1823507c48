use std::sync::Arc;

use num::{BigRational, Zero};

use crate::domain::{ratio_to_f64, Block, DomainPoint, FiniteSupportDistribution, Loss};
use crate::error::{Error, Result};
use crate::games::{CompiledPattern, Play, Round, Strategy, Transcript, VersionTracker};
use crate::trees::TreeSource;

/// `x ↦ f(ξ ∘ x)` for a frozen accepted history `ξ`.
#[derive(Clone)]
pub struct PatternAvoidanceFunction {
    strategy: Arc<dyn Strategy>,
    history: Arc<Vec<Play>>,
    compiled: Option<CompiledPattern>,
}

impl std::fmt::Debug for PatternAvoidanceFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PatternAvoidanceFunction")
            .field("strategy", &self.strategy.name())
            .field("history_len", &self.history.len())
            .finish()
    }
}

impl PatternAvoidanceFunction {
    pub fn new(strategy: Arc<dyn Strategy>, history: Vec<Play>) -> Result<Self> {
        let compiled = strategy.compile(&history)?;
        Ok(PatternAvoidanceFunction {
            strategy,
            history: Arc::new(history),
            compiled,
        })
    }

    pub fn evaluate(&self, x: &[DomainPoint]) -> Result<Block> {
        match &self.compiled {
            Some(c) => c(x),
            None => self.strategy.next(&self.history, x),
        }
    }

    pub fn history(&self) -> &[Play] {
        &self.history
    }

    pub fn block_size(&self) -> usize {
        self.strategy.block_size()
    }
}

/// The forbidden-pattern learner built from an online strategy `f`: announce
/// `ŷ_t = f(ξ ∘ x_t)` and extend `(ξ, η)` only on a match `ŷ_t = y_t`.
#[derive(Clone)]
pub struct ForbiddenPatternLearner {
    f: Arc<dyn Strategy>,
    current: PatternAvoidanceFunction,
    pending: Option<(Vec<DomainPoint>, Block)>,
    matches: usize,
}

pub fn forbidden_pattern_learner(f: Arc<dyn Strategy>) -> Result<ForbiddenPatternLearner> {
    ForbiddenPatternLearner::new(f)
}

impl ForbiddenPatternLearner {
    pub fn new(f: Arc<dyn Strategy>) -> Result<Self> {
        let current = PatternAvoidanceFunction::new(Arc::clone(&f), Vec::new())?;
        Ok(ForbiddenPatternLearner {
            f,
            current,
            pending: None,
            matches: 0,
        })
    }

    pub fn propose(&mut self, x: &[DomainPoint]) -> Result<Block> {
        let y_hat = self.current.evaluate(x)?;
        self.pending = Some((x.to_vec(), y_hat));
        Ok(y_hat)
    }

    /// Reveals `y_t`; returns whether it matched the announced block.
    pub fn reveal(&mut self, y: Block) -> Result<bool> {
        let (x, y_hat) = self
            .pending
            .take()
            .ok_or_else(|| Error::Invalid("reveal called before propose".into()))?;
        if y_hat != y {
            return Ok(false);
        }
        self.matches += 1;
        let mut history = self.current.history().to_vec();
        history.push(Play::new(x, y));
        self.current = PatternAvoidanceFunction::new(Arc::clone(&self.f), history)?;
        Ok(true)
    }

    pub fn pattern(&self) -> &PatternAvoidanceFunction {
        &self.current
    }

    pub fn accepted(&self) -> &[Play] {
        self.current.history()
    }

    pub fn matches(&self) -> usize {
        self.matches
    }
}

/// Runs the learner over an adversary sequence, tracking the version space of
/// the full sequence.
pub fn play_forbidden_game(
    learner: &mut ForbiddenPatternLearner,
    sequence: &[Play],
    tracker: &mut VersionTracker<'_>,
) -> Result<Transcript> {
    let mut out = Transcript::default();
    for (i, play) in sequence.iter().enumerate() {
        let y_hat = learner.propose(&play.x)?;
        let matched = learner.reveal(play.y)?;
        tracker.push(play)?;
        if tracker.is_empty() && out.terminated_at.is_none() {
            out.terminated_at = Some(i + 1);
        }
        out.rounds.push(Round {
            t: i + 1,
            x: play.x.clone(),
            y_hat,
            y: play.y,
            matched,
            version_space_size: tracker.size(),
        });
    }
    Ok(out)
}

impl ForbiddenPatternLearner {
    /// The adversary walking `tree` and answering the smallest block other
    /// than the announced one, for `t` rounds.
    pub fn play_against_tree(&mut self, tree: &dyn TreeSource, t: usize) -> Result<Transcript> {
        let d = tree.block_size();
        let mut u = crate::domain::Address::root();
        let mut out = Transcript::default();
        for s in 1..=t {
            let x = tree.node(&u)?;
            let y_hat = self.propose(&x)?;
            let y = Block::all(d).find(|b| *b != y_hat).expect("at least two blocks");
            let matched = self.reveal(y)?;
            out.rounds.push(Round {
                t: s,
                x,
                y_hat,
                y,
                matched,
                version_space_size: None,
            });
            u = u.child(y);
        }
        Ok(out)
    }
}

/// A distribution over `(tuple, block)` pairs.
#[derive(Clone, Debug)]
pub struct TupleDistribution {
    atoms: Vec<(Vec<DomainPoint>, Block)>,
    masses: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl TupleDistribution {
    pub fn exact(atoms: Vec<(Vec<DomainPoint>, Block, BigRational)>) -> Result<Self> {
        let total = atoms.iter().fold(BigRational::zero(), |acc, a| acc + &a.2);
        if total != num::One::one() || atoms.iter().any(|a| a.2 < BigRational::zero()) {
            return Err(Error::Invalid(format!("tuple masses sum to {total}, not 1")));
        }
        let masses = atoms.iter().map(|a| ratio_to_f64(&a.2)).collect();
        let exact = Some(atoms.iter().map(|a| a.2.clone()).collect());
        Ok(TupleDistribution {
            atoms: atoms.into_iter().map(|(x, y, _)| (x, y)).collect(),
            masses,
            exact,
        })
    }

    pub fn float(atoms: Vec<(Vec<DomainPoint>, Block, f64)>) -> Result<Self> {
        let total: f64 = atoms.iter().map(|a| a.2).sum();
        if (total - 1.0).abs() > 1e-12 || atoms.iter().any(|a| a.2 < 0.0) {
            return Err(Error::Invalid(format!("tuple masses sum to {total}, not 1")));
        }
        Ok(TupleDistribution {
            masses: atoms.iter().map(|a| a.2).collect(),
            atoms: atoms.into_iter().map(|(x, y, _)| (x, y)).collect(),
            exact: None,
        })
    }

    /// The law of `d` consecutive independent draws from `dist`, as one tuple.
    pub fn blocked(dist: &FiniteSupportDistribution, d: usize) -> Result<Self> {
        let n = dist.len();
        let count = n.checked_pow(d as u32).filter(|&c| c <= 1 << 22).ok_or_else(|| {
            Error::BudgetExceeded {
                required: (n as u128).saturating_pow(d as u32),
                budget: 1 << 22,
            }
        })?;
        let mut atoms = Vec::with_capacity(count);
        let mut masses = Vec::with_capacity(count);
        let mut exact = dist.is_exact().then(Vec::new);
        for code in 0..count {
            let mut rest = code;
            let mut idx = Vec::with_capacity(d);
            for _ in 0..d {
                idx.push(rest % n);
                rest /= n;
            }
            idx.reverse();
            let x = idx.iter().map(|&i| dist.atoms()[i].point.clone()).collect();
            let bits: Vec<bool> = idx.iter().map(|&i| dist.atoms()[i].label).collect();
            atoms.push((x, Block::from_bits(&bits)));
            masses.push(idx.iter().map(|&i| dist.mass_f64(i)).product());
            if let Some(e) = exact.as_mut() {
                let m = idx.iter().fold(BigRational::from_integer(1.into()), |acc, &i| {
                    acc * dist.exact_mass(i).expect("exact distribution")
                });
                e.push(m);
            }
        }
        Ok(TupleDistribution {
            atoms,
            masses,
            exact,
        })
    }

    pub fn atoms(&self) -> &[(Vec<DomainPoint>, Block)] {
        &self.atoms
    }

    pub fn mass_f64(&self, i: usize) -> f64 {
        self.masses[i]
    }

    pub fn exact_mass(&self, i: usize) -> Option<&BigRational> {
        self.exact.as_ref().map(|e| &e[i])
    }
}

/// `P[g(X) = Y]`, exact when the masses are.
pub fn forbidden_pattern_loss(
    g: impl Fn(&[DomainPoint]) -> Result<Block>,
    dist: &TupleDistribution,
) -> Result<Loss> {
    let mut hit = Vec::with_capacity(dist.atoms.len());
    for (x, y) in &dist.atoms {
        hit.push(g(x)? == *y);
    }
    Ok(match &dist.exact {
        Some(e) => Loss::Exact(
            e.iter()
                .zip(&hit)
                .filter(|(_, &h)| h)
                .fold(BigRational::zero(), |acc, (m, _)| acc + m),
        ),
        None => Loss::Float(
            dist.masses
                .iter()
                .zip(&hit)
                .filter(|(_, &h)| h)
                .map(|(m, _)| m)
                .sum(),
        ),
    })
}

/// Always answers the same block.
#[derive(Clone, Copy, Debug)]
pub struct ConstantStrategy {
    pub block: Block,
}

impl Strategy for ConstantStrategy {
    fn name(&self) -> String {
        format!("constant({})", self.block)
    }

    fn block_size(&self) -> usize {
        self.block.width()
    }

    fn next(&self, _history: &[Play], _x: &[DomainPoint]) -> Result<Block> {
        Ok(self.block)
    }

    fn compile(&self, _history: &[Play]) -> Result<Option<CompiledPattern>> {
        let b = self.block;
        Ok(Some(Arc::new(move |_: &[DomainPoint]| Ok(b))))
    }
}
