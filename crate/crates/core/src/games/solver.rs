use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::domain::{Address, Block, DomainPoint, HypothesisClass};
use crate::error::{Error, Result};
use crate::games::{CompiledPattern, FiniteGame, Play, Strategy, VersionSpace};
use crate::trees::DvclTree;

/// Behaviors a version space may hold before the solver refuses.
pub const SOLVER_BUDGET: usize = 128;

/// Exact values of the online game on a finite restriction.
///
/// `value(V)` is the depth of the deepest tree shattered by `V` (−1 for the
/// empty space), so `value(V) + 1` is the number of rounds the minimizing
/// learner needs to empty `V` against any adversary.
#[derive(Debug)]
pub struct GameSolver {
    game: FiniteGame,
    /// Sets of `d` distinct point indices; repeats never split a space.
    combos: Vec<Vec<usize>>,
    memo: Mutex<HashMap<VersionSpace, i32>>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Largest `t` with `(2^d)^t ≤ size`.
fn split_bound(size: u32, d: usize) -> i32 {
    let mut t = 0;
    let mut cap: u64 = 1 << d;
    while cap <= size as u64 {
        t += 1;
        cap <<= d;
    }
    t
}

impl GameSolver {
    pub fn new(game: FiniteGame) -> Self {
        let combos = combinations(game.domain().len(), game.d());
        GameSolver {
            game,
            combos,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn game(&self) -> &FiniteGame {
        &self.game
    }

    pub fn value(&self, v: VersionSpace) -> i32 {
        let mut memo = self.memo.lock().expect("solver memo poisoned");
        self.value_in(&mut memo, v)
    }

    /// Rounds the minimizing learner needs from `v`.
    pub fn rounds(&self, v: VersionSpace) -> usize {
        (self.value(v) + 1) as usize
    }

    fn value_in(&self, memo: &mut HashMap<VersionSpace, i32>, v: VersionSpace) -> i32 {
        if v == 0 {
            return -1;
        }
        if let Some(&r) = memo.get(&v) {
            return r;
        }
        let d = self.game.d();
        let ub = split_bound(v.count_ones(), d);
        let mut best = 0;
        if ub > 0 {
            let mut children = vec![0u128; 1 << d];
            'tuples: for x in &self.combos {
                for (slot, y) in children.iter_mut().zip(Block::all(d)) {
                    *slot = self.game.restrict(v, x, y);
                    if *slot == 0 {
                        continue 'tuples;
                    }
                }
                let mut m = i32::MAX;
                for &c in &children {
                    m = m.min(self.value_in(memo, c));
                    if m < best {
                        break;
                    }
                }
                best = best.max(m + 1);
                if best >= ub {
                    break;
                }
            }
        }
        memo.insert(v, best);
        best
    }

    /// The first tuple attaining `value(v)`, when `v` shatters any tuple.
    pub fn best_tuple(&self, v: VersionSpace) -> Option<Vec<usize>> {
        let target = self.value(v);
        if target < 1 {
            return None;
        }
        let d = self.game.d();
        let mut memo = self.memo.lock().expect("solver memo poisoned");
        self.combos
            .iter()
            .find(|x| {
                Block::all(d).all(|y| self.value_in(&mut memo, self.game.restrict(v, x, y)) >= target - 1)
            })
            .cloned()
    }

    /// The minimizing answer: smallest block among those with least value.
    pub fn answer(&self, v: VersionSpace, x: &[usize]) -> Block {
        let d = self.game.d();
        let mut memo = self.memo.lock().expect("solver memo poisoned");
        let mut best = (i32::MAX, Block::zeros(d));
        for y in Block::all(d) {
            let val = self.value_in(&mut memo, self.game.restrict(v, x, y));
            if val < best.0 {
                best = (val, y);
            }
        }
        best.1
    }

    /// A depth-`depth` tree shattered by the whole class, built from the
    /// maximizing tuples and tabled by surviving hypotheses; `None` when the
    /// class shatters no tree that deep.
    pub fn shattered_tree(&self, depth: usize) -> Result<Option<DvclTree>> {
        let d = self.game.d();
        let full = self.game.full();
        if self.value(full) < depth as i32 {
            return Ok(None);
        }
        let Some(filler) = self.combos.first().cloned() else {
            return Err(Error::Invalid(format!(
                "domain of {} points has no {d}-tuple of distinct points",
                self.game.domain().len()
            )));
        };
        let mut tree = DvclTree::new(d, depth);
        let mut frontier = vec![(Address::root(), full)];
        while let Some((u, v)) = frontier.pop() {
            let x = if u.level() < depth {
                self.best_tuple(v).expect("value bounds the remaining depth")
            } else {
                self.best_tuple(v).unwrap_or_else(|| filler.clone())
            };
            let points = x.iter().map(|&i| self.game.domain()[i].clone()).collect();
            tree.insert(u.clone(), points, self.game.representative(v).cloned())?;
            if u.level() < depth {
                for y in Block::all(d) {
                    frontier.push((u.child(y), self.game.restrict(v, &x, y)));
                }
            }
        }
        Ok(Some(tree))
    }

    /// Every version space valued so far, sorted.
    pub fn table(&self) -> Vec<(VersionSpace, i32)> {
        let memo = self.memo.lock().expect("solver memo poisoned");
        let mut out: Vec<_> = memo.iter().map(|(&k, &v)| (k, v)).collect();
        out.sort_unstable();
        out
    }
}

/// The minimizing learner over a solved game. Its answer depends on the
/// history only through the version space.
#[derive(Clone, Debug)]
pub struct SolvedStrategy {
    solver: Arc<GameSolver>,
}

impl SolvedStrategy {
    pub fn new(solver: Arc<GameSolver>) -> Self {
        SolvedStrategy { solver }
    }

    pub fn solver(&self) -> &GameSolver {
        &self.solver
    }
}

impl Strategy for SolvedStrategy {
    fn name(&self) -> String {
        "minimizing".into()
    }

    fn block_size(&self) -> usize {
        self.solver.game().d()
    }

    fn next(&self, history: &[Play], x: &[DomainPoint]) -> Result<Block> {
        let g = self.solver.game();
        let v = g.version_space(history)?;
        Ok(self.solver.answer(v, &g.indices(x)?))
    }

    fn compile(&self, history: &[Play]) -> Result<Option<CompiledPattern>> {
        let v = self.solver.game().version_space(history)?;
        let solver = Arc::clone(&self.solver);
        Ok(Some(Arc::new(move |x: &[DomainPoint]| {
            let idx = solver.game().indices(x)?;
            Ok(solver.answer(v, &idx))
        })))
    }
}

#[derive(Clone, Debug)]
pub struct SolvedGame {
    pub solver: Arc<GameSolver>,
    /// `value` of the full class.
    pub value: i32,
}

impl SolvedGame {
    pub fn strategy(&self) -> SolvedStrategy {
        SolvedStrategy::new(Arc::clone(&self.solver))
    }

    /// Rounds the learner needs from the start.
    pub fn rounds(&self) -> usize {
        (self.value + 1) as usize
    }
}

/// Solves the online game of an enumerable class restricted to `domain`.
pub fn solve_online_game(
    class: &dyn HypothesisClass,
    domain: &[DomainPoint],
    d: usize,
) -> Result<SolvedGame> {
    let solver = Arc::new(GameSolver::new(FiniteGame::new(class, domain, d)?));
    let value = solver.value(solver.game().full());
    Ok(SolvedGame { solver, value })
}
