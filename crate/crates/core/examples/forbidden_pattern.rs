//! The forbidden-pattern learner built from a winning online strategy: it
//! concedes at most the game value in matches, and a shattered tree forces
//! that many unmatched but consistent rounds.
//!
//! cargo run --release --example forbidden_pattern

use std::sync::Arc;

use vcl_lab::classes::{FiniteClass, TreeClass, IdentityTree};
use vcl_lab::domain::{Block, HypothesisClass};
use vcl_lab::games::{
    forbidden_pattern_loss, play_forbidden_game, solve_online_game, ForbiddenPatternLearner, Play,
    Strategy, TupleDistribution, VersionTracker,
};

fn main() -> vcl_lab::Result<()> {
    let class = FiniteClass::full_cube(3);
    let solved = solve_online_game(&class, class.points(), 1)?;
    let f: Arc<dyn Strategy> = Arc::new(solved.strategy());

    // An adversary that reveals the labels of the hypothesis 1,0,1.
    let target = [true, false, true];
    let seq: Vec<Play> = (0..6)
        .map(|i| Play::new(vec![class.points()[i % 3].clone()], Block::from_bits(&[target[i % 3]])))
        .collect();
    let mut learner = ForbiddenPatternLearner::new(Arc::clone(&f))?;
    let mut tracker = VersionTracker::finite(solved.solver.game());
    let t = play_forbidden_game(&mut learner, &seq, &mut tracker)?;
    println!("matches {} (game value {})", t.matches(), solved.value);
    print!("{}", t.to_jsonl()?);

    // Its pattern function after the run, scored on the uniform tuple law.
    let atoms = (0..3)
        .map(|i| (vec![class.points()[i].clone()], Block::from_bits(&[target[i]]), 1.0 / 3.0))
        .collect();
    let dist = TupleDistribution::float(atoms)?;
    let g = learner.pattern().clone();
    println!("forbidden-pattern loss {}", forbidden_pattern_loss(|x| g.evaluate(x), &dist)?.to_f64().abs());

    // TreeClass(2) along its identity tree.
    let tc = TreeClass::new(2);
    let mut learner = ForbiddenPatternLearner::new(tc.strategy(2).expect("closed form"))?;
    let t = learner.play_against_tree(&IdentityTree { d: 2 }, 4)?;
    println!("\nTreeClass(2) vs identity tree: {} rounds, {} matches", t.rounds.len(), t.matches());
    Ok(())
}
