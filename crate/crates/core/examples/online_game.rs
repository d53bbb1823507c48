//! Solves the online game for the full cube on three points and plays the
//! solved learner against a scripted adversary and a shattered-tree adversary.
//!
//! cargo run --release --example online_game

use std::sync::Arc;

use vcl_lab::classes::FiniteClass;
use vcl_lab::games::{play_online_game, solve_online_game, ScriptedAdversary, TreeAdversary, VersionTracker};

fn main() -> vcl_lab::Result<()> {
    let class = FiniteClass::full_cube(3);
    let solved = solve_online_game(&class, class.points(), 1)?;
    println!("game value {} ; the learner needs {} rounds", solved.value, solved.rounds());

    let strategy = solved.strategy();
    let p = class.points();
    let script = vec![vec![p[0].clone()], vec![p[0].clone()], vec![p[1].clone()], vec![p[2].clone()], vec![p[2].clone()]];
    let mut tracker = VersionTracker::finite(solved.solver.game());
    let t = play_online_game(&strategy, &mut ScriptedAdversary::new(script), &mut tracker, 10)?;
    println!("\nscripted adversary, terminated at {:?}", t.terminated_at);
    print!("{}", t.to_jsonl()?);

    let tree = solved.solver.shattered_tree(solved.value as usize)?.expect("the value is attained");
    let mut adversary = TreeAdversary::new(Arc::new(tree), solved.value as usize);
    let mut tracker = VersionTracker::finite(solved.solver.game());
    let t = play_online_game(&strategy, &mut adversary, &mut tracker, 10)?;
    println!("\nshattered-tree adversary: {} rounds, version space sizes {:?}",
        t.rounds.len(),
        t.rounds.iter().map(|r| r.version_space_size).collect::<Vec<_>>());
    Ok(())
}
