//! Making a shattered tree indifferent: a parity class whose off-branch labels
//! leak the future of the branch, repaired by monochromatic subtree pruning.
//!
//! cargo run --release --example indifference

use vcl_lab::harness::fixtures::{parity_fixture, PARITY_DEPTH};
use vcl_lab::trees::{indifferent_check, make_indifferent, max_monochromatic_subtree, shatters_dvcl};

fn main() -> vcl_lab::Result<()> {
    // Ramsey search on a binary tree colored by level parity.
    let by_level = |v: &[u32]| v.len() % 2 == 0;
    if let Some(e) = max_monochromatic_subtree(2, 4, &by_level, 0) {
        println!("level-parity coloring, depth 4: monochromatic subtree of height {} in color {}", e.height, e.color as u8);
    }

    let (class, tree) = parity_fixture()?;
    println!("parity fixture: {} nodes, shattered to depth {PARITY_DEPTH}: {}",
        tree.len(), shatters_dvcl(&class, &tree, PARITY_DEPTH)?.shattered);
    if let Some(v) = indifferent_check(&class, &tree, 2)? {
        println!("violation: h at {} and h at {} disagree on x at {} (coordinate {})", v.u, v.w, v.v, v.j);
    }
    for d_out in 1..=2 {
        let out = make_indifferent(&class, &tree, d_out, PARITY_DEPTH)?;
        println!(
            "D_out = {d_out}: {} replacements, indifferent {}, still shattered {}",
            out.replacements,
            indifferent_check(&class, &out.tree, d_out)?.is_none(),
            shatters_dvcl(&class, &out.tree, d_out)?.shattered
        );
        for (pos, src) in &out.sources {
            println!("    {pos} <- {src}");
        }
    }
    Ok(())
}
