//! Fractal half-space trees: `(dim−1)`-VCL trees shattered by homogeneous
//! half-spaces, with the margins their stored witnesses achieve.
//!
//! cargo run --release --example halfspace_fractal -- [depth]

use vcl_lab::classes::{halfspace_fractal_tree, HalfspaceClass};
use vcl_lab::trees::shatters_dvcl;

fn main() -> vcl_lab::Result<()> {
    let depth: usize = std::env::args().nth(1).map_or(3, |s| s.parse().expect("depth"));
    println!("dim  d  nodes  min margin   radius at leaves  shattered");
    for dim in 2..=4 {
        let tree = halfspace_fractal_tree(dim, depth)?;
        let margin = tree.cells.values().map(|c| c.margin).filter(|m| m.is_finite()).fold(f64::INFINITY, f64::min);
        let radius = tree.cells.values().map(|c| c.radius).fold(f64::INFINITY, f64::min);
        let ok = shatters_dvcl(&HalfspaceClass::new(dim), &tree, depth)?.shattered;
        println!("{dim:>3} {:>2} {:>6}  {margin:.3e}   {radius:.3e}         {ok}", dim - 1, tree.tree.len());
    }
    match halfspace_fractal_tree(2, 60) {
        Ok(_) => println!("depth 60 still fits in f64"),
        Err(e) => println!("depth 60: {e}"),
    }
    Ok(())
}
