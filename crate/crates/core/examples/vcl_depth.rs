//! Finite-domain d-VCL depth of a few small classes, next to their VC dimension.
//!
//! cargo run --release --example vcl_depth

use vcl_lab::classes::FiniteClass;
use vcl_lab::domain::{vc_dimension, DomainPoint};
use vcl_lab::trees::{brute_force_dvcl_depth, dvcl_depth};

fn main() -> vcl_lab::Result<()> {
    let cube = FiniteClass::full_cube(3);
    // Thresholds restricted to k/8: row θ labels x by [x > θ].
    let grid: Vec<DomainPoint> = (1..8).map(|i| DomainPoint::rational(i, 8)).collect();
    let thresholds = FiniteClass::new(grid.clone(), (0..8).map(|t| (1..8).map(|i| i > t).collect()).collect())?;
    let singleton = FiniteClass::singleton(FiniteClass::default_points(3), vec![true, false, true])?;

    println!("{:<22} {:>3} {:>6} {:>6} {:>6}", "class", "VC", "d=1", "d=2", "d=3");
    for (name, class, domain) in [
        ("full cube, 3 points", &cube as &dyn vcl_lab::domain::HypothesisClass, cube.points().to_vec()),
        ("thresholds on k/8", &thresholds, grid),
        ("singleton", &singleton, singleton.points().to_vec()),
    ] {
        let vc = vc_dimension(class, &domain).map_or("-".to_string(), |v| v.to_string());
        let depths: Vec<String> = (1..=3)
            .map(|d| dvcl_depth(class, &domain, d, 8).map(|x| x.to_string()))
            .collect::<vcl_lab::Result<_>>()?;
        println!("{name:<22} {vc:>3} {:>6} {:>6} {:>6}", depths[0], depths[1], depths[2]);
    }

    // The memoized recursion agrees with enumerating trees outright.
    assert_eq!(dvcl_depth(&cube, cube.points(), 2, 8)?.value(), brute_force_dvcl_depth(&cube, cube.points(), 2, 8)?);
    Ok(())
}
