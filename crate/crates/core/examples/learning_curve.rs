//! Learning curves for thresholds: ERM against the optimal-rate learner on a
//! two-atom distribution, with the `8d/n` rate summary and an SVG plot.
//!
//! cargo run --release --example learning_curve -- [trials] [out_dir]

use std::path::PathBuf;
use std::sync::Arc;

use vcl_lab::classes::ThresholdClass;
use vcl_lab::domain::{DomainPoint, FiniteSupportDistribution, LabeledExample};
use vcl_lab::harness::export::write_file;
use vcl_lab::harness::{estimate_curve_with, fit_rate_summary, svg_plot, Series, Stamp};
use vcl_lab::learners::{Erm, Learner, OptimalRateLearner};

fn main() -> vcl_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: usize = args.next().map_or(2_000, |s| s.parse().expect("trials"));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "target/curves".into()));

    let dist = FiniteSupportDistribution::uniform(vec![
        LabeledExample::new(DomainPoint::rational(1, 8), false),
        LabeledExample::new(DomainPoint::rational(7, 8), true),
    ])?;
    let class = Arc::new(ThresholdClass);
    let learners: Vec<Box<dyn Learner>> = vec![
        Box::new(Erm::new(class.clone())),
        Box::new(OptimalRateLearner::for_class(class, 1)?),
    ];
    let grid: Vec<usize> = (3..=9).map(|k| 1 << k).collect();
    let seed = 2024;
    let mut series = Vec::new();
    for l in &learners {
        let report = estimate_curve_with(l.as_ref(), &dist, &grid, trials, seed)?;
        println!("# {}", report.learner);
        print!("{}", report.to_csv());
        let s = fit_rate_summary(&report, 1, 16)?;
        println!("# sup n·loss = {:.4} ± {:.4}, slope {:.4}\n", s.sup_n_times_loss, s.sup_half_width, s.slope);
        series.push(Series {
            label: report.learner.clone(),
            points: report.rows.iter().map(|r| (r.n as f64, r.mean_loss, r.std_error)).collect(),
        });
    }
    let stamp = Stamp { config_hash: "example".into(), seed };
    let path = write_file(&out, "thresholds.svg", &svg_plot(&stamp, "thresholds", "n", "E[loss]", &series))?;
    eprintln!("plot written to {}", path.display());
    Ok(())
}
