use std::path::PathBuf;
use std::sync::Arc;

use rand::RngCore;

use vcl_lab::classes::ThresholdClass;
use vcl_lab::domain::{DomainPoint, FiniteSupportDistribution, LabeledExample};
use vcl_lab::harness::cli::run;
use vcl_lab::harness::config::ExperimentConfig;
use vcl_lab::harness::curve::{CurveReport, CurveRow, HoldOut};
use vcl_lab::harness::export::{stamped_csv, stamped_json};
use vcl_lab::harness::{estimate_curve_with, fit_rate_summary, svg_plot, Series, Stamp};
use vcl_lab::learners::{ConstantLearner, Erm, Learner, Trained};
use vcl_lab::Error;

fn two_atoms() -> FiniteSupportDistribution {
    FiniteSupportDistribution::uniform(vec![
        LabeledExample::new(DomainPoint::rational(1, 8), false),
        LabeledExample::new(DomainPoint::rational(7, 8), true),
    ])
    .unwrap()
}

struct Perfect;

impl Learner for Perfect {
    fn name(&self) -> String {
        "perfect".into()
    }

    fn train(&self, _: &[LabeledExample], _: &mut dyn RngCore) -> vcl_lab::Result<Trained> {
        let half = DomainPoint::rational(1, 2);
        Ok(Trained::plain(Arc::new(move |x: &DomainPoint| Ok(x > &half))))
    }
}

#[test]
fn a_perfect_learner_has_zero_loss() {
    let r = estimate_curve_with(&Perfect, &two_atoms(), &[1, 4, 16], 20, 1).unwrap();
    assert!(r.rows.iter().all(|row| row.mean_loss == 0.0 && row.std_error == 0.0));
}

#[test]
fn constant_learner_on_a_hold_out_sample() {
    let pop = HoldOut::new(|rng: &mut dyn RngCore| {
        let right = rng.next_u32() % 2 == 1;
        Ok(LabeledExample::new(DomainPoint::rational(if right { 3 } else { 1 }, 4), right))
    });
    let r = estimate_curve_with(&ConstantLearner(false), &pop, &[8], 40, 3).unwrap();
    let row = &r.rows[0];
    // 40 trials of 10 000 hold-out draws each.
    let sd = (0.25f64 / 400_000.0).sqrt();
    assert!((row.mean_loss - 0.5).abs() <= 3.0 * sd.max(row.std_error), "{}", row.mean_loss);
}

#[test]
fn threshold_erm_stays_under_a_constant_over_n() {
    let ns: Vec<usize> = (2..=8).map(|k| 1 << k).collect();
    let erm = Erm::new(Arc::new(ThresholdClass));
    let r = estimate_curve_with(&erm, &two_atoms(), &ns, 400, 5).unwrap();
    for row in &r.rows {
        assert!(row.n as f64 * row.mean_loss <= 16.0, "n = {}: {}", row.n, row.mean_loss);
    }
    let s = fit_rate_summary(&r, 1, 4).unwrap();
    assert!(s.sup_n_times_loss <= 16.0);
}

fn report(rows: impl IntoIterator<Item = (usize, f64)>) -> CurveReport {
    CurveReport {
        learner: "synthetic".into(),
        seed: 0,
        rows: rows
            .into_iter()
            .map(|(n, mean_loss)| CurveRow { n, mean_loss, std_error: 0.0, trials: 1, seed: 0, fallbacks: 0 })
            .collect(),
        config: None,
    }
}

#[test]
fn rate_summary_of_an_exact_rate() {
    let ns = [8usize, 16, 32, 64, 128];
    let r = report(ns.iter().map(|&n| (n, 16.0 / n as f64)));
    let s = fit_rate_summary(&r, 2, 8).unwrap();
    assert!((s.sup_n_times_loss - 16.0).abs() < 1e-9);
    assert_eq!(s.floored, ns.len());
    assert_eq!(s.bands.len(), ns.len());
}

#[test]
fn rate_summary_recovers_an_exponential_tail() {
    let r = report((1..=10).map(|n| (n, (-(n as f64)).exp())));
    let s = fit_rate_summary(&r, 0, 1).unwrap();
    assert!((s.slope + 1.0).abs() < 0.1, "slope {}", s.slope);
    assert_eq!(s.floored, 0);
}

#[test]
fn rate_summary_needs_four_points() {
    let r = report([(8, 0.1), (16, 0.05), (32, 0.02), (64, 0.01)]);
    assert!(fit_rate_summary(&r, 1, 16).is_err());
    assert_eq!(fit_rate_summary(&r, 1, 8).unwrap().bands[2].n, 32);
}

fn config_field(text: &str) -> String {
    match ExperimentConfig::from_json(text) {
        Err(Error::Config { field, .. }) => field,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn configuration_errors_name_their_field() {
    assert_eq!(config_field(r#"{"class":{"kind":"thresholds"},"n_grid":[8,4]}"#), "n_grid");
    assert_eq!(config_field(r#"{"class":{"kind":"thresholds"},"n_grid":[]}"#), "n_grid");
    assert_eq!(config_field(r#"{"class":{"kind":"thresholds"},"trials":0}"#), "trials");
    assert_eq!(
        config_field(r#"{"class":{"kind":"tree_class","d":2},"lowerbound":{"kappas":[],"trials":3}}"#),
        "lowerbound.kappas"
    );
    assert_eq!(config_field(r#"{"class":{"kind":"thresholds"},"n_grid":{"base":1,"from":1,"to":3}}"#), "n_grid.base");
    assert_eq!(config_field(r#"{"class":{"kind":"nope"}}"#), "config");
    let ok = ExperimentConfig::from_json(r#"{"class":{"kind":"thresholds"},"n_grid":{"from":2,"to":4}}"#).unwrap();
    assert_eq!(ok.n_grid.unwrap().values().unwrap(), vec![4, 8, 16]);
}

#[test]
fn hashes_track_content() {
    let a = ExperimentConfig::from_json(r#"{"class":{"kind":"thresholds"}}"#).unwrap();
    let b = a.clone().with_seed(Some(9));
    assert_eq!(a.hash(), a.clone().hash());
    assert_ne!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
}

#[test]
fn exports_are_stamped() {
    let stamp = Stamp { config_hash: "abc".into(), seed: 11 };
    assert!(stamped_csv(&stamp, "n\n1\n").starts_with("# config_hash=abc\n# seed=11\nn\n"));
    let json: serde_json::Value = serde_json::from_str(&stamped_json(&stamp, &vec![1, 2]).unwrap()).unwrap();
    assert_eq!(json["seed"], 11);
    assert_eq!(json["config_hash"], "abc");
    let series = Series { label: "a<b".into(), points: vec![(1.0, 0.5, 0.1), (10.0, 0.05, 0.0)] };
    let svg = svg_plot(&stamp, "t", "n", "loss", &[series]);
    assert!(svg.contains("config_hash=abc seed=11"));
    assert!(svg.contains("a&lt;b"));
}

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("vcl-lab").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vcl-lab-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn cli_depth_of_the_full_cube() {
    let cfg = example("fullcube3.json");
    let (code, out, err) = cli(&["depth", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.trim(), "3");
}

#[test]
fn cli_usage_errors() {
    assert_eq!(cli(&["frobnicate"]).0, 2);
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("lowerbound"));
    assert_eq!(cli(&["depth"]).0, 2);

    let bad = scratch("bad_grid.json", r#"{"class":{"kind":"thresholds"},"n_grid":[16,8]}"#);
    let (code, _, err) = cli(&["curve", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("n_grid"), "{err}");
}

#[test]
fn cli_curve_is_reproducible() {
    let cfg = scratch(
        "curve.json",
        r#"{"class":{"kind":"thresholds"},
            "distribution":{"kind":"atoms","atoms":[{"x":"1/8","y":0,"mass":"1/2"},{"x":"7/8","y":1,"mass":"1/2"}]},
            "learner":{"learner":"erm"},"n_grid":[2,4,8],"trials":50,"seed":3}"#,
    );
    let a = cli(&["curve", "--config", cfg.to_str().unwrap()]);
    let b = cli(&["curve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(a.0, 0, "{}", a.2);
    assert_eq!(a.1, b.1);
    assert!(a.1.starts_with("# config_hash="));
    assert!(a.1.contains("# seed=3"));
    let c = cli(&["curve", "--config", cfg.to_str().unwrap(), "--seed", "4"]);
    assert!(c.1.contains("# seed=4"));
}

#[test]
fn cli_lowerbound_event_mass() {
    let cfg = example("treeclass_d2.json");
    let (code, out, err) = cli(&["lowerbound", "--config", cfg.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(code, 0, "{err}");
    let mut lines = out.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let mut rows = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let hat: f64 = f[col("p_g_hat")].parse().unwrap();
        let bound: f64 = f[col("p_g_bound")].parse().unwrap();
        assert!(hat >= bound, "κ = {}: {hat} < {bound}", f[col("kappa")]);
        rows += 1;
    }
    assert_eq!(rows, 3);
}
