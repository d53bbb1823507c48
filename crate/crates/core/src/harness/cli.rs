//! `vcl-lab <subcommand>`: exit code 0 on success, 1 on a failed run or
//! acceptance check, 2 on usage and configuration errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classes::{halfspace_fractal_tree, HalfspaceClass};
use crate::domain::DomainPoint;
use crate::error::{Error, Result};
use crate::games::{
    play_online_game, Adversary, GameSolver, Play, ScriptedAdversary, SolvedStrategy,
    VersionTracker,
};
use crate::harness::config::{ExperimentConfig, LearnerKind, LearnerSpec};
use crate::harness::curve::estimate_curve;
use crate::harness::export::{stamped_csv, stamped_json, svg_plot, write_file, Series, Stamp};
use crate::harness::verify::{verify, Scale, VerifyOptions};
use crate::lowerbound::{run_lower_bound_suite, HardDistribution, LowerBoundConfig, Subject};
use crate::trees::{dvcl_depth, shatters_dvcl, Branch};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "vcl-lab", version, about = "VCL trees, online games and learning-curve experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment configuration.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the configuration's.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Write output files here instead of printing data to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also emit an SVG plot per curve.
    #[arg(long, global = true)]
    pub svg: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite-domain d-VCL depth of a class.
    Depth,
    /// Solve the online game and print the transcript of one play.
    Game,
    /// Estimate a learning curve.
    Curve,
    /// Run the hard-distribution experiment on TreeClass.
    Lowerbound,
    /// Build and check fractal half-space trees.
    Halfspace,
    /// Run the acceptance suite.
    Verify {
        /// Small trial counts.
        #[arg(long)]
        quick: bool,
    },
}

/// Parses `args` (including the program name) and runs, writing to `out`
/// and `err`. Returns the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Config { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::config("--config", "this subcommand needs a configuration file"))?;
    Ok(ExperimentConfig::load(path)?.with_seed(cli.seed))
}

struct Sink<'a> {
    dir: Option<&'a Path>,
    stdout: &'a mut dyn Write,
}

impl Sink<'_> {
    fn emit(&mut self, name: &str, contents: &str) -> Result<()> {
        match self.dir {
            Some(dir) => {
                let path = write_file(dir, name, contents)?;
                writeln!(self.stdout, "wrote {}", path.display())?;
            }
            None => self.stdout.write_all(contents.as_bytes())?,
        }
        Ok(())
    }

    /// Plots always go to a file: the output directory or the working one.
    fn emit_file(&mut self, name: &str, contents: &str) -> Result<()> {
        let dir = self.dir.unwrap_or(Path::new("."));
        let path = write_file(dir, name, contents)?;
        writeln!(self.stdout, "wrote {}", path.display())?;
        Ok(())
    }
}

fn data<T: Serialize>(format: Format, stamp: &Stamp, csv: String, report: &T) -> Result<(String, &'static str)> {
    Ok(match format {
        Format::Csv => (stamped_csv(stamp, &csv), "csv"),
        Format::Json => (stamped_json(stamp, report)?, "json"),
    })
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let mut sink = Sink {
        dir: cli.out.as_deref(),
        stdout,
    };
    match &cli.command {
        Command::Verify { quick } => {
            let seed = match (&cli.config, cli.seed) {
                (_, Some(s)) => s,
                (Some(_), None) => load(cli)?.seed,
                (None, None) => 0,
            };
            let opts = VerifyOptions {
                seed,
                scale: if *quick { Scale::Quick } else { Scale::Full },
            };
            let report = verify(&opts)?;
            let text = match cli.format {
                Format::Csv => report.to_text(),
                Format::Json => {
                    let stamp = Stamp {
                        config_hash: "none".into(),
                        seed,
                    };
                    stamped_json(&stamp, &report)?
                }
            };
            sink.emit(if cli.format == Format::Json { "verify.json" } else { "verify.txt" }, &text)?;
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Depth => {
            let cfg = load(cli)?;
            let spec = cfg.depth.clone().unwrap_or(crate::harness::config::DepthSpec {
                d: 1,
                domain_depth: 2,
                cap: 8,
            });
            let class = cfg.class.build()?;
            let domain = cfg.class.domain(spec.domain_depth)?;
            let depth = dvcl_depth(class.as_ref(), &domain, spec.d, spec.cap)?;
            match cli.out {
                None => writeln!(sink.stdout, "{depth}")?,
                Some(_) => {
                    let stamp = Stamp {
                        config_hash: cfg.hash(),
                        seed: cfg.seed,
                    };
                    #[derive(Serialize)]
                    struct DepthReport {
                        class: String,
                        d: usize,
                        points: usize,
                        depth: String,
                    }
                    let rep = DepthReport {
                        class: class.name(),
                        d: spec.d,
                        points: domain.len(),
                        depth: depth.to_string(),
                    };
                    let csv = format!("class,d,points,depth\n{},{},{},{}\n", rep.class, rep.d, rep.points, rep.depth);
                    let (text, ext) = data(cli.format, &stamp, csv, &rep)?;
                    sink.emit(&format!("depth.{ext}"), &text)?;
                }
            }
            Ok(0)
        }
        Command::Game => {
            let cfg = load(cli)?;
            let spec = cfg
                .game
                .clone()
                .ok_or_else(|| Error::config("game", "section is required for `game`"))?;
            let class = cfg.class.build()?;
            let domain = cfg.class.domain(spec.domain_depth)?;
            let game = crate::games::FiniteGame::new(class.as_ref(), &domain, spec.d)?;
            let solver = Arc::new(GameSolver::new(game));
            let value = solver.value(solver.game().full());
            let strategy = SolvedStrategy::new(Arc::clone(&solver));
            let mut adversary: Box<dyn Adversary> = if spec.script.is_empty() {
                Box::new(OptimalAdversary {
                    solver: Arc::clone(&solver),
                })
            } else {
                let script = spec
                    .script
                    .iter()
                    .map(|t| {
                        t.iter()
                            .map(|&i| {
                                solver.game().domain().get(i).cloned().ok_or_else(|| {
                                    Error::config("game.script", format!("point index {i} out of range"))
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Box::new(ScriptedAdversary::new(script))
            };
            let mut tracker = VersionTracker::finite(solver.game());
            let rounds = (value + 1).max(1) as usize + spec.script.len();
            let transcript = play_online_game(&strategy, adversary.as_mut(), &mut tracker, rounds)?;
            writeln!(
                sink.stdout,
                "# config_hash={} seed={} value={value} rounds_needed={} terminated_at={:?}",
                cfg.hash(),
                cfg.seed,
                value + 1,
                transcript.terminated_at
            )?;
            sink.emit("game.jsonl", &transcript.to_jsonl()?)?;
            Ok(0)
        }
        Command::Curve => {
            let cfg = load(cli)?;
            let report = estimate_curve(&cfg)?;
            let stamp = Stamp {
                config_hash: cfg.hash(),
                seed: cfg.seed,
            };
            let (text, ext) = data(cli.format, &stamp, report.to_csv(), &report)?;
            sink.emit(&format!("curve.{ext}"), &text)?;
            if cli.svg {
                let series = Series {
                    label: report.learner.clone(),
                    points: report
                        .rows
                        .iter()
                        .map(|r| (r.n as f64, r.mean_loss, r.std_error))
                        .collect(),
                };
                sink.emit_file("curve.svg", &svg_plot(&stamp, "learning curve", "n", "E[loss]", &[series]))?;
            }
            Ok(0)
        }
        Command::Lowerbound => {
            let cfg = load(cli)?;
            let spec = cfg
                .lowerbound
                .clone()
                .ok_or_else(|| Error::config("lowerbound", "section is required for `lowerbound`"))?;
            let d = match cfg.class {
                crate::harness::config::ClassSpec::TreeClass { d } => d,
                _ => {
                    return Err(Error::config(
                        "class.kind",
                        "the lower-bound experiment runs on tree_class",
                    ))
                }
            };
            let mut subjects = Vec::new();
            for kind in &spec.learners {
                let learner = LearnerSpec {
                    d: Some(d),
                    ..cfg.learner.clone().unwrap_or_else(|| LearnerSpec::of(*kind))
                };
                let learner = LearnerSpec {
                    learner: *kind,
                    ..learner
                };
                subjects.push(match learner.build(&cfg.class)? {
                    Some(l) => Subject::Learner(l),
                    None if *kind == LearnerKind::Oracle => Subject::Oracle,
                    None => unreachable!("only the oracle has no learner"),
                });
            }
            let base = HardDistribution::tree_class(d, Branch::random(d, 0))?;
            let reports = run_lower_bound_suite(
                &base,
                &subjects,
                &LowerBoundConfig {
                    kappas: spec.kappas.clone(),
                    trials: spec.trials,
                    seed: cfg.seed,
                    mode: spec.mode,
                },
            )?;
            let stamp = Stamp {
                config_hash: cfg.hash(),
                seed: cfg.seed,
            };
            for rep in &reports {
                let csv = format!("# learner={}\n{}", rep.learner, rep.to_csv());
                let (text, ext) = data(cli.format, &stamp, csv, rep)?;
                sink.emit(&format!("lowerbound_{}.{ext}", rep.learner), &text)?;
                for c in rep.cells.iter().filter(|c| !c.guard_ok) {
                    writeln!(
                        sink.stdout,
                        "# warning: n_κ = {} at κ = {} is below d^(κ+1)/(9(d−1))",
                        c.n, c.kappa
                    )?;
                }
            }
            if cli.svg {
                let series: Vec<Series> = reports
                    .iter()
                    .map(|r| Series {
                        label: r.learner.clone(),
                        points: r
                            .cells
                            .iter()
                            .map(|c| (c.n as f64, c.loss_hat, c.loss_se))
                            .collect(),
                    })
                    .collect();
                sink.emit_file("lowerbound.svg", &svg_plot(&stamp, "loss at n_κ", "n_κ", "loss", &series))?;
            }
            Ok(0)
        }
        Command::Halfspace => {
            let cfg = load(cli)?;
            let spec = cfg.halfspace.clone().unwrap_or(crate::harness::config::HalfspaceSpec {
                dims: vec![2, 3, 4],
                depth: 3,
            });
            let mut csv = String::from("dim,depth,nodes,min_margin,shattered\n");
            let mut rows = Vec::new();
            let mut all = true;
            for &dim in &spec.dims {
                let tree = halfspace_fractal_tree(dim, spec.depth)?;
                let shattered = shatters_dvcl(&HalfspaceClass::new(dim), &tree, spec.depth)?.shattered;
                let margin = tree
                    .cells
                    .values()
                    .map(|c| c.margin)
                    .filter(|m| m.is_finite())
                    .fold(f64::INFINITY, f64::min);
                all &= shattered;
                csv.push_str(&format!(
                    "{dim},{},{},{margin:e},{shattered}\n",
                    spec.depth,
                    tree.tree.len()
                ));
                rows.push((dim, spec.depth, tree.tree.len(), margin, shattered));
            }
            let stamp = Stamp {
                config_hash: cfg.hash(),
                seed: cfg.seed,
            };
            let (text, ext) = data(cli.format, &stamp, csv, &rows)?;
            sink.emit(&format!("halfspace.{ext}"), &text)?;
            Ok(if all { 0 } else { 1 })
        }
    }
}

/// Plays a tuple shattered by the current version space when one exists.
struct OptimalAdversary {
    solver: Arc<GameSolver>,
}

impl Adversary for OptimalAdversary {
    fn tuple(&mut self, history: &[Play]) -> Result<Option<Vec<DomainPoint>>> {
        let game = self.solver.game();
        let v = game.version_space(history)?;
        if v == 0 {
            return Ok(None);
        }
        let idx = self
            .solver
            .best_tuple(v)
            .unwrap_or_else(|| vec![0; game.d()]);
        Ok(Some(idx.iter().map(|&i| game.domain()[i].clone()).collect()))
    }
}
