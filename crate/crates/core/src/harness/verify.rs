//! The acceptance suite. Each criterion returns its raw measurements with
//! the interval each must fall in, so callers can re-check them.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use num::{BigInt, BigRational, ToPrimitive};
use rand::{Rng, RngCore};
use serde::Serialize;

use crate::classes::{
    halfspace_fractal_tree, BisectionTree, FiniteClass, HalfspaceClass, ThresholdClass, TreeClass,
};
use crate::domain::{
    ratio_to_f64, vc_of_rows, Address, Block, DomainPoint, HypothesisClass, HypothesisId,
    LabeledExample,
};
use crate::error::{Error, Result};
use crate::games::{
    FiniteGame, ForbiddenPatternLearner, GameSolver, Play, SolvedStrategy, Strategy,
    TupleDistribution, VersionSpace,
};
use crate::harness::curve::estimate_curve_with;
use crate::harness::fixtures::parity_fixture;
use crate::learners::{
    fp_positive_curve, good_sizes, sample_size_estimator, worst_permutation_loo_error, Erm,
    Memorizer, OneInclusionGraph, OptimalRateLearner, PatternConstraints,
};
use crate::lowerbound::{
    run_lower_bound_suite, truncated_branch_distribution, BranchMode, HardDistribution,
    LevelWeights, LowerBoundConfig, LowerBoundReport, Subject,
};
use crate::seeding::{mix, rng};
use crate::trees::{
    brute_force_dvcl_depth, dvcl_depth, indifferent_check, make_indifferent,
    ramsey_monochromatic_subtree, shatters_dvcl, Branch, Embedding, TreeSource,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// Trial counts as stated in the criteria.
    Full,
    /// Small counts for smoke runs; verdicts on Monte Carlo criteria are
    /// indicative only.
    Quick,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub scale: Scale,
}

impl VerifyOptions {
    fn pick<T>(&self, full: T, quick: T) -> T {
        match self.scale {
            Scale::Full => full,
            Scale::Quick => quick,
        }
    }
}

/// One number and the closed interval it must lie in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measurement {
    pub label: String,
    pub value: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Measurement {
    pub fn at_most(label: impl Into<String>, value: f64, hi: f64) -> Self {
        Measurement {
            label: label.into(),
            value,
            lo: None,
            hi: Some(hi),
        }
    }

    pub fn at_least(label: impl Into<String>, value: f64, lo: f64) -> Self {
        Measurement {
            label: label.into(),
            value,
            lo: Some(lo),
            hi: None,
        }
    }

    pub fn within(label: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Measurement {
            label: label.into(),
            value,
            lo: Some(lo),
            hi: Some(hi),
        }
    }

    pub fn zero(label: impl Into<String>, count: usize) -> Self {
        Self::at_most(label, count as f64, 0.0)
    }

    pub fn passed(&self) -> bool {
        !self.value.is_nan()
            && self.lo.map_or(true, |lo| self.value >= lo)
            && self.hi.map_or(true, |hi| self.value <= hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: String,
    pub measurements: Vec<Measurement>,
    pub notes: Vec<String>,
}

impl CriterionResult {
    fn new(id: usize, title: &str) -> Self {
        CriterionResult {
            id,
            title: title.into(),
            measurements: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        !self.measurements.is_empty() && self.measurements.iter().all(Measurement::passed)
    }

    pub fn failures(&self) -> Vec<&Measurement> {
        self.measurements.iter().filter(|m| !m.passed()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub scale: Scale,
    pub results: Vec<CriterionResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(CriterionResult::passed)
    }

    /// A stable text rendering: no timings, fixed float formatting.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "verify seed={} scale={:?}", self.seed, self.scale);
        for r in &self.results {
            let _ = writeln!(
                out,
                "[{}] {:>2} {}",
                if r.passed() { "PASS" } else { "FAIL" },
                r.id,
                r.title
            );
            for m in &r.measurements {
                let bounds = match (m.lo, m.hi) {
                    (Some(lo), Some(hi)) => format!("in [{lo:.6}, {hi:.6}]"),
                    (Some(lo), None) => format!(">= {lo:.6}"),
                    (None, Some(hi)) => format!("<= {hi:.6}"),
                    (None, None) => String::new(),
                };
                let _ = writeln!(
                    out,
                    "    {} {}: {:.6} {bounds}",
                    if m.passed() { " " } else { "!" },
                    m.label,
                    m.value
                );
            }
            for n in &r.notes {
                let _ = writeln!(out, "    # {n}");
            }
        }
        out
    }
}

// ---------------------------------------------------------------- 1

/// Exact permutation-averaged leave-one-out error on random admissible families.
pub fn criterion_one_inclusion(opts: &VerifyOptions) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(1, "one-inclusion permutation bound");
    let mut violations = 0;
    let mut worst_gap = f64::NEG_INFINITY;
    // Draws are redrawn until 50 nonempty families have been measured.
    let (mut measured, mut empty) = (0u64, 0u64);
    while measured < 50 {
        let mut g_rng = rng(mix(&[opts.seed, 1, measured, empty]));
        let points = 4 + (measured % 3) as usize;
        let d = 1 + ((measured / 3) % 2) as usize;
        // Each ordered tuple (repeats included) forbids a random block with probability 1/2.
        let mut constraints = PatternConstraints::new(points);
        for t in all_tuples(points, d) {
            if g_rng.gen_bool(0.5) {
                constraints.push(t, Block::new(g_rng.gen_range(0..1u32 << d), d));
            }
        }
        let family = constraints.admissible();
        if family.is_empty() {
            empty += 1;
            continue;
        }
        measured += 1;
        let rows: Vec<Vec<bool>> = family
            .iter()
            .map(|&m| (0..points).map(|i| m >> i & 1 == 1).collect())
            .collect();
        let vc = vc_of_rows(&rows, points);
        let graph = OneInclusionGraph::new(points, &family);
        let err = worst_permutation_loo_error(&graph);
        let bound = BigRational::new(BigInt::from(vc), BigInt::from(points));
        if err > bound {
            violations += 1;
        }
        worst_gap = worst_gap.max(ratio_to_f64(&(err - bound)));
    }
    r.notes.push(format!("{empty} empty families redrawn"));
    r.measurements.push(Measurement::zero("families with error > VC/(n+1)", violations));
    r.measurements
        .push(Measurement::at_most("max(error − VC/(n+1))", worst_gap, 0.0));
    Ok(r)
}

// ---------------------------------------------------------------- 2, 3

/// Every class of at most 8 distinct labelings over `m ≤ max_points` points,
/// one per orbit of point permutations and per-point label flips.
pub fn small_classes(max_points: usize) -> Vec<FiniteClass> {
    let mut out = Vec::new();
    for m in 1..=max_points {
        let cube = 1u32 << m;
        let perms = permutations(m);
        let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
        let mut subset: Vec<u32> = Vec::new();
        fn rec(
            start: u32,
            cube: u32,
            subset: &mut Vec<u32>,
            f: &mut dyn FnMut(&[u32]),
        ) {
            if !subset.is_empty() {
                f(subset);
            }
            if subset.len() == 8 {
                return;
            }
            for r in start..cube {
                subset.push(r);
                rec(r + 1, cube, subset, f);
                subset.pop();
            }
        }
        rec(0, cube, &mut subset, &mut |s| {
            let canon = canonical(s, m, &perms);
            if seen.insert(canon.clone()) {
                let rows = canon
                    .iter()
                    .map(|&r| (0..m).map(|i| r >> i & 1 == 1).collect())
                    .collect();
                out.push(
                    FiniteClass::new(FiniteClass::default_points(m), rows)
                        .expect("distinct points"),
                );
            }
        });
    }
    out
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, m - 1);
            out.push(q);
        }
    }
    out
}

fn canonical(rows: &[u32], m: usize, perms: &[Vec<usize>]) -> Vec<u32> {
    let mut best: Option<Vec<u32>> = None;
    for p in perms {
        for flip in 0..1u32 << m {
            let mut img: Vec<u32> = rows
                .iter()
                .map(|&r| {
                    let r = r ^ flip;
                    (0..m).fold(0, |acc, i| acc | ((r >> i & 1) << p[i]))
                })
                .collect();
            img.sort_unstable();
            if best.as_ref().map_or(true, |b| img < *b) {
                best = Some(img);
            }
        }
    }
    best.unwrap_or_default()
}

fn all_tuples(m: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..m).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Longest game any scripted adversary can force against `strategy` within
/// `limit` rounds; `None` if some script of length `limit` leaves the
/// version space nonempty.
fn worst_script(
    game: &FiniteGame,
    strategy: &dyn Strategy,
    tuples: &[Vec<usize>],
    history: &mut Vec<Play>,
    v: VersionSpace,
    limit: usize,
    memo: &mut HashMap<(VersionSpace, usize), Option<usize>>,
) -> Result<Option<usize>> {
    if v == 0 {
        return Ok(Some(0));
    }
    if limit == 0 {
        return Ok(None);
    }
    if let Some(&m) = memo.get(&(v, limit)) {
        return Ok(m);
    }
    let mut worst = Some(0);
    for t in tuples {
        let x: Vec<DomainPoint> = t.iter().map(|&i| game.domain()[i].clone()).collect();
        let y = strategy.next(history, &x)?;
        let w = game.restrict(v, t, y);
        history.push(Play::new(x, y));
        let sub = worst_script(game, strategy, tuples, history, w, limit - 1, memo)?;
        history.pop();
        worst = match (worst, sub) {
            (Some(a), Some(b)) => Some(a.max(b + 1)),
            _ => None,
        };
        if worst.is_none() {
            break;
        }
    }
    memo.insert((v, limit), worst);
    Ok(worst)
}

/// Most matches the forbidden-pattern learner concedes over consistent
/// sequences of at most `limit` plays.
fn max_matches(
    game: &FiniteGame,
    learner: &mut ForbiddenPatternLearner,
    tuples: &[Vec<usize>],
    consistent: VersionSpace,
    limit: usize,
    memo: &mut HashMap<(VersionSpace, VersionSpace, usize), usize>,
) -> Result<usize> {
    if limit == 0 {
        return Ok(0);
    }
    let accepted = game.version_space(learner.accepted())?;
    if let Some(&m) = memo.get(&(accepted, consistent, limit)) {
        return Ok(m);
    }
    let mut best = 0;
    for t in tuples {
        let x: Vec<DomainPoint> = t.iter().map(|&i| game.domain()[i].clone()).collect();
        for y in Block::all(game.d()) {
            let c = game.restrict(consistent, t, y);
            if c == 0 {
                continue;
            }
            let mut l = learner.clone();
            l.propose(&x)?;
            let matched = l.reveal(y)? as usize;
            let rest = max_matches(game, &mut l, tuples, c, limit - 1, memo)?;
            best = best.max(matched + rest);
        }
    }
    memo.insert((accepted, consistent, limit), best);
    Ok(best)
}

pub fn criterion_game_solver(opts: &VerifyOptions) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(2, "game solver soundness and dvcl_depth");
    let classes = small_classes(opts.pick(4, 3));
    let (mut depth_mismatch, mut not_emptied, mut not_tight, mut cases) = (0, 0, 0, 0);
    for class in &classes {
        for d in 1..=2 {
            cases += 1;
            let domain = class.points().to_vec();
            let game = FiniteGame::new(class, &domain, d)?;
            let solver = Arc::new(GameSolver::new(game.clone()));
            let value = solver.value(game.full()).max(0) as usize;
            let depth = dvcl_depth(class, &domain, d, 8)?.value();
            let brute = brute_force_dvcl_depth(class, &domain, d, 8)?;
            if depth != brute || depth != value {
                depth_mismatch += 1;
            }
            let strategy = SolvedStrategy::new(Arc::clone(&solver));
            let tuples = all_tuples(domain.len(), d);
            let worst = worst_script(
                &game,
                &strategy,
                &tuples,
                &mut Vec::new(),
                game.full(),
                5,
                &mut HashMap::new(),
            )?;
            match worst {
                None => not_emptied += 1,
                Some(w) if w != value + 1 => not_tight += 1,
                _ => {}
            }
        }
    }
    r.notes.push(format!(
        "{} classes up to symmetry, {cases} (class, d) cases",
        classes.len()
    ));
    r.measurements.push(Measurement::zero("dvcl_depth ≠ brute force", depth_mismatch));
    r.measurements
        .push(Measurement::zero("scripts of length 5 leaving V nonempty", not_emptied));
    r.measurements
        .push(Measurement::zero("worst script ≠ value + 1 rounds", not_tight));
    Ok(r)
}

pub fn criterion_reduction(opts: &VerifyOptions) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(3, "forbidden-pattern reduction");
    let classes = small_classes(opts.pick(4, 3));
    let (mut excess, mut tree_bad) = (0, 0);
    for class in &classes {
        for d in 1..=2 {
            let domain = class.points().to_vec();
            let game = FiniteGame::new(class, &domain, d)?;
            let solver = Arc::new(GameSolver::new(game.clone()));
            let value = solver.value(game.full()).max(0) as usize;
            let f: Arc<dyn Strategy> = Arc::new(SolvedStrategy::new(Arc::clone(&solver)));
            let tuples = all_tuples(domain.len(), d);
            let mut learner = ForbiddenPatternLearner::new(Arc::clone(&f))?;
            let m = max_matches(&game, &mut learner, &tuples, game.full(), 5, &mut HashMap::new())?;
            if m > value {
                excess += 1;
            }
            if value == 0 {
                continue;
            }
            let tree = solver
                .shattered_tree(value)?
                .ok_or_else(|| Error::Inconsistent(format!("{}: no tree of depth {value}", class.name())))?;
            let mut learner = ForbiddenPatternLearner::new(f)?;
            let transcript = learner.play_against_tree(&tree, value)?;
            let sample: Vec<LabeledExample> = transcript
                .rounds
                .iter()
                .flat_map(|round| {
                    round
                        .x
                        .iter()
                        .enumerate()
                        .map(|(j, p)| LabeledExample::new(p.clone(), round.y.bit(j)))
                        .collect::<Vec<_>>()
                })
                .collect();
            let consistent = class.is_consistent(&sample)?;
            if transcript.rounds.len() != value || transcript.matches() != 0 || !consistent {
                tree_bad += 1;
            }
        }
    }
    r.measurements
        .push(Measurement::zero("cases with matches > game value", excess));
    r.measurements.push(Measurement::zero(
        "tree adversaries not forcing value consistent unmatched rounds",
        tree_bad,
    ));
    Ok(r)
}

// ---------------------------------------------------------------- 4, 5, 6

/// Lower-bound runs on `TreeClass(d)` for `d ∈ {2, 3}`, `κ ∈ {3, 4, 5}`.
#[derive(Clone, Debug)]
pub struct LowerBoundRuns {
    /// `(d, reports)`, reports in the order ERM, memorizer, optimal rate, oracle.
    pub runs: Vec<(usize, Vec<LowerBoundReport>)>,
}

pub fn lower_bound_runs(opts: &VerifyOptions) -> Result<LowerBoundRuns> {
    let trials = opts.pick(100_000, 2_000);
    let mut runs = Vec::new();
    for d in [2usize, 3] {
        let class = Arc::new(TreeClass::new(d));
        let subjects = vec![
            Subject::Learner(Arc::new(Erm::new(class.clone()))),
            Subject::Learner(Arc::new(Memorizer)),
            Subject::Learner(Arc::new(OptimalRateLearner::for_class(class, d)?)),
            Subject::Oracle,
        ];
        let base = HardDistribution::tree_class(d, Branch::random(d, 0))?;
        let config = LowerBoundConfig {
            kappas: vec![3, 4, 5],
            trials,
            seed: mix(&[opts.seed, 4, d as u64]),
            mode: BranchMode::ThroughKappa,
        };
        runs.push((d, run_lower_bound_suite(&base, &subjects, &config)?));
    }
    Ok(LowerBoundRuns { runs })
}

pub fn criterion_event_mass(runs: &LowerBoundRuns) -> CriterionResult {
    let mut r = CriterionResult::new(4, "P[G(κ)] ≥ (d−1)d^(−κ)/4");
    for (d, reports) in &runs.runs {
        for c in &reports[0].cells {
            r.measurements.push(Measurement::at_least(
                format!("d={d} κ={} P̂[G]", c.kappa),
                c.p_g_hat,
                c.p_g_bound - 3.0 * c.p_g_se,
            ));
            if !c.guard_ok {
                r.notes.push(format!(
                    "d={d} κ={}: n_κ = {} is below d^(κ+1)/(9(d−1))",
                    c.kappa, c.n
                ));
            }
        }
    }
    r
}

pub fn criterion_conditional_error(runs: &LowerBoundRuns) -> CriterionResult {
    let mut r = CriterionResult::new(5, "conditional error given G(κ) is 1/2");
    for (d, reports) in &runs.runs {
        for rep in reports {
            for c in &rep.cells {
                let label = format!("d={d} κ={} {}", c.kappa, rep.learner);
                match (c.cond_err, c.cond_err_se) {
                    (Some(e), Some(_)) if rep.learner == "oracle_branch" => {
                        r.measurements
                            .push(Measurement::at_most(format!("{label} (control)"), e, 0.0));
                    }
                    (Some(e), Some(se)) => r.measurements.push(Measurement::within(
                        label,
                        e,
                        0.5 - 3.0 * se,
                        0.5 + 3.0 * se,
                    )),
                    _ => {
                        r.notes.push(format!("{label}: no G(κ) occurrences"));
                        r.measurements.push(Measurement::at_least(
                            format!("{label} G(κ) count"),
                            0.0,
                            1.0,
                        ));
                    }
                }
            }
        }
    }
    r
}

pub fn criterion_headline(runs: &LowerBoundRuns) -> CriterionResult {
    let mut r = CriterionResult::new(6, "max_κ n_κ·loss ≥ 0.8·d/72 for d = 3");
    let target = 0.8 * 3.0 / 72.0;
    for (d, reports) in &runs.runs {
        if *d != 3 {
            continue;
        }
        for rep in reports.iter().filter(|r| r.learner != "oracle_branch") {
            let best = rep.max_n_times_loss().expect("cells");
            r.measurements.push(Measurement::at_least(
                format!("{} max n·loss (κ={})", rep.learner, best.kappa),
                best.n_times_loss,
                target - 3.0 * best.n_times_loss_se,
            ));
        }
        if let Some(oracle) = reports.iter().find(|r| r.learner == "oracle_branch") {
            let best = oracle.max_n_times_loss().expect("cells");
            r.notes.push(format!("oracle control max n·loss = {}", best.n_times_loss));
        }
    }
    r
}

// ---------------------------------------------------------------- 7

pub fn criterion_upper_shape(opts: &VerifyOptions) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(7, "n·E[loss] ≤ 16 for thresholds");
    let branch = Branch::random(1, mix(&[opts.seed, 7]));
    let dist = truncated_branch_distribution(
        &ThresholdClass,
        &BisectionTree,
        &branch,
        6,
        LevelWeights::LevelUniform,
    )?;
    let learner = OptimalRateLearner::for_class(Arc::new(ThresholdClass), 1)?;
    let trials = opts.pick(10_000, 200);
    let report = estimate_curve_with(
        &learner,
        &dist,
        &[64, 128, 256, 512],
        trials,
        mix(&[opts.seed, 7, 1]),
    )?;
    for row in &report.rows {
        let n = row.n as f64;
        r.measurements.push(Measurement::at_most(
            format!("n={} n·loss", row.n),
            n * row.mean_loss,
            16.0 + 3.0 * n * row.std_error,
        ));
        if row.fallbacks > 0 {
            r.notes.push(format!("n={}: {} ERM fallbacks", row.n, row.fallbacks));
        }
    }
    Ok(r)
}

// ---------------------------------------------------------------- 8

/// The exactly computed `e_t` curve and the good sizes for the depth-2
/// `TreeClass(2)` hard distribution used by criterion 8.
pub fn treeclass_good_sizes(seed: u64) -> Result<(HardDistribution, Vec<f64>, crate::learners::GoodSizes)> {
    let d = 2;
    let hard = HardDistribution::tree_class(d, Branch::random(d, mix(&[seed, 8])))?;
    let dist = hard.truncated(5)?;
    let tc = TreeClass::new(d);
    let game = FiniteGame::from_hypotheses(&tc, &tc.hypotheses_to_depth(2), &tc.points_to_depth(2), d)?;
    let strategy = tc.strategy(d).expect("tree class strategy");
    let tuples = TupleDistribution::blocked(&dist, d)?;
    let curve = fp_positive_curve(&strategy, &game, &tuples, 64)?;
    let good = good_sizes(&curve);
    Ok((hard, curve, good))
}

pub fn criterion_estimator(opts: &VerifyOptions) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(8, "t̂ ∈ T_good at n = 256");
    let (hard, curve, good) = treeclass_good_sizes(opts.seed)?;
    let dist = hard.truncated(5)?;
    let strategy = TreeClass::new(2).strategy(2).expect("tree class strategy");
    let trials = opts.pick(200, 50);
    let mut hits = 0;
    for t in 0..trials as u64 {
        let sample = dist.sample_n(256, &mut rng(mix(&[opts.seed, 8, t, 1])));
        let rep = sample_size_estimator(&sample, &strategy, 2, &mut rng(mix(&[opts.seed, 8, t, 2])))?;
        if rep.t_hat.is_some_and(|t| good.contains(t)) {
            hits += 1;
        }
    }
    r.notes.push(format!(
        "t* = {:?}, T_good = {:?}, e_1..e_4 = {:?}",
        good.t_star,
        good.good,
        &curve[1..curve.len().min(5)]
    ));
    r.measurements.push(Measurement::at_least(
        "fraction of trials with t̂ ∈ T_good",
        hits as f64 / trials as f64,
        0.9,
    ));
    Ok(r)
}

// ---------------------------------------------------------------- 9

pub fn criterion_halfspace(_opts: &VerifyOptions) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(9, "half-space fractal trees shatter");
    for dim in [2usize, 3, 4] {
        let depth = 3;
        let tree = halfspace_fractal_tree(dim, depth)?;
        let class = HalfspaceClass::new(dim);
        let d = dim - 1;
        let mut min_margin = f64::INFINITY;
        for leaf in Address::at_level(d, depth) {
            let Some(HypothesisId::Halfspace(w)) = tree.table(&leaf) else {
                return Err(Error::Inconsistent(format!("no witness stored at {leaf}")));
            };
            for s in 0..depth {
                let u = leaf.prefix(s);
                let block = leaf.blocks()[s];
                for (j, p) in tree.node(&u)?.iter().enumerate() {
                    let x = p.as_vector().expect("vector points");
                    let ip: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
                    let signed = if block.bit(j) { ip } else { -ip };
                    min_margin = min_margin.min(signed);
                }
            }
        }
        r.measurements.push(Measurement::at_least(
            format!("dim={dim} min signed margin"),
            min_margin,
            1e-9,
        ));
        let shattered = shatters_dvcl(&class, &tree, depth)?.shattered;
        r.measurements
            .push(Measurement::at_least(format!("dim={dim} shatters_dvcl"), shattered as u8 as f64, 1.0));
    }
    Ok(r)
}

// ---------------------------------------------------------------- 10

/// Reference search written independently of the memoized one: plain
/// recursion over explicit node lists.
pub fn brute_force_monochromatic(
    depth: usize,
    coloring: &dyn Fn(&[u32]) -> bool,
    target: usize,
) -> bool {
    fn subtree(v: &[u32], depth: usize) -> Vec<Vec<u32>> {
        let mut out = vec![v.to_vec()];
        if v.len() < depth {
            for c in 0..2 {
                let mut w = v.to_vec();
                w.push(c);
                out.extend(subtree(&w, depth));
            }
        }
        out
    }
    fn fits(v: &[u32], h: usize, c: bool, depth: usize, col: &dyn Fn(&[u32]) -> bool) -> bool {
        if col(v) != c {
            return false;
        }
        if h == 0 {
            return true;
        }
        if v.len() == depth {
            return false;
        }
        (0..2).all(|i| {
            let mut child = v.to_vec();
            child.push(i);
            subtree(&child, depth)
                .iter()
                .any(|w| fits(w, h - 1, c, depth, col))
        })
    }
    [true, false].into_iter().any(|c| {
        subtree(&[], depth)
            .iter()
            .any(|v| fits(v, target, c, depth, coloring))
    })
}

/// Checks that `e` is a genuine monochromatic embedding.
pub fn embedding_valid(e: &Embedding, depth: usize, coloring: &dyn Fn(&[u32]) -> bool) -> bool {
    let targets: Vec<Vec<u32>> = (0..=e.height)
        .flat_map(|l| Address::at_level(1, l))
        .map(|a| a.blocks().iter().map(|b| b.value()).collect())
        .collect();
    targets.iter().all(|t| {
        let Some(src) = e.map.get(t) else { return false };
        if src.len() > depth || coloring(src) != e.color {
            return false;
        }
        if t.is_empty() {
            return true;
        }
        let parent = &e.map[&t[..t.len() - 1].to_vec()];
        let mut child = parent.clone();
        child.push(*t.last().unwrap());
        src.len() >= child.len() && src[..child.len()] == child[..]
    })
}

pub fn criterion_indifference(opts: &VerifyOptions) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(10, "Ramsey search and make_indifferent");
    let mut mismatches = 0;
    let mut invalid = 0;
    let mut checked = 0usize;
    for depth in 0..=4usize {
        let nodes: Vec<Vec<u32>> = (0..=depth)
            .flat_map(|l| Address::at_level(1, l))
            .map(|a| a.blocks().iter().map(|b| b.value()).collect())
            .collect();
        let index: HashMap<Vec<u32>, usize> =
            nodes.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let total = 1u64 << nodes.len();
        let samples: Vec<u64> = if depth <= 3 {
            (0..total).collect()
        } else {
            let mut g = rng(mix(&[opts.seed, 10]));
            (0..opts.pick(1u64 << 14, 1 << 10)).map(|_| g.next_u64() % total).collect()
        };
        for code in samples {
            let col = |v: &[u32]| code >> index[v] & 1 == 1;
            for target in 0..=depth {
                checked += 1;
                let brute = brute_force_monochromatic(depth, &col, target);
                let found = ramsey_monochromatic_subtree(2, depth, &col, target);
                if brute != found.is_some() {
                    mismatches += 1;
                }
                if let Some(e) = &found {
                    if e.height != target || !embedding_valid(e, depth, &col) {
                        invalid += 1;
                    }
                }
            }
        }
    }
    r.notes.push(format!(
        "{checked} (coloring, height) pairs; depth 4 colorings sampled"
    ));
    r.measurements.push(Measurement::zero("Ramsey existence ≠ brute force", mismatches));
    r.measurements.push(Measurement::zero("invalid embeddings", invalid));

    let (class, tree) = parity_fixture()?;
    let before = indifferent_check(&class, &tree, 2)?;
    r.measurements.push(Measurement::at_least(
        "fixture is non-indifferent before",
        before.is_some() as u8 as f64,
        1.0,
    ));
    for d_out in [1usize, 2] {
        let out = make_indifferent(&class, &tree, d_out, 4)?;
        let after = indifferent_check(&class, &out.tree, d_out)?;
        r.measurements.push(Measurement::zero(
            format!("D_out={d_out} violations after"),
            after.is_some() as usize,
        ));
        let shattered = shatters_dvcl(&class, &out.tree, d_out)?.shattered;
        r.measurements.push(Measurement::at_least(
            format!("D_out={d_out} output still shatters"),
            shattered as u8 as f64,
            1.0,
        ));
    }
    Ok(r)
}

// ---------------------------------------------------------------- 11

pub fn criterion_marginal(opts: &VerifyOptions) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(11, "X-marginal independent of the branch");
    for d in [2usize, 3] {
        let a = HardDistribution::tree_class(d, Branch::random(d, mix(&[opts.seed, 11, 1])))?;
        let b = HardDistribution::tree_class(d, Branch::random(d, mix(&[opts.seed, 11, 2])))?;
        let stream = mix(&[opts.seed, 11, d as u64]);
        let (mut ra, mut rb) = (rng(stream), rng(stream));
        let (mut mismatches, mut label_differences) = (0, 0);
        for _ in 0..100_000 {
            let (x, y) = (a.sample(&mut ra)?, b.sample(&mut rb)?);
            if x.x != y.x || x.k != y.k {
                mismatches += 1;
            }
            if x.y != y.y {
                label_differences += 1;
            }
        }
        r.measurements.push(Measurement::zero(format!("d={d} X mismatches in 10^5 draws"), mismatches));
        r.notes.push(format!("d={d}: labels differ on {label_differences} draws"));
    }
    Ok(r)
}

// ---------------------------------------------------------------- 12

pub fn criterion_determinism(opts: &VerifyOptions) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(12, "identical seeds give identical reports");
    let quick = VerifyOptions {
        seed: opts.seed,
        scale: Scale::Quick,
    };
    let run = || -> Result<String> {
        let results = vec![
            criterion_one_inclusion(&quick)?,
            criterion_upper_shape(&quick)?,
            criterion_estimator(&quick)?,
            criterion_marginal(&quick)?,
        ];
        Ok(VerifyReport {
            seed: quick.seed,
            scale: quick.scale,
            results,
        }
        .to_text())
    };
    let (a, b) = (run()?, run()?);
    let differing = a.lines().zip(b.lines()).filter(|(x, y)| x != y).count()
        + a.lines().count().abs_diff(b.lines().count());
    r.measurements.push(Measurement::zero("differing report lines", differing));
    Ok(r)
}

/// Runs all twelve criteria.
pub fn verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let runs = lower_bound_runs(opts)?;
    let results = vec![
        criterion_one_inclusion(opts)?,
        criterion_game_solver(opts)?,
        criterion_reduction(opts)?,
        criterion_event_mass(&runs),
        criterion_conditional_error(&runs),
        criterion_headline(&runs),
        criterion_upper_shape(opts)?,
        criterion_estimator(opts)?,
        criterion_halfspace(opts)?,
        criterion_indifference(opts)?,
        criterion_marginal(opts)?,
        criterion_determinism(opts)?,
    ];
    Ok(VerifyReport {
        seed: opts.seed,
        scale: opts.scale,
        results,
    })
}

/// `p/q` as `f64`, for notes.
pub fn approx(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| ratio_to_f64(r))
}
