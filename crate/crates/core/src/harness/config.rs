//! JSON experiment configuration. Every section except `class` is optional;
//! each subcommand validates the sections it reads.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classes::{
    BisectionTree, FiniteClass, HalfspaceClass, IdentityTree, ThresholdClass, TreeClass,
};
use crate::domain::{
    parse_big_rational, parse_rational, DomainPoint, FiniteSupportDistribution, HypothesisClass,
    LabeledExample,
};
use crate::error::{Error, Result};
use crate::learners::{Erm, Learner, Memorizer, OneInclusionLearner, OptimalRateLearner};
use crate::lowerbound::{truncated_branch_distribution, BranchMode, LevelWeights};
use crate::trees::{Branch, TreeSource};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassSpec {
    /// Every labeling of `points` points `1/(m+1), …, m/(m+1)`.
    FullCube { points: usize },
    /// Explicit truth table; `points` are rationals such as `"1/3"`.
    Finite {
        points: Vec<String>,
        rows: Vec<Vec<u8>>,
    },
    Thresholds,
    TreeClass { d: usize },
    Halfspace { dim: usize },
}

impl ClassSpec {
    pub fn build(&self) -> Result<Arc<dyn HypothesisClass>> {
        Ok(match self {
            ClassSpec::FullCube { points } => Arc::new(FiniteClass::full_cube(*points)),
            ClassSpec::Finite { .. } => Arc::new(self.finite()?.expect("finite class")),
            ClassSpec::Thresholds => Arc::new(ThresholdClass),
            ClassSpec::TreeClass { d } => Arc::new(TreeClass::new(*d)),
            ClassSpec::Halfspace { dim } => Arc::new(HalfspaceClass::new(*dim)),
        })
    }

    fn finite(&self) -> Result<Option<FiniteClass>> {
        match self {
            ClassSpec::FullCube { points } => Ok(Some(FiniteClass::full_cube(*points))),
            ClassSpec::Finite { points, rows } => {
                let pts = points
                    .iter()
                    .map(|p| parse_rational(p).map(DomainPoint::Rational))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::config("class.points", e))?;
                let rows = rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|&b| match b {
                                0 => Ok(false),
                                1 => Ok(true),
                                other => Err(Error::config(
                                    "class.rows",
                                    format!("label {other} is not 0 or 1"),
                                )),
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                FiniteClass::new(pts, rows)
                    .map(Some)
                    .map_err(|e| Error::config("class", e.to_string()))
            }
            _ => Ok(None),
        }
    }

    /// The finite domain the depth and game subcommands search over.
    pub fn domain(&self, depth: usize) -> Result<Vec<DomainPoint>> {
        match self {
            ClassSpec::TreeClass { d } => Ok(TreeClass::new(*d).points_to_depth(depth)),
            ClassSpec::Thresholds => Ok(FiniteClass::default_points(depth)),
            ClassSpec::Halfspace { .. } => Err(Error::config(
                "class.kind",
                "half-spaces have no finite default domain; use the halfspace subcommand",
            )),
            _ => Ok(self.finite()?.expect("finite class").points().to_vec()),
        }
    }

    pub fn tree(&self) -> Option<Arc<dyn TreeSource>> {
        match self {
            ClassSpec::Thresholds => Some(Arc::new(BisectionTree)),
            ClassSpec::TreeClass { d } => Some(Arc::new(IdentityTree { d: *d })),
            _ => None,
        }
    }

    pub fn d(&self) -> Option<usize> {
        match self {
            ClassSpec::TreeClass { d } => Some(*d),
            ClassSpec::Thresholds => Some(1),
            ClassSpec::Halfspace { dim } => Some(dim.saturating_sub(1)),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ClassSpec::FullCube { points } if *points == 0 || *points > 16 => {
                Err(Error::config("class.points", "full cube needs 1 to 16 points"))
            }
            ClassSpec::TreeClass { d } if *d == 0 || *d > 8 => {
                Err(Error::config("class.d", "tree class block size must be 1 to 8"))
            }
            ClassSpec::Halfspace { dim } if *dim < 2 => {
                Err(Error::config("class.dim", "dimension must be at least 2"))
            }
            ClassSpec::Finite { .. } => self.finite().map(|_| ()),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub x: String,
    pub y: u8,
    pub mass: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    /// Labeled rational atoms with exact masses.
    Atoms { atoms: Vec<AtomSpec> },
    /// The branch labeling of the class's own tree, truncated at `max_level`.
    Branch {
        max_level: usize,
        #[serde(default = "default_weights")]
        weights: LevelWeights,
        #[serde(default)]
        branch_seed: u64,
    },
}

fn default_weights() -> LevelWeights {
    LevelWeights::Geometric
}

impl DistributionSpec {
    pub fn build(&self, class: &ClassSpec) -> Result<FiniteSupportDistribution> {
        match self {
            DistributionSpec::Atoms { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::config("distribution.atoms", "no atoms"));
                }
                let mut out = Vec::with_capacity(atoms.len());
                for (i, a) in atoms.iter().enumerate() {
                    let field = format!("distribution.atoms[{i}]");
                    let x = parse_rational(&a.x).map_err(|e| Error::config(&field, e))?;
                    let y = match a.y {
                        0 => false,
                        1 => true,
                        other => {
                            return Err(Error::config(field, format!("label {other} is not 0 or 1")))
                        }
                    };
                    let mass = parse_big_rational(&a.mass).map_err(|e| Error::config(&field, e))?;
                    out.push((LabeledExample::new(DomainPoint::Rational(x), y), mass));
                }
                FiniteSupportDistribution::exact(out)
                    .map_err(|e| Error::config("distribution.atoms", e.to_string()))
            }
            DistributionSpec::Branch {
                max_level,
                weights,
                branch_seed,
            } => {
                let tree = class.tree().ok_or_else(|| {
                    Error::config("distribution.kind", "this class has no branch tree")
                })?;
                let branch = Branch::random(tree.block_size(), *branch_seed);
                truncated_branch_distribution(
                    class.build()?.as_ref(),
                    tree.as_ref(),
                    &branch,
                    *max_level,
                    *weights,
                )
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    OptimalRate,
    Erm,
    OneInclusion,
    Memorizer,
    /// Only in lower-bound runs: predicts the true branch labeling.
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerSpec {
    pub learner: LearnerKind,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default = "default_cap")]
    pub exact_cap: usize,
    #[serde(default = "default_tie_rule")]
    pub tie_rule: String,
}

fn default_cap() -> usize {
    crate::learners::DEFAULT_EXACT_CAP
}

fn default_tie_rule() -> String {
    "zero".into()
}

impl LearnerSpec {
    pub fn of(kind: LearnerKind) -> Self {
        LearnerSpec {
            learner: kind,
            d: None,
            exact_cap: default_cap(),
            tie_rule: default_tie_rule(),
        }
    }

    /// `None` for the oracle, which only the lower-bound runner can build.
    pub fn build(&self, class: &ClassSpec) -> Result<Option<Arc<dyn Learner>>> {
        let h = class.build()?;
        let d = || {
            self.d.or(class.d()).ok_or_else(|| {
                Error::config("learner.d", "tuple size is required for this class")
            })
        };
        Ok(Some(match self.learner {
            LearnerKind::Erm => Arc::new(Erm::new(h)),
            LearnerKind::Memorizer => Arc::new(Memorizer),
            LearnerKind::OptimalRate => {
                Arc::new(OptimalRateLearner::for_class(h, d()?)?.with_cap(self.exact_cap))
            }
            LearnerKind::OneInclusion => {
                let d = d()?;
                let strategy = h.strategy(d).ok_or_else(|| {
                    Error::config("learner.learner", format!("{} has no strategy", h.name()))
                })?;
                Arc::new(OneInclusionLearner {
                    strategy,
                    d,
                    cap: self.exact_cap,
                })
            }
            LearnerKind::Oracle => return Ok(None),
        }))
    }

    fn validate(&self, field: &str) -> Result<()> {
        if self.tie_rule != "zero" {
            return Err(Error::config(
                format!("{field}.tie_rule"),
                format!("unknown tie rule {:?}; only \"zero\" is supported", self.tie_rule),
            ));
        }
        if self.exact_cap == 0 || self.exact_cap > crate::learners::MAX_EXACT_CAP {
            return Err(Error::config(
                format!("{field}.exact_cap"),
                format!("must be in 1..={}", crate::learners::MAX_EXACT_CAP),
            ));
        }
        if self.d == Some(0) {
            return Err(Error::config(format!("{field}.d"), "must be positive"));
        }
        Ok(())
    }
}

/// Either an explicit list or `base^from, …, base^to`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NGrid {
    Explicit(Vec<usize>),
    Geometric {
        #[serde(default = "default_base")]
        base: usize,
        from: u32,
        to: u32,
    },
}

fn default_base() -> usize {
    2
}

impl NGrid {
    pub fn values(&self) -> Result<Vec<usize>> {
        match self {
            NGrid::Explicit(v) => Ok(v.clone()),
            NGrid::Geometric { base, from, to } => {
                if *base < 2 {
                    return Err(Error::config("n_grid.base", "must be at least 2"));
                }
                (*from..=*to)
                    .map(|k| {
                        base.checked_pow(k)
                            .ok_or_else(|| Error::config("n_grid.to", "n overflows"))
                    })
                    .collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepthSpec {
    pub d: usize,
    /// Levels of the class's tree used as the domain for generator classes.
    #[serde(default = "default_domain_depth")]
    pub domain_depth: usize,
    #[serde(default = "default_depth_cap")]
    pub cap: usize,
}

fn default_domain_depth() -> usize {
    2
}

fn default_depth_cap() -> usize {
    8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub d: usize,
    #[serde(default = "default_domain_depth")]
    pub domain_depth: usize,
    /// Adversary tuples as indices into the domain; empty means the
    /// optimal adversary of the solved game.
    #[serde(default)]
    pub script: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowerBoundSpec {
    pub kappas: Vec<u32>,
    pub trials: usize,
    #[serde(default)]
    pub mode: BranchMode,
    #[serde(default = "default_lb_learners")]
    pub learners: Vec<LearnerKind>,
}

fn default_lb_learners() -> Vec<LearnerKind> {
    vec![LearnerKind::Erm, LearnerKind::Memorizer, LearnerKind::OptimalRate]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceSpec {
    pub dims: Vec<usize>,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub class: ClassSpec,
    #[serde(default)]
    pub distribution: Option<DistributionSpec>,
    #[serde(default)]
    pub learner: Option<LearnerSpec>,
    #[serde(default)]
    pub n_grid: Option<NGrid>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Reject distributions that no hypothesis fits exactly.
    #[serde(default = "yes")]
    pub realizable: bool,
    #[serde(default)]
    pub depth: Option<DepthSpec>,
    #[serde(default)]
    pub game: Option<GameSpec>,
    #[serde(default)]
    pub lowerbound: Option<LowerBoundSpec>,
    #[serde(default)]
    pub halfspace: Option<HalfspaceSpec>,
}

fn default_trials() -> usize {
    100
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Structural checks shared by every subcommand.
    pub fn validate(&self) -> Result<()> {
        self.class.validate()?;
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if let Some(grid) = &self.n_grid {
            let ns = grid.values()?;
            if ns.is_empty() {
                return Err(Error::config("n_grid", "is empty"));
            }
            if let Some(w) = ns.windows(2).find(|w| w[0] >= w[1]) {
                return Err(Error::config(
                    "n_grid",
                    format!("must be strictly increasing, found {} then {}", w[0], w[1]),
                ));
            }
            if ns[0] == 0 {
                return Err(Error::config("n_grid", "sample sizes must be positive"));
            }
        }
        if let Some(l) = &self.learner {
            l.validate("learner")?;
        }
        if let Some(lb) = &self.lowerbound {
            if lb.trials == 0 {
                return Err(Error::config("lowerbound.trials", "must be at least 1"));
            }
            if lb.kappas.is_empty() || lb.kappas.contains(&0) {
                return Err(Error::config("lowerbound.kappas", "need indices κ ≥ 1"));
            }
        }
        if let Some(h) = &self.halfspace {
            if h.dims.iter().any(|&d| d < 2) {
                return Err(Error::config("halfspace.dims", "dimensions must be at least 2"));
            }
        }
        Ok(())
    }

    /// The seed used by a run: the command line wins over the file.
    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(s) = seed {
            self.seed = s;
        }
        self
    }

    /// SHA-256 of the canonical JSON rendering.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex(&Sha256::digest(text.as_bytes()))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
