use std::sync::Arc;

use num::{One, Zero};

use crate::domain::{
    Address, Block, DomainPoint, HypothesisClass, HypothesisId, Label, LabeledExample, Rational,
};
use crate::error::{Error, Result};
use crate::games::{CompiledPattern, Play, Strategy};
use crate::trees::{DvclTree, TreeSource};

/// `h_θ(x) = 1` iff `x > θ`, for rational `θ ∈ (0,1)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ThresholdClass;

fn rational_of(x: &DomainPoint) -> Result<Rational> {
    x.as_rational().copied().ok_or_else(|| Error::DomainMismatch {
        point: x.to_string(),
        context: "thresholds".into(),
    })
}

/// The constraint a labeled sample puts on `θ`: `lower ≤ θ < upper`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ThresholdInterval {
    /// Largest 0-labeled point.
    pub lower: Option<Rational>,
    /// Smallest 1-labeled point.
    pub upper: Option<Rational>,
}

impl ThresholdInterval {
    pub fn from_sample<'a>(
        sample: impl IntoIterator<Item = (&'a DomainPoint, Label)>,
    ) -> Result<Self> {
        let mut iv = ThresholdInterval::default();
        for (x, label) in sample {
            iv.add(rational_of(x)?, label);
        }
        Ok(iv)
    }

    pub fn add(&mut self, x: Rational, label: Label) {
        if label {
            self.upper = Some(self.upper.map_or(x, |u| u.min(x)));
        } else {
            self.lower = Some(self.lower.map_or(x, |l| l.max(x)));
        }
    }

    fn closed_lower(&self) -> Option<Rational> {
        self.lower.filter(|l| *l > Rational::zero())
    }

    fn open_upper(&self) -> Rational {
        self.upper
            .map_or(Rational::one(), |u| u.min(Rational::one()))
    }

    pub fn is_feasible(&self) -> bool {
        let hi = self.open_upper();
        match self.closed_lower() {
            Some(l) => l < hi,
            None => Rational::zero() < hi,
        }
    }

    /// Smallest feasible threshold, or the midpoint of `(0, upper)` when the
    /// infimum is not attained.
    pub fn leftmost(&self) -> Option<Rational> {
        if !self.is_feasible() {
            return None;
        }
        Some(
            self.closed_lower()
                .unwrap_or_else(|| self.open_upper() / Rational::from_integer(2)),
        )
    }

    pub fn midpoint(&self) -> Option<Rational> {
        if !self.is_feasible() {
            return None;
        }
        let lo = self.closed_lower().unwrap_or_else(Rational::zero);
        Some((lo + self.open_upper()) / Rational::from_integer(2))
    }
}

impl HypothesisClass for ThresholdClass {
    fn name(&self) -> String {
        "thresholds".into()
    }

    fn evaluate(&self, h: &HypothesisId, x: &DomainPoint) -> Result<Label> {
        match h {
            HypothesisId::Threshold(t) => Ok(rational_of(x)? > *t),
            other => Err(Error::Invalid(format!("{other} is not a threshold"))),
        }
    }

    fn consistent_hypothesis(&self, sample: &[LabeledExample]) -> Result<Option<HypothesisId>> {
        let iv = ThresholdInterval::from_sample(sample.iter().map(|e| (&e.point, e.label)))?;
        Ok(iv.leftmost().map(HypothesisId::Threshold))
    }

    fn tuple_size_hint(&self) -> Option<usize> {
        Some(1)
    }

    fn strategy(&self, d: usize) -> Option<Arc<dyn Strategy>> {
        Some(Arc::new(ThresholdStrategy { d }))
    }

    fn tree_generator(&self) -> Option<Arc<dyn TreeSource>> {
        Some(Arc::new(BisectionTree))
    }
}

/// Closed-form online learner for thresholds: forbid an inconsistent block when
/// one exists, otherwise forbid the complement of the midpoint labeling.
#[derive(Clone, Copy, Debug)]
pub struct ThresholdStrategy {
    pub d: usize,
}

impl ThresholdStrategy {
    fn answer(d: usize, base: &ThresholdInterval, x: &[DomainPoint]) -> Result<Block> {
        let xs = x.iter().map(rational_of).collect::<Result<Vec<_>>>()?;
        if xs.len() != d {
            return Err(Error::Invalid(format!("expected a {d}-tuple, got {}", xs.len())));
        }
        for y in Block::all(d) {
            let mut iv = *base;
            for (j, &xj) in xs.iter().enumerate() {
                iv.add(xj, y.bit(j));
            }
            if !iv.is_feasible() {
                return Ok(y);
            }
        }
        let mid = base.midpoint().expect("feasible when every block is");
        let labels: Vec<bool> = xs.iter().map(|&xj| xj > mid).collect();
        Ok(Block::from_bits(&labels).complement())
    }

    fn base(history: &[Play]) -> Result<ThresholdInterval> {
        ThresholdInterval::from_sample(
            history
                .iter()
                .flat_map(|p| p.x.iter().enumerate().map(move |(j, x)| (x, p.y.bit(j)))),
        )
    }
}

impl Strategy for ThresholdStrategy {
    fn name(&self) -> String {
        "threshold-midpoint".into()
    }

    fn block_size(&self) -> usize {
        self.d
    }

    fn next(&self, history: &[Play], x: &[DomainPoint]) -> Result<Block> {
        Self::answer(self.d, &Self::base(history)?, x)
    }

    fn compile(&self, history: &[Play]) -> Result<Option<CompiledPattern>> {
        let base = Self::base(history)?;
        let d = self.d;
        Ok(Some(Arc::new(move |x: &[DomainPoint]| Self::answer(d, &base, x))))
    }
}

/// The interval-bisection 1-VCL tree. Label 1 at a node keeps the left half
/// (the threshold lies below the midpoint), label 0 keeps the right half.
#[derive(Clone, Copy, Debug, Default)]
pub struct BisectionTree;

impl BisectionTree {
    pub fn interval(u: &Address) -> (Rational, Rational) {
        let two = Rational::from_integer(2);
        let (mut a, mut b) = (Rational::zero(), Rational::one());
        for blk in u.blocks() {
            let mid = (a + b) / two;
            if blk.bit(0) {
                b = mid;
            } else {
                a = mid;
            }
        }
        (a, b)
    }

    pub fn midpoint(u: &Address) -> Rational {
        let (a, b) = Self::interval(u);
        (a + b) / Rational::from_integer(2)
    }
}

impl TreeSource for BisectionTree {
    fn block_size(&self) -> usize {
        1
    }

    fn max_depth(&self) -> Option<usize> {
        None
    }

    fn node(&self, u: &Address) -> Result<Vec<DomainPoint>> {
        if u.level() > 60 {
            return Err(Error::PrecisionExhausted { max_depth: 60 });
        }
        Ok(vec![DomainPoint::Rational(Self::midpoint(u))])
    }

    fn table(&self, u: &Address) -> Option<HypothesisId> {
        if u.level() > 60 {
            return None;
        }
        Some(HypothesisId::Threshold(Self::midpoint(u)))
    }
}

/// Materializes the bisection tree to `depth`, with midpoint thresholds as table.
pub fn threshold_bisection_tree(depth: usize) -> Result<DvclTree> {
    DvclTree::materialize(&BisectionTree, depth)
}
