use crate::domain::{Block, DomainPoint, HypothesisClass, HypothesisId, Restriction};
use crate::error::{Error, Result};
use crate::games::Play;

/// A version space over at most 128 distinct behaviors, as a bitset.
pub type VersionSpace = u128;

/// The online game restricted to a finite domain, with behaviors deduplicated.
#[derive(Clone, Debug)]
pub struct FiniteGame {
    d: usize,
    restriction: Restriction,
    /// `columns[i][label]`: behaviors giving `label` at point `i`.
    columns: Vec<[u128; 2]>,
}

impl FiniteGame {
    pub fn new(class: &dyn HypothesisClass, domain: &[DomainPoint], d: usize) -> Result<Self> {
        let ids = class.enumerate().ok_or_else(|| {
            Error::Unsupported(format!("{} is not enumerable", class.name()))
        })?;
        Self::from_hypotheses(class, &ids, domain, d)
    }

    pub fn from_hypotheses(
        class: &dyn HypothesisClass,
        ids: &[HypothesisId],
        domain: &[DomainPoint],
        d: usize,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::Invalid("tuple size must be positive".into()));
        }
        let restriction = Restriction::from_hypotheses(class, ids, domain)?;
        let k = restriction.behaviors.len();
        if k > 128 {
            return Err(Error::BudgetExceeded {
                required: k as u128,
                budget: 128,
            });
        }
        let n = restriction.domain.len();
        let mut columns = vec![[0u128; 2]; n];
        for (h, row) in restriction.behaviors.iter().enumerate() {
            for (i, &l) in row.iter().enumerate() {
                columns[i][l as usize] |= 1 << h;
            }
        }
        Ok(FiniteGame {
            d,
            restriction,
            columns,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn domain(&self) -> &[DomainPoint] {
        &self.restriction.domain
    }

    pub fn restriction(&self) -> &Restriction {
        &self.restriction
    }

    pub fn behaviors(&self) -> usize {
        self.restriction.behaviors.len()
    }

    pub fn full(&self) -> VersionSpace {
        match self.behaviors() {
            128 => u128::MAX,
            k => (1u128 << k) - 1,
        }
    }

    pub fn index_of(&self, p: &DomainPoint) -> Result<usize> {
        self.restriction.point_index(p)
    }

    /// `V|x,y` for a tuple of point indices.
    #[inline]
    pub fn restrict(&self, v: VersionSpace, x: &[usize], y: Block) -> VersionSpace {
        x.iter()
            .enumerate()
            .fold(v, |acc, (j, &i)| acc & self.columns[i][y.bit(j) as usize])
    }

    pub fn restrict_points(&self, v: VersionSpace, x: &[DomainPoint], y: Block) -> Result<VersionSpace> {
        let idx = self.indices(x)?;
        Ok(self.restrict(v, &idx, y))
    }

    pub fn indices(&self, x: &[DomainPoint]) -> Result<Vec<usize>> {
        if x.len() != self.d {
            return Err(Error::Invalid(format!("expected a {}-tuple, got {}", self.d, x.len())));
        }
        x.iter().map(|p| self.index_of(p)).collect()
    }

    /// The version space after a history of plays.
    pub fn version_space(&self, history: &[Play]) -> Result<VersionSpace> {
        history.iter().try_fold(self.full(), |v, p| self.restrict_points(v, &p.x, p.y))
    }

    /// The hypothesis behind the lowest surviving behavior.
    pub fn representative(&self, v: VersionSpace) -> Option<&HypothesisId> {
        (v != 0).then(|| &self.restriction.hypotheses[v.trailing_zeros() as usize])
    }
}
