use std::collections::HashMap;

use crate::domain::{DomainPoint, HypothesisClass, HypothesisId, Label, LabeledExample};
use crate::error::{Error, Result};

/// A class given by an explicit truth table over a finite point list.
#[derive(Clone, Debug)]
pub struct FiniteClass {
    name: String,
    points: Vec<DomainPoint>,
    index: HashMap<DomainPoint, usize>,
    rows: Vec<Vec<bool>>,
}

impl FiniteClass {
    pub fn new(points: Vec<DomainPoint>, rows: Vec<Vec<bool>>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate point {p}")));
            }
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != points.len()) {
            return Err(Error::Invalid(format!(
                "row of length {} over {} points",
                bad.len(),
                points.len()
            )));
        }
        Ok(FiniteClass {
            name: format!("finite({} hypotheses, {} points)", rows.len(), points.len()),
            points,
            index,
            rows,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Points `1/(m+1), …, m/(m+1)` used by the built-in constructors.
    pub fn default_points(m: usize) -> Vec<DomainPoint> {
        (1..=m)
            .map(|i| DomainPoint::rational(i as i64, m as i64 + 1))
            .collect()
    }

    /// All `2^m` labelings of `m` points.
    pub fn full_cube(m: usize) -> Self {
        let rows = (0..1usize << m)
            .map(|mask| (0..m).map(|i| (mask >> i) & 1 == 1).collect())
            .collect();
        FiniteClass::new(Self::default_points(m), rows)
            .expect("well-formed cube")
            .with_name(format!("full_cube({m})"))
    }

    pub fn singleton(points: Vec<DomainPoint>, labeling: Vec<bool>) -> Result<Self> {
        Ok(FiniteClass::new(points, vec![labeling])?.with_name("singleton"))
    }

    pub fn points(&self) -> &[DomainPoint] {
        &self.points
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Union of two classes over the same point list (duplicates kept once).
    pub fn union(&self, other: &FiniteClass) -> Result<Self> {
        if self.points != other.points {
            return Err(Error::Invalid("union needs identical point lists".into()));
        }
        let mut rows = self.rows.clone();
        for r in &other.rows {
            if !rows.contains(r) {
                rows.push(r.clone());
            }
        }
        FiniteClass::new(self.points.clone(), rows)
    }

    fn column(&self, p: &DomainPoint) -> Result<usize> {
        self.index.get(p).copied().ok_or_else(|| Error::DomainMismatch {
            point: p.to_string(),
            context: self.name.clone(),
        })
    }
}

impl HypothesisClass for FiniteClass {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn evaluate(&self, h: &HypothesisId, x: &DomainPoint) -> Result<Label> {
        match h {
            HypothesisId::Index(i) if *i < self.rows.len() => Ok(self.rows[*i][self.column(x)?]),
            other => Err(Error::Invalid(format!("{other} is not a hypothesis of {}", self.name))),
        }
    }

    fn consistent_hypothesis(&self, sample: &[LabeledExample]) -> Result<Option<HypothesisId>> {
        let cols = sample
            .iter()
            .map(|ex| Ok((self.column(&ex.point)?, ex.label)))
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .rows
            .iter()
            .position(|row| cols.iter().all(|&(c, l)| row[c] == l))
            .map(HypothesisId::Index))
    }

    fn enumerate(&self) -> Option<Vec<HypothesisId>> {
        Some((0..self.rows.len()).map(HypothesisId::Index).collect())
    }
}
