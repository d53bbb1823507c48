//! One-inclusion graphs over labelings that avoid a pattern function, and the
//! orientation-based predictor built on them.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num::{BigInt, BigRational, Zero};

use crate::domain::{Block, DomainPoint, Label, LabeledExample};
use crate::error::{Error, Result};
use crate::learners::orientation::{min_max_outdegree_orientation, Orientation};

pub const DEFAULT_EXACT_CAP: usize = 20;

/// Labelings are packed in a `u32`, so exact graphs stop at 31 points plus
/// the query.
pub const MAX_EXACT_CAP: usize = 31;

/// `g` as a plain function of tuples.
pub type PatternFn = Arc<dyn Fn(&[DomainPoint]) -> Result<Block> + Send + Sync>;

/// Forbidden blocks on ordered index tuples of a point list. A labeling `f`
/// violates `(i, b)` when `f(i_j) = b_j` for every `j`.
#[derive(Clone, Debug, Default)]
pub struct PatternConstraints {
    n: usize,
    /// Constraints grouped by their largest index, for prefix pruning.
    by_max: Vec<Vec<(Vec<usize>, Block)>>,
}

/// Whether the repeated indices of a tuple ask for the same label.
fn satisfiable(idx: &[usize], b: Block) -> bool {
    (0..idx.len()).all(|a| (0..a).all(|c| idx[a] != idx[c] || b.bit(a) == b.bit(c)))
}

fn tuples(n: usize, d: usize, mut visit: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let mut idx = vec![0usize; d];
    if n == 0 {
        return Ok(());
    }
    loop {
        visit(&idx)?;
        let mut j = d;
        loop {
            if j == 0 {
                return Ok(());
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
        }
    }
}

impl PatternConstraints {
    pub fn new(n: usize) -> Self {
        PatternConstraints {
            n,
            by_max: vec![Vec::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn push(&mut self, idx: Vec<usize>, b: Block) {
        if let Some(&top) = idx.iter().max() {
            if satisfiable(&idx, b) {
                self.by_max[top].push((idx, b));
            }
        }
    }

    /// Constraints from `g` on every ordered `d`-tuple of `points`, repeats included.
    pub fn from_pattern(
        points: &[DomainPoint],
        d: usize,
        g: &dyn Fn(&[DomainPoint]) -> Result<Block>,
    ) -> Result<Self> {
        let mut c = PatternConstraints::new(points.len());
        let mut buf = Vec::with_capacity(d);
        tuples(points.len(), d, |idx| {
            buf.clear();
            buf.extend(idx.iter().map(|&i| points[i].clone()));
            let b = g(&buf)?;
            c.push(idx.to_vec(), b);
            Ok(())
        })?;
        Ok(c)
    }

    /// Adds a point at index `n` with the constraints of every tuple touching it.
    pub fn extend_with(
        &mut self,
        points: &[DomainPoint],
        d: usize,
        g: &dyn Fn(&[DomainPoint]) -> Result<Block>,
    ) -> Result<()> {
        let last = self.n;
        if points.len() != last + 1 {
            return Err(Error::Invalid("extension needs exactly one new point".into()));
        }
        self.n += 1;
        self.by_max.push(Vec::new());
        let mut buf = Vec::with_capacity(d);
        let mut found = Vec::new();
        tuples(points.len(), d, |idx| {
            if idx.contains(&last) {
                buf.clear();
                buf.extend(idx.iter().map(|&i| points[i].clone()));
                found.push((idx.to_vec(), g(&buf)?));
            }
            Ok(())
        })?;
        for (idx, b) in found {
            self.push(idx, b);
        }
        Ok(())
    }

    fn ok_at(&self, i: usize, labeling: u32) -> bool {
        self.by_max[i].iter().all(|(idx, b)| {
            !idx.iter()
                .enumerate()
                .all(|(j, &p)| (labeling >> p & 1 == 1) == b.bit(j))
        })
    }

    pub fn admits(&self, labeling: u32) -> bool {
        (0..self.n).all(|i| self.ok_at(i, labeling))
    }

    /// Every admissible labeling (bit `i` = label of point `i`), ascending.
    pub fn admissible(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.extend_admissible(0, 0, &mut out);
        out.sort_unstable();
        out
    }

    fn extend_admissible(&self, i: usize, partial: u32, out: &mut Vec<u32>) {
        if i == self.n {
            out.push(partial);
            return;
        }
        for l in [0u32, 1] {
            let next = partial | l << i;
            if self.ok_at(i, next) {
                self.extend_admissible(i + 1, next, out);
            }
        }
    }

    /// Admissible labelings extending each of `prefixes` by one more point.
    fn extend_last(&self, prefixes: &[u32]) -> Vec<u32> {
        let i = self.n - 1;
        let mut out = Vec::new();
        for &p in prefixes {
            for l in [0u32, 1] {
                let next = p | l << i;
                if self.ok_at(i, next) {
                    out.push(next);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// The result of one prediction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prediction {
    pub label: Label,
    /// Exactly one extension was admissible.
    pub forced: bool,
    /// The training labels were not admissible under the pattern. The label
    /// then comes from the nearest admissible labeling, or is 0 when there is
    /// none.
    pub anomaly: bool,
}

/// Hamming-1 graph on a family of labelings of `n` points, with an orientation
/// of least maximum out-degree.
#[derive(Clone, Debug)]
pub struct OneInclusionGraph {
    n: usize,
    vertices: Vec<u32>,
    index: HashMap<u32, usize>,
    edges: Vec<(usize, usize)>,
    orientation: Orientation,
}

impl OneInclusionGraph {
    pub fn new(n: usize, family: &[u32]) -> Self {
        let mut vertices = family.to_vec();
        vertices.sort_unstable();
        vertices.dedup();
        let index: HashMap<u32, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        for (a, &v) in vertices.iter().enumerate() {
            for i in 0..n {
                if v >> i & 1 == 0 {
                    if let Some(&b) = index.get(&(v | 1 << i)) {
                        edges.push((a, b));
                    }
                }
            }
        }
        let orientation = min_max_outdegree_orientation(vertices.len(), &edges);
        OneInclusionGraph {
            n,
            vertices,
            index,
            edges,
            orientation,
        }
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn max_out_degree(&self) -> usize {
        self.orientation.max_out_degree
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.orientation.out_degrees(self.vertices.len(), &self.edges)
    }

    /// Label of `test` given the labels of every other point, packed in `rest`
    /// (the `test` bit of `rest` is ignored).
    pub fn predict(&self, rest: u32, test: usize) -> Prediction {
        let v0 = rest & !(1 << test);
        let v1 = v0 | 1 << test;
        match (self.index.get(&v0), self.index.get(&v1)) {
            (Some(&a), Some(&b)) => {
                let e = self
                    .edges
                    .binary_search(&(a, b))
                    .ok()
                    .or_else(|| self.edges.iter().position(|&x| x == (a, b)))
                    .expect("Hamming neighbours are joined");
                let head = self.orientation.heads[e];
                Prediction {
                    label: self.vertices[head] >> test & 1 == 1,
                    forced: false,
                    anomaly: false,
                }
            }
            (Some(_), None) => Prediction {
                label: false,
                forced: true,
                anomaly: false,
            },
            (None, Some(_)) => Prediction {
                label: true,
                forced: true,
                anomaly: false,
            },
            (None, None) => Prediction {
                label: false,
                forced: false,
                anomaly: true,
            },
        }
    }

    /// Exact leave-one-out error averaged over every ordering of the points,
    /// for the target labeling `f`. The prediction is recomputed for each
    /// permutation from its first `n − 1` labeled points.
    pub fn permutation_loo_error(&self, f: u32) -> BigRational {
        let mut perm: Vec<usize> = (0..self.n).collect();
        let mut wrong = 0u64;
        let mut total = 0u64;
        loop {
            let test = perm[self.n - 1];
            let rest = perm[..self.n - 1]
                .iter()
                .fold(0u32, |acc, &i| acc | (f & 1 << i));
            let p = self.predict(rest, test);
            if p.label != (f >> test & 1 == 1) {
                wrong += 1;
            }
            total += 1;
            if !next_permutation(&mut perm) {
                break;
            }
        }
        BigRational::new(BigInt::from(wrong), BigInt::from(total))
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// The largest permutation-averaged error over every target in the family.
pub fn worst_permutation_loo_error(graph: &OneInclusionGraph) -> BigRational {
    graph
        .vertices()
        .iter()
        .map(|&f| graph.permutation_loo_error(f))
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a })
}

/// `A_g` trained on a fixed sample: the distinct training points are sorted
/// once, their mutual constraints and admissible labelings precomputed, and
/// each query adds only the tuples touching the test point.
#[derive(Clone)]
pub struct OneInclusionPredictor {
    g: PatternFn,
    d: usize,
    cap: usize,
    points: Vec<DomainPoint>,
    position: BTreeMap<DomainPoint, usize>,
    /// Training label of each point in `points`.
    point_labels: Vec<Label>,
    /// `point_labels` packed, when the exact path can use it.
    labels: u32,
    /// Some point carries both labels.
    conflict: bool,
    /// With `d = 1`: some training label is the forbidden one.
    d1_violated: bool,
    constraints: PatternConstraints,
    family: Vec<u32>,
}

impl OneInclusionPredictor {
    pub fn new(g: PatternFn, d: usize, train: &[LabeledExample], cap: usize) -> Result<Self> {
        let mut seen: BTreeMap<DomainPoint, Label> = BTreeMap::new();
        let mut conflict = false;
        for ex in train {
            if let Some(&l) = seen.get(&ex.point) {
                conflict |= l != ex.label;
            } else {
                seen.insert(ex.point.clone(), ex.label);
            }
        }
        let points: Vec<DomainPoint> = seen.keys().cloned().collect();
        let cap = cap.min(MAX_EXACT_CAP);
        let point_labels: Vec<Label> = seen.values().copied().collect();
        let labels = if point_labels.len() <= cap {
            point_labels
                .iter()
                .enumerate()
                .fold(0u32, |acc, (i, &l)| acc | (l as u32) << i)
        } else {
            0
        };
        let position = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let fast = d == 1;
        let mut d1_violated = false;
        if fast {
            for (p, &l) in points.iter().zip(&point_labels) {
                d1_violated |= g(std::slice::from_ref(p))?.bit(0) == l;
            }
        }
        let (constraints, family) = if fast || points.len() > cap {
            (PatternConstraints::default(), Vec::new())
        } else {
            let c = PatternConstraints::from_pattern(&points, d, g.as_ref())?;
            let f = c.admissible();
            (c, f)
        };
        Ok(OneInclusionPredictor {
            g,
            d,
            cap,
            points,
            position,
            point_labels,
            labels,
            conflict,
            d1_violated,
            constraints,
            family,
        })
    }

    /// Number of distinct points a query would place in the graph.
    pub fn graph_size(&self, x: &DomainPoint) -> usize {
        self.points.len() + usize::from(!self.position.contains_key(x))
    }

    pub fn predict(&self, x: &DomainPoint) -> Result<Prediction> {
        if self.conflict {
            return Ok(Prediction {
                label: false,
                forced: false,
                anomaly: true,
            });
        }
        if self.d == 1 {
            return self.predict_d1(x);
        }
        let size = self.graph_size(x);
        if size > self.cap {
            return Err(Error::BudgetExceeded {
                required: size as u128,
                budget: self.cap as u128,
            });
        }
        if let Some(&i) = self.position.get(x) {
            // Both extensions must match the training label at `x`.
            if self.family.binary_search(&self.labels).is_ok() {
                return Ok(Prediction {
                    label: self.point_labels[i],
                    forced: true,
                    anomaly: false,
                });
            }
            let mask = low_bits(self.points.len());
            return Ok(Prediction {
                label: nearest(&self.family, self.labels, mask).is_some_and(|v| v >> i & 1 == 1),
                forced: false,
                anomaly: true,
            });
        }
        let mut pts = self.points.clone();
        pts.push(x.clone());
        let mut c = self.constraints.clone();
        c.extend_with(&pts, self.d, self.g.as_ref())?;
        let family = c.extend_last(&self.family);
        let test = pts.len() - 1;
        let graph = OneInclusionGraph::new(pts.len(), &family);
        let mask = low_bits(test);
        if family.iter().any(|&v| v & mask == self.labels) {
            return Ok(graph.predict(self.labels, test));
        }
        // The sample violates the pattern: predict as if its labels were the
        // nearest admissible ones.
        let Some(rest) = nearest(&family, self.labels, mask) else {
            return Ok(Prediction {
                label: false,
                forced: false,
                anomaly: true,
            });
        };
        Ok(Prediction {
            anomaly: true,
            ..graph.predict(rest, test)
        })
    }

    /// With `d = 1` the only admissible labeling is `x ↦ ¬g(x)`, which is
    /// also the nearest one to any sample.
    fn predict_d1(&self, x: &DomainPoint) -> Result<Prediction> {
        let forbidden = (self.g)(std::slice::from_ref(x))?.bit(0);
        Ok(Prediction {
            label: !forbidden,
            forced: !self.d1_violated,
            anomaly: self.d1_violated,
        })
    }
}

fn low_bits(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// The member of `family` closest to `labels` in Hamming distance on `mask`,
/// ties to the smallest.
fn nearest(family: &[u32], labels: u32, mask: u32) -> Option<u32> {
    family
        .iter()
        .copied()
        .min_by_key(|&v| (((v ^ labels) & mask).count_ones(), v))
}

/// One-shot form of [`OneInclusionPredictor`].
pub fn one_inclusion_predict(
    g: PatternFn,
    d: usize,
    train: &[LabeledExample],
    x: &DomainPoint,
    cap: usize,
) -> Result<Prediction> {
    OneInclusionPredictor::new(g, d, train, cap)?.predict(x)
}
