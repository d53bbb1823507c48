use std::collections::BTreeMap;
use std::f64::consts::PI;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::Serialize;

use crate::domain::{Address, Block, DomainPoint, HypothesisClass, HypothesisId, Label, LabeledExample};
use crate::error::{Error, Result};
use crate::trees::{DvclTree, TreeSource};

/// Inner products closer to zero than this are rejected as sign-ambiguous.
pub const SIGN_BAND: f64 = 1e-12;

/// Homogeneous half-spaces `h_w(x) = 1` iff `<w,x> > 0`, `w` on the unit sphere.
#[derive(Clone, Copy, Debug)]
pub struct HalfspaceClass {
    pub dim: usize,
}

impl HalfspaceClass {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 2, "half-spaces need dimension at least 2");
        HalfspaceClass { dim }
    }

    fn vector<'a>(&self, x: &'a DomainPoint) -> Result<&'a [f64]> {
        match x.as_vector() {
            Some(v) if v.len() == self.dim => Ok(v),
            _ => Err(Error::DomainMismatch {
                point: x.to_string(),
                context: format!("half-spaces in dimension {}", self.dim),
            }),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

impl HypothesisClass for HalfspaceClass {
    fn name(&self) -> String {
        format!("halfspaces({})", self.dim)
    }

    fn evaluate(&self, h: &HypothesisId, x: &DomainPoint) -> Result<Label> {
        let x = self.vector(x)?;
        match h {
            HypothesisId::Halfspace(w) if w.len() == self.dim => {
                let s = dot(w, x);
                if s.abs() < SIGN_BAND {
                    Err(Error::AmbiguousSign(s))
                } else {
                    Ok(s > 0.0)
                }
            }
            other => Err(Error::Invalid(format!("{other} is not in {}", self.name()))),
        }
    }

    /// Strict feasibility of `sign(<w,x_i>) = y_i` posed as the linear program
    /// `min |w|_1` subject to `±<w,x_i> >= 1`.
    fn consistent_hypothesis(&self, sample: &[LabeledExample]) -> Result<Option<HypothesisId>> {
        let mut e1 = vec![0.0; self.dim];
        e1[0] = 1.0;
        if sample.is_empty() {
            return Ok(Some(HypothesisId::Halfspace(e1)));
        }
        let rows = sample
            .iter()
            .map(|e| Ok((self.vector(&e.point)?, e.label)))
            .collect::<Result<Vec<_>>>()?;
        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let pos: Vec<_> = (0..self.dim).map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
        let neg: Vec<_> = (0..self.dim).map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
        for (x, label) in &rows {
            let s = if *label { 1.0 } else { -1.0 };
            let terms: Vec<_> = (0..self.dim)
                .flat_map(|i| [(pos[i], s * x[i]), (neg[i], -s * x[i])])
                .collect();
            lp.add_constraint(&terms[..], ComparisonOp::Ge, 1.0);
        }
        let sol = match lp.solve() {
            Ok(sol) => sol,
            Err(minilp::Error::Infeasible) => return Ok(None),
            Err(e) => return Err(Error::Invalid(format!("linear program failed: {e}"))),
        };
        let w: Vec<f64> = (0..self.dim).map(|i| sol[pos[i]] - sol[neg[i]]).collect();
        if norm(&w) == 0.0 {
            return Ok(None);
        }
        let w = normalized(&w);
        let ok = rows
            .iter()
            .all(|(x, l)| {
                let s = dot(&w, x);
                s.abs() >= SIGN_BAND && (s > 0.0) == *l
            });
        Ok(ok.then_some(HypothesisId::Halfspace(w)))
    }

    fn tuple_size_hint(&self) -> Option<usize> {
        Some(self.dim - 1)
    }
}

/// An open spherical cap of hypotheses: all unit `w` within angle `radius` of `center`.
#[derive(Clone, Debug, Serialize)]
pub struct FractalCell {
    pub center: Vec<f64>,
    pub radius: f64,
    /// Orthonormal frame; `frame[0]` is the center, the rest are the node points.
    pub frame: Vec<Vec<f64>>,
    /// Smallest signed inner product of the center with the labeled points on its path.
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub struct FractalTree {
    pub dim: usize,
    pub tree: DvclTree,
    pub cells: BTreeMap<Address, FractalCell>,
}

impl TreeSource for FractalTree {
    fn block_size(&self) -> usize {
        self.dim - 1
    }

    fn max_depth(&self) -> Option<usize> {
        Some(self.tree.depth())
    }

    fn node(&self, u: &Address) -> Result<Vec<DomainPoint>> {
        self.tree.node(u)
    }

    fn table(&self, u: &Address) -> Option<HypothesisId> {
        self.tree.table(u)
    }
}

/// Gram–Schmidt completion of the unit vector `c` against the standard basis.
fn orthonormal_frame(c: &[f64]) -> Vec<Vec<f64>> {
    let dim = c.len();
    let mut frame = vec![c.to_vec()];
    for k in 0..dim {
        if frame.len() == dim {
            break;
        }
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for f in &frame {
                let p = dot(&v, f);
                for (vi, fi) in v.iter_mut().zip(f) {
                    *vi -= p * fi;
                }
            }
        }
        if norm(&v) > 1e-6 {
            frame.push(normalized(&v));
        }
    }
    frame
}

/// Builds the cap-refinement tree shattered by `HalfspaceClass(dim)` with
/// blocks of size `dim - 1`. Each node's cell is a cap; its points are an
/// orthonormal completion of the cap center, and each child block gets the
/// perturbed witness `normalize(c + ε Σ ±x_i)` with `ε = radius / (4√dim)`.
pub fn halfspace_fractal_tree(dim: usize, depth: usize) -> Result<FractalTree> {
    if dim < 2 {
        return Err(Error::Invalid("dimension must be at least 2".into()));
    }
    let d = dim - 1;
    let mut root_center = vec![0.0; dim];
    root_center[0] = 1.0;
    let mut cells = BTreeMap::new();
    let mut tree = DvclTree::new(d, depth);
    let mut frontier = vec![(Address::root(), root_center, PI, Vec::<(Vec<f64>, bool)>::new())];
    for level in 0..=depth {
        let mut next = Vec::new();
        for (u, center, radius, path) in frontier {
            let margin = path
                .iter()
                .map(|(x, l)| if *l { dot(&center, x) } else { -dot(&center, x) })
                .fold(f64::INFINITY, f64::min);
            if margin <= 0.0 {
                return Err(Error::Inconsistent(format!("cell {u} lost its sign pattern")));
            }
            let frame = orthonormal_frame(&center);
            let points: Vec<DomainPoint> = frame[1..]
                .iter()
                .map(|x| DomainPoint::RealVector(x.clone()))
                .collect();
            tree.insert(u.clone(), points, Some(HypothesisId::Halfspace(center.clone())))?;
            if level < depth {
                let eps = radius / (4.0 * (dim as f64).sqrt());
                if eps < 1e-12 {
                    return Err(Error::PrecisionExhausted { max_depth: level });
                }
                let len = (1.0 + eps * eps * d as f64).sqrt();
                let child_radius = 0.5
                    * f64::min(
                        (eps / len).asin(),
                        radius - (eps * (d as f64).sqrt()).atan(),
                    );
                for b in Block::all(d) {
                    let mut w = center.clone();
                    for (i, x) in frame[1..].iter().enumerate() {
                        let s = if b.bit(i) { eps } else { -eps };
                        for (wk, xk) in w.iter_mut().zip(x) {
                            *wk += s * xk;
                        }
                    }
                    let mut child_path = path.clone();
                    for (i, x) in frame[1..].iter().enumerate() {
                        child_path.push((x.clone(), b.bit(i)));
                    }
                    next.push((u.child(b), normalized(&w), child_radius, child_path));
                }
            }
            cells.insert(
                u,
                FractalCell {
                    center,
                    radius,
                    frame,
                    margin,
                },
            );
        }
        frontier = next;
    }
    tree.validate_distinct()?;
    Ok(FractalTree { dim, tree, cells })
}
