//! Points, labels, hypotheses and distributions shared by every other module.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num::rational::Ratio;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rand::{Rng, RngCore};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::games::Strategy;
use crate::trees::TreeSource;

pub type Label = bool;
pub type Rational = Ratio<i64>;

/// A `width`-bit labeling block. Coordinate 0 is the most significant bit, so
/// numeric order of `value` is lexicographic order of the coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    width: u8,
    value: u32,
}

impl Block {
    pub fn new(value: u32, width: usize) -> Self {
        assert!(width <= 31, "block width {width} too large");
        assert!(value < (1u32 << width), "block value out of range");
        Block {
            width: width as u8,
            value,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut value = 0u32;
        for &b in bits {
            value = (value << 1) | b as u32;
        }
        Block::new(value, bits.len())
    }

    pub fn zeros(width: usize) -> Self {
        Block::new(0, width)
    }

    pub fn ones(width: usize) -> Self {
        Block::new((1u32 << width) - 1, width)
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn bit(&self, j: usize) -> bool {
        debug_assert!(j < self.width());
        (self.value >> (self.width() - 1 - j)) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.width()).map(|j| self.bit(j)).collect()
    }

    pub fn complement(&self) -> Self {
        Block::new(!self.value & ((1u32 << self.width) - 1), self.width())
    }

    /// All blocks of the given width in lexicographic order.
    pub fn all(width: usize) -> impl Iterator<Item = Block> {
        (0..(1u32 << width)).map(move |v| Block::new(v, width))
    }

    /// The same labels after reordering coordinates: `perm[i]` is the source coordinate of `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Block::from_bits(&perm.iter().map(|&p| self.bit(p)).collect::<Vec<_>>())
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.width() {
            write!(f, "{}", self.bit(j) as u8)?;
        }
        Ok(())
    }
}

impl Serialize for Block {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let bits: Vec<u8> = self.bits().into_iter().map(|b| b as u8).collect();
        bits.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Block {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let bits = Vec::<u8>::deserialize(d)?;
        if bits.iter().any(|&b| b > 1) {
            return Err(serde::de::Error::custom("block bits must be 0 or 1"));
        }
        if bits.len() > 31 {
            return Err(serde::de::Error::custom("block too wide"));
        }
        Ok(Block::from_bits(
            &bits.iter().map(|&b| b == 1).collect::<Vec<_>>(),
        ))
    }
}

/// A node address: a string of blocks. Ordered shortlex (length first).
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Address(Vec<Block>);

impl Address {
    pub fn root() -> Self {
        Address(Vec::new())
    }

    pub fn from_blocks(blocks: Vec<Block>) -> Self {
        Address(blocks)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, b: Block) -> Self {
        let mut v = self.0.clone();
        v.push(b);
        Address(v)
    }

    pub fn parent(&self) -> Option<Self> {
        if self.0.is_empty() {
            None
        } else {
            Some(Address(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn prefix(&self, len: usize) -> Self {
        Address(self.0[..len].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Address) -> bool {
        self.0.len() <= other.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn is_strict_prefix_of(&self, other: &Address) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }

    pub fn concat(&self, tail: &Address) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&tail.0);
        Address(v)
    }

    /// The suffix after `prefix`, which must be a prefix of `self`.
    pub fn strip_prefix(&self, prefix: &Address) -> Option<Self> {
        if prefix.is_prefix_of(self) {
            Some(Address(self.0[prefix.level()..].to_vec()))
        } else {
            None
        }
    }

    /// Shortlex index with the root at 1, for uniform block width `d`.
    pub fn shortlex_index(&self, d: usize) -> u128 {
        let level = self.level() as u32;
        let width = d as u32;
        assert!(
            width * (level + 1) < 127,
            "address too deep for a 128-bit index"
        );
        let mut before: u128 = 0;
        for l in 0..level {
            before += 1u128 << (width * l);
        }
        let mut rank: u128 = 0;
        for b in &self.0 {
            debug_assert_eq!(b.width(), d);
            rank = (rank << width) | b.value() as u128;
        }
        1 + before + rank
    }

    /// Inverse of [`Address::shortlex_index`].
    pub fn from_shortlex_index(d: usize, index: u128) -> Self {
        assert!(index >= 1, "shortlex indices start at 1");
        let width = d as u32;
        let mut rest = index - 1;
        let mut level = 0u32;
        loop {
            let count = 1u128 << (width * level);
            if rest < count {
                break;
            }
            rest -= count;
            level += 1;
        }
        let mask = (1u128 << width) - 1;
        let blocks = (0..level)
            .rev()
            .map(|l| Block::new(((rest >> (width * l)) & mask) as u32, d))
            .collect();
        Address(blocks)
    }

    /// All addresses with exactly `level` blocks of width `d`, in lexicographic order.
    pub fn at_level(d: usize, level: usize) -> Vec<Address> {
        let mut out = vec![Address::root()];
        for _ in 0..level {
            out = out
                .iter()
                .flat_map(|a| Block::all(d).map(move |b| a.child(b)))
                .collect();
        }
        out
    }

    /// All addresses with at most `max_level` blocks, in shortlex order.
    pub fn up_to_level(d: usize, max_level: usize) -> Vec<Address> {
        (0..=max_level).flat_map(|l| Address::at_level(d, l)).collect()
    }
}

impl Ord for Address {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Address {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "λ");
        }
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Serde helpers rendering exact rationals as `"p/q"` strings.
pub mod ratio_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

pub fn parse_rational(text: &str) -> std::result::Result<Rational, String> {
    let text = text.trim();
    let (n, q) = match text.split_once('/') {
        Some((n, q)) => (n.trim(), q.trim()),
        None => (text, "1"),
    };
    let n: i64 = n.parse().map_err(|_| format!("bad numerator in {text:?}"))?;
    let q: i64 = q.parse().map_err(|_| format!("bad denominator in {text:?}"))?;
    if q == 0 {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(Rational::new(n, q))
}

pub fn parse_big_rational(text: &str) -> std::result::Result<BigRational, String> {
    let text = text.trim();
    let (n, q) = match text.split_once('/') {
        Some((n, q)) => (n.trim(), q.trim()),
        None => (text, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| format!("bad numerator in {text:?}"))?;
    let q: BigInt = q.parse().map_err(|_| format!("bad denominator in {text:?}"))?;
    if q.is_zero() {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(BigRational::new(n, q))
}

/// An element of the instance space.
#[derive(Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainPoint {
    /// Coordinate `coord` (0-based) of the tuple stored at a tree node.
    NodeCoord { address: Address, coord: usize },
    Rational(#[serde(with = "ratio_str")] Rational),
    RealVector(Vec<f64>),
}

impl DomainPoint {
    pub fn node(address: Address, coord: usize) -> Self {
        DomainPoint::NodeCoord { address, coord }
    }

    pub fn rational(n: i64, q: i64) -> Self {
        DomainPoint::Rational(Rational::new(n, q))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            DomainPoint::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            DomainPoint::RealVector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_node(&self) -> Option<(&Address, usize)> {
        match self {
            DomainPoint::NodeCoord { address, coord } => Some((address, *coord)),
            _ => None,
        }
    }

    fn tag(&self) -> u8 {
        match self {
            DomainPoint::NodeCoord { .. } => 0,
            DomainPoint::Rational(_) => 1,
            DomainPoint::RealVector(_) => 2,
        }
    }
}

impl PartialEq for DomainPoint {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for DomainPoint {}

impl Ord for DomainPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        use DomainPoint::*;
        match (self, other) {
            (
                NodeCoord { address: a, coord: i },
                NodeCoord {
                    address: b,
                    coord: j,
                },
            ) => a.cmp(b).then(i.cmp(j)),
            (Rational(a), Rational(b)) => a.cmp(b),
            (RealVector(a), RealVector(b)) => {
                for (x, y) in a.iter().zip(b) {
                    let c = x.total_cmp(y);
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                a.len().cmp(&b.len())
            }
            _ => self.tag().cmp(&other.tag()),
        }
    }
}

impl PartialOrd for DomainPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for DomainPoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.tag().hash(state);
        match self {
            DomainPoint::NodeCoord { address, coord } => {
                address.hash(state);
                coord.hash(state);
            }
            DomainPoint::Rational(r) => r.hash(state),
            DomainPoint::RealVector(v) => {
                v.len().hash(state);
                for x in v {
                    x.to_bits().hash(state);
                }
            }
        }
    }
}

impl fmt::Debug for DomainPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DomainPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainPoint::NodeCoord { address, coord } => write!(f, "x[{address}][{coord}]"),
            DomainPoint::Rational(r) => write!(f, "{r}"),
            DomainPoint::RealVector(v) => write!(f, "{v:?}"),
        }
    }
}

pub(crate) mod bit {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(*b as u8)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(serde::de::Error::custom(format!("label {other} not in {{0,1}}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledExample {
    pub point: DomainPoint,
    #[serde(with = "bit")]
    pub label: Label,
}

impl LabeledExample {
    pub fn new(point: DomainPoint, label: Label) -> Self {
        LabeledExample { point, label }
    }
}

/// Identifies one hypothesis inside its class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisId {
    Index(usize),
    Threshold(#[serde(with = "ratio_str")] Rational),
    Halfspace(Vec<f64>),
    Node { address: Address, block: Block },
}

impl fmt::Display for HypothesisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypothesisId::Index(i) => write!(f, "h{i}"),
            HypothesisId::Threshold(t) => write!(f, "θ={t}"),
            HypothesisId::Halfspace(w) => write!(f, "w={w:?}"),
            HypothesisId::Node { address, block } => write!(f, "h[{address}; {block}]"),
        }
    }
}

/// Anything that maps points to labels.
pub trait Classifier: Send + Sync {
    fn predict(&self, x: &DomainPoint) -> Result<Label>;
}

impl<F> Classifier for F
where
    F: Fn(&DomainPoint) -> Result<Label> + Send + Sync,
{
    fn predict(&self, x: &DomainPoint) -> Result<Label> {
        self(x)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Constant(pub Label);

impl Classifier for Constant {
    fn predict(&self, _: &DomainPoint) -> Result<Label> {
        Ok(self.0)
    }
}

/// A hypothesis id bound to the class that evaluates it.
#[derive(Clone)]
pub struct Bound {
    pub class: Arc<dyn HypothesisClass>,
    pub id: HypothesisId,
}

impl Classifier for Bound {
    fn predict(&self, x: &DomainPoint) -> Result<Label> {
        self.class.evaluate(&self.id, x)
    }
}

/// The complement `1 - h` of a classifier.
pub struct Negated<C>(pub C);

impl<C: Classifier> Classifier for Negated<C> {
    fn predict(&self, x: &DomainPoint) -> Result<Label> {
        Ok(!self.0.predict(x)?)
    }
}

/// A set of hypotheses over opaque points, interrogated through a consistency oracle.
pub trait HypothesisClass: Send + Sync {
    fn name(&self) -> String;

    fn evaluate(&self, h: &HypothesisId, x: &DomainPoint) -> Result<Label>;

    /// Some hypothesis agreeing with every example, if one exists.
    fn consistent_hypothesis(&self, sample: &[LabeledExample]) -> Result<Option<HypothesisId>> {
        let Some(ids) = self.enumerate() else {
            return Err(Error::Unsupported(format!(
                "{} has no consistency oracle",
                self.name()
            )));
        };
        'outer: for id in ids {
            for ex in sample {
                if self.evaluate(&id, &ex.point)? != ex.label {
                    continue 'outer;
                }
            }
            return Ok(Some(id));
        }
        Ok(None)
    }

    fn is_consistent(&self, sample: &[LabeledExample]) -> Result<bool> {
        Ok(self.consistent_hypothesis(sample)?.is_some())
    }

    fn enumerate(&self) -> Option<Vec<HypothesisId>> {
        None
    }

    fn tuple_size_hint(&self) -> Option<usize> {
        None
    }

    /// A closed-form online-game learner for tuples of size `d`.
    fn strategy(&self, _d: usize) -> Option<Arc<dyn Strategy>> {
        None
    }

    /// A lazily generated indifferent tree shattered by this class.
    fn tree_generator(&self) -> Option<Arc<dyn TreeSource>> {
        None
    }
}

/// Checks consistency by scanning an explicit hypothesis list.
pub fn consistent_by_enumeration(
    class: &dyn HypothesisClass,
    ids: &[HypothesisId],
    sample: &[LabeledExample],
) -> Result<bool> {
    'outer: for id in ids {
        for ex in sample {
            if class.evaluate(id, &ex.point)? != ex.label {
                continue 'outer;
            }
        }
        return Ok(true);
    }
    Ok(false)
}

/// The behaviors of a hypothesis list on a finite domain, deduplicated in id order.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub domain: Vec<DomainPoint>,
    pub index: HashMap<DomainPoint, usize>,
    pub hypotheses: Vec<HypothesisId>,
    pub behaviors: Vec<Vec<bool>>,
}

impl Restriction {
    pub fn new(class: &dyn HypothesisClass, domain: &[DomainPoint]) -> Result<Self> {
        let ids = class.enumerate().ok_or_else(|| {
            Error::Unsupported(format!("{} is not enumerable", class.name()))
        })?;
        Self::from_hypotheses(class, &ids, domain)
    }

    pub fn from_hypotheses(
        class: &dyn HypothesisClass,
        ids: &[HypothesisId],
        domain: &[DomainPoint],
    ) -> Result<Self> {
        let mut index = HashMap::new();
        let mut points = Vec::new();
        for p in domain {
            if !index.contains_key(p) {
                index.insert(p.clone(), points.len());
                points.push(p.clone());
            }
        }
        let mut seen = HashMap::new();
        let mut hypotheses = Vec::new();
        let mut behaviors = Vec::new();
        for id in ids {
            let row = points
                .iter()
                .map(|p| class.evaluate(id, p))
                .collect::<Result<Vec<_>>>()?;
            if !seen.contains_key(&row) {
                seen.insert(row.clone(), behaviors.len());
                hypotheses.push(id.clone());
                behaviors.push(row);
            }
        }
        Ok(Restriction {
            domain: points,
            index,
            hypotheses,
            behaviors,
        })
    }

    pub fn point_index(&self, p: &DomainPoint) -> Result<usize> {
        self.index.get(p).copied().ok_or_else(|| Error::DomainMismatch {
            point: p.to_string(),
            context: "restricted domain".into(),
        })
    }
}

/// Size of the largest shattered subset of `domain`.
pub fn vc_dimension(class: &dyn HypothesisClass, domain: &[DomainPoint]) -> Result<usize> {
    let r = Restriction::new(class, domain)?;
    Ok(vc_of_rows(&r.behaviors, r.domain.len()))
}

/// VC dimension of a family of labelings given as rows over `n` columns.
pub fn vc_of_rows(rows: &[Vec<bool>], n: usize) -> usize {
    let mut best = 0;
    for k in 1..=n {
        if rows.len() < (1usize << k.min(63)) {
            break;
        }
        if !some_subset_shattered(rows, n, k) {
            break;
        }
        best = k;
    }
    best
}

fn some_subset_shattered(rows: &[Vec<bool>], n: usize, k: usize) -> bool {
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let mut seen = std::collections::HashSet::new();
        for row in rows {
            let key: Vec<bool> = subset.iter().map(|&i| row[i]).collect();
            seen.insert(key);
        }
        if seen.len() == 1usize << k {
            return true;
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if subset[i] < n - k + i {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// A loss value, exact whenever the masses were exact.
#[derive(Clone, Debug, PartialEq)]
pub enum Loss {
    Exact(BigRational),
    Float(f64),
}

impl Loss {
    pub fn to_f64(&self) -> f64 {
        match self {
            Loss::Exact(r) => ratio_to_f64(r),
            Loss::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Loss::Exact(r) => Some(r),
            Loss::Float(_) => None,
        }
    }
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Loss::Exact(r) => write!(f, "{r}"),
            Loss::Float(x) => write!(f, "{x}"),
        }
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Both parts overflow f64: scale down by a common power of two.
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
        let q = (r.denom() >> shift).to_f64().unwrap_or(1.0);
        n / q
    })
}

#[derive(Clone, Debug)]
enum Masses {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// A distribution over labeled examples with finitely many atoms.
#[derive(Clone, Debug)]
pub struct FiniteSupportDistribution {
    atoms: Vec<LabeledExample>,
    masses: Masses,
    cumulative: Vec<f64>,
}

impl FiniteSupportDistribution {
    pub fn exact(atoms: Vec<(LabeledExample, BigRational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Invalid("distribution needs at least one atom".into()));
        }
        let mut total = BigRational::zero();
        for (_, m) in &atoms {
            if m.is_negative() {
                return Err(Error::Invalid(format!("negative mass {m}")));
            }
            total += m;
        }
        if !total.is_one() {
            return Err(Error::Invalid(format!("masses sum to {total}, not 1")));
        }
        let (atoms, masses): (Vec<_>, Vec<_>) = atoms.into_iter().unzip();
        let floats: Vec<f64> = masses.iter().map(ratio_to_f64).collect();
        Ok(FiniteSupportDistribution {
            atoms,
            cumulative: cumulative(&floats),
            masses: Masses::Exact(masses),
        })
    }

    pub fn float(atoms: Vec<(LabeledExample, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Invalid("distribution needs at least one atom".into()));
        }
        let total: f64 = atoms.iter().map(|(_, m)| *m).sum();
        if atoms.iter().any(|(_, m)| !(*m >= 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("float masses sum to {total}")));
        }
        let (atoms, masses): (Vec<_>, Vec<_>) = atoms.into_iter().unzip();
        Ok(FiniteSupportDistribution {
            atoms,
            cumulative: cumulative(&masses),
            masses: Masses::Float(masses),
        })
    }

    /// Equal exact mass on every atom.
    pub fn uniform(atoms: Vec<LabeledExample>) -> Result<Self> {
        let m = BigRational::new(BigInt::one(), BigInt::from(atoms.len().max(1)));
        Self::exact(atoms.into_iter().map(|a| (a, m.clone())).collect())
    }

    pub fn atoms(&self) -> &[LabeledExample] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.masses, Masses::Exact(_))
    }

    pub fn exact_mass(&self, i: usize) -> Option<&BigRational> {
        match &self.masses {
            Masses::Exact(m) => Some(&m[i]),
            Masses::Float(_) => None,
        }
    }

    pub fn mass_f64(&self, i: usize) -> f64 {
        match &self.masses {
            Masses::Exact(m) => ratio_to_f64(&m[i]),
            Masses::Float(m) => m[i],
        }
    }

    pub fn sample_index(&self, rng: &mut dyn RngCore) -> usize {
        let u: f64 = rng.gen();
        let total = *self.cumulative.last().unwrap();
        let target = u * total;
        let i = self.cumulative.partition_point(|&c| c <= target);
        // Skip zero-mass atoms that share the boundary.
        let mut i = i.min(self.atoms.len() - 1);
        while self.mass_f64(i) == 0.0 && i + 1 < self.atoms.len() {
            i += 1;
        }
        i
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> LabeledExample {
        self.atoms[self.sample_index(rng)].clone()
    }

    pub fn sample_n(&self, n: usize, rng: &mut dyn RngCore) -> Vec<LabeledExample> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    /// Sum of masses over atoms selected by `pick`.
    pub fn mass_where(&self, mut pick: impl FnMut(usize) -> Result<bool>) -> Result<Loss> {
        match &self.masses {
            Masses::Exact(m) => {
                let mut acc = BigRational::zero();
                for (i, mi) in m.iter().enumerate() {
                    if pick(i)? {
                        acc += mi;
                    }
                }
                Ok(Loss::Exact(acc))
            }
            Masses::Float(m) => {
                let mut acc = 0.0;
                for (i, mi) in m.iter().enumerate() {
                    if pick(i)? {
                        acc += mi;
                    }
                }
                Ok(Loss::Float(acc))
            }
        }
    }
}

fn cumulative(masses: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    masses
        .iter()
        .map(|m| {
            acc += m;
            acc
        })
        .collect()
}

/// Probability mass of atoms the classifier mislabels.
pub fn zero_one_loss(h: &dyn Classifier, dist: &FiniteSupportDistribution) -> Result<Loss> {
    let atoms = dist.atoms();
    dist.mass_where(|i| Ok(h.predict(&atoms[i].point)? != atoms[i].label))
}

/// Fraction of sample examples the classifier mislabels.
pub fn empirical_loss(h: &dyn Classifier, sample: &[LabeledExample]) -> Result<Rational> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut wrong = 0i64;
    for ex in sample {
        if h.predict(&ex.point)? != ex.label {
            wrong += 1;
        }
    }
    Ok(Rational::new(wrong, sample.len() as i64))
}

pub fn big(n: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(q))
}
