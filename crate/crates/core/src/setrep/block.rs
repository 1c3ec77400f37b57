use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::SetError;
use crate::lexgroup::{GroupElement, Quotient, Rational};
use crate::semilinear::{gcd, IndexSet};

/// Where the first index satisfying an order condition lies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexBound {
    /// Every index satisfies it.
    All,
    At(i64),
    /// No index satisfies it.
    Never,
}

/// Lower or upper extent of a block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extent {
    Point(GroupElement),
    /// Unbounded run of elements through `anchor` moving by multiples of `step`.
    Ray { anchor: GroupElement, step: GroupElement },
}

/// `{base + ⌊k/m⌋·Σ + prefix(k mod m) : k ∈ indices}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BlockJson", into = "BlockJson")]
pub struct Block {
    base: GroupElement,
    pattern: Vec<GroupElement>,
    indices: IndexSet,
    prefix: Vec<GroupElement>,
}

#[derive(Serialize, Deserialize)]
struct BlockJson {
    base: GroupElement,
    pattern: Vec<GroupElement>,
    indices: IndexSet,
}

impl TryFrom<BlockJson> for Block {
    type Error = SetError;
    fn try_from(j: BlockJson) -> Result<Self, SetError> {
        Block::new(j.base, j.pattern, j.indices)
    }
}

impl From<Block> for BlockJson {
    fn from(b: Block) -> Self {
        BlockJson { base: b.base, pattern: b.pattern, indices: b.indices }
    }
}

fn project(x: &GroupElement, l: usize) -> GroupElement {
    GroupElement::new(x.coords()[..l].to_vec()).expect("projection rank")
}

fn big_to_index(c: &BigInt) -> Option<i64> {
    c.to_i64().filter(|v| v.abs() < i64::MAX / 4)
}

impl Block {
    pub fn new(base: GroupElement, pattern: Vec<GroupElement>, indices: IndexSet) -> Result<Self, SetError> {
        if pattern.is_empty() {
            return Err(SetError::EmptyPattern);
        }
        for p in &pattern {
            if p.rank() != base.rank() {
                return Err(SetError::RankMismatch { expected: base.rank(), found: p.rank() });
            }
            if !p.is_positive() {
                return Err(SetError::NonPositiveLetter(p.clone()));
            }
        }
        let mut prefix = Vec::with_capacity(pattern.len() + 1);
        prefix.push(GroupElement::zero(base.rank()));
        for p in &pattern {
            let next = prefix.last().unwrap() + p;
            prefix.push(next);
        }
        Ok(Block { base, pattern, indices, prefix })
    }

    /// The one-element block `{p}`.
    pub fn point(p: GroupElement) -> Self {
        let r = p.rank();
        Block::new(p, vec![GroupElement::unit(r, r - 1)], IndexSet::singleton(0)).unwrap()
    }

    pub fn base(&self) -> &GroupElement {
        &self.base
    }

    pub fn pattern(&self) -> &[GroupElement] {
        &self.pattern
    }

    pub fn indices(&self) -> &IndexSet {
        &self.indices
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    pub fn m(&self) -> i64 {
        self.pattern.len() as i64
    }

    /// Σ pattern.
    pub fn sigma(&self) -> &GroupElement {
        &self.prefix[self.pattern.len()]
    }

    pub fn with_indices(&self, indices: IndexSet) -> Block {
        Block { indices, ..self.clone() }
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn element(&self, k: i64) -> GroupElement {
        let m = self.m();
        let c = k.div_euclid(m);
        let j = k.rem_euclid(m) as usize;
        &(&self.base + &self.sigma().mul_i64(c)) + &self.prefix[j]
    }

    /// `element(k2) − element(k1)`.
    pub fn span(&self, k1: i64, k2: i64) -> GroupElement {
        &self.element(k2) - &self.element(k1)
    }

    fn contains_index_big(&self, k: &BigInt) -> bool {
        match big_to_index(k) {
            Some(k) => self.indices.contains(k),
            None => {
                let p = BigInt::from(self.indices.period());
                let r = ((k % &p) + &p) % &p;
                let r = r.to_i64().unwrap();
                let tail = if k > &BigInt::zero() { self.indices.hi() } else { self.indices.lo() };
                tail.is_some_and(|t| t.residues.contains(&r))
            }
        }
    }

    /// The lattice index of `x`, ignoring the index set.
    pub fn lattice_index(&self, x: &GroupElement) -> Option<BigInt> {
        let d = x - &self.base;
        let Quotient::Finite(c) = d.floor_div(self.sigma()) else {
            return None;
        };
        let rem = &d - &self.sigma().mul_int(&c);
        let j = self.prefix[..self.pattern.len()].iter().position(|p| *p == rem)?;
        Some(c * self.m() + j)
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.rank() == self.rank() && self.lattice_index(x).is_some_and(|k| self.contains_index_big(&k))
    }

    /// First lattice index whose element, projected to the first `l`
    /// coordinates, is `≥ v` (or `> v` when `strict`).
    pub fn first_index_proj(&self, l: usize, v: &GroupElement, strict: bool) -> IndexBound {
        let ok = |val: &GroupElement| if strict { val > v } else { val >= v };
        let pb = project(&self.base, l);
        let ps = project(self.sigma(), l);
        if ps.is_zero() {
            return if ok(&pb) { IndexBound::All } else { IndexBound::Never };
        }
        match (v - &pb).floor_div(&ps) {
            Quotient::PlusInfinity => IndexBound::Never,
            Quotient::MinusInfinity => IndexBound::All,
            Quotient::Finite(c) => {
                let start = &pb + &ps.mul_int(&c);
                let m = self.pattern.len();
                let j = (0..m).find(|&j| ok(&(&start + &project(&self.prefix[j], l)))).unwrap_or(m);
                match big_to_index(&(c * self.m() + j)) {
                    Some(k) => IndexBound::At(k),
                    None if v > &pb => IndexBound::Never,
                    None => IndexBound::All,
                }
            }
        }
    }

    /// First lattice index with element `≥ x` (`> x` when `strict`).
    pub fn first_index(&self, x: &GroupElement, strict: bool) -> IndexBound {
        self.first_index_proj(self.rank(), x, strict)
    }

    /// Index set restricted to lattice indices with element `< x`.
    pub fn indices_below(&self, x: &GroupElement) -> IndexSet {
        match self.first_index(x, false) {
            IndexBound::All => IndexSet::empty(),
            IndexBound::Never => self.indices.clone(),
            IndexBound::At(k) => self.indices.restrict(None, Some(k - 1)),
        }
    }

    /// Index set restricted to lattice indices with element `> x`.
    pub fn indices_above(&self, x: &GroupElement) -> IndexSet {
        match self.first_index(x, true) {
            IndexBound::All => self.indices.clone(),
            IndexBound::Never => IndexSet::empty(),
            IndexBound::At(k) => self.indices.restrict(Some(k), None),
        }
    }

    /// Some member index, preferring the periodic region.
    fn some_index(&self) -> Option<i64> {
        let (lo, hi) = self.indices.window();
        self.indices.first_ge(hi + 1).or_else(|| self.indices.last_le(lo - 1)).or_else(|| self.indices.first_ge(lo))
    }

    pub fn min(&self) -> Option<GroupElement> {
        self.indices.min().ok().map(|k| self.element(k))
    }

    pub fn max(&self) -> Option<GroupElement> {
        self.indices.max().ok().map(|k| self.element(k))
    }

    pub fn lower(&self) -> Option<Extent> {
        if self.indices.is_empty() {
            return None;
        }
        Some(match self.min() {
            Some(m) => Extent::Point(m),
            None => Extent::Ray { anchor: self.element(self.some_index()?), step: self.sigma().clone() },
        })
    }

    pub fn upper(&self) -> Option<Extent> {
        if self.indices.is_empty() {
            return None;
        }
        Some(match self.max() {
            Some(m) => Extent::Point(m),
            None => Extent::Ray { anchor: self.element(self.some_index()?), step: self.sigma().clone() },
        })
    }

    /// Every element is `< y`.
    pub fn all_lt(&self, y: &GroupElement) -> bool {
        match self.upper() {
            None => true,
            Some(Extent::Point(m)) => m < *y,
            Some(Extent::Ray { anchor, step }) => {
                let d = y - &anchor;
                d.is_positive() && d.lead() < step.lead()
            }
        }
    }

    /// Every element is `> y`.
    pub fn all_gt(&self, y: &GroupElement) -> bool {
        match self.lower() {
            None => true,
            Some(Extent::Point(m)) => m > *y,
            Some(Extent::Ray { anchor, step }) => {
                let d = &anchor - y;
                d.is_positive() && d.lead() < step.lead()
            }
        }
    }

    /// Every element is `≥ y`.
    pub fn all_ge(&self, y: &GroupElement) -> bool {
        match self.lower() {
            Some(Extent::Point(m)) => m >= *y,
            _ => self.all_gt(y),
        }
    }

    /// Every element of `self` lies below every element of `other`.
    pub fn precedes(&self, other: &Block) -> bool {
        match (self.upper(), other.lower()) {
            (None, _) | (_, None) => true,
            (Some(Extent::Point(a)), _) => other.all_gt(&a),
            (_, Some(Extent::Point(b))) => self.all_lt(&b),
            (Some(Extent::Ray { anchor: a, step: s }), Some(Extent::Ray { anchor: b, step: t })) => {
                let d = &b - &a;
                d.is_positive() && d.lead() < s.lead() && d.lead() < t.lead()
            }
        }
    }

    pub fn translate(&self, c: &GroupElement) -> Block {
        Block::new(&self.base + c, self.pattern.clone(), self.indices.clone()).unwrap()
    }

    pub fn scale(&self, q: &Rational) -> Block {
        Block::new(self.base.scale(q), self.pattern.iter().map(|p| p.scale(q)).collect(), self.indices.clone())
            .unwrap()
    }

    pub fn reflect(&self) -> Block {
        let mut pattern = self.pattern.clone();
        pattern.reverse();
        Block::new(-&self.base, pattern, negate_indices(&self.indices)).unwrap()
    }

    /// Replaces the pattern by its primitive root and thins the lattice to
    /// the smallest step containing every index.
    pub fn simplify(&self) -> Block {
        let root = crate::structure::primitive_generator(&self.pattern);
        let b = Block::new(self.base.clone(), root, self.indices.clone()).unwrap();
        let Ok(gaps) = b.indices.gap_sizes() else {
            return match b.indices.min() {
                Ok(k) => Block::new(b.element(k), b.pattern.clone(), IndexSet::singleton(0)).unwrap(),
                Err(_) => b,
            };
        };
        let mut d = gaps.iter().fold(0, |g, &x| gcd(g, x));
        if !b.indices.is_finite() {
            d = gcd(d, b.indices.period());
        }
        let r0 = b
            .indices
            .min()
            .ok()
            .or_else(|| b.indices.first_ge(0))
            .or_else(|| b.indices.max().ok())
            .expect("nonempty");
        let m = b.m();
        let m2 = m / gcd(m, d);
        let pattern: Vec<GroupElement> = (0..m2).map(|i| b.span(r0 + i * d, r0 + (i + 1) * d)).collect();
        let root = crate::structure::primitive_generator(&pattern);
        Block::new(b.element(r0), root, b.indices.affine_preimage(r0, d)).unwrap()
    }
}

pub fn negate_indices(s: &IndexSet) -> IndexSet {
    if s.is_empty() {
        return IndexSet::empty();
    }
    let (lo, hi) = s.window();
    IndexSet::from_fn(-hi, -lo, s.period(), |x| s.contains(-x))
}
