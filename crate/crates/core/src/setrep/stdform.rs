use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{Block, BlockSet, SetError};
use crate::lexgroup::{rational_string, GroupElement, Rational};
use crate::semilinear::IndexSet;

const MAX_LATTICE_BLOCK: i64 = 100_000;

/// Shape of one family: `{w + λ}` or `(w + λ₀, w + λ₁)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AtomKind {
    Point {
        #[serde(with = "rational_string")]
        lambda: Rational,
    },
    Interval {
        #[serde(with = "rational_string")]
        lo: Rational,
        #[serde(with = "rational_string")]
        hi: Rational,
    },
}

/// A family `⋃_{w ∈ W}` of translated points or open intervals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(flatten)]
    pub kind: AtomKind,
    pub w: IndexSet,
}

impl Atom {
    pub fn point(w: IndexSet, lambda: Rational) -> Self {
        Atom { kind: AtomKind::Point { lambda }, w }
    }

    pub fn interval(w: IndexSet, lo: Rational, hi: Rational) -> Self {
        Atom { kind: AtomKind::Interval { lo, hi }, w }
    }
}

/// One-variable sets over `⟨ℝ, +, <, ℤ⟩` with rational offsets.
///
/// Stored as a partition of `[0, 1)` into breakpoints and the open gaps
/// between them, each labelled with the integers `w` it is taken at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StdFormJson", into = "StdFormJson")]
pub struct StdForm {
    breaks: Vec<Rational>,
    at_point: Vec<IndexSet>,
    after: Vec<IndexSet>,
}

#[derive(Serialize, Deserialize)]
struct StdFormJson {
    #[serde(default = "format_tag")]
    format: String,
    families: Vec<Atom>,
}

fn format_tag() -> String {
    "stdform-v1".into()
}

impl TryFrom<StdFormJson> for StdForm {
    type Error = SetError;
    fn try_from(j: StdFormJson) -> Result<Self, SetError> {
        StdForm::new(j.families)
    }
}

impl From<StdForm> for StdFormJson {
    fn from(s: StdForm) -> Self {
        StdFormJson { format: format_tag(), families: s.families() }
    }
}

fn index_contains(w: &IndexSet, n: &BigInt) -> bool {
    match n.to_i64() {
        Some(k) if k.abs() < i64::MAX / 4 => w.contains(k),
        _ => {
            let p = BigInt::from(w.period());
            let r = n.mod_floor(&p).to_i64().unwrap();
            let tail = if n.is_positive() { w.hi() } else { w.lo() };
            tail.is_some_and(|t| t.residues.contains(&r))
        }
    }
}

impl StdForm {
    pub fn new(families: Vec<Atom>) -> Result<Self, SetError> {
        let zero = Rational::zero();
        let one = Rational::one();
        let mut cuts: BTreeSet<Rational> = BTreeSet::from([zero.clone()]);
        for f in &families {
            match &f.kind {
                AtomKind::Point { lambda } => {
                    if lambda < &zero || lambda >= &one {
                        return Err(SetError::BadFamily(format!("offset {lambda} outside [0,1)")));
                    }
                    cuts.insert(lambda.clone());
                }
                AtomKind::Interval { lo, hi } => {
                    if lo < &zero || hi > &one || lo >= hi {
                        return Err(SetError::BadFamily(format!("interval ({lo},{hi}) outside [0,1]")));
                    }
                    cuts.insert(lo.clone());
                    if hi < &one {
                        cuts.insert(hi.clone());
                    }
                }
            }
        }
        let breaks: Vec<Rational> = cuts.into_iter().collect();
        let n = breaks.len();
        let mut at_point = vec![IndexSet::empty(); n];
        let mut after = vec![IndexSet::empty(); n];
        for f in &families {
            match &f.kind {
                AtomKind::Point { lambda } => {
                    let i = breaks.binary_search(lambda).unwrap();
                    at_point[i] = at_point[i].union(&f.w);
                }
                AtomKind::Interval { lo, hi } => {
                    for i in 0..n {
                        let right = breaks.get(i + 1).unwrap_or(&one);
                        if &breaks[i] > lo && &breaks[i] < hi {
                            at_point[i] = at_point[i].union(&f.w);
                        }
                        if &breaks[i] >= lo && right <= hi {
                            after[i] = after[i].union(&f.w);
                        }
                    }
                }
            }
        }
        Ok(StdForm { breaks, at_point, after }.normalized())
    }

    pub fn empty() -> Self {
        StdForm { breaks: vec![Rational::zero()], at_point: vec![IndexSet::empty()], after: vec![IndexSet::empty()] }
    }

    pub fn line() -> Self {
        StdForm { breaks: vec![Rational::zero()], at_point: vec![IndexSet::all()], after: vec![IndexSet::all()] }
    }

    fn normalized(mut self) -> Self {
        let mut i = 1;
        while i < self.breaks.len() {
            if self.after[i - 1] == self.at_point[i] && self.at_point[i] == self.after[i] {
                self.breaks.remove(i);
                self.at_point.remove(i);
                self.after.remove(i);
            } else {
                i += 1;
            }
        }
        self
    }

    /// The same set over a finer list of breakpoints.
    fn refine(&self, breaks: &[Rational]) -> (Vec<IndexSet>, Vec<IndexSet>) {
        let mut at_point = Vec::with_capacity(breaks.len());
        let mut after = Vec::with_capacity(breaks.len());
        for b in breaks {
            match self.breaks.binary_search(b) {
                Ok(i) => {
                    at_point.push(self.at_point[i].clone());
                    after.push(self.after[i].clone());
                }
                Err(i) => {
                    at_point.push(self.after[i - 1].clone());
                    after.push(self.after[i - 1].clone());
                }
            }
        }
        (at_point, after)
    }

    fn combine(&self, other: &StdForm, op: impl Fn(&IndexSet, &IndexSet) -> IndexSet) -> StdForm {
        let breaks: Vec<Rational> =
            self.breaks.iter().chain(&other.breaks).cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let (pa, aa) = self.refine(&breaks);
        let (pb, ab) = other.refine(&breaks);
        let at_point = pa.iter().zip(&pb).map(|(x, y)| op(x, y)).collect();
        let after = aa.iter().zip(&ab).map(|(x, y)| op(x, y)).collect();
        StdForm { breaks, at_point, after }.normalized()
    }

    pub fn union(&self, other: &StdForm) -> StdForm {
        self.combine(other, IndexSet::union)
    }

    pub fn intersect(&self, other: &StdForm) -> StdForm {
        self.combine(other, IndexSet::intersect)
    }

    pub fn difference(&self, other: &StdForm) -> StdForm {
        self.combine(other, IndexSet::difference)
    }

    pub fn complement(&self) -> StdForm {
        StdForm {
            breaks: self.breaks.clone(),
            at_point: self.at_point.iter().map(IndexSet::complement).collect(),
            after: self.after.iter().map(IndexSet::complement).collect(),
        }
        .normalized()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let w = x.floor().to_integer();
        let f = x - Rational::from_integer(w.clone());
        match self.breaks.binary_search(&f) {
            Ok(i) => index_contains(&self.at_point[i], &w),
            Err(i) => index_contains(&self.after[i - 1], &w),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.at_point.iter().chain(&self.after).all(IndexSet::is_empty)
    }

    /// Canonical point families followed by maximal interval families.
    pub fn families(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        for (b, w) in self.breaks.iter().zip(&self.at_point) {
            if !w.is_empty() {
                out.push(Atom::point(w.clone(), b.clone()));
            }
        }
        let n = self.breaks.len();
        let mut i = 0;
        while i < n {
            let w = &self.after[i];
            if w.is_empty() {
                i += 1;
                continue;
            }
            let mut j = i + 1;
            while j < n && self.at_point[j] == *w && self.after[j] == *w {
                j += 1;
            }
            let hi = self.breaks.get(j).cloned().unwrap_or_else(Rational::one);
            out.push(Atom::interval(w.clone(), self.breaks[i].clone(), hi));
            i = j;
        }
        out
    }

    /// Splits into the point families and the interval families.
    pub fn split(&self) -> (StdForm, StdForm) {
        let n = self.breaks.len();
        let discrete = StdForm {
            breaks: self.breaks.clone(),
            at_point: self.at_point.clone(),
            after: vec![IndexSet::empty(); n],
        }
        .normalized();
        let open =
            StdForm { breaks: self.breaks.clone(), at_point: vec![IndexSet::empty(); n], after: self.after.clone() }
                .normalized();
        (discrete, open)
    }

    pub fn is_discrete(&self) -> bool {
        self.after.iter().all(IndexSet::is_empty)
    }

    pub fn to_blockset(&self) -> Result<BlockSet, SetError> {
        if !self.is_discrete() {
            return Err(SetError::NotDiscrete);
        }
        let mut out = BlockSet::empty(1);
        for (b, w) in self.breaks.iter().zip(&self.at_point) {
            if w.is_empty() {
                continue;
            }
            let base = GroupElement::new(vec![b.clone()])?;
            let block = Block::new(base, vec![GroupElement::from_ints(&[1])], w.clone())?.simplify();
            out = out.union(&BlockSet::single(block))?;
        }
        Ok(out.simplify())
    }

    pub fn from_blockset(d: &BlockSet) -> Result<StdForm, SetError> {
        if d.rank() != 1 {
            return Err(SetError::RankMismatch { expected: 1, found: d.rank() });
        }
        let mut families = Vec::new();
        for blk in d.blocks() {
            let s = blk.sigma().coord(0).clone();
            let (a, b) = (s.numer().to_i64(), s.denom().to_i64());
            let (Some(a), Some(b)) = (a, b) else {
                return Err(SetError::NotLatticeAligned);
            };
            let m = blk.m();
            if b.saturating_mul(m) > MAX_LATTICE_BLOCK {
                return Err(SetError::NotLatticeAligned);
            }
            let cycle = b * m;
            for r in 0..cycle {
                let v = blk.element(r).coord(0).clone();
                let fl = v.floor();
                let lambda = &v - &fl;
                let Some(fl) = fl.to_integer().to_i64() else {
                    return Err(SetError::NotLatticeAligned);
                };
                let c = blk.indices().affine_preimage(r, cycle);
                if c.is_empty() {
                    continue;
                }
                let w = c.image_periodic(1, a, |k| fl + a * k);
                families.push(Atom::point(w, lambda));
            }
        }
        StdForm::new(families)
    }
}
