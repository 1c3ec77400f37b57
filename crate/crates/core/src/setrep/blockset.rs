use std::cmp::Ordering;

use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::block::{Block, IndexBound};
use super::SetError;
use crate::lexgroup::{GroupElement, Rational};
use crate::semilinear::IndexSet;

const MAX_RESOLUTIONS: usize = 20_000;

/// A finite union of pairwise separated blocks, ordered by position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BlockSetJson", into = "BlockSetJson")]
pub struct BlockSet {
    rank: usize,
    nonneg: bool,
    blocks: Vec<Block>,
}

#[derive(Serialize, Deserialize)]
struct BlockSetJson {
    #[serde(default = "format_tag")]
    format: String,
    rank: usize,
    #[serde(default)]
    nonneg: bool,
    blocks: Vec<Block>,
}

fn format_tag() -> String {
    "blockset-v1".into()
}

impl TryFrom<BlockSetJson> for BlockSet {
    type Error = SetError;
    fn try_from(j: BlockSetJson) -> Result<Self, SetError> {
        BlockSet::validate(j.rank, j.nonneg, j.blocks)
    }
}

impl From<BlockSet> for BlockSetJson {
    fn from(s: BlockSet) -> Self {
        BlockSetJson { format: format_tag(), rank: s.rank, nonneg: s.nonneg, blocks: s.blocks }
    }
}

fn order(a: &Block, b: &Block) -> Ordering {
    if a.precedes(b) {
        Ordering::Less
    } else if b.precedes(a) {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

impl BlockSet {
    /// Drops empty blocks, checks ranks and separation, and sorts.
    pub fn validate(rank: usize, nonneg: bool, blocks: Vec<Block>) -> Result<Self, SetError> {
        crate::lexgroup::check_rank(rank)?;
        let blocks: Vec<Block> = blocks.into_iter().filter(|b| !b.is_empty()).collect();
        for b in &blocks {
            if b.rank() != rank {
                return Err(SetError::RankMismatch { expected: rank, found: b.rank() });
            }
        }
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                if order(&blocks[i], &blocks[j]) == Ordering::Equal {
                    return Err(SetError::Overlap { first: i, second: j });
                }
            }
        }
        let mut blocks = blocks;
        blocks.sort_by(order);
        let s = BlockSet { rank, nonneg, blocks };
        if nonneg {
            if let Some(b) = s.blocks.first() {
                if !b.all_ge(&GroupElement::zero(rank)) {
                    return Err(SetError::NotNonNegative);
                }
            }
        }
        Ok(s)
    }

    pub fn empty(rank: usize) -> Self {
        BlockSet { rank, nonneg: false, blocks: Vec::new() }
    }

    pub fn single(block: Block) -> Self {
        Self::validate(block.rank(), false, vec![block]).unwrap()
    }

    /// A finite set of points.
    pub fn from_points(rank: usize, points: impl IntoIterator<Item = GroupElement>) -> Result<Self, SetError> {
        let mut pts: Vec<GroupElement> = points.into_iter().collect();
        pts.sort();
        pts.dedup();
        Self::validate(rank, false, pts.into_iter().map(Block::point).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nonneg(&self) -> bool {
        self.nonneg
    }

    pub fn with_nonneg(mut self, flag: bool) -> Result<Self, SetError> {
        self.nonneg = flag;
        Self::validate(self.rank, flag, self.blocks)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.iter().all(|b| b.indices().is_finite())
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.blocks.iter().any(|b| b.contains(x))
    }

    pub fn min(&self) -> Option<GroupElement> {
        self.blocks.first().and_then(|b| b.min())
    }

    pub fn max(&self) -> Option<GroupElement> {
        self.blocks.last().and_then(|b| b.max())
    }

    /// All elements of a finite set, ascending.
    pub fn elements(&self) -> Result<Vec<GroupElement>, SetError> {
        let mut out = Vec::new();
        for b in &self.blocks {
            let (lo, hi) = (b.indices().min().map_err(|_| SetError::Infinite)?, b.indices().max().map_err(|_| SetError::Infinite)?);
            out.extend(b.indices().elements_in(lo, hi).into_iter().map(|k| b.element(k)));
        }
        Ok(out)
    }

    pub fn len(&self) -> Result<usize, SetError> {
        self.blocks.iter().map(|b| b.indices().len().map_err(|_| SetError::Infinite)).sum()
    }

    /// The first `n` elements that are `≥ from`.
    pub fn enumerate_window(&self, from: &GroupElement, n: usize) -> Result<Vec<GroupElement>, SetError> {
        let mut out = Vec::with_capacity(n);
        for b in &self.blocks {
            if out.len() >= n {
                break;
            }
            let start = match b.first_index(from, false) {
                IndexBound::Never => continue,
                IndexBound::At(k) => b.indices().first_ge(k),
                IndexBound::All => match b.indices().min() {
                    Ok(k) => Some(k),
                    Err(_) => return Err(SetError::NoLeastElement { from: from.clone() }),
                },
            };
            let Some(k) = start else { continue };
            out.extend(b.indices().enumerate(k, n - out.len()).into_iter().map(|k| b.element(k)));
        }
        Ok(out)
    }

    /// Largest element `≤ x` (`< x` when `strict`), when it exists and is attained.
    pub fn last_below(&self, x: &GroupElement, strict: bool) -> Option<GroupElement> {
        for b in self.blocks.iter().rev() {
            let ks = match b.first_index(x, !strict) {
                IndexBound::All => continue,
                IndexBound::Never => b.indices().clone(),
                IndexBound::At(k) => b.indices().restrict(None, Some(k - 1)),
            };
            if !ks.is_empty() {
                return ks.max().ok().map(|k| b.element(k));
            }
        }
        None
    }

    /// Up to `n` elements taken from each block around its most typical index.
    pub fn sample(&self, n: usize) -> Vec<GroupElement> {
        let mut out = Vec::new();
        for b in &self.blocks {
            let k = &b.indices();
            let (lo, hi) = k.window();
            let p = k.period();
            let ks = k.elements_in(lo - 2 * p, hi + 2 * p);
            let ks = if ks.is_empty() { k.enumerate(lo, n) } else { ks };
            out.extend(ks.into_iter().take(n).map(|i| b.element(i)));
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn translate(&self, c: &GroupElement) -> Result<Self, SetError> {
        if c.rank() != self.rank {
            return Err(SetError::RankMismatch { expected: self.rank, found: c.rank() });
        }
        Self::validate(self.rank, false, self.blocks.iter().map(|b| b.translate(c)).collect())
    }

    pub fn scale(&self, q: &Rational) -> Result<Self, SetError> {
        if !q.is_positive() {
            return Err(SetError::NonPositiveScale);
        }
        Self::validate(self.rank, self.nonneg, self.blocks.iter().map(|b| b.scale(q)).collect())
    }

    pub fn reflect(&self) -> Self {
        Self::validate(self.rank, false, self.blocks.iter().rev().map(|b| b.reflect()).collect()).unwrap()
    }

    /// Every block simplified to its primitive pattern and thinnest lattice.
    pub fn simplify(&self) -> Self {
        Self::validate(self.rank, self.nonneg, self.blocks.iter().map(|b| b.simplify()).collect()).unwrap()
    }

    pub fn union(&self, other: &BlockSet) -> Result<Self, SetError> {
        if other.rank != self.rank {
            return Err(SetError::RankMismatch { expected: self.rank, found: other.rank });
        }
        let mut blocks: Vec<Block> = self.blocks.iter().chain(&other.blocks).cloned().collect();
        for _ in 0..MAX_RESOLUTIONS {
            let clash = (0..blocks.len())
                .flat_map(|i| (i + 1..blocks.len()).map(move |j| (i, j)))
                .find(|&(i, j)| order(&blocks[i], &blocks[j]) == Ordering::Equal);
            let Some((i, j)) = clash else {
                let out = Self::validate(self.rank, false, blocks)?;
                let nonneg = self.nonneg && other.nonneg;
                return Ok(BlockSet { nonneg, ..out });
            };
            let b = blocks.remove(j);
            let a = blocks.remove(i);
            let resolved = resolve(&a, &b)?;
            blocks.extend(resolved.into_iter().filter(|b| !b.is_empty()));
        }
        Err(SetError::NotRepresentable { sample: self.union_sample(other) })
    }

    fn union_sample(&self, other: &BlockSet) -> Vec<GroupElement> {
        let mut s = self.sample(6);
        s.extend(other.sample(6));
        s.sort();
        s.dedup();
        s
    }
}

/// Replaces two overlapping blocks by separated pieces with the same union.
fn resolve(a: &Block, b: &Block) -> Result<Vec<Block>, SetError> {
    if a.indices().is_finite() {
        return Ok(split_at_points(a, b));
    }
    if b.indices().is_finite() {
        return Ok(split_at_points(b, a));
    }
    let (sa, sb) = (a.sigma(), b.sigma());
    let not_rep = || SetError::NotRepresentable {
        sample: {
            let mut s = BlockSet { rank: a.rank(), nonneg: false, blocks: vec![a.clone()] }.sample(6);
            s.extend(BlockSet { rank: b.rank(), nonneg: false, blocks: vec![b.clone()] }.sample(6));
            s.sort();
            s
        },
    };
    match sa.lead().cmp(&sb.lead()) {
        Ordering::Less => Ok(split_around_galaxy(a, b)),
        Ordering::Greater => Ok(split_around_galaxy(b, a)),
        Ordering::Equal => {
            let Ok(q) = sa.rational_ratio(sb) else {
                return Err(not_rep());
            };
            let same_galaxy = (b.base() - a.base()).lead().map_or(true, |l| l >= sa.lead().unwrap());
            if !same_galaxy {
                return Err(not_rep());
            }
            merge_commensurable(a, b, &q).map(|x| vec![x]).ok_or_else(not_rep)
        }
    }
}

/// Points of the finite block `f` outside `b` become singletons, and `b` is
/// cut around each of them.
fn split_at_points(f: &Block, b: &Block) -> Vec<Block> {
    let ks = f.indices();
    let mut pts: Vec<GroupElement> = match (ks.min(), ks.max()) {
        (Ok(lo), Ok(hi)) => ks.elements_in(lo, hi).into_iter().map(|k| f.element(k)).collect(),
        _ => Vec::new(),
    };
    pts.retain(|p| !b.contains(p));
    pts.sort();
    let mut out = Vec::new();
    let mut rest = b.clone();
    for p in pts {
        out.push(rest.with_indices(rest.indices_below(&p)));
        rest = rest.with_indices(rest.indices_above(&p));
        out.push(Block::point(p));
    }
    out.push(rest);
    out
}

/// `big` has an Archimedean-larger step than `small`, so only finitely many
/// of its elements fall inside the galaxy holding `small`.
fn split_around_galaxy(big: &Block, small: &Block) -> Vec<Block> {
    let l = small.sigma().lead().unwrap();
    let v = GroupElement::new(small.base().coords()[..l].to_vec()).unwrap();
    let k = big.indices();
    let below = |bound: IndexBound| match bound {
        IndexBound::All => IndexSet::empty(),
        IndexBound::Never => k.clone(),
        IndexBound::At(i) => k.restrict(None, Some(i - 1)),
    };
    let k1 = big.first_index_proj(l, &v, false);
    let k2 = big.first_index_proj(l, &v, true);
    let under = below(k1.clone());
    let upto = below(k2);
    let inside = upto.difference(&under);
    let above = k.difference(&upto);
    let mut out = vec![big.with_indices(under), big.with_indices(above), small.clone()];
    if let (Ok(lo), Ok(hi)) = (inside.min(), inside.max()) {
        out.extend(inside.elements_in(lo, hi).into_iter().map(|i| Block::point(big.element(i))));
    }
    out
}

/// Merges two blocks whose lattices share the common period `a·Σ_A = b·Σ_B`
/// (where `Σ_B = (a/b)·Σ_A`) into a single block.
fn merge_commensurable(a: &Block, b: &Block, q: &Rational) -> Option<Block> {
    let num = q.numer().to_i64()?;
    let den = q.denom().to_i64()?;
    let na = num.checked_mul(a.m())?;
    let nb = den.checked_mul(b.m())?;
    if na.max(nb) > 1_000_000 {
        return None;
    }
    let x0 = a.base().clone();
    let IndexBound::At(kb) = b.first_index(&x0, false) else {
        return None;
    };
    let offs_a: Vec<GroupElement> = (0..na).map(|k| &a.element(k) - &x0).collect();
    let offs_b: Vec<GroupElement> = (0..nb).map(|i| &b.element(kb + i) - &x0).collect();
    let mut pts: Vec<GroupElement> = offs_a.iter().chain(&offs_b).cloned().collect();
    pts.sort();
    pts.dedup();
    let period = a.sigma().mul_i64(num);
    debug_assert!(q.is_one() || period == b.sigma().mul_i64(den));
    let n = pts.len() as i64;
    let mut pattern: Vec<GroupElement> = pts.windows(2).map(|w| &w[1] - &w[0]).collect();
    pattern.push(&(&pts[0] + &period) - pts.last().unwrap());
    let pos = |x: &GroupElement| pts.binary_search(x).unwrap() as i64;
    let pos_a: Vec<i64> = offs_a.iter().map(pos).collect();
    let pos_b: Vec<i64> = offs_b.iter().map(pos).collect();
    let ka = a.indices().image_periodic(na, n, |k| k.div_euclid(na) * n + pos_a[k.rem_euclid(na) as usize]);
    let kb_set = b
        .indices()
        .image_periodic(nb, n, |k| (k - kb).div_euclid(nb) * n + pos_b[(k - kb).rem_euclid(nb) as usize]);
    let merged = Block::new(x0, pattern, ka.union(&kb_set)).ok()?;
    Some(merged.simplify())
}
