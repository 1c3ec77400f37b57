//! Successors, differences, difference sets and chains of a block set.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexgroup::{ArchClass, GroupElement};
use crate::semilinear::{lcm, IndexSet};
use crate::setrep::{Block, BlockSet, SetError};
use crate::structure::primitive_generator;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalcError {
    #[error("{0} is not a member")]
    NotMember(GroupElement),
    #[error("{0} is maximal")]
    IsMaximal(GroupElement),
    #[error("{0} has no immediate successor")]
    NoImmediateSuccessor(GroupElement),
    #[error("set has fewer than two elements")]
    TooSmall,
    #[error("difference set at stage {stage} has fewer than two elements")]
    Exhausted { stage: usize },
    #[error("chain is finite to the right")]
    FiniteChain,
    #[error(transparent)]
    Set(#[from] SetError),
}

/// A word of differences: `left` repeated leftward, then `middle`, then
/// `right` repeated rightward. A missing tail means that side is finite.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DifferenceWord {
    pub left: Option<Vec<GroupElement>>,
    pub middle: Vec<GroupElement>,
    pub right: Option<Vec<GroupElement>>,
}

impl DifferenceWord {
    pub fn alphabet(&self) -> BTreeSet<GroupElement> {
        self.left.iter().flatten().chain(&self.middle).chain(self.right.iter().flatten()).cloned().collect()
    }

    /// Letter at position `p`, if that position exists.
    pub fn letter(&self, p: i64) -> Option<&GroupElement> {
        let n = self.middle.len() as i64;
        if p < 0 {
            let l = self.left.as_ref()?;
            Some(&l[p.rem_euclid(l.len() as i64) as usize])
        } else if p < n {
            Some(&self.middle[p as usize])
        } else {
            let r = self.right.as_ref()?;
            Some(&r[(p - n).rem_euclid(r.len() as i64) as usize])
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.middle.is_empty() && self.left.is_some() && self.left == self.right
    }
}

/// A chain: an anchor element and the difference word read from it.
///
/// Position `p` holds `anchor + letter(0) + … + letter(p−1)` for `p ≥ 0`,
/// and the mirror image for `p < 0`. Positions run from `0` (or `−∞` with a
/// left tail) to `|middle|` (or `+∞` with a right tail).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainForm {
    pub anchor: GroupElement,
    pub word: DifferenceWord,
}

fn rotate_left<T: Clone>(v: &mut [T]) {
    v.rotate_left(1);
}

fn sum(rank: usize, w: &[GroupElement]) -> GroupElement {
    w.iter().fold(GroupElement::zero(rank), |a, b| &a + b)
}

/// Index of the lexicographically least rotation.
fn least_rotation(w: &[GroupElement]) -> usize {
    (0..w.len())
        .min_by(|&a, &b| {
            let ra = w[a..].iter().chain(&w[..a]);
            let rb = w[b..].iter().chain(&w[..b]);
            ra.cmp(rb)
        })
        .unwrap_or(0)
}

impl ChainForm {
    pub fn rank(&self) -> usize {
        self.anchor.rank()
    }

    pub fn min_position(&self) -> Option<i64> {
        if self.word.left.is_some() {
            None
        } else {
            Some(0)
        }
    }

    pub fn max_position(&self) -> Option<i64> {
        if self.word.right.is_some() {
            None
        } else {
            Some(self.word.middle.len() as i64)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.word.left.is_none() && self.word.right.is_none()
    }

    /// Every position of the chain.
    pub fn positions(&self) -> IndexSet {
        IndexSet::all().restrict(self.min_position(), self.max_position())
    }

    pub fn element(&self, p: i64) -> GroupElement {
        let mut x = self.anchor.clone();
        if p >= 0 {
            for q in 0..p {
                x = &x + self.word.letter(q).expect("position in chain");
            }
        } else {
            for q in p..0 {
                x = &x - self.word.letter(q).expect("position in chain");
            }
        }
        x
    }

    /// Elements at positions `a..=b`.
    pub fn elements(&self, a: i64, b: i64) -> Vec<GroupElement> {
        if a > b {
            return Vec::new();
        }
        let mut x = self.element(a);
        let mut out = vec![x.clone()];
        for p in a..b {
            x = &x + self.word.letter(p).expect("position in chain");
            out.push(x.clone());
        }
        out
    }

    fn normalized(mut self) -> Self {
        let w = &mut self.word;
        if let Some(l) = &mut w.left {
            *l = primitive_generator(l);
        }
        if let Some(r) = &mut w.right {
            *r = primitive_generator(r);
        }
        if let Some(mut l) = w.left.clone() {
            let limit = l.len() + w.right.as_ref().map_or(0, |r| r.len()) + 1;
            let mut rolled_tail = 0;
            loop {
                let first = match (w.middle.first(), &w.right) {
                    (Some(x), _) => x.clone(),
                    (None, Some(r)) => r[0].clone(),
                    (None, None) => break,
                };
                if first != l[0] || rolled_tail > limit {
                    break;
                }
                self.anchor = &self.anchor + &first;
                rotate_left(&mut l);
                if w.middle.is_empty() {
                    rotate_left(w.right.as_mut().unwrap());
                    rolled_tail += 1;
                } else {
                    w.middle.remove(0);
                }
            }
            if rolled_tail > limit {
                w.right = Some(l.clone());
            }
            w.left = Some(l);
        }
        if let Some(r) = &mut w.right {
            while w.middle.last().is_some_and(|x| x == r.last().unwrap()) {
                w.middle.pop();
                r.rotate_right(1);
            }
        }
        if self.word.is_periodic() {
            let r = self.word.right.clone().unwrap();
            let s = least_rotation(&r);
            self.anchor = self.elements(0, s as i64).pop().unwrap();
            let mut rot = r.clone();
            rot.rotate_left(s);
            let sigma = sum(self.rank(), &rot);
            let lead = sigma.lead().unwrap();
            let c = (self.anchor.coord(lead) / sigma.coord(lead)).floor().to_integer();
            self.anchor = &self.anchor - &sigma.mul_int(&c);
            self.word.left = Some(rot.clone());
            self.word.right = Some(rot);
        }
        self
    }

    /// Blocks holding exactly the elements at the given positions.
    pub fn to_blocks(&self, positions: &IndexSet) -> Vec<Block> {
        let rank = self.rank();
        let mid = &self.word.middle;
        let n = mid.len() as i64;
        let p = positions.intersect(&self.positions());
        let mut out = Vec::new();
        if let Some(l) = &self.word.left {
            let t = l.len() as i64;
            let base = &self.anchor - &sum(rank, l);
            let k = p.shift(t).restrict(None, Some(t - 1));
            out.push(Block::new(base, l.clone(), k).unwrap());
        }
        match &self.word.right {
            Some(r) => {
                if !mid.is_empty() {
                    let k = p.restrict(Some(0), Some(n - 1));
                    out.push(Block::new(self.anchor.clone(), mid.clone(), k).unwrap());
                }
                let base = &self.anchor + &sum(rank, mid);
                let k = p.shift(-n).restrict(Some(0), None);
                out.push(Block::new(base, r.clone(), k).unwrap());
            }
            None => {
                if mid.is_empty() {
                    if p.contains(0) {
                        out.push(Block::point(self.anchor.clone()));
                    }
                } else {
                    let k = p.restrict(Some(0), Some(n));
                    out.push(Block::new(self.anchor.clone(), mid.clone(), k).unwrap());
                }
            }
        }
        out.into_iter().filter(|b| !b.is_empty()).map(|b| b.simplify()).collect()
    }

    /// Position of `x`, if it lies on the chain.
    pub fn position_of(&self, x: &GroupElement) -> Option<i64> {
        let mid = &self.word.middle;
        let n = mid.len() as i64;
        if let Some(l) = &self.word.left {
            let t = l.len() as i64;
            let b = Block::new(&self.anchor - &sum(self.rank(), l), l.clone(), IndexSet::le(t - 1)).unwrap();
            if b.contains(x) {
                return b.lattice_index(x).and_then(|k| num_traits::ToPrimitive::to_i64(&k)).map(|k| k - t);
            }
        }
        if !mid.is_empty() {
            let hi = if self.word.right.is_some() { n - 1 } else { n };
            let b = Block::new(self.anchor.clone(), mid.clone(), IndexSet::range(0, hi)).unwrap();
            if b.contains(x) {
                return b.lattice_index(x).and_then(|k| num_traits::ToPrimitive::to_i64(&k));
            }
        } else if self.word.right.is_none() && *x == self.anchor {
            return Some(0);
        }
        if let Some(r) = &self.word.right {
            let b = Block::new(&self.anchor + &sum(self.rank(), mid), r.clone(), IndexSet::naturals()).unwrap();
            if b.contains(x) {
                return b.lattice_index(x).and_then(|k| num_traits::ToPrimitive::to_i64(&k)).map(|k| k + n);
            }
        }
        None
    }
}

/// A maximal run of blocks joined at junctions with a maximum on the left
/// and a minimum on the right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub blocks: Vec<Block>,
}

impl Chain {
    pub fn bounded_below(&self) -> bool {
        self.blocks[0].min().is_some()
    }

    pub fn bounded_above(&self) -> bool {
        self.blocks.last().unwrap().max().is_some()
    }
}

pub fn chain_partition(d: &BlockSet) -> Vec<Chain> {
    let mut out: Vec<Chain> = Vec::new();
    for b in d.blocks() {
        match out.last_mut() {
            Some(c) if c.bounded_above() && b.min().is_some() => c.blocks.push(b.clone()),
            _ => out.push(Chain { blocks: vec![b.clone()] }),
        }
    }
    out
}

fn spans(b: &Block, ks: &[i64]) -> Vec<GroupElement> {
    let els: Vec<GroupElement> = ks.iter().map(|&k| b.element(k)).collect();
    els.windows(2).map(|w| &w[1] - &w[0]).collect()
}

pub fn chain_word(chain: &Chain) -> ChainForm {
    let first = &chain.blocks[0];
    let last_i = chain.blocks.len() - 1;
    let mut left = None;
    let start_k;
    let anchor;
    match first.indices().min() {
        Ok(k) => {
            start_k = k;
            anchor = first.element(k);
        }
        Err(_) => {
            let ks = first.indices();
            let per = lcm(ks.period(), first.m());
            let (lo, _) = ks.window();
            let s0 = ks.first_ge(lo - 3 * per).unwrap();
            let run = ks.elements_in(s0, s0 + per);
            left = Some(spans(first, &run));
            start_k = s0 + per;
            anchor = first.element(start_k);
        }
    }
    let mut middle = Vec::new();
    let mut right = None;
    for (i, b) in chain.blocks.iter().enumerate() {
        let ks = b.indices();
        let from = if i == 0 { start_k } else { ks.min().unwrap() };
        if i > 0 {
            let prev = chain.blocks[i - 1].max().unwrap();
            middle.push(&b.element(from) - &prev);
        }
        match ks.max() {
            Ok(hi) => middle.extend(spans(b, &ks.elements_in(from, hi))),
            Err(_) => {
                debug_assert_eq!(i, last_i);
                let per = lcm(ks.period(), b.m());
                let (_, h) = ks.window();
                let j1 = ks.first_ge(h.max(from) + per).unwrap();
                middle.extend(spans(b, &ks.elements_in(from, j1)));
                right = Some(spans(b, &ks.elements_in(j1, j1 + per)));
            }
        }
    }
    ChainForm { anchor, word: DifferenceWord { left, middle, right } }.normalized()
}

pub fn chain_forms(d: &BlockSet) -> Vec<ChainForm> {
    chain_partition(d).iter().map(chain_word).collect()
}

/// Rebuilds a block set from chain forms and position subsets.
pub fn from_chain_subsets<'a>(
    rank: usize,
    parts: impl IntoIterator<Item = (&'a ChainForm, &'a IndexSet)>,
) -> Result<BlockSet, SetError> {
    let blocks: Vec<Block> = parts.into_iter().flat_map(|(c, p)| c.to_blocks(p)).collect();
    BlockSet::validate(rank, false, blocks)
}

/// Same elements, decided on canonical chain forms.
pub fn same_set(d: &BlockSet, e: &BlockSet) -> bool {
    d.rank() == e.rank() && chain_forms(d) == chain_forms(e)
}

pub fn successor(d: &BlockSet, a: &GroupElement) -> Result<GroupElement, CalcError> {
    let blocks = d.blocks();
    let i = blocks.iter().position(|b| b.contains(a)).ok_or_else(|| CalcError::NotMember(a.clone()))?;
    let b = &blocks[i];
    let k = num_traits::ToPrimitive::to_i64(&b.lattice_index(a).unwrap()).unwrap();
    if let Ok(n) = b.indices().next_in(k) {
        return Ok(b.element(n));
    }
    match blocks.get(i + 1) {
        None => Err(CalcError::IsMaximal(a.clone())),
        Some(nb) => nb.min().ok_or_else(|| CalcError::NoImmediateSuccessor(a.clone())),
    }
}

/// `S(a) − a`, or `max D′` when `a` is maximal.
pub fn gamma(d: &BlockSet, a: &GroupElement) -> Result<GroupElement, CalcError> {
    match successor(d, a) {
        Ok(s) => Ok(&s - a),
        Err(CalcError::IsMaximal(_)) => Ok(diff_set(d)?.into_iter().next_back().ok_or(CalcError::TooSmall)?),
        Err(e) => Err(e),
    }
}

pub fn diff_set(d: &BlockSet) -> Result<BTreeSet<GroupElement>, CalcError> {
    if d.len().is_ok_and(|n| n < 2) {
        return Err(CalcError::TooSmall);
    }
    Ok(chain_forms(d).iter().flat_map(|c| c.word.alphabet()).collect())
}

/// `D⁽ⁿ⁾`, with finite stages re-wrapped as point sets.
pub fn iter_diff(d: &BlockSet, n: usize) -> Result<BlockSet, CalcError> {
    let mut cur = d.clone();
    for stage in 0..n {
        if cur.len().is_ok_and(|k| k < 2) {
            return Err(CalcError::Exhausted { stage });
        }
        cur = BlockSet::from_points(d.rank(), diff_set(&cur)?)?;
    }
    Ok(cur)
}

fn top_class(word: &[GroupElement]) -> ArchClass {
    let lead = word.iter().filter_map(|x| x.lead()).min().unwrap();
    ArchClass { leading: lead }
}

pub fn c_star(d: &BlockSet, a: &GroupElement) -> Result<ArchClass, CalcError> {
    let forms = chain_forms(d);
    let c = forms.iter().find(|c| c.position_of(a).is_some()).ok_or_else(|| CalcError::NotMember(a.clone()))?;
    let r = c.word.right.as_ref().ok_or(CalcError::FiniteChain)?;
    Ok(top_class(r))
}

pub fn c_star_set(d: &BlockSet) -> BTreeSet<ArchClass> {
    chain_forms(d).iter().filter_map(|c| c.word.right.as_deref().map(top_class)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(s: &str) -> GroupElement {
        s.parse().unwrap()
    }

    fn blk(base: &str, pat: &[&str], k: IndexSet) -> Block {
        Block::new(g(base), pat.iter().map(|p| g(p)).collect(), k).unwrap()
    }

    fn set(blocks: Vec<Block>) -> BlockSet {
        BlockSet::validate(blocks[0].rank(), false, blocks).unwrap()
    }

    fn p12() -> BlockSet {
        set(vec![blk("(0,0)", &["(0,1)", "(0,2)"], IndexSet::naturals())])
    }

    fn gs(v: &[&str]) -> BTreeSet<GroupElement> {
        v.iter().map(|s| g(s)).collect()
    }

    #[test]
    fn successor_examples() {
        assert_eq!(successor(&p12(), &g("(0,3)")).unwrap(), g("(0,4)"));
        let d = set(vec![blk("(0,0)", &["(0,1)"], IndexSet::range(0, 2)), Block::point(g("(1,0)"))]);
        assert_eq!(successor(&d, &g("(0,2)")).unwrap(), g("(1,0)"));
        assert_eq!(successor(&d, &g("(1,0)")), Err(CalcError::IsMaximal(g("(1,0)"))));
        assert_eq!(successor(&d, &g("(0,5)")), Err(CalcError::NotMember(g("(0,5)"))));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(&p12(), &g("(0,1)")).unwrap(), g("(0,2)"));
        let d = set(vec![blk("(0,0)", &["(0,1)"], IndexSet::range(0, 2)), Block::point(g("(1,0)"))]);
        assert_eq!(gamma(&d, &g("(1,0)")).unwrap(), g("(1,-2)"));
    }

    #[test]
    fn non_dc_junction() {
        let d = set(vec![blk("(0,0)", &["(0,1)"], IndexSet::range(0, 2)), blk("(1,0)", &["(0,1)"], IndexSet::le(0))]);
        assert!(matches!(successor(&d, &g("(0,2)")), Err(CalcError::NoImmediateSuccessor(_))));
    }

    #[test]
    fn diff_set_examples() {
        let nat = set(vec![blk("(0,0)", &["(0,1)"], IndexSet::naturals())]);
        assert_eq!(diff_set(&nat).unwrap(), gs(&["(0,1)"]));
        assert_eq!(diff_set(&p12()).unwrap(), gs(&["(0,1)", "(0,2)"]));
        let d = set(vec![blk("(0,0)", &["(0,1)"], IndexSet::range(0, 2)), blk("(1,0)", &["(0,1)"], IndexSet::naturals())]);
        assert_eq!(diff_set(&d).unwrap(), gs(&["(0,1)", "(1,-2)"]));
        assert_eq!(diff_set(&BlockSet::from_points(2, [g("(0,0)")]).unwrap()), Err(CalcError::TooSmall));
    }

    #[test]
    fn iter_diff_examples() {
        let d1 = iter_diff(&p12(), 1).unwrap();
        assert_eq!(d1.elements().unwrap(), vec![g("(0,1)"), g("(0,2)")]);
        assert_eq!(iter_diff(&p12(), 2).unwrap().elements().unwrap(), vec![g("(0,1)")]);
        let ar = set(vec![blk("(0,0)", &["(0,3)"], IndexSet::naturals())]);
        assert_eq!(iter_diff(&ar, 2), Err(CalcError::Exhausted { stage: 1 }));
        assert_eq!(iter_diff(&ar, 0).unwrap(), ar);
    }

    #[test]
    fn chain_partition_examples() {
        let d = set(vec![blk("(0,0)", &["(0,1)"], IndexSet::naturals()), blk("(1,0)", &["(0,1)"], IndexSet::naturals())]);
        assert_eq!(chain_partition(&d).len(), 2);
        let d = set(vec![blk("(0,0)", &["(0,1)"], IndexSet::range(0, 5)), Block::point(g("(1,0)"))]);
        assert_eq!(chain_partition(&d).len(), 1);
        assert_eq!(chain_partition(&p12()).len(), 1);
    }

    #[test]
    fn chain_word_examples() {
        let f = &chain_forms(&p12())[0];
        assert_eq!(f.word.left, None);
        assert!(f.word.middle.is_empty());
        assert_eq!(f.word.right, Some(vec![g("(0,1)"), g("(0,2)")]));
        let k = IndexSet::naturals().difference(&IndexSet::singleton(3));
        let d = set(vec![blk("(0,0)", &["(0,1)", "(0,2)"], k)]);
        let f = &chain_forms(&d)[0];
        assert!(f.word.middle.contains(&g("(0,3)")));
        let ar = set(vec![blk("(0,0)", &["(0,3)"], IndexSet::all())]);
        let f = &chain_forms(&ar)[0];
        assert_eq!(f.word.right, Some(vec![g("(0,3)")]));
        assert!(f.word.is_periodic());
    }

    #[test]
    fn c_star_examples() {
        let nat = set(vec![blk("(0,0)", &["(0,1)"], IndexSet::naturals())]);
        assert_eq!(c_star(&nat, &g("(0,4)")).unwrap(), ArchClass { leading: 1 });
        let two = set(vec![blk("(0,0)", &["(0,1)", "(1,0)"], IndexSet::naturals())]);
        assert_eq!(c_star(&two, &g("(0,0)")).unwrap(), ArchClass { leading: 0 });
        let fin = BlockSet::from_points(2, [g("(0,0)"), g("(0,1)")]).unwrap();
        assert_eq!(c_star(&fin, &g("(0,0)")), Err(CalcError::FiniteChain));
        assert!(c_star_set(&fin).is_empty());
        let gal = set(vec![
            blk("(0,0,0)", &["(0,1,0)"], IndexSet::naturals()),
            blk("(1,0,0)", &["(0,0,1)"], IndexSet::naturals()),
        ]);
        assert_eq!(c_star_set(&gal), [ArchClass { leading: 1 }, ArchClass { leading: 2 }].into_iter().collect());
    }

    #[test]
    fn canonical_forms_agree() {
        let a = set(vec![blk("(0,0)", &["(0,2)"], IndexSet::all())]);
        let b = set(vec![blk("(0,4)", &["(0,1)", "(0,1)"], IndexSet::residue(0, 2))]);
        assert!(same_set(&a, &b));
        let c = set(vec![blk("(0,1)", &["(0,2)"], IndexSet::all())]);
        assert!(!same_set(&a, &c));
    }

    fn arb_block_set() -> impl Strategy<Value = BlockSet> {
        let letter = (0i64..2, 1i64..4).prop_map(|(hi, lo)| GroupElement::from_ints(&[hi, lo]));
        let block = (prop::collection::vec(letter, 1..4), crate::semilinear::tests::arb_index_set(), -3i64..4);
        prop::collection::vec(block, 1..3).prop_filter_map("blocks overlap", |bs| {
            let blocks = bs
                .into_iter()
                .enumerate()
                .map(|(i, (pat, k, off))| Block::new(GroupElement::from_ints(&[10 * i as i64, off]), pat, k).unwrap())
                .collect();
            BlockSet::validate(2, false, blocks).ok()
        })
    }

    fn brute_diffs(d: &BlockSet) -> Option<BTreeSet<GroupElement>> {
        let mut out = BTreeSet::new();
        for (i, b) in d.blocks().iter().enumerate() {
            let (lo, hi) = b.indices().window();
            let p = lcm(b.indices().period(), b.m());
            let ks = b.indices().elements_in(lo - 3 * p, hi + 3 * p);
            let els: Vec<GroupElement> = ks.iter().map(|&k| b.element(k)).collect();
            out.extend(els.windows(2).map(|w| &w[1] - &w[0]));
            if let (Some(m), Some(n)) = (b.max(), d.blocks().get(i + 1).and_then(|nb| nb.min())) {
                out.insert(&n - &m);
            }
        }
        Some(out)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]
        #[test]
        fn diff_set_matches_brute_force(d in arb_block_set()) {
            prop_assume!(d.len().map_or(true, |n| n >= 2));
            prop_assert_eq!(diff_set(&d).unwrap(), brute_diffs(&d).unwrap());
        }

        #[test]
        fn chain_blocks_round_trip(d in arb_block_set()) {
            let forms = chain_forms(&d);
            let all = IndexSet::all();
            let back = from_chain_subsets(2, forms.iter().map(|f| (f, &all))).unwrap();
            prop_assert!(same_set(&d, &back));
            let from = g("(-1,0)");
            if let (Ok(a), Ok(b)) = (d.enumerate_window(&from, 60), back.enumerate_window(&from, 60)) {
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn successor_matches_window(d in arb_block_set()) {
            let from = d.min().unwrap_or_else(|| g("(0,-40)"));
            if let Ok(w) = d.enumerate_window(&from, 40) {
                for pair in w.windows(2) {
                    prop_assert_eq!(successor(&d, &pair[0]).unwrap(), pair[1].clone());
                    prop_assert_eq!(gamma(&d, &pair[0]).unwrap(), &pair[1] - &pair[0]);
                }
            }
        }

        #[test]
        fn chain_positions_match(d in arb_block_set()) {
            for f in chain_forms(&d) {
                let lo = f.min_position().unwrap_or(-12);
                let hi = f.max_position().unwrap_or(12);
                for (i, x) in f.elements(lo, hi).iter().enumerate() {
                    prop_assert_eq!(f.position_of(x), Some(lo + i as i64));
                    prop_assert!(d.contains(x));
                }
            }
        }
    }
}
