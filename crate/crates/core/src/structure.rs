//! Periodicity of difference words, uniformization and the decomposition
//! into points and pseudo-arithmetic pieces.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::calculus::DifferenceWord;
use crate::calculus::{chain_forms, diff_set, from_chain_subsets, same_set, CalcError, ChainForm};
use crate::lexgroup::GroupElement;
use crate::semilinear::{lcm, IndexSet};
use crate::setrep::{BlockSet, SetError};

const MAX_PEEL_DEPTH: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructError {
    #[error("word has no infinite right side")]
    FiniteWord,
    #[error("factor count exceeds the bound at length {0}")]
    BoundViolated(usize),
    #[error("letter {0} is not in the difference set")]
    AlphabetMismatch(GroupElement),
    #[error("empty word")]
    EmptyWord,
    #[error("difference set spans several Archimedean classes")]
    NotUniformized,
    #[error("set is not pseudo-arithmetic")]
    NotPseudoArithmetic,
    #[error("the sets have different steps")]
    DifferentEta,
    #[error("the sets have different minima")]
    DifferentMin,
    #[error("neither set is an initial segment of the other")]
    Incomparable,
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Shortest word `τ` with `word = τ^k`.
pub fn primitive_generator<T: Clone + PartialEq>(word: &[T]) -> Vec<T> {
    let n = word.len();
    for d in 1..=n {
        if n % d == 0 && (d..n).all(|i| word[i] == word[i - d]) {
            return word[..d].to_vec();
        }
    }
    word.to_vec()
}

fn least_rotation(w: &[GroupElement]) -> Vec<GroupElement> {
    (0..w.len())
        .map(|s| {
            let mut v = w.to_vec();
            v.rotate_left(s);
            v
        })
        .min()
        .unwrap_or_default()
}

fn power(w: &[GroupElement], k: usize) -> Vec<GroupElement> {
    w.iter().cycle().take(w.len() * k).cloned().collect()
}

fn class(x: &GroupElement) -> usize {
    x.lead().expect("letters are positive")
}

/// Positions `p` of the chain where `f(p)` holds; `f` may look at letters
/// `p .. p + lookahead`.
fn positions_where(c: &ChainForm, lookahead: usize, f: impl Fn(i64) -> bool) -> IndexSet {
    let t = c.word.left.as_ref().map_or(1, |l| l.len()) as i64;
    let r = c.word.right.as_ref().map_or(1, |r| r.len()) as i64;
    let n = c.word.middle.len() as i64;
    let all = c.positions();
    IndexSet::from_fn(-(lookahead as i64) - 1, n + 1, lcm(t, r), |p| all.contains(p) && f(p))
}

fn word_at(c: &ChainForm, p: i64, w: &[GroupElement]) -> bool {
    w.iter().enumerate().all(|(j, x)| c.word.letter(p + j as i64) == Some(x))
}

fn recurring_factors(r: &[GroupElement], k: usize) -> BTreeSet<Vec<GroupElement>> {
    (0..r.len()).map(|i| (0..k).map(|j| r[(i + j) % r.len()].clone()).collect()).collect()
}

/// Number of length-`k` factors recurring infinitely often on the right.
pub fn factor_count(w: &DifferenceWord, k: usize) -> Result<usize, StructError> {
    let r = w.right.as_ref().ok_or(StructError::FiniteWord)?;
    Ok(recurring_factors(r, k).len())
}

/// Eventual period `m` of the right side, valid from position `offset` on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub m: usize,
    pub offset: i64,
    /// Length `k` at which the factor count stabilised.
    pub k: usize,
}

pub fn detect_period(w: &DifferenceWord, bound: usize) -> Result<Period, StructError> {
    let r = w.right.as_ref().ok_or(StructError::FiniteWord)?;
    let mut k = 1;
    let mut fk = factor_count(w, 1)?;
    loop {
        if fk > bound {
            return Err(StructError::BoundViolated(k));
        }
        let fk1 = factor_count(w, k + 1)?;
        if fk1 > bound {
            return Err(StructError::BoundViolated(k + 1));
        }
        if fk1 == fk {
            break;
        }
        k += 1;
        fk = fk1;
    }
    let ext: BTreeMap<Vec<GroupElement>, GroupElement> =
        recurring_factors(r, k + 1).into_iter().map(|mut f| (f[..k].to_vec(), f.pop().unwrap())).collect();
    let n = w.middle.len() as i64;
    let start: Vec<GroupElement> = (0..k as i64).map(|j| w.letter(n + j).unwrap().clone()).collect();
    let mut cur = start.clone();
    let mut m = 0;
    loop {
        let next = ext[&cur].clone();
        cur.remove(0);
        cur.push(next);
        m += 1;
        if cur == start {
            break;
        }
    }
    debug_assert_eq!(m, primitive_generator(r).len());
    let mut offset = n;
    while offset > 0 && w.letter(offset - 1) == w.letter(offset - 1 + m as i64) {
        offset -= 1;
    }
    Ok(Period { m, offset, k })
}

/// Elements whose forward difference word starts with `sigma`.
pub fn p_sigma(d: &BlockSet, sigma: &[GroupElement]) -> Result<BlockSet, StructError> {
    if sigma.is_empty() {
        return Err(StructError::EmptyWord);
    }
    let alphabet = diff_set(d).unwrap_or_default();
    if let Some(x) = sigma.iter().find(|x| !alphabet.contains(x)) {
        return Err(StructError::AlphabetMismatch(x.clone()));
    }
    let forms = chain_forms(d);
    let parts: Vec<(ChainForm, IndexSet)> = forms
        .into_iter()
        .map(|c| {
            let p = positions_where(&c, sigma.len(), |p| word_at(&c, p, sigma));
            (c, p)
        })
        .collect();
    Ok(from_chain_subsets(d.rank(), parts.iter().map(|(c, p)| (c, p)))?)
}

/// A convex piece of a uniformization with its run bound `N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformPiece {
    pub set: BlockSet,
    pub n: usize,
}

/// Smallest `N` such that every run of `N` consecutive elements meets every
/// difference, or `None` when some difference is missing from an infinite run.
pub fn uniform_bound(d: &BlockSet) -> Option<usize> {
    let Ok(alphabet) = diff_set(d) else {
        return Some(d.len().unwrap_or(1).max(1));
    };
    let forms = chain_forms(d);
    let top = alphabet.iter().next_back().cloned();
    let last = forms.len().saturating_sub(1);
    let mut seqs: Vec<Vec<Option<GroupElement>>> = Vec::new();
    for (ci, c) in forms.iter().enumerate() {
        let mut seq = Vec::new();
        for tail in [&c.word.left, &c.word.right].into_iter().flatten() {
            let letters: BTreeSet<&GroupElement> = tail.iter().collect();
            if alphabet.iter().any(|x| !letters.contains(x)) {
                return None;
            }
        }
        if let Some(l) = &c.word.left {
            seq.extend(l.iter().chain(l).cloned().map(Some));
        }
        seq.extend(c.word.middle.iter().cloned().map(Some));
        match &c.word.right {
            Some(r) => seq.extend(r.iter().chain(r).cloned().map(Some)),
            None => seq.push(if ci == last { top.clone() } else { None }),
        }
        seqs.push(seq);
    }
    let mut worst = 0;
    for x in &alphabet {
        for seq in &seqs {
            let mut run = 0;
            for y in seq {
                if y.as_ref() == Some(x) {
                    run = 0;
                } else {
                    run += 1;
                    worst = worst.max(run);
                }
            }
        }
    }
    Some(worst + 1)
}

/// Finite convex partition into uniformized pieces.
pub fn uniformize(d: &BlockSet) -> Result<Vec<UniformPiece>, StructError> {
    let forms = chain_forms(d);
    let mut parts: Vec<(usize, IndexSet)> = Vec::new();
    for (ci, c) in forms.iter().enumerate() {
        if c.word.is_periodic() {
            parts.push((ci, IndexSet::all()));
            continue;
        }
        let n = c.word.middle.len() as i64;
        if c.word.left.is_some() {
            parts.push((ci, IndexSet::le(-1)));
        }
        let mid = match c.word.right {
            Some(_) => IndexSet::range(0, n - 1),
            None => IndexSet::range(0, n),
        };
        if !mid.is_empty() {
            parts.push((ci, mid));
        }
        if c.word.right.is_some() {
            parts.push((ci, IndexSet::ge(n)));
        }
    }
    let build = |ps: &[(usize, IndexSet)]| from_chain_subsets(d.rank(), ps.iter().map(|(ci, p)| (&forms[*ci], p)));
    let mut out = Vec::new();
    let mut cur: Vec<(usize, IndexSet)> = Vec::new();
    let mut cur_n = 0;
    for part in parts {
        let mut cand = cur.clone();
        cand.push(part.clone());
        let set = build(&cand)?;
        match uniform_bound(&set) {
            Some(n) => {
                cur = cand;
                cur_n = n;
            }
            None => {
                out.push(UniformPiece { set: build(&cur)?, n: cur_n });
                let single = build(std::slice::from_ref(&part))?;
                cur_n = uniform_bound(&single).expect("single parts are uniformized");
                cur = vec![part];
            }
        }
    }
    if !cur.is_empty() {
        out.push(UniformPiece { set: build(&cur)?, n: cur_n });
    }
    Ok(out)
}

/// Subsets with single-class difference sets, peeled from the top class down.
pub fn arch_partition(d: &BlockSet) -> Result<Vec<BlockSet>, StructError> {
    let mut out = Vec::new();
    peel(d, 0, &mut out)?;
    Ok(out)
}

fn peel(d: &BlockSet, depth: usize, out: &mut Vec<BlockSet>) -> Result<(), StructError> {
    if d.is_empty() {
        return Ok(());
    }
    let Ok(alphabet) = diff_set(d) else {
        out.push(d.clone());
        return Ok(());
    };
    let top = alphabet.iter().map(class).min().unwrap();
    if depth >= MAX_PEEL_DEPTH || alphabet.iter().all(|x| class(x) == top) {
        out.push(d.clone());
        return Ok(());
    }
    let forms = chain_forms(d);
    let last = forms.len() - 1;
    let has_max = d.max().is_some();
    let mut upper = Vec::new();
    let mut rest = Vec::new();
    for (ci, c) in forms.iter().enumerate() {
        let maxp = c.max_position();
        let p = positions_where(c, 1, |p| match c.word.letter(p) {
            Some(x) if Some(p) != maxp => class(x) == top,
            _ => Some(p) == maxp && ci == last && has_max,
        });
        rest.push(c.positions().difference(&p));
        upper.push(p);
    }
    out.push(from_chain_subsets(d.rank(), forms.iter().zip(&upper))?);
    let rest = from_chain_subsets(d.rank(), forms.iter().zip(&rest))?;
    for piece in uniformize(&rest)? {
        peel(&piece.set, depth + 1, out)?;
    }
    Ok(())
}

/// End of a σ-interval: an element of the set, or a cut between chains
/// (at either extreme this is `±∞`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Endpoint {
    Element(GroupElement),
    Cut,
}

/// Positions of one chain inside a σ-interval; `phase` is a position where
/// the generator starts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalPart {
    pub chain: usize,
    pub positions: IndexSet,
    pub phase: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaInterval {
    pub sigma: Vec<GroupElement>,
    pub generator: Vec<GroupElement>,
    pub start: Endpoint,
    pub end: Endpoint,
    pub parts: Vec<IntervalPart>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaCover {
    pub chains: Vec<ChainForm>,
    pub mu: usize,
    pub intervals: Vec<SigmaInterval>,
    pub leftover: BlockSet,
}

impl SigmaInterval {
    pub fn to_blockset(&self, chains: &[ChainForm]) -> Result<BlockSet, SetError> {
        let rank = chains[0].rank();
        from_chain_subsets(rank, self.parts.iter().map(|p| (&chains[p.chain], &p.positions)))
    }
}

enum Segment {
    Left { chain: usize, tau: Vec<GroupElement>, upto: i64, phase: i64 },
    Middle { chain: usize, positions: IndexSet },
    Right { chain: usize, tau: Vec<GroupElement>, from: i64 },
    Pure { chain: usize, tau: Vec<GroupElement> },
}

pub fn sigma_interval_cover(d: &BlockSet) -> Result<SigmaCover, StructError> {
    let forms = chain_forms(d);
    let Ok(alphabet) = diff_set(d) else {
        return Ok(SigmaCover { chains: forms, mu: 1, intervals: Vec::new(), leftover: d.clone() });
    };
    let top = alphabet.iter().map(class).min().unwrap();
    if alphabet.iter().any(|x| class(x) != top) {
        return Err(StructError::NotUniformized);
    }
    let mu = forms
        .iter()
        .flat_map(|c| [&c.word.left, &c.word.right])
        .flatten()
        .fold(1usize, |a, w| lcm(a as i64, w.len() as i64) as usize);
    let mut segs = Vec::new();
    for (ci, c) in forms.iter().enumerate() {
        if c.word.is_periodic() {
            segs.push(Segment::Pure { chain: ci, tau: c.word.right.clone().unwrap() });
            continue;
        }
        let n = c.word.middle.len() as i64;
        let mut lo = c.min_position();
        let mut hi = c.max_position();
        if let Some(l) = &c.word.left {
            let tau = least_rotation(l);
            let sigma = power(&tau, mu / tau.len());
            let q = (0..tau.len() as i64).map(|j| -(mu as i64) - j).find(|&q| word_at(c, q, &sigma)).unwrap();
            let upto = q + mu as i64;
            lo = Some(upto + 1);
            segs.push(Segment::Left { chain: ci, tau, upto, phase: q });
        }
        let right = c.word.right.as_ref().map(|r| {
            let tau = least_rotation(r);
            let sigma = power(&tau, mu / tau.len());
            let a = (0..tau.len() as i64).map(|j| n + j).find(|&p| word_at(c, p, &sigma)).unwrap();
            hi = Some(a - 1);
            Segment::Right { chain: ci, tau, from: a }
        });
        let positions = IndexSet::all().restrict(lo, hi);
        if !positions.is_empty() {
            segs.push(Segment::Middle { chain: ci, positions });
        }
        segs.extend(right);
    }

    let mut intervals = Vec::new();
    let mut leftover = Vec::new();
    let mut open: Option<SigmaInterval> = None;
    let new_interval = |tau: &[GroupElement], start: Endpoint| SigmaInterval {
        sigma: power(tau, mu / tau.len()),
        generator: tau.to_vec(),
        start,
        end: Endpoint::Cut,
        parts: Vec::new(),
    };
    for seg in segs {
        match seg {
            Segment::Pure { chain, tau } => {
                let part = IntervalPart { chain, positions: IndexSet::all(), phase: 0 };
                match &mut open {
                    Some(iv) if iv.generator == tau => iv.parts.push(part),
                    _ => {
                        intervals.extend(open.take());
                        let mut iv = new_interval(&tau, Endpoint::Cut);
                        iv.parts.push(part);
                        open = Some(iv);
                    }
                }
            }
            Segment::Right { chain, tau, from } => {
                intervals.extend(open.take());
                let mut iv = new_interval(&tau, Endpoint::Element(forms[chain].element(from)));
                iv.parts.push(IntervalPart { chain, positions: IndexSet::ge(from), phase: from });
                open = Some(iv);
            }
            Segment::Left { chain, tau, upto, phase } => {
                let part = IntervalPart { chain, positions: IndexSet::le(upto), phase };
                let mut iv = match open.take() {
                    Some(iv) if iv.generator == tau => iv,
                    other => {
                        intervals.extend(other);
                        new_interval(&tau, Endpoint::Cut)
                    }
                };
                iv.parts.push(part);
                iv.end = Endpoint::Element(forms[chain].element(upto));
                intervals.push(iv);
            }
            Segment::Middle { chain, positions } => {
                intervals.extend(open.take());
                leftover.push((chain, positions));
            }
        }
    }
    intervals.extend(open.take());
    let leftover = from_chain_subsets(d.rank(), leftover.iter().map(|(ci, p)| (&forms[*ci], p)))?;
    Ok(SigmaCover { chains: forms, mu, intervals, leftover })
}

/// A piece with a single difference `eta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub set: BlockSet,
    pub eta: GroupElement,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificates {
    pub n: Vec<usize>,
    pub mu: Vec<usize>,
    pub generators: Vec<Vec<GroupElement>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub pieces: Vec<Piece>,
    pub points: Vec<GroupElement>,
    pub certificates: Certificates,
}

impl Decomposition {
    /// Union of the pieces and the points.
    pub fn reassemble(&self, rank: usize) -> Result<BlockSet, SetError> {
        let mut acc = BlockSet::from_points(rank, self.points.iter().cloned())?;
        for p in &self.pieces {
            acc = acc.union(&p.set)?;
        }
        Ok(acc)
    }
}

/// The pieces `E_i = {a : S^i(a) ∈ P_τ}` of one σ-interval.
pub fn interval_pieces(iv: &SigmaInterval, chains: &[ChainForm]) -> Result<Vec<BlockSet>, SetError> {
    let l = iv.generator.len() as i64;
    let rank = chains[0].rank();
    (0..l)
        .map(|i| {
            let parts: Vec<(usize, IndexSet)> = iv
                .parts
                .iter()
                .map(|p| (p.chain, p.positions.intersect(&IndexSet::residue((p.phase - i).rem_euclid(l), l))))
                .collect();
            from_chain_subsets(rank, parts.iter().map(|(c, p)| (&chains[*c], p)))
        })
        .collect()
}

pub fn pseudo_arith_decomp(d: &BlockSet) -> Result<Decomposition, StructError> {
    let mut pieces = Vec::new();
    let mut points = Vec::new();
    let mut certs = Certificates::default();
    for u in uniformize(d)? {
        certs.n.push(u.n);
        for a in arch_partition(&u.set)? {
            for u2 in uniformize(&a)? {
                let cover = sigma_interval_cover(&u2.set)?;
                certs.mu.push(cover.mu);
                points.extend(cover.leftover.elements()?);
                for iv in &cover.intervals {
                    certs.generators.push(iv.generator.clone());
                    for e in interval_pieces(iv, &cover.chains)? {
                        match e.len() {
                            Ok(0) => {}
                            Ok(1) => points.extend(e.elements()?),
                            _ => {
                                let diffs = diff_set(&e)?;
                                if diffs.len() != 1 {
                                    return Err(StructError::NotPseudoArithmetic);
                                }
                                pieces.push(Piece { set: e, eta: diffs.into_iter().next().unwrap() });
                            }
                        }
                    }
                }
            }
        }
    }
    pieces.sort_by(|a, b| a.set.min().cmp(&b.set.min()));
    points.sort();
    Ok(Decomposition { pieces, points, certificates: certs })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentOrder {
    E0PrefixOfE1,
    E1PrefixOfE0,
    Equal,
}

fn at_most(d: &BlockSet, x: &GroupElement) -> BlockSet {
    let blocks = d.blocks().iter().map(|b| b.with_indices(b.indices().difference(&b.indices_above(x)))).collect();
    BlockSet::validate(d.rank(), false, blocks).expect("subset of a valid set")
}

fn is_initial(a: &BlockSet, b: &BlockSet) -> bool {
    match a.max() {
        Some(mx) => same_set(a, &at_most(b, &mx)),
        None => {
            let fa = chain_forms(a);
            let fb = chain_forms(b);
            fa.len() <= fb.len() && fb[..fa.len()] == fa[..]
        }
    }
}

fn single_eta(e: &BlockSet) -> Result<GroupElement, StructError> {
    let d = diff_set(e).map_err(|_| StructError::NotPseudoArithmetic)?;
    if d.len() != 1 {
        return Err(StructError::NotPseudoArithmetic);
    }
    Ok(d.into_iter().next().unwrap())
}

pub fn initial_segment_check(e0: &BlockSet, e1: &BlockSet) -> Result<SegmentOrder, StructError> {
    if single_eta(e0)? != single_eta(e1)? {
        return Err(StructError::DifferentEta);
    }
    match (e0.min(), e1.min()) {
        (Some(a), Some(b)) if a == b => {}
        _ => return Err(StructError::DifferentMin),
    }
    if same_set(e0, e1) {
        Ok(SegmentOrder::Equal)
    } else if is_initial(e0, e1) {
        Ok(SegmentOrder::E0PrefixOfE1)
    } else if is_initial(e1, e0) {
        Ok(SegmentOrder::E1PrefixOfE0)
    } else {
        Err(StructError::Incomparable)
    }
}
