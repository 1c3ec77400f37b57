//! Interlaced nested sums and the inp-pattern witnesses they carry.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{diff_set, successor, CalcError};
use crate::lexgroup::{rat, GroupElement, Rational};
use crate::semilinear::IndexSet;
use crate::setrep::{Block, BlockSet, SetError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("no input sets")]
    Empty,
    #[error("the first set has a maximum")]
    HasMaximum,
    #[error("hypothesis fails between levels {0} and {next}", next = .0 + 1)]
    HypothesisFailed(usize),
    #[error("level {0} is finite")]
    FiniteLevel(usize),
    #[error("level {0} has too few consecutive elements")]
    TooFewElements(usize),
    #[error("rank {found} differs from {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// `A_m = F_0 + F_1 + … + F_m`, each summand fitting below the gaps of the
/// previous partial sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestedSum {
    pub rank: usize,
    pub levels: Vec<BlockSet>,
}

impl NestedSum {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Largest element of `A_m` that is `≤ x` (`< x` when `strict`).
    pub fn floor(&self, m: usize, x: &GroupElement, strict: bool) -> Option<GroupElement> {
        let f = &self.levels[m];
        if m == 0 {
            return f.last_below(x, strict);
        }
        let a = self.floor(m - 1, x, false)?;
        if let Some(y) = f.last_below(&(x - &a), strict) {
            return Some(&a + &y);
        }
        let top = f.max()?;
        let prev = self.floor(m - 1, &a, true)?;
        Some(&prev + &top)
    }

    pub fn contains(&self, m: usize, x: &GroupElement) -> bool {
        self.floor(m, x, false).as_ref() == Some(x)
    }

    /// `x` itself at level zero, else the distance from `x` down to `A_{level-1}`.
    pub fn row_value(&self, level: usize, x: &GroupElement) -> Option<GroupElement> {
        if level == 0 {
            Some(x.clone())
        } else {
            self.floor(level - 1, x, false).map(|a| x - &a)
        }
    }

    /// Least element of `A_m` strictly above `x`, searched through level successors.
    pub fn next_above(&self, m: usize, x: &GroupElement) -> Option<GroupElement> {
        let f = &self.levels[m];
        if m == 0 {
            return first_above(f, x);
        }
        let a = self.floor(m - 1, x, false)?;
        if let Some(y) = first_above(f, &(x - &a)) {
            let cand = &a + &y;
            match self.next_above(m - 1, &a) {
                Some(b) if b <= cand => {}
                _ => return Some(cand),
            }
        }
        let b = self.next_above(m - 1, &a)?;
        Some(&b + &f.min()?)
    }
}

fn first_above(f: &BlockSet, x: &GroupElement) -> Option<GroupElement> {
    let refl = f.reflect();
    refl.last_below(&-x, true).map(|y| -y)
}

fn all_positive(d: &BlockSet) -> bool {
    let z = GroupElement::zero(d.rank());
    d.blocks().iter().all(|b| b.all_gt(&z))
}

fn all_below(d: &BlockSet, y: &GroupElement) -> bool {
    d.blocks().iter().all(|b| b.all_lt(y))
}

fn pow2(i: usize) -> Rational {
    Rational::from_integer(BigInt::one() << i)
}

/// Builds `E_1 = D_1`, `E_{i+1} = E_i + D_{i+1}/2^i` after checking
/// `0 < D_{i+1} < D_i'` and that each summand stays under half the gaps of
/// the partial sum.
pub fn build_interlaced(ds: &[BlockSet]) -> Result<NestedSum, WitnessError> {
    let first = ds.first().ok_or(WitnessError::Empty)?;
    let rank = first.rank();
    for d in ds {
        if d.rank() != rank {
            return Err(WitnessError::RankMismatch { expected: rank, found: d.rank() });
        }
    }
    if first.max().is_some() || first.is_finite() {
        return Err(WitnessError::HasMaximum);
    }
    let mut levels = vec![first.clone()];
    let mut gaps: BTreeSet<GroupElement> = diff_set(first)?;
    for i in 1..ds.len() {
        let d = &ds[i];
        if d.is_finite() {
            return Err(WitnessError::FiniteLevel(i + 1));
        }
        let own = diff_set(&ds[i - 1])?;
        let ok = match own.first() {
            Some(m) => all_positive(d) && all_below(d, m),
            None => false,
        };
        let f = d.scale(&pow2(i).recip())?;
        let half_gap = gaps.first().map(|g| g.scale(&rat(1, 2)));
        if !ok || !half_gap.is_some_and(|h| all_below(&f, &h)) {
            return Err(WitnessError::HypothesisFailed(i));
        }
        let mut next: BTreeSet<GroupElement> = diff_set(&f)?;
        if let (Some(lo), Some(hi)) = (f.min(), f.max()) {
            let spread = &hi - &lo;
            next.extend(gaps.iter().map(|g| g - &spread));
        }
        gaps = next;
        levels.push(f);
    }
    Ok(NestedSum { rank, levels })
}

/// `D_j = {k·e_{j-1} : k ≥ 1}` for `j = 1..=n+1` in rank `n+1`.
pub fn standard_family(n: usize) -> Vec<BlockSet> {
    let r = n + 1;
    (0..r)
        .map(|j| {
            let e = GroupElement::unit(r, j);
            BlockSet::single(Block::new(e.clone(), vec![e], IndexSet::naturals()).unwrap())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: GroupElement,
    pub hi: GroupElement,
}

impl Interval {
    pub fn contains(&self, x: &GroupElement) -> bool {
        self.lo <= *x && *x < self.hi
    }

    pub fn disjoint(&self, o: &Interval) -> bool {
        self.hi <= o.lo || o.hi <= self.lo
    }
}

/// Row `level`: the value `row_value(level, x)` must fall in the interval of
/// the chosen column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub level: usize,
    pub intervals: Vec<Interval>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathWitness {
    pub columns: Vec<usize>,
    pub realizer: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InpPattern {
    pub sum: NestedSum,
    pub columns: usize,
    pub rows: Vec<Row>,
    pub paths: Vec<PathWitness>,
}

impl InpPattern {
    pub fn depth(&self) -> usize {
        self.rows.len()
    }
}

fn consecutive(f: &BlockSet, count: usize, level: usize) -> Result<Vec<GroupElement>, WitnessError> {
    let start = f
        .min()
        .or_else(|| f.sample(1).into_iter().next())
        .ok_or(WitnessError::TooFewElements(level))?;
    let mut out = vec![start];
    while out.len() < count {
        let s = successor(f, out.last().unwrap()).map_err(|_| WitnessError::TooFewElements(level))?;
        out.push(s);
    }
    Ok(out)
}

/// A row per level (plus a dense row of short intervals), with a realizer for
/// every path when `c ≤ 4` and for 200 random paths otherwise.
pub fn build_inp_pattern(sum: &NestedSum, c: usize, dense: bool, seed: u64) -> Result<InpPattern, WitnessError> {
    if c < 2 {
        return Err(WitnessError::TooFewElements(0));
    }
    let mut rows = Vec::new();
    let mut offsets: Vec<Vec<GroupElement>> = Vec::new();
    for (i, f) in sum.levels.iter().enumerate() {
        let pts = consecutive(f, c + 1, i)?;
        rows.push(Row { level: i, intervals: pts.windows(2).map(|w| Interval { lo: w[0].clone(), hi: w[1].clone() }).collect() });
        offsets.push(pts[..c].to_vec());
    }
    if dense {
        let last = sum.levels.last().unwrap();
        let pts = consecutive(last, 2, sum.depth() - 1)?;
        let delta = (&pts[1] - &pts[0]).scale(&Rational::new(BigInt::one(), BigInt::from(4 * c as u64)));
        let ivs: Vec<Interval> = (0..c)
            .map(|j| Interval { lo: delta.mul_i64(j as i64), hi: delta.mul_i64(j as i64 + 1) })
            .collect();
        offsets.push(ivs.iter().map(|iv| &iv.lo + &delta.scale(&rat(1, 2))).collect());
        rows.push(Row { level: sum.depth(), intervals: ivs });
    }
    let depth = rows.len();
    let columns: Vec<Vec<usize>> = if c <= 4 {
        (0..c.pow(depth as u32))
            .map(|mut n| {
                let mut cols = vec![0; depth];
                for slot in cols.iter_mut().rev() {
                    *slot = n % c;
                    n /= c;
                }
                cols
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..200).map(|_| (0..depth).map(|_| rng.gen_range(0..c)).collect()).collect()
    };
    let paths = columns
        .into_iter()
        .map(|cols| {
            let realizer = cols.iter().enumerate().fold(GroupElement::zero(sum.rank), |acc, (r, &j)| &acc + &offsets[r][j]);
            PathWitness { columns: cols, realizer }
        })
        .collect();
    Ok(InpPattern { sum: sum.clone(), columns: c, rows, paths })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub rows: usize,
    pub columns: usize,
    pub paths_checked: usize,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Rows pairwise inconsistent, every listed path realized.
pub fn verify_instance(p: &InpPattern) -> VerifyReport {
    let mut rep = VerifyReport { rows: p.rows.len(), columns: p.columns, paths_checked: p.paths.len(), failures: Vec::new() };
    for (r, row) in p.rows.iter().enumerate() {
        if row.intervals.len() != p.columns {
            rep.failures.push(format!("row {r} has {} columns", row.intervals.len()));
        }
        for i in 0..row.intervals.len() {
            for j in i + 1..row.intervals.len() {
                if !row.intervals[i].disjoint(&row.intervals[j]) {
                    rep.failures.push(format!("row {r}: columns {i} and {j} overlap"));
                }
            }
        }
    }
    for path in &p.paths {
        for (r, (row, &j)) in p.rows.iter().zip(&path.columns).enumerate() {
            let ok = row.intervals.get(j).is_some_and(|iv| p.sum.row_value(row.level, &path.realizer).is_some_and(|v| iv.contains(&v)));
            if !ok {
                rep.failures.push(format!("path {:?} fails row {r} at {}", path.columns, path.realizer));
                break;
            }
        }
    }
    rep
}

/// Elements of `A_{m+1}` strictly between `e ∈ A_m` and its successor, up to `cap`.
pub fn interlaced_count(sum: &NestedSum, m: usize, e: &GroupElement, cap: usize) -> usize {
    let Some(hi) = sum.next_above(m, e) else { return 0 };
    let mut n = 0;
    let mut x = e.clone();
    while n < cap {
        match sum.next_above(m + 1, &x) {
            Some(y) if y < hi => {
                n += 1;
                x = y;
            }
            _ => break,
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GroupElement {
        s.parse().unwrap()
    }

    fn ray(base: &str, step: &str, k: IndexSet) -> BlockSet {
        BlockSet::single(Block::new(g(base), vec![g(step)], k).unwrap())
    }

    #[test]
    fn nested_floor_and_membership() {
        let s = build_interlaced(&standard_family(1)).unwrap();
        assert_eq!(s.levels[1], ray("(0,1/2)", "(0,1/2)", IndexSet::naturals()));
        assert!(s.contains(1, &g("(3,5/2)")));
        assert!(!s.contains(1, &g("(3,0)")));
        assert!(!s.contains(1, &g("(3,1/3)")));
        assert_eq!(s.floor(1, &g("(3,7/3)"), false), Some(g("(3,2)")));
        assert_eq!(s.floor(1, &g("(3,0)"), false), None);
        assert_eq!(s.row_value(1, &g("(3,7/3)")), Some(g("(0,7/3)")));
        assert_eq!(s.next_above(1, &g("(3,1/2)")), Some(g("(3,1)")));
        assert_eq!(s.next_above(0, &g("(3,1/2)")), Some(g("(4,0)")));
    }

    #[test]
    fn hypothesis_checked() {
        let d1 = ray("(1,0)", "(1,0)", IndexSet::naturals());
        let big = ray("(2,0)", "(1,0)", IndexSet::naturals());
        assert_eq!(build_interlaced(&[d1.clone(), big]), Err(WitnessError::HypothesisFailed(1)));
        let neg = ray("(0,-1)", "(0,1)", IndexSet::naturals());
        assert_eq!(build_interlaced(&[d1.clone(), neg]), Err(WitnessError::HypothesisFailed(1)));
        let fin = BlockSet::from_points(2, [g("(0,1)")]).unwrap();
        assert_eq!(build_interlaced(&[d1.clone(), fin.clone()]), Err(WitnessError::FiniteLevel(2)));
        assert_eq!(build_interlaced(&[fin]), Err(WitnessError::HasMaximum));
        assert!(build_interlaced(&[d1]).is_ok());
    }

    #[test]
    fn interlacing_between_successors() {
        let s = build_interlaced(&standard_family(2)).unwrap();
        assert!(interlaced_count(&s, 0, &g("(2,0,0)"), 12) >= 10);
        assert!(interlaced_count(&s, 1, &g("(2,1/2,0)"), 12) >= 10);
    }

    #[test]
    fn patterns_verify() {
        for n in 1..=3 {
            let s = build_interlaced(&standard_family(n)).unwrap();
            for dense in [false, true] {
                let p = build_inp_pattern(&s, 4, dense, 0).unwrap();
                assert_eq!(p.depth(), n + 1 + dense as usize);
                assert_eq!(p.paths.len(), 4usize.pow(p.depth() as u32));
                let rep = verify_instance(&p);
                assert!(rep.passed(), "{:?}", rep.failures);
            }
        }
        let s = build_interlaced(&standard_family(2)).unwrap();
        let p = build_inp_pattern(&s, 7, true, 3).unwrap();
        assert_eq!(p.paths.len(), 200);
        assert!(verify_instance(&p).passed());
    }

    #[test]
    fn tampered_pattern_rejected() {
        let s = build_interlaced(&standard_family(1)).unwrap();
        let mut p = build_inp_pattern(&s, 3, false, 0).unwrap();
        p.paths[5].realizer = &p.paths[5].realizer + &g("(1,0)");
        assert!(!verify_instance(&p).passed());
        let mut q = build_inp_pattern(&s, 3, false, 0).unwrap();
        q.rows[1].intervals[1].lo = g("(0,0)");
        assert!(!verify_instance(&q).passed());
    }

    #[test]
    fn json_round_trip() {
        let s = build_interlaced(&standard_family(1)).unwrap();
        let p = build_inp_pattern(&s, 2, true, 0).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: InpPattern = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn too_few_elements() {
        let d1 = ray("(0,0)", "(1,0)", IndexSet::all());
        let s = NestedSum { rank: 2, levels: vec![d1, BlockSet::from_points(2, [g("(0,1)")]).unwrap()] };
        assert_eq!(build_inp_pattern(&s, 3, false, 0), Err(WitnessError::TooFewElements(1)));
    }
}
