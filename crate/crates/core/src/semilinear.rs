//! Ultimately periodic subsets of ℤ (one-variable Presburger sets).
//!
//! An [`IndexSet`] is periodic with a common period above `hi.threshold`
//! and below `lo.threshold`, with an explicit finite middle in between.
//! Every constructor returns the canonical form: minimal period, tight
//! thresholds, and for overlapping tails the split point closest to zero.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndexError {
    #[error("index set is empty")]
    Empty,
    #[error("index set is unbounded below")]
    UnboundedBelow,
    #[error("index set is unbounded above")]
    UnboundedAbove,
    #[error("no element above {0}")]
    NoSuccessor(i64),
    #[error("no element below {0}")]
    NoPredecessor(i64),
    #[error("fewer than two elements")]
    TooFewElements,
    #[error("index set is infinite")]
    Infinite,
    #[error("invalid index set: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tail {
    pub threshold: i64,
    /// Residues modulo the set's period; never empty.
    pub residues: BTreeSet<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet {
    period: i64,
    lo: Option<Tail>,
    hi: Option<Tail>,
    middle: BTreeSet<i64>,
}

fn min_period(pat: &[bool]) -> i64 {
    let n = pat.len();
    (1..=n)
        .find(|&d| n % d == 0 && (0..n).all(|r| pat[r] == pat[r % d]))
        .unwrap_or(n) as i64
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b) * b).abs()
}

/// Floor division for `b > 0`.
pub fn fdiv(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

/// Ceiling division for `b > 0`.
pub fn cdiv(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet { period: 1, lo: None, hi: None, middle: BTreeSet::new() }
    }

    pub fn all() -> Self {
        Self::residue(0, 1)
    }

    /// `{x : x ≡ r mod p}`.
    pub fn residue(r: i64, p: i64) -> Self {
        assert!(p >= 1);
        Self::from_fn(0, -1, p, |x| (x - r).rem_euclid(p) == 0)
    }

    pub fn finite<I: IntoIterator<Item = i64>>(items: I) -> Self {
        let set: BTreeSet<i64> = items.into_iter().collect();
        match (set.first(), set.last()) {
            (Some(&a), Some(&b)) => Self::from_fn(a, b, 1, |x| set.contains(&x)),
            _ => Self::empty(),
        }
    }

    pub fn singleton(k: i64) -> Self {
        Self::finite([k])
    }

    /// `{x : a ≤ x ≤ b}`.
    pub fn range(a: i64, b: i64) -> Self {
        if a > b {
            return Self::empty();
        }
        Self::from_fn(a, b, 1, |x| a <= x && x <= b)
    }

    pub fn ge(a: i64) -> Self {
        Self::from_fn(a, a, 1, |x| x >= a)
    }

    pub fn le(a: i64) -> Self {
        Self::from_fn(a, a, 1, |x| x <= a)
    }

    /// ℕ.
    pub fn naturals() -> Self {
        Self::ge(0)
    }

    /// Builds the set described by `f`, which must be `period`-periodic on
    /// `x > hi` and on `x < lo`. Requires `lo ≤ hi + 1`.
    pub fn from_fn(lo: i64, hi: i64, period: i64, f: impl Fn(i64) -> bool) -> Self {
        assert!(period >= 1, "period must be positive");
        assert!(lo <= hi + 1, "lo must not exceed hi + 1");
        let p = period as usize;
        let mut hi_pat = vec![false; p];
        for x in hi + 1..=hi + period {
            hi_pat[x.rem_euclid(period) as usize] = f(x);
        }
        let mut lo_pat = vec![false; p];
        for x in lo - period..lo {
            lo_pat[x.rem_euclid(period) as usize] = f(x);
        }
        let mid: Vec<bool> = (lo..=hi).map(&f).collect();
        Self::canonical(lo, hi, lo_pat, hi_pat, mid)
    }

    fn canonical(lo_t: i64, hi_t: i64, lo_pat: Vec<bool>, hi_pat: Vec<bool>, mid: Vec<bool>) -> Self {
        let dh = min_period(&hi_pat);
        let dl = min_period(&lo_pat);
        let p = lcm(dh, dl);
        let hi_at = |x: i64| hi_pat[x.rem_euclid(dh) as usize];
        let lo_at = |x: i64| lo_pat[x.rem_euclid(dl) as usize];
        let eval = |x: i64| {
            if x > hi_t {
                hi_at(x)
            } else if x < lo_t {
                lo_at(x)
            } else {
                mid[(x - lo_t) as usize]
            }
        };
        let hp: Vec<bool> = (0..p).map(hi_at).collect();
        let lp: Vec<bool> = (0..p).map(lo_at).collect();
        let residues = |pat: &[bool]| -> BTreeSet<i64> {
            pat.iter().enumerate().filter(|(_, b)| **b).map(|(r, _)| r as i64).collect()
        };

        if hp == lp && (lo_t..=hi_t).all(|x| eval(x) == hi_at(x)) {
            let res = residues(&hp);
            if res.is_empty() {
                return Self::empty();
            }
            return IndexSet {
                period: p,
                lo: Some(Tail { threshold: 0, residues: res.clone() }),
                hi: Some(Tail { threshold: -1, residues: res }),
                middle: BTreeSet::new(),
            };
        }

        let mut th = hi_t;
        while th >= lo_t - p - 1 && eval(th) == hi_at(th) {
            th -= 1;
        }
        let mut tl = lo_t;
        while tl <= hi_t + p + 1 && eval(tl) == lo_at(tl) {
            tl += 1;
        }
        if tl > th + 1 {
            let s = (-1i64).clamp(th, tl - 1);
            th = s;
            tl = s + 1;
        }
        let middle: BTreeSet<i64> = (tl..=th).filter(|&x| eval(x)).collect();
        let hr = residues(&hp);
        let lr = residues(&lp);
        IndexSet {
            period: p,
            lo: (!lr.is_empty()).then_some(Tail { threshold: tl, residues: lr }),
            hi: (!hr.is_empty()).then_some(Tail { threshold: th, residues: hr }),
            middle,
        }
    }

    pub fn period(&self) -> i64 {
        self.period
    }

    pub fn lo(&self) -> Option<&Tail> {
        self.lo.as_ref()
    }

    pub fn hi(&self) -> Option<&Tail> {
        self.hi.as_ref()
    }

    pub fn middle(&self) -> &BTreeSet<i64> {
        &self.middle
    }

    pub fn contains(&self, k: i64) -> bool {
        if let Some(hi) = &self.hi {
            if k > hi.threshold {
                return hi.residues.contains(&k.rem_euclid(self.period));
            }
        }
        if let Some(lo) = &self.lo {
            if k < lo.threshold {
                return lo.residues.contains(&k.rem_euclid(self.period));
            }
        }
        self.middle.contains(&k)
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_none() && self.hi.is_none() && self.middle.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_none() && self.hi.is_none()
    }

    pub fn bounded_below(&self) -> bool {
        self.lo.is_none()
    }

    pub fn bounded_above(&self) -> bool {
        self.hi.is_none()
    }

    pub fn len(&self) -> Result<usize, IndexError> {
        if self.is_finite() {
            Ok(self.middle.len())
        } else {
            Err(IndexError::Infinite)
        }
    }

    /// `(L, H)` such that membership is periodic above `H` and below `L`
    /// and every middle element lies in `[L, H]`.
    pub fn window(&self) -> (i64, i64) {
        let mut c: Vec<i64> = Vec::new();
        if let Some(t) = &self.lo {
            c.push(t.threshold);
        }
        if let Some(t) = &self.hi {
            c.push(t.threshold);
        }
        c.extend(self.middle.first());
        c.extend(self.middle.last());
        match (c.iter().min(), c.iter().max()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (0, -1),
        }
    }

    fn combine(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        let p = lcm(self.period, other.period);
        let (a0, a1) = self.window();
        let (b0, b1) = other.window();
        let (lo, hi) = (a0.min(b0), a1.max(b1));
        let (lo, hi) = if lo > hi { (0, -1) } else { (lo, hi) };
        Self::from_fn(lo, hi, p, |x| f(self.contains(x), other.contains(x)))
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        let (lo, hi) = self.window();
        Self::from_fn(lo, hi, self.period, |x| !self.contains(x))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// `{x + c : x ∈ self}`.
    pub fn shift(&self, c: i64) -> Self {
        if self.is_empty() {
            return Self::empty();
        }
        let (lo, hi) = self.window();
        Self::from_fn(lo + c, hi + c, self.period, |x| self.contains(x - c))
    }

    /// Intersection with the interval `[lo, hi]`, either end optional.
    pub fn restrict(&self, lo: Option<i64>, hi: Option<i64>) -> Self {
        let interval = match (lo, hi) {
            (Some(a), Some(b)) => Self::range(a, b),
            (Some(a), None) => Self::ge(a),
            (None, Some(b)) => Self::le(b),
            (None, None) => return self.clone(),
        };
        self.intersect(&interval)
    }

    pub fn min(&self) -> Result<i64, IndexError> {
        if self.lo.is_some() {
            return Err(IndexError::UnboundedBelow);
        }
        if let Some(&m) = self.middle.first() {
            return Ok(m);
        }
        match &self.hi {
            Some(t) => Ok(self.scan_up(t.threshold + 1, &t.residues)),
            None => Err(IndexError::Empty),
        }
    }

    pub fn max(&self) -> Result<i64, IndexError> {
        if self.hi.is_some() {
            return Err(IndexError::UnboundedAbove);
        }
        if let Some(&m) = self.middle.last() {
            return Ok(m);
        }
        match &self.lo {
            Some(t) => Ok(self.scan_down(t.threshold - 1, &t.residues)),
            None => Err(IndexError::Empty),
        }
    }

    fn scan_up(&self, from: i64, res: &BTreeSet<i64>) -> i64 {
        (from..from + self.period).find(|x| res.contains(&x.rem_euclid(self.period))).expect("nonempty residues")
    }

    fn scan_down(&self, from: i64, res: &BTreeSet<i64>) -> i64 {
        (from - self.period + 1..=from)
            .rev()
            .find(|x| res.contains(&x.rem_euclid(self.period)))
            .expect("nonempty residues")
    }

    /// Least element strictly above `k`.
    pub fn next_in(&self, k: i64) -> Result<i64, IndexError> {
        if let Some(lo) = &self.lo {
            let end = lo.threshold.min(k + 1 + self.period);
            if let Some(x) = (k + 1..end).find(|x| lo.residues.contains(&x.rem_euclid(self.period))) {
                return Ok(x);
            }
        }
        if let Some(&m) = self.middle.range(k + 1..).next() {
            return Ok(m);
        }
        if let Some(hi) = &self.hi {
            return Ok(self.scan_up((k + 1).max(hi.threshold + 1), &hi.residues));
        }
        Err(IndexError::NoSuccessor(k))
    }

    /// Greatest element strictly below `k`.
    pub fn prev_in(&self, k: i64) -> Result<i64, IndexError> {
        if let Some(hi) = &self.hi {
            let end = hi.threshold.max(k - 1 - self.period);
            if let Some(x) = (end + 1..k).rev().find(|x| hi.residues.contains(&x.rem_euclid(self.period))) {
                return Ok(x);
            }
        }
        if let Some(&m) = self.middle.range(..k).next_back() {
            return Ok(m);
        }
        if let Some(lo) = &self.lo {
            return Ok(self.scan_down((k - 1).min(lo.threshold - 1), &lo.residues));
        }
        Err(IndexError::NoPredecessor(k))
    }

    /// First element `≥ k`, if any.
    pub fn first_ge(&self, k: i64) -> Option<i64> {
        self.next_in(k - 1).ok()
    }

    /// Last element `≤ k`, if any.
    pub fn last_le(&self, k: i64) -> Option<i64> {
        self.prev_in(k + 1).ok()
    }

    /// Elements in `[a, b]`, ascending.
    pub fn elements_in(&self, a: i64, b: i64) -> Vec<i64> {
        (a..=b).filter(|&x| self.contains(x)).collect()
    }

    /// The first `count` elements that are `≥ from`.
    pub fn enumerate(&self, from: i64, count: usize) -> Vec<i64> {
        let mut out = Vec::with_capacity(count.min(4096));
        let mut k = from - 1;
        while out.len() < count {
            match self.next_in(k) {
                Ok(x) => {
                    out.push(x);
                    k = x;
                }
                Err(_) => break,
            }
        }
        out
    }

    /// `{next_in(k) − k : k ∈ S non-maximal}`.
    pub fn gap_sizes(&self) -> Result<BTreeSet<i64>, IndexError> {
        if self.is_finite() && self.middle.len() < 2 {
            return Err(IndexError::TooFewElements);
        }
        let (lo, hi) = self.window();
        let els = self.elements_in(lo - 2 * self.period, hi + 2 * self.period);
        Ok(els.windows(2).map(|w| w[1] - w[0]).collect())
    }

    /// `{j : a + d·j ∈ S}` for `d > 0`.
    pub fn affine_preimage(&self, a: i64, d: i64) -> Self {
        assert!(d > 0);
        if self.is_empty() {
            return Self::empty();
        }
        let (lo, hi) = self.window();
        let jl = cdiv(lo - a, d);
        let jh = fdiv(hi - a, d).max(jl - 1);
        Self::from_fn(jl, jh, self.period, |j| self.contains(a + d * j))
    }

    /// `{φ(k) : k ∈ S}` for a non-decreasing `φ` with
    /// `φ(k + block) = φ(k) + step`, `block, step > 0`.
    pub fn image_periodic(&self, block: i64, step: i64, phi: impl Fn(i64) -> i64) -> Self {
        assert!(block > 0 && step > 0);
        if self.is_empty() {
            return Self::empty();
        }
        let q = lcm(self.period, block);
        let so = step * (q / block);
        let (l, h) = self.window();
        let values: BTreeSet<i64> = (l - 2 * q..=h + 2 * q).filter(|&k| self.contains(k)).map(&phi).collect();
        let (pl, ph) = (phi(l), phi(h));
        Self::from_fn(pl, ph.max(pl - 1), so, |x| values.contains(&x))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        let res = |t: &Tail| t.residues.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",");
        if let Some(t) = &self.lo {
            parts.push(format!("{{x<{} : x mod {} in [{}]}}", t.threshold, self.period, res(t)));
        }
        if !self.middle.is_empty() {
            let m: Vec<String> = self.middle.iter().map(|x| x.to_string()).collect();
            parts.push(format!("{{{}}}", m.join(",")));
        }
        if let Some(t) = &self.hi {
            parts.push(format!("{{x>{} : x mod {} in [{}]}}", t.threshold, self.period, res(t)));
        }
        if parts.is_empty() {
            write!(f, "{{}}")
        } else {
            write!(f, "{}", parts.join(" u "))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TailJson {
    threshold: Option<i64>,
    #[serde(default)]
    residues: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct IndexSetJson {
    period: i64,
    #[serde(default)]
    hi: Option<TailJson>,
    #[serde(default)]
    lo: Option<TailJson>,
    #[serde(default)]
    middle: Vec<i64>,
}

impl IndexSetJson {
    fn into_set(self) -> Result<IndexSet, IndexError> {
        let p = self.period;
        if p < 1 {
            return Err(IndexError::Invalid(format!("period {p} must be positive")));
        }
        let tail = |t: Option<TailJson>, name: &str| -> Result<Option<(i64, BTreeSet<i64>)>, IndexError> {
            let Some(t) = t else { return Ok(None) };
            if let Some(r) = t.residues.iter().find(|r| !(0..p).contains(*r)) {
                return Err(IndexError::Invalid(format!("{name} residue {r} outside 0..{p}")));
            }
            if t.residues.is_empty() {
                return Ok(None);
            }
            match t.threshold {
                Some(th) => Ok(Some((th, t.residues.into_iter().collect()))),
                None => Err(IndexError::Invalid(format!("{name} tail has residues but no threshold"))),
            }
        };
        let hi = tail(self.hi, "hi")?;
        let lo = tail(self.lo, "lo")?;
        let middle: BTreeSet<i64> = self.middle.into_iter().collect();
        if let (Some((lt, _)), Some((ht, _))) = (&lo, &hi) {
            if *lt > *ht + 1 {
                return Err(IndexError::Invalid("lo threshold exceeds hi threshold".into()));
            }
        }
        if let Some((ht, _)) = &hi {
            if middle.last().is_some_and(|m| m > ht) {
                return Err(IndexError::Invalid("middle element above hi threshold".into()));
            }
        }
        if let Some((lt, _)) = &lo {
            if middle.first().is_some_and(|m| m < lt) {
                return Err(IndexError::Invalid("middle element below lo threshold".into()));
            }
        }
        let eval = |x: i64| {
            if let Some((t, r)) = &hi {
                if x > *t {
                    return r.contains(&x.rem_euclid(p));
                }
            }
            if let Some((t, r)) = &lo {
                if x < *t {
                    return r.contains(&x.rem_euclid(p));
                }
            }
            middle.contains(&x)
        };
        let mut c: Vec<i64> = middle.iter().copied().collect();
        c.extend(hi.as_ref().map(|t| t.0));
        c.extend(lo.as_ref().map(|t| t.0));
        let (a, b) = match (c.iter().min(), c.iter().max()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Ok(IndexSet::empty()),
        };
        Ok(IndexSet::from_fn(a, b, p, eval))
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let tail = |t: &Option<Tail>| match t {
            Some(t) => TailJson { threshold: Some(t.threshold), residues: t.residues.iter().copied().collect() },
            None => TailJson { threshold: None, residues: Vec::new() },
        };
        IndexSetJson {
            period: self.period,
            hi: Some(tail(&self.hi)),
            lo: Some(tail(&self.lo)),
            middle: self.middle.iter().copied().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        IndexSetJson::deserialize(d)?.into_set().map_err(D::Error::custom)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn evens_nonneg() -> IndexSet {
        IndexSet::residue(0, 2).intersect(&IndexSet::naturals())
    }

    fn five_mod_seven_above_ten() -> IndexSet {
        IndexSet::residue(5, 7).intersect(&IndexSet::ge(11))
    }

    #[test]
    fn member_examples() {
        assert!(evens_nonneg().contains(4));
        assert!(!evens_nonneg().contains(-2));
        let s = IndexSet::singleton(3).union(&five_mod_seven_above_ten());
        assert!(s.contains(19));
        assert!(!s.contains(12 - 7));
    }

    #[test]
    fn bool_examples() {
        let evens = IndexSet::residue(0, 2);
        let odds = IndexSet::residue(1, 2);
        assert_eq!(evens.union(&odds), IndexSet::all());
        assert!(evens.intersect(&odds).is_empty());
        assert_eq!(IndexSet::naturals().complement(), IndexSet::le(-1));
    }

    #[test]
    fn min_examples() {
        assert_eq!(evens_nonneg().min(), Ok(0));
        assert_eq!(five_mod_seven_above_ten().min(), Ok(12));
        assert_eq!(IndexSet::all().min(), Err(IndexError::UnboundedBelow));
        assert_eq!(IndexSet::empty().min(), Err(IndexError::Empty));
    }

    #[test]
    fn next_examples() {
        let evens = IndexSet::residue(0, 2);
        assert_eq!(evens.next_in(3), Ok(4));
        assert_eq!(evens.next_in(4), Ok(6));
        assert_eq!(IndexSet::range(0, 10).next_in(10), Err(IndexError::NoSuccessor(10)));
        assert_eq!(evens.prev_in(4), Ok(2));
        assert_eq!(IndexSet::le(-5).next_in(-100), Ok(-99));
    }

    #[test]
    fn gap_examples() {
        assert_eq!(IndexSet::residue(0, 2).gap_sizes().unwrap(), BTreeSet::from([2]));
        let s = IndexSet::finite([0, 1]).union(&IndexSet::residue(0, 3).intersect(&IndexSet::ge(3)));
        assert_eq!(s.gap_sizes().unwrap(), BTreeSet::from([1, 2, 3]));
        assert_eq!(IndexSet::all().gap_sizes().unwrap(), BTreeSet::from([1]));
        assert_eq!(IndexSet::singleton(4).gap_sizes(), Err(IndexError::TooFewElements));
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(IndexSet::residue(0, 2).enumerate(1, 3), vec![2, 4, 6]);
        assert!(IndexSet::empty().enumerate(0, 5).is_empty());
        assert_eq!(five_mod_seven_above_ten().enumerate(0, 2), vec![12, 19]);
    }

    #[test]
    fn canonical_shapes() {
        let s = IndexSet::residue(1, 3);
        assert_eq!(s.period(), 3);
        assert_eq!(s.hi().unwrap().threshold, -1);
        assert_eq!(s.lo().unwrap().threshold, 0);
        // Non-minimal period input collapses.
        let t = IndexSet::from_fn(0, 5, 4, |x| x % 2 == 0);
        assert_eq!(t, IndexSet::residue(0, 2));
        let u = IndexSet::ge(3);
        assert_eq!(u.hi().unwrap().threshold, 2);
        assert!(u.middle().is_empty());
    }

    #[test]
    fn json_round_trip() {
        let s = IndexSet::singleton(3).union(&five_mod_seven_above_ten());
        let js = serde_json::to_string(&s).unwrap();
        let back: IndexSet = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        let raw = r#"{"period":2,"hi":{"threshold":-1,"residues":[0]},"middle":[]}"#;
        let e: IndexSet = serde_json::from_str(raw).unwrap();
        assert_eq!(e, evens_nonneg());
        let bad = r#"{"period":2,"hi":{"threshold":null,"residues":[0]}}"#;
        assert!(serde_json::from_str::<IndexSet>(bad).is_err());
        let out_of_range = r#"{"period":2,"hi":{"threshold":0,"residues":[5]}}"#;
        assert!(serde_json::from_str::<IndexSet>(out_of_range).is_err());
    }

    #[test]
    fn image_and_preimage() {
        let evens = evens_nonneg();
        // j ↦ 3j + (j mod 2): not needed monotone steps beyond non-decreasing.
        let img = evens.image_periodic(1, 3, |k| 3 * k);
        assert_eq!(img, IndexSet::residue(0, 6).intersect(&IndexSet::naturals()));
        let pre = evens.affine_preimage(0, 2);
        assert_eq!(pre, IndexSet::naturals());
        let pre2 = evens.affine_preimage(1, 2);
        assert!(pre2.is_empty());
    }

    pub(crate) fn arb_index_set() -> impl Strategy<Value = IndexSet> {
        (
            1i64..=4,
            -8i64..8,
            0i64..8,
            prop::collection::vec(any::<bool>(), 4),
            prop::collection::vec(any::<bool>(), 4),
            prop::collection::vec(any::<bool>(), 16),
        )
            .prop_map(|(p, lo, span, lp, hp, mid)| {
                let hi = lo + span;
                IndexSet::from_fn(lo, hi, p, |x| {
                    if x > hi {
                        hp[x.rem_euclid(p) as usize]
                    } else if x < lo {
                        lp[x.rem_euclid(p) as usize]
                    } else {
                        mid[(x - lo) as usize]
                    }
                })
            })
    }

    proptest! {
        #[test]
        fn bool_ops_pointwise(a in arb_index_set(), b in arb_index_set()) {
            let u = a.union(&b);
            let i = a.intersect(&b);
            let c = a.complement();
            for x in -10_000i64..=10_000 {
                prop_assert_eq!(u.contains(x), a.contains(x) || b.contains(x));
                prop_assert_eq!(i.contains(x), a.contains(x) && b.contains(x));
                prop_assert_eq!(c.contains(x), !a.contains(x));
            }
        }

        #[test]
        fn gap_sizes_match_brute_force(a in arb_index_set()) {
            if let Ok(g) = a.gap_sizes() {
                let (lo, hi) = a.window();
                let p = a.period();
                let els = a.elements_in(lo - 4 * p, hi + 4 * p);
                let brute: BTreeSet<i64> = els.windows(2).map(|w| w[1] - w[0]).collect();
                prop_assert_eq!(g, brute);
            }
        }

        #[test]
        fn canonical_is_equality_complete(a in arb_index_set(), b in arb_index_set()) {
            let same = (-200i64..=200).all(|x| a.contains(x) == b.contains(x));
            prop_assert_eq!(same, a == b);
            let (lo, hi) = a.window();
            let again = IndexSet::from_fn(lo - 3, hi + 3, a.period() * 2, |x| a.contains(x));
            prop_assert_eq!(again, a);
        }

        #[test]
        fn next_prev_consistent(a in arb_index_set(), k in -30i64..30) {
            match a.next_in(k) {
                Ok(n) => {
                    prop_assert!(n > k && a.contains(n));
                    prop_assert!((k + 1..n).all(|x| !a.contains(x)));
                }
                Err(_) => prop_assert!((k + 1..k + 200).all(|x| !a.contains(x))),
            }
            match a.prev_in(k) {
                Ok(n) => {
                    prop_assert!(n < k && a.contains(n));
                    prop_assert!((n + 1..k).all(|x| !a.contains(x)));
                }
                Err(_) => prop_assert!((k - 200..k).all(|x| !a.contains(x))),
            }
        }

        #[test]
        fn shift_and_json(a in arb_index_set(), c in -20i64..20) {
            let s = a.shift(c);
            for x in -60i64..60 {
                prop_assert_eq!(s.contains(x + c), a.contains(x));
            }
            let js = serde_json::to_string(&a).unwrap();
            prop_assert_eq!(serde_json::from_str::<IndexSet>(&js).unwrap(), a);
        }
    }
}
