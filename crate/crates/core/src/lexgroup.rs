//! The rank-r lexicographically ordered group ℚ^r.
//!
//! Coordinate 0 is the most significant. The Archimedean class of a positive
//! element is the index of its leading nonzero coordinate, so a smaller index
//! means a larger class.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

pub const DEFAULT_RANK: usize = 2;
pub const MAX_RANK: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("rank must lie in 1..={MAX_RANK}, got {0}")]
    BadRank(usize),
    #[error("expected a positive element, got {0}")]
    NotPositive(GroupElement),
    #[error("{x} is zero")]
    ZeroElement { x: GroupElement },
    #[error("{y} is not a rational multiple of {x}")]
    NotRationallyDependent { x: GroupElement, y: GroupElement },
    #[error("cannot parse `{0}`")]
    Parse(String),
}

/// Reads the session rank from `OAG_RANK`, falling back to [`DEFAULT_RANK`].
pub fn session_rank() -> Result<usize, GroupError> {
    match std::env::var("OAG_RANK") {
        Ok(v) => {
            let r: usize = v.trim().parse().map_err(|_| GroupError::Parse(v.clone()))?;
            check_rank(r)?;
            Ok(r)
        }
        Err(_) => Ok(DEFAULT_RANK),
    }
}

pub fn check_rank(r: usize) -> Result<(), GroupError> {
    if (1..=MAX_RANK).contains(&r) {
        Ok(())
    } else {
        Err(GroupError::BadRank(r))
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational, GroupError> {
    let t = s.trim();
    let bad = || GroupError::Parse(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Floor of a rational as an `i64`, if it fits.
pub fn floor_i64(q: &Rational) -> Option<i64> {
    q.floor().to_integer().to_i64()
}

/// A point of ℚ^r.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    coords: Vec<Rational>,
}

/// Archimedean class of a positive element, ordered so that a smaller
/// leading index compares as a larger class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArchClass {
    pub leading: usize,
}

impl Ord for ArchClass {
    fn cmp(&self, other: &Self) -> Ordering {
        other.leading.cmp(&self.leading)
    }
}

impl PartialOrd for ArchClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of dividing one element by a positive step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quotient {
    Finite(BigInt),
    /// The dividend is positive and Archimedean-larger than the step.
    PlusInfinity,
    /// The dividend is negative and Archimedean-larger than the step.
    MinusInfinity,
}

impl GroupElement {
    pub fn new(coords: Vec<Rational>) -> Result<Self, GroupError> {
        check_rank(coords.len())?;
        Ok(GroupElement { coords })
    }

    pub fn zero(rank: usize) -> Self {
        GroupElement { coords: vec![Rational::zero(); rank] }
    }

    /// The element with a 1 in coordinate `i` and zeros elsewhere.
    pub fn unit(rank: usize, i: usize) -> Self {
        let mut e = Self::zero(rank);
        e.coords[i] = Rational::one();
        e
    }

    pub fn from_ints(v: &[i64]) -> Self {
        GroupElement { coords: v.iter().map(|&n| int(n)).collect() }
    }

    pub fn from_rats(v: &[(i64, i64)]) -> Self {
        GroupElement { coords: v.iter().map(|&(n, d)| rat(n, d)).collect() }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Rational {
        &self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_positive(&self) -> bool {
        self.coords.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_positive())
    }

    pub fn is_negative(&self) -> bool {
        self.coords.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative())
    }

    /// Index of the first nonzero coordinate.
    pub fn lead(&self) -> Option<usize> {
        self.coords.iter().position(|c| !c.is_zero())
    }

    fn same_rank(&self, other: &Self) -> Result<(), GroupError> {
        if self.rank() == other.rank() {
            Ok(())
        } else {
            Err(GroupError::RankMismatch { left: self.rank(), right: other.rank() })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, GroupError> {
        self.same_rank(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, GroupError> {
        self.same_rank(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn checked_cmp(&self, other: &Self) -> Result<Ordering, GroupError> {
        self.same_rank(other)?;
        Ok(self.cmp(other))
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        GroupElement { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
    }

    fn sub_unchecked(&self, other: &Self) -> Self {
        GroupElement { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        GroupElement { coords: self.coords.iter().map(|c| c * q).collect() }
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        GroupElement { coords: self.coords.iter().map(|c| c * n).collect() }
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        self.mul_int(&BigInt::from(n))
    }

    pub fn arch_class(&self) -> Result<ArchClass, GroupError> {
        if !self.is_positive() {
            return Err(GroupError::NotPositive(self.clone()));
        }
        Ok(ArchClass { leading: self.lead().unwrap() })
    }

    /// `self ≪ other`: every integer multiple of `self` stays below `other`.
    pub fn arch_ll(&self, other: &Self) -> Result<bool, GroupError> {
        self.same_rank(other)?;
        Ok(self.arch_class()?.leading > other.arch_class()?.leading)
    }

    /// The rational `q` with `other = q·self`.
    pub fn rational_ratio(&self, other: &Self) -> Result<Rational, GroupError> {
        self.same_rank(other)?;
        let Some(i) = self.lead() else {
            return Err(GroupError::ZeroElement { x: self.clone() });
        };
        let q = &other.coords[i] / &self.coords[i];
        if &self.scale(&q) == other {
            Ok(q)
        } else {
            Err(GroupError::NotRationallyDependent { x: self.clone(), y: other.clone() })
        }
    }

    /// Largest integer `c` with `c·step ≤ self`, for a positive `step`.
    pub fn floor_div(&self, step: &Self) -> Quotient {
        debug_assert!(step.is_positive());
        let Some(ld) = self.lead() else {
            return Quotient::Finite(BigInt::zero());
        };
        let ls = step.lead().expect("positive step");
        match ld.cmp(&ls) {
            Ordering::Less => {
                if self.is_positive() {
                    Quotient::PlusInfinity
                } else {
                    Quotient::MinusInfinity
                }
            }
            Ordering::Greater => {
                if self.is_positive() {
                    Quotient::Finite(BigInt::zero())
                } else {
                    Quotient::Finite(-BigInt::one())
                }
            }
            Ordering::Equal => {
                let q = &self.coords[ld] / &step.coords[ls];
                let mut c = q.floor().to_integer();
                if &step.mul_int(&c) > self {
                    c -= 1;
                }
                Quotient::Finite(c)
            }
        }
    }

    /// Least common denominator of the coordinates.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

impl Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch");
        self.add_unchecked(rhs)
    }
}

impl Add for GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: GroupElement) -> GroupElement {
        &self + &rhs
    }
}

impl Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch");
        self.sub_unchecked(rhs)
    }
}

impl Sub for GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: GroupElement) -> GroupElement {
        &self - &rhs
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement { coords: self.coords.iter().map(|c| -c).collect() }
    }
}

impl Neg for GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        -&self
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for GroupElement {
    type Err = GroupError;

    /// Parses `(a/b, c/d, …)`.
    fn from_str(s: &str) -> Result<Self, GroupError> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| GroupError::Parse(s.to_string()))?;
        let coords = inner.split(',').map(parse_rational).collect::<Result<Vec<_>, _>>()?;
        GroupElement::new(coords)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        let coords =
            v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>().map_err(D::Error::custom)?;
        GroupElement::new(coords).map_err(D::Error::custom)
    }
}

/// Serde helper for rationals stored as `"p/q"` strings.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        q.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}
