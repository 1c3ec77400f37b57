//! Integer-like subgroups, their floor operator, and defining formulas in
//! the language with a predicate for the group.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::chain_forms;
use crate::lexgroup::{rat, GroupElement, GroupError, Quotient, Rational};
use crate::setrep::{BlockSet, SetError};
use crate::structure::{pseudo_arith_decomp, Decomposition, StructError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupsError {
    #[error("step {0} is not positive")]
    NotPositive(GroupElement),
    #[error("steps {0} and {1} are not commensurable in one class")]
    IncompatibleEtas(GroupElement, GroupElement),
    #[error("piece {0} is not normalized")]
    NotNormalized(usize),
    #[error("piece {0} is not contained in the group")]
    NotContained(usize),
    #[error("no pieces")]
    NoPieces,
    #[error("infinite chain through {0} is bounded inside a galaxy and cannot be cut out by the group")]
    NotDefinable(GroupElement),
    #[error("formula syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Structure(#[from] StructError),
}

/// `G = ℚ^lead ⊕ ℤη`: free in the coordinates above `lead`, a lattice
/// generated by `η` from `lead` on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerLikeGroup {
    eta: GroupElement,
}

fn tail_part(x: &GroupElement, lead: usize) -> GroupElement {
    GroupElement::new(x.coords()[lead..].to_vec()).unwrap()
}

fn head_part(x: &GroupElement, lead: usize) -> GroupElement {
    let mut c = x.coords().to_vec();
    for v in c.iter_mut().skip(lead) {
        *v = Rational::zero();
    }
    GroupElement::new(c).unwrap()
}

impl IntegerLikeGroup {
    pub fn new(eta: GroupElement) -> Result<Self, GroupsError> {
        if !eta.is_positive() {
            return Err(GroupsError::NotPositive(eta));
        }
        Ok(IntegerLikeGroup { eta })
    }

    /// Group with step `q` at coordinate `lead` and zero below it.
    pub fn standard(rank: usize, lead: usize, q: Rational) -> Result<Self, GroupsError> {
        let mut c = vec![Rational::zero(); rank];
        c[lead] = q;
        Self::new(GroupElement::new(c)?)
    }

    pub fn rank(&self) -> usize {
        self.eta.rank()
    }

    pub fn lead(&self) -> usize {
        self.eta.lead().unwrap()
    }

    pub fn step(&self) -> &GroupElement {
        &self.eta
    }

    /// The multiple `k` with `x = head + k·η`, if `x ∈ G`.
    fn coefficient(&self, x: &GroupElement) -> Option<BigInt> {
        let l = self.lead();
        let t = tail_part(x, l);
        let e = tail_part(&self.eta, l);
        let q = t.coord(0) / e.coord(0);
        (q.is_integer() && e.scale(&q) == t).then(|| q.to_integer())
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.rank() == self.rank() && self.coefficient(x).is_some()
    }

    /// The unique `b ∈ G` with `b ≤ a < b + η`.
    pub fn floor(&self, a: &GroupElement) -> GroupElement {
        let l = self.lead();
        let Quotient::Finite(c) = tail_part(a, l).floor_div(&tail_part(&self.eta, l)) else {
            unreachable!("the step leads its own tail");
        };
        &head_part(a, l) + &self.eta.mul_int(&c)
    }

    pub fn frac(&self, a: &GroupElement) -> GroupElement {
        a - &self.floor(a)
    }
}

/// `gcd` of positive rationals: the largest `r` with every input in `rℤ`.
fn rational_gcd(qs: &[Rational]) -> Rational {
    let den = qs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let num = qs.iter().fold(BigInt::zero(), |acc, q| acc.gcd(&(q * Rational::from_integer(den.clone())).to_integer()));
    Rational::new(num, den)
}

/// Common group for pieces translated to start at zero; each piece must lie
/// in `ℚ^lead ⊕ ℤη_i`.
pub fn build_group(pieces: &[BlockSet]) -> Result<IntegerLikeGroup, GroupsError> {
    let mut etas = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        let forms = chain_forms(p);
        let first = forms.first().ok_or(GroupsError::NotNormalized(i))?;
        if !first.anchor.is_zero() {
            return Err(GroupsError::NotNormalized(i));
        }
        let letters: Vec<GroupElement> = forms.iter().flat_map(|c| c.word.alphabet()).collect();
        if let Some(e) = letters.first() {
            if letters.iter().any(|x| x != e) {
                return Err(GroupsError::NotNormalized(i));
            }
            etas.push(e.clone());
        }
    }
    let first = etas.first().ok_or(GroupsError::NoPieces)?.clone();
    let mut ratios = Vec::new();
    for e in &etas {
        let q = first.rational_ratio(e).map_err(|_| GroupsError::IncompatibleEtas(first.clone(), e.clone()))?;
        ratios.push(q);
    }
    let g = IntegerLikeGroup::new(first.scale(&rational_gcd(&ratios)))?;
    for (i, p) in pieces.iter().enumerate() {
        for c in chain_forms(p) {
            if !g.contains(&c.anchor) || c.word.alphabet().iter().any(|x| !g.contains(x)) {
                return Err(GroupsError::NotContained(i));
            }
        }
    }
    Ok(g)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub samples: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_element(rng: &mut ChaCha8Rng, rank: usize) -> GroupElement {
    let coords = (0..rank).map(|_| rat(rng.gen_range(-60..=60), rng.gen_range(1..=8))).collect();
    GroupElement::new(coords).unwrap()
}

/// Random checks of the integer-like axioms.
pub fn integer_like_check(g: &IntegerLikeGroup, n: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CheckReport { samples: n, failures: Vec::new() };
    let r = g.rank();
    let l = g.lead();
    let eta = g.step();
    let random_member = |rng: &mut ChaCha8Rng| {
        let k = rng.gen_range(-40i64..=40);
        &head_part(&random_element(rng, r), l) + &eta.mul_i64(k)
    };
    for _ in 0..n {
        let a = random_element(&mut rng, r);
        let b = g.floor(&a);
        if !g.contains(&b) || !(b <= a && a < &b + eta) {
            rep.failures.push(format!("sandwich fails at {a}"));
        }
        let mut rivals = vec![&b + eta, &b - eta];
        if l > 0 {
            rivals.push(&b + &GroupElement::unit(r, l - 1).scale(&rat(1, 2)));
        }
        for c in rivals {
            if g.contains(&c) && c <= a && a < &c + eta {
                rep.failures.push(format!("floor of {a} is not unique"));
            }
        }
        let (x, y) = (random_member(&mut rng), random_member(&mut rng));
        if !g.contains(&(&x - &y)) {
            rep.failures.push(format!("{x} - {y} leaves the group"));
        }
        if x.is_positive() && x < *eta {
            rep.failures.push(format!("{x} is a positive member below the step"));
        }
        if g.floor(&x) != x || g.floor(&(&a + &x)) != &b + &x {
            rep.failures.push(format!("floor is not equivariant at {a}, {x}"));
        }
    }
    rep
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Term {
    Var,
    Const(GroupElement),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Scale(#[serde(with = "crate::lexgroup::rational_string")] Rational, Box<Term>),
    Floor(Box<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formula {
    True,
    False,
    Lt(Term, Term),
    Le(Term, Term),
    Eq(Term, Term),
    InG(Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
}

impl Term {
    pub fn eval(&self, x: &GroupElement, g: &IntegerLikeGroup) -> Result<GroupElement, GroupError> {
        Ok(match self {
            Term::Var => x.clone(),
            Term::Const(c) => c.clone(),
            Term::Add(a, b) => a.eval(x, g)?.checked_add(&b.eval(x, g)?)?,
            Term::Sub(a, b) => a.eval(x, g)?.checked_sub(&b.eval(x, g)?)?,
            Term::Scale(q, t) => t.eval(x, g)?.scale(q),
            Term::Floor(t) => {
                let v = t.eval(x, g)?;
                if v.rank() != g.rank() {
                    return Err(GroupError::RankMismatch { left: v.rank(), right: g.rank() });
                }
                g.floor(&v)
            }
        })
    }
}

impl Formula {
    pub fn eval(&self, x: &GroupElement, g: &IntegerLikeGroup) -> Result<bool, GroupError> {
        let cmp = |a: &Term, b: &Term| -> Result<std::cmp::Ordering, GroupError> { a.eval(x, g)?.checked_cmp(&b.eval(x, g)?) };
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Lt(a, b) => cmp(a, b)?.is_lt(),
            Formula::Le(a, b) => cmp(a, b)?.is_le(),
            Formula::Eq(a, b) => cmp(a, b)?.is_eq(),
            Formula::InG(t) => {
                let v = t.eval(x, g)?;
                if v.rank() != g.rank() {
                    return Err(GroupError::RankMismatch { left: v.rank(), right: g.rank() });
                }
                g.contains(&v)
            }
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval(x, g)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval(x, g)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Not(f) => !f.eval(x, g)?,
        })
    }
}

pub fn eval_formula(phi: &Formula, x: &GroupElement, g: &IntegerLikeGroup) -> Result<bool, GroupError> {
    phi.eval(x, g)
}

fn write_const(f: &mut fmt::Formatter<'_>, c: &GroupElement) -> fmt::Result {
    write!(f, "(const")?;
    for v in c.coords() {
        write!(f, " {v}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var => write!(f, "x"),
            Term::Const(c) => write_const(f, c),
            Term::Add(a, b) => write!(f, "(+ {a} {b})"),
            Term::Sub(a, b) => write!(f, "(- {a} {b})"),
            Term::Scale(q, t) => write!(f, "(* {q} {t})"),
            Term::Floor(t) => write!(f, "(floor {t})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, fs: &[Formula]| {
            write!(f, "({head}")?;
            for x in fs {
                write!(f, " {x}")?;
            }
            write!(f, ")")
        };
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Lt(a, b) => write!(f, "(lt {a} {b})"),
            Formula::Le(a, b) => write!(f, "(le {a} {b})"),
            Formula::Eq(a, b) => write!(f, "(eq {a} {b})"),
            Formula::InG(t) => write!(f, "(in-G {t})"),
            Formula::And(fs) => list(f, "and", fs),
            Formula::Or(fs) => list(f, "or", fs),
            Formula::Not(x) => write!(f, "(not {x})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

fn tokenize(s: &str) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if !cur.is_empty() {
                out.push((std::mem::take(&mut cur), start));
            }
            if !ch.is_whitespace() {
                out.push((ch.to_string(), i));
            }
        } else {
            if cur.is_empty() {
                start = i;
            }
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push((cur, start));
    }
    out
}

fn read_sexp(toks: &[(String, usize)], i: &mut usize, end: usize) -> Result<Sexp, GroupsError> {
    let err = |pos: usize, msg: &str| GroupsError::Syntax { pos, msg: msg.into() };
    let Some((t, pos)) = toks.get(*i) else {
        return Err(err(end, "unexpected end of input"));
    };
    *i += 1;
    match t.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match toks.get(*i) {
                    None => return Err(err(end, "unclosed parenthesis")),
                    Some((t, _)) if t == ")" => {
                        *i += 1;
                        return Ok(Sexp::List(items, *pos));
                    }
                    _ => items.push(read_sexp(toks, i, end)?),
                }
            }
        }
        ")" => Err(err(*pos, "unexpected ')'")),
        _ => Ok(Sexp::Atom(t.clone(), *pos)),
    }
}

fn pos_of(s: &Sexp) -> usize {
    match s {
        Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
    }
}

fn to_term(s: &Sexp, rank: usize) -> Result<Term, GroupsError> {
    let err = |msg: &str| GroupsError::Syntax { pos: pos_of(s), msg: msg.into() };
    match s {
        Sexp::Atom(a, _) if a == "x" => Ok(Term::Var),
        Sexp::Atom(a, _) if a == "0" => Ok(Term::Const(GroupElement::zero(rank))),
        Sexp::Atom(..) => Err(err("expected a term")),
        Sexp::List(items, _) => {
            let head = match items.first() {
                Some(Sexp::Atom(h, _)) => h.as_str(),
                _ => return Err(err("expected an operator")),
            };
            let args = &items[1..];
            let two = || -> Result<(Box<Term>, Box<Term>), GroupsError> {
                if args.len() != 2 {
                    return Err(err("expected two arguments"));
                }
                Ok((Box::new(to_term(&args[0], rank)?), Box::new(to_term(&args[1], rank)?)))
            };
            match head {
                "const" => {
                    let coords = args
                        .iter()
                        .map(|a| match a {
                            Sexp::Atom(v, _) => crate::lexgroup::parse_rational(v).map_err(|_| err("bad rational")),
                            _ => Err(err("bad rational")),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    if coords.len() != rank {
                        return Err(err("constant has the wrong rank"));
                    }
                    Ok(Term::Const(GroupElement::new(coords)?))
                }
                "+" => two().map(|(a, b)| Term::Add(a, b)),
                "-" => two().map(|(a, b)| Term::Sub(a, b)),
                "*" => match args {
                    [Sexp::Atom(q, _), t] => Ok(Term::Scale(
                        crate::lexgroup::parse_rational(q).map_err(|_| err("bad scalar"))?,
                        Box::new(to_term(t, rank)?),
                    )),
                    _ => Err(err("expected (* q term)")),
                },
                "floor" if args.len() == 1 => Ok(Term::Floor(Box::new(to_term(&args[0], rank)?))),
                _ => Err(err("unknown term operator")),
            }
        }
    }
}

fn to_formula(s: &Sexp, rank: usize) -> Result<Formula, GroupsError> {
    let err = |msg: &str| GroupsError::Syntax { pos: pos_of(s), msg: msg.into() };
    match s {
        Sexp::Atom(a, _) if a == "true" => Ok(Formula::True),
        Sexp::Atom(a, _) if a == "false" => Ok(Formula::False),
        Sexp::Atom(..) => Err(err("expected a formula")),
        Sexp::List(items, _) => {
            let head = match items.first() {
                Some(Sexp::Atom(h, _)) => h.as_str(),
                _ => return Err(err("expected an operator")),
            };
            let args = &items[1..];
            let pair = || -> Result<(Term, Term), GroupsError> {
                if args.len() != 2 {
                    return Err(err("expected two terms"));
                }
                Ok((to_term(&args[0], rank)?, to_term(&args[1], rank)?))
            };
            let many = || args.iter().map(|a| to_formula(a, rank)).collect::<Result<Vec<_>, _>>();
            match head {
                "lt" => pair().map(|(a, b)| Formula::Lt(a, b)),
                "le" => pair().map(|(a, b)| Formula::Le(a, b)),
                "eq" => pair().map(|(a, b)| Formula::Eq(a, b)),
                "in-G" if args.len() == 1 => Ok(Formula::InG(to_term(&args[0], rank)?)),
                "and" => many().map(Formula::And),
                "or" => many().map(Formula::Or),
                "not" if args.len() == 1 => Ok(Formula::Not(Box::new(to_formula(&args[0], rank)?))),
                _ => Err(err("unknown formula operator")),
            }
        }
    }
}

/// Parses the S-expression syntax printed by `Display`.
pub fn parse_formula(text: &str, rank: usize) -> Result<Formula, GroupsError> {
    let toks = tokenize(text);
    let mut i = 0;
    let s = read_sexp(&toks, &mut i, text.len())?;
    if let Some((_, pos)) = toks.get(i) {
        return Err(GroupsError::Syntax { pos: *pos, msg: "trailing input".into() });
    }
    to_formula(&s, rank)
}

/// Pieces of a decomposition cut into chains, each translated to start at zero.
pub fn normalized_chains(dec: &Decomposition) -> Vec<(GroupElement, BlockSet)> {
    let mut out = Vec::new();
    for p in &dec.pieces {
        for c in chain_forms(&p.set) {
            let blocks = c.to_blocks(&c.positions());
            let set = BlockSet::validate(p.set.rank(), false, blocks).unwrap();
            let shifted = set.translate(&-&c.anchor).unwrap();
            out.push((c.anchor.clone(), shifted));
        }
    }
    out
}

/// A defining formula for `d` over the group built from its decomposition.
pub fn emit_formula(d: &BlockSet) -> Result<(IntegerLikeGroup, Formula), GroupsError> {
    let dec = pseudo_arith_decomp(d)?;
    let chains = normalized_chains(&dec);
    let sets: Vec<BlockSet> = chains.iter().map(|(_, s)| s.clone()).collect();
    let g = if sets.is_empty() {
        let r = d.rank();
        IntegerLikeGroup::standard(r, r - 1, Rational::one())?
    } else {
        build_group(&sets)?
    };
    let mut clauses: Vec<Formula> = dec.points.iter().map(|p| Formula::Eq(Term::Var, Term::Const(p.clone()))).collect();
    for p in &dec.pieces {
        let n = g.step().rational_ratio(&p.eta)?;
        for c in chain_forms(&p.set) {
            let infinite = c.word.left.is_some() || c.word.right.is_some();
            if infinite && p.eta.lead() != Some(0) {
                return Err(GroupsError::NotDefinable(c.anchor));
            }
            let shifted = Term::Sub(Box::new(Term::Var), Box::new(Term::Const(c.anchor.clone())));
            let scaled = if n.is_one() { shifted } else { Term::Scale(n.recip(), Box::new(shifted)) };
            let mut conj = vec![Formula::InG(scaled)];
            if let Some(lo) = c.min_position() {
                conj.push(Formula::Le(Term::Const(c.element(lo)), Term::Var));
            }
            if let Some(hi) = c.max_position() {
                conj.push(Formula::Le(Term::Var, Term::Const(c.element(hi))));
            }
            clauses.push(Formula::And(conj));
        }
    }
    let phi = match clauses.len() {
        0 => Formula::False,
        1 => clauses.pop().unwrap(),
        _ => Formula::Or(clauses),
    };
    Ok((g, phi))
}

/// `k` random rationals near the coordinates of `d`'s first elements that
/// are not members.
pub fn non_members(d: &BlockSet, k: usize, seed: u64) -> Vec<GroupElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let r = d.rank();
    let mut guard = 0;
    while out.len() < k && guard < 100 * k + 100 {
        guard += 1;
        let x = random_element(&mut rng, r);
        if !d.contains(&x) {
            out.push(x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semilinear::IndexSet;
    use crate::setrep::Block;
    use proptest::prelude::*;

    fn g(s: &str) -> GroupElement {
        s.parse().unwrap()
    }

    fn qz() -> IntegerLikeGroup {
        IntegerLikeGroup::standard(2, 1, rat(1, 1)).unwrap()
    }

    fn blk(base: &str, pat: &[&str], k: IndexSet) -> Block {
        Block::new(g(base), pat.iter().map(|p| g(p)).collect(), k).unwrap()
    }

    #[test]
    fn floor_examples() {
        assert_eq!(qz().floor(&g("(1/2,7/3)")), g("(1/2,2)"));
        assert_eq!(qz().floor(&g("(1/2,-7/3)")), g("(1/2,-3)"));
        let g3 = IntegerLikeGroup::standard(3, 1, rat(1, 1)).unwrap();
        assert_eq!(g3.floor(&g("(1/2,2,-1)")), g("(1/2,1,0)"));
        assert_eq!(qz().frac(&g("(1/2,7/3)")), g("(0,1/3)"));
        assert!(qz().frac(&g("(5,4)")).is_zero());
        assert_eq!(g3.frac(&g("(1/2,2,-1)")), g("(0,1,-1)"));
    }

    #[test]
    fn zero_step_rejected() {
        assert!(matches!(IntegerLikeGroup::new(g("(0,0)")), Err(GroupsError::NotPositive(_))));
    }

    #[test]
    fn build_group_examples() {
        let p2 = BlockSet::single(blk("(0,0)", &["(0,2)"], IndexSet::range(0, 4)));
        let p3 = BlockSet::single(blk("(0,0)", &["(0,3)"], IndexSet::range(0, 4)));
        let gr = build_group(&[p2.clone(), p3]).unwrap();
        assert_eq!((gr.step(), gr.lead()), (&g("(0,1)"), 1));
        let p1 = BlockSet::single(blk("(0,0)", &["(0,1)"], IndexSet::naturals()));
        assert_eq!(build_group(&[p1.clone()]).unwrap(), qz());
        let top = BlockSet::single(blk("(0,0)", &["(1,0)"], IndexSet::naturals()));
        assert!(matches!(build_group(&[p1, top]), Err(GroupsError::IncompatibleEtas(..))));
        let shifted = p2.translate(&g("(0,1)")).unwrap();
        assert_eq!(build_group(&[shifted]), Err(GroupsError::NotNormalized(0)));
    }

    #[test]
    fn axioms_hold() {
        assert!(integer_like_check(&qz(), 1000, 0).passed());
        let g3 = IntegerLikeGroup::new(g("(0,1,0)")).unwrap();
        assert!(integer_like_check(&g3, 500, 1).passed());
        let skew = IntegerLikeGroup::new(g("(0,2,1/3)")).unwrap();
        assert!(integer_like_check(&skew, 500, 2).passed());
    }

    #[test]
    fn formula_eval_examples() {
        let phi = Formula::InG(Term::Var);
        assert!(phi.eval(&g("(1/2,3)"), &qz()).unwrap());
        assert!(!phi.eval(&g("(1/2,1/3)"), &qz()).unwrap());
    }

    #[test]
    fn formula_round_trip() {
        let phi = Formula::And(vec![
            Formula::InG(Term::Var),
            Formula::Le(Term::Const(g("(0,0)")), Term::Var),
            Formula::Lt(Term::Var, Term::Const(g("(1,0)"))),
            Formula::Not(Box::new(Formula::Eq(Term::Floor(Box::new(Term::Scale(rat(1, 3), Box::new(Term::Var)))), Term::Var))),
        ]);
        let text = phi.to_string();
        assert_eq!(parse_formula(&text, 2).unwrap(), phi);
        assert!(parse_formula("(and (in-G x) (le 0 x)", 2).is_err());
        assert_eq!(parse_formula("(le 0 x)", 2).unwrap(), Formula::Le(Term::Const(g("(0,0)")), Term::Var));
    }

    #[test]
    fn emit_singleton_and_lattice() {
        let p = BlockSet::from_points(2, [g("(3,1/2)")]).unwrap();
        let (_, phi) = emit_formula(&p).unwrap();
        assert_eq!(phi, Formula::Eq(Term::Var, Term::Const(g("(3,1/2)"))));
        let d = BlockSet::single(blk("(0,0)", &["(0,1)", "(0,2)"], IndexSet::range(0, 40)));
        let (gr, phi) = emit_formula(&d).unwrap();
        for x in d.elements().unwrap() {
            assert!(phi.eval(&x, &gr).unwrap());
        }
        for x in non_members(&d, 300, 4) {
            assert!(!phi.eval(&x, &gr).unwrap());
        }
    }

    #[test]
    fn galaxy_bounded_chain_not_definable() {
        let d = BlockSet::single(blk("(0,0)", &["(0,1)"], IndexSet::naturals()));
        assert!(matches!(emit_formula(&d), Err(GroupsError::NotDefinable(_))));
    }

    #[test]
    fn top_class_chains_definable() {
        let d = BlockSet::single(blk("(0,1/2)", &["(1,0)", "(2,1)"], IndexSet::ge(-5)));
        let (gr, phi) = emit_formula(&d).unwrap();
        let els = d.enumerate_window(&d.min().unwrap(), 300).unwrap();
        for x in &els {
            assert!(phi.eval(x, &gr).unwrap(), "{x}");
        }
        for x in non_members(&d, 500, 9) {
            assert!(!phi.eval(&x, &gr).unwrap(), "{x}");
        }
    }

    proptest! {
        #[test]
        fn floor_sandwich_and_equivariance(a in (-50i64..50, 1i64..6, -50i64..50, 1i64..6), k in -20i64..20, s in 1i64..5) {
            let gr = IntegerLikeGroup::new(GroupElement::from_rats(&[(0, 1), (s, 3)])).unwrap();
            let x = GroupElement::from_rats(&[(a.0, a.1), (a.2, a.3)]);
            let b = gr.floor(&x);
            prop_assert!(gr.contains(&b));
            prop_assert!(b <= x && x < &b + gr.step());
            prop_assert!(!gr.frac(&x).is_negative());
            let h = &GroupElement::from_rats(&[(a.2, a.1), (0, 1)]) + &gr.step().mul_i64(k);
            prop_assert_eq!(gr.floor(&(&x + &h)), &b + &h);
            prop_assert_eq!(gr.floor(&b), b);
        }
    }
}
