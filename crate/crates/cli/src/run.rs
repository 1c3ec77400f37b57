//! Evaluation of set expressions into JSON reports.

use std::path::Path;

use oag_core::calculus::{c_star_set, chain_forms, diff_set, iter_diff, same_set, CalcError};
use oag_core::groups::{emit_formula, GroupsError};
use oag_core::lexgroup::{session_rank, GroupElement, GroupError};
use oag_core::setrep::{Block, BlockSet, SetError, StdForm};
use oag_core::structure::{arch_partition, detect_period, p_sigma, pseudo_arith_decomp, uniformize, Decomposition, StructError};
use oag_core::witness::{build_inp_pattern, build_interlaced, standard_family, verify_instance, InpPattern, WitnessError};
use serde_json::{json, Value};
use thiserror::Error;

use crate::expr::SetExpr;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("io: {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("json: {0}")]
    Json(String),
    #[error("parse: {0}")]
    Syntax(#[from] crate::expr::SyntaxError),
    #[error("lexgroup: {0}")]
    Group(#[from] GroupError),
    #[error("setrep: {0}")]
    Set(#[from] SetError),
    #[error("calculus: {0}")]
    Calc(#[from] CalcError),
    #[error("structure: {0}")]
    Struct(#[from] StructError),
    #[error("groups: {0}")]
    Groups(#[from] GroupsError),
    #[error("witness: {0}")]
    Witness(#[from] WitnessError),
    #[error("{op} expects a set operand")]
    NotASet { op: &'static str },
}

#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    pub jobs: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { seed: 0, jobs: 1 }
    }
}

/// A JSON report plus whether every check it carries passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub json: Value,
    pub verified: bool,
}

impl Outcome {
    fn ok(json: Value) -> Self {
        Outcome { json, verified: true }
    }
}

fn read_json(path: &Path) -> Result<Value, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Io { path: path.display().to_string(), msg: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| RunError::Json(format!("{}: {e}", path.display())))
}

/// Reads a `blockset-v1` file, or a `stdform-v1` file of a discrete set.
pub fn load_set(path: &Path) -> Result<BlockSet, RunError> {
    let v = read_json(path)?;
    if v.get("format").and_then(Value::as_str) == Some("stdform-v1") {
        let sf: StdForm = serde_json::from_value(v).map_err(|e| RunError::Json(e.to_string()))?;
        return Ok(sf.to_blockset()?);
    }
    serde_json::from_value(v).map_err(|e| RunError::Json(format!("{}: {e}", path.display())))
}

fn strings<'a>(xs: impl IntoIterator<Item = &'a GroupElement>) -> Vec<String> {
    xs.into_iter().map(|x| x.to_string()).collect()
}

fn set_json(d: &BlockSet) -> Value {
    let mut v = json!({ "set": d, "finite": d.is_finite() });
    if let Ok(els) = d.elements() {
        v["elements"] = json!(strings(&els));
    }
    v
}

pub fn decomposition_json(dec: &Decomposition) -> Value {
    json!({
        "pieces": dec.pieces.iter().map(|p| json!({ "set": p.set, "eta": p.eta.to_string() })).collect::<Vec<_>>(),
        "points": strings(&dec.points),
        "certificates": {
            "N": dec.certificates.n,
            "mu": dec.certificates.mu,
            "generators": dec.certificates.generators.iter().map(|g| strings(g)).collect::<Vec<_>>(),
        },
    })
}

fn set_of(expr: &SetExpr, op: &'static str, opts: &Options) -> Result<BlockSet, RunError> {
    match eval(expr, opts)? {
        Val::Set(d) => Ok(d),
        Val::Report(_) => Err(RunError::NotASet { op }),
    }
}

enum Val {
    Set(BlockSet),
    Report(Outcome),
}

fn eval(expr: &SetExpr, opts: &Options) -> Result<Val, RunError> {
    use SetExpr::*;
    let report = |v: Value| Ok(Val::Report(Outcome::ok(v)));
    match expr {
        Load(p) => Ok(Val::Set(load_set(Path::new(p))?)),
        Block { base, pattern, indices } => {
            let b = oag_core::setrep::Block::new(base.clone(), pattern.clone(), indices.to_set())?;
            Ok(Val::Set(BlockSet::validate(b.rank(), false, vec![b])?))
        }
        Points(v) => {
            let rank = v.first().map_or_else(session_rank, |x| Ok(x.rank()))?;
            Ok(Val::Set(BlockSet::from_points(rank, v.iter().cloned())?))
        }
        Diff(a) => {
            let d = set_of(a, "diff", opts)?;
            Ok(Val::Set(BlockSet::from_points(d.rank(), diff_set(&d)?)?))
        }
        Iter(a, n) => Ok(Val::Set(iter_diff(&set_of(a, "iter", opts)?, *n)?)),
        Union(a, b) => Ok(Val::Set(set_of(a, "union", opts)?.union(&set_of(b, "union", opts)?)?)),
        Translate(a, c) => Ok(Val::Set(set_of(a, "translate", opts)?.translate(c)?)),
        Scale(a, q) => Ok(Val::Set(set_of(a, "scale", opts)?.scale(q)?)),
        Psigma(a, s) => Ok(Val::Set(p_sigma(&set_of(a, "psigma", opts)?, s)?)),
        Decompose(a) => report(decomposition_json(&pseudo_arith_decomp(&set_of(a, "decompose", opts)?)?)),
        Chains(a) => {
            let d = set_of(a, "chains", opts)?;
            let forms = chain_forms(&d);
            report(json!({ "chains": forms.iter().map(|c| json!({
                "anchor": c.anchor.to_string(),
                "word": c.word,
                "bounded_below": c.min_position().is_some(),
                "bounded_above": c.max_position().is_some(),
            })).collect::<Vec<_>>() }))
        }
        Cstar(a) => {
            let d = set_of(a, "cstar", opts)?;
            report(json!({ "classes": c_star_set(&d).iter().map(|c| c.leading).collect::<Vec<_>>() }))
        }
        Uniformize(a) => {
            let parts = uniformize(&set_of(a, "uniformize", opts)?)?;
            report(json!({
                "pieces": parts.iter().map(|p| json!({ "set": p.set, "N": p.n })).collect::<Vec<_>>(),
                "certificates": { "N": parts.iter().map(|p| p.n).collect::<Vec<_>>() },
            }))
        }
        Archsplit(a) => {
            let parts = arch_partition(&set_of(a, "archsplit", opts)?)?;
            report(json!({ "pieces": parts }))
        }
        Defing(a) => {
            let (g, phi) = emit_formula(&set_of(a, "defing", opts)?)?;
            report(json!({ "group": { "eta": g.step().to_string(), "lead": g.lead() }, "formula": phi.to_string() }))
        }
        Witness { levels, columns, dense } => {
            let sum = build_interlaced(&standard_family(*levels))?;
            let p = build_inp_pattern(&sum, *columns, *dense, opts.seed)?;
            let rep = verify_instance(&p);
            let verified = rep.passed();
            Ok(Val::Report(Outcome { json: json!({ "instance": p, "report": rep }), verified }))
        }
    }
}

pub fn run(expr: &SetExpr, opts: &Options) -> Result<Outcome, RunError> {
    if let SetExpr::Diff(a) = expr {
        let d = set_of(a, "diff", opts)?;
        return Ok(Outcome::ok(json!({ "diff": strings(&diff_set(&d)?) })));
    }
    match eval(expr, opts)? {
        Val::Set(d) => Ok(Outcome::ok(set_json(&d))),
        Val::Report(o) => Ok(o),
    }
}

/// Period certificates for every chain of `d` with an infinite side.
pub fn periods(d: &BlockSet, bound: usize) -> Outcome {
    let mut rows = Vec::new();
    for (i, c) in chain_forms(d).iter().enumerate() {
        let mut w = c.word.clone();
        let mut row = json!({ "chain": i });
        if w.right.is_none() && w.left.is_some() {
            w = oag_core::calculus::DifferenceWord { left: None, middle: w.middle.iter().rev().cloned().collect(), right: w.left.map(|l| l.into_iter().rev().collect()) };
            row["side"] = json!("left");
        } else {
            row["side"] = json!("right");
        }
        match detect_period(&w, bound) {
            Ok(p) => row["period"] = json!(p),
            Err(e) => row["error"] = json!(e.to_string()),
        }
        rows.push(row);
    }
    Outcome::ok(json!({ "chains": rows }))
}

/// Rechecks a decomposition report against `d` without recomputing it.
pub fn replay_decomposition(d: &BlockSet, cert: &Value) -> Result<Outcome, RunError> {
    let bad = |m: &str| RunError::Json(format!("certificate: {m}"));
    let pieces = cert.get("pieces").and_then(Value::as_array).ok_or_else(|| bad("missing pieces"))?;
    let mut failures = Vec::new();
    let mut acc = BlockSet::empty(d.rank());
    for (i, p) in pieces.iter().enumerate() {
        let set: BlockSet = serde_json::from_value(p["set"].clone()).map_err(|e| bad(&e.to_string()))?;
        let eta: GroupElement = p["eta"].as_str().ok_or_else(|| bad("missing eta"))?.parse()?;
        let gaps = diff_set(&set)?;
        if gaps.len() != 1 || !gaps.contains(&eta) {
            failures.push(format!("piece {i} is not arithmetic with step {eta}"));
        }
        acc = acc.union(&set)?;
    }
    let points: Vec<GroupElement> = cert["points"]
        .as_array()
        .ok_or_else(|| bad("missing points"))?
        .iter()
        .map(|v| v.as_str().ok_or_else(|| bad("bad point")).and_then(|s| Ok(s.parse()?)))
        .collect::<Result<_, RunError>>()?;
    acc = acc.union(&BlockSet::from_points(d.rank(), points)?)?;
    if !same_set(&acc, d) {
        failures.push("pieces do not reassemble the set".into());
    }
    Ok(Outcome { verified: failures.is_empty(), json: json!({ "replay": "decomposition", "failures": failures }) })
}

/// Rechecks an inp-pattern instance file.
pub fn replay_witness(cert: &Value) -> Result<Outcome, RunError> {
    let inst = cert.get("instance").unwrap_or(cert).clone();
    let p: InpPattern = serde_json::from_value(inst).map_err(|e| RunError::Json(e.to_string()))?;
    let rep = verify_instance(&p);
    Ok(Outcome { verified: rep.passed(), json: json!({ "replay": "witness", "report": rep }) })
}

pub fn read_certificate(path: &Path) -> Result<Value, RunError> {
    read_json(path)
}

pub(crate) fn block_windows(d: &BlockSet, n: usize) -> Vec<(Vec<GroupElement>, bool)> {
    d.blocks().iter().map(|b| window_of(b, n)).collect()
}

/// Elements of `b` across its finite middle and three periods on each side,
/// padded out to about `n`, with a flag for whether the core fit.
fn window_of(b: &Block, n: usize) -> (Vec<GroupElement>, bool) {
    let k = b.indices();
    let (lo, hi) = k.window();
    let p = oag_core::semilinear::lcm(k.period(), b.m());
    let core = k.elements_in(lo - 3 * p, hi + 3 * p);
    let closed = core.len() <= n;
    let pad = (n.saturating_sub(core.len()) / 2) as i64;
    let ks = if closed { k.elements_in(lo - 3 * p - pad, hi + 3 * p + pad) } else { core };
    (ks.into_iter().take(n).map(|i| b.element(i)).collect(), closed)
}
