//! Brute-force rechecks of symbolic results on enumerated windows.

use std::collections::BTreeSet;

use oag_core::calculus::{diff_set, successor, CalcError};
use oag_core::lexgroup::GroupElement;
use oag_core::setrep::BlockSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::run::{block_windows, Outcome, RunError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleOp {
    Diff,
    Successor,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub op: String,
    pub window: usize,
    pub status: String,
    pub checked: usize,
    pub missing: Vec<String>,
    pub extra: Vec<String>,
    pub mismatches: Vec<String>,
}

const EXACT: &str = "exact-match";
const INCONCLUSIVE: &str = "window inconclusive";
const MISMATCH: &str = "mismatch";

fn diff_oracle(d: &BlockSet, n: usize) -> Result<OracleReport, RunError> {
    let wins = block_windows(d, n);
    let closed = wins.iter().all(|(_, c)| *c);
    let mut brute = BTreeSet::new();
    for (i, (els, _)) in wins.iter().enumerate() {
        brute.extend(els.windows(2).map(|w| &w[1] - &w[0]));
        let b = &d.blocks()[i];
        if let (true, Some(next)) = (b.indices().bounded_above(), d.blocks().get(i + 1)) {
            if next.indices().bounded_below() {
                if let (Some(x), Some(y)) = (els.last(), wins[i + 1].0.first()) {
                    brute.insert(y - x);
                }
            }
        }
    }
    let sym = diff_set(d)?;
    let missing: Vec<String> = sym.difference(&brute).map(|x| x.to_string()).collect();
    let extra: Vec<String> = brute.difference(&sym).map(|x| x.to_string()).collect();
    let status = if missing.is_empty() && extra.is_empty() {
        EXACT
    } else if !closed {
        INCONCLUSIVE
    } else {
        MISMATCH
    };
    Ok(OracleReport { op: "diff".into(), window: n, status: status.into(), checked: brute.len(), missing, extra, mismatches: Vec::new() })
}

enum Expect {
    Next(GroupElement),
    Maximal,
    NoSuccessor,
}

fn successor_oracle(d: &BlockSet, n: usize, seed: u64, jobs: usize) -> OracleReport {
    let wins = block_windows(d, n);
    let mut cases = Vec::new();
    for (i, (els, closed)) in wins.iter().enumerate() {
        let b = &d.blocks()[i];
        for (j, x) in els.iter().enumerate() {
            let expect = if let Some(y) = els.get(j + 1) {
                Expect::Next(y.clone())
            } else if !b.indices().bounded_above() || !*closed {
                continue;
            } else {
                match d.blocks().get(i + 1) {
                    None => Expect::Maximal,
                    Some(nb) if nb.indices().bounded_below() => Expect::Next(wins[i + 1].0[0].clone()),
                    Some(_) => Expect::NoSuccessor,
                }
            };
            cases.push((x.clone(), expect));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cases.shuffle(&mut rng);
    cases.truncate(100);
    let check = |(x, e): &(GroupElement, Expect)| -> Option<String> {
        let got = successor(d, x);
        let ok = match (e, &got) {
            (Expect::Next(y), Ok(s)) => y == s,
            (Expect::Maximal, Err(CalcError::IsMaximal(_))) => true,
            (Expect::NoSuccessor, Err(CalcError::NoImmediateSuccessor(_))) => true,
            _ => false,
        };
        (!ok).then(|| format!("successor of {x}: {got:?}"))
    };
    let chunk = cases.len().div_ceil(jobs.max(1)).max(1);
    let mismatches: Vec<String> = std::thread::scope(|s| {
        let handles: Vec<_> = cases.chunks(chunk).map(|c| s.spawn(move || c.iter().filter_map(check).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    let status = if cases.is_empty() {
        INCONCLUSIVE
    } else if mismatches.is_empty() {
        EXACT
    } else {
        MISMATCH
    };
    OracleReport { op: "successor".into(), window: n, status: status.into(), checked: cases.len(), missing: Vec::new(), extra: Vec::new(), mismatches }
}

pub fn oracle(d: &BlockSet, op: OracleOp, n: usize, seed: u64, jobs: usize) -> Result<Outcome, RunError> {
    let rep = match op {
        OracleOp::Diff => diff_oracle(d, n)?,
        OracleOp::Successor => successor_oracle(d, n, seed, jobs),
    };
    Ok(Outcome { verified: rep.status != MISMATCH, json: serde_json::to_value(&rep).unwrap() })
}
