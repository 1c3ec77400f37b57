//! Acceptance criteria 1 to 9, one PASS/FAIL line each.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use oag_core::calculus::{chain_forms, diff_set, iter_diff, same_set, CalcError};
use oag_core::groups::{emit_formula, integer_like_check, normalized_chains};
use oag_core::lexgroup::{rat, GroupElement, Rational};
use oag_core::semilinear::{lcm, IndexSet};
use oag_core::setrep::{Atom, AtomKind, Block, BlockSet, StdForm};
use oag_core::structure::{
    arch_partition, detect_period, initial_segment_check, interval_pieces, primitive_generator, pseudo_arith_decomp,
    sigma_interval_cover, uniformize, SegmentOrder, StructError,
};
use oag_core::calculus::DifferenceWord;
use oag_core::witness::{build_inp_pattern, build_interlaced, standard_family, verify_instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn el(coords: &[Rational]) -> GroupElement {
    GroupElement::new(coords.to_vec()).unwrap()
}

fn random_index_set(r: &mut ChaCha8Rng) -> IndexSet {
    let lo = r.gen_range(-6..=0);
    let hi = lo + r.gen_range(0..=8);
    let p = r.gen_range(1..=4);
    let mid: Vec<bool> = (lo..=hi).map(|_| r.gen_bool(0.6)).collect();
    let up: Vec<bool> = if r.gen_bool(0.35) { vec![false; p as usize] } else { (0..p).map(|_| r.gen_bool(0.6)).collect() };
    let down: Vec<bool> = if r.gen_bool(0.5) { vec![false; p as usize] } else { (0..p).map(|_| r.gen_bool(0.6)).collect() };
    IndexSet::from_fn(lo, hi, p, move |x| {
        if x > hi {
            up[x.rem_euclid(p) as usize]
        } else if x < lo {
            down[x.rem_euclid(p) as usize]
        } else {
            mid[(x - lo) as usize]
        }
    })
}

/// Rank 2, at most five blocks, patterns of length at most four, denominators at most eight.
fn random_block_set(r: &mut ChaCha8Rng) -> BlockSet {
    loop {
        let nb = r.gen_range(1..=5);
        let blocks: Vec<Block> = (0..nb)
            .map(|i| {
                let len = r.gen_range(1..=4);
                let pat = (0..len)
                    .map(|_| {
                        let top = if r.gen_bool(0.08) { Rational::one() } else { Rational::zero() };
                        el(&[top, rat(r.gen_range(1..=6), r.gen_range(1..=8))])
                    })
                    .collect();
                let base = el(&[Rational::from_integer((10 * i as i64).into()), rat(r.gen_range(-8..=8), r.gen_range(1..=8))]);
                Block::new(base, pat, random_index_set(r)).unwrap()
            })
            .collect();
        if let Ok(d) = BlockSet::validate(2, false, blocks) {
            return d;
        }
    }
}

/// Successive differences of each block across its middle and three periods
/// on each side, plus the gap from a block's last element to the next block's first.
fn brute_diffs(d: &BlockSet) -> Option<BTreeSet<GroupElement>> {
    let mut out = BTreeSet::new();
    let mut wins = Vec::new();
    for b in d.blocks() {
        let k = b.indices();
        let (lo, hi) = k.window();
        let p = lcm(k.period(), b.m());
        let ks: Vec<i64> = (lo - 3 * p..=hi + 3 * p).filter(|&i| k.contains(i)).collect();
        if ks.len() > 2000 {
            return None;
        }
        wins.push(ks.iter().map(|&i| b.element(i)).collect::<Vec<_>>());
    }
    for (i, w) in wins.iter().enumerate() {
        out.extend(w.windows(2).map(|p| &p[1] - &p[0]));
        let here = d.blocks()[i].indices().bounded_above();
        if let Some(next) = d.blocks().get(i + 1) {
            if here && next.indices().bounded_below() {
                out.insert(&wins[i + 1][0] - w.last().unwrap());
            }
        }
    }
    Some(out)
}

fn c1_diff_oracle() -> Outcome {
    let mut r = rng(1);
    let mut nontrivial = 0;
    for i in 0..500 {
        let d = random_block_set(&mut r);
        let brute = brute_diffs(&d).ok_or(format!("set {i}: window exceeds 2000 elements"))?;
        let sym = match diff_set(&d) {
            Err(CalcError::TooSmall) if d.len().is_ok_and(|n| n < 2) => BTreeSet::new(),
            other => other.map_err(|e| format!("set {i}: {e}"))?,
        };
        if sym != brute {
            return Err(format!("set {i}: symbolic {sym:?} vs brute {brute:?}"));
        }
        nontrivial += usize::from(!sym.is_empty());
    }
    Ok(format!("500 sets, {nontrivial} with nonempty difference sets"))
}

fn letter(j: usize) -> GroupElement {
    GroupElement::from_ints(&[0, j as i64 + 1])
}

fn c2_period_suite() -> Outcome {
    let mut r = rng(2);
    let mut count = 0;
    for plen in 0..=20usize {
        for per in 1..=12usize {
            for a in 1..=5usize {
                for _ in 0..8 {
                    let pre: Vec<usize> = (0..plen).map(|_| r.gen_range(0..a)).collect();
                    let cyc: Vec<usize> = (0..per).map(|_| r.gen_range(0..a)).collect();
                    let w = DifferenceWord {
                        left: None,
                        middle: pre.iter().map(|&j| letter(j)).collect(),
                        right: Some(cyc.iter().map(|&j| letter(j)).collect()),
                    };
                    let s: Vec<usize> = pre.iter().chain(cyc.iter().cycle().take(per * 12)).copied().collect();
                    let fmax = (1..=2 * per + plen + 1)
                        .map(|k| s.windows(k).collect::<BTreeSet<_>>().len())
                        .max()
                        .unwrap();
                    let brute_m = (1..=per).find(|&q| (plen..s.len() - q).all(|i| s[i] == s[i + q])).unwrap();
                    let brute_off = (0..=plen).find(|&o| (o..s.len() - brute_m).all(|i| s[i] == s[i + brute_m])).unwrap();
                    let p = detect_period(&w, 1000).map_err(|e| format!("{pre:?}|{cyc:?}: {e}"))?;
                    let off = p.offset as usize;
                    let periodic = (off..off + 4 * p.m).all(|i| s[i] == s[i + p.m]);
                    if p.m != brute_m || p.m > fmax || !periodic || off != brute_off {
                        return Err(format!("{pre:?}|{cyc:?}: got {p:?}, brute m={brute_m} offset={brute_off} fmax={fmax}"));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} words"))
}

fn c3_generators() -> Outcome {
    let mut count = 0;
    for n in 1..=8u32 {
        for code in 0..3usize.pow(n) {
            let w: Vec<u8> = (0..n).map(|i| (code / 3usize.pow(i) % 3) as u8).collect();
            let root = (1..=w.len())
                .find(|&d| w.len() % d == 0 && w.chunks(d).all(|c| c == &w[..d]))
                .map(|d| w[..d].to_vec())
                .unwrap();
            let g = primitive_generator(&w);
            let t = w.len() / g.len();
            let power: Vec<u8> = g.iter().cycle().take(g.len() * t).copied().collect();
            if g != root || power != w || w.len() % g.len() != 0 {
                return Err(format!("{w:?}: generator {g:?}, brute {root:?}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} words"))
}

fn window_elements(d: &BlockSet, n: usize) -> Vec<GroupElement> {
    let mut out = Vec::new();
    for b in d.blocks() {
        let k = b.indices();
        let (lo, hi) = k.window();
        let pad = n as i64;
        out.extend((lo - pad..=hi + pad).filter(|&i| k.contains(i)).take(n).map(|i| b.element(i)));
    }
    out
}

fn c4_decomposition() -> Outcome {
    let mut r = rng(4);
    let (mut done, mut skipped, mut pieces_total) = (0, 0, 0);
    while done < 200 {
        let d = random_block_set(&mut r);
        let dec = match pseudo_arith_decomp(&d) {
            Ok(x) => x,
            Err(StructError::BoundViolated(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(format!("set {done}: {e}")),
        };
        for p in &dec.pieces {
            let dd = diff_set(&p.set).map_err(|e| e.to_string())?;
            if dd.len() != 1 || !dd.contains(&p.eta) {
                return Err(format!("set {done}: piece with differences {dd:?}"));
            }
        }
        let back = dec.reassemble(2).map_err(|e| e.to_string())?;
        let win = window_elements(&d, 2000);
        if !win.iter().all(|x| back.contains(x)) || !window_elements(&back, 2000).iter().all(|x| d.contains(x)) {
            return Err(format!("set {done}: reassembly differs on the window"));
        }
        if !same_set(&back, &d) {
            return Err(format!("set {done}: reassembly differs"));
        }
        let mut expected = 0;
        for u in uniformize(&d).map_err(|e| e.to_string())? {
            for a in arch_partition(&u.set).map_err(|e| e.to_string())? {
                for u2 in uniformize(&a).map_err(|e| e.to_string())? {
                    let cover = sigma_interval_cover(&u2.set).map_err(|e| e.to_string())?;
                    if !cover.leftover.is_finite() {
                        return Err(format!("set {done}: infinite leftover"));
                    }
                    for iv in &cover.intervals {
                        let ps = interval_pieces(iv, &cover.chains).map_err(|e| e.to_string())?;
                        if ps.len() != iv.generator.len() {
                            return Err(format!("set {done}: {} pieces for generator of length {}", ps.len(), iv.generator.len()));
                        }
                        expected += ps.iter().filter(|p| p.len().map_or(true, |n| n >= 2)).count();
                    }
                }
            }
        }
        if expected != dec.pieces.len() {
            return Err(format!("set {done}: {} pieces, generators account for {expected}", dec.pieces.len()));
        }
        pieces_total += dec.pieces.len();
        done += 1;
    }
    Ok(format!("200 sets, {pieces_total} pieces, {skipped} draws not uniformizable"))
}

/// `{kη : 0 ≤ k < len}` (all `k ≥ 0` when `len` is `None`) in one of three
/// block layouts.
fn progression(eta: &GroupElement, len: Option<i64>, layout: u8) -> BlockSet {
    let k = len.map_or_else(IndexSet::naturals, |n| IndexSet::range(0, n - 1));
    let zero = GroupElement::zero(2);
    match layout {
        0 => BlockSet::single(Block::new(zero, vec![eta.clone()], k).unwrap()),
        1 => BlockSet::single(Block::new(zero, vec![eta.clone(), eta.clone()], k).unwrap()),
        _ => {
            let s = len.map_or(2, |n| n / 2);
            let head = Block::new(zero, vec![eta.clone()], k.intersect(&IndexSet::range(0, s))).unwrap();
            let tail = Block::new(eta.mul_i64(s + 1), vec![eta.clone()], k.shift(-(s + 1)).intersect(&IndexSet::naturals())).unwrap();
            BlockSet::validate(2, false, vec![head, tail]).unwrap()
        }
    }
}

fn c5_trichotomy() -> Outcome {
    let mut r = rng(5);
    let random_eta = |r: &mut ChaCha8Rng| {
        let v = rat(r.gen_range(1..=9), r.gen_range(1..=8));
        if r.gen_bool(0.5) {
            el(&[v, rat(r.gen_range(-5..=5), r.gen_range(1..=8))])
        } else {
            el(&[Rational::zero(), v])
        }
    };
    let mut seen = BTreeSet::new();
    for i in 0..200 {
        let eta = random_eta(&mut r);
        let side = |r: &mut ChaCha8Rng| {
            let len = if r.gen_bool(0.3) { None } else { Some(r.gen_range(2..=12)) };
            (len.unwrap_or(i64::MAX), progression(&eta, len, r.gen_range(0..3)))
        };
        let ((n0, e0), (n1, e1)) = (side(&mut r), side(&mut r));
        let brute = |d: &BlockSet| d.enumerate_window(&GroupElement::zero(2), 40).unwrap();
        let (f0, f1) = (brute(&e0), brute(&e1));
        let m = f0.len().min(f1.len());
        if f0[..m] != f1[..m] || f0.len() != n0.min(40) as usize || f1.len() != n1.min(40) as usize {
            return Err(format!("pair {i}: generator produced unexpected sets"));
        }
        let expect = match n0.cmp(&n1) {
            std::cmp::Ordering::Less => SegmentOrder::E0PrefixOfE1,
            std::cmp::Ordering::Greater => SegmentOrder::E1PrefixOfE0,
            std::cmp::Ordering::Equal => SegmentOrder::Equal,
        };
        let got = initial_segment_check(&e0, &e1).map_err(|e| format!("pair {i}: {e}"))?;
        if got != expect {
            return Err(format!("pair {i}: got {got:?}, expected {expect:?}"));
        }
        seen.insert(format!("{got:?}"));
    }
    for i in 0..200 {
        let eta = random_eta(&mut r);
        let q = rat(r.gen_range(-20..=20), r.gen_range(1..=9));
        if q.is_zero() {
            continue;
        }
        let eta2 = eta.scale(&q);
        let got = eta.rational_ratio(&eta2).map_err(|e| format!("ratio {i}: {e}"))?;
        if got != q || eta.scale(&got) != eta2 {
            return Err(format!("ratio {i}: {got} for {q}"));
        }
    }
    Ok(format!("200 pairs covering {seen:?}, 200 ratios"))
}

/// A set whose chains step by multiples of one top-class element: a finite
/// run, a few points far below, and an upward ray.
fn definable_set(r: &mut ChaCha8Rng) -> BlockSet {
    let eta = el(&[rat(r.gen_range(1..=3), 1), rat(r.gen_range(-6..=6), r.gen_range(1..=4))]);
    let pat = |r: &mut ChaCha8Rng| -> Vec<GroupElement> { (0..r.gen_range(1..=3)).map(|_| eta.mul_i64(r.gen_range(1..=3))).collect() };
    let mut blocks = vec![
        Block::new(el(&[rat(-200, 1), rat(r.gen_range(-9..=9), 3)]), pat(r), IndexSet::range(0, r.gen_range(0..=6))).unwrap(),
        Block::new(el(&[Rational::zero(), rat(r.gen_range(-9..=9), 2)]), pat(r), IndexSet::ge(r.gen_range(-3..=0))).unwrap(),
    ];
    for j in 0..r.gen_range(0..=3) {
        blocks.push(Block::point(el(&[rat(-300 - 7 * j, 1), rat(r.gen_range(-9..=9), 5)])));
    }
    BlockSet::validate(2, false, blocks).unwrap()
}

fn c6_integer_like() -> Outcome {
    let mut r = rng(6);
    for i in 0..20 {
        let d = definable_set(&mut r);
        let (g, phi) = emit_formula(&d).map_err(|e| format!("set {i}: {e}"))?;
        let rep = integer_like_check(&g, 1000, i);
        if !rep.passed() {
            return Err(format!("set {i}: {:?}", rep.failures));
        }
        let dec = pseudo_arith_decomp(&d).map_err(|e| e.to_string())?;
        for (_, c) in normalized_chains(&dec) {
            for b in c.blocks() {
                if !g.contains(b.base()) || !b.pattern().iter().all(|x| g.contains(x)) {
                    return Err(format!("set {i}: a normalized piece leaves the group"));
                }
            }
        }
        let members = d.enumerate_window(&d.min().unwrap(), 1000).map_err(|e| e.to_string())?;
        if members.len() != 1000 {
            return Err(format!("set {i}: only {} members enumerated", members.len()));
        }
        let mut outside = Vec::new();
        while outside.len() < 1000 {
            let base = &members[r.gen_range(0..members.len())];
            let nudge = el(&[rat(r.gen_range(-2..=2), r.gen_range(1..=4)), rat(r.gen_range(-8..=8), r.gen_range(1..=6))]);
            let x = base + &nudge;
            if !d.contains(&x) {
                outside.push(x);
            }
        }
        for x in &members {
            if !phi.eval(x, &g).map_err(|e| e.to_string())? {
                return Err(format!("set {i}: formula rejects member {x}"));
            }
        }
        for x in &outside {
            if phi.eval(x, &g).map_err(|e| e.to_string())? {
                return Err(format!("set {i}: formula accepts non-member {x}"));
            }
        }
    }
    Ok("20 sets, 1000 members and 1000 non-members each".into())
}

fn c7_inp_patterns() -> Outcome {
    let mut paths = 0;
    for n in 1..=3 {
        let sum = build_interlaced(&standard_family(n)).map_err(|e| e.to_string())?;
        let p = build_inp_pattern(&sum, 4, true, 0).map_err(|e| e.to_string())?;
        let want = 4usize.pow((n + 2) as u32);
        if p.rows.len() != n + 2 || p.paths.len() != want {
            return Err(format!("levels {n}: {} rows, {} paths", p.rows.len(), p.paths.len()));
        }
        let rep = verify_instance(&p);
        if !rep.passed() {
            return Err(format!("levels {n}: {:?}", rep.failures));
        }
        paths += rep.paths_checked;
    }
    Ok(format!("levels 1..3, {paths} paths realized"))
}

fn c8_iterated_differences() -> Outcome {
    let mut r = rng(8);
    for i in 0..300 {
        let d = if i % 2 == 0 { random_block_set(&mut r) } else { definable_set(&mut r) };
        let alphabet: BTreeSet<GroupElement> = chain_forms(&d).iter().flat_map(|c| c.word.alphabet()).collect();
        let steps = 1 + alphabet.len();
        match iter_diff(&d, steps) {
            Ok(it) if it.len().is_ok_and(|n| n <= 1) => {}
            Err(CalcError::Exhausted { stage }) if stage <= steps => {}
            other => return Err(format!("set {i}: {other:?} after {steps} steps")),
        }
    }
    Ok("300 sets".into())
}

fn random_atoms(r: &mut ChaCha8Rng) -> Vec<Atom> {
    (0..r.gen_range(0..=4))
        .map(|_| {
            let w = random_index_set(r);
            let a = r.gen_range(0..8);
            if r.gen_bool(0.5) {
                Atom::point(w, rat(a, 8))
            } else {
                Atom::interval(w, rat(a, 8), rat((a + r.gen_range(1..=8)).min(8), 8))
            }
        })
        .collect()
}

fn atom_contains(atoms: &[Atom], x: &Rational) -> bool {
    atoms.iter().any(|a| match &a.kind {
        AtomKind::Point { lambda } => {
            let t = x - lambda;
            t.is_integer() && a.w.contains(t.to_integer().try_into().unwrap())
        }
        AtomKind::Interval { lo, hi } => {
            let first: i64 = (x - hi).floor().to_integer().try_into().unwrap();
            (first..=first + 2).any(|k| {
                let k_r = Rational::from_integer(k.into());
                &k_r + lo < *x && *x < &k_r + hi && a.w.contains(k)
            })
        }
    })
}

fn c9_stdform_laws() -> Outcome {
    let mut r = rng(9);
    for i in 0..100 {
        let (ra, rb) = (random_atoms(&mut r), random_atoms(&mut r));
        let a = StdForm::new(ra.clone()).map_err(|e| e.to_string())?;
        let b = StdForm::new(rb.clone()).map_err(|e| e.to_string())?;
        let (u, n, d, c) = (a.union(&b), a.intersect(&b), a.difference(&b), a.complement());
        let dm = a.complement().intersect(&b.complement());
        let cu = u.complement();
        let (pts, open) = a.split();
        if !pts.is_discrete() || open.families().iter().any(|f| matches!(f.kind, AtomKind::Point { .. })) {
            return Err(format!("instance {i}: split parts have the wrong shape"));
        }
        if StdForm::new(a.families()).map_err(|e| e.to_string())? != a || c.complement() != a {
            return Err(format!("instance {i}: canonical form not stable"));
        }
        for _ in 0..10_000 {
            let den = r.gen_range(1..=16);
            let x = rat(r.gen_range(-40 * den..=40 * den), den);
            let (xa, xb) = (atom_contains(&ra, &x), atom_contains(&rb, &x));
            let ok = a.contains(&x) == xa
                && b.contains(&x) == xb
                && u.contains(&x) == (xa || xb)
                && n.contains(&x) == (xa && xb)
                && d.contains(&x) == (xa && !xb)
                && c.contains(&x) == !xa
                && dm.contains(&x) == cu.contains(&x)
                && (pts.contains(&x) || open.contains(&x)) == xa
                && !(pts.contains(&x) && open.contains(&x));
            if !ok {
                return Err(format!("instance {i}: law fails at {x}"));
            }
        }
    }
    Ok("100 instances, 10^4 samples each".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("difference-set oracle equivalence", c1_diff_oracle, 60),
        ("eventual period detection", c2_period_suite, 120),
        ("primitive generators", c3_generators, 60),
        ("pseudo-arithmetic decomposition", c4_decomposition, 300),
        ("initial-segment trichotomy and rational ratios", c5_trichotomy, 60),
        ("integer-like group and defining formulas", c6_integer_like, 300),
        ("inp-pattern instances", c7_inp_patterns, 30),
        ("iterated difference bound", c8_iterated_differences, 120),
        ("StdForm algebra", c9_stdform_laws, 300),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = f();
        let el = t.elapsed();
        let res = match res {
            Ok(msg) if el > Duration::from_secs(*limit) => Err(format!("{msg}, but took longer than {limit}s")),
            other => other,
        };
        match res {
            Ok(msg) => println!("criterion {}: PASS  {name}: {msg} ({:.1}s)", i + 1, el.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {msg} ({:.1}s)", i + 1, el.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
