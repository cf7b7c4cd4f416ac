//! Invariant suites behind `steenrod check` and the acceptance target.
//!
//! Each suite recomputes its expected values independently of the engine
//! where it can: admissibility by direct inspection, dimensions from the
//! Milnor basis, Adem correctness from the action on H*(B(Z/ℓ)^k), and
//! bidegrees from the letter formulas.

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use steenrod_core::arith::{binom, factorial, nu, rank_mod};
use steenrod_core::classify::{
    conjecture_generators, descriptor_table, etale_ops_h1, etale_ops_hn, motivic_ops_deg1_descent,
    motivic_ops_deg1_zeta, ConjectureOptions, DescriptorData,
};
use steenrod_core::motivic::{convert, normalize_motivic, Direction, Item, ModelBuilder, Setting};
use steenrod_core::steenrod::{adem_reduce, adem_reduce_with, admissible_sequences, excess, Strategy};
use steenrod_core::unstable::{bidegree_multiset, cartan_generators, iterate_borel, BorelBase, Window};
use steenrod_core::{AdmissibleSeq, Bidegree, CoefficientModel, Flp, Letter, Mode, OpPoly, PrimeContext, Word};

use crate::expr;
use crate::model::ModelConfig;

pub const LOCAL_FIELD: &str = include_str!("../../../models/local-field.json");

pub type Outcome = Result<String, String>;

pub struct Suite {
    pub name: &'static str,
    pub run: fn() -> Outcome,
}

/// The eight acceptance criteria, in order.
pub fn criteria() -> Vec<Suite> {
    vec![
        Suite { name: "excess census", run: excess_census },
        Suite { name: "adem correctness", run: adem_correctness },
        Suite { name: "span oracle", run: span_oracle },
        Suite { name: "sign identities", run: sign_identities },
        Suite { name: "borel-kudo vs cartan", run: borel_vs_cartan },
        Suite { name: "conversion bidegrees", run: conversion_bidegrees },
        Suite { name: "descent targets", run: descent_targets },
        Suite { name: "cli golden", run: cli_golden },
    ]
}

/// Everything `steenrod check` runs.
pub fn all() -> Vec<Suite> {
    let mut v = criteria();
    v.extend([
        Suite { name: "milnor dimensions", run: milnor_dimensions },
        Suite { name: "adem action oracle", run: adem_action },
        Suite { name: "etale specialization", run: etale_specialization },
        Suite { name: "descriptor bidegrees", run: descriptor_bidegrees },
        Suite { name: "etale H1 vs Hn", run: h1_vs_hn },
        Suite { name: "descent vs zeta", run: descent_vs_zeta },
        Suite { name: "parser round trip", run: parser_round_trip },
    ]);
    v
}

fn ctx(ell: u32, d: u32) -> PrimeContext {
    PrimeContext::new(ell, d).expect("valid prime data")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn word(ctx: PrimeContext, letters: Vec<Letter>, mode: Mode) -> OpPoly {
    OpPoly::from_word(Word(letters), ctx, mode)
}

// ---------------------------------------------------------------------------
// Admissibility by inspection

/// Splits a word into (ε₀, s₁, ε₁, …) form; None if it is not of that shape.
fn beta_form(w: &Word, ell: u32) -> Option<(Vec<u32>, Vec<u32>)> {
    let mut eps = vec![0];
    let mut s = Vec::new();
    for l in w.letters() {
        match (l, ell) {
            (Letter::Beta, _) => {
                let last = eps.last_mut()?;
                if *last == 1 {
                    return None;
                }
                *last = 1;
            }
            (Letter::P(a), l) if l > 2 => {
                s.push(*a);
                eps.push(0);
            }
            (Letter::Sq(a), 2) => {
                s.push(*a);
                eps.push(0);
            }
            _ => return None,
        }
    }
    Some((eps, s))
}

fn admissible_by_inspection(w: &Word, ell: u32) -> bool {
    let Some((eps, s)) = beta_form(w, ell) else {
        return false;
    };
    (0..s.len().saturating_sub(1)).all(|j| {
        let (a, b) = (i64::from(s[j]), i64::from(s[j + 1]));
        if ell == 2 {
            a >= 2 * b
        } else {
            a >= i64::from(ell) * b + i64::from(eps[j + 1])
        }
    })
}

fn letter_degree(l: Letter, ell: u32) -> i64 {
    match l {
        Letter::Beta => 1,
        Letter::P(a) | Letter::PV(a) => 2 * i64::from(a) * (i64::from(ell) - 1),
        Letter::Sq(a) | Letter::SqV(a) => i64::from(a),
    }
}

fn word_degree(w: &Word, ell: u32) -> i64 {
    w.letters().iter().map(|l| letter_degree(*l, ell)).sum()
}

// ---------------------------------------------------------------------------
// 1. Excess census

fn excess_census() -> Outcome {
    let mut total = 0;
    for ell in [2u32, 3, 5] {
        let c = ctx(ell, 1);
        let l = i64::from(ell);
        let bound = 2 * l.pow(5) + 2;
        let mut want: BTreeSet<AdmissibleSeq> = BTreeSet::new();
        want.insert(AdmissibleSeq::identity());
        if ell == 2 {
            // Sq^{2^k}⋯Sq^2Sq^1, degree 2^{k+1} − 1.
            let mut k = 0;
            while (1i64 << (k + 1)) - 1 <= bound {
                let s: Vec<u32> = (0..=k).rev().map(|j| 1u32 << j).collect();
                want.insert(AdmissibleSeq::sq(s).map_err(|e| e.to_string())?);
                k += 1;
            }
        } else {
            want.insert(AdmissibleSeq::odd(vec![true], Vec::new()).map_err(|e| e.to_string())?);
            // (0, ℓ^k, 0, …, ℓ, 0, 1, 1), degree 2(ℓ^{k+1} − 1) + 1.
            let mut k = 0u32;
            while 2 * (l.pow(k + 1) - 1) + 1 <= bound {
                let s: Vec<u32> = (0..=k).rev().map(|j| ell.pow(j)).collect();
                let mut eps = vec![false; s.len() + 1];
                *eps.last_mut().expect("nonempty") = true;
                want.insert(AdmissibleSeq::odd(eps, s).map_err(|e| e.to_string())?);
                k += 1;
            }
        }
        let got: BTreeSet<AdmissibleSeq> =
            admissible_sequences(c, bound, Some(2)).into_iter().filter(|s| excess(s, c) < 2).collect();
        ensure(got == want, || {
            let extra: Vec<_> = got.symmetric_difference(&want).map(|s| s.to_word(c).to_string()).collect();
            format!("l={ell}: census differs at {extra:?}")
        })?;
        total += got.len();
    }
    Ok(format!("{total} sequences of excess < 2 for l in {{2,3,5}}"))
}

// ---------------------------------------------------------------------------
// 2. Adem correctness

fn two_letter_redexes(ell: u32, max_deg: i64) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    let l = i64::from(ell);
    if ell == 2 {
        for a in 1..max_deg {
            for b in 1..=(max_deg - a) {
                if a < 2 * b {
                    out.push(vec![Letter::Sq(a as u32), Letter::Sq(b as u32)]);
                }
            }
        }
        return out;
    }
    let q = 2 * (l - 1);
    for a in 1..=max_deg / q {
        for b in 1..=max_deg / q {
            for mask in 0..8u32 {
                let e = |k: u32| i64::from((mask >> k) & 1);
                let deg = q * (a + b) + e(0) + e(1) + e(2);
                if deg > max_deg || a >= l * b + e(1) {
                    continue;
                }
                let mut w = Vec::new();
                if e(0) == 1 {
                    w.push(Letter::Beta);
                }
                w.push(Letter::P(a as u32));
                if e(1) == 1 {
                    w.push(Letter::Beta);
                }
                w.push(Letter::P(b as u32));
                if e(2) == 1 {
                    w.push(Letter::Beta);
                }
                out.push(w);
            }
        }
    }
    out
}

fn random_word(rng: &mut StdRng, ell: u32, len: usize, max_deg: i64) -> Vec<Letter> {
    loop {
        let w: Vec<Letter> = (0..len)
            .map(|_| {
                if ell == 2 {
                    Letter::Sq(rng.gen_range(1..=12))
                } else if rng.gen_bool(0.3) {
                    Letter::Beta
                } else {
                    Letter::P(rng.gen_range(1..=(max_deg / (2 * (i64::from(ell) - 1))).max(1) as u32))
                }
            })
            .collect();
        if word_degree(&Word(w.clone()), ell) <= max_deg {
            return w;
        }
    }
}

fn adem_correctness() -> Outcome {
    let mut pairs = 0;
    for ell in [2u32, 3, 5] {
        let c = ctx(ell, 1);
        let modes: &[Mode] = if ell == 2 { &[Mode::Classical] } else { &[Mode::Classical, Mode::Motivic] };
        for w in two_letter_redexes(ell, 60) {
            ensure(!admissible_by_inspection(&Word(w.clone()), ell), || format!("{w:?} listed as a redex"))?;
            for &mode in modes {
                let p = word(c, w.clone(), mode);
                let r = adem_reduce(&p).map_err(|e| e.to_string())?;
                let deg = word_degree(&Word(w.clone()), ell);
                for (t, _) in r.terms() {
                    ensure(admissible_by_inspection(t, ell) && word_degree(t, ell) == deg, || {
                        format!("l={ell} {}: term {t} not admissible of degree {deg}", Word(w.clone()))
                    })?;
                }
                let again = adem_reduce(&r).map_err(|e| e.to_string())?;
                ensure(again == r, || format!("l={ell} {}: reduction not idempotent", Word(w.clone())))?;
                pairs += 1;
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for k in 0..500 {
        let ell = [2u32, 3, 5][k % 3];
        let mode = if ell > 2 && k % 2 == 1 { Mode::Motivic } else { Mode::Classical };
        let w = random_word(&mut rng, ell, 3, 40);
        let p = word(ctx(ell, 1), w.clone(), mode);
        let left = adem_reduce_with(&p, Strategy::Leftmost).map_err(|e| e.to_string())?;
        let right = adem_reduce_with(&p, Strategy::Rightmost).map_err(|e| e.to_string())?;
        ensure(left == right, || format!("l={ell} {}: left-first {left} vs right-first {right}", Word(w)))?;
    }
    Ok(format!("{pairs} redex reductions admissible and idempotent; 500 random triples confluent"))
}

// ---------------------------------------------------------------------------
// 3. Span oracle

fn compositions(n: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn span_oracle() -> Outcome {
    let c = ctx(2, 1);
    let mut words = 0usize;
    for deg in 1..=16u32 {
        let all = compositions(deg);
        let basis: Vec<Word> = all
            .iter()
            .map(|s| Word(s.iter().map(|a| Letter::Sq(*a)).collect()))
            .filter(|w| admissible_by_inspection(w, 2))
            .collect();
        let mut rows = Vec::with_capacity(all.len());
        for s in &all {
            let r = adem_reduce(&word(c, s.iter().map(|a| Letter::Sq(*a)).collect(), Mode::Classical))
                .map_err(|e| e.to_string())?;
            for (t, _) in r.terms() {
                ensure(basis.contains(t), || format!("degree {deg}: {t} outside the admissible basis"))?;
            }
            rows.push(basis.iter().map(|b| r.coeff(b).value()).collect());
        }
        words += all.len();
        let rank = rank_mod(rows, c);
        ensure(rank == basis.len(), || format!("degree {deg}: span rank {rank} vs {} admissibles", basis.len()))?;
    }
    Ok(format!("{words} words in degrees 1..16 span exactly the admissible monomials"))
}

// ---------------------------------------------------------------------------
// 4. Sign identities

fn sign_identities() -> Outcome {
    let primes: Vec<u32> = (3..=50u32).filter(|p| (2..*p).all(|q| p % q != 0)).collect();
    for &ell in &primes {
        let c = ctx(ell, 1);
        let l = u64::from(ell);
        let m = (l - 1) / 2;
        let plain = (1..=m).fold(1u64, |acc, k| acc * k % l);
        ensure(u64::from(factorial(m, c).value()) == plain, || format!("l={ell}: factorial disagrees"))?;
        let sq = plain * plain % l;
        let want = if (m + 1) % 2 == 0 { 1 } else { l - 1 };
        ensure(sq == want, || format!("l={ell}: (m!)^2 = {sq}, expected {want}"))?;
        for a in 0..=100i64 {
            let v = nu(2 * a, c).map_err(|e| e.to_string())?;
            let want = if a % 2 == 0 { 1 } else { ell - 1 };
            ensure(v.value() == want, || format!("l={ell}: nu_{} = {}, expected {want}", 2 * a, v.value()))?;
        }
    }
    Ok(format!("{} odd primes, a <= 100", primes.len()))
}

// ---------------------------------------------------------------------------
// 5. Borel–Kudo vs Cartan

fn borel_vs_cartan() -> Outcome {
    let mut gens = 0;
    for ell in [2, 3] {
        let c = ctx(ell, 1);
        for n in 2..=5 {
            let borel = iterate_borel(BorelBase::K1, n, c, 30).map_err(|e| e.to_string())?;
            let cartan = cartan_generators(n, c, 30, 1).map_err(|e| e.to_string())?;
            let (a, b) = (bidegree_multiset(&borel.generators), bidegree_multiset(&cartan));
            ensure(a == b, || format!("l={ell} n={n}: transgression {a:?} vs admissible {b:?}"))?;
            gens += cartan.len();
        }
    }
    Ok(format!("{gens} generators agree for l in {{2,3}}, n = 2..5, degree <= 30"))
}

// ---------------------------------------------------------------------------
// 6. Conversion bidegrees

fn letter_bidegree(l: Letter, b: Bidegree, ell: i64) -> Bidegree {
    match l {
        Letter::P(a) => Bidegree::new(b.deg + 2 * i64::from(a) * (ell - 1), b.weight * ell),
        Letter::PV(a) => Bidegree::new(b.deg + 2 * i64::from(a) * (ell - 1), b.weight + i64::from(a) * (ell - 1)),
        _ => unreachable!("conversions involve P and PV only"),
    }
}

fn conversion_bidegrees() -> Outcome {
    let mut cases = 0;
    for ell in [2u32, 3, 5, 7] {
        let c = ctx(ell, 1);
        let l = i64::from(ell);
        for a in 0..=30 {
            for i in 0..=30 {
                let n = (2 * i).max(2 * a);
                let src = Bidegree::new(n, i);
                let dir = if a <= i { Direction::PToPV } else { Direction::PVToP };
                let cv = convert(a, src, dir, c).map_err(|e| e.to_string())?;
                let lhs = letter_bidegree(cv.from, src, l);
                let rhs = letter_bidegree(cv.to, src, l) + Bidegree::new(0, cv.zeta_exponent);
                ensure(cv.zeta_exponent >= 0 && lhs == rhs && cv.lhs == lhs && cv.rhs == rhs, || {
                    format!("l={ell} a={a} on {src}: exponent {} does not balance", cv.zeta_exponent)
                })?;
                ensure(cv.power_marker == (n == 2 * a), || format!("l={ell} a={a} on {src}: power marker"))?;
                cases += 1;
            }
        }
        for m in 1..=15 {
            for i in 0..=m {
                let cv = convert(m, Bidegree::new(2 * m, i), Direction::PVToP, c).map_err(|e| e.to_string())?;
                ensure(cv.zeta_exponent == (m - i) * (l - 1) && cv.power_marker, || {
                    format!("l={ell}: PV{m} on H^({},{i}) gives exponent {}", 2 * m, cv.zeta_exponent)
                })?;
            }
        }
        ensure(convert(1, Bidegree::new(3, 2), Direction::PToPV, c).is_err(), || {
            "intermediate zone accepted".into()
        })?;
    }
    Ok(format!("{cases} grid points balanced; a = n cases carry the x^l marker"))
}

// ---------------------------------------------------------------------------
// 7. Descent targets and the conjectural generator

pub fn local_field() -> Result<CoefficientModel, String> {
    let cfg = ModelConfig::from_json(LOCAL_FIELD).map_err(|e| e.to_string())?;
    cfg.build().map_err(|e| e.to_string())
}

fn descent_targets() -> Outcome {
    let m = local_field()?;
    let ops = motivic_ops_deg1_descent(2, &m, Window::new(4, Some(3))).map_err(|e| e.to_string())?;
    let mut targets = BTreeSet::new();
    let mut named = BTreeMap::new();
    for o in &ops {
        if let DescriptorData::Coefficient { c_bidegree, eps, m, b, .. } = &o.data {
            let s = c_bidegree.deg;
            if (1..=2).contains(&s) && eps + m == 1 {
                targets.insert((o.target.deg, o.target.weight));
                named.insert((s, *eps, *m), (o.target.deg, o.target.weight));
                ensure(*b == Some(1), || format!("{}: b = {b:?}, expected 1", o.label))?;
                ensure(c_bidegree.deg <= c_bidegree.weight + 1, || format!("{}: outside 0 <= s <= t+b", o.label))?;
            }
        }
    }
    let want: BTreeSet<(i64, i64)> = [(2, 2), (3, 2), (3, 3), (4, 3)].into();
    ensure(targets == want, || format!("descent targets {targets:?}, expected {want:?}"))?;
    ensure(named.get(&(2, 1, 0)) == Some(&(3, 3)), || "Brauer class times y does not land in (3,3)".into())?;
    ensure(named.get(&(2, 0, 1)) == Some(&(4, 3)), || "Brauer class times beta(y) does not land in (4,3)".into())?;
    ensure(named.get(&(1, 0, 1)) == Some(&(3, 2)), || "H^1 class times beta(y) does not land in (3,2)".into())?;

    for (ell, max_deg, label) in [(3, 80, "P13 beta PV4 beta PV1 beta"), (2, 30, "Sq14 SqV7 SqV3 SqV1")] {
        let out = conjecture_generators(4, 2, ctx(ell, 1), Window::new(max_deg, None), ConjectureOptions::default())
            .map_err(|e| e.to_string())?;
        ensure(out.generators.iter().any(|o| o.label == label), || format!("l={ell}: {label} missing"))?;
    }
    Ok("targets (2,2),(3,2),(3,3),(4,3); conjectural generator present at l = 2, 3".into())
}

// ---------------------------------------------------------------------------
// 8. CLI golden output

fn cli_golden() -> Outcome {
    let cases = [
        (vec!["normalize", "--l", "3", "--mode", "classical", "P1 P1"], "2 P2\n"),
        (vec!["normalize", "--l", "3", "--mode", "motivic", "P1 P1"], "2 P2 P0\n"),
        (vec!["normalize", "--l", "2", "2 Sq2 Sq2 + Sq3 Sq1"], "Sq3 Sq1\n"),
    ];
    for (args, want) in &cases {
        let out = crate::run(std::iter::once("steenrod").chain(args.iter().copied()));
        ensure(out.code == 0 && out.stdout == *want, || {
            format!("{args:?}: got {:?} (exit {}), expected {want:?}", out.stdout, out.code)
        })?;
    }
    let json_cases: [Vec<&str>; 3] = [
        vec!["normalize", "--l", "3", "--mode", "motivic", "--model", "alg-closed", "--source", "4,2", "--json", "P1 P1"],
        vec!["classify", "--kind", "conjecture", "--n", "4", "--i", "2", "--max-deg", "40", "--json"],
        vec!["generators", "--l", "3", "--space", "K3", "--max-deg", "40", "--json"],
    ];
    for args in &json_cases {
        let a = crate::run(std::iter::once("steenrod").chain(args.iter().copied()));
        let b = crate::run(std::iter::once("steenrod").chain(args.iter().copied()));
        ensure(a.code == 0, || format!("{args:?}: exit {}: {}", a.code, a.stderr.trim()))?;
        ensure(a.stdout == b.stdout, || format!("{args:?}: JSON differs between runs"))?;
        serde_json::from_str::<serde_json::Value>(&a.stdout).map_err(|e| format!("{args:?}: {e}"))?;
    }
    Ok("normalize goldens match; JSON output byte-identical across runs".into())
}

// ---------------------------------------------------------------------------
// Further invariants

fn milnor_dims(ell: u32, max_deg: usize) -> Vec<u64> {
    let mut dims = vec![0u64; max_deg + 1];
    dims[0] = 1;
    let mut factors = Vec::new();
    let mut pow = 1usize;
    loop {
        let (ext, poly) = if ell == 2 { (None, (pow * 2) - 1) } else { (Some(2 * pow - 1), 2 * (pow * ell as usize - 1)) };
        if ext.map_or(true, |e| e > max_deg) && poly > max_deg {
            break;
        }
        factors.push((ext, poly));
        pow *= ell as usize;
    }
    for (ext, poly) in factors {
        if let Some(e) = ext.filter(|e| *e <= max_deg) {
            for n in (e..=max_deg).rev() {
                dims[n] += dims[n - e];
            }
        }
        if poly <= max_deg {
            for n in poly..=max_deg {
                dims[n] += dims[n - poly];
            }
        }
    }
    dims
}

fn milnor_dimensions() -> Outcome {
    for (ell, max) in [(2u32, 40usize), (3, 60), (5, 80)] {
        let c = ctx(ell, 1);
        let mut counts = vec![0u64; max + 1];
        for s in admissible_sequences(c, max as i64, None) {
            counts[word_degree(&s.to_word(c), ell) as usize] += 1;
        }
        let want = milnor_dims(ell, max);
        ensure(counts == want, || format!("l={ell}: admissible counts {counts:?} vs {want:?}"))?;
    }
    Ok("admissible counts equal Milnor basis dimensions for l in {2,3,5}".into())
}

/// H*(B(Z/ℓ)^k) = Λ[u_j] ⊗ F[v_j] (F[x_j] at ℓ = 2), monomials as
/// (exterior mask, exponents).
type Class = BTreeMap<(u32, Vec<u32>), u32>;

fn add_class(e: &mut Class, m: (u32, Vec<u32>), c: i64, l: u32) {
    let c = c.rem_euclid(i64::from(l)) as u32;
    if c == 0 {
        return;
    }
    let slot = e.entry(m.clone()).or_insert(0);
    *slot = (*slot + c) % l;
    if *slot == 0 {
        e.remove(&m);
    }
}

fn act(letter: Letter, x: &Class, c: PrimeContext) -> Class {
    let l = c.ell();
    let mut out = BTreeMap::new();
    for ((mask, exps), coeff) in x {
        let mut img: Vec<((u32, Vec<u32>), i64)> = Vec::new();
        match letter {
            Letter::Beta if l > 2 => {
                let mut before = 0;
                for j in 0..exps.len() {
                    if mask & (1 << j) != 0 {
                        let mut e = exps.clone();
                        e[j] += 1;
                        img.push(((mask & !(1 << j), e), if before % 2 == 0 { 1 } else { -1 }));
                        before += 1;
                    }
                }
            }
            Letter::Beta | Letter::P(_) | Letter::Sq(_) => {
                let a = match letter {
                    Letter::P(a) | Letter::Sq(a) => a,
                    _ => 1,
                };
                let step = if l == 2 { 1 } else { l - 1 };
                let mut partial: Vec<(Vec<u32>, u32, i64)> = vec![(Vec::new(), 0, 1)];
                for &e in exps {
                    let mut next = Vec::new();
                    for (acc, used, k) in &partial {
                        for j in 0..=(a - used).min(e) {
                            let b = i64::from(binom(i64::from(e), i64::from(j), c).value());
                            if b != 0 {
                                let mut v = acc.clone();
                                v.push(e + j * step);
                                next.push((v, used + j, k * b % i64::from(l)));
                            }
                        }
                    }
                    partial = next;
                }
                img.extend(partial.into_iter().filter(|p| p.1 == a).map(|(v, _, k)| ((*mask, v), k)));
            }
            _ => {}
        }
        for (m, k) in img {
            add_class(&mut out, m, k * i64::from(*coeff), l);
        }
    }
    out
}

fn act_poly(p: &OpPoly, x: &Class, c: PrimeContext) -> Class {
    let mut out = BTreeMap::new();
    for (w, k) in p.terms() {
        let mut y = x.clone();
        for l in w.letters().iter().rev() {
            y = act(*l, &y, c);
        }
        for (m, v) in y {
            add_class(&mut out, m, i64::from(k.value()) * i64::from(v), c.ell());
        }
    }
    out
}

fn adem_action() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    for (ell, k, max_deg) in [(2u32, 6usize, 12i64), (3, 3, 20), (5, 2, 24)] {
        let c = ctx(ell, 1);
        let mask = if ell == 2 { 0 } else { (1u32 << k) - 1 };
        let x: Class = [((mask, vec![1; k]), 1)].into();
        for _ in 0..150 {
            let len = rng.gen_range(2..=3);
            let w = random_word(&mut rng, ell, len, max_deg);
            let p = word(c, w.clone(), Mode::Classical);
            let r = adem_reduce(&p).map_err(|e| e.to_string())?;
            ensure(act_poly(&p, &x, c) == act_poly(&r, &x, c), || {
                format!("l={ell}: {} and its reduction {r} act differently", Word(w))
            })?;
        }
    }
    Ok("450 random words act on H*(B(Z/l)^k) exactly as their reductions".into())
}

fn bott_model() -> Result<CoefficientModel, String> {
    ModelBuilder::new("bott", ctx(3, 2))
        .generator("b", Bidegree::new(0, 2))
        .bott("b")
        .bockstein("b", Vec::new())
        .build()
        .map_err(|e| e.to_string())
}

fn etale_specialization() -> Outcome {
    let m = bott_model()?;
    let mut rng = StdRng::seed_from_u64(11);
    let one = m.ctx().one();
    for _ in 0..120 {
        let len = rng.gen_range(1..=3);
        let mut w = random_word(&mut rng, 3, len, 24);
        if rng.gen_bool(0.3) {
            w.push(Letter::P(0));
        }
        let src = Bidegree::new(rng.gen_range(2..=14), rng.gen_range(0..=4));
        let items: Vec<Item> = w.iter().map(|l| Item::Op(*l)).collect();
        let mot = normalize_motivic(&[(one, items.clone())], Some(src), Setting::Motivic, &m).map_err(|e| e.to_string())?;
        let et = normalize_motivic(&[(one, items)], Some(src), Setting::Etale, &m).map_err(|e| e.to_string())?;
        ensure(mot.specialize_bott(&m).terms == et.terms, || {
            format!("{} on {src}: b = 1 gives {} but etale gives {}", Word(w.clone()), mot.render(&m), et.render(&m))
        })?;
    }
    Ok("120 random motivic normal forms specialize to the etale ones at b = 1".into())
}

fn descriptor_bidegrees() -> Outcome {
    let z = CoefficientModel::alg_closed(3).map_err(|e| e.to_string())?;
    let lf = local_field()?;
    let w = Window::new(8, Some(8));
    let mut n = 0;
    for i in 0..4 {
        let mut groups = vec![(&z, etale_ops_h1(i, &z, 8).map_err(|e| e.to_string())?)];
        groups.push((&z, motivic_ops_deg1_zeta(i, &z, w).map_err(|e| e.to_string())?));
        groups.push((&z, motivic_ops_deg1_descent(i, &z, w).map_err(|e| e.to_string())?));
        groups.push((&lf, motivic_ops_deg1_descent(i, &lf, w).map_err(|e| e.to_string())?));
        for (model, ops) in &groups {
            for o in ops {
                let t = o.expected_target(model.ctx()).map_err(|e| e.to_string())?;
                ensure(t == o.target, || format!("{}: target {} but formula gives {t}", o.label, o.target))?;
                n += 1;
            }
        }
    }
    for ell in [2, 3] {
        let c = ctx(ell, 1);
        let out = conjecture_generators(6, 3, c, Window::new(48, None), ConjectureOptions::default())
            .map_err(|e| e.to_string())?;
        for o in out.generators.iter().chain(&out.excluded) {
            let DescriptorData::Sequences { word, .. } = &o.data else {
                return Err(format!("{}: conjecture descriptor without sequences", o.label));
            };
            let mut b = o.source;
            for l in word.letters().iter().rev() {
                b = match l {
                    Letter::Beta => Bidegree::new(b.deg + 1, b.weight),
                    other => letter_bidegree(*other, b, i64::from(ell)),
                };
            }
            ensure(b == o.target, || format!("{}: target {} but letters give {b}", o.label, o.target))?;
            n += 1;
        }
    }
    Ok(format!("{n} descriptors carry their formula targets"))
}

fn h1_vs_hn() -> Outcome {
    let mut models = vec![CoefficientModel::trivial(ctx(3, 1)), CoefficientModel::trivial(ctx(5, 4)), local_field()?];
    models.push(CoefficientModel::real_etale());
    for m in &models {
        for i in 0..3 {
            let h1 = descriptor_table(&etale_ops_h1(i, m, 10).map_err(|e| e.to_string())?, Window::new(10, None));
            let (_, hn) = etale_ops_hn(1, i, m, 10).map_err(|e| e.to_string())?;
            ensure(h1.entries == hn.entries, || format!("model {} i={i}: H1 list and n=1 table differ", m.name()))?;
        }
    }
    Ok(format!("{} models agree at n = 1", models.len()))
}

fn descent_vs_zeta() -> Outcome {
    for ell in [3, 5] {
        let z = CoefficientModel::alg_closed(ell).map_err(|e| e.to_string())?;
        for i in 0..4 {
            let w = Window::new(7, Some(7));
            let a: Vec<Bidegree> = motivic_ops_deg1_descent(i, &z, w).map_err(|e| e.to_string())?.iter().map(|o| o.target).collect();
            let b: Vec<Bidegree> = motivic_ops_deg1_zeta(i, &z, w).map_err(|e| e.to_string())?.iter().map(|o| o.target).collect();
            ensure(a == b, || format!("l={ell} i={i}: descent {a:?} vs zeta {b:?}"))?;
        }
    }
    Ok("descent and zeta enumerations match when d = 1".into())
}

fn parser_round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    for k in 0..300 {
        let ell = [2u32, 3, 5][k % 3];
        let c = ctx(ell, 1);
        let mode = if k % 2 == 0 { Mode::Classical } else { Mode::Motivic };
        let mut p = OpPoly::zero(c, mode);
        for _ in 0..rng.gen_range(1..=3) {
            let len = rng.gen_range(0..=3);
            let mut w = random_word(&mut rng, ell, len, 40);
            if mode == Mode::Motivic && rng.gen_bool(0.3) {
                w.push(Letter::P(0));
            }
            if ell > 2 && rng.gen_bool(0.2) {
                w.insert(0, Letter::PV(rng.gen_range(0..4)));
            }
            p.add_term(Word(w), Flp::new(rng.gen_range(1..i64::from(ell)), ell));
        }
        let text = p.to_string();
        let back = expr::parse(&text)
            .and_then(|t| expr::to_op_poly(&t, c, mode))
            .map_err(|e| format!("{text:?}: {e}"))?;
        ensure(back == p, || format!("{text:?} parses to {back}"))?;
    }
    Ok("300 printed polynomials parse back to themselves".into())
}

/// Runs the suites in order, stopping at the first failure.
pub fn run_suites(suites: &[Suite]) -> (Vec<String>, bool) {
    let mut lines = Vec::new();
    for s in suites {
        match (s.run)() {
            Ok(msg) => lines.push(format!("PASS {}: {msg}", s.name)),
            Err(msg) => {
                lines.push(format!("FAIL {}: {msg}", s.name));
                return (lines, false);
            }
        }
    }
    (lines, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn milnor_small_degrees() {
        // 1, Sq1, Sq2, Sq3 + Sq2Sq1, Sq4 + Sq3Sq1, ...
        assert_eq!(milnor_dims(2, 6), [1, 1, 1, 2, 2, 2, 3]);
        // beta P1 and P1 beta in degree 5.
        assert_eq!(milnor_dims(3, 5), [1, 1, 0, 0, 1, 2]);
    }

    #[test]
    fn inspection_matches_definition() {
        let w = |v: &[Letter]| Word(v.to_vec());
        assert!(admissible_by_inspection(&w(&[Letter::Sq(4), Letter::Sq(2)]), 2));
        assert!(!admissible_by_inspection(&w(&[Letter::Sq(3), Letter::Sq(2)]), 2));
        assert!(admissible_by_inspection(&w(&[Letter::P(4), Letter::Beta, Letter::P(1)]), 3));
        assert!(!admissible_by_inspection(&w(&[Letter::P(3), Letter::Beta, Letter::P(1)]), 3));
        assert!(admissible_by_inspection(&w(&[Letter::P(3), Letter::P(1), Letter::Beta]), 3));
        assert!(!admissible_by_inspection(&w(&[Letter::P(3), Letter::Beta, Letter::P(1), Letter::Beta, Letter::Beta]), 3));
        assert!(!admissible_by_inspection(&w(&[Letter::P(2), Letter::Beta, Letter::P(1)]), 3));
    }
}
