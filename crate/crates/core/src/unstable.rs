//! Generators of H*(K_n), Poincaré tables of free graded-commutative
//! algebras, and the Borel–Kudo transgression iterator.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::{Parity, PrimeContext};
use crate::error::{Error, Result};
use crate::motivic::Bidegree;
use crate::steenrod::{
    admissible_sequences, degree_weight, excess, AdmissibleSeq, Letter, Word,
};

/// `±word(ι_level)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub negative: bool,
    pub word: Word,
    pub level: i64,
}

impl Label {
    pub fn iota(level: i64) -> Self {
        Self { negative: false, word: Word::identity(), level }
    }

    fn apply(&self, letters: &[Letter], negate: bool) -> Self {
        let mut ls = letters.to_vec();
        ls.extend_from_slice(self.word.letters());
        Self { negative: self.negative ^ negate, word: Word(ls), level: self.level }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        if !self.word.is_identity() {
            write!(f, "{} ", self.word)?;
        }
        write!(f, "iota{}", self.level)
    }
}

/// A generator of a free graded-commutative algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDescriptor {
    pub label: Label,
    pub seq: Option<AdmissibleSeq>,
    pub bidegree: Bidegree,
    pub parity: Parity,
    pub transgressive: bool,
}

impl GeneratorDescriptor {
    pub fn new(label: Label, bidegree: Bidegree, ctx: PrimeContext) -> Self {
        let seq = AdmissibleSeq::from_word(&label.word, ctx).ok();
        Self { label, seq, bidegree, parity: Parity::of(bidegree.deg), transgressive: true }
    }

    /// Odd generators are exterior for odd ℓ; everything is polynomial at ℓ = 2.
    pub fn is_exterior(&self, ctx: PrimeContext) -> bool {
        ctx.is_odd() && self.parity == Parity::Odd
    }
}

/// Degree window with an optional weight cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub max_deg: i64,
    pub max_wt: Option<i64>,
}

impl Window {
    pub fn new(max_deg: i64, max_wt: Option<i64>) -> Self {
        Self { max_deg, max_wt }
    }

    pub fn contains(&self, b: Bidegree) -> bool {
        b.deg <= self.max_deg && self.max_wt.map_or(true, |w| b.weight <= w)
    }
}

/// Dimensions keyed by bidegree inside a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoincareTable {
    pub window: Window,
    pub entries: BTreeMap<Bidegree, u64>,
}

impl PoincareTable {
    /// The ground field: 1 at (0,0).
    pub fn unit(window: Window) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(Bidegree::new(0, 0), 1);
        Self { window, entries }
    }

    pub fn dim(&self, b: Bidegree) -> u64 {
        self.entries.get(&b).copied().unwrap_or(0)
    }

    /// Collapses weights.
    pub fn by_degree(&self) -> BTreeMap<i64, u64> {
        let mut out = BTreeMap::new();
        for (b, n) in &self.entries {
            *out.entry(b.deg).or_insert(0) += n;
        }
        out
    }

    /// Degreewise tensor product, truncated to the window of `self`.
    pub fn tensor(&self, other: &PoincareTable) -> PoincareTable {
        let mut entries = BTreeMap::new();
        for (b1, n1) in &self.entries {
            for (b2, n2) in &other.entries {
                let b = *b1 + *b2;
                if self.window.contains(b) {
                    *entries.entry(b).or_insert(0) += n1 * n2;
                }
            }
        }
        entries.retain(|_, n| *n > 0);
        PoincareTable { window: self.window, entries }
    }

    /// Drops the unit class at (0,0).
    pub fn reduced(&self) -> PoincareTable {
        let mut t = self.clone();
        if let Some(n) = t.entries.get_mut(&Bidegree::new(0, 0)) {
            *n -= 1;
        }
        t.entries.retain(|_, n| *n > 0);
        t
    }

    /// Reduces every weight modulo `d`.
    pub fn weights_mod(&self, d: i64) -> PoincareTable {
        let mut entries = BTreeMap::new();
        for (b, n) in &self.entries {
            *entries.entry(Bidegree::new(b.deg, b.weight.rem_euclid(d))).or_insert(0) += n;
        }
        PoincareTable { window: Window::new(self.window.max_deg, None), entries }
    }
}

/// P^I(ι_n) for admissible I with e(I) < n, or e(I) = n and ε₀ = 1 (odd ℓ);
/// e(I) < n at ℓ = 2. Weights are `source_weight · ℓ^k`.
pub fn cartan_generators(
    n: i64,
    ctx: PrimeContext,
    max_deg: i64,
    source_weight: i64,
) -> Result<Vec<GeneratorDescriptor>> {
    if n < 1 {
        return Err(Error::Precondition("n must be >= 1".into()));
    }
    let mut out = Vec::new();
    for seq in admissible_sequences(ctx, max_deg - n, Some(n)) {
        let e = excess(&seq, ctx);
        let keep = if ctx.is_odd() { e < n || (e == n && seq.eps()[0]) } else { e < n };
        if !keep {
            continue;
        }
        let dw = degree_weight(&seq, ctx);
        let label = Label { negative: false, word: seq.to_word(ctx), level: n };
        let b = Bidegree::new(n + dw.delta_deg, source_weight * dw.multiplier);
        out.push(GeneratorDescriptor::new(label, b, ctx));
    }
    Ok(out)
}

/// Dimensions of the free graded-commutative algebra on `gens` (exterior on
/// odd generators for odd ℓ, polynomial otherwise).
pub fn monomial_basis(
    gens: &[GeneratorDescriptor],
    ctx: PrimeContext,
    window: Window,
) -> Result<PoincareTable> {
    let mut seen = BTreeSet::new();
    for g in gens {
        if !seen.insert(format!("{}", g.label)) {
            return Err(Error::DuplicateLabel(format!("{}", g.label)));
        }
        if g.bidegree.deg <= 0 {
            return Err(Error::NonPositiveDegree(format!("{}", g.label)));
        }
    }
    let prune_wt = gens.iter().all(|g| g.bidegree.weight >= 0);
    let fits = |b: Bidegree| {
        b.deg <= window.max_deg && (!prune_wt || window.max_wt.map_or(true, |w| b.weight <= w))
    };
    let mut table: BTreeMap<Bidegree, u64> = BTreeMap::new();
    table.insert(Bidegree::new(0, 0), 1);
    for g in gens {
        let mut next = table.clone();
        let max_power = if g.is_exterior(ctx) { 1 } else { window.max_deg / g.bidegree.deg };
        for (b, n) in &table {
            let mut cur = *b;
            for _ in 0..max_power {
                cur = cur + g.bidegree;
                if !fits(cur) {
                    break;
                }
                *next.entry(cur).or_insert(0) += n;
            }
        }
        table = next;
    }
    table.retain(|b, _| window.contains(*b));
    Ok(PoincareTable { window, entries: table })
}

/// Expands polynomial generators into their ℓ-power families
/// x, x^ℓ = P^a x, x^{ℓ²} = P^{aℓ}P^a x, … inside the degree window.
///
/// At odd ℓ only even generators expand. At ℓ = 2 every generator is
/// polynomial and x^{2^ν} = Sq^{2^{ν−1}q}⋯Sq^q x for q = deg x.
pub fn ell_simple_system(
    gens: &[GeneratorDescriptor],
    ctx: PrimeContext,
    max_deg: i64,
) -> Vec<GeneratorDescriptor> {
    let l = ctx.ell_i64();
    let mut out = Vec::new();
    for g in gens {
        out.push(g.clone());
        if g.is_exterior(ctx) || g.bidegree.deg <= 0 {
            continue;
        }
        let mut cur = g.clone();
        loop {
            let q = cur.bidegree.deg;
            let next_deg = q * l;
            if next_deg > max_deg {
                break;
            }
            let letter = if ctx.is_odd() { Letter::P((q / 2) as u32) } else { Letter::Sq(q as u32) };
            let label = cur.label.apply(&[letter], false);
            let b = Bidegree::new(next_deg, cur.bidegree.weight * l);
            cur = GeneratorDescriptor::new(label, b, ctx);
            out.push(cur.clone());
        }
    }
    out
}

/// One transgression step: y = τ(x) for every x, and for odd ℓ and
/// deg x = 2a also z = τ(x^{ℓ−1} ⊗ y) = −βP^a(y).
pub fn borel_step(
    system: &[GeneratorDescriptor],
    ctx: PrimeContext,
) -> Result<Vec<GeneratorDescriptor>> {
    let l = ctx.ell_i64();
    let mut out = Vec::new();
    for x in system {
        if !x.transgressive {
            return Err(Error::NotTransgressive(format!("{}", x.label)));
        }
        let betas = x.label.word.letters().iter().filter(|c| **c == Letter::Beta).count();
        let y_label = Label {
            negative: x.label.negative ^ (betas % 2 == 1),
            word: x.label.word.clone(),
            level: x.label.level + 1,
        };
        let y_b = Bidegree::new(x.bidegree.deg + 1, x.bidegree.weight);
        let y = GeneratorDescriptor::new(y_label, y_b, ctx);
        if ctx.is_odd() && x.parity == Parity::Even {
            let a = x.bidegree.deg / 2;
            let z_label = y.label.apply(&[Letter::Beta, Letter::P(a as u32)], true);
            let z_b = Bidegree::new(2 * a * l + 2, l * y.bidegree.weight);
            out.push(y);
            out.push(GeneratorDescriptor::new(z_label, z_b, ctx));
        } else {
            out.push(y);
        }
    }
    Ok(out)
}

/// Starting data for [`iterate_borel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BorelBase {
    /// H*(K_1): u, βu for odd ℓ; ι₁ for ℓ = 2.
    K1,
    /// H*(K_2) from its explicit generator list.
    K2,
}

/// Output of [`iterate_borel`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorelOutput {
    pub generators: Vec<GeneratorDescriptor>,
    /// Degrees up to this bound are complete.
    pub safe_max_deg: i64,
}

fn base_generators(base: BorelBase, ctx: PrimeContext, max_deg: i64) -> Vec<GeneratorDescriptor> {
    let l = ctx.ell_i64();
    let mut out = Vec::new();
    match base {
        BorelBase::K1 => {
            out.push(GeneratorDescriptor::new(Label::iota(1), Bidegree::new(1, 1), ctx));
            if ctx.is_odd() {
                let v = Label::iota(1).apply(&[Letter::Beta], false);
                out.push(GeneratorDescriptor::new(v, Bidegree::new(2, 1), ctx));
            }
        }
        BorelBase::K2 => {
            out.push(GeneratorDescriptor::new(Label::iota(2), Bidegree::new(2, 1), ctx));
            if ctx.is_odd() {
                // P^{ℓ^ν}⋯P^ℓP^1 β ι and β of it, with P¹β prefix length ν + 1.
                let beta_iota = Label::iota(2).apply(&[Letter::Beta], false);
                out.push(GeneratorDescriptor::new(beta_iota.clone(), Bidegree::new(3, 1), ctx));
                let mut cur = beta_iota;
                let mut power = 1i64;
                loop {
                    cur = cur.apply(&[Letter::P(power as u32)], false);
                    let weight = l * power;
                    let deg = 2 * power * l + 1;
                    if deg > max_deg {
                        break;
                    }
                    out.push(GeneratorDescriptor::new(cur.clone(), Bidegree::new(deg, weight), ctx));
                    if deg + 1 <= max_deg {
                        let bb = cur.apply(&[Letter::Beta], false);
                        out.push(GeneratorDescriptor::new(bb, Bidegree::new(deg + 1, weight), ctx));
                    }
                    power *= l;
                }
            } else {
                // Sq^{2^ν}⋯Sq^2Sq^1 ι₂.
                let mut cur = Label::iota(2);
                let mut power = 1i64;
                loop {
                    cur = cur.apply(&[Letter::Sq(power as u32)], false);
                    let deg = 2 + 2 * power - 1;
                    if deg > max_deg {
                        break;
                    }
                    out.push(GeneratorDescriptor::new(cur.clone(), Bidegree::new(deg, 2 * power), ctx));
                    power *= 2;
                }
            }
        }
    }
    out.retain(|g| g.bidegree.deg <= max_deg);
    out
}

/// Iterates simple-system expansion and transgression from the base up to
/// H*(K_target_n), truncating to `max_deg` at each stage.
///
/// Truncation is exact: a generator of degree D at the next level comes from
/// an element of degree < D, so nothing at or below `max_deg` is lost.
pub fn iterate_borel(
    base: BorelBase,
    target_n: i64,
    ctx: PrimeContext,
    max_deg: i64,
) -> Result<BorelOutput> {
    let start = match base {
        BorelBase::K1 => 1,
        BorelBase::K2 => 2,
    };
    if target_n < 2 || target_n < start {
        return Err(Error::Precondition("target_n must be >= 2 and >= the base level".into()));
    }
    if max_deg < target_n {
        return Err(Error::WindowTooSmall { needed: target_n, max_deg });
    }
    let mut gens = base_generators(base, ctx, max_deg);
    for _ in start..target_n {
        let system = ell_simple_system(&gens, ctx, max_deg);
        gens = borel_step(&system, ctx)?;
        gens.retain(|g| g.bidegree.deg <= max_deg);
    }
    gens.sort_by(|a, b| (a.bidegree, &a.label).cmp(&(b.bidegree, &b.label)));
    Ok(BorelOutput { generators: gens, safe_max_deg: max_deg })
}

/// Bidegree multiset of a generator list.
pub fn bidegree_multiset(gens: &[GeneratorDescriptor]) -> BTreeMap<Bidegree, usize> {
    let mut out = BTreeMap::new();
    for g in gens {
        *out.entry(g.bidegree).or_insert(0) += 1;
    }
    out
}

/// The generators of excess < 2 listed by hand: (), β, and P^{ℓ^k}⋯P^ℓP^1β
/// for odd ℓ; () and Sq^{2^k}⋯Sq^2Sq^1 for ℓ = 2.
pub fn low_excess_family(ctx: PrimeContext, max_deg: i64) -> Vec<AdmissibleSeq> {
    let l = ctx.ell();
    let mut out = vec![AdmissibleSeq::identity()];
    if ctx.is_odd() {
        if max_deg >= 1 {
            out.push(AdmissibleSeq::odd(vec![true], Vec::new()).expect("valid"));
        }
        let mut s: Vec<u32> = vec![1];
        loop {
            let mut eps = vec![false; s.len()];
            eps.push(true);
            let seq = AdmissibleSeq::odd(eps, s.clone()).expect("valid");
            if seq.to_word(ctx).degree(ctx) > max_deg {
                break;
            }
            out.push(seq);
            s.insert(0, s[0] * l);
        }
    } else {
        let mut s: Vec<u32> = vec![1];
        loop {
            let seq = AdmissibleSeq::sq(s.clone()).expect("valid");
            if seq.to_word(ctx).degree(ctx) > max_deg {
                break;
            }
            out.push(seq);
            s.insert(0, s[0] * 2);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steenrod::excess;
    use alloc::string::ToString;

    fn ctx(ell: u32) -> PrimeContext {
        PrimeContext::new(ell, 1).unwrap()
    }

    fn gen(name_level: i64, deg: i64, wt: i64, c: PrimeContext) -> GeneratorDescriptor {
        GeneratorDescriptor::new(Label::iota(name_level), Bidegree::new(deg, wt), c)
    }

    #[test]
    fn k2_generators_at_three() {
        let c = ctx(3);
        let gens = cartan_generators(2, c, 8, 1).unwrap();
        let shown: Vec<_> = gens.iter().map(|g| (g.label.to_string(), g.bidegree)).collect();
        assert_eq!(
            shown,
            vec![
                ("iota2".to_string(), Bidegree::new(2, 1)),
                ("beta iota2".to_string(), Bidegree::new(3, 1)),
                ("P1 beta iota2".to_string(), Bidegree::new(7, 3)),
                ("beta P1 beta iota2".to_string(), Bidegree::new(8, 3)),
            ]
        );
    }

    #[test]
    fn k1_generators_odd() {
        for ell in [3, 5, 7] {
            let gens = cartan_generators(1, ctx(ell), 200, 1).unwrap();
            let degs: Vec<i64> = gens.iter().map(|g| g.bidegree.deg).collect();
            assert_eq!(degs, vec![1, 2]);
        }
    }

    #[test]
    fn basis_examples() {
        let c = ctx(3);
        let gens = vec![
            gen(2, 2, 1, c),
            GeneratorDescriptor::new(Label::iota(2).apply(&[Letter::Beta], false), Bidegree::new(3, 1), c),
        ];
        let t = monomial_basis(&gens, c, Window::new(6, None)).unwrap().by_degree();
        assert_eq!((t[&4], t[&5], t[&6]), (1, 1, 1));

        let odd = vec![gen(3, 3, 1, c)];
        let t = monomial_basis(&odd, c, Window::new(10, None)).unwrap().by_degree();
        assert_eq!(t.get(&3), Some(&1));
        assert_eq!(t.get(&6), None);

        let t = monomial_basis(&[], c, Window::new(10, None)).unwrap();
        assert_eq!(t, PoincareTable::unit(Window::new(10, None)));
    }

    #[test]
    fn basis_rejects_duplicates_and_degree_zero() {
        let c = ctx(3);
        let g = gen(2, 2, 1, c);
        assert!(matches!(
            monomial_basis(&[g.clone(), g], c, Window::new(5, None)),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            monomial_basis(&[gen(0, 0, 1, c)], c, Window::new(5, None)),
            Err(Error::NonPositiveDegree(_))
        ));
    }

    #[test]
    fn polynomial_at_two() {
        let c = ctx(2);
        let t = monomial_basis(&[gen(1, 1, 1, c)], c, Window::new(6, None)).unwrap().by_degree();
        assert!((0..=6).all(|d| t[&d] == 1));
    }

    #[test]
    fn simple_system_examples() {
        let c = ctx(3);
        let v = GeneratorDescriptor::new(Label::iota(1).apply(&[Letter::Beta], false), Bidegree::new(2, 1), c);
        let fam = ell_simple_system(&[v], c, 20);
        let shown: Vec<_> = fam.iter().map(|g| (g.label.to_string(), g.bidegree)).collect();
        assert_eq!(
            shown,
            vec![
                ("beta iota1".to_string(), Bidegree::new(2, 1)),
                ("P1 beta iota1".to_string(), Bidegree::new(6, 3)),
                ("P3 P1 beta iota1".to_string(), Bidegree::new(18, 9)),
            ]
        );
        let u = gen(1, 1, 1, c);
        assert_eq!(ell_simple_system(&[u.clone()], c, 20), vec![u]);
    }

    #[test]
    fn borel_step_examples() {
        let c = ctx(3);
        let x = gen(2, 3, 1, c);
        let out = borel_step(&[x], c).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].bidegree, Bidegree::new(4, 1));

        let iota = gen(2, 2, 1, c);
        let out = borel_step(&[iota], c).unwrap();
        assert_eq!(out[1].bidegree, Bidegree::new(8, 3));
        assert_eq!(out[1].label.to_string(), "-beta P1 iota3");

        let mut bad = gen(2, 2, 1, c);
        bad.transgressive = false;
        assert!(matches!(borel_step(&[bad], c), Err(Error::NotTransgressive(_))));
    }

    #[test]
    fn borel_from_k1_gives_k2() {
        let c = ctx(3);
        let out = iterate_borel(BorelBase::K1, 2, c, 3).unwrap();
        let degs: Vec<i64> = out.generators.iter().map(|g| g.bidegree.deg).collect();
        assert_eq!(degs, vec![2, 3]);
        let out = iterate_borel(BorelBase::K1, 2, c, 60).unwrap();
        let cartan = cartan_generators(2, c, 60, 1).unwrap();
        assert_eq!(bidegree_multiset(&out.generators), bidegree_multiset(&cartan));
        assert!(matches!(
            iterate_borel(BorelBase::K1, 4, c, 3),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn borel_matches_cartan_small() {
        for ell in [2, 3] {
            let c = ctx(ell);
            for n in 2..=4 {
                for base in [BorelBase::K1, BorelBase::K2] {
                    let out = iterate_borel(base, n, c, 24).unwrap();
                    let cartan = cartan_generators(n, c, 24, 1).unwrap();
                    assert_eq!(
                        bidegree_multiset(&out.generators),
                        bidegree_multiset(&cartan),
                        "ell={ell} n={n} base={base:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn low_excess_census() {
        for ell in [2u32, 3, 5] {
            let c = ctx(ell);
            let bound = 2 * i64::from(ell).pow(5) + 2;
            let found: Vec<_> = admissible_sequences(c, bound, Some(1));
            assert!(found.iter().all(|s| excess(s, c) < 2));
            let mut expected = low_excess_family(c, bound);
            expected.sort_by_key(|s| s.to_word(c).degree(c));
            assert_eq!(found, expected, "ell={ell}");
        }
    }

    #[test]
    fn tensor_with_unit_is_identity() {
        let c = ctx(3);
        let w = Window::new(20, None);
        let t = monomial_basis(&cartan_generators(2, c, 20, 1).unwrap(), c, w).unwrap();
        assert_eq!(t.tensor(&PoincareTable::unit(w)), t);
    }
}
