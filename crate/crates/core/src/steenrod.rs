//! Operation words, admissible sequences and the Adem rewriting engine.
//!
//! A [`Word`] lists letters in composition order: `[P(3), P(1), Beta]` is the
//! operation P³P¹β, which applies β first. An [`AdmissibleSeq`]
//! I = (ε₀, s₁, ε₁, …, s_k, ε_k) encodes β^{ε₀}P^{s₁}β^{ε₁}⋯P^{s_k}β^{ε_k}
//! for odd ℓ and Sq^{s₁}⋯Sq^{s_k} for ℓ = 2.
//!
//! # Termination of the rewriting
//!
//! Let the moment of a word be ∑ j·s_j over its power letters (position j
//! counted among power letters only). Every nonzero Adem summand with s ≥ 1
//! lowers the moment by s. The only summand with s = 0 is the boundary term
//! of P^{ℓb}βP^b, which keeps the moment but moves a β strictly to the left.
//! So (moment, sum of β positions) decreases lexicographically and rewriting
//! terminates.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::{binom, sign, Flp, PrimeContext};
use crate::error::{Error, Result};

/// One operation letter.
///
/// The derived order puts β below every power letter, which is the tie-break
/// used when sorting words of equal degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Beta,
    P(u32),
    Sq(u32),
    /// Voevodsky's P_V^a, kept formal.
    PV(u32),
    /// Voevodsky's Sq_V^a, kept formal.
    SqV(u32),
}

impl Letter {
    /// Cohomological degree added by the letter.
    pub fn degree(self, ctx: PrimeContext) -> i64 {
        let q = ctx.ell_i64() - 1;
        match self {
            Letter::Beta => 1,
            Letter::P(a) | Letter::PV(a) => 2 * i64::from(a) * q,
            Letter::Sq(a) | Letter::SqV(a) => i64::from(a),
        }
    }

    fn is_power(self) -> bool {
        !matches!(self, Letter::Beta)
    }

    fn is_formal(self) -> bool {
        matches!(self, Letter::PV(_) | Letter::SqV(_))
    }

    fn is_identity_power(self) -> bool {
        matches!(self, Letter::P(0) | Letter::Sq(0))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Beta => f.write_str("beta"),
            Letter::P(a) => write!(f, "P{a}"),
            Letter::Sq(a) => write!(f, "Sq{a}"),
            Letter::PV(a) => write!(f, "PV{a}"),
            Letter::SqV(a) => write!(f, "SqV{a}"),
        }
    }
}

/// A composite of operation letters, leftmost applied last.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self, ctx: PrimeContext) -> i64 {
        self.0.iter().map(|l| l.degree(ctx)).sum()
    }

    /// Composite `self ∘ other`.
    pub fn then(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    fn has_double_beta(&self) -> bool {
        self.0.windows(2).any(|w| w[0] == Letter::Beta && w[1] == Letter::Beta)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (j, l) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// How P⁰ (and Sq⁰) letters are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Topological specialisation: P⁰ is the identity and is deleted.
    Classical,
    /// P⁰ is the Frobenius and stays a formal letter.
    Motivic,
}

/// A finite F_ℓ-linear combination of words.
#[derive(Clone, PartialEq, Eq)]
pub struct OpPoly {
    ctx: PrimeContext,
    mode: Mode,
    terms: BTreeMap<Word, Flp>,
}

impl OpPoly {
    pub fn zero(ctx: PrimeContext, mode: Mode) -> Self {
        Self { ctx, mode, terms: BTreeMap::new() }
    }

    pub fn from_word(word: Word, ctx: PrimeContext, mode: Mode) -> Self {
        let mut p = Self::zero(ctx, mode);
        p.add_term(word, ctx.one());
        p
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff · word`, dropping identity power letters in classical mode
    /// and words containing ββ.
    pub fn add_term(&mut self, word: Word, coeff: Flp) {
        let word = canonical_letters(word, self.mode);
        if coeff.is_zero() || word.has_double_beta() {
            return;
        }
        let slot = self.terms.entry(word.clone()).or_insert(self.ctx.zero());
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&word);
        }
    }

    pub fn add(&mut self, other: &OpPoly) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), *c);
        }
    }

    pub fn scale(&self, c: Flp) -> OpPoly {
        let mut out = OpPoly::zero(self.ctx, self.mode);
        for (w, k) in &self.terms {
            out.add_term(w.clone(), *k * c);
        }
        out
    }

    /// Composite `self ∘ other`, without reduction.
    pub fn compose(&self, other: &OpPoly) -> OpPoly {
        let mut out = OpPoly::zero(self.ctx, self.mode);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                out.add_term(w1.then(w2), *c1 * *c2);
            }
        }
        out
    }

    pub fn coeff(&self, word: &Word) -> Flp {
        self.terms.get(word).copied().unwrap_or(self.ctx.zero())
    }

    /// Terms in canonical order: by degree, then lexicographically.
    pub fn terms(&self) -> Vec<(&Word, Flp)> {
        let mut v: Vec<(&Word, Flp)> = self.terms.iter().map(|(w, c)| (w, *c)).collect();
        v.sort_by(|a, b| (a.0.degree(self.ctx), a.0).cmp(&(b.0.degree(self.ctx), b.0)));
        v
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.terms.keys()
    }
}

impl fmt::Debug for OpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OpPoly[{}]", self)
    }
}

impl fmt::Display for OpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (j, (w, c)) in terms.into_iter().enumerate() {
            if j > 0 {
                f.write_str(" + ")?;
            }
            match (c.value(), w.is_identity()) {
                (1, _) => write!(f, "{w}")?,
                (v, true) => write!(f, "{v}")?,
                (v, false) => write!(f, "{v} {w}")?,
            }
        }
        Ok(())
    }
}

fn canonical_letters(word: Word, mode: Mode) -> Word {
    match mode {
        Mode::Classical => Word(word.0.into_iter().filter(|l| !l.is_identity_power()).collect()),
        Mode::Motivic => word,
    }
}

// ---------------------------------------------------------------------------
// Admissible sequences

/// I = (ε₀, s₁, ε₁, …, s_k, ε_k); for ℓ = 2 only the s-part is used.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleSeq {
    eps: Vec<bool>,
    s: Vec<u32>,
}

impl AdmissibleSeq {
    /// Sequence for odd ℓ; `eps` must have one more entry than `s`.
    pub fn odd(eps: Vec<bool>, s: Vec<u32>) -> Result<Self> {
        if eps.len() != s.len() + 1 || s.contains(&0) {
            return Err(Error::Precondition("need eps.len() == s.len()+1 and s_j >= 1".into()));
        }
        Ok(Self { eps, s })
    }

    /// Sq-sequence for ℓ = 2.
    pub fn sq(s: Vec<u32>) -> Result<Self> {
        if s.contains(&0) {
            return Err(Error::Precondition("Sq exponents must be >= 1".into()));
        }
        let eps = vec![false; s.len() + 1];
        Ok(Self { eps, s })
    }

    /// Reads the flat form (ε₀, s₁, ε₁, …) for odd ℓ, or (s₁, …) for ℓ = 2.
    pub fn from_flat(flat: &[u32], ctx: PrimeContext) -> Result<Self> {
        if !ctx.is_odd() {
            return Self::sq(flat.to_vec());
        }
        if flat.is_empty() || flat.len() % 2 == 0 {
            return Err(Error::Precondition("flat odd sequence has odd length".into()));
        }
        let mut eps = Vec::new();
        let mut s = Vec::new();
        for (j, v) in flat.iter().enumerate() {
            if j % 2 == 0 {
                if *v > 1 {
                    return Err(Error::Precondition("epsilon entries are 0 or 1".into()));
                }
                eps.push(*v == 1);
            } else {
                s.push(*v);
            }
        }
        Self::odd(eps, s)
    }

    pub fn identity() -> Self {
        Self { eps: vec![false], s: Vec::new() }
    }

    pub fn eps(&self) -> &[bool] {
        &self.eps
    }

    pub fn s(&self) -> &[u32] {
        &self.s
    }

    /// Number of power letters k.
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty() && !self.eps[0]
    }

    pub fn flat(&self, ctx: PrimeContext) -> Vec<u32> {
        if !ctx.is_odd() {
            return self.s.clone();
        }
        let mut v = vec![u32::from(self.eps[0])];
        for (s, e) in self.s.iter().zip(&self.eps[1..]) {
            v.push(*s);
            v.push(u32::from(*e));
        }
        v
    }

    pub fn to_word(&self, ctx: PrimeContext) -> Word {
        let mut letters = Vec::new();
        if ctx.is_odd() {
            if self.eps[0] {
                letters.push(Letter::Beta);
            }
            for (s, e) in self.s.iter().zip(&self.eps[1..]) {
                letters.push(Letter::P(*s));
                if *e {
                    letters.push(Letter::Beta);
                }
            }
        } else {
            letters.extend(self.s.iter().map(|s| Letter::Sq(*s)));
        }
        Word(letters)
    }

    /// Inverse of [`AdmissibleSeq::to_word`]; fails on ββ, P⁰, or letters
    /// from the wrong family.
    pub fn from_word(word: &Word, ctx: PrimeContext) -> Result<Self> {
        if ctx.is_odd() {
            let mut eps = vec![false];
            let mut s = Vec::new();
            for l in word.letters() {
                match l {
                    Letter::Beta => {
                        let last = eps.last_mut().expect("eps nonempty");
                        if *last {
                            return Err(Error::Precondition("double beta".into()));
                        }
                        *last = true;
                    }
                    Letter::P(a) if *a > 0 => {
                        s.push(*a);
                        eps.push(false);
                    }
                    _ => return Err(Error::MixedFamilies),
                }
            }
            Ok(Self { eps, s })
        } else {
            let mut s = Vec::new();
            for l in word.letters() {
                match l {
                    Letter::Sq(a) if *a > 0 => s.push(*a),
                    Letter::Beta => s.push(1),
                    _ => return Err(Error::MixedFamilies),
                }
            }
            Self::sq(s)
        }
    }

    /// The sequence with the leading power letter removed.
    fn drop_leading_power(&self) -> Self {
        if self.s.is_empty() {
            return self.clone();
        }
        Self { eps: self.eps[1..].to_vec(), s: self.s[1..].to_vec() }
    }
}

/// s_i ≥ ℓ s_{i+1} + ε_i for 1 ≤ i < k (odd ℓ), s_i ≥ 2 s_{i+1} (ℓ = 2).
pub fn is_admissible(seq: &AdmissibleSeq, ctx: PrimeContext) -> bool {
    if ctx.is_odd() {
        is_admissible_beta_form(seq, ctx.ell_i64())
    } else {
        seq.s.windows(2).all(|w| u64::from(w[0]) >= 2 * u64::from(w[1]))
    }
}

/// Excess e(I).
pub fn excess(seq: &AdmissibleSeq, ctx: PrimeContext) -> i64 {
    if ctx.is_odd() {
        excess_beta_form(seq, ctx.ell_i64())
    } else {
        let first = seq.s.first().map_or(0, |v| i64::from(*v));
        first - seq.s.iter().skip(1).map(|v| i64::from(*v)).sum::<i64>()
    }
}

/// Admissibility read in the (ε, s) form with parameter `l`, for any prime.
pub fn is_admissible_beta_form(seq: &AdmissibleSeq, l: i64) -> bool {
    seq.s.windows(2).enumerate().all(|(j, w)| {
        i64::from(w[0]) >= l * i64::from(w[1]) + i64::from(seq.eps[j + 1])
    })
}

/// Excess read in the (ε, s) form with parameter `l`, for any prime.
pub fn excess_beta_form(seq: &AdmissibleSeq, l: i64) -> i64 {
    let s_at = |j: usize| seq.s.get(j).map_or(0, |v| i64::from(*v));
    let paired: i64 =
        (0..seq.s.len()).map(|j| s_at(j) - l * s_at(j + 1) - i64::from(seq.eps[j + 1])).sum();
    2 * paired + seq.eps.iter().map(|e| i64::from(*e)).sum::<i64>()
}

/// Degree shift and weight multiplier of P^I.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeWeight {
    pub delta_deg: i64,
    /// ℓ^k with k the number of power letters.
    pub multiplier: i64,
}

impl DegreeWeight {
    /// ℓ^k − 1, the weight P^I carries on a weight-1 class relative to it.
    pub fn relative_weight(&self) -> i64 {
        self.multiplier - 1
    }
}

pub fn degree_weight(seq: &AdmissibleSeq, ctx: PrimeContext) -> DegreeWeight {
    let delta_deg = seq.to_word(ctx).degree(ctx);
    let multiplier = ctx.ell_i64().saturating_pow(seq.s.len() as u32);
    DegreeWeight { delta_deg, multiplier }
}

/// How P^I acts on the fundamental class ι_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Unstable {
    Zero,
    /// P^I ι = (P^{I'} ι)^ℓ.
    Power(AdmissibleSeq),
    /// P^I ι is one of the free generators.
    Basis,
}

pub fn unstable_evaluate(seq: &AdmissibleSeq, n: i64, ctx: PrimeContext) -> Result<Unstable> {
    if !is_admissible(seq, ctx) {
        return Err(Error::NotAdmissible);
    }
    let e = excess(seq, ctx);
    let leading_beta = ctx.is_odd() && seq.eps[0];
    Ok(if e > n {
        Unstable::Zero
    } else if e == n && !leading_beta && !seq.s.is_empty() {
        Unstable::Power(seq.drop_leading_power())
    } else {
        Unstable::Basis
    })
}

/// Cartan formula P^a(uv) = ∑_{s+t=a} P^s(u) P^t(v), all coefficients 1.
pub fn cartan_expand(letter: Letter) -> Result<Vec<(Letter, Letter)>> {
    match letter {
        Letter::P(a) => Ok((0..=a).map(|s| (Letter::P(s), Letter::P(a - s))).collect()),
        Letter::Sq(a) => Ok((0..=a).map(|s| (Letter::Sq(s), Letter::Sq(a - s))).collect()),
        _ => Err(Error::Precondition("Cartan expansion is for P and Sq letters".into())),
    }
}

/// All admissible sequences with Δdeg ≤ `max_deg` and, if given, excess ≤
/// `max_excess`, sorted by degree.
///
/// Sequences are built by prepending letters to the bases () and (1).
/// Prepending never lowers the excess, so the excess bound prunes whole
/// subtrees.
pub fn admissible_sequences(
    ctx: PrimeContext,
    max_deg: i64,
    max_excess: Option<i64>,
) -> Vec<AdmissibleSeq> {
    if ctx.is_odd() {
        return beta_form_sequences(ctx.ell_i64(), max_deg, max_excess);
    }
    let within = |e: i64| max_excess.map_or(true, |m| e <= m);
    let mut out = Vec::new();
    let mut stack = vec![(AdmissibleSeq::identity(), 0i64, 0i64)];
    while let Some((seq, deg, e)) = stack.pop() {
        let s1 = seq.s.first().map_or(0, |v| i64::from(*v));
        let mut s_new = (2 * s1).max(1);
        loop {
            let d = deg + s_new;
            let e_new = e + s_new - 2 * s1;
            if d > max_deg || !within(e_new) {
                break;
            }
            let mut s = vec![s_new as u32];
            s.extend_from_slice(&seq.s);
            stack.push((AdmissibleSeq { eps: vec![false; s.len() + 1], s }, d, e_new));
            s_new += 1;
        }
        out.push((deg, seq));
    }
    sort_by_degree(out)
}

/// Enumeration in the (ε, s) form for parameter `l`, where P^s has degree
/// 2s(l−1) and β degree 1. Used for odd primes and for (ε, s) sequences at
/// ℓ = 2.
pub fn beta_form_sequences(l: i64, max_deg: i64, max_excess: Option<i64>) -> Vec<AdmissibleSeq> {
    let within = |e: i64| max_excess.map_or(true, |m| e <= m);
    let mut out = Vec::new();
    let mut stack = vec![(AdmissibleSeq::identity(), 0i64, 0i64)];
    if max_deg >= 1 && within(1) {
        stack.push((AdmissibleSeq { eps: vec![true], s: Vec::new() }, 1, 1));
    }
    while let Some((seq, deg, e)) = stack.pop() {
        let s1 = seq.s.first().map_or(0, |v| i64::from(*v));
        let eps0 = i64::from(seq.eps[0]);
        let lo = (l * s1 + eps0).max(1);
        for new_eps in [false, true] {
            let mut s_new = lo;
            loop {
                let d = deg + 2 * s_new * (l - 1) + i64::from(new_eps);
                let e_new = e + 2 * (s_new - l * s1 - eps0) + i64::from(new_eps);
                if d > max_deg || !within(e_new) {
                    break;
                }
                let mut eps = vec![new_eps];
                eps.extend_from_slice(&seq.eps);
                let mut s = vec![s_new as u32];
                s.extend_from_slice(&seq.s);
                stack.push((AdmissibleSeq { eps, s }, d, e_new));
                s_new += 1;
            }
        }
        out.push((deg, seq));
    }
    sort_by_degree(out)
}

fn sort_by_degree(mut v: Vec<(i64, AdmissibleSeq)>) -> Vec<AdmissibleSeq> {
    v.sort_by(|a, b| (a.0, &a.1.eps, &a.1.s).cmp(&(b.0, &b.1.eps, &b.1.s)));
    v.into_iter().map(|(_, s)| s).collect()
}

// ---------------------------------------------------------------------------
// Adem rewriting

/// Which redex is rewritten first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Redex {
    DoubleBeta(usize),
    PowerPower(usize),
    PowerBetaPower(usize),
}

fn find_redexes(word: &Word, ctx: PrimeContext) -> Vec<Redex> {
    let l = u64::from(ctx.ell());
    let ls = word.letters();
    let mut out = Vec::new();
    for j in 0..ls.len() {
        match (ls[j], ls.get(j + 1), ls.get(j + 2)) {
            (Letter::Beta, Some(Letter::Beta), _) => out.push(Redex::DoubleBeta(j)),
            (Letter::P(a), Some(Letter::P(b)), _) if u64::from(a) < l * u64::from(*b) => {
                out.push(Redex::PowerPower(j))
            }
            (Letter::P(a), Some(Letter::Beta), Some(Letter::P(b)))
                if u64::from(a) <= l * u64::from(*b) =>
            {
                out.push(Redex::PowerBetaPower(j))
            }
            (Letter::Sq(a), Some(Letter::Sq(b)), _) if a < 2 * b => out.push(Redex::PowerPower(j)),
            _ => {}
        }
    }
    out
}

/// True iff no Adem relation applies to the word.
pub fn is_reduced_word(word: &Word, ctx: PrimeContext) -> bool {
    find_redexes(word, ctx).is_empty()
}

/// A P⁰ (or Sq⁰) that ends up directly before a terminal β has no Adem move
/// carrying it further right.
pub fn stuck_frobenius(word: &Word) -> bool {
    let ls = word.letters();
    ls.windows(2).enumerate().any(|(j, w)| {
        w[0].is_identity_power() && w[1] == Letter::Beta && j + 2 == ls.len()
    })
}

/// Memoising Adem reducer.
pub struct Reducer {
    ctx: PrimeContext,
    mode: Mode,
    strategy: Strategy,
    cache: BTreeMap<Word, Vec<(Word, Flp)>>,
}

impl Reducer {
    pub fn new(ctx: PrimeContext, mode: Mode, strategy: Strategy) -> Self {
        Self { ctx, mode, strategy, cache: BTreeMap::new() }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn reduce(&mut self, p: &OpPoly) -> Result<OpPoly> {
        let mut out = OpPoly::zero(self.ctx, self.mode);
        for (w, c) in &p.terms {
            check_families(w, self.ctx, self.mode)?;
            for (rw, rc) in self.reduce_word(w) {
                out.add_term(rw, rc * *c);
            }
        }
        Ok(out)
    }

    fn reduce_word(&mut self, word: &Word) -> Vec<(Word, Flp)> {
        if let Some(hit) = self.cache.get(word) {
            return hit.clone();
        }
        let redexes = find_redexes(word, self.ctx);
        let chosen = match self.strategy {
            Strategy::Leftmost => redexes.first().copied(),
            Strategy::Rightmost => redexes.last().copied(),
        };
        let result = match chosen {
            None => vec![(word.clone(), self.ctx.one())],
            Some(redex) => {
                let mut acc = OpPoly::zero(self.ctx, self.mode);
                for (w, c) in rewrite(word, redex, self.ctx) {
                    let w = canonical_letters(w, self.mode);
                    if w.has_double_beta() {
                        continue;
                    }
                    for (rw, rc) in self.reduce_word(&w) {
                        acc.add_term(rw, rc * c);
                    }
                }
                acc.terms.into_iter().collect()
            }
        };
        self.cache.insert(word.clone(), result.clone());
        result
    }
}

fn check_families(word: &Word, ctx: PrimeContext, mode: Mode) -> Result<()> {
    for l in word.letters() {
        if l.is_formal() {
            return Err(Error::FormalVoevodsky);
        }
        let ok = match (ctx.is_odd(), l) {
            (true, Letter::Beta | Letter::P(_)) => true,
            (false, Letter::Sq(_)) => true,
            (false, Letter::Beta) => mode == Mode::Classical,
            _ => false,
        };
        if !ok {
            return Err(Error::MixedFamilies);
        }
    }
    Ok(())
}

fn splice(word: &Word, at: usize, width: usize, middle: &[Letter]) -> Word {
    let ls = word.letters();
    let mut out = Vec::with_capacity(ls.len() + 1);
    out.extend_from_slice(&ls[..at]);
    out.extend_from_slice(middle);
    out.extend_from_slice(&ls[at + width..]);
    Word(out)
}

fn rewrite(word: &Word, redex: Redex, ctx: PrimeContext) -> Vec<(Word, Flp)> {
    let l = ctx.ell_i64();
    let ls = word.letters();
    let mut out = Vec::new();
    match redex {
        Redex::DoubleBeta(_) => {}
        Redex::PowerPower(j) => match (ls[j], ls[j + 1]) {
            (Letter::P(a), Letter::P(b)) => {
                let (a, b) = (i64::from(a), i64::from(b));
                for t in 0..=b {
                    let s = b - t;
                    let c = sign(a + t, ctx) * binom((l - 1) * s - 1, a - t * l, ctx);
                    if !c.is_zero() {
                        let mid = [Letter::P((a + s) as u32), Letter::P(t as u32)];
                        out.push((splice(word, j, 2, &mid), c));
                    }
                }
            }
            (Letter::Sq(a), Letter::Sq(b)) => {
                let (a, b) = (i64::from(a), i64::from(b));
                for t in 0..=b {
                    let s = b - t;
                    let c = binom(s - 1, a - 2 * t, ctx);
                    if !c.is_zero() {
                        let mid = [Letter::Sq((a + s) as u32), Letter::Sq(t as u32)];
                        out.push((splice(word, j, 2, &mid), c));
                    }
                }
            }
            _ => unreachable!("power-power redex"),
        },
        Redex::PowerBetaPower(j) => {
            let (Letter::P(a), Letter::P(b)) = (ls[j], ls[j + 2]) else {
                unreachable!("power-beta-power redex")
            };
            let (a, b) = (i64::from(a), i64::from(b));
            for t in 0..=b {
                let s = b - t;
                let c1 = sign(a + t, ctx) * binom((l - 1) * s, a - t * l, ctx);
                if !c1.is_zero() {
                    let mid = [Letter::Beta, Letter::P((a + s) as u32), Letter::P(t as u32)];
                    out.push((splice(word, j, 3, &mid), c1));
                }
                let c2 = sign(a + t + 1, ctx) * binom((l - 1) * s - 1, a - t * l - 1, ctx);
                if !c2.is_zero() {
                    let mid = [Letter::P((a + s) as u32), Letter::Beta, Letter::P(t as u32)];
                    out.push((splice(word, j, 3, &mid), c2));
                }
            }
        }
    }
    out
}

/// Adem-reduces every word to admissible form (leftmost-innermost).
pub fn adem_reduce(p: &OpPoly) -> Result<OpPoly> {
    Reducer::new(p.ctx, p.mode, Strategy::Leftmost).reduce(p)
}

/// Adem reduction with an explicit strategy, for confluence checks.
pub fn adem_reduce_with(p: &OpPoly, strategy: Strategy) -> Result<OpPoly> {
    Reducer::new(p.ctx, p.mode, strategy).reduce(p)
}

/// The moment ∑ j·s_j over power letters (1-based positions).
pub fn moment(word: &Word) -> i64 {
    word.letters()
        .iter()
        .filter(|l| l.is_power())
        .enumerate()
        .map(|(j, l)| {
            let a = match l {
                Letter::P(a) | Letter::Sq(a) | Letter::PV(a) | Letter::SqV(a) => i64::from(*a),
                Letter::Beta => 0,
            };
            (j as i64 + 1) * a
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn ctx(ell: u32) -> PrimeContext {
        PrimeContext::new(ell, 1).unwrap()
    }

    fn word(ls: &[Letter]) -> Word {
        Word(ls.to_vec())
    }

    fn reduce(ls: &[Letter], ell: u32, mode: Mode) -> OpPoly {
        adem_reduce(&OpPoly::from_word(word(ls), ctx(ell), mode)).unwrap()
    }

    use Letter::{Beta, Sq, P, PV};

    #[test]
    fn admissibility_examples() {
        let c3 = ctx(3);
        let good = AdmissibleSeq::from_flat(&[0, 3, 0, 1, 1], c3).unwrap();
        let bad = AdmissibleSeq::from_flat(&[0, 3, 1, 1, 1], c3).unwrap();
        assert!(is_admissible(&good, c3));
        assert!(!is_admissible(&bad, c3));
        assert!(is_admissible(&AdmissibleSeq::sq(vec![2, 1]).unwrap(), ctx(2)));
        assert!(!is_admissible(&AdmissibleSeq::sq(vec![1, 1]).unwrap(), ctx(2)));
    }

    #[test]
    fn excess_examples() {
        for ell in [3, 5, 7] {
            let beta = AdmissibleSeq::from_flat(&[1], ctx(ell)).unwrap();
            assert_eq!(excess(&beta, ctx(ell)), 1);
        }
        let p1b = AdmissibleSeq::from_flat(&[0, 1, 1], ctx(3)).unwrap();
        assert_eq!(excess(&p1b, ctx(3)), 1);
        assert_eq!(excess(&AdmissibleSeq::sq(vec![2, 1]).unwrap(), ctx(2)), 1);
        assert_eq!(excess(&AdmissibleSeq::identity(), ctx(3)), 0);
    }

    #[test]
    fn degree_weight_examples() {
        let p1b = AdmissibleSeq::from_flat(&[0, 1, 1], ctx(3)).unwrap();
        let dw = degree_weight(&p1b, ctx(3));
        assert_eq!((dw.delta_deg, dw.multiplier, dw.relative_weight()), (5, 3, 2));
        let dw = degree_weight(&AdmissibleSeq::sq(vec![2, 1]).unwrap(), ctx(2));
        assert_eq!((dw.delta_deg, dw.multiplier), (3, 4));
        let dw = degree_weight(&AdmissibleSeq::identity(), ctx(5));
        assert_eq!((dw.delta_deg, dw.multiplier), (0, 1));
    }

    #[test]
    fn flat_and_word_roundtrip() {
        let c = ctx(3);
        let seq = AdmissibleSeq::from_flat(&[1, 3, 0, 1, 1], c).unwrap();
        assert_eq!(seq.to_word(c).to_string(), "beta P3 P1 beta");
        assert_eq!(AdmissibleSeq::from_word(&seq.to_word(c), c).unwrap(), seq);
        assert_eq!(seq.flat(c), vec![1, 3, 0, 1, 1]);
    }

    #[test]
    fn adem_examples() {
        assert!(reduce(&[Sq(1), Sq(1)], 2, Mode::Classical).is_zero());
        assert_eq!(reduce(&[Sq(2), Sq(2)], 2, Mode::Classical).to_string(), "Sq3 Sq1");
        assert_eq!(reduce(&[P(1), P(1)], 3, Mode::Classical).to_string(), "2 P2");
        assert_eq!(reduce(&[P(1), P(1)], 3, Mode::Motivic).to_string(), "2 P2 P0");
    }

    #[test]
    fn known_odd_relations() {
        // P¹βP¹ = βP²+P²β at ℓ = 3 (Milnor's table).
        let r = reduce(&[P(1), Beta, P(1)], 3, Mode::Classical);
        assert_eq!(r.to_string(), "beta P2 + P2 beta");
        // P¹P² at ℓ = 3 reduces to admissible words only.
        let r = reduce(&[P(1), P(2)], 3, Mode::Classical);
        for w in r.words() {
            assert!(is_reduced_word(w, ctx(3)));
        }
        // Sq²Sq³ = Sq⁵ + Sq⁴Sq¹.
        let r = reduce(&[Sq(2), Sq(3)], 2, Mode::Classical);
        assert_eq!(r.to_string(), "Sq4 Sq1 + Sq5");
    }

    #[test]
    fn frobenius_moves_right() {
        let r = reduce(&[P(0), P(2)], 3, Mode::Motivic);
        assert_eq!(r.to_string(), "P2 P0");
        let r = reduce(&[P(0), Beta, P(1)], 5, Mode::Motivic);
        assert_eq!(r.to_string(), "beta P1 P0");
        let stuck = word(&[P(1), P(0), Beta]);
        assert!(stuck_frobenius(&stuck));
        assert!(!stuck_frobenius(&word(&[P(1), P(0)])));
    }

    #[test]
    fn double_beta_vanishes() {
        assert!(reduce(&[P(2), Beta, Beta, P(1)], 3, Mode::Classical).is_zero());
    }

    #[test]
    fn voevodsky_letters_rejected() {
        let p = OpPoly::from_word(word(&[PV(1), P(1)]), ctx(3), Mode::Motivic);
        assert_eq!(adem_reduce(&p), Err(Error::FormalVoevodsky));
    }

    #[test]
    fn unstable_examples() {
        let c = ctx(3);
        let p1 = AdmissibleSeq::from_flat(&[0, 1, 0], c).unwrap();
        assert_eq!(unstable_evaluate(&p1, 2, c).unwrap(), Unstable::Power(AdmissibleSeq::identity()));
        let p2 = AdmissibleSeq::from_flat(&[0, 2, 0], c).unwrap();
        assert_eq!(unstable_evaluate(&p2, 2, c).unwrap(), Unstable::Zero);
        let bpb = AdmissibleSeq::from_flat(&[1, 1, 1], c).unwrap();
        assert_eq!(unstable_evaluate(&bpb, 2, c).unwrap(), Unstable::Basis);
        let bad = AdmissibleSeq::from_flat(&[0, 1, 0, 1, 0], c).unwrap();
        assert_eq!(unstable_evaluate(&bad, 10, c), Err(Error::NotAdmissible));
    }

    #[test]
    fn cartan_examples() {
        assert_eq!(cartan_expand(P(0)).unwrap(), vec![(P(0), P(0))]);
        assert_eq!(cartan_expand(P(1)).unwrap(), vec![(P(0), P(1)), (P(1), P(0))]);
        assert_eq!(
            cartan_expand(Sq(2)).unwrap(),
            vec![(Sq(0), Sq(2)), (Sq(1), Sq(1)), (Sq(2), Sq(0))]
        );
        assert!(cartan_expand(Beta).is_err());
    }

    #[test]
    fn moment_decreases_under_every_move() {
        for ell in [2u32, 3, 5] {
            let c = ctx(ell);
            for a in 0..12u32 {
                for b in 1..6u32 {
                    let pairs: Vec<Word> = if ell == 2 {
                        vec![word(&[Sq(a.max(1)), Sq(b)])]
                    } else {
                        vec![word(&[P(a), P(b)]), word(&[P(a), Beta, P(b)])]
                    };
                    for w in pairs {
                        for r in find_redexes(&w, c) {
                            for (nw, _) in rewrite(&w, r, c) {
                                let dropped = moment(&nw) < moment(&w);
                                let beta_left = moment(&nw) == moment(&w)
                                    && nw.letters().first() == Some(&Beta);
                                assert!(dropped || beta_left, "{w} -> {nw}");
                                assert_eq!(nw.degree(c), w.degree(c));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_matches_filtered_brute_force() {
        // Brute force over all words of bounded shape, filtered by is_admissible.
        for ell in [2u32, 3] {
            let c = ctx(ell);
            let max_deg = if ell == 2 { 12 } else { 26 };
            let listed = admissible_sequences(c, max_deg, None);
            for seq in &listed {
                assert!(is_admissible(seq, c));
                assert!(seq.to_word(c).degree(c) <= max_deg);
            }
            let mut brute = 0usize;
            let mut frontier = vec![Word::identity()];
            while let Some(w) = frontier.pop() {
                if let Ok(seq) = AdmissibleSeq::from_word(&w, c) {
                    if is_admissible(&seq, c) {
                        brute += 1;
                    }
                }
                let candidates: Vec<Letter> = if ell == 2 {
                    (1..=max_deg as u32).map(Sq).collect()
                } else {
                    let mut v = vec![Beta];
                    v.extend((1..=max_deg as u32 / 4).map(P));
                    v
                };
                for l in candidates {
                    let nw = w.then(&Word(vec![l]));
                    if nw.degree(c) <= max_deg && !nw.has_double_beta() {
                        frontier.push(nw);
                    }
                }
            }
            assert_eq!(listed.len(), brute, "ell={ell}");
        }
    }

    #[test]
    fn excess_pruning_is_exact() {
        let c = ctx(3);
        let all = admissible_sequences(c, 60, None);
        let pruned = admissible_sequences(c, 60, Some(3));
        let filtered: Vec<_> = all.into_iter().filter(|s| excess(s, c) <= 3).collect();
        assert_eq!(pruned, filtered);
    }

    #[test]
    fn printing() {
        let c = ctx(3);
        let mut p = OpPoly::zero(c, Mode::Classical);
        assert_eq!(p.to_string(), "0");
        p.add_term(Word::identity(), c.fp(2));
        p.add_term(word(&[Beta]), c.one());
        assert_eq!(p.to_string(), "2 + beta");
    }
}
