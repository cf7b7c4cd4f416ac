//! Enumerators for the rings of étale and motivic operations.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::arith::PrimeContext;
use crate::error::{Error, Result};
use crate::motivic::{word_bidegree, Bidegree, CoefficientModel};
use crate::steenrod::{beta_form_sequences, excess_beta_form, AdmissibleSeq, Letter, Word};
use crate::unstable::{cartan_generators, monomial_basis, GeneratorDescriptor, Label, PoincareTable, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    EtaleH1,
    EtaleHn,
    MotivicW1,
    MotivicW0,
    MotivicDeg1Zeta,
    MotivicDeg1Descent,
    ConjectureGen,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpKind::EtaleH1 => "etale_H1",
            OpKind::EtaleHn => "etale_Hn",
            OpKind::MotivicW1 => "motivic_w1",
            OpKind::MotivicW0 => "motivic_w0",
            OpKind::MotivicDeg1Zeta => "motivic_deg1_zeta",
            OpKind::MotivicDeg1Descent => "motivic_deg1_descent",
            OpKind::ConjectureGen => "conjecture_gen",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DescriptorData {
    /// x ↦ c · x^ε · β(x)^m, possibly after γ or descent twisting by ζ^b.
    Coefficient { c: String, c_bidegree: Bidegree, eps: u32, m: u32, b: Option<i64> },
    /// P^I P_V^J in (ε, s) form, split into the P-part and the P_V-part.
    Sequences { i_seq: Vec<u32>, j_seq: Vec<u32>, word: Word },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperationDescriptor {
    pub kind: OpKind,
    pub label: String,
    pub source: Bidegree,
    pub target: Bidegree,
    pub data: DescriptorData,
}

impl OperationDescriptor {
    /// Builds a coefficient-type descriptor, computing its target from the
    /// formula attached to `kind`.
    fn coefficient(
        kind: OpKind,
        source: Bidegree,
        c: (&str, Bidegree),
        eps: u32,
        m: u32,
        d: i64,
    ) -> Result<Self> {
        let i = source.weight;
        let b = match kind {
            OpKind::MotivicDeg1Descent => Some((i - 1) * i64::from(eps + m)),
            _ => None,
        };
        let data = DescriptorData::Coefficient { c: c.0.into(), c_bidegree: c.1, eps, m, b };
        let target = coefficient_target(kind, source, &data, d)?;
        let label = coefficient_label(kind, c.0, eps, m, b);
        Ok(Self { kind, label, source, target, data })
    }

    /// Recomputes the target from kind, source and data.
    pub fn expected_target(&self, ctx: PrimeContext) -> Result<Bidegree> {
        match &self.data {
            DescriptorData::Coefficient { .. } => {
                coefficient_target(self.kind, self.source, &self.data, i64::from(ctx.d()))
            }
            DescriptorData::Sequences { word, .. } => Ok(word_bidegree(word, self.source, ctx)),
        }
    }
}

fn coefficient_target(kind: OpKind, source: Bidegree, data: &DescriptorData, d: i64) -> Result<Bidegree> {
    let DescriptorData::Coefficient { c_bidegree: cb, eps, m, b, .. } = data else {
        return Err(Error::Precondition("not a coefficient descriptor".into()));
    };
    let (s, t) = (cb.deg, cb.weight);
    let (e, m) = (i64::from(*eps), i64::from(*m));
    let i = source.weight;
    Ok(match kind {
        OpKind::EtaleH1 => Bidegree::new(s + e + 2 * m, (t + i * (e + m)).rem_euclid(d)),
        OpKind::MotivicDeg1Zeta => source + zeta_shift(*cb, *eps, m as u32, i),
        OpKind::MotivicDeg1Descent => {
            let b = b.ok_or_else(|| Error::Precondition("descent descriptor without b".into()))?;
            Bidegree::new(s + e + 2 * m, t + b + e + m)
        }
        _ => return Err(Error::Precondition("kind has no coefficient formula".into())),
    })
}

/// Bidegree shift of x ↦ c(γx)^ε β(γx)^m on H^{1,i}, with c in (s, j).
pub fn zeta_shift(c: Bidegree, eps: u32, m: u32, i: i64) -> Bidegree {
    let (e, m) = (i64::from(eps), i64::from(m));
    Bidegree::new(c.deg + e + 2 * m - 1, c.weight + e + m - i)
}

/// Bidegree of γ on H^{1,i}.
pub fn gamma_shift(i: i64) -> Bidegree {
    Bidegree::new(0, 1 - i)
}

fn coefficient_label(kind: OpKind, c: &str, eps: u32, m: u32, b: Option<i64>) -> String {
    let x = match kind {
        OpKind::MotivicDeg1Zeta => "gamma(x)",
        OpKind::MotivicDeg1Descent => "y",
        _ => "x",
    };
    let mut parts: Vec<String> = Vec::new();
    if let Some(b) = b.filter(|b| *b != 0) {
        parts.push(if b == 1 { "zeta".into() } else { format!("zeta^{b}") });
    }
    if c != "1" || parts.is_empty() && eps + m == 0 {
        parts.push(c.into());
    }
    if eps == 1 {
        parts.push(x.into());
    }
    match m {
        0 => {}
        1 => parts.push(format!("beta({x})")),
        _ => parts.push(format!("beta({x})^{m}")),
    }
    parts.join(" ")
}

fn sort_descriptors(v: &mut [OperationDescriptor]) {
    v.sort_by(|a, b| (a.target, &a.label, &a.data).cmp(&(b.target, &b.label, &b.data)));
}

/// Operations on H^1_et(−, μ^{⊗i}): x ↦ c x^ε β(x)^m with ε + m ≥ 1.
pub fn etale_ops_h1(i: i64, model: &CoefficientModel, max_deg: i64) -> Result<Vec<OperationDescriptor>> {
    let d = i64::from(model.ctx().d());
    let source = Bidegree::new(1, i.rem_euclid(d));
    let mut out = Vec::new();
    for (c, cb) in model.etale_basis(max_deg)? {
        for eps in 0..=1u32 {
            let mut m = 0u32;
            while cb.deg + i64::from(eps) + 2 * i64::from(m) <= max_deg {
                if eps + m > 0 {
                    out.push(OperationDescriptor::coefficient(OpKind::EtaleH1, source, (&c, cb), eps, m, d)?);
                }
                m += 1;
            }
        }
    }
    sort_descriptors(&mut out);
    Ok(out)
}

/// Counts descriptors per target bidegree.
pub fn descriptor_table(ops: &[OperationDescriptor], window: Window) -> PoincareTable {
    let mut entries = alloc::collections::BTreeMap::new();
    for op in ops {
        *entries.entry(op.target).or_insert(0) += 1;
    }
    PoincareTable { window, entries }
}

/// Operations on H^n_et(−, μ^{⊗i}): the model's étale cohomology tensored
/// with the reduced cohomology of K_n, twists read modulo d.
pub fn etale_ops_hn(
    n: i64,
    i: i64,
    model: &CoefficientModel,
    max_deg: i64,
) -> Result<(Vec<GeneratorDescriptor>, PoincareTable)> {
    let ctx = model.ctx();
    let d = i64::from(ctx.d());
    let mut gens = cartan_generators(n, ctx, max_deg, i)?;
    for g in &mut gens {
        g.bidegree.weight = g.bidegree.weight.rem_euclid(d);
    }
    let window = Window::new(max_deg, None);
    let top = monomial_basis(&gens, ctx, window)?.weights_mod(d).reduced();
    let table = top.tensor(&model.etale_table(max_deg)?).weights_mod(d);
    Ok((gens, table))
}

/// Operations on H^{n,1} (or H^{n,0} with `weight0`): H^{*,*}(k) tensored
/// with H*(K_n), where P^I carries weight ℓ^k.
pub fn motivic_ops_weight1(
    n: i64,
    model: &CoefficientModel,
    window: Window,
    weight0: bool,
) -> Result<(Vec<GeneratorDescriptor>, PoincareTable)> {
    let ctx = model.ctx();
    let w = if weight0 { 0 } else { 1 };
    if n == 1 {
        // u^ε v^m with u exterior, also at ℓ = 2 where u² rewrites through
        // [−1]u and [ζ]v over the coefficients.
        let u = GeneratorDescriptor::new(Label::iota(1), Bidegree::new(1, w), ctx);
        let v = GeneratorDescriptor::new(
            Label { negative: false, word: Word(alloc::vec![Letter::Beta]), level: 1 },
            Bidegree::new(2, w),
            ctx,
        );
        let table = monomial_basis(core::slice::from_ref(&v), ctx, window)?
            .tensor(&single(u.bidegree, window))
            .tensor(&model.motivic_table(window)?);
        return Ok((alloc::vec![u, v], table));
    }
    let gens = cartan_generators(n, ctx, window.max_deg, w)?;
    let table = monomial_basis(&gens, ctx, window)?.tensor(&model.motivic_table(window)?);
    Ok((gens, table))
}

fn single(b: Bidegree, window: Window) -> PoincareTable {
    let mut t = PoincareTable::unit(window);
    if window.contains(b) {
        t.entries.insert(b, 1);
    }
    t
}

/// Degree-1 operations on H^{1,i} when ζ ∈ k: x ↦ c (γx)^ε β(γx)^m.
pub fn motivic_ops_deg1_zeta(i: i64, model: &CoefficientModel, window: Window) -> Result<Vec<OperationDescriptor>> {
    if model.ctx().d() != 1 {
        return Err(Error::NeedsZeta);
    }
    let source = Bidegree::new(1, i);
    let mut out = Vec::new();
    for (mono, cb) in model.motivic_basis(window)? {
        let c = model.render_mono(&mono);
        for eps in 0..=1u32 {
            let mut m = 0u32;
            loop {
                let op = OperationDescriptor::coefficient(OpKind::MotivicDeg1Zeta, source, (&c, cb), eps, m, 1)?;
                if op.target.deg > window.max_deg {
                    break;
                }
                if eps + m > 0 && window.contains(op.target) {
                    out.push(op);
                }
                m += 1;
            }
        }
    }
    sort_descriptors(&mut out);
    Ok(out)
}

/// Degree-1 operations on H^{1,i} by Galois descent: c ∈ H^s_et(k, μ^{⊗t})
/// with 0 ≤ s ≤ t + b, b = (i−1)(ε+m), landing in H^{s+ε+2m, t+b+ε+m}.
pub fn motivic_ops_deg1_descent(
    i: i64,
    model: &CoefficientModel,
    window: Window,
) -> Result<Vec<OperationDescriptor>> {
    let d = i64::from(model.ctx().d());
    let max_wt = window
        .max_wt
        .ok_or_else(|| Error::Precondition("descent enumeration needs a weight cap".into()))?;
    let source = Bidegree::new(1, i);
    let mut out = Vec::new();
    for (c, cb) in model.etale_basis(window.max_deg)? {
        for eps in 0..=1u32 {
            let mut m = 0u32;
            while cb.deg + i64::from(eps) + 2 * i64::from(m) <= window.max_deg {
                if eps + m == 0 {
                    m += 1;
                    continue;
                }
                let b = (i - 1) * i64::from(eps + m);
                let lowest = cb.deg - b;
                let mut t = lowest + (cb.weight - lowest).rem_euclid(d);
                while t + b + i64::from(eps + m) <= max_wt {
                    let twisted = Bidegree::new(cb.deg, t);
                    let op = OperationDescriptor::coefficient(
                        OpKind::MotivicDeg1Descent,
                        source,
                        (&c, twisted),
                        eps,
                        m,
                        d,
                    )?;
                    if window.contains(op.target) {
                        out.push(op);
                    }
                    t += d;
                }
                m += 1;
            }
        }
    }
    sort_descriptors(&mut out);
    Ok(out)
}

/// Options of the conjectural enumerator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ConjectureOptions {
    /// Excess bound T; defaults to the source degree n.
    pub excess_threshold: Option<i64>,
    /// Use s_j < i + (ℓ−1)∑ instead of ≤.
    pub strict_b: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureOutput {
    pub generators: Vec<OperationDescriptor>,
    /// Candidates removed because no operation leaves H^{2i,i} for them.
    pub excluded: Vec<OperationDescriptor>,
}

/// Candidate generators P^I P_V^J on H^{n,i}, n ≥ 2i.
pub fn conjecture_generators(
    n: i64,
    i: i64,
    ctx: PrimeContext,
    window: Window,
    opts: ConjectureOptions,
) -> Result<ConjectureOutput> {
    if n < 2 * i {
        return Err(Error::ConjectureZone { n, i });
    }
    let threshold = opts.excess_threshold.unwrap_or(n);
    if threshold < 1 {
        return Err(Error::Precondition("excess threshold must be >= 1".into()));
    }
    let l = ctx.ell_i64();
    let source = Bidegree::new(n, i);
    let mut generators = Vec::new();
    let mut excluded = Vec::new();
    for seq in beta_form_sequences(l, window.max_deg - n, Some(threshold)) {
        let e = excess_beta_form(&seq, l);
        if !(e < threshold || (seq.eps()[0] && e == threshold)) {
            continue;
        }
        let s = seq.s();
        let k = s.len();
        for split in 0..=k {
            let ok = (split..k).all(|j| {
                let tail: i64 = s[j + 1..].iter().map(|v| i64::from(*v)).sum();
                let bound = i + (l - 1) * tail;
                let sj = i64::from(s[j]);
                if opts.strict_b {
                    sj < bound
                } else {
                    sj <= bound
                }
            });
            if !ok {
                continue;
            }
            let op = conjecture_descriptor(&seq, split, source, ctx);
            if !window.contains(op.target) {
                continue;
            }
            let blocked = n == 2 * i
                && (op.target.weight < i
                    || (op.target.weight == i && op.target != Bidegree::new(2 * i, i)));
            if blocked {
                excluded.push(op);
            } else {
                generators.push(op);
            }
        }
    }
    sort_descriptors(&mut generators);
    sort_descriptors(&mut excluded);
    Ok(ConjectureOutput { generators, excluded })
}

fn conjecture_descriptor(seq: &AdmissibleSeq, split: usize, source: Bidegree, ctx: PrimeContext) -> OperationDescriptor {
    let (eps, s) = (seq.eps(), seq.s());
    let mut letters = Vec::new();
    if eps[0] {
        letters.push(Letter::Beta);
    }
    for (j, sj) in s.iter().enumerate() {
        letters.push(if j < split { Letter::P(*sj) } else { Letter::PV(*sj) });
        if eps[j + 1] {
            letters.push(Letter::Beta);
        }
    }
    let word = Word(letters);
    let mut i_seq = alloc::vec![u32::from(eps[0])];
    let mut j_seq = Vec::new();
    for (j, sj) in s.iter().enumerate() {
        let dest = if j < split { &mut i_seq } else { &mut j_seq };
        dest.push(*sj);
        dest.push(u32::from(eps[j + 1]));
    }
    let label = if ctx.is_odd() { word.to_string() } else { render_square_form(seq, split) };
    let target = word_bidegree(&word, source, ctx);
    OperationDescriptor {
        kind: OpKind::ConjectureGen,
        label,
        source,
        target,
        data: DescriptorData::Sequences { i_seq, j_seq, word },
    }
}

/// ℓ = 2 spelling: β^{ε_{j−1}}P^{s_j} becomes Sq^{2s_j+ε_{j−1}} and a
/// trailing β becomes Sq^1 (Sq_V^1 after P_V letters).
pub fn render_square_form(seq: &AdmissibleSeq, split: usize) -> String {
    let (eps, s) = (seq.eps(), seq.s());
    let mut parts: Vec<String> = Vec::new();
    for (j, sj) in s.iter().enumerate() {
        let n = 2 * sj + u32::from(eps[j]);
        parts.push(if j < split { format!("Sq{n}") } else { format!("SqV{n}") });
    }
    if eps[s.len()] {
        parts.push(if split < s.len() { "SqV1".into() } else { "Sq1".into() });
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}
