//! Expression grammar.
//!
//! ```text
//! poly   := ["-"] term (("+" | "-") term)*
//! term   := int? factor*          (at least one of the two)
//! factor := "beta" | "P"int | "Sq"int | "PV"int | "SqV"int | "Q"int | symbol ("^" int)?
//! ```
//!
//! Factors compose left to right as written: `P1 beta` is P¹∘β.

use steenrod_core::motivic::{q_word, Item, RawCombination, Setting};
use steenrod_core::{CoefficientModel, Flp, Letter, Mode, OpPoly, PrimeContext, Word};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    Letter(Letter),
    Q(u32),
    Symbol(String, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: i64,
    pub factors: Vec<Factor>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Caret,
    Plus,
    Minus,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, CliError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (pos, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c == '+' || c == '-' || c == '^' {
            out.push((pos, if c == '+' { Tok::Plus } else if c == '-' { Tok::Minus } else { Tok::Caret }));
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].1.is_ascii_digit() {
                k += 1;
            }
            let s: String = chars[start..k].iter().map(|p| p.1).collect();
            let v = s.parse().map_err(|_| syntax(pos, "integer too large"))?;
            out.push((pos, Tok::Int(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].1.is_ascii_alphanumeric() || chars[k].1 == '_') {
                k += 1;
            }
            out.push((pos, Tok::Ident(chars[start..k].iter().map(|p| p.1).collect())));
        } else {
            return Err(syntax(pos, &format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

fn syntax(pos: usize, msg: &str) -> CliError {
    CliError::Syntax { pos: pos + 1, msg: msg.into() }
}

fn indexed(ident: &str, prefix: &str) -> Option<u32> {
    let rest = ident.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

fn factor_of(ident: &str) -> Factor {
    if ident == "beta" {
        return Factor::Letter(Letter::Beta);
    }
    if let Some(a) = indexed(ident, "SqV") {
        return Factor::Letter(Letter::SqV(a));
    }
    if let Some(a) = indexed(ident, "Sq") {
        return Factor::Letter(Letter::Sq(a));
    }
    if let Some(a) = indexed(ident, "PV") {
        return Factor::Letter(Letter::PV(a));
    }
    if let Some(a) = indexed(ident, "P") {
        return Factor::Letter(Letter::P(a));
    }
    if let Some(a) = indexed(ident, "Q") {
        return Factor::Q(a);
    }
    Factor::Symbol(ident.into(), 1)
}

pub fn parse(text: &str) -> Result<Vec<Term>, CliError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(syntax(0, "empty expression"));
    }
    let mut terms = Vec::new();
    let mut k = 0;
    let mut sign = 1i64;
    if let Some((_, Tok::Minus)) = toks.first() {
        sign = -1;
        k = 1;
    }
    loop {
        let start = toks.get(k).map_or(text.len(), |t| t.0);
        let mut coeff = None;
        let mut factors = Vec::new();
        if let Some((_, Tok::Int(v))) = toks.get(k) {
            coeff = Some(*v);
            k += 1;
        }
        while let Some((pos, tok)) = toks.get(k) {
            match tok {
                Tok::Ident(id) => {
                    let mut f = factor_of(id);
                    k += 1;
                    if let Some((cpos, Tok::Caret)) = toks.get(k) {
                        let Factor::Symbol(_, e) = &mut f else {
                            return Err(syntax(*cpos, "exponent on an operation letter"));
                        };
                        match toks.get(k + 1) {
                            Some((_, Tok::Int(v))) if *v >= 0 && *v <= i64::from(u32::MAX) => *e = *v as u32,
                            _ => return Err(syntax(*cpos, "expected a nonnegative integer after '^'")),
                        }
                        k += 2;
                    }
                    factors.push(f);
                }
                Tok::Plus | Tok::Minus => break,
                Tok::Int(_) => return Err(syntax(*pos, "coefficient must start the term")),
                Tok::Caret => return Err(syntax(*pos, "unexpected '^'")),
            }
        }
        if coeff.is_none() && factors.is_empty() {
            return Err(syntax(start, "expected a term"));
        }
        terms.push(Term { coeff: sign * coeff.unwrap_or(1), factors });
        match toks.get(k) {
            None => break,
            Some((_, Tok::Plus)) => sign = 1,
            Some((_, Tok::Minus)) => sign = -1,
            Some((pos, _)) => return Err(syntax(*pos, "expected '+' or '-'")),
        }
        k += 1;
    }
    Ok(terms)
}

/// Operation polynomial; coefficient symbols and Q letters are rejected.
pub fn to_op_poly(terms: &[Term], ctx: PrimeContext, mode: Mode) -> Result<OpPoly, CliError> {
    let mut p = OpPoly::zero(ctx, mode);
    for t in terms {
        let mut letters = Vec::new();
        for f in &t.factors {
            match f {
                Factor::Letter(l) => letters.push(*l),
                Factor::Q(a) => return Err(CliError::Usage(format!("Q{a} is not a plain letter"))),
                Factor::Symbol(s, _) => return Err(CliError::Domain(format!("unknown symbol {s}"))),
            }
        }
        p.add_term(Word(letters), ctx.fp(t.coeff));
    }
    Ok(p)
}

/// Input for the motivic normalizer: Q letters expanded, symbols resolved
/// against the model.
pub fn to_items(
    terms: &[Term],
    model: &CoefficientModel,
    setting: Setting,
) -> Result<Vec<(Flp, Vec<Item>)>, CliError> {
    let ctx = model.ctx();
    let mut out = Vec::new();
    for t in terms {
        let mut items = Vec::new();
        for f in &t.factors {
            match f {
                Factor::Letter(l) => items.push(Item::Op(*l)),
                Factor::Q(a) => items.extend(q_word(*a, setting, ctx)?.into_iter().map(Item::Op)),
                Factor::Symbol(s, e) => items.push(Item::Coef(model.symbol_mono(s, *e)?)),
            }
        }
        out.push((ctx.fp(t.coeff), items));
    }
    Ok(out)
}

/// Coefficient combination such as `2 x^3 + y`; `0` is the empty sum.
pub fn to_combination(text: &str) -> Result<RawCombination, CliError> {
    let mut out = Vec::new();
    for t in parse(text)? {
        let mut mono = Vec::new();
        for f in t.factors {
            match f {
                Factor::Symbol(s, e) => mono.push((s, e)),
                other => {
                    return Err(CliError::Usage(format!("operation letter {other:?} inside a coefficient")))
                }
            }
        }
        if t.coeff != 0 {
            out.push((t.coeff, mono));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_words() {
        let t = parse("P3 P1 beta").unwrap();
        assert_eq!(
            t,
            vec![Term {
                coeff: 1,
                factors: vec![
                    Factor::Letter(Letter::P(3)),
                    Factor::Letter(Letter::P(1)),
                    Factor::Letter(Letter::Beta)
                ]
            }]
        );
        let t = parse("2 x^3 - y + 4").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0].factors, vec![Factor::Symbol("x".into(), 3)]);
        assert_eq!(t[1].coeff, -1);
        assert!(t[2].factors.is_empty());
    }

    #[test]
    fn reports_positions() {
        let e = parse("P1 + + P2").unwrap_err();
        assert_eq!(e.to_string(), "syntax error at column 6: expected a term");
        assert!(parse("P1^2").is_err());
        assert!(parse("P1 2").is_err());
        assert!(parse("P1 % P2").unwrap_err().to_string().contains("column 4"));
    }

    #[test]
    fn classifies_letters() {
        assert_eq!(factor_of("SqV3"), Factor::Letter(Letter::SqV(3)));
        assert_eq!(factor_of("PV0"), Factor::Letter(Letter::PV(0)));
        assert_eq!(factor_of("Q1"), Factor::Q(1));
        assert_eq!(factor_of("Pic"), Factor::Symbol("Pic".into(), 1));
        assert_eq!(factor_of("zeta"), Factor::Symbol("zeta".into(), 1));
    }
}
