//! Exact mod-ℓ arithmetic shared by every other module.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// The prime ℓ together with d = [k(ζ):k], the period of the twist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeContext {
    ell: u32,
    d: u32,
}

impl PrimeContext {
    /// Checks that ℓ is prime and d divides ℓ − 1 (d = 1 when ℓ = 2).
    pub fn new(ell: u32, d: u32) -> Result<Self> {
        if !is_prime(ell) || d == 0 || (ell - 1) % d != 0 {
            return Err(Error::InvalidPrime { ell, d });
        }
        Ok(Self { ell, d })
    }

    /// Context with ζ ∈ k.
    pub fn with_zeta(ell: u32) -> Result<Self> {
        Self::new(ell, 1)
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn is_odd(&self) -> bool {
        self.ell != 2
    }

    pub fn ell_i64(&self) -> i64 {
        i64::from(self.ell)
    }

    /// Reduces an arbitrary integer into F_ℓ.
    pub fn fp(&self, n: i64) -> Flp {
        Flp::new(n, self.ell)
    }

    pub fn one(&self) -> Flp {
        Flp::new(1, self.ell)
    }

    pub fn zero(&self) -> Flp {
        Flp::new(0, self.ell)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u32;
    while k.saturating_mul(k) <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// An element of F_ℓ, always stored reduced.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flp {
    value: u32,
    ell: u32,
}

impl Flp {
    pub fn new(n: i64, ell: u32) -> Self {
        let m = i64::from(ell);
        Self { value: n.rem_euclid(m) as u32, ell }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn ell(self) -> u32 {
        self.ell
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let p = u64::from(self.ell);
        let mut base = u64::from(self.value);
        let mut acc = 1 % p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        Self { value: acc as u32, ell: self.ell }
    }

    /// Inverse via Fermat, x^{ℓ−2}. Returns `None` for zero.
    pub fn inv(self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.pow(u64::from(self.ell) - 2))
        }
    }

    /// Signed representative in (−ℓ/2, ℓ/2], handy for printing signs.
    pub fn signed(self) -> i64 {
        let v = i64::from(self.value);
        let p = i64::from(self.ell);
        if 2 * v > p {
            v - p
        } else {
            v
        }
    }
}

impl fmt::Debug for Flp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.ell)
    }
}

impl fmt::Display for Flp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Flp {
    type Output = Flp;
    fn add(self, rhs: Flp) -> Flp {
        debug_assert_eq!(self.ell, rhs.ell);
        Flp { value: (self.value + rhs.value) % self.ell, ell: self.ell }
    }
}

impl AddAssign for Flp {
    fn add_assign(&mut self, rhs: Flp) {
        *self = *self + rhs;
    }
}

impl Sub for Flp {
    type Output = Flp;
    fn sub(self, rhs: Flp) -> Flp {
        self + (-rhs)
    }
}

impl Neg for Flp {
    type Output = Flp;
    fn neg(self) -> Flp {
        Flp { value: (self.ell - self.value) % self.ell, ell: self.ell }
    }
}

impl Mul for Flp {
    type Output = Flp;
    fn mul(self, rhs: Flp) -> Flp {
        debug_assert_eq!(self.ell, rhs.ell);
        let v = u64::from(self.value) * u64::from(rhs.value) % u64::from(self.ell);
        Flp { value: v as u32, ell: self.ell }
    }
}

/// (−1)^k as an element of F_ℓ.
pub fn sign(k: i64, ctx: PrimeContext) -> Flp {
    if k.rem_euclid(2) == 0 {
        ctx.one()
    } else {
        -ctx.one()
    }
}

/// C(n, k) mod ℓ, zero whenever k < 0, n < 0 or n < k.
///
/// Evaluated digit by digit in base ℓ (Lucas).
pub fn binom(n: i64, k: i64, ctx: PrimeContext) -> Flp {
    if k < 0 || n < 0 || n < k {
        return ctx.zero();
    }
    let p = ctx.ell_i64();
    let (mut n, mut k) = (n, k);
    let mut acc = ctx.one();
    while k > 0 || n > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return ctx.zero();
        }
        acc = acc * small_binom(nd, kd, ctx);
        n /= p;
        k /= p;
    }
    acc
}

// 0 <= k <= n < ℓ, so the factorials are units mod ℓ.
fn small_binom(n: i64, k: i64, ctx: PrimeContext) -> Flp {
    let mut num = ctx.one();
    let mut den = ctx.one();
    for j in 0..k {
        num = num * ctx.fp(n - j);
        den = den * ctx.fp(j + 1);
    }
    num * den.inv().expect("k! is a unit below ell")
}

/// m! mod ℓ.
pub fn factorial(m: u64, ctx: PrimeContext) -> Flp {
    (1..=m).fold(ctx.one(), |acc, j| acc * ctx.fp(j as i64))
}

/// The normalising constant ν_n = (−1)^r (m!)^{−n} with m = (ℓ−1)/2 and
/// r = (ℓ−1)(n²+n)/4.
pub fn nu(n: i64, ctx: PrimeContext) -> Result<Flp> {
    if !ctx.is_odd() {
        return Err(Error::OddPrimeRequired("nu_n"));
    }
    let m = (ctx.ell_i64() - 1) / 2;
    // (ℓ−1) and n²+n are both even, so the product is divisible by 4.
    let r = (ctx.ell_i64() - 1) * (n * n + n) / 4;
    let mfact = factorial(m as u64, ctx);
    let base = if n >= 0 { mfact.inv().expect("m! is a unit") } else { mfact };
    Ok(sign(r, ctx) * base.pow(n.unsigned_abs()))
}

/// Which companion operation a D_k index belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerKind {
    P,
    Q,
}

/// Index k with P^a u = ±ν_n D_k(u) (or Q^a).
pub fn d_index(n: i64, a: i64, kind: PowerKind, ctx: PrimeContext) -> Result<i64> {
    if !ctx.is_odd() {
        return Err(Error::OddPrimeRequired("d_index"));
    }
    let base = (n - 2 * a) * (ctx.ell_i64() - 1);
    Ok(match kind {
        PowerKind::P => base,
        PowerKind::Q => base - 1,
    })
}

/// Inverse of [`d_index`]: the a with d_index(n, a, kind) = k, if any.
pub fn d_to_a(n: i64, k: i64, kind: PowerKind, ctx: PrimeContext) -> Option<i64> {
    if !ctx.is_odd() {
        return None;
    }
    let q = ctx.ell_i64() - 1;
    let shifted = match kind {
        PowerKind::P => k,
        PowerKind::Q => k + 1,
    };
    if shifted.rem_euclid(q) != 0 {
        return None;
    }
    let diff = n - shifted / q;
    if diff.rem_euclid(2) != 0 {
        return None;
    }
    Some(diff / 2)
}

/// Parity of the source degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: i64) -> Self {
        if n.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// True iff D_s(u) vanishes for u of the given degree parity: no m ≥ 0 of
/// that parity has s = m(ℓ−1) or s = m(ℓ−1) − 1.
pub fn d_vanishes(parity: Parity, s: i64, ctx: PrimeContext) -> bool {
    let q = ctx.ell_i64() - 1;
    let fits = |m: i64| m >= 0 && Parity::of(m) == parity;
    let exact = s.rem_euclid(q) == 0 && fits(s.div_euclid(q));
    let shifted = (s + 1).rem_euclid(q) == 0 && fits((s + 1).div_euclid(q));
    !(exact || shifted)
}

/// The sign relating the two D-conventions, D^M_k = (−1)^k D_k.
pub fn may_sign(k: i64, ctx: PrimeContext) -> Flp {
    sign(k, ctx)
}

/// Rank of a matrix over F_ℓ (rows are consumed).
pub fn rank_mod(mut rows: Vec<Vec<u32>>, ctx: PrimeContext) -> usize {
    let p = u64::from(ctx.ell());
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].get(col).is_some_and(|&v| v != 0))
        else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = ctx.fp(i64::from(rows[rank][col])).inv().expect("pivot is nonzero").value();
        for v in rows[rank].iter_mut() {
            *v = (u64::from(*v) * u64::from(inv) % p) as u32;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank {
                continue;
            }
            let f = row.get(col).copied().unwrap_or(0);
            if f == 0 {
                continue;
            }
            row.resize(cols, 0);
            for (c, pv) in pivot_row.iter().enumerate() {
                let sub = u64::from(f) * u64::from(*pv) % p;
                row[c] = ((u64::from(row[c]) + p - sub) % p) as u32;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(ell: u32) -> PrimeContext {
        PrimeContext::new(ell, 1).unwrap()
    }

    fn factorial_binom(n: u64, k: u64) -> u128 {
        let mut acc: u128 = 1;
        for j in 0..k {
            acc = acc * u128::from(n - j) / u128::from(j + 1);
        }
        acc
    }

    #[test]
    fn rejects_bad_contexts() {
        assert!(PrimeContext::new(4, 1).is_err());
        assert!(PrimeContext::new(7, 4).is_err());
        assert!(PrimeContext::new(7, 3).is_ok());
        assert!(PrimeContext::new(2, 1).is_ok());
        assert!(PrimeContext::new(2, 2).is_err());
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(0, -1, ctx(3)).value(), 0);
        assert_eq!(binom(7, 3, ctx(2)).value(), 1);
        assert_eq!(binom(10, 4, ctx(3)).value(), 0);
        assert_eq!(binom(-1, 0, ctx(3)).value(), 0);
        assert_eq!(binom(-3, 2, ctx(5)).value(), 0);
    }

    #[test]
    fn lucas_matches_factorials() {
        for ell in [2u32, 3, 5, 7] {
            for n in 0..=60u64 {
                for k in 0..=n {
                    let want = (factorial_binom(n, k) % u128::from(ell)) as u32;
                    assert_eq!(binom(n as i64, k as i64, ctx(ell)).value(), want, "C({n},{k}) mod {ell}");
                }
            }
        }
    }

    #[test]
    fn nu_examples() {
        assert_eq!(nu(2, ctx(3)).unwrap().value(), 2);
        assert_eq!(nu(0, ctx(5)).unwrap().value(), 1);
        assert!(nu(2, ctx(2)).is_err());
        for ell in [3u32, 5, 7, 11] {
            for a in 0..20 {
                assert_eq!(nu(2 * a, ctx(ell)).unwrap(), sign(a, ctx(ell)));
            }
        }
    }

    #[test]
    fn nu_negative_degree() {
        // ν_{-1}: r = 0 and (m!)^{+1}.
        let c = ctx(7);
        assert_eq!(nu(-1, c).unwrap(), factorial(3, c));
    }

    #[test]
    fn d_index_examples() {
        assert_eq!(d_index(4, 1, PowerKind::P, ctx(3)).unwrap(), 4);
        assert_eq!(d_index(4, 2, PowerKind::P, ctx(7)).unwrap(), 0);
        assert_eq!(d_index(3, 1, PowerKind::Q, ctx(5)).unwrap(), 3);
        assert_eq!(d_to_a(4, 4, PowerKind::P, ctx(3)), Some(1));
        assert_eq!(d_to_a(3, 3, PowerKind::Q, ctx(5)), Some(1));
        assert_eq!(d_to_a(4, 3, PowerKind::P, ctx(3)), None);
    }

    #[test]
    fn d_vanishing_examples() {
        assert!(d_vanishes(Parity::Even, 1, ctx(3)));
        assert!(!d_vanishes(Parity::Even, 4, ctx(3)));
        assert!(d_vanishes(Parity::Odd, 0, ctx(5)));
        assert!(!d_vanishes(Parity::Odd, 3, ctx(5)));
    }

    #[test]
    fn may_sign_examples() {
        assert_eq!(may_sign(0, ctx(3)).value(), 1);
        assert_eq!(may_sign(3, ctx(3)).value(), 2);
        assert_eq!(may_sign(4, ctx(5)).value(), 1);
    }

    #[test]
    fn rank_examples() {
        let c = ctx(3);
        assert_eq!(rank_mod(vec![vec![1, 2], vec![2, 1]], c), 1);
        assert_eq!(rank_mod(vec![vec![1, 0], vec![0, 1], vec![1, 1]], c), 2);
        assert_eq!(rank_mod(vec![], c), 0);
    }

    use proptest::prelude::*;
    use std::vec;

    proptest! {
        #[test]
        fn d_index_roundtrip(n in -20i64..40, a in -10i64..20, q in any::<bool>()) {
            let kind = if q { PowerKind::Q } else { PowerKind::P };
            for ell in [3u32, 5, 7] {
                let k = d_index(n, a, kind, ctx(ell)).unwrap();
                prop_assert_eq!(d_to_a(n, k, kind, ctx(ell)), Some(a));
            }
        }

        #[test]
        fn field_axioms(x in -100i64..100, y in -100i64..100) {
            let c = ctx(7);
            let (a, b) = (c.fp(x), c.fp(y));
            prop_assert_eq!(a + b, c.fp(x + y));
            prop_assert_eq!(a * b, c.fp(x * y));
            if !a.is_zero() {
                prop_assert_eq!(a * a.inv().unwrap(), c.one());
            }
        }
    }
}
