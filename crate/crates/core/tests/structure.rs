use std::collections::BTreeMap;

use proptest::prelude::*;
use steenrod_core::arith::{factorial, nu};
use steenrod_core::classify::{
    conjecture_generators, etale_ops_h1, motivic_ops_deg1_descent, motivic_ops_deg1_zeta, ConjectureOptions,
};
use steenrod_core::motivic::{convert, pv_vanishes, word_bidegree, Direction};
use steenrod_core::steenrod::{admissible_sequences, excess};
use steenrod_core::unstable::{
    bidegree_multiset, cartan_generators, iterate_borel, low_excess_family, monomial_basis, BorelBase, Window,
};
use steenrod_core::{Bidegree, CoefficientModel, Error, Flp, Letter, PrimeContext, Word};

fn odd_primes(limit: u32) -> Vec<u32> {
    (3..=limit).filter(|p| (2..*p).take_while(|q| q * q <= *p).all(|q| p % q != 0)).collect()
}

#[test]
fn factorial_and_nu_signs() {
    for l in odd_primes(50) {
        let ctx = PrimeContext::new(l, 1).unwrap();
        let m = u64::from((l - 1) / 2);
        let f = factorial(m, ctx);
        let expect = if (m + 1) % 2 == 0 { 1 } else { l - 1 };
        assert_eq!((f * f).value(), expect, "ell={l}");
        for a in 0..=100i64 {
            let want = if a % 2 == 0 { Flp::new(1, l) } else { Flp::new(-1, l) };
            assert_eq!(nu(2 * a, ctx).unwrap(), want, "ell={l} a={a}");
        }
    }
}

#[test]
fn borel_matches_cartan() {
    for l in [2, 3] {
        let ctx = PrimeContext::new(l, 1).unwrap();
        for n in 2..=5 {
            let borel = iterate_borel(BorelBase::K1, n, ctx, 30).unwrap();
            let cartan = cartan_generators(n, ctx, 30, 1).unwrap();
            assert_eq!(bidegree_multiset(&borel.generators), bidegree_multiset(&cartan), "ell={l} n={n}");
        }
    }
}

#[test]
fn borel_matches_cartan_at_five() {
    let ctx = PrimeContext::new(5, 1).unwrap();
    for n in 2..=4 {
        let borel = iterate_borel(BorelBase::K1, n, ctx, 60).unwrap();
        let cartan = cartan_generators(n, ctx, 60, 1).unwrap();
        assert_eq!(bidegree_multiset(&borel.generators), bidegree_multiset(&cartan), "n={n}");
    }
}

#[test]
fn excess_below_two_census() {
    for l in [2u32, 3, 5] {
        let ctx = PrimeContext::new(l, 1).unwrap();
        let bound = 2 * i64::from(l).pow(5) + 2;
        let mut got: Vec<_> =
            admissible_sequences(ctx, bound, Some(2)).into_iter().filter(|s| excess(s, ctx) < 2).collect();
        let mut want = low_excess_family(ctx, bound);
        got.sort();
        want.sort();
        assert_eq!(got, want, "ell={l}");
    }
}

/// K(Z/ℓ, 1) has one class in every degree.
#[test]
fn k1_poincare_series() {
    for l in [2, 3, 5] {
        let ctx = PrimeContext::new(l, 1).unwrap();
        let k1 = if l == 2 {
            vec![steenrod_core::unstable::GeneratorDescriptor::new(
                steenrod_core::unstable::Label::iota(1),
                Bidegree::new(1, 1),
                ctx,
            )]
        } else {
            cartan_generators(1, ctx, 40, 1).unwrap()
        };
        let t = monomial_basis(&k1, ctx, Window::new(40, None)).unwrap();
        assert!(t.by_degree().values().all(|d| *d == 1), "ell={l}");
    }
}

#[test]
fn conversion_grid() {
    for l in [2, 3, 5, 7] {
        let ctx = PrimeContext::new(l, 1).unwrap();
        let q = i64::from(l) - 1;
        for a in 0..=30 {
            for i in 0..=30 {
                let n = (2 * i).max(2 * a);
                let src = Bidegree::new(n, i);
                let dir = if a <= i { Direction::PToPV } else { Direction::PVToP };
                let c = convert(a, src, dir, ctx).unwrap();
                assert!(c.zeta_exponent >= 0);
                assert_eq!(c.lhs, c.rhs);
                assert_eq!(c.power_marker, n == 2 * a);
                let expect = (a - i).abs() * q;
                assert_eq!(c.zeta_exponent, expect);
            }
        }
        // P_V^n on H^{2n,i}: a = n with n the half-degree.
        for n in 1..=15 {
            for i in 0..=n {
                let c = convert(n, Bidegree::new(2 * n, i), Direction::PVToP, ctx).unwrap();
                assert_eq!(c.zeta_exponent, (n - i) * q);
                assert!(c.power_marker);
            }
        }
        assert!(matches!(
            convert(1, Bidegree::new(3, 2), Direction::PToPV, ctx),
            Err(Error::ConversionZone { .. })
        ));
    }
}

#[test]
fn pv_vanishing_region() {
    assert!(pv_vanishes(2, Bidegree::new(2, 1)));
    assert!(!pv_vanishes(2, Bidegree::new(3, 1)));
    assert!(!pv_vanishes(2, Bidegree::new(4, 2)));
    assert!(!pv_vanishes(0, Bidegree::new(0, 0)));
}

#[test]
fn descriptors_satisfy_their_bidegree_formula() {
    let z = CoefficientModel::alg_closed(3).unwrap();
    let w = Window::new(8, Some(8));
    let mut all = Vec::new();
    for i in 0..4 {
        all.extend(etale_ops_h1(i, &z, 8).unwrap());
        all.extend(motivic_ops_deg1_zeta(i, &z, w).unwrap());
        all.extend(motivic_ops_deg1_descent(i, &z, w).unwrap());
    }
    for ell in [2, 3] {
        let ctx = PrimeContext::new(ell, 1).unwrap();
        let out = conjecture_generators(6, 2, ctx, Window::new(40, None), ConjectureOptions::default()).unwrap();
        assert!(!out.generators.is_empty());
        for op in &out.generators {
            assert_eq!(op.expected_target(ctx).unwrap(), op.target, "{}", op.label);
        }
    }
    for op in &all {
        assert_eq!(op.expected_target(z.ctx()).unwrap(), op.target, "{}", op.label);
    }
}

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![
        Just(Letter::Beta),
        (0u32..6).prop_map(Letter::P),
        (0u32..6).prop_map(Letter::PV),
    ]
}

proptest! {
    #[test]
    fn word_bidegree_is_letterwise(letters in proptest::collection::vec(letter(), 0..5), n in 0i64..20, i in 0i64..10) {
        let ctx = PrimeContext::new(3, 1).unwrap();
        let mut b = Bidegree::new(n, i);
        for l in letters.iter().rev() {
            b = steenrod_core::motivic::bidegree_of(*l, b, ctx);
        }
        prop_assert_eq!(word_bidegree(&Word(letters), Bidegree::new(n, i), ctx), b);
    }

    #[test]
    fn generator_counts_are_weight_blind(n in 2i64..5, w in 0i64..3) {
        let ctx = PrimeContext::new(3, 1).unwrap();
        let a = cartan_generators(n, ctx, 40, 1).unwrap();
        let b = cartan_generators(n, ctx, 40, w).unwrap();
        let degs = |v: &[steenrod_core::unstable::GeneratorDescriptor]| {
            let mut m = BTreeMap::new();
            for g in v {
                *m.entry(g.bidegree.deg).or_insert(0) += 1;
            }
            m
        };
        prop_assert_eq!(degs(&a), degs(&b));
    }
}
