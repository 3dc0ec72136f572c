mod common;

use std::cmp::Ordering;

use hecke_core::bqf::{cycle_of, equivalence_witness, form_of, is_reduced_number, phi_apply};
use hecke_core::cf::{convergents, evaluate_periodic, expand, is_admissible};
use hecke_core::group::{u_zero, word_to_matrix};
use hecke_core::{ExtendedPoint, FieldContext, GroupElem, RingElem, Surd};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: usize = hecke_core::DEFAULT_MAX_STEPS;

fn ctx(p: u32) -> FieldContext {
    FieldContext::new(p).unwrap()
}

fn elem(p: u32) -> impl Strategy<Value = RingElem> {
    let d = ctx(p).degree();
    (prop::collection::vec(-40i64..=40, d), 1i64..=6)
        .prop_map(move |(c, den)| RingElem::from_i64s(&ctx(p), &c, den))
}

fn word() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, 0..=5)
}

fn hyperbolic(p: u32, seed: u64) -> Surd {
    common::hyperbolic_point(&ctx(p), &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws((p, x, y, z) in (3u32..=12).prop_flat_map(|p| (Just(p), elem(p), elem(p), elem(p)))) {
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x - &x, ctx(p).zero());
        if !x.is_zero() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
        // Exact sign agrees with the floating value when that is not tiny.
        let f = x.to_f64();
        if f.abs() > 1e-6 {
            prop_assert_eq!(x.sign(), if f > 0.0 { 1 } else { -1 });
        }
        // floor(x) <= x < floor(x) + 1
        let fl = RingElem::from_int(&ctx(p), x.floor());
        prop_assert!(fl <= x);
        prop_assert!(x < &fl + &ctx(p).one());
        prop_assert_eq!(x.cmp_value(&y), (&x - &y).sign().cmp(&0));
    }

    #[test]
    fn norm_is_multiplicative(p in 3u32..=9, a in prop::collection::vec(-9i64..=9, 6), b in prop::collection::vec(-9i64..=9, 6)) {
        let k = ctx(p);
        let d = k.degree();
        let x = RingElem::from_i64s(&k, &a[..d.min(6)], 1);
        let y = RingElem::from_i64s(&k, &b[..d.min(6)], 1);
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
    }

    #[test]
    fn matrices_compose(p in 3u32..=10, w1 in word(), w2 in word(), x in -50i64..=50) {
        let k = ctx(p);
        let a = word_to_matrix(&k, &w1);
        let b = word_to_matrix(&k, &w2);
        prop_assert!(a.det().is_one());
        let ab = a.mul(&b);
        let mut w = w1.clone();
        w.extend(&w2);
        prop_assert_eq!(&ab, &word_to_matrix(&k, &w));
        prop_assert!(a.mul(&a.inv()).is_identity());
        let pt: ExtendedPoint = Surd::rational(RingElem::from_ratio(&k, x, 7)).into();
        let lhs = ab.apply(&pt);
        let rhs = a.apply(&b.apply(&pt));
        prop_assert!(lhs.value_eq(&rhs));
    }

    #[test]
    fn surd_arithmetic(p in 3u32..=8, seed in any::<u64>()) {
        let x = hyperbolic(p, seed);
        prop_assert_eq!(x.conjugate().conjugate(), x.clone());
        let inv = x.recip().unwrap();
        prop_assert!(inv.recip().unwrap().value_eq(&x));
        let sum = x.add(&x.conjugate()).unwrap();
        prop_assert!(sum.is_rational());
        prop_assert!((x.to_f64() * inv.to_f64() - 1.0).abs() < 1e-9);
        let n = x.floor_div_lambda();
        let l = x.ctx().lambda();
        let lo = l.scale_int(&n);
        let hi = l.scale_int(&(n + BigInt::from(1)));
        prop_assert_ne!(x.cmp_elem(&lo), Ordering::Less);
        prop_assert_eq!(x.cmp_elem(&hi), Ordering::Less);
    }

    #[test]
    fn expansion_round_trip(p in 3u32..=8, seed in any::<u64>(), aux in word()) {
        let k = ctx(p);
        let alpha = hyperbolic(p, seed);
        // Move the point around so preperiods are exercised.
        let beta = match word_to_matrix(&k, &aux).apply_surd(&alpha) {
            ExtendedPoint::Finite(b) => b,
            ExtendedPoint::Infinity => alpha.clone(),
        };
        let (cf, trace) = expand(&beta, N).unwrap();
        prop_assert!(!cf.period.is_empty());
        prop_assert!(is_admissible(&cf, p).ok());
        prop_assert!(evaluate_periodic(&k, &cf, N).unwrap().value_eq(&beta));
        prop_assert_eq!(trace.steps.len(), cf.preperiod.len() + cf.period.len());
        // Equivalent points share the period up to rotation.
        let (ca, _) = expand(&alpha, N).unwrap();
        prop_assert!(hecke_core::cf::cyclic_equal(&ca.period, &cf.period));
        let conv = convergents(&beta, 6, N).unwrap();
        for c in &conv {
            prop_assert_eq!(c.cmp_value(&beta.clone().into()).unwrap(), Ordering::Greater);
        }
    }

    #[test]
    fn form_action(p in 3u32..=7, seed in any::<u64>(), v in word(), w in word()) {
        let k = ctx(p);
        let alpha = hyperbolic(p, seed);
        let q = form_of(&alpha, N).unwrap();
        prop_assert!(q.alpha().unwrap().value_eq(&alpha));
        let vm = word_to_matrix(&k, &v);
        let wm = word_to_matrix(&k, &w);
        prop_assert_eq!(q.act(&vm).act(&wm), q.act(&vm.mul(&wm)));
        prop_assert_eq!(q.act(&vm).discriminant(), q.discriminant());
        prop_assert_eq!(q.act(&GroupElem::identity(&k).neg()), q.clone());
        // Q o V is equivalent to Q, with a witness mapping one to the other.
        let qv = q.act(&vm);
        let m = equivalence_witness(&q, &qv, N).unwrap().expect("equivalent forms");
        prop_assert_eq!(q.act(&m), qv);
    }

    #[test]
    fn cycles_are_reduced(p in 3u32..=7, seed in any::<u64>()) {
        let alpha = hyperbolic(p, seed);
        let q = form_of(&alpha, N).unwrap();
        let (trace, cycle) = cycle_of(&q, N).unwrap();
        prop_assert!(!cycle.is_empty());
        prop_assert_eq!(cycle.forms[0].clone(), trace.terminal.clone());
        for b in &cycle.numbers {
            prop_assert!(is_reduced_number(b, N).unwrap().is_some());
        }
        // The step map closes the cycle.
        let k = q.ctx();
        let last = cycle.forms.last().unwrap();
        let r = *cycle.exponents.last().unwrap();
        prop_assert_eq!(last.act(&GroupElem::s_pow_t(k, r)), cycle.forms[0].clone());
    }
}

#[test]
fn phi_fixes_zero() {
    for p in 3..=9 {
        let k = ctx(p);
        let (y, _) = phi_apply(&Surd::rational(k.zero())).unwrap();
        assert!(y.value_eq(&Surd::rational(k.zero())), "p={p}: Phi(0) = {y}");
    }
}

#[test]
fn u_zero_out_of_range() {
    let k = ctx(5);
    assert!(u_zero(&k, 0).is_err());
    assert!(u_zero(&k, 6).is_err());
    assert!(u_zero(&k, 1).unwrap().is_infinite());
}
