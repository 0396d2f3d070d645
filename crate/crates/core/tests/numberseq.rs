use num_bigint::BigInt;
use proptest::prelude::*;
use staircase_core::exactnum::{int, rat, PerturbedRational, Rational};
use staircase_core::numberseq::{
    best_approx_below, check_identity, continued_fraction, convergents, fib, weight_sequence,
    ContinuedFraction, GhostSequences, Identity, Parity,
};

/// Plain Fibonacci by iteration, independent of the library.
fn fib_oracle(k: usize) -> u128 {
    let (mut a, mut b) = (0u128, 1u128);
    for _ in 0..k {
        let c = a + b;
        a = b;
        b = c;
    }
    a
}

fn big(v: u128) -> BigInt {
    BigInt::from(v)
}

#[test]
fn fibonacci_matches_oracle() {
    for k in 0..120 {
        assert_eq!(fib(k as i64), big(fib_oracle(k)), "F_{k}");
    }
    // F_{-k} = (-1)^{k+1} F_k
    assert_eq!(fib(-1), BigInt::from(1));
    assert_eq!(fib(-2), BigInt::from(-1));
}

#[test]
fn sequences_match_oracle() {
    let s = GhostSequences::new(25);
    for n in 0..25i64 {
        let k = n as usize;
        let h = |i: usize| fib_oracle(2 * i);
        assert_eq!(s.h(n), big(h(k)));
        assert_eq!(s.g(n + 1), big(fib_oracle(2 * k + 1)));
        assert_eq!(s.q(n), big(h(2 * k + 1)));
        assert_eq!(s.p(n), big(h(2 * k + 3)));
        assert_eq!(s.ell(n), big(h(2 * k + 2) / 3));
        let prev = if n == 0 { 0 } else { h(2 * k) / 3 };
        assert_eq!(s.t(n), big(h(2 * k + 2) / 3 - prev));
        assert_eq!(s.b(n), Rational::new(big(h(2 * k + 3)), big(h(2 * k + 1))));
    }
}

#[test]
fn frozen_small_values() {
    let s = GhostSequences::new(4);
    let row = |n| {
        (s.q(n), s.p(n), s.ell(n), s.t(n))
    };
    let b = |x: i64| BigInt::from(x);
    assert_eq!(row(0), (b(1), b(8), b(1), b(1)));
    assert_eq!(row(1), (b(8), b(55), b(7), b(6)));
    assert_eq!(row(2), (b(55), b(377), b(48), b(41)));
    assert_eq!(row(3), (b(377), b(2584), b(329), b(281)));
    assert_eq!(s.ell(-1), b(0));
    assert_eq!(s.b(1), rat(55, 8));
    assert_eq!(s.mu(1), rat(21, 8));
    assert_eq!(s.mu(2), rat(144, 55));
    assert_eq!(s.mu(0), rat(17, 6));
    assert_eq!(s.theta(1), PerturbedRational::plus_eps(rat(55, 8)));
}

#[test]
fn mu_forms_agree_for_positive_n() {
    let s = GhostSequences::new(20);
    for n in 1..20 {
        let mu = s.mu(n);
        assert_eq!(mu, (int(1) + s.b(n)) / int(3));
        assert_eq!(mu, Rational::new(s.h(2 * n + 2), s.h(2 * n + 1)));
        assert_eq!(mu, int(3) * int(s.ell(n)) / int(s.q(n)));
    }
}

#[test]
fn identities_hold_over_range() {
    for id in Identity::ALL {
        for n in id.min_n()..=30 {
            let c = check_identity(id, n).unwrap();
            assert!(c.holds, "{id} at n={n}: {:?} vs {:?}", c.lhs, c.rhs);
        }
    }
}

#[test]
fn identity_names_roundtrip() {
    for id in Identity::ALL {
        assert_eq!(id.id().parse::<Identity>().unwrap(), id);
    }
    assert!("nope".parse::<Identity>().is_err());
    assert!(check_identity(Identity::Fibt, 0).is_err());
}

#[test]
fn weight_sequence_of_55_over_8() {
    let w = weight_sequence(&rat(55, 8)).unwrap();
    let mut want = vec![BigInt::from(8); 6];
    want.push(BigInt::from(7));
    want.extend(vec![BigInt::from(1); 7]);
    assert_eq!(w.weights(), want);
    assert_eq!(w.run_lengths(), ContinuedFraction::new([6, 1, 7]));
    assert!(w.invariants_hold());
}

/// Euclid on u128, independent of the library.
fn cf_oracle(mut p: u128, mut q: u128) -> Vec<u128> {
    let mut out = Vec::new();
    while q != 0 {
        out.push(p / q);
        let r = p % q;
        p = q;
        q = r;
    }
    out
}

#[test]
fn ghost_weight_run_lengths() {
    let s = GhostSequences::new(20);
    for n in 1..20usize {
        let got = weight_sequence(&s.b(n as i64)).unwrap().run_lengths();
        let want = cf_oracle(fib_oracle(4 * n + 6), fib_oracle(4 * n + 2));
        assert_eq!(got.quotients, want.iter().map(|&a| big(a)).collect::<Vec<_>>(), "n={n}");
        // [6; 1, 5, ..., 1, 5, 1, 7]
        assert_eq!(want.len(), 2 * n + 1);
        assert_eq!(want[0], 6);
        assert_eq!(&want[2 * n - 1..], &[1, 7]);
    }
}

#[test]
fn continued_fraction_canonical_form() {
    let cf = ContinuedFraction::new([6, 1, 6, 1]);
    assert!(!cf.is_canonical());
    assert_eq!(cf.canonical(), ContinuedFraction::new([6, 1, 7]));
    assert!(cf.equivalent(&ContinuedFraction::new([6, 1, 7])));
    assert_eq!(cf.value(), rat(55, 8));
    assert_eq!(continued_fraction(&rat(55, 8)).unwrap().to_string(), "[6; 1, 7]");
    assert!(continued_fraction(&rat(-1, 2)).is_err());
}

#[test]
fn convergents_of_theta_one() {
    let x = PerturbedRational::plus_eps(rat(55, 8));
    let c = convergents(&x, &BigInt::from(100)).unwrap();
    let vals: Vec<Rational> = c.iter().map(|c| c.value.clone()).collect();
    assert_eq!(vals, vec![int(6), int(7), rat(55, 8)]);
    assert_eq!(c[0].parity, Parity::Even);
    // below 55/8 + eps with denominator at most 8: 6, 13/2, 20/3, 27/4, 34/5, 41/6, 48/7, 55/8
    let b = best_approx_below(&x, &BigInt::from(8)).unwrap();
    let dens: Vec<BigInt> = b.iter().map(|r| r.denom().clone()).collect();
    assert_eq!(dens, (1..=8).map(BigInt::from).collect::<Vec<_>>());
    assert!(best_approx_below(&PerturbedRational::exact(rat(55, 8)), &BigInt::from(8)).is_err());
}

/// Brute force: p/q is a best approximation from below when no fraction
/// with denominator at most q lies in (p/q, x].
fn brute_best_below(x: &PerturbedRational, qmax: i64) -> Vec<i64> {
    let mut best: Option<Rational> = None;
    let mut out = Vec::new();
    for q in 1..=qmax {
        let p = x.scale_int(q).floor();
        let r = Rational::new(p, BigInt::from(q));
        if best.as_ref().map_or(true, |b| &r > b) {
            best = Some(r);
            out.push(q);
        }
    }
    out
}

proptest! {
    #[test]
    fn weights_invariants(p in 1u64..5000, q in 1u64..500) {
        let w = weight_sequence(&Rational::new(p.into(), q.into())).unwrap();
        prop_assert!(w.invariants_hold());
        let cf = continued_fraction(&w.target).unwrap();
        prop_assert!(cf.equivalent(&w.run_lengths()));
        prop_assert_eq!(cf.value(), w.target);
    }

    #[test]
    fn best_below_matches_brute_force(p in 1i64..400, q in 1i64..60, sign in prop::bool::ANY) {
        let x = if sign {
            PerturbedRational::plus_eps(rat(p, q))
        } else {
            PerturbedRational::minus_eps(rat(p, q))
        };
        let got: Vec<i64> = best_approx_below(&x, &BigInt::from(80))
            .unwrap()
            .iter()
            .map(|r| i64::try_from(r.denom().clone()).unwrap())
            .collect();
        prop_assert_eq!(got, brute_best_below(&x, 80));
    }
}
