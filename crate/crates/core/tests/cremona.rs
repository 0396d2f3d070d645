use num_bigint::BigInt;
use proptest::prelude::*;
use staircase_core::cremona::{
    cremona_move, cremona_reduce, cremona_reduce_with_budget, BlowupClass, Termination,
};
use staircase_core::Error;

fn class(s: &str) -> BlowupClass {
    s.parse().unwrap()
}

#[test]
fn parse_and_display() {
    let c = class("(21; 8,8,8,8,8,8,7,1,1,1,1,1,1,1)");
    assert_eq!(c.to_string(), "(21; 8^6, 7, 1^7)");
    assert_eq!(class("3;1,1"), BlowupClass::from_i64(3, &[1, 1]));
    assert!("3,1".parse::<BlowupClass>().is_err());
    assert!("x;1".parse::<BlowupClass>().is_err());
}

#[test]
fn single_move() {
    let c = BlowupClass::from_i64(3, &[2, 1, 1, 1]);
    let m = cremona_move(&c, 0, 1, 2).unwrap();
    assert_eq!(m, BlowupClass::from_i64(2, &[1, 0, 0, 1]));
    assert_eq!(m.c1(), c.c1());
    assert_eq!(m.self_intersection(), c.self_intersection());
    assert!(matches!(cremona_move(&c, 0, 0, 1), Err(Error::IndexCollision(0, 0, 1))));
    // indices past the end are zero entries
    let long = cremona_move(&BlowupClass::from_i64(1, &[]), 0, 1, 2).unwrap();
    assert_eq!(long, BlowupClass::from_i64(2, &[1, 1, 1]));
}

#[test]
fn reduction_examples() {
    let log = cremona_reduce(&class("3;2,1,1,1,1,1,1")).unwrap();
    let path: Vec<&str> = log.steps.iter().map(|s| s.after.as_str()).collect();
    assert_eq!(path, vec!["(2; 1^5)", "(1; 1^2)"]);
    assert_eq!(log.termination, Termination::Terminal);
    assert!(log.invariants_hold);

    let log = cremona_reduce(&class("0;-1")).unwrap();
    assert_eq!(log.termination, Termination::Terminal);
    assert!(log.steps.is_empty());

    let log = cremona_reduce(&class("5;2,2,1")).unwrap();
    assert_eq!(log.termination, Termination::NonnegativeDefect);
    assert!(log.steps.is_empty());

    // (1; 2) -> (0; 1, -1, -1)
    let log = cremona_reduce(&class("1;2")).unwrap();
    assert_eq!(log.termination, Termination::NegativeMultiplicity);

    // (2; 2, 2, 1) -> (-1; -1, -1, -2)
    let log = cremona_reduce(&class("2;2,2,1")).unwrap();
    assert_eq!(log.termination, Termination::NegativeMultiplicity);
}

#[test]
fn ghost_classes() {
    let b1 = BlowupClass::ghost(1).unwrap();
    assert_eq!(b1.to_string(), "(21; 8^6, 7, 1^7)");
    for n in 1..=10 {
        let b = BlowupClass::ghost(n).unwrap();
        assert_eq!(b.c1(), BigInt::from(1));
        assert_eq!(b.self_intersection(), BigInt::from(1));
        let log = cremona_reduce(&b).unwrap();
        assert_eq!(log.reduced, BlowupClass::from_i64(3, &[1; 8]), "n={n}");
        let m = b.merge_two_ones().unwrap();
        assert_eq!(m.self_intersection(), BigInt::from(-1));
        assert_eq!(cremona_reduce(&m).unwrap().reduced, BlowupClass::from_i64(1, &[1, 1]));
    }
}

#[test]
fn budget_is_enforced() {
    let b = BlowupClass::ghost(5).unwrap();
    assert!(matches!(cremona_reduce_with_budget(&b, 1), Err(Error::MoveBudget(1))));
}

proptest! {
    #[test]
    fn moves_preserve_invariants(
        d in -30i64..60,
        m in prop::collection::vec(-10i64..30, 3..10),
        idx in prop::sample::subsequence((0usize..10).collect::<Vec<_>>(), 3),
    ) {
        let c = BlowupClass::from_i64(d, &m);
        let mv = cremona_move(&c, idx[0], idx[1], idx[2]).unwrap();
        prop_assert_eq!(mv.c1(), c.c1());
        prop_assert_eq!(mv.self_intersection(), c.self_intersection());
        // a move is an involution
        let back = cremona_move(&mv, idx[0], idx[1], idx[2]).unwrap();
        prop_assert_eq!(back.degree, c.degree.clone());
        prop_assert_eq!(&back.mults[..m.len()], &c.mults[..]);
    }

    #[test]
    fn reduction_logs_are_consistent(d in 0i64..40, m in prop::collection::vec(0i64..15, 0..9)) {
        let c = BlowupClass::from_i64(d, &m);
        let log = cremona_reduce(&c).unwrap();
        prop_assert!(log.invariants_hold);
        prop_assert_eq!(log.reduced.c1(), c.c1());
        prop_assert_eq!(log.reduced.self_intersection(), c.self_intersection());
        let text = serde_json::to_string(&log).unwrap();
        prop_assert_eq!(serde_json::from_str::<staircase_core::cremona::CremonaLog>(&text).unwrap(), log);
    }
}
