use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use staircase_core::exactnum::{int, rat, PerturbedRational, Rational};
use staircase_core::lattice::{
    area_from_partition, area_sublevel_set, cap_sequence, cap_sequence_with_sets, kappa,
    orbit_grading, orbit_grading_lattice, partition_neg, partition_pos, partition_pos_recursive,
    twice_area, twice_area_via_grading, OrbitSet,
};
use staircase_core::numberseq::GhostSequences;

fn theta(p: i64, q: i64) -> PerturbedRational {
    PerturbedRational::plus_eps(rat(p, q))
}

/// `2 (#{(x, y) >= 0 : x a + y b <= action} - 1)` by a double loop.
fn grading_oracle(set: &OrbitSet) -> i64 {
    let act = set.action();
    let mut count = 0i64;
    let mut y = 0i64;
    loop {
        let yb = set.b.scale_int(y);
        if yb > act {
            break;
        }
        let mut x = 0i64;
        while PerturbedRational::exact(&set.a * int(x)) + &yb <= act {
            count += 1;
            x += 1;
        }
        y += 1;
    }
    2 * (count - 1)
}

/// Twice the area between `y = theta x` and the upper hull of `(i, floor(i theta))`,
/// from the shoelace formula on the hull vertices. Limits only.
fn twice_area_oracle(th: &PerturbedRational, t: u64) -> Rational {
    let pts: Vec<(i64, i64)> = (0..=t as i64)
        .map(|i| (i, th.scale_int(i).floor().to_i64().unwrap()))
        .collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let twice_under: i64 = hull.windows(2).map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
    &th.base * int(t * t) - int(twice_under)
}

#[test]
fn grading_fast_matches_oracle() {
    let s = GhostSequences::new(3);
    for n in 0..3 {
        let x = s.theta(n);
        for m1 in 0..12 {
            for m2 in 0..6 {
                let set = OrbitSet::new(m1, m2, int(1), x.clone());
                let want = grading_oracle(&set);
                assert_eq!(orbit_grading(&set), BigInt::from(want), "n={n} ({m1},{m2})");
                assert_eq!(orbit_grading_lattice(&set), BigInt::from(want));
            }
        }
    }
}

#[test]
fn grading_of_model_orbit_set_at_n1() {
    // gr(beta_1^1 beta_2^6) on E(1, 55/8 + eps)
    let set = OrbitSet::new(1, 6, int(1), theta(55, 8));
    assert_eq!(orbit_grading(&set), BigInt::from(308));
}

#[test]
fn cap_sequence_matches_sorted_brute_force() {
    let b = theta(55, 8);
    let seq = cap_sequence(&int(1), &b, 150).unwrap();
    let mut all: Vec<PerturbedRational> = Vec::new();
    for l in 0..200 {
        for m in 0..30 {
            all.push(PerturbedRational::exact(int(l)) + b.scale_int(m));
        }
    }
    all.sort();
    assert_eq!(seq, all[..151].to_vec());
    assert_eq!(seq[0], PerturbedRational::from_int(0));
    let with = cap_sequence_with_sets(&int(1), &b, 10).unwrap();
    // 0, 1, ..., 6, then 55/8
    assert_eq!((with[7].ell, with[7].m), (0, 1));
    assert!(cap_sequence(&int(0), &b, 3).is_err());
}

#[test]
fn partitions_at_theta_one() {
    let x = theta(55, 8);
    let inv = x.recip().unwrap();
    // 55/8 + eps: 8 is a best approximation from below
    assert_eq!(partition_pos(&x, 8).unwrap().parts, vec![8]);
    assert_eq!(partition_pos(&x, 9).unwrap().parts, vec![8, 1]);
    assert_eq!(partition_pos(&inv, 1).unwrap().parts, vec![1]);
    let neg = partition_neg(&x, 8).unwrap();
    assert_eq!(neg.total(), 8);
    assert!(neg.path.is_well_formed());
    assert!(partition_pos(&x, 0).is_err());
    assert!(partition_pos(&PerturbedRational::from_int(-1), 3).is_err());
}

#[test]
fn closed_forms_at_n1() {
    let x = theta(55, 8);
    let inv = x.recip().unwrap();
    for m in 1..=7u64 {
        assert_eq!(twice_area(&x, m).unwrap().base, rat((m * (8 - m)) as i64, 8));
    }
    for m in 1..=6u64 {
        assert_eq!(twice_area(&inv, m).unwrap().base, rat(8 * (m * m) as i64, 55));
    }
    assert_eq!(kappa(&x, 8).base, int(0));
    assert_eq!(kappa(&x, 1).base, rat(7, 8));
}

#[test]
fn sublevel_set_matches_brute_force() {
    let x = theta(377, 55);
    for (th, t_max) in [(x.clone(), 54u64), (x.recip().unwrap(), 376)] {
        let bound = rat(3, 2);
        let got = area_sublevel_set(&th, t_max, &bound, false).unwrap();
        let mut want = Vec::new();
        for t in 1..=t_max {
            let v = twice_area(&th, t).unwrap();
            if v.base <= bound {
                want.push((t, v));
            }
        }
        assert_eq!(got.into_iter().collect::<Vec<_>>(), want);
    }
    // past the denominator the limiting gap vanishes
    assert!(area_sublevel_set(&x, 55, &rat(3, 2), false).is_err());
}

proptest! {
    #[test]
    fn pos_partition_path_matches_recursion(p in 1i64..300, q in 1i64..40, m in 1u64..=300) {
        let x = theta(p, q);
        let path = partition_pos(&x, m).unwrap();
        prop_assert!(path.path.is_well_formed());
        prop_assert_eq!(path.total(), m);
        prop_assert_eq!(path.parts, partition_pos_recursive(&x, m).unwrap());
    }

    #[test]
    fn twice_area_matches_shoelace(p in 1i64..300, q in 1i64..40, t in 1u64..150) {
        let x = theta(p, q);
        let got = twice_area(&x, t).unwrap();
        prop_assert_eq!(got.base.clone(), twice_area_oracle(&x, t));
        let r = partition_pos(&x, t).unwrap().parts.len();
        prop_assert_eq!(twice_area_via_grading(&x, t, r), got);
    }

    #[test]
    fn pick_consistency(p in 1i64..200, q in 1i64..30, t in 1u64..120) {
        let x = theta(p, q);
        let parts = partition_pos(&x, t).unwrap().parts;
        let a = area_from_partition(&x, &parts).unwrap();
        prop_assert!(a.pick_holds());
        // the maximal concave path leaves no lattice points between it and the line
        prop_assert_eq!(a.lattice_count, BigInt::from(0));
    }

    #[test]
    fn grading_fast_matches_lattice(p in 1i64..100, q in 1i64..20, m1 in 0u64..40, m2 in 0u64..10) {
        let set = OrbitSet::new(m1, m2, int(1), theta(p, q));
        prop_assert_eq!(orbit_grading(&set), orbit_grading_lattice(&set));
    }
}
