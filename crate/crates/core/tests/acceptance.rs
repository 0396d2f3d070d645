//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exit status is success when every criterion passes, or when the only
//! failure is the known one: the two-end writhe inequality at `n = 0`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use staircase_core::echindex::diff_vector;
use staircase_core::exactnum::{int, rat, PerturbedRational, Rational};
use staircase_core::ghostverify::{
    check_grading_triple, check_monotonicity, find_check, grading_triple, run_check,
    verify_split_inequality, ESTIMATE_CLAUSES, KAPPA_PARTS,
};
use staircase_core::lattice::{
    area_from_partition, orbit_grading, orbit_grading_lattice, partition_pos,
    partition_pos_recursive, OrbitSet,
};
use staircase_core::numberseq::GhostSequences;
use staircase_core::Status;

const SEED: u64 = 0x5eed_2024;
const RANDOM_ORBIT_SETS: usize = 500;
const DIFF_TRIALS: usize = 10_000;
const PARTITION_M_MAX: u64 = 300;

/// Time limits per criterion.
const LIMITS_MS: [u64; 12] = [1_000, 1_000, 10_000, 30_000, 1_000, 60_000, 1_000, 5_000, 1_000, 30_000, 60_000, 5_000];

type Verdict = Result<(), Value>;

struct Criterion {
    name: &'static str,
    run: fn() -> Verdict,
    /// Expected to fail; reported as FAIL but not counted against the exit status.
    known_failure: bool,
}

/// Runs registry checks over explicit ranges, stopping at the first failure.
fn registry(ids: &[&str], range: Option<(i64, i64)>) -> Verdict {
    for id in ids {
        let c = find_check(id).unwrap_or_else(|| panic!("unknown check {id}"));
        let r = run_check(&c, range);
        if r.status == Status::Fail {
            return Err(json!({"check": id, "params": r.params, "witness": r.witness}));
        }
    }
    Ok(())
}

fn c1_weights() -> Verdict {
    registry(&["cor:weight"], Some((1, 20)))
}

fn c2_model_dot() -> Verdict {
    registry(&["lem:WcM", "eqn:cmdotW"], Some((1, 20)))
}

/// `2 (#{(x, y) >= 0 : x + y b <= action} - 1)` by a double loop.
fn grading_oracle(set: &OrbitSet) -> BigInt {
    let act = set.action();
    let mut count = 0i64;
    let mut y = 0i64;
    while set.b.scale_int(y) <= act {
        let mut x = 0i64;
        while PerturbedRational::exact(&set.a * int(x)) + set.b.scale_int(y) <= act {
            count += 1;
            x += 1;
        }
        y += 1;
    }
    BigInt::from(2 * (count - 1))
}

fn c3_grading() -> Verdict {
    for n in 0..=3 {
        if let Some(w) = check_grading_triple(n).map_err(|e| json!(e.to_string()))? {
            return Err(json!({"n": n, "witness": w}));
        }
    }
    let exact = |n| -> Vec<BigInt> { grading_triple(n).iter().map(|(s, _)| orbit_grading(s)).collect() };
    let want0: Vec<BigInt> = [16, 18, 22].map(BigInt::from).to_vec();
    let want1: Vec<BigInt> = [502, 504, 506].map(BigInt::from).to_vec();
    if exact(0) != want0 || exact(1) != want1 {
        return Err(json!({"n0": format!("{:?}", exact(0)), "n1": format!("{:?}", exact(1))}));
    }
    let mut rng = StdRng::seed_from_u64(SEED);
    for _ in 0..RANDOM_ORBIT_SETS {
        let (p, q) = (rng.gen_range(1..120i64), rng.gen_range(1..25i64));
        let b = PerturbedRational::new(rat(p, q), int(if rng.gen_bool(0.5) { 1 } else { -1 }));
        let set = OrbitSet::new(rng.gen_range(0..30), rng.gen_range(0..8), int(1), b);
        let (fast, lat, brute) = (orbit_grading(&set), orbit_grading_lattice(&set), grading_oracle(&set));
        if fast != lat || fast != brute {
            return Err(json!({"set": set, "fast": fast.to_string(), "lattice": lat.to_string(),
                "oracle": brute.to_string()}));
        }
    }
    Ok(())
}

fn c4_comb() -> Verdict {
    registry(&["le:comb"], Some((1, 2)))
}

fn c5_n1_closed_forms() -> Verdict {
    registry(&["ex:n=1"], None)
}

fn c6_estimates() -> Verdict {
    let ids: Vec<String> = ESTIMATE_CLAUSES
        .iter()
        .map(|c| format!("prop:estimates.{c}"))
        .chain(KAPPA_PARTS.iter().map(|p| format!("lem:factsaboutc.{p}")))
        .collect();
    let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    registry(&refs, Some((2, 12)))
}

fn c7_model_curve() -> Verdict {
    registry(&["clm:homologyclass"], Some((1, 15)))
}

fn c8_cremona() -> Verdict {
    registry(&["eqn:selfintersection"], Some((1, 10)))
}

fn c9_intersections() -> Verdict {
    registry(&["eqn:homologycalculation"], Some((1, 15)))?;
    registry(&["lem:keylemma2"], Some((1, 30)))
}

fn c10_monotonicity() -> Verdict {
    let s = GhostSequences::new(4);
    for n in 1..=2 {
        if let Some(w) = check_monotonicity(n, &s.mu(n)).map_err(|e| json!(e.to_string()))? {
            return Err(json!({"n": n, "witness": w}));
        }
    }
    Ok(())
}

fn c11_properties() -> Verdict {
    let mut rng = StdRng::seed_from_u64(SEED ^ 1);
    for _ in 0..DIFF_TRIALS {
        let len = rng.gen_range(1..12);
        let z: Vec<Rational> = (0..len).map(|_| rat(rng.gen_range(-30..30), rng.gen_range(1..6))).collect();
        let mut w: Vec<Rational> = (0..len).map(|_| rat(rng.gen_range(-30..30), rng.gen_range(1..6))).collect();
        if w.iter().all(|x| *x == int(0)) {
            w[0] = int(1);
        }
        let d = diff_vector(&z, &w).map_err(|e| json!(e.to_string()))?;
        if !d.identities_hold() {
            return Err(json!({"diff_vector": d}));
        }
    }
    for _ in 0..200 {
        let (p, q) = (rng.gen_range(1..400i64), rng.gen_range(1..60i64));
        let theta = PerturbedRational::plus_eps(rat(p, q));
        let m = rng.gen_range(1..=PARTITION_M_MAX);
        let err = |what: &str| json!({"property": what, "theta": theta.to_string(), "m": m});
        let path = partition_pos(&theta, m).map_err(|e| json!(e.to_string()))?;
        let rec = partition_pos_recursive(&theta, m).map_err(|e| json!(e.to_string()))?;
        if path.parts != rec || !path.path.is_well_formed() || path.total() != m {
            return Err(err("path and recursion agree"));
        }
        // floor((a_i + a_j) theta) = floor(a_i theta) + floor(a_j theta)
        let fl = |a: u64| theta.scale_int(a as i64).floor();
        for (i, &a) in path.parts.iter().enumerate() {
            for &b in &path.parts[i + 1..] {
                if fl(a + b) != fl(a) + fl(b) {
                    return Err(err("partition floor additivity"));
                }
            }
        }
        // Pick on the ECH path and on the all-ones partition, which has lattice points above it
        for parts in [path.parts.clone(), vec![1; m.min(60) as usize]] {
            let a = area_from_partition(&theta, &parts).map_err(|e| json!(e.to_string()))?;
            if !a.pick_holds() {
                return Err(err("Pick"));
            }
        }
    }
    Ok(())
}

/// Known to fail at `n = 0`: the split (1, 7) of 8 gives 6 < 25/4.
fn c12_split() -> Verdict {
    for n in 0..=3 {
        if let Some(w) = verify_split_inequality(n).map_err(|e| json!(e.to_string()))? {
            return Err(json!({"n": n, "witness": w}));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "weight blocks and weight identities, n=1..20", run: c1_weights, known_failure: false },
        Criterion { name: "model class dot product closed forms, n=1..20", run: c2_model_dot, known_failure: false },
        Criterion { name: "grading fast/lattice/brute force, n=0..3 and 500 random sets", run: c3_grading, known_failure: false },
        Criterion { name: "capacity coincidences (le:comb), n=1,2", run: c4_comb, known_failure: false },
        Criterion { name: "2A closed forms at n=1", run: c5_n1_closed_forms, known_failure: false },
        Criterion { name: "area estimates and kappa facts, n=2..12", run: c6_estimates, known_failure: false },
        Criterion { name: "I(C_M) = ind(C_M) = 0, n=1..15", run: c7_model_curve, known_failure: false },
        Criterion { name: "Cremona reduction with invariants, n=1..10", run: c8_cremona, known_failure: false },
        Criterion { name: "intersection numbers n=1..15, 9l^2 - PQ = 1 n=1..30", run: c9_intersections, known_failure: false },
        Criterion { name: "monotonicity with factor mu_n, n=1,2", run: c10_monotonicity, known_failure: false },
        Criterion { name: "property suites (diff vector, Pick, partitions)", run: c11_properties, known_failure: false },
        Criterion { name: "two-end writhe inequality, n=0..3", run: c12_split, known_failure: true },
    ];
    let mut unexpected = 0;
    for (i, c) in criteria.iter().enumerate() {
        let limit = Duration::from_millis(LIMITS_MS[i]);
        let start = Instant::now();
        let verdict = (c.run)();
        let took = start.elapsed();
        let slow = took > limit;
        let ok = verdict.is_ok() && !slow;
        let mut line = format!(
            "[{}] {:>2}. {} ({} ms, limit {} ms)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            c.name,
            took.as_millis(),
            limit.as_millis()
        );
        if let Err(w) = &verdict {
            line.push_str(&format!(" witness: {w}"));
        }
        if slow {
            line.push_str(" over time limit");
        }
        if !ok && c.known_failure && !slow {
            line.push_str(" (known)");
        }
        println!("{line}");
        let expected = if c.known_failure { verdict.is_err() } else { verdict.is_ok() };
        if !expected || slow {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected result(s)");
        ExitCode::FAILURE
    }
}
