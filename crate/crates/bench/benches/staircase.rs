use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use staircase_core::cremona::{cremona_reduce, BlowupClass};
use staircase_core::exactnum::int;
use staircase_core::ghostverify::{check_actconsid, verify_comb, verify_estimate_clause};
use staircase_core::lattice::{cap_sequence, orbit_grading, orbit_grading_lattice, partition_pos, OrbitSet};
use staircase_core::numberseq::{weight_sequence, GhostSequences};

fn gradings(c: &mut Criterion) {
    let s = GhostSequences::new(6);
    let mut g = c.benchmark_group("grading");
    for n in [1i64, 3, 5] {
        let set = OrbitSet::new(
            u64::try_from(s.ell(n)).unwrap(),
            u64::try_from(s.ell(n)).unwrap(),
            int(1),
            s.theta(n),
        );
        g.bench_with_input(BenchmarkId::new("floor_sum", n), &set, |b, set| {
            b.iter(|| orbit_grading(black_box(set)))
        });
        if n <= 3 {
            g.bench_with_input(BenchmarkId::new("lattice_count", n), &set, |b, set| {
                b.iter(|| orbit_grading_lattice(black_box(set)))
            });
        }
    }
    g.finish();
}

fn partitions(c: &mut Criterion) {
    let s = GhostSequences::new(4);
    let th = s.theta(3);
    c.bench_function("partition_pos m=300", |b| {
        b.iter(|| partition_pos(black_box(&th), 300).unwrap())
    });
    c.bench_function("cap_sequence k=2000", |b| {
        b.iter(|| cap_sequence(&int(1), black_box(&th), 2000).unwrap())
    });
}

fn sequences(c: &mut Criterion) {
    let s = GhostSequences::new(40);
    c.bench_function("weight_sequence b_30", |b| {
        b.iter(|| weight_sequence(black_box(&s.b(30))).unwrap())
    });
    let ghost = BlowupClass::ghost(8).unwrap();
    c.bench_function("cremona ghost n=8", |b| b.iter(|| cremona_reduce(black_box(&ghost)).unwrap()));
}

fn checks(c: &mut Criterion) {
    let mut g = c.benchmark_group("checks");
    g.sample_size(10);
    g.bench_function("le:comb n=2", |b| b.iter(|| verify_comb(2).unwrap()));
    g.bench_function("lem:actconsid n=3", |b| b.iter(|| check_actconsid(3).unwrap()));
    g.bench_function("prop:estimates.i n=8", |b| b.iter(|| verify_estimate_clause(8, "i").unwrap()));
    g.finish();
}

criterion_group!(benches, gradings, partitions, sequences, checks);
criterion_main!(benches);
