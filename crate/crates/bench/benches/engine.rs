//! Benchmarks along the hot paths: exact elimination, Cech assembly of
//! the torus models, and the full pair sequence on seeded diagrams.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use cechdol::{
    assemble_les, cech_cohomology, random_valid_diagram, ses_of_pair, torus_cover,
    total_complex_full, SizeBounds,
};
use cechdol_bench::seeded_matrix;

fn bench_elimination(c: &mut Criterion) {
    let m = seeded_matrix(7, 40, 40, 250);
    c.bench_function("rank seeded 40x40", |b| b.iter(|| black_box(&m).rank()));
    c.bench_function("kernel seeded 40x40", |b| {
        b.iter(|| black_box(&m).kernel_basis())
    });
}

fn bench_torus_cohomology(c: &mut Criterion) {
    for n in [2, 3] {
        let (d, _) = torus_cover(n).unwrap();
        c.bench_function(&format!("torus cohomology n={n} at (1,1)"), |b| {
            b.iter(|| cech_cohomology(black_box(&d), 1, 1).unwrap())
        });
    }
}

fn bench_seeded_diagrams(c: &mut Criterion) {
    let diagrams: Vec<_> = (0..4)
        .map(|seed| random_valid_diagram(seed, SizeBounds::default()))
        .collect();
    c.bench_function("total complex, 4 seeded diagrams", |b| {
        b.iter(|| {
            for d in &diagrams {
                total_complex_full(black_box(d)).unwrap();
            }
        })
    });
    c.bench_function("pair sequence + LES, 4 seeded diagrams", |b| {
        b.iter(|| {
            for d in &diagrams {
                let ses = ses_of_pair(black_box(d), "U0").unwrap();
                let mut ps: Vec<i32> = ses.mid.support().iter().map(|at| at.p).collect();
                ps.dedup();
                for p in ps {
                    assemble_les(&ses, p).unwrap();
                }
            }
        })
    });
}

criterion_group!(
    benches,
    bench_elimination,
    bench_torus_cohomology,
    bench_seeded_diagrams
);
criterion_main!(benches);
