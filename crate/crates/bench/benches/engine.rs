//! Benchmarks for the hot paths: GF(2) elimination, Adem rewriting,
//! complex assembly with cohomology, and the d^2 word sweep.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use koszul_core::cohomology::cohomology;
use koszul_core::complex::{
    assemble, bp_preset_for_window, d_squared_words, DiffConvention, Window,
};
use koszul_core::gf2::{kernel_basis, rref_and_rank, Gf2Matrix};
use koszul_core::ops::{normalize_r_word, RewriteStrategy};

fn random_matrix(rows: usize, cols: usize, seed: u64) -> Gf2Matrix {
    let mut state = seed;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut m = Gf2Matrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            if next() % 2 == 0 {
                m.set(r, c, true);
            }
        }
    }
    m
}

fn bench_gf2(c: &mut Criterion) {
    let m = random_matrix(512, 512, 0x5DEECE66D);
    c.bench_function("gf2/rref_512", |b| {
        b.iter_batched(|| m.clone(), |m| black_box(rref_and_rank(&m)), BatchSize::SmallInput)
    });
    let wide = random_matrix(256, 512, 0xDEADBEEF);
    c.bench_function("gf2/kernel_256x512", |b| {
        b.iter(|| black_box(kernel_basis(&wide)))
    });
}

fn bench_adem(c: &mut Criterion) {
    c.bench_function("adem/normalize_triples_to_48", |b| {
        b.iter(|| {
            let mut total = 0usize;
            for cc in 4u32..12 {
                for bb in (cc + 1)..24 {
                    for aa in (bb + 1)..48 {
                        total +=
                            normalize_r_word(&[aa, bb, cc], RewriteStrategy::LeftmostFirst).len();
                    }
                }
            }
            black_box(total)
        })
    });
}

fn bench_complex(c: &mut Criterion) {
    let w = Window::new(-40, -2, 5, 1);
    let module = bp_preset_for_window(&w);
    c.bench_function("complex/assemble_n1", |b| {
        b.iter(|| black_box(assemble(&w, &module).unwrap()))
    });
    let slice = assemble(&w, &module).unwrap();
    c.bench_function("complex/cohomology_n1", |b| {
        b.iter(|| black_box(cohomology(&slice).unwrap()))
    });
    let sweep = Window::new(-32, 0, 6, 2);
    let sweep_module = bp_preset_for_window(&sweep);
    c.bench_function("complex/d2_words_n2", |b| {
        b.iter(|| {
            let report = d_squared_words(&sweep, &sweep_module, DiffConvention::Standard);
            assert!(report.passed());
            black_box(report.monomials_checked)
        })
    });
}

criterion_group!(benches, bench_gf2, bench_adem, bench_complex);
criterion_main!(benches);
