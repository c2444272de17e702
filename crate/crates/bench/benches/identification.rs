use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mols::analysis::rip_bruteforce;
use mols::linalg::projected_column_norms;
use mols::problem::generate_gaussian_matrix;
use mols::{select_fast, select_naive, IncrementalBasis};

fn selection(c: &mut Criterion) {
    let mut group = c.benchmark_group("selection_64x128");
    let phi = generate_gaussian_matrix(64, 128, 3, true);
    let y: Vec<f64> = phi.apply(&(0..128).map(|i| if i % 13 == 0 { 1.0 } else { 0.0 }).collect::<Vec<_>>());
    let all: Vec<usize> = (0..128).collect();
    for s in [0usize, 8, 24] {
        let support: Vec<usize> = (0..s).map(|i| 5 * i).collect();
        let basis = IncrementalBasis::from_support(&phi, &support).unwrap();
        let r = basis.project_out(&y);
        let mut pn = projected_column_norms(&phi, &basis, &all);
        support.iter().for_each(|&j| pn[j] = 0.0);
        group.bench_with_input(BenchmarkId::new("fast", s), &s, |b, _| b.iter(|| select_fast(&phi, &r, &pn, 4).unwrap()));
        group.bench_with_input(BenchmarkId::new("naive", s), &s, |b, _| {
            b.iter(|| select_naive(&phi, &y, &support, 4).unwrap())
        });
    }
    group.finish();
}

fn isometry(c: &mut Criterion) {
    let mut group = c.benchmark_group("rip_bruteforce_12x16");
    group.sample_size(10);
    let phi = generate_gaussian_matrix(12, 16, 4, true);
    for order in [3, 5] {
        group.bench_with_input(BenchmarkId::from_parameter(order), &order, |b, &o| {
            b.iter(|| rip_bruteforce(&phi, o).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, selection, isometry);
criterion_main!(benches);
