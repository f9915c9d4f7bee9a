use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use balance_core::{
    bipartize, degree_stats, estimate_skew, gen_complete, gen_regular, make_thresholds, run_greedy,
    run_threshold_greedy, sample_iid, Rational, TieBreak,
};

fn greedy(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy");
    for n in [1usize << 14, 1 << 16] {
        let g = gen_complete(n).unwrap();
        let s = sample_iid(&g, n, 3).unwrap();
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("complete_T_eq_n", n), &s, |b, s| {
            b.iter(|| run_greedy(&g, s, TieBreak::Random(1)))
        });
    }
    group.finish();
}

fn threshold_greedy(c: &mut Criterion) {
    let mut group = c.benchmark_group("threshold_greedy");
    for n in [1usize << 12, 1 << 14] {
        let g = bipartize(&gen_regular(n, 16, 1).unwrap()).unwrap().graph;
        let (s_hat, d) = estimate_skew(&g).unwrap();
        let st = degree_stats(&g);
        let alpha = make_thresholds(
            d.rho_star,
            st.avg_degree,
            s_hat,
            g.vertex_count(),
            Rational::from_integer(8),
            d.h,
        );
        let s = sample_iid(&g, n, 3).unwrap();
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("split_regular_d16", n), &s, |b, s| {
            b.iter(|| run_threshold_greedy(&g, &d, &alpha, s).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, greedy, threshold_greedy);
criterion_main!(benches);
