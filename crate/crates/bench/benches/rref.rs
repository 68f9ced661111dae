use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nuca::algebra::{Fp, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn random_gf2(n: usize) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let data = (0..n * n).map(|_| rng.gen_range(0..2)).collect();
    Mat::from_data(Fp::new(2).unwrap(), n, n, data)
}

fn rref(c: &mut Criterion) {
    let mut g = c.benchmark_group("rref-gf2");
    g.sample_size(10);
    for n in [128, 512, 2000] {
        let m = random_gf2(n);
        g.bench_with_input(BenchmarkId::new("bitpacked", n), &m, |b, m| b.iter(|| black_box(m.rref())));
        if n <= 512 {
            g.bench_with_input(BenchmarkId::new("generic", n), &m, |b, m| b.iter(|| black_box(m.rref_generic())));
        }
    }
    g.finish();
}

criterion_group!(benches, rref);
criterion_main!(benches);
