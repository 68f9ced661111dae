use criterion::{criterion_group, criterion_main, Criterion};
use nuca::decide::{decide, DecideOptions};
use nuca::suite::{curated_suite, SIX};
use std::hint::black_box;

fn curated(c: &mut Criterion) {
    let opts = DecideOptions::default();
    let suite = curated_suite();
    c.bench_function("curated-suite-all-properties", |b| {
        b.iter(|| {
            for case in &suite {
                for prop in SIX {
                    let _ = black_box(decide(&case.spec, prop, &opts));
                }
            }
        })
    });
}

criterion_group!(benches, curated);
criterion_main!(benches);
