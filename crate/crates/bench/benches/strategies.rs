use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hetpipe::fixtures::fixture;
use hetpipe::synth::{generate, GenSpec};
use hetpipe::{Platform, Strategy};

const STRATEGIES: [Strategy; 5] = [
    Strategy::Fertac,
    Strategy::TwoCatac,
    Strategy::Herad,
    Strategy::OtacBig,
    Strategy::OtacLittle,
];

fn synthetic(c: &mut Criterion) {
    let platform = Platform::new(20, 20).unwrap();
    for sr in [0.5, 0.8] {
        let mut group = c.benchmark_group(format!("synthetic-sr{sr}"));
        for n in [20, 40, 80] {
            let chain = generate(&GenSpec::new(n, sr, 7)).unwrap();
            for s in STRATEGIES {
                // 2CATAC and HeRAD grow fast; keep the large points to the linear ones.
                if n > 40 && matches!(s, Strategy::TwoCatac | Strategy::Herad) {
                    continue;
                }
                group.bench_with_input(BenchmarkId::new(s.name(), n), &chain, |b, chain| {
                    b.iter(|| s.run_default(black_box(chain), &platform).unwrap())
                });
            }
        }
        group.finish();
    }
}

fn receivers(c: &mut Criterion) {
    let mut group = c.benchmark_group("receivers");
    for name in ["orangepi5plus", "x7ti"] {
        let fx = fixture(name).unwrap();
        let chain = fx.chain();
        let platform = fx.platform();
        for s in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(s.name(), name), &chain, |b, chain| {
                b.iter(|| s.run_default(black_box(chain), &platform).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, synthetic, receivers);
criterion_main!(benches);
