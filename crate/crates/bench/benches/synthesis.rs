use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use twomode::{
    apply_pulse, cat_state, de_evolve, preparation_sequence, run_noisy, BasisIndex, Channel,
    Complex64, Level, NoiseSpec, Pulse, RabiRegime,
};

fn bench_apply_pulse(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_pulse");
    for m_max in [6usize, 12, 20] {
        let target = cat_state(Complex64::new(2.0, 0.0), m_max, m_max).unwrap();
        let state = target.embed(Level::A);
        for channel in [Channel::CarrierAb, Channel::ExchangeAb] {
            let pulse = Pulse::new(
                channel,
                BasisIndex { m: 1, n: 1, level: Level::A },
                0.3,
                0.7,
                RabiRegime::LambDicke,
            );
            group.bench_with_input(
                BenchmarkId::new(format!("{channel:?}"), 2 * m_max),
                &pulse,
                |b, pulse| {
                    let mut s = state.clone();
                    b.iter(|| apply_pulse(black_box(&mut s), pulse).unwrap())
                },
            );
        }
    }
    group.finish();
}

fn bench_de_evolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("de_evolve");
    group.sample_size(10);
    for m_max in [3usize, 6, 12, 20] {
        let target = cat_state(Complex64::new(2.0, 0.0), m_max, m_max).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(2 * m_max), &target, |b, t| {
            b.iter(|| de_evolve(black_box(t), RabiRegime::LambDicke).unwrap())
        });
    }
    group.finish();
}

fn bench_run_noisy(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_noisy");
    group.sample_size(10);
    for m_max in [6usize, 12] {
        let target = cat_state(Complex64::new(2.0, 0.0), m_max, m_max).unwrap();
        let prepare = preparation_sequence(&de_evolve(&target, RabiRegime::LambDicke).unwrap());
        let spec = NoiseSpec::new(0.01, 20, 7);
        group.bench_with_input(BenchmarkId::new("runs20", 2 * m_max), &prepare, |b, seq| {
            b.iter(|| run_noisy(black_box(seq), &target, &spec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_apply_pulse, bench_de_evolve, bench_run_noisy);
criterion_main!(benches);
