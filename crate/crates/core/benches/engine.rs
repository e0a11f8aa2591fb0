use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use twisted_moments::dirichlet::{second_moment_d, CutoffRule};
use twisted_moments::exec::ExecMode;
use twisted_moments::moment::{compute_m, MomentSpec, Variant};
use twisted_moments::quadrature::QuadratureConfig;

const MODES: [ExecMode; 2] = [ExecMode::Sequential, ExecMode::Parallel];

fn moment(c: &mut Criterion) {
    let spec = MomentSpec::new(1, 3, 2, 0.5, 20_000.0, Variant::SingleTwist).unwrap();
    let mut g = c.benchmark_group("compute_m");
    g.sample_size(10);
    for exec in MODES {
        let cfg = QuadratureConfig {
            exec,
            ..QuadratureConfig::coarse()
        };
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &cfg, |b, cfg| {
            b.iter(|| compute_m(&spec, cfg).unwrap())
        });
    }
    g.finish();
}

fn dirichlet_square(c: &mut Criterion) {
    let rule = CutoffRule::new(0.5, 1).unwrap();
    let mut g = c.benchmark_group("second_moment_d");
    g.sample_size(10);
    for exec in MODES {
        let cfg = QuadratureConfig {
            exec,
            ..QuadratureConfig::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &cfg, |b, cfg| {
            b.iter(|| second_moment_d(&rule, 60_000.0, cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, moment, dirichlet_square);
criterion_main!(benches);
