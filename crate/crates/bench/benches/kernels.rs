use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pipestab::disturbance::BoundarySample;
use pipestab::dynamics::{InitialData, Stepper};
use pipestab::{build_stationary, lambert_w_minus1, uniform_grid, PipeParams};

fn lambert(c: &mut Criterion) {
    let zs: Vec<f64> = (1..=256).map(|i| -0.3678 * i as f64 / 256.0).collect();
    c.bench_function("lambert_w_minus1/256", |b| {
        b.iter(|| {
            zs.iter()
                .map(|&z| lambert_w_minus1(black_box(z)).unwrap())
                .sum::<f64>()
        })
    });
}

fn stepping(c: &mut Criterion) {
    let mut group = c.benchmark_group("lax_wendroff_step");
    let params = PipeParams::new(1.0, 2.0, 0.1, 4.0).unwrap();
    for nx in [200usize, 400, 800] {
        let xs = uniform_grid(1.0, nx);
        let profile = build_stationary(&params, 0.02, &xs).unwrap();
        let initial = InitialData::Bump {
            amplitude: 1e-3,
            center: 0.5,
            width: 0.2,
        }
        .to_state(&xs);
        group.bench_with_input(BenchmarkId::from_parameter(nx), &nx, |b, _| {
            let mut stepper = Stepper::new(&profile, &params).unwrap();
            let dt = stepper.stable_dt(&initial, 0.45);
            let mut state = initial.clone();
            b.iter(|| {
                stepper
                    .step(&mut state, BoundarySample::default(), dt)
                    .unwrap();
            })
        });
    }
    group.finish();
}

criterion_group!(benches, lambert, stepping);
criterion_main!(benches);
