use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use seqrisk::bounds::{chaining_rad_upper_optimal, spectral_log_covering, vc_bound, Capacity};
use seqrisk::estimators::{analytic_zero_one_risk, empirical_rademacher, sup_deviation};
use seqrisk::processes::simulate_sequence;
use seqrisk::scenario::{solve_margin_program, ConstraintPiece, Region, SolveMode};
use seqrisk::{FunctionClassDescriptor, LossSpec, ProcessSpec, ScenarioProgramSpec};

fn ar1() -> ProcessSpec {
    ProcessSpec::Ar1Threshold { a: 0.8, sigma: 0.6, b_star: 0.25, flip_p: 0.1 }
}

fn closed_forms(c: &mut Criterion) {
    c.bench_function("vc_bound", |b| {
        b.iter(|| vc_bound(black_box(0.1), black_box(100_000), Capacity::VcDim(4), 0.05))
    });
    let cover = spectral_log_covering(1.0, 1000.0).unwrap();
    c.bench_function("chaining_optimal_depth", |b| {
        b.iter(|| chaining_rad_upper_optimal(black_box(2.0), &cover, 1000, 1.0))
    });
}

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate_ar1");
    for n in [1_000usize, 100_000] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| simulate_sequence(&ar1(), n, black_box(7)))
        });
    }
    g.finish();
}

fn estimators(c: &mut Criterion) {
    let path = simulate_sequence(&ar1(), 2000, 1).unwrap();
    let points = path.inputs();
    let thresholds = FunctionClassDescriptor::threshold1d();
    let linear = FunctionClassDescriptor::linear_ball(1, 1.0, false).unwrap();
    let mut g = c.benchmark_group("empirical_rademacher_n2000_100draws");
    g.bench_function("threshold", |b| b.iter(|| empirical_rademacher(&thresholds, &points, 100, 3)));
    g.bench_function("linear_ball", |b| b.iter(|| empirical_rademacher(&linear, &points, 100, 3)));
    g.finish();

    let risk = analytic_zero_one_risk(&thresholds, &ar1()).unwrap();
    let loss = LossSpec::zero_one();
    c.bench_function("sup_deviation_threshold_n2000", |b| {
        b.iter(|| sup_deviation(&thresholds, &loss, &path, &*risk))
    });
}

fn solver(c: &mut Criterion) {
    let program = ScenarioProgramSpec {
        objective: vec![-1.0, -0.5],
        pieces: vec![ConstraintPiece {
            psi_linear: vec![vec![0.0, 0.0], vec![1.0, 0.5]],
            psi_offset: vec![1.0, 0.0],
            eta_linear: vec![0.0, 0.0],
            eta_offset: -1.0,
        }],
        feasible_set: Region::Box { lower: vec![-2.0, -2.0], upper: vec![2.0, 2.0] },
        margin: 0.1,
        uncertainty_set: None,
    };
    let scenarios: Vec<Vec<f64>> = (0..200)
        .map(|i| {
            let t = i as f64 * 0.1;
            vec![t.sin(), t.cos()]
        })
        .collect();
    let mut g = c.benchmark_group("solver");
    g.sample_size(10);
    g.bench_function("two_dim_200_scenarios", |b| {
        b.iter(|| solve_margin_program(&program, &scenarios, SolveMode::Optimize))
    });
    g.finish();
}

criterion_group!(benches, closed_forms, simulation, estimators, solver);
criterion_main!(benches);
