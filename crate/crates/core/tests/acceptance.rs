//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p seqrisk-core --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use seqrisk::bounds::{
    binomial_quarter_lemma_holds, chaining_rad_upper_optimal, class_rad_upper, concentration_tail,
    mixing_reference_bound, rademacher_risk_bound, vc_bound, vc_relative_bound, Capacity, MixingOutcome,
    MomentInput, RadFamily, RademacherVariant, TailKind,
};
use seqrisk::classes::{covering_number_exhaustive, Kernel, PseudoMetricSample};
use seqrisk::estimators::{empirical_rademacher, rademacher_sup, verify_symmetrization};
use seqrisk::scenario::{
    plan_n_margin, plan_n_vc, violation_bound, ConstraintPiece, Region, ScenarioProgramSpec, ViolationParams,
};
use seqrisk::validation::{
    margin_rademacher_coverage, relative_coverage, scenario_coverage, vc_coverage, CoverageSettings,
};
use seqrisk::{FunctionClassDescriptor, LossSpec, ProcessSpec, Result};

const SEED: u64 = 20_240_601;

fn ar1(b_star: f64, flip_p: f64) -> ProcessSpec {
    ProcessSpec::Ar1Threshold { a: 0.8, sigma: 0.6, b_star, flip_p }
}

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn example_ceiling() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut detail = String::new();
    for d in 3..=10usize {
        let slack = vc_bound(0.0, 100_000, Capacity::VcDim(d + 1), 0.05)?.bound_value;
        let ceiling = 0.031 * ((d + 1) as f64).sqrt() + 0.015;
        worst = worst.min(ceiling - slack);
        if d == 3 {
            detail = format!("d=3 slack {slack:.4} vs ceiling {ceiling:.4}");
        }
    }
    Ok((worst > 0.0, format!("{detail}; smallest margin over d=3..10: {worst:.4}")))
}

fn vc_cov() -> Outcome {
    let settings = CoverageSettings { n: 2000, delta: 0.05, replications: 200, seed: SEED };
    let rep = vc_coverage(&ar1(0.25, 0.1), settings)?;
    let max_stat = rep.records.iter().map(|r| r.statistic).fold(f64::NEG_INFINITY, f64::max);
    Ok((
        rep.failure_rate() <= 0.05,
        format!(
            "exceedance {:.3} over {} replications (max deviation {:.4}, slack {:.4})",
            rep.failure_rate(),
            rep.records.len(),
            max_stat,
            rep.records[0].bound
        ),
    ))
}

fn fast_rate() -> Outcome {
    let settings = CoverageSettings { n: 2000, delta: 0.05, replications: 200, seed: SEED + 1 };
    let rep = relative_coverage(&ar1(0.25, 0.0), settings)?;
    let ns = [500usize, 2000, 8000];
    let bounds = ns
        .iter()
        .map(|&n| Ok(vc_relative_bound(0.0, n, Capacity::VcDim(1), 0.05, true)?.bound_value))
        .collect::<Result<Vec<_>>>()?;
    let law = |n: usize| (n as f64).ln() / n as f64;
    let ratios: Vec<f64> = (0..2)
        .map(|i| (bounds[i + 1] / bounds[i]) / (law(ns[i + 1]) / law(ns[i])))
        .collect();
    let scaling = ratios.iter().all(|r| (r - 1.0).abs() <= 0.2);
    Ok((
        rep.coverage >= 0.95 && scaling,
        format!(
            "coverage {:.3}; zero-error bounds {:.5}/{:.5}/{:.5}, ratio to log n/n law {:.3}, {:.3}",
            rep.coverage, bounds[0], bounds[1], bounds[2], ratios[0], ratios[1]
        ),
    ))
}

fn rademacher_machinery() -> Outcome {
    let mut rng = common::rng(SEED + 2);
    // (a) closed form against the Gram-matrix supremum for every sign vector
    let mut max_rel = 0.0f64;
    let mut mc_ok = true;
    for trial in 0..20 {
        let n = 1 + trial % 12;
        let dim = 1 + trial % 3;
        let lambda = rng.random_range(0.5..3.0);
        let points: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let class = FunctionClassDescriptor::linear_ball(dim, lambda, false)?;
        let mut exact = 0.0;
        for signs in common::all_signs(n) {
            let lib = rademacher_sup(&class, &points, &signs)?;
            let oracle = common::gram_linear_sup(&points, lambda, &signs);
            max_rel = max_rel.max((lib - oracle).abs() / oracle.max(1e-300));
            exact += oracle;
        }
        exact /= (1u64 << n) as f64;
        let est = empirical_rademacher(&class, &points, 2000, SEED + trial as u64)?;
        mc_ok &= est.within(exact, 3.0) || (est.value - exact).abs() < 1e-12;
    }
    let part_a = max_rel < 1e-12 && mc_ok;

    // (b) Gaussian-kernel ball against 4 M Lambda / sqrt(n)
    let mut part_b = true;
    let mut worst_ratio = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(5..60);
        let bandwidth = rng.random_range(0.2..3.0);
        let lambda = rng.random_range(0.5..2.0);
        let points: Vec<Vec<f64>> = (0..n).map(|_| (0..2).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let class = FunctionClassDescriptor::kernel_ball(Kernel::Gaussian { bandwidth }, lambda)?;
        let est = empirical_rademacher(&class, &points, 400, rng.random())?;
        let bound = class_rad_upper(RadFamily::KernelGaussian { m: 1.0, lambda }, MomentInput::SupNorm(1.0), n)?;
        worst_ratio = worst_ratio.max(est.value / bound);
        part_b &= est.value <= bound;
    }

    // (c) marginal bound coverage for margin classifiers
    let settings = CoverageSettings { n: 2000, delta: 0.05, replications: 200, seed: SEED + 3 };
    let rep = margin_rademacher_coverage(&ar1(0.0, 0.1), 0.5, 2.0, settings)?;
    let part_c = rep.coverage >= 0.95;
    Ok((
        part_a && part_b && part_c,
        format!(
            "(a) max rel. gap {max_rel:.1e}, MC within 3 se: {mc_ok}; (b) max estimate/bound {worst_ratio:.3}; (c) coverage {:.3}",
            rep.coverage
        ),
    ))
}

fn concentration_oracles() -> Outcome {
    let mut hoeffding_ok = true;
    let mut checked = 0usize;
    for n in 1..=30u64 {
        let widths = vec![1.0; n as usize];
        for pi in 1..100 {
            let p = pi as f64 / 100.0;
            for ei in 1..=100 {
                let eps = ei as f64 / 100.0;
                // P(mean - p >= eps): smallest integer k with k >= n (p + eps)
                let k_min = ((n as f64) * (p + eps) - 1e-9).ceil().max(0.0) as u64;
                let exact = if k_min > n { 0.0 } else { common::binomial_tail(n, k_min, p) };
                let bound = concentration_tail(TailKind::Hoeffding, &widths, eps)?;
                hoeffding_ok &= exact <= bound * (1.0 + 1e-12);
                checked += 1;
            }
        }
    }
    let mut lemma_ok = true;
    let mut cases = 0usize;
    let mut smallest = f64::INFINITY;
    for m in 1..=50u64 {
        for k in 1..=100u64 {
            if k * m <= 100 {
                continue;
            }
            let p = k as f64 / 100.0;
            let k_min = (m * k).div_ceil(100);
            let exact = common::binomial_tail(m, k_min, p);
            smallest = smallest.min(exact);
            lemma_ok &= binomial_quarter_lemma_holds(m, p)? && exact > 0.25;
            cases += 1;
        }
    }
    Ok((
        hoeffding_ok && lemma_ok,
        format!("{checked} Hoeffding cells, {cases} lemma cases (smallest P(X >= mp) = {smallest:.4})"),
    ))
}

fn symmetrization() -> Outcome {
    let check = verify_symmetrization(
        &FunctionClassDescriptor::threshold1d(),
        &LossSpec::zero_one(),
        &ar1(0.25, 0.1),
        200,
        0.2,
        500,
        SEED + 4,
    )?;
    Ok((
        check.holds,
        format!(
            "lhs {:.3} <= 2 x rhs {:.3} + 3 x {:.4}",
            check.lhs_freq, check.rhs_freq, check.combined_std_error
        ),
    ))
}

fn planners() -> Outcome {
    let vc = plan_n_vc(0.1, 1e-6, 5)?;
    let margin = plan_n_margin(0.1, (-1.0f64).exp(), 1.0, 1.0)?;
    let mut consistent = true;
    let mut worst = 0.0f64;
    for eps in [0.05, 0.1, 0.2] {
        for delta in [0.1, 0.01, 1e-6] {
            for d in 1..=10 {
                let n = plan_n_vc(eps, delta, d)?;
                let b = violation_bound(ViolationParams::Vc { d_vc: d }, n, delta)?;
                worst = worst.max(b / eps);
                consistent &= b <= eps;
            }
            for gamma in [0.1, 0.5, 1.0] {
                for sum in [0.5, 1.0, 10.0] {
                    let n = plan_n_margin(eps, delta, gamma, sum)?;
                    let b = violation_bound(ViolationParams::Margin { gamma, tau_lambda_sum: sum }, n, delta)?;
                    worst = worst.max(b / eps);
                    consistent &= b <= eps;
                }
            }
        }
    }
    Ok((
        vc == 2258 && margin == 900 && consistent,
        format!("plan_n_vc = {vc}, plan_n_margin = {margin}, largest bound/eps on grid {worst:.4}"),
    ))
}

fn scenario_pac() -> Outcome {
    let program = ScenarioProgramSpec {
        objective: vec![1.0],
        pieces: vec![ConstraintPiece {
            psi_linear: vec![vec![0.0]],
            psi_offset: vec![-1.0],
            eta_linear: vec![1.0],
            eta_offset: 0.0,
        }],
        feasible_set: Region::Box { lower: vec![-10.0], upper: vec![10.0] },
        margin: 0.1,
        uncertainty_set: None,
    };
    let (eps, delta, reps) = (0.15, 0.1, 200);
    let rep = scenario_coverage(&program, &ar1(0.0, 0.0), eps, delta, reps, 10_000, SEED + 5)?;
    let ceiling = delta + 3.0 * (delta * (1.0 - delta) / reps as f64).sqrt();
    let max_rate = rep.records.iter().map(|r| r.statistic).fold(0.0, f64::max);
    Ok((
        rep.failure_rate() <= ceiling,
        format!(
            "n = {} per replication, exceedance {:.3} <= {ceiling:.3} (max violation rate {max_rate:.4})",
            rep.n,
            rep.failure_rate()
        ),
    ))
}

fn mixing_tightness() -> Outcome {
    let mut strictly_smaller = true;
    let mut applicable = 0usize;
    let mut certain_inapplicable = true;
    for beta in [1e-3, 1e-4] {
        for n in [1000usize, 10_000, 100_000] {
            for a in [1usize, 5, 25] {
                let mu = n / (2 * a);
                for emp in [0.0, 0.1] {
                    for rad in [0.01, 0.05] {
                        for delta in [0.5, 0.1, 0.05] {
                            let marginal =
                                rademacher_risk_bound(RademacherVariant::Marginal { r_bar: rad }, emp, 1.0, n, delta)?;
                            if let MixingOutcome::Applicable(mix) =
                                mixing_reference_bound(emp, rad, 1.0, mu, a, beta, delta)?
                            {
                                applicable += 1;
                                strictly_smaller &= marginal.bound_value < mix.bound_value;
                            }
                        }
                        let certain = mixing_reference_bound(emp, rad, 1.0, mu, a, beta, 1e-9)?;
                        certain_inapplicable &= matches!(certain, MixingOutcome::Inapplicable { .. });
                    }
                }
            }
        }
    }
    Ok((
        strictly_smaller && certain_inapplicable && applicable > 0,
        format!("{applicable} applicable cells, marginal strictly smaller: {strictly_smaller}; delta=1e-9 inapplicable everywhere: {certain_inapplicable}"),
    ))
}

fn chaining_dominance() -> Outcome {
    let mut rng = common::rng(SEED + 6);
    let mut ok = true;
    let mut tightest = f64::INFINITY;
    for trial in 0..50u64 {
        let m = rng.random_range(2..=12);
        let n = rng.random_range(4..=40);
        let values = common::random_finite_values(&mut rng, m, n, trial % 2 == 0);
        let grid: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let points: Vec<Vec<f64>> = grid.iter().map(|&g| vec![g]).collect();
        let class = FunctionClassDescriptor::finite(grid, values.clone())?;
        let est = empirical_rademacher(&class, &points, 2000, SEED + 100 + trial)?;
        let sample = PseudoMetricSample::from_evaluations(points, values)?;
        let diameter = sample.diameter();
        let log_cover = |eps: f64| {
            covering_number_exhaustive(&sample, eps).map(|c| (c as f64).ln()).unwrap_or(f64::NAN)
        };
        let (_, chain) = chaining_rad_upper_optimal(diameter, &log_cover, n, 1.0)?;
        let floor = est.value - 3.0 * est.std_error;
        tightest = tightest.min(chain - floor);
        ok &= chain >= floor;
    }
    Ok((ok, format!("50 instances, smallest chaining - (estimate - 3 se) = {tightest:.4}")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("VC bound accuracy ceiling at n = 1e5", example_ceiling),
        ("VC coverage, thresholds on ar1", vc_cov),
        ("relative-deviation coverage and log n / n rate", fast_rate),
        ("Rademacher machinery", rademacher_machinery),
        ("concentration oracles", concentration_oracles),
        ("symmetrization check", symmetrization),
        ("scenario planners", planners),
        ("scenario PAC coverage", scenario_pac),
        ("marginal bound vs mixing reference", mixing_tightness),
        ("chaining dominance", chaining_dominance),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(out) => out,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {name}: {detail} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
