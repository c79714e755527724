//! Replicated coverage experiments.
//!
//! Each experiment draws independent replications, computes a statistic that
//! a bound controls with probability at least `1 - delta`, and records
//! whether the bound held. The acceptance suite and the CLI both run these.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    class_rad_upper, rademacher_risk_bound, vc_bound, vc_relative_bound, Capacity, MomentInput, RadFamily,
    RademacherVariant,
};
use crate::classes::FunctionClassDescriptor;
use crate::error::{check_delta, check_positive, Error, Result};
use crate::estimators::{analytic_zero_one_risk, sup_deviation, sup_penalized_deviation, violation_rate};
use crate::losses::{margin_loss, LossSpec};
use crate::processes::{sample_marginal, simulate_sequence, stationary_params, MarginalLaw, ProcessSpec, ScalarLaw};
use crate::rng::replication_seed;
use crate::scenario::{certify, CertifyMethod, ScenarioProgramSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub replication: usize,
    pub seed: u64,
    pub statistic: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub experiment: String,
    pub n: usize,
    pub delta: f64,
    pub seed: u64,
    /// Fraction of replications where the bound held.
    pub coverage: f64,
    pub failures: usize,
    pub records: Vec<ReplicationRecord>,
}

impl CoverageReport {
    fn from_records(experiment: String, n: usize, delta: f64, seed: u64, records: Vec<ReplicationRecord>) -> Self {
        let failures = records.iter().filter(|r| !r.holds).count();
        Self {
            coverage: 1.0 - failures as f64 / records.len() as f64,
            experiment,
            n,
            delta,
            seed,
            failures,
            records,
        }
    }

    pub fn failure_rate(&self) -> f64 {
        1.0 - self.coverage
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageSettings {
    pub n: usize,
    pub delta: f64,
    pub replications: usize,
    pub seed: u64,
}

impl CoverageSettings {
    fn check(&self) -> Result<()> {
        check_delta(self.delta)?;
        if self.n == 0 || self.replications == 0 {
            return Err(Error::param("n, replications", "must both be >= 1"));
        }
        Ok(())
    }

    /// Runs `stat` for every replication in parallel; `stat` receives the
    /// replication seed and returns `(statistic, bound)`.
    fn run<F>(&self, experiment: String, stat: F) -> Result<CoverageReport>
    where
        F: Fn(u64) -> Result<(f64, f64)> + Sync,
    {
        self.check()?;
        let records = (0..self.replications)
            .into_par_iter()
            .map(|r| {
                let seed = replication_seed(self.seed, r as u64);
                let (statistic, bound) = stat(seed)?;
                Ok(ReplicationRecord {
                    replication: r,
                    seed,
                    statistic,
                    bound,
                    holds: statistic <= bound,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CoverageReport::from_records(experiment, self.n, self.delta, self.seed, records))
    }
}

/// Thresholds with zero-one loss on a threshold-labelled process: statistic
/// `sup_b L(b) - L_hat(b)`, bound the VC slack with `d = 1`.
pub fn vc_coverage(spec: &ProcessSpec, settings: CoverageSettings) -> Result<CoverageReport> {
    let class = FunctionClassDescriptor::threshold1d();
    let loss = LossSpec::zero_one();
    let risk = analytic_zero_one_risk(&class, spec)?;
    settings.check()?;
    let slack = vc_bound(0.0, settings.n, Capacity::VcDim(1), settings.delta)?.bound_value;
    settings.run(format!("vc coverage on {}", spec.id()), |seed| {
        let path = simulate_sequence(spec, settings.n, seed)?;
        let (_, dev) = sup_deviation(&class, &loss, &path, &|h| risk(h))?;
        Ok((dev, slack))
    })
}

/// Relative-deviation bound for thresholds: the bound holds on a replication
/// when `L(b) <= L_hat(b) + 2 sqrt(L_hat(b) c) + 4c` for every `b`. The
/// statistic is `sup_b L - L_hat - 2 sqrt(L_hat c)` and the bound `4c`.
pub fn relative_coverage(spec: &ProcessSpec, settings: CoverageSettings) -> Result<CoverageReport> {
    let class = FunctionClassDescriptor::threshold1d();
    let loss = LossSpec::zero_one();
    let risk = analytic_zero_one_risk(&class, spec)?;
    settings.check()?;
    let zero = vc_relative_bound(0.0, settings.n, Capacity::VcDim(1), settings.delta, spec.is_stationary())?;
    // at zero empirical risk the bound is exactly 4c
    let c = zero.bound_value / 4.0;
    settings.run(format!("relative-deviation coverage on {}", spec.id()), |seed| {
        let path = simulate_sequence(spec, settings.n, seed)?;
        let (_, dev) = sup_penalized_deviation(&class, &loss, &path, &|h| risk(h), &|emp| 2.0 * (emp * c).sqrt())?;
        Ok((dev, 4.0 * c))
    })
}

/// Points of the weight grid used by [`margin_rademacher_coverage`].
pub const MARGIN_WEIGHT_GRID: usize = 401;
/// Simpson intervals per side of the label threshold.
const QUADRATURE_INTERVALS: usize = 4000;

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let m = intervals + intervals % 2;
    let h = (b - a) / m as f64;
    let mut sum = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Margin risk `E l_gamma(Y w X)` of the score `x -> w x` under a
/// threshold-labelled Gaussian marginal, by Simpson quadrature on either side
/// of the label threshold.
pub fn linear_margin_risk(law: &MarginalLaw, gamma: f64, w: f64) -> Result<f64> {
    let MarginalLaw::ThresholdLabeled { input: ScalarLaw::Normal { mean, variance }, b_star, flip_p } = law else {
        return Err(Error::Unsupported("margin risk quadrature needs a Gaussian threshold-labelled input".into()));
    };
    let sd = variance.sqrt();
    let density = |x: f64| (-(x - mean) * (x - mean) / (2.0 * variance)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
    let integrand = |x: f64, label: f64| {
        density(x) * ((1.0 - flip_p) * margin_loss(gamma, label * w * x) + flip_p * margin_loss(gamma, -label * w * x))
    };
    let lo = mean - 12.0 * sd;
    let hi = mean + 12.0 * sd;
    let split = b_star.clamp(lo, hi);
    Ok(simpson(|x| integrand(x, -1.0), lo, split, QUADRATURE_INTERVALS)
        + simpson(|x| integrand(x, 1.0), split, hi, QUADRATURE_INTERVALS))
}

/// Margin classifiers `x -> w x`, `|w| <= lambda`, on a scalar Gaussian
/// threshold-labelled process. Statistic: `max_w L_gamma(w) - L_hat_gamma(w)`
/// over an evenly spaced grid of weights; bound: the marginal Rademacher
/// slack with the closed-form complexity `lambda sqrt(n E X^2) / (gamma n)`.
pub fn margin_rademacher_coverage(
    spec: &ProcessSpec,
    gamma: f64,
    lambda: f64,
    settings: CoverageSettings,
) -> Result<CoverageReport> {
    check_positive("gamma", gamma)?;
    check_positive("lambda", lambda)?;
    settings.check()?;
    let law = stationary_params(spec)?;
    let MarginalLaw::ThresholdLabeled { input, .. } = &law else {
        return Err(Error::Unsupported("margin experiment needs a threshold-labelled process".into()));
    };
    let second_moment = input.variance() + input.mean() * input.mean();
    let n = settings.n;
    let r_bar = class_rad_upper(
        RadFamily::MarginLinear { lambda, gamma },
        MomentInput::SumSquaredNorms(n as f64 * second_moment),
        n,
    )?;
    let slack = rademacher_risk_bound(RademacherVariant::Marginal { r_bar }, 0.0, 1.0, n, settings.delta)?.bound_value;
    let weights: Vec<f64> = (0..MARGIN_WEIGHT_GRID)
        .map(|i| -lambda + 2.0 * lambda * i as f64 / (MARGIN_WEIGHT_GRID - 1) as f64)
        .collect();
    let risks = weights
        .iter()
        .map(|&w| linear_margin_risk(&law, gamma, w))
        .collect::<Result<Vec<_>>>()?;
    settings.run(format!("marginal rademacher coverage on {}", spec.id()), |seed| {
        let path = simulate_sequence(spec, n, seed)?;
        let mut worst = f64::NEG_INFINITY;
        for (&w, &risk) in weights.iter().zip(&risks) {
            let emp = path.iter().map(|(x, y)| margin_loss(gamma, y * w * x[0])).sum::<f64>() / n as f64;
            worst = worst.max(risk - emp);
        }
        Ok((worst, slack))
    })
}

/// Certifies the program on `replications` independent scenario paths and
/// measures each solution's violation rate on `draws` fresh marginal draws.
/// Statistic: violation rate; bound: `epsilon`. Infeasible replications are
/// recorded with an infinite statistic.
pub fn scenario_coverage(
    program: &ScenarioProgramSpec,
    spec: &ProcessSpec,
    epsilon: f64,
    delta: f64,
    replications: usize,
    draws: usize,
    seed: u64,
) -> Result<CoverageReport> {
    if draws == 0 {
        return Err(Error::param("draws", "must be >= 1"));
    }
    let method = CertifyMethod::Margin;
    let settings = CoverageSettings { n: 0, delta, replications, seed };
    check_delta(delta)?;
    let records = (0..replications)
        .into_par_iter()
        .map(|r| {
            let rep = replication_seed(seed, r as u64);
            let cert = certify(program, spec, epsilon, delta, method, rep)?;
            let statistic = if cert.feasible {
                violation_rate(&cert.theta_hat, program, &sample_marginal(spec, draws, rep)?)?
            } else {
                f64::INFINITY
            };
            Ok((
                cert.n_used,
                ReplicationRecord {
                    replication: r,
                    seed: rep,
                    statistic,
                    bound: epsilon,
                    holds: statistic <= epsilon,
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = records.first().map_or(0, |r| r.0);
    let records = records.into_iter().map(|r| r.1).collect();
    Ok(CoverageReport::from_records(
        format!("scenario coverage on {}", spec.id()),
        n,
        settings.delta,
        seed,
        records,
    ))
}
