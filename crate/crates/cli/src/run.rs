use serde::Serialize;
use serde_json::{json, Value};

use seqrisk::bounds::{
    chaining_rad_upper_optimal, class_rad_upper, mixing_reference_bound, rademacher_risk_bound,
    regression_vc_bound, spectral_log_covering, vc_bound, vc_relative_bound, RademacherVariant,
};
use seqrisk::estimators::{empirical_rademacher, verify_symmetrization};
use seqrisk::processes::simulate_sequence;
use seqrisk::scenario::{certify, plan_n_margin, plan_n_vc, violation_bound, ViolationParams};
use seqrisk::validation::{
    margin_rademacher_coverage, relative_coverage, scenario_coverage, vc_coverage, CoverageReport,
    CoverageSettings, ReplicationRecord,
};
use seqrisk::{FunctionClassDescriptor, LossSpec, SequenceSample};

use crate::config::{
    build_class, BoundConfig, BoundKind, Command, Experiment, ExperimentConfig, PlanConfig, ValidateConfig,
};
use crate::CliError;

/// Everything a run produces, before anything touches the disk.
#[derive(Debug)]
pub struct Outcome {
    pub result: Value,
    pub records: Option<Vec<ReplicationRecord>>,
    /// Sweep variable per record, when the records form a sweep.
    pub sweep: Option<Vec<f64>>,
    pub sequence: Option<SequenceSample>,
    /// `Some(false)` when an experiment's acceptance property failed.
    pub property_holds: Option<bool>,
}

impl Outcome {
    fn value(result: impl Serialize) -> Result<Self, CliError> {
        Ok(Self {
            result: to_value(result)?,
            records: None,
            sweep: None,
            sequence: None,
            property_holds: None,
        })
    }
}

fn to_value(v: impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Config(format!("cannot encode result: {e}")))
}

pub fn execute(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let seed = config.seed;
    match &config.command {
        Command::Plan(p) => plan(p),
        Command::Bound(b) => bound(b, seed),
        Command::Simulate(s) => {
            let path = simulate_sequence(&s.process, s.n, seed)?;
            let mut out = Outcome::value(json!({
                "n": path.len(),
                "dim": path.dim,
                "mean_y": path.iter().map(|(_, y)| y).sum::<f64>() / path.len() as f64,
            }))?;
            out.sequence = Some(path);
            Ok(out)
        }
        Command::Rad(r) => {
            let class = build_class(&r.class)?;
            let path = simulate_sequence(&r.process, r.n, seed)?;
            let estimate = empirical_rademacher(&class, &path.inputs(), r.sign_draws, seed)?;
            Outcome::value(json!({ "n": r.n, "estimate": estimate }))
        }
        Command::Validate(v) => validate(v, seed),
        Command::Scenario(s) => {
            let cert = certify(&s.program, &s.process, s.epsilon, s.delta, s.method, seed)?;
            Outcome::value(cert)
        }
    }
}

fn plan(p: &PlanConfig) -> Result<Outcome, CliError> {
    let n = match p.params {
        ViolationParams::Vc { d_vc } => plan_n_vc(p.epsilon, p.delta, d_vc)?,
        ViolationParams::Margin { gamma, tau_lambda_sum } => plan_n_margin(p.epsilon, p.delta, gamma, tau_lambda_sum)?,
    };
    let bound_at_n = violation_bound(p.params, n, p.delta)?;
    Outcome::value(json!({ "n": n, "violation_bound_at_n": bound_at_n }))
}

fn bound(b: &BoundConfig, seed: u64) -> Result<Outcome, CliError> {
    if b.n.is_empty() {
        return Err(CliError::Config("bound.n must list at least one sample size".into()));
    }
    let mut results = Vec::with_capacity(b.n.len());
    let mut records = Vec::with_capacity(b.n.len());
    for (i, &n) in b.n.iter().enumerate() {
        let (value, stat_bound) = bound_at(&b.bound, n, b.delta)?;
        if let Some((statistic, bound)) = stat_bound {
            records.push(ReplicationRecord { replication: i, seed, statistic, bound, holds: statistic <= bound });
        }
        results.push(json!({ "n": n, "result": value }));
    }
    let sweep = Some(records.iter().map(|r| b.n[r.replication] as f64).collect());
    Ok(Outcome {
        result: Value::Array(results),
        records: Some(records),
        sweep,
        sequence: None,
        property_holds: None,
    })
}

/// The JSON result at one `n`, and `(empirical risk, bound value)` when the
/// bound applies.
fn bound_at(kind: &BoundKind, n: usize, delta: f64) -> Result<(Value, Option<(f64, f64)>), CliError> {
    let report = match *kind {
        BoundKind::Vc { emp_risk, capacity } => vc_bound(emp_risk, n, capacity, delta)?,
        BoundKind::VcRelative { emp_risk, capacity, stationary } => {
            vc_relative_bound(emp_risk, n, capacity, delta, stationary)?
        }
        BoundKind::Regression { emp_risk, d_vc, range_b } => regression_vc_bound(emp_risk, n, d_vc, delta, range_b)?,
        BoundKind::Rademacher { emp_risk, range_b, variant } => {
            rademacher_risk_bound(variant, emp_risk, range_b, n, delta)?
        }
        BoundKind::RademacherClass { emp_risk, range_b, family, moment } => {
            let r_bar = class_rad_upper(family, moment, n)?;
            rademacher_risk_bound(RademacherVariant::Marginal { r_bar }, emp_risk, range_b, n, delta)?
        }
        BoundKind::Mixing { emp_risk, rad_mu, range_b, a, beta_a } => {
            if a == 0 || n < 2 * a {
                return Err(CliError::Config(format!("mixing bound needs 1 <= a <= n/2, got a = {a}, n = {n}")));
            }
            let outcome = mixing_reference_bound(emp_risk, rad_mu, range_b, n / (2 * a), a, beta_a, delta)?;
            let pair = outcome.report().map(|r| (r.empirical_risk_term, r.bound_value));
            return Ok((to_value(outcome)?, pair));
        }
        BoundKind::Chaining { diameter, a, sum_sq_norms, lipschitz } => {
            let log_cover = spectral_log_covering(a, sum_sq_norms)?;
            let (depth, value) = chaining_rad_upper_optimal(diameter, &log_cover, n, lipschitz)?;
            return Ok((json!({ "depth": depth, "rademacher_upper": value }), Some((0.0, value))));
        }
    };
    let pair = (report.empirical_risk_term, report.bound_value);
    Ok((to_value(report)?, Some(pair)))
}

fn validate(v: &ValidateConfig, seed: u64) -> Result<Outcome, CliError> {
    let settings = CoverageSettings { n: v.n, delta: v.delta, replications: v.replications, seed };
    let report = match &v.experiment {
        Experiment::Vc => vc_coverage(&v.process, settings)?,
        Experiment::Relative => relative_coverage(&v.process, settings)?,
        Experiment::Margin { gamma, lambda } => margin_rademacher_coverage(&v.process, *gamma, *lambda, settings)?,
        Experiment::Symmetrization { epsilon } => {
            let check = verify_symmetrization(
                &FunctionClassDescriptor::threshold1d(),
                &LossSpec::zero_one(),
                &v.process,
                v.n,
                *epsilon,
                v.replications,
                seed,
            )?;
            let mut out = Outcome::value(&check)?;
            out.property_holds = Some(check.holds);
            return Ok(out);
        }
        Experiment::Scenario { program, epsilon, draws } => {
            let report = scenario_coverage(program, &v.process, *epsilon, v.delta, v.replications, *draws, seed)?;
            // the certificate may fail with probability delta; allow three
            // binomial standard errors of Monte-Carlo noise on top
            let allowance = 3.0 * (v.delta * (1.0 - v.delta) / v.replications as f64).sqrt();
            let holds = report.failure_rate() <= v.delta + allowance;
            return coverage_outcome(report, holds);
        }
    };
    let holds = report.coverage >= 1.0 - v.delta;
    coverage_outcome(report, holds)
}

fn coverage_outcome(report: CoverageReport, holds: bool) -> Result<Outcome, CliError> {
    let result = json!({
        "experiment": report.experiment,
        "n": report.n,
        "delta": report.delta,
        "replications": report.records.len(),
        "holds_fraction": report.coverage,
        "failures": report.failures,
        "property_holds": holds,
    });
    Ok(Outcome {
        result,
        records: Some(report.records),
        sweep: None,
        sequence: None,
        property_holds: Some(holds),
    })
}
