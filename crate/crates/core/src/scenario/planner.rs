use serde::{Deserialize, Serialize};

use crate::error::{check_delta, check_positive, Error, Result};

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::param("epsilon", format!("must lie in (0, 1), got {epsilon}")))
    }
}

fn ceil_to_count(value: f64) -> Result<usize> {
    if !value.is_finite() || value > usize::MAX as f64 {
        return Err(Error::param("sample size", format!("{value} is not representable")));
    }
    Ok((value.ceil() as usize).max(1))
}

/// `ceil((5/eps) (d log(40/eps) + log(4/delta)))`.
pub fn plan_n_vc(epsilon: f64, delta: f64, d_vc: usize) -> Result<usize> {
    check_epsilon(epsilon)?;
    check_delta(delta)?;
    if d_vc == 0 {
        return Err(Error::param("d_vc", "must be >= 1"));
    }
    let d = d_vc as f64;
    ceil_to_count(5.0 / epsilon * (d * (40.0 / epsilon).ln() + (4.0 / delta).ln()))
}

/// `ceil((1/eps^2) ((2/gamma) sum_k tau_k Lambda_k + sqrt(log(1/delta)))^2)`.
/// `gamma = +inf` gives the limit `ceil(log(1/delta) / eps^2)`.
pub fn plan_n_margin(epsilon: f64, delta: f64, gamma: f64, tau_lambda_sum: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    check_delta(delta)?;
    if !(gamma > 0.0) {
        return Err(Error::param("gamma", format!("must be > 0, got {gamma}")));
    }
    check_positive("tau_lambda_sum", tau_lambda_sum)?;
    let root = 2.0 / gamma * tau_lambda_sum + (1.0 / delta).ln().sqrt();
    ceil_to_count(root * root / (epsilon * epsilon))
}

/// Parameters of the two violation-probability bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum ViolationParams {
    Vc { d_vc: usize },
    Margin { gamma: f64, tau_lambda_sum: f64 },
}

/// Upper bound on `P(f(X, theta_hat) > 0)` holding with probability
/// `1 - delta` for any feasible `theta_hat` computed from `n` scenarios:
///
/// * vc: `(4 d log(2 e n / d) + log(4/delta)) / n`
/// * margin: `(2/gamma) sum_k tau_k Lambda_k / sqrt(n) + sqrt(log(1/delta) / 2n)`
pub fn violation_bound(params: ViolationParams, n: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    let nf = n as f64;
    match params {
        ViolationParams::Vc { d_vc } => {
            if d_vc == 0 {
                return Err(Error::param("d_vc", "must be >= 1"));
            }
            let d = d_vc as f64;
            let growth = (2.0 * std::f64::consts::E * nf / d).ln().max(0.0);
            Ok((4.0 * d * growth + (4.0 / delta).ln()) / nf)
        }
        ViolationParams::Margin { gamma, tau_lambda_sum } => {
            check_positive("gamma", gamma)?;
            check_positive("tau_lambda_sum", tau_lambda_sum)?;
            Ok(2.0 / gamma * tau_lambda_sum / nf.sqrt() + ((1.0 / delta).ln() / (2.0 * nf)).sqrt())
        }
    }
}
