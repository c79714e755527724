use serde::{Deserialize, Serialize};

use super::{tags, RiskBoundReport};
use crate::error::{check_delta, check_non_negative, check_positive, Error, Result};

/// Capacity of a classifier class for VC-type bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Capacity {
    /// VC dimension; `log Pi(2n)` is replaced by `d log(2 e n / d)`.
    VcDim(usize),
    /// Explicit value of the growth function at `2n`.
    Growth(f64),
}

impl Capacity {
    /// The capacity term standing in for `log Pi(2n)`.
    fn log_growth(&self, n: usize) -> Result<f64> {
        match *self {
            Capacity::VcDim(d) => {
                if d == 0 {
                    return Err(Error::param("d_vc", "must be >= 1"));
                }
                if n < d {
                    return Err(Error::param("n", format!("must be >= d_vc = {d}, got {n}")));
                }
                let (d, n) = (d as f64, n as f64);
                Ok(d * (2.0 * std::f64::consts::E * n / d).ln())
            }
            Capacity::Growth(g) => {
                if !(g >= 1.0) {
                    return Err(Error::param("growth", format!("must be >= 1, got {g}")));
                }
                Ok(g.ln())
            }
        }
    }
}

fn check_common(emp_risk: f64, n: usize, delta: f64) -> Result<()> {
    check_delta(delta)?;
    check_non_negative("emp_risk", emp_risk)?;
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    Ok(())
}

/// `emp + 2 sqrt(2 (log Pi(2n) + log(2/delta)) / n)`, valid for any
/// dependent sequence.
pub fn vc_bound(emp_risk: f64, n: usize, capacity: Capacity, delta: f64) -> Result<RiskBoundReport> {
    scaled_vc(tags::VC_BASIC, emp_risk, n, capacity, delta, 1.0)
}

fn scaled_vc(
    tag: &str,
    emp_risk: f64,
    n: usize,
    capacity: Capacity,
    delta: f64,
    scale: f64,
) -> Result<RiskBoundReport> {
    check_common(emp_risk, n, delta)?;
    let log_growth = capacity.log_growth(n)?;
    let conf = (2.0 / delta).ln();
    let nf = n as f64;
    let slack = scale * 2.0 * (2.0 * (log_growth + conf) / nf).sqrt();
    let concentration = scale * 2.0 * (2.0 * conf / nf).sqrt();
    Ok(RiskBoundReport::new(
        tag,
        n,
        delta,
        emp_risk,
        (slack - concentration).max(0.0),
        concentration,
    ))
}

/// Fast-rate bound `emp + 2 sqrt(emp c) + 4 c` with
/// `c = (log Pi(2n) + log(4/delta)) / n`. Requires a stationary sequence.
pub fn vc_relative_bound(
    emp_risk: f64,
    n: usize,
    capacity: Capacity,
    delta: f64,
    stationary: bool,
) -> Result<RiskBoundReport> {
    if !stationary {
        return Err(Error::HypothesisViolated(
            "the relative-deviation bound holds only for stationary sequences".into(),
        ));
    }
    check_common(emp_risk, n, delta)?;
    let nf = n as f64;
    let conf = (4.0 / delta).ln();
    let c = (capacity.log_growth(n)? + conf) / nf;
    let c0 = conf / nf;
    let slack = 2.0 * (emp_risk * c).sqrt() + 4.0 * c;
    let concentration = 2.0 * (emp_risk * c0).sqrt() + 4.0 * c0;
    Ok(RiskBoundReport::new(
        tags::VC_RELATIVE,
        n,
        delta,
        emp_risk,
        (slack - concentration).max(0.0),
        concentration,
    ))
}

/// Regression risk bound for a loss bounded by `range_b`, through the VC
/// dimension `d_vc_induced` of the thresholded loss class.
pub fn regression_vc_bound(
    emp_risk: f64,
    n: usize,
    d_vc_induced: usize,
    delta: f64,
    range_b: f64,
) -> Result<RiskBoundReport> {
    check_positive("B", range_b)?;
    scaled_vc(
        tags::VC_REGRESSION,
        emp_risk,
        n,
        Capacity::VcDim(d_vc_induced),
        delta,
        range_b,
    )
}

/// VC dimension bound `d^2 + d + 2` of the thresholded squared losses of
/// linear predictors on R^d.
pub fn linear_system_induced_vc(d: usize) -> usize {
    d * d + d + 2
}
