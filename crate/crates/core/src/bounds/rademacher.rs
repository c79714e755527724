use serde::{Deserialize, Serialize};

use super::{tags, RiskBoundReport};
use crate::error::{check_non_negative, check_positive, Error, Result};

/// Which Rademacher terms enter the bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum RademacherVariant {
    /// Complexities of the loss class on the training sample and on the
    /// ghost sample.
    TwoSided { training: f64, ghost: f64 },
    /// Worst-case empirical complexity over all samples.
    WorstCase { sup_empirical: f64 },
    /// Upper bound valid for every sample sharing the marginals.
    Marginal { r_bar: f64 },
}

fn check_delta_closed(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 1.0 {
        Ok(())
    } else {
        Err(Error::param("delta", format!("must lie in (0, 1], got {delta}")))
    }
}

/// `B sqrt(log(1/delta) / 2n)`.
fn concentration(range_b: f64, n: f64, delta: f64) -> f64 {
    range_b * ((1.0 / delta).ln() / (2.0 * n)).sqrt()
}

pub fn rademacher_risk_bound(
    variant: RademacherVariant,
    emp_risk: f64,
    range_b: f64,
    n: usize,
    delta: f64,
) -> Result<RiskBoundReport> {
    check_non_negative("emp_risk", emp_risk)?;
    check_positive("B", range_b)?;
    check_delta_closed(delta)?;
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    let (tag, complexity) = match variant {
        RademacherVariant::TwoSided { training, ghost } => {
            check_non_negative("rademacher term", training)?;
            check_non_negative("rademacher term", ghost)?;
            (tags::RAD_TWO_SIDED, training + ghost)
        }
        RademacherVariant::WorstCase { sup_empirical } => {
            check_non_negative("rademacher term", sup_empirical)?;
            (tags::RAD_WORST_CASE, 2.0 * sup_empirical)
        }
        RademacherVariant::Marginal { r_bar } => {
            check_non_negative("rademacher term", r_bar)?;
            (tags::RAD_MARGINAL, 2.0 * r_bar)
        }
    };
    Ok(RiskBoundReport::new(
        tag,
        n,
        delta,
        emp_risk,
        complexity,
        concentration(range_b, n as f64, delta),
    ))
}

/// Families with closed-form Rademacher upper bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadFamily {
    /// Clipped squared loss of linear predictors with `||w|| <= lambda`.
    Linear { m: f64, lambda: f64 },
    /// Clipped squared loss of a Gaussian-kernel RKHS ball.
    KernelGaussian { m: f64, lambda: f64 },
    /// Margin loss of linear scores with `||w|| <= lambda`.
    MarginLinear { lambda: f64, gamma: f64 },
    /// Nearest-codepoint distortion of `c` codepoints in a ball of radius
    /// `lambda`.
    Vq { c: usize, lambda: f64 },
}

/// How the inputs enter the bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "moment", content = "value", rename_all = "snake_case", deny_unknown_fields)]
pub enum MomentInput {
    /// `sum_i E ||X_i||^2`.
    SumSquaredNorms(f64),
    /// `sup_x ||x||` (worst case over samples).
    SupNorm(f64),
    /// `sum_i E K(X_i, X_i)`.
    SumKernelDiagonal(f64),
}

pub fn class_rad_upper(family: RadFamily, moment: MomentInput, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    let nf = n as f64;
    let moment_value = match moment {
        MomentInput::SumSquaredNorms(v) | MomentInput::SupNorm(v) | MomentInput::SumKernelDiagonal(v) => v,
    };
    check_non_negative("moment", moment_value)?;
    // `feature` is the data-dependent factor of Lambda * sqrt(sum ||x||^2) / n
    // or its worst case Lambda * sup ||x|| / sqrt(n).
    let feature = |kernel_ok: bool, linear_ok: bool| -> Result<f64> {
        match moment {
            MomentInput::SumSquaredNorms(s) if linear_ok => Ok(s.sqrt() / nf),
            MomentInput::SumKernelDiagonal(s) if kernel_ok => Ok(s.sqrt() / nf),
            MomentInput::SupNorm(r) => Ok(r / nf.sqrt()),
            other => Err(Error::Incompatible(format!("{other:?} does not apply to {family:?}"))),
        }
    };
    match family {
        RadFamily::Linear { m, lambda } => {
            check_positive("m", m)?;
            check_positive("lambda", lambda)?;
            Ok(4.0 * m * lambda * feature(false, true)?)
        }
        RadFamily::KernelGaussian { m, lambda } => {
            check_positive("m", m)?;
            check_positive("lambda", lambda)?;
            // K(x, x) = 1 for the Gaussian kernel, so the worst case is 1/sqrt(n)
            let f = match moment {
                MomentInput::SupNorm(_) => 1.0 / nf.sqrt(),
                _ => feature(true, false)?,
            };
            Ok(4.0 * m * lambda * f)
        }
        RadFamily::MarginLinear { lambda, gamma } => {
            check_positive("lambda", lambda)?;
            check_positive("gamma", gamma)?;
            Ok(lambda * feature(true, true)? / gamma)
        }
        RadFamily::Vq { c, lambda } => {
            if c == 0 {
                return Err(Error::param("c", "must be >= 1"));
            }
            check_positive("lambda", lambda)?;
            let c = c as f64;
            Ok(2.0 * c * lambda * feature(false, true)? + c * lambda * lambda / nf.sqrt())
        }
    }
}

/// Result of the beta-mixing reference bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MixingOutcome {
    Applicable(RiskBoundReport),
    /// `delta <= 4 (mu - 1) beta(a)`: the bound says nothing.
    Inapplicable { delta: f64, threshold: f64 },
}

impl MixingOutcome {
    pub fn report(&self) -> Option<&RiskBoundReport> {
        match self {
            MixingOutcome::Applicable(r) => Some(r),
            MixingOutcome::Inapplicable { .. } => None,
        }
    }
}

/// Reference bound for beta-mixing sequences with effective sample size
/// `mu` (the caller is responsible for `n = 2 a mu`):
/// `emp + 2 R_bar_mu + B sqrt(log(1/(delta - 4(mu-1) beta(a))) / 2 mu)`.
pub fn mixing_reference_bound(
    emp_risk: f64,
    rad_mu: f64,
    range_b: f64,
    mu: usize,
    a: usize,
    beta_a: f64,
    delta: f64,
) -> Result<MixingOutcome> {
    check_non_negative("emp_risk", emp_risk)?;
    check_non_negative("rad_mu", rad_mu)?;
    check_positive("B", range_b)?;
    check_non_negative("beta_a", beta_a)?;
    check_delta_closed(delta)?;
    if mu == 0 || a == 0 {
        return Err(Error::param("mu, a", "must both be >= 1"));
    }
    let threshold = 4.0 * (mu as f64 - 1.0) * beta_a;
    if delta <= threshold {
        return Ok(MixingOutcome::Inapplicable { delta, threshold });
    }
    Ok(MixingOutcome::Applicable(RiskBoundReport::new(
        tags::MIXING_REFERENCE,
        2 * a * mu,
        delta,
        emp_risk,
        2.0 * rad_mu,
        concentration(range_b, mu as f64, delta - threshold),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn risk_bound_examples() {
        let r = rademacher_risk_bound(
            RademacherVariant::TwoSided { training: 0.02, ghost: 0.02 },
            0.1,
            1.0,
            1000,
            0.05,
        )
        .unwrap();
        assert_relative_eq!(r.bound_value, 0.178702275602049, max_relative = 1e-12);
        assert_eq!(r.theorem_tag, tags::RAD_TWO_SIDED);

        let d1 = rademacher_risk_bound(RademacherVariant::WorstCase { sup_empirical: 0.03 }, 0.1, 1.0, 10, 1.0).unwrap();
        assert_eq!(d1.concentration_term, 0.0);
        assert_relative_eq!(d1.bound_value, 0.16);

        let m = rademacher_risk_bound(RademacherVariant::Marginal { r_bar: 0.02 }, 0.1, 1.0, 1000, 0.05).unwrap();
        assert_relative_eq!(m.bound_value, r.bound_value, max_relative = 1e-15);

        assert!(rademacher_risk_bound(RademacherVariant::Marginal { r_bar: -0.1 }, 0.1, 1.0, 10, 0.5).is_err());
    }

    #[test]
    fn class_examples() {
        let lin = class_rad_upper(RadFamily::Linear { m: 1.0, lambda: 2.0 }, MomentInput::SumSquaredNorms(100.0), 100).unwrap();
        assert_relative_eq!(lin, 0.8, max_relative = 1e-15);
        let ker = class_rad_upper(RadFamily::KernelGaussian { m: 1.0, lambda: 2.0 }, MomentInput::SupNorm(1.0), 100).unwrap();
        assert_relative_eq!(ker, 0.8, max_relative = 1e-15);
        let mar = class_rad_upper(RadFamily::MarginLinear { lambda: 1.0, gamma: 0.5 }, MomentInput::SumSquaredNorms(100.0), 100).unwrap();
        assert_relative_eq!(mar, 0.2, max_relative = 1e-15);
        let vq = class_rad_upper(RadFamily::Vq { c: 2, lambda: 1.0 }, MomentInput::SumSquaredNorms(100.0), 100).unwrap();
        assert_relative_eq!(vq, 0.6, max_relative = 1e-15);
        let worst = class_rad_upper(RadFamily::Linear { m: 1.0, lambda: 2.0 }, MomentInput::SupNorm(3.0), 100).unwrap();
        assert_relative_eq!(worst, 2.4, max_relative = 1e-15);
        assert!(class_rad_upper(RadFamily::Linear { m: 1.0, lambda: 2.0 }, MomentInput::SumKernelDiagonal(1.0), 10).is_err());
        assert!(class_rad_upper(RadFamily::Linear { m: 0.0, lambda: 2.0 }, MomentInput::SupNorm(1.0), 10).is_err());
    }

    #[test]
    fn mixing_examples() {
        let out = mixing_reference_bound(0.0, 0.0, 1.0, 100, 5, 0.001, 0.01).unwrap();
        assert!(matches!(out, MixingOutcome::Inapplicable { .. }));

        let out = mixing_reference_bound(0.0, 0.0, 1.0, 100, 5, 1e-6, 0.05).unwrap();
        assert_relative_eq!(out.report().unwrap().bound_value, 0.122549659390420, max_relative = 1e-12);

        let zero_beta = mixing_reference_bound(0.1, 0.02, 1.0, 100, 5, 0.0, 0.05).unwrap();
        let marginal = rademacher_risk_bound(RademacherVariant::Marginal { r_bar: 0.02 }, 0.1, 1.0, 100, 0.05).unwrap();
        assert_relative_eq!(zero_beta.report().unwrap().bound_value, marginal.bound_value, max_relative = 1e-15);
    }
}
