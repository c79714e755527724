use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{check_non_negative, check_positive, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailKind {
    /// Independent `W_i` in `[a_i, b_i]`; `widths[i] = b_i - a_i`. Bounds
    /// the deviation of the mean by `exp(-2 n^2 eps^2 / sum widths^2)`.
    Hoeffding,
    /// A function of a dependent sequence with bounded differences
    /// `widths[i] = c_i`: `exp(-2 eps^2 / sum c_i^2)`.
    BoundedDifference,
}

/// Upper bound on the one-sided tail probability, capped at 1.
pub fn concentration_tail(kind: TailKind, widths: &[f64], epsilon: f64) -> Result<f64> {
    if widths.is_empty() {
        return Err(Error::Empty("concentration widths"));
    }
    for &w in widths {
        check_positive("c_i", w)?;
    }
    check_non_negative("epsilon", epsilon)?;
    let sum_sq: f64 = widths.iter().map(|w| w * w).sum();
    let n = widths.len() as f64;
    let exponent = match kind {
        TailKind::Hoeffding => -2.0 * n * n * epsilon * epsilon / sum_sq,
        TailKind::BoundedDifference => -2.0 * epsilon * epsilon / sum_sq,
    };
    Ok(exponent.exp().min(1.0))
}

/// `P(X = k)` for `X ~ Binomial(m, p)`.
pub fn binomial_pmf(m: u64, k: u64, p: f64) -> f64 {
    if k > m {
        return 0.0;
    }
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == m { 1.0 } else { 0.0 };
    }
    let (m_f, k_f) = (m as f64, k as f64);
    (ln_binomial(m, k) + k_f * p.ln() + (m_f - k_f) * (1.0 - p).ln()).exp()
}

/// `P(X >= k_min)` for `X ~ Binomial(m, p)`, by direct summation.
pub fn binomial_upper_tail(m: u64, k_min: u64, p: f64) -> f64 {
    (k_min..=m).map(|k| binomial_pmf(m, k, p)).sum::<f64>().min(1.0)
}

/// Checks `P(X >= E X) > 1/4` for `X ~ Binomial(m, p)` with `p > 1/m`.
///
/// The tail starts at the smallest integer `k >= m p`; a `1e-9` guard keeps
/// products such as `100 * 0.29` from rounding up past an exact integer.
pub fn binomial_quarter_lemma_holds(m: u64, p: f64) -> Result<bool> {
    if m == 0 {
        return Err(Error::param("m", "must be >= 1"));
    }
    if !(p <= 1.0) {
        return Err(Error::param("p", format!("must be a probability, got {p}")));
    }
    if !(p > 1.0 / m as f64) {
        return Err(Error::HypothesisViolated(format!(
            "the lemma needs p > 1/m, got p = {p}, 1/m = {}",
            1.0 / m as f64
        )));
    }
    let k_min = (m as f64 * p - 1e-9).ceil().max(0.0) as u64;
    Ok(binomial_upper_tail(m, k_min, p) > 0.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tail_examples() {
        assert_eq!(concentration_tail(TailKind::BoundedDifference, &[0.1; 4], 0.0).unwrap(), 1.0);
        let h = concentration_tail(TailKind::Hoeffding, &[1.0; 10], 0.3).unwrap();
        assert_relative_eq!(h, (-1.8f64).exp(), max_relative = 1e-14);
        assert!(h >= 11.0 / 1024.0);
        let (n, b, eps) = (50usize, 2.0, 0.4);
        let bd = concentration_tail(TailKind::BoundedDifference, &vec![b / n as f64; n], eps).unwrap();
        assert_relative_eq!(bd, (-2.0 * n as f64 * eps * eps / (b * b)).exp(), max_relative = 1e-12);
        assert!(concentration_tail(TailKind::Hoeffding, &[1.0, 0.0], 0.1).is_err());
    }

    #[test]
    fn quarter_lemma_examples() {
        assert_relative_eq!(binomial_upper_tail(10, 5, 0.5), 0.623046875, max_relative = 1e-12);
        assert!(binomial_quarter_lemma_holds(10, 0.5).unwrap());
        assert_relative_eq!(binomial_upper_tail(3, 3, 0.9), 0.729, max_relative = 1e-12);
        assert!(binomial_quarter_lemma_holds(3, 0.9).unwrap());
        assert!(matches!(
            binomial_quarter_lemma_holds(5, 0.1),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn pmf_sums_to_one() {
        for m in [1u64, 7, 30] {
            let s: f64 = (0..=m).map(|k| binomial_pmf(m, k, 0.37)).sum();
            assert_relative_eq!(s, 1.0, max_relative = 1e-12);
        }
    }
}
