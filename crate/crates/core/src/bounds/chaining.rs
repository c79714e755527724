use crate::error::{check_non_negative, check_positive, Error, Result};

/// Largest depth searched by [`chaining_rad_upper_optimal`].
pub const MAX_CHAINING_DEPTH: usize = 40;

/// Multi-scale Rademacher upper bound
/// `L (D / 2^N + 6 D sum_{j=1..N} 2^-j sqrt(log_covering(D 2^-j) / n))`.
///
/// `log_covering` maps a scale to the log covering number of the loss class
/// at that scale and must be non-increasing.
pub fn chaining_rad_upper(
    diameter: f64,
    depth: usize,
    log_covering: &dyn Fn(f64) -> f64,
    n: usize,
    lipschitz: f64,
) -> Result<f64> {
    check_non_negative("diameter", diameter)?;
    check_positive("lipschitz", lipschitz)?;
    if depth == 0 {
        return Err(Error::param("depth", "must be >= 1"));
    }
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    if diameter == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let mut sum = 0.0;
    let mut scale = 1.0;
    for _ in 0..depth {
        scale *= 0.5;
        let lc = log_covering(diameter * scale);
        if lc.is_nan() || lc < 0.0 {
            return Err(Error::param(
                "log_covering",
                format!("must be >= 0, got {lc} at scale {}", diameter * scale),
            ));
        }
        sum += scale * (lc / nf).sqrt();
    }
    Ok(lipschitz * (diameter * scale + 6.0 * diameter * sum))
}

/// Minimizes [`chaining_rad_upper`] over depths `1..=MAX_CHAINING_DEPTH`,
/// returning the depth and the value. Ties go to the smallest depth.
pub fn chaining_rad_upper_optimal(
    diameter: f64,
    log_covering: &dyn Fn(f64) -> f64,
    n: usize,
    lipschitz: f64,
) -> Result<(usize, f64)> {
    let mut best = (1, chaining_rad_upper(diameter, 1, log_covering, n, lipschitz)?);
    for depth in 2..=MAX_CHAINING_DEPTH {
        let v = chaining_rad_upper(diameter, depth, log_covering, n, lipschitz)?;
        if v < best.1 {
            best = (depth, v);
        }
    }
    Ok(best)
}

/// Log covering number `A sum_i ||x_i||^2 / eps^2` of spectrally normalized
/// networks, where `A` collects the architecture-dependent constants.
pub fn spectral_log_covering(a: f64, sum_sq_norms: f64) -> Result<impl Fn(f64) -> f64> {
    check_non_negative("A", a)?;
    check_non_negative("sum_sq_norms", sum_sq_norms)?;
    Ok(move |eps: f64| a * sum_sq_norms / (eps * eps))
}
