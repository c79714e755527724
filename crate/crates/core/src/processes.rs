//! Stationary dependent processes, their simulated paths and independent
//! draws from their stationary marginals.
//!
//! Every provided process is started from its stationary law, so a simulated
//! path is strictly stationary from the first index on. A ghost sample is a
//! set of mutually independent draws from that marginal, produced from a
//! random stream disjoint from the path's.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as NormalLaw};

use crate::classes::sign;
use crate::error::{check_positive, Error, Result};
use crate::rng::{stream, StreamRole};

const LYAPUNOV_TOL: f64 = 1e-12;
const LYAPUNOV_MAX_DOUBLINGS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IidDistribution {
    Normal { mean: f64, std: f64 },
    Uniform { low: f64, high: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessSpec {
    /// `x_{i+1} = a x_i + sigma e_i`, labels `sign(x_i - b_star)` flipped
    /// independently with probability `flip_p`.
    Ar1Threshold {
        a: f64,
        sigma: f64,
        b_star: f64,
        flip_p: f64,
    },
    /// `y_i = <theta*, x_i> + sigma nu_i` with `x_i = (y_{i-1}, ..., y_{i-d})`.
    /// With `clip_radius = Some(r)` the emitted regressor is projected onto the
    /// ball of radius `r` and the emitted output clamped to `[-r, r]`; the
    /// underlying dynamics are left untouched.
    ArLinearSystem {
        coefficients: Vec<f64>,
        sigma: f64,
        #[serde(default)]
        clip_radius: Option<f64>,
    },
    /// Sign chain that keeps its state with probability `rho` and otherwise
    /// redraws it uniformly. Emits `z_i = (s_i, s_{i+1})`.
    MarkovBinary { rho: f64 },
    /// Independent inputs with threshold labels and flip noise.
    IidBaseline {
        distribution: IidDistribution,
        b_star: f64,
        flip_p: f64,
    },
}

/// A realised path: `n` points `(x_i, y_i)` with `x_i` in R^dim.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSample {
    pub dim: usize,
    /// Row-major `n x dim` inputs.
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub seed: u64,
    pub process: String,
}

impl SequenceSample {
    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.xs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn y(&self, i: usize) -> f64 {
        self.ys[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.xs.chunks_exact(self.dim.max(1)).zip(self.ys.iter().copied())
    }

    /// First input coordinate of every point.
    pub fn first_coordinates(&self) -> Vec<f64> {
        self.xs.iter().step_by(self.dim).copied().collect()
    }

    /// Inputs as owned vectors.
    pub fn inputs(&self) -> Vec<Vec<f64>> {
        self.xs.chunks_exact(self.dim).map(<[f64]>::to_vec).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarLaw {
    Normal { mean: f64, variance: f64 },
    Uniform { low: f64, high: f64 },
}

impl ScalarLaw {
    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        match *self {
            ScalarLaw::Normal { mean, variance } => {
                NormalLaw::new(mean, variance.sqrt()).expect("positive variance").cdf(x)
            }
            ScalarLaw::Uniform { low, high } => ((x - low) / (high - low)).clamp(0.0, 1.0),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ScalarLaw::Normal { mean, .. } => mean,
            ScalarLaw::Uniform { low, high } => 0.5 * (low + high),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            ScalarLaw::Normal { variance, .. } => variance,
            ScalarLaw::Uniform { low, high } => (high - low).powi(2) / 12.0,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ScalarLaw::Normal { mean, variance } => {
                let e: f64 = rng.sample(StandardNormal);
                mean + variance.sqrt() * e
            }
            ScalarLaw::Uniform { low, high } => rng.random_range(low..high),
        }
    }
}

/// Closed-form stationary marginal law of one point `z_i = (x_i, y_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarginalLaw {
    /// Scalar input with threshold labels and flip noise.
    ThresholdLabeled {
        input: ScalarLaw,
        b_star: f64,
        flip_p: f64,
    },
    /// Gaussian regressor with covariance `state_covariance` (row-major
    /// `d x d`), output `<theta*, x> + sigma nu`, optional clipping.
    LinearSystem {
        state_covariance: Vec<f64>,
        coefficients: Vec<f64>,
        sigma: f64,
        clip_radius: Option<f64>,
    },
    /// Uniform sign `x`, with `y = x` with probability `(1 + rho) / 2`.
    SignPair { rho: f64 },
}

impl MarginalLaw {
    /// Misclassification probability of `x -> sign(x - b)` under a
    /// threshold-labelled law; `b` may be infinite.
    pub fn threshold_risk(&self, b: f64) -> Result<f64> {
        match self {
            MarginalLaw::ThresholdLabeled { input, b_star, flip_p } => {
                let disagree = (input.cdf(b) - input.cdf(*b_star)).abs();
                Ok(flip_p + (1.0 - 2.0 * flip_p) * disagree)
            }
            _ => Err(Error::Unsupported(
                "threshold risk needs a threshold-labelled marginal".into(),
            )),
        }
    }

    /// Probability that `y = +1` given `x`, for the discrete sign-pair law.
    pub fn sign_pair_positive(&self, x: f64) -> Result<f64> {
        match self {
            MarginalLaw::SignPair { rho } => {
                let stay = 0.5 * (1.0 + rho);
                Ok(if x > 0.0 { stay } else { 1.0 - stay })
            }
            _ => Err(Error::Unsupported("not a sign-pair marginal".into())),
        }
    }

    /// Variance of the scalar input, when the input is scalar.
    pub fn input_variance(&self) -> Option<f64> {
        match self {
            MarginalLaw::ThresholdLabeled { input, .. } => Some(input.variance()),
            MarginalLaw::SignPair { .. } => Some(1.0),
            MarginalLaw::LinearSystem { .. } => None,
        }
    }
}

impl ProcessSpec {
    /// All provided kinds are strictly stationary.
    pub fn is_stationary(&self) -> bool {
        true
    }

    pub fn dim(&self) -> usize {
        match self {
            ProcessSpec::ArLinearSystem { coefficients, .. } => coefficients.len(),
            _ => 1,
        }
    }

    pub fn id(&self) -> String {
        match self {
            ProcessSpec::Ar1Threshold { a, sigma, b_star, flip_p } => {
                format!("ar1(a={a},sigma={sigma},b*={b_star},flip={flip_p})")
            }
            ProcessSpec::ArLinearSystem { coefficients, sigma, clip_radius } => {
                format!("ar{}(theta={coefficients:?},sigma={sigma},clip={clip_radius:?})", coefficients.len())
            }
            ProcessSpec::MarkovBinary { rho } => format!("markov_binary(rho={rho})"),
            ProcessSpec::IidBaseline { distribution, b_star, flip_p } => {
                format!("iid({distribution:?},b*={b_star},flip={flip_p})")
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let flip = |p: f64| {
            if (0.0..1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::param("flip_p", format!("must lie in [0, 1), got {p}")))
            }
        };
        match self {
            ProcessSpec::Ar1Threshold { a, sigma, b_star, flip_p } => {
                if !(a.abs() < 1.0) {
                    return Err(Error::param("a", format!("|a| must be < 1, got {a}")));
                }
                check_positive("sigma", *sigma)?;
                if !b_star.is_finite() {
                    return Err(Error::param("b_star", "must be finite"));
                }
                flip(*flip_p)
            }
            ProcessSpec::ArLinearSystem { coefficients, sigma, clip_radius } => {
                if coefficients.is_empty() {
                    return Err(Error::param("coefficients", "order must be >= 1"));
                }
                check_positive("sigma", *sigma)?;
                if let Some(r) = clip_radius {
                    check_positive("clip_radius", *r)?;
                }
                lyapunov_covariance(coefficients, *sigma).map(|_| ())
            }
            ProcessSpec::MarkovBinary { rho } => {
                if (0.0..1.0).contains(rho) {
                    Ok(())
                } else {
                    Err(Error::param("rho", format!("must lie in [0, 1), got {rho}")))
                }
            }
            ProcessSpec::IidBaseline { distribution, b_star, flip_p } => {
                match distribution {
                    IidDistribution::Normal { std, .. } => check_positive("std", *std)?,
                    IidDistribution::Uniform { low, high } => {
                        if !(low < high) {
                            return Err(Error::param("uniform", "low must be < high"));
                        }
                    }
                }
                if !b_star.is_finite() {
                    return Err(Error::param("b_star", "must be finite"));
                }
                flip(*flip_p)
            }
        }
    }
}

/// Stationary covariance of the state `(y_{i-1}, ..., y_{i-d})` of an AR(d)
/// recursion, the fixed point of `S = A S A^T + sigma^2 e1 e1^T` obtained by
/// doubling iterations.
pub fn lyapunov_covariance(coefficients: &[f64], sigma: f64) -> Result<DMatrix<f64>> {
    let d = coefficients.len();
    let mut a = DMatrix::<f64>::zeros(d, d);
    for (j, c) in coefficients.iter().enumerate() {
        a[(0, j)] = *c;
    }
    for i in 1..d {
        a[(i, i - 1)] = 1.0;
    }
    let mut s = DMatrix::<f64>::zeros(d, d);
    s[(0, 0)] = sigma * sigma;
    for _ in 0..LYAPUNOV_MAX_DOUBLINGS {
        let next = &s + &a * &s * a.transpose();
        let change = (&next - &s).amax();
        if !next.iter().all(|v| v.is_finite()) || next.amax() > 1e12 {
            break;
        }
        s = next;
        a = &a * &a;
        if change <= LYAPUNOV_TOL * s.amax().max(1.0) {
            return Ok(s);
        }
    }
    Err(Error::param(
        "coefficients",
        "AR recursion is not stable (no stationary covariance)",
    ))
}

/// Closed-form stationary marginal of `spec`.
pub fn stationary_params(spec: &ProcessSpec) -> Result<MarginalLaw> {
    spec.validate()?;
    Ok(match spec {
        ProcessSpec::Ar1Threshold { a, sigma, b_star, flip_p } => MarginalLaw::ThresholdLabeled {
            input: ScalarLaw::Normal {
                mean: 0.0,
                variance: sigma * sigma / (1.0 - a * a),
            },
            b_star: *b_star,
            flip_p: *flip_p,
        },
        ProcessSpec::IidBaseline { distribution, b_star, flip_p } => MarginalLaw::ThresholdLabeled {
            input: match *distribution {
                IidDistribution::Normal { mean, std } => ScalarLaw::Normal {
                    mean,
                    variance: std * std,
                },
                IidDistribution::Uniform { low, high } => ScalarLaw::Uniform { low, high },
            },
            b_star: *b_star,
            flip_p: *flip_p,
        },
        ProcessSpec::ArLinearSystem { coefficients, sigma, clip_radius } => {
            let cov = lyapunov_covariance(coefficients, *sigma)?;
            MarginalLaw::LinearSystem {
                state_covariance: cov.transpose().as_slice().to_vec(),
                coefficients: coefficients.clone(),
                sigma: *sigma,
                clip_radius: *clip_radius,
            }
        }
        ProcessSpec::MarkovBinary { rho } => MarginalLaw::SignPair { rho: *rho },
    })
}

fn threshold_label<R: Rng + ?Sized>(x: f64, b_star: f64, flip_p: f64, rng: &mut R) -> f64 {
    let y = sign(x - b_star);
    if flip_p > 0.0 && rng.random::<f64>() < flip_p {
        -y
    } else {
        y
    }
}

fn uniform_sign<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

fn emit_clipped(x: &[f64], y: f64, clip: Option<f64>, xs: &mut Vec<f64>, ys: &mut Vec<f64>) {
    match clip {
        Some(r) => {
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let scale = if norm > r { r / norm } else { 1.0 };
            xs.extend(x.iter().map(|v| v * scale));
            ys.push(y.clamp(-r, r));
        }
        None => {
            xs.extend_from_slice(x);
            ys.push(y);
        }
    }
}

fn cholesky(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    cov.clone()
        .cholesky()
        .map(|c| c.l())
        .ok_or_else(|| Error::param("coefficients", "stationary covariance is not positive definite"))
}

/// Simulates a length-`n` path of `spec` from the path stream of `seed`.
pub fn simulate_sequence(spec: &ProcessSpec, n: usize, seed: u64) -> Result<SequenceSample> {
    let mut rng = stream(seed, 0, StreamRole::Path);
    simulate_with(spec, n, seed, &mut rng)
}

pub fn simulate_with<R: Rng + ?Sized>(
    spec: &ProcessSpec,
    n: usize,
    seed: u64,
    rng: &mut R,
) -> Result<SequenceSample> {
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    spec.validate()?;
    let dim = spec.dim();
    let mut xs = Vec::with_capacity(n * dim);
    let mut ys = Vec::with_capacity(n);
    match spec {
        ProcessSpec::Ar1Threshold { a, sigma, b_star, flip_p } => {
            let sd0 = sigma / (1.0 - a * a).sqrt();
            let mut x = sd0 * rng.sample::<f64, _>(StandardNormal);
            for i in 0..n {
                if i > 0 {
                    x = a * x + sigma * rng.sample::<f64, _>(StandardNormal);
                }
                xs.push(x);
                ys.push(threshold_label(x, *b_star, *flip_p, rng));
            }
        }
        ProcessSpec::IidBaseline { b_star, flip_p, .. } => {
            let MarginalLaw::ThresholdLabeled { input, .. } = stationary_params(spec)? else {
                unreachable!()
            };
            for _ in 0..n {
                let x = input.sample(rng);
                xs.push(x);
                ys.push(threshold_label(x, *b_star, *flip_p, rng));
            }
        }
        ProcessSpec::ArLinearSystem { coefficients, sigma, clip_radius } => {
            let cov = lyapunov_covariance(coefficients, *sigma)?;
            let l = cholesky(&cov)?;
            let z = DVector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)));
            let mut state: Vec<f64> = (&l * z).iter().copied().collect();
            let noise = Normal::new(0.0, *sigma).expect("sigma validated");
            for _ in 0..n {
                let y: f64 = coefficients.iter().zip(&state).map(|(c, s)| c * s).sum::<f64>()
                    + noise.sample(rng);
                emit_clipped(&state, y, *clip_radius, &mut xs, &mut ys);
                state.rotate_right(1);
                state[0] = y;
            }
        }
        ProcessSpec::MarkovBinary { rho } => {
            let mut s = uniform_sign(rng);
            for _ in 0..n {
                let next = if rng.random::<f64>() < *rho { s } else { uniform_sign(rng) };
                xs.push(s);
                ys.push(next);
                s = next;
            }
        }
    }
    Ok(SequenceSample {
        dim,
        xs,
        ys,
        seed,
        process: spec.id(),
    })
}

/// `m` independent draws from the stationary marginal of `spec`, taken from
/// the ghost stream of `seed`.
pub fn sample_marginal(spec: &ProcessSpec, m: usize, seed: u64) -> Result<SequenceSample> {
    let mut rng = stream(seed, 0, StreamRole::Ghost);
    sample_marginal_with(spec, m, seed, &mut rng)
}

pub fn sample_marginal_with<R: Rng + ?Sized>(
    spec: &ProcessSpec,
    m: usize,
    seed: u64,
    rng: &mut R,
) -> Result<SequenceSample> {
    let law = stationary_params(spec)?;
    let dim = spec.dim();
    let mut xs = Vec::with_capacity(m * dim);
    let mut ys = Vec::with_capacity(m);
    match &law {
        MarginalLaw::ThresholdLabeled { input, b_star, flip_p } => {
            for _ in 0..m {
                let x = input.sample(rng);
                xs.push(x);
                ys.push(threshold_label(x, *b_star, *flip_p, rng));
            }
        }
        MarginalLaw::LinearSystem { state_covariance, coefficients, sigma, clip_radius } => {
            let cov = DMatrix::from_row_slice(dim, dim, state_covariance);
            let l = cholesky(&cov)?;
            let noise = Normal::new(0.0, *sigma).expect("sigma validated");
            for _ in 0..m {
                let z = DVector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)));
                let x: Vec<f64> = (&l * z).iter().copied().collect();
                let y = coefficients.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>() + noise.sample(rng);
                emit_clipped(&x, y, *clip_radius, &mut xs, &mut ys);
            }
        }
        MarginalLaw::SignPair { rho } => {
            let stay = Uniform::new(0.0, 1.0).expect("valid range");
            for _ in 0..m {
                let x = uniform_sign(rng);
                let keep = stay.sample(rng) < 0.5 * (1.0 + rho);
                xs.push(x);
                ys.push(if keep { x } else { -x });
            }
        }
    }
    Ok(SequenceSample {
        dim,
        xs,
        ys,
        seed,
        process: format!("marginal of {}", spec.id()),
    })
}
