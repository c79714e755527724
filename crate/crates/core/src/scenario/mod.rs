//! Pseudo-linear random programs with a margin.
//!
//! A program minimizes `c . theta` over a box or ball `Theta` subject to
//! `f(x_i, theta) <= -gamma` for every scenario `x_i`, where
//! `f(x, theta) = max_k (psi_k(x) . theta + eta_k(x))` with affine
//! `psi_k(x) = A_k x + a_k` and `eta_k(x) = e_k . x + e0_k`.

mod planner;
mod solver;

use serde::{Deserialize, Serialize};

use crate::error::{check_delta, check_positive, Error, Result};
use crate::processes::{simulate_sequence, ProcessSpec};

pub use planner::{plan_n_margin, plan_n_vc, violation_bound, ViolationParams};
pub use solver::{solve_margin_program, solve_with_margin, SolveMode, Solution, ITERATIONS_PER_RAMP, MAX_RAMPS};

/// One affine constraint piece `x -> (A x + a) . theta + e . x + e0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintPiece {
    /// `A`, one row per parameter coordinate, each of length `dim(x)`.
    pub psi_linear: Vec<Vec<f64>>,
    /// `a`, of length `dim(theta)`.
    pub psi_offset: Vec<f64>,
    /// `e`, of length `dim(x)`.
    pub eta_linear: Vec<f64>,
    #[serde(default)]
    pub eta_offset: f64,
}

impl ConstraintPiece {
    pub fn psi(&self, x: &[f64]) -> Vec<f64> {
        self.psi_linear
            .iter()
            .zip(&self.psi_offset)
            .map(|(row, a)| dot(row, x) + a)
            .collect()
    }

    pub fn eta(&self, x: &[f64]) -> f64 {
        dot(&self.eta_linear, x) + self.eta_offset
    }

    pub fn value(&self, x: &[f64], theta: &[f64]) -> f64 {
        let mut v = self.eta(x);
        for ((row, a), t) in self.psi_linear.iter().zip(&self.psi_offset).zip(theta) {
            v += (dot(row, x) + a) * t;
        }
        v
    }

    /// True when `psi_k` does not depend on `x`.
    pub fn psi_is_constant(&self) -> bool {
        self.psi_linear.iter().flatten().all(|&v| v == 0.0)
    }
}

/// Axis-aligned box or Euclidean ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Box { lower, .. } => lower.len(),
            Region::Ball { center, .. } => center.len(),
        }
    }

    pub fn validate(&self, what: &'static str) -> Result<()> {
        match self {
            Region::Box { lower, upper } => {
                if lower.is_empty() || lower.len() != upper.len() {
                    return Err(Error::param(what, "box bounds must be non-empty and of equal length"));
                }
                if lower.iter().zip(upper).any(|(l, u)| !(l <= u) || !l.is_finite() || !u.is_finite()) {
                    return Err(Error::param(what, "box needs finite lower <= upper"));
                }
            }
            Region::Ball { center, radius } => {
                if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::param(what, "ball center must be non-empty and finite"));
                }
                if !(*radius >= 0.0 && radius.is_finite()) {
                    return Err(Error::param(what, "ball radius must be finite and >= 0"));
                }
            }
        }
        Ok(())
    }

    /// Euclidean projection onto the region.
    pub fn project(&self, theta: &mut [f64]) {
        match self {
            Region::Box { lower, upper } => {
                for ((t, l), u) in theta.iter_mut().zip(lower).zip(upper) {
                    *t = t.clamp(*l, *u);
                }
            }
            Region::Ball { center, radius } => {
                let dist = theta.iter().zip(center).map(|(t, c)| (t - c) * (t - c)).sum::<f64>().sqrt();
                if dist > *radius {
                    let s = radius / dist;
                    for (t, c) in theta.iter_mut().zip(center) {
                        *t = c + s * (*t - c);
                    }
                }
            }
        }
    }

    /// `sup_{v in region} ||v||`.
    pub fn max_norm(&self) -> f64 {
        match self {
            Region::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| (l * l).max(u * u))
                .sum::<f64>()
                .sqrt(),
            Region::Ball { center, radius } => norm(center) + radius,
        }
    }

    pub(crate) fn diameter(&self) -> f64 {
        match self {
            Region::Box { lower, upper } => {
                lower.iter().zip(upper).map(|(l, u)| (u - l) * (u - l)).sum::<f64>().sqrt()
            }
            Region::Ball { radius, .. } => 2.0 * radius,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioProgramSpec {
    /// Cost vector `c`.
    pub objective: Vec<f64>,
    pub pieces: Vec<ConstraintPiece>,
    /// Parameter set `Theta`.
    pub feasible_set: Region,
    /// Margin `gamma > 0`.
    pub margin: f64,
    /// Bounded set containing every scenario, used to compute `tau_k`.
    #[serde(default)]
    pub uncertainty_set: Option<Region>,
}

impl ScenarioProgramSpec {
    pub fn theta_dim(&self) -> usize {
        self.objective.len()
    }

    /// Dimension of a scenario `x`.
    pub fn x_dim(&self) -> usize {
        self.pieces.first().map_or(0, |p| p.eta_linear.len())
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.theta_dim();
        if p == 0 {
            return Err(Error::param("objective", "must be non-empty"));
        }
        if self.pieces.is_empty() {
            return Err(Error::param("pieces", "need at least one constraint piece"));
        }
        let dx = self.x_dim();
        for piece in &self.pieces {
            if piece.psi_offset.len() != p || piece.psi_linear.len() != p {
                return Err(Error::param("pieces", format!("psi must map into R^{p}")));
            }
            if piece.eta_linear.len() != dx || piece.psi_linear.iter().any(|r| r.len() != dx) {
                return Err(Error::param("pieces", format!("every piece must act on x in R^{dx}")));
            }
        }
        self.feasible_set.validate("feasible_set")?;
        if self.feasible_set.dim() != p {
            return Err(Error::param("feasible_set", format!("must live in R^{p}")));
        }
        if let Some(u) = &self.uncertainty_set {
            u.validate("uncertainty_set")?;
            if u.dim() != dx {
                return Err(Error::param("uncertainty_set", format!("must live in R^{dx}")));
            }
        }
        check_positive("margin", self.margin)
    }

    /// `f(x, theta) = max_k f_k(x, theta)`.
    pub fn constraint_value(&self, x: &[f64], theta: &[f64]) -> Result<f64> {
        if x.len() != self.x_dim() || theta.len() != self.theta_dim() {
            return Err(Error::param("x, theta", "dimension mismatch with the program"));
        }
        Ok(self
            .pieces
            .iter()
            .map(|k| k.value(x, theta))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn objective_value(&self, theta: &[f64]) -> f64 {
        dot(&self.objective, theta)
    }

    /// `max_i f(x_i, theta)` over the scenarios.
    pub fn max_constraint(&self, scenarios: &[Vec<f64>], theta: &[f64]) -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for x in scenarios {
            worst = worst.max(self.constraint_value(x, theta)?);
        }
        Ok(worst)
    }
}

/// Per-piece suprema `tau_k = sup_x ||psi_k(x)||` and
/// `Lambda_k = sup_theta ||theta||`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauLambda {
    pub tau: Vec<f64>,
    pub lambda: Vec<f64>,
    /// False when some `tau_k` is an upper bound rather than the supremum.
    pub exact: bool,
}

impl TauLambda {
    pub fn weighted_sum(&self) -> f64 {
        self.tau.iter().zip(&self.lambda).map(|(t, l)| t * l).sum()
    }
}

/// Largest box dimension whose vertices are enumerated.
const MAX_BOX_VERTEX_DIM: usize = 20;

fn tau_over(piece: &ConstraintPiece, set: Option<&Region>) -> Result<(f64, bool)> {
    if piece.psi_is_constant() {
        return Ok((norm(&piece.psi_offset), true));
    }
    let set = set.ok_or_else(|| {
        Error::param(
            "uncertainty_set",
            "psi depends on x, so a bounded scenario domain is required",
        )
    })?;
    let (lower, upper) = match set {
        Region::Box { lower, upper } => (lower.clone(), upper.clone()),
        Region::Ball { center, radius } if center.len() == 1 => {
            (vec![center[0] - radius], vec![center[0] + radius])
        }
        Region::Ball { center, radius } => {
            // sup over ||u|| <= r of ||b + A u|| with b = psi(center)
            let b = piece.psi(center);
            let a_norm = spectral_norm(&piece.psi_linear);
            let b_norm = norm(&b);
            let exact = b_norm == 0.0;
            return Ok((b_norm + a_norm * radius, exact));
        }
    };
    // ||psi(x)|| is convex in x, so its maximum over a box sits at a vertex
    let dim = lower.len();
    if dim > MAX_BOX_VERTEX_DIM {
        return Err(Error::Unsupported(format!(
            "box scenario domains are limited to {MAX_BOX_VERTEX_DIM} dimensions"
        )));
    }
    let mut best: f64 = 0.0;
    let mut vertex = lower.clone();
    for mask in 0u64..(1u64 << dim) {
        for j in 0..dim {
            vertex[j] = if mask >> j & 1 == 1 { upper[j] } else { lower[j] };
        }
        best = best.max(norm(&piece.psi(&vertex)));
    }
    Ok((best, true))
}

pub fn tau_lambda(program: &ScenarioProgramSpec) -> Result<TauLambda> {
    program.validate()?;
    let lambda = program.feasible_set.max_norm();
    let mut out = TauLambda {
        tau: Vec::with_capacity(program.pieces.len()),
        lambda: vec![lambda; program.pieces.len()],
        exact: true,
    };
    for piece in &program.pieces {
        let (tau, exact) = tau_over(piece, program.uncertainty_set.as_ref())?;
        out.tau.push(tau);
        out.exact &= exact;
    }
    if out.tau.iter().chain(&out.lambda).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::param(
            "program",
            format!("tau and Lambda must be finite and > 0, got {:?} and {lambda}", out.tau),
        ));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertifyMethod {
    /// Zero-margin program with a user-supplied VC dimension of
    /// `{x -> 1[f(x, theta) > 0]}`.
    Vc { d_vc: usize },
    Margin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Solution, or the best point found when infeasible.
    pub theta_hat: Vec<f64>,
    pub n_used: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub method: CertifyMethod,
    /// `None` when no feasible point was found.
    pub violation_bound: Option<f64>,
    pub feasible: bool,
    /// `max_i f(x_i, theta_hat)` over the scenarios used.
    pub max_constraint: f64,
    pub objective: f64,
    pub seed: u64,
}

/// Plans the sample size for `(epsilon, delta)`, draws that many scenarios
/// from one path of `spec`, solves and attaches the violation bound.
pub fn certify(
    program: &ScenarioProgramSpec,
    spec: &ProcessSpec,
    epsilon: f64,
    delta: f64,
    method: CertifyMethod,
    seed: u64,
) -> Result<Certificate> {
    check_delta(delta)?;
    program.validate()?;
    if spec.dim() != program.x_dim() {
        return Err(Error::Incompatible(format!(
            "program acts on x in R^{}, process emits R^{}",
            program.x_dim(),
            spec.dim()
        )));
    }
    let (n, params, solve_program) = match method {
        CertifyMethod::Vc { d_vc } => {
            let n = plan_n_vc(epsilon, delta, d_vc)?;
            (n, ViolationParams::Vc { d_vc }, program.clone())
        }
        CertifyMethod::Margin => {
            let program = with_process_domain(program, spec);
            let tl = tau_lambda(&program)?;
            let sum = tl.weighted_sum();
            let n = plan_n_margin(epsilon, delta, program.margin, sum)?;
            (n, ViolationParams::Margin { gamma: program.margin, tau_lambda_sum: sum }, program)
        }
    };
    let scenarios = simulate_sequence(spec, n, seed)?.inputs();
    certify_on(&solve_program, &scenarios, epsilon, delta, method, params, seed)
}

/// Solves on given scenarios and attaches the bound for `params`. The vc
/// method asks for `f(x_i, theta) <= 0`, the margin method for
/// `f(x_i, theta) <= -gamma`.
pub fn certify_on(
    program: &ScenarioProgramSpec,
    scenarios: &[Vec<f64>],
    epsilon: f64,
    delta: f64,
    method: CertifyMethod,
    params: ViolationParams,
    seed: u64,
) -> Result<Certificate> {
    let n = scenarios.len();
    let gamma = match method {
        CertifyMethod::Vc { .. } => 0.0,
        CertifyMethod::Margin => program.margin,
    };
    match solve_with_margin(program, scenarios, SolveMode::Optimize, gamma) {
        Ok(sol) => Ok(Certificate {
            objective: sol.objective,
            max_constraint: sol.max_constraint,
            violation_bound: Some(violation_bound(params, n, delta)?),
            feasible: sol.feasible,
            theta_hat: sol.theta,
            n_used: n,
            epsilon,
            delta,
            method,
            seed,
        }),
        Err(Error::Infeasible { best_residual, best_theta }) => Ok(Certificate {
            objective: program.objective_value(&best_theta),
            max_constraint: best_residual - gamma,
            violation_bound: None,
            feasible: false,
            theta_hat: best_theta,
            n_used: n,
            epsilon,
            delta,
            method,
            seed,
        }),
        Err(e) => Err(e),
    }
}

/// Fills in the scenario domain from the process clipping radius when the
/// program does not declare one.
fn with_process_domain(program: &ScenarioProgramSpec, spec: &ProcessSpec) -> ScenarioProgramSpec {
    let mut out = program.clone();
    if out.uncertainty_set.is_none() {
        if let ProcessSpec::ArLinearSystem { clip_radius: Some(r), coefficients, .. } = spec {
            out.uncertainty_set = Some(Region::Ball {
                center: vec![0.0; coefficients.len()],
                radius: *r,
            });
        }
    }
    out
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Largest singular value of a row-major matrix.
fn spectral_norm(rows: &[Vec<f64>]) -> f64 {
    if rows.is_empty() || rows[0].is_empty() {
        return 0.0;
    }
    let m = nalgebra::DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    m.singular_values().max()
}
