//! Projected subgradient solver for margin programs.

use serde::{Deserialize, Serialize};

use super::{dot, norm, ScenarioProgramSpec};
use crate::error::{check_non_negative, Error, Result};

/// Penalty doublings before giving up.
pub const MAX_RAMPS: usize = 20;
/// Subgradient steps per penalty level, with step size `1/sqrt(t)`.
pub const ITERATIONS_PER_RAMP: usize = 10_000;
/// Constant-step polishing rounds from the best feasible point; the step
/// halves every round.
const REFINE_ROUNDS: usize = 40;
const REFINE_ITERATIONS: usize = 2_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SolveMode {
    /// Minimize the objective over the feasible scenarios.
    Optimize,
    /// Stop at the first point with `max_i f + gamma <= -slack_target`.
    Feasibility { slack_target: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub theta: Vec<f64>,
    /// Result of evaluating every scenario constraint at `theta`.
    pub feasible: bool,
    pub objective: f64,
    /// `max_i f(x_i, theta)`.
    pub max_constraint: f64,
}

/// Affine minorants `g . theta + h` whose maximum equals `max_i f(x_i, theta)`.
struct Rows {
    g: Vec<Vec<f64>>,
    h: Vec<f64>,
}

impl Rows {
    /// Scenario reduction: a piece with constant `psi` only needs the scenario
    /// maximizing `eta`, and for scalar `x` each piece is affine in `x` so
    /// the two extreme scenarios suffice.
    fn build(program: &ScenarioProgramSpec, scenarios: &[Vec<f64>]) -> Self {
        let mut rows = Rows { g: Vec::new(), h: Vec::new() };
        let extremes: Option<[&Vec<f64>; 2]> = (program.x_dim() == 1).then(|| {
            let lo = scenarios.iter().min_by(|a, b| a[0].total_cmp(&b[0])).expect("non-empty");
            let hi = scenarios.iter().max_by(|a, b| a[0].total_cmp(&b[0])).expect("non-empty");
            [lo, hi]
        });
        for piece in &program.pieces {
            let mut push = |x: &[f64]| {
                rows.g.push(piece.psi(x));
                rows.h.push(piece.eta(x));
            };
            if piece.psi_is_constant() {
                let top = scenarios
                    .iter()
                    .max_by(|a, b| piece.eta(a).total_cmp(&piece.eta(b)))
                    .expect("non-empty");
                push(top);
            } else if let Some(ext) = extremes {
                ext.iter().for_each(|x| push(x));
            } else {
                scenarios.iter().for_each(|x| push(x));
            }
        }
        rows
    }

    /// `(max_r g_r . theta + h_r, argmax)`.
    fn max(&self, theta: &[f64]) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for (r, (g, h)) in self.g.iter().zip(&self.h).enumerate() {
            let v = dot(g, theta) + h;
            if v > best.0 {
                best = (v, r);
            }
        }
        best
    }
}

/// Takes a normalized step of length `step` against `direction` and projects.
fn step_against(program: &ScenarioProgramSpec, theta: &mut [f64], direction: &[f64], step: f64) -> bool {
    let len = norm(direction);
    if len == 0.0 {
        return false;
    }
    for (t, d) in theta.iter_mut().zip(direction) {
        *t -= step * d / len;
    }
    program.feasible_set.project(theta);
    true
}

struct Search<'a> {
    program: &'a ScenarioProgramSpec,
    rows: Rows,
    gamma: f64,
    /// Feasible points in order of improving objective.
    feasible: Vec<(f64, Vec<f64>)>,
    least_residual: (f64, Vec<f64>),
}

impl<'a> Search<'a> {
    /// Records `theta`, returning its residual `max_r + gamma`.
    fn visit(&mut self, theta: &[f64]) -> (f64, usize) {
        let (v, r) = self.rows.max(theta);
        let residual = v + self.gamma;
        if residual <= 0.0 {
            let obj = self.program.objective_value(theta);
            if self.feasible.last().is_none_or(|(best, _)| obj < *best) {
                self.feasible.push((obj, theta.to_vec()));
            }
        }
        if residual < self.least_residual.0 {
            self.least_residual = (residual, theta.to_vec());
        }
        (residual, r)
    }

    /// Penalized subgradient direction `c + rho g_r` (just `c` when feasible).
    fn direction(&self, residual: f64, row: usize, rho: f64) -> Vec<f64> {
        let mut d = self.program.objective.clone();
        if residual > 0.0 {
            for (di, gi) in d.iter_mut().zip(&self.rows.g[row]) {
                *di += rho * gi;
            }
        }
        d
    }
}

/// Solves the program with its own margin.
pub fn solve_margin_program(
    program: &ScenarioProgramSpec,
    scenarios: &[Vec<f64>],
    mode: SolveMode,
) -> Result<Solution> {
    solve_with_margin(program, scenarios, mode, program.margin)
}

/// Solves with constraint `max_i f(x_i, theta) <= -gamma`, `gamma >= 0`.
///
/// Feasibility of the returned point is always re-checked on every scenario;
/// when no point passes, the error carries the smallest residual
/// `max_i f + gamma` met and where.
pub fn solve_with_margin(
    program: &ScenarioProgramSpec,
    scenarios: &[Vec<f64>],
    mode: SolveMode,
    gamma: f64,
) -> Result<Solution> {
    program.validate()?;
    check_non_negative("gamma", gamma)?;
    if scenarios.is_empty() {
        return Err(Error::Empty("scenarios"));
    }
    if let Some(x) = scenarios.iter().find(|x| x.len() != program.x_dim()) {
        return Err(Error::param("scenarios", format!("expected dimension {}, got {}", program.x_dim(), x.len())));
    }
    let mut theta = vec![0.0; program.theta_dim()];
    program.feasible_set.project(&mut theta);
    let mut search = Search {
        program,
        rows: Rows::build(program, scenarios),
        gamma,
        feasible: Vec::new(),
        least_residual: (f64::INFINITY, theta.clone()),
    };
    match mode {
        SolveMode::Optimize => optimize(&mut search, theta),
        SolveMode::Feasibility { slack_target } => {
            check_non_negative("slack_target", slack_target)?;
            feasibility(&mut search, theta, slack_target)
        }
    }
    // newest feasible point first, falling back if rounding in the scenario
    // reduction let a boundary point through
    for (_, theta) in search.feasible.iter().rev() {
        let max_constraint = program.max_constraint(scenarios, theta)?;
        if max_constraint + gamma <= 0.0 {
            return Ok(Solution {
                objective: program.objective_value(theta),
                theta: theta.clone(),
                feasible: true,
                max_constraint,
            });
        }
    }
    let (residual, best_theta) = search.least_residual;
    Err(Error::Infeasible { best_residual: residual, best_theta })
}

fn optimize(search: &mut Search<'_>, mut theta: Vec<f64>) {
    let mut rho = 1.0;
    for _ in 0..MAX_RAMPS {
        for t in 1..=ITERATIONS_PER_RAMP {
            let (residual, row) = search.visit(&theta);
            let d = search.direction(residual, row, rho);
            if !step_against(search.program, &mut theta, &d, 1.0 / (t as f64).sqrt()) {
                break;
            }
        }
        search.visit(&theta);
        if !search.feasible.is_empty() {
            break;
        }
        rho *= 2.0;
    }
    let Some((_, start)) = search.feasible.last().cloned() else {
        return;
    };
    // exact penalty from here on: rho beyond any multiplier met so far
    rho *= 2.0;
    let mut step = (search.program.feasible_set.diameter() / 100.0).max(1e-3);
    theta = start;
    for _ in 0..REFINE_ROUNDS {
        for _ in 0..REFINE_ITERATIONS {
            let (residual, row) = search.visit(&theta);
            let d = search.direction(residual, row, rho);
            if !step_against(search.program, &mut theta, &d, step) {
                break;
            }
        }
        search.visit(&theta);
        theta = search.feasible.last().expect("non-empty").1.clone();
        step *= 0.5;
    }
}

fn feasibility(search: &mut Search<'_>, mut theta: Vec<f64>, slack_target: f64) {
    for _ in 0..MAX_RAMPS {
        for t in 1..=ITERATIONS_PER_RAMP {
            let (residual, row) = search.visit(&theta);
            if residual <= -slack_target {
                return;
            }
            let g = search.rows.g[row].clone();
            if !step_against(search.program, &mut theta, &g, 1.0 / (t as f64).sqrt()) {
                // constant constraint value: nothing left to improve
                return;
            }
        }
        theta = search.least_residual.1.clone();
    }
}
