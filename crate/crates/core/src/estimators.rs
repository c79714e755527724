//! Monte-Carlo and exact estimators: risks, empirical Rademacher complexities,
//! uniform deviations, violation probabilities and the symmetrization check.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::{canonical_thresholds, ClassKind, FunctionClassDescriptor, Hypothesis};
use crate::error::{check_positive, Error, Result};
use crate::losses::{eval_loss, LossKind, LossSpec, Model, Prediction};
use crate::processes::{
    sample_marginal_with, simulate_sequence, simulate_with, stationary_params, MarginalLaw, ProcessSpec,
    SequenceSample,
};
use crate::rng::{replication_seed, stream, StreamRole};
use crate::scenario::ScenarioProgramSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    /// Sample standard deviation over replications divided by `sqrt(R)`.
    pub std_error: f64,
    pub replications: usize,
    pub seed: u64,
}

impl MonteCarloEstimate {
    pub fn from_samples(values: &[f64], seed: u64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("replications"));
        }
        let r = values.len() as f64;
        let mean = values.iter().sum::<f64>() / r;
        let std_error = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r - 1.0);
            (var / r).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            value: mean,
            std_error,
            replications: values.len(),
            seed,
        })
    }

    /// `|value - target| <= k * std_error`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }
}

/// Mean loss of `model` over the points of `sample`.
pub fn empirical_risk<M: Model + ?Sized>(model: &M, loss: &LossSpec, sample: &SequenceSample) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::Empty("sample"));
    }
    let mut total = 0.0;
    for (x, y) in sample.iter() {
        total += eval_loss(loss, model.predict(x), x, y)?;
    }
    Ok(total / sample.len() as f64)
}

/// Risk of `model` as the average of its empirical risk over `replications`
/// independent length-`n` paths.
pub fn risk_mc<M: Model + Sync + ?Sized>(
    model: &M,
    loss: &LossSpec,
    spec: &ProcessSpec,
    n: usize,
    replications: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if replications < 2 {
        return Err(Error::param("replications", "must be >= 2"));
    }
    let values = (0..replications as u64)
        .into_par_iter()
        .map(|r| {
            let path = simulate_sequence(spec, n, replication_seed(seed, r))?;
            empirical_risk(model, loss, &path)
        })
        .collect::<Result<Vec<_>>>()?;
    MonteCarloEstimate::from_samples(&values, seed)
}

fn check_points(points: &[Vec<f64>], dim: Option<usize>) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Empty("points"));
    }
    if let Some(d) = dim {
        if let Some(p) = points.iter().find(|p| p.len() != d) {
            return Err(Error::param("points", format!("expected dimension {d}, got {}", p.len())));
        }
    }
    Ok(())
}

/// Per-sample data needed to evaluate the supremum for any sign vector.
enum RadPlan<'a> {
    Linear { radius: f64, points: &'a [Vec<f64>] },
    Kernel { radius: f64, gram: DMatrix<f64> },
    Finite { values: Vec<Vec<f64>> },
    Threshold { order: Vec<usize>, group_ends: Vec<usize> },
}

impl<'a> RadPlan<'a> {
    fn new(class: &FunctionClassDescriptor, points: &'a [Vec<f64>]) -> Result<Self> {
        match &class.kind {
            ClassKind::LinearBall { dim, radius, offset } => {
                if *offset {
                    return Err(Error::Unsupported(
                        "the supremum over an unconstrained offset is infinite".into(),
                    ));
                }
                check_points(points, Some(*dim))?;
                Ok(RadPlan::Linear { radius: *radius, points })
            }
            ClassKind::KernelBall { kernel, radius } => {
                check_points(points, None)?;
                let n = points.len();
                let gram = DMatrix::from_fn(n, n, |i, j| kernel.eval(&points[i], &points[j]));
                Ok(RadPlan::Kernel { radius: *radius, gram })
            }
            ClassKind::Finite { functions, .. } => {
                check_points(points, Some(1))?;
                let values = (0..functions.len())
                    .map(|k| {
                        points
                            .iter()
                            .map(|p| class.evaluate(&Hypothesis::Member { index: k }, p))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(RadPlan::Finite { values })
            }
            ClassKind::Threshold1d => {
                check_points(points, Some(1))?;
                let mut order: Vec<usize> = (0..points.len()).collect();
                order.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]));
                let mut group_ends = Vec::new();
                for w in 1..order.len() {
                    if points[order[w]][0] != points[order[w - 1]][0] {
                        group_ends.push(w);
                    }
                }
                group_ends.push(order.len());
                Ok(RadPlan::Threshold { order, group_ends })
            }
            ClassKind::Codebook { .. } => Err(Error::Unsupported(
                "no supremum routine for codebook classes".into(),
            )),
        }
    }

    fn sup(&self, signs: &[f64]) -> f64 {
        let n = signs.len() as f64;
        match self {
            RadPlan::Linear { radius, points } => {
                let dim = points[0].len();
                let mut acc = vec![0.0; dim];
                for (p, s) in points.iter().zip(signs) {
                    for (a, v) in acc.iter_mut().zip(p) {
                        *a += s * v;
                    }
                }
                radius * acc.iter().map(|a| a * a).sum::<f64>().sqrt() / n
            }
            RadPlan::Kernel { radius, gram } => {
                let mut q = 0.0;
                for i in 0..signs.len() {
                    let row: f64 = (0..signs.len()).map(|j| gram[(i, j)] * signs[j]).sum();
                    q += signs[i] * row;
                }
                radius * q.max(0.0).sqrt() / n
            }
            RadPlan::Finite { values } => values
                .iter()
                .map(|f| f.iter().zip(signs).map(|(v, s)| v * s).sum::<f64>() / n)
                .fold(f64::NEG_INFINITY, f64::max),
            RadPlan::Threshold { order, group_ends } => {
                // all points labelled +1, then groups flip to -1 in sorted order
                let mut value: f64 = signs.iter().sum();
                let mut best = value;
                let mut start = 0;
                for &end in group_ends {
                    value -= 2.0 * order[start..end].iter().map(|&i| signs[i]).sum::<f64>();
                    best = best.max(value);
                    start = end;
                }
                best / n
            }
        }
    }
}

/// `sup_f (1/n) sum_i signs_i f(points_i)` for one sign vector.
pub fn rademacher_sup(class: &FunctionClassDescriptor, points: &[Vec<f64>], signs: &[f64]) -> Result<f64> {
    if signs.len() != points.len() {
        return Err(Error::param("signs", "must have one sign per point"));
    }
    Ok(RadPlan::new(class, points)?.sup(signs))
}

/// Empirical Rademacher complexity of `class` on `points`, averaged over
/// `sign_draws` uniform sign vectors. Draw `s` uses the sign stream of
/// replication `s`.
pub fn empirical_rademacher(
    class: &FunctionClassDescriptor,
    points: &[Vec<f64>],
    sign_draws: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if sign_draws == 0 {
        return Err(Error::param("sign_draws", "must be >= 1"));
    }
    let plan = RadPlan::new(class, points)?;
    let plan = &plan;
    let values: Vec<f64> = (0..sign_draws as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream(seed, s, StreamRole::Signs);
            let signs: Vec<f64> = (0..points.len())
                .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                .collect();
            plan.sup(&signs)
        })
        .collect();
    MonteCarloEstimate::from_samples(&values, seed)
}

/// Piecewise-constant function of a threshold `b`: points with `x >= b`
/// contribute their first weight, the others their second.
struct ThresholdPieces {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl ThresholdPieces {
    fn new(mut items: Vec<(f64, f64, f64)>) -> Self {
        items.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut value: f64 = items.iter().map(|t| t.1).sum();
        let mut breaks = Vec::new();
        let mut values = vec![value];
        let mut i = 0;
        while i < items.len() {
            let x = items[i].0;
            while i < items.len() && items[i].0 == x {
                value += items[i].2 - items[i].1;
                i += 1;
            }
            breaks.push(x);
            values.push(value);
        }
        Self { breaks, values }
    }

    /// Closure `(lo, hi]` of the set of thresholds realising piece `k`.
    fn ends(&self, k: usize) -> (f64, f64) {
        let lo = if k == 0 { f64::NEG_INFINITY } else { self.breaks[k - 1] };
        let hi = self.breaks.get(k).copied().unwrap_or(f64::INFINITY);
        (lo, hi)
    }
}

fn threshold_loss_items(loss: &LossSpec, sample: &SequenceSample, scale: f64) -> Result<Vec<(f64, f64, f64)>> {
    sample
        .iter()
        .map(|(x, y)| {
            let pos = eval_loss(loss, Prediction::Score(1.0), x, y)?;
            let neg = eval_loss(loss, Prediction::Score(-1.0), x, y)?;
            Ok((x[0], scale * pos, scale * neg))
        })
        .collect()
}

fn member_empirical_risk(
    class: &FunctionClassDescriptor,
    h: &Hypothesis,
    loss: &LossSpec,
    sample: &SequenceSample,
) -> Result<f64> {
    let mut total = 0.0;
    for (x, y) in sample.iter() {
        total += eval_loss(loss, Prediction::Score(class.evaluate(h, x)?), x, y)?;
    }
    Ok(total / sample.len() as f64)
}

fn require_enumerable(class: &FunctionClassDescriptor) -> Result<()> {
    if class.is_enumerable() {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "uniform deviations need an enumerable (finite or threshold) class".into(),
        ))
    }
}

/// `sup_f risk(f) - L_hat(f)` over an enumerable class.
///
/// For thresholds the empirical risk is constant between consecutive sample
/// points, so each piece is probed at both ends of its closure (the risk is
/// continuous in `b` and monotone on either side of its minimiser). The
/// returned hypothesis is the canonical representative of the maximising
/// piece.
pub fn sup_deviation(
    class: &FunctionClassDescriptor,
    loss: &LossSpec,
    sample: &SequenceSample,
    risk: &dyn Fn(&Hypothesis) -> Result<f64>,
) -> Result<(Hypothesis, f64)> {
    sup_penalized_deviation(class, loss, sample, risk, &|_| 0.0)
}

/// `sup_f risk(f) - L_hat(f) - penalty(L_hat(f))`, computed like
/// [`sup_deviation`].
pub fn sup_penalized_deviation(
    class: &FunctionClassDescriptor,
    loss: &LossSpec,
    sample: &SequenceSample,
    risk: &dyn Fn(&Hypothesis) -> Result<f64>,
    penalty: &dyn Fn(f64) -> f64,
) -> Result<(Hypothesis, f64)> {
    require_enumerable(class)?;
    if sample.is_empty() {
        return Err(Error::Empty("sample"));
    }
    match &class.kind {
        ClassKind::Threshold1d => {
            let pieces = ThresholdPieces::new(threshold_loss_items(loss, sample, 1.0 / sample.len() as f64)?);
            let reps = canonical_thresholds(&pieces.breaks);
            let mut best = (Hypothesis::Threshold { b: reps[0] }, f64::NEG_INFINITY);
            for (k, &emp) in pieces.values.iter().enumerate() {
                let (lo, hi) = pieces.ends(k);
                let r = risk(&Hypothesis::Threshold { b: lo })?.max(risk(&Hypothesis::Threshold { b: hi })?);
                let dev = r - emp - penalty(emp);
                if dev > best.1 {
                    best = (Hypothesis::Threshold { b: reps[k] }, dev);
                }
            }
            Ok(best)
        }
        ClassKind::Finite { functions, .. } => {
            let mut best = (Hypothesis::Member { index: 0 }, f64::NEG_INFINITY);
            for index in 0..functions.len() {
                let h = Hypothesis::Member { index };
                let emp = member_empirical_risk(class, &h, loss, sample)?;
                let dev = risk(&h)? - emp - penalty(emp);
                if dev > best.1 {
                    best = (h, dev);
                }
            }
            Ok(best)
        }
        _ => unreachable!("checked enumerable"),
    }
}

/// Closed-form risk of a class member.
pub type RiskFn = Box<dyn Fn(&Hypothesis) -> Result<f64> + Send + Sync>;

/// Exact zero-one risk of members of `class` under the stationary marginal
/// of `spec`, where a closed form exists: thresholds on threshold-labelled
/// processes and finite classes on `{-1, +1}` inputs of the sign chain.
pub fn analytic_zero_one_risk(
    class: &FunctionClassDescriptor,
    spec: &ProcessSpec,
) -> Result<RiskFn> {
    let law = stationary_params(spec)?;
    match (&class.kind, &law) {
        (ClassKind::Threshold1d, MarginalLaw::ThresholdLabeled { .. }) => Ok(Box::new(move |h| match h {
            Hypothesis::Threshold { b } => law.threshold_risk(*b),
            other => Err(Error::Incompatible(format!("{other:?} is not a threshold"))),
        })),
        (ClassKind::Finite { .. }, MarginalLaw::SignPair { .. }) => {
            let class = class.clone();
            Ok(Box::new(move |h| {
                let mut risk = 0.0;
                for x in [-1.0, 1.0] {
                    let p_pos = law.sign_pair_positive(x)?;
                    let predicts_pos = class.evaluate(h, &[x])? >= 0.0;
                    risk += 0.5 * if predicts_pos { 1.0 - p_pos } else { p_pos };
                }
                Ok(risk)
            }))
        }
        _ => Err(Error::Unsupported(format!(
            "no closed-form zero-one risk for this class under {}",
            spec.id()
        ))),
    }
}

/// Fraction of `draws` with `f(x, theta) > 0`.
pub fn violation_rate(theta: &[f64], program: &ScenarioProgramSpec, draws: &SequenceSample) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::Empty("draws"));
    }
    let mut violated = 0usize;
    for i in 0..draws.len() {
        if program.constraint_value(draws.x(i), theta)? > 0.0 {
            violated += 1;
        }
    }
    Ok(violated as f64 / draws.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizationCheck {
    /// Frequency of `sup_f L(f) - L_hat(f) >= epsilon`.
    pub lhs_freq: f64,
    /// Frequency of `sup_f L_hat'(f) - L_hat(f) >= epsilon / 2`.
    pub rhs_freq: f64,
    /// `sqrt(se_lhs^2 + 4 se_rhs^2)`.
    pub combined_std_error: f64,
    pub holds: bool,
    pub replications: usize,
    pub seed: u64,
}

/// `sup_f L_hat_ghost(f) - L_hat_train(f)` over an enumerable class.
fn sup_ghost_gap(
    class: &FunctionClassDescriptor,
    loss: &LossSpec,
    train: &SequenceSample,
    ghost: &SequenceSample,
) -> Result<f64> {
    match &class.kind {
        ClassKind::Threshold1d => {
            let mut items = threshold_loss_items(loss, ghost, 1.0 / ghost.len() as f64)?;
            items.extend(
                threshold_loss_items(loss, train, 1.0 / train.len() as f64)?
                    .into_iter()
                    .map(|(x, p, q)| (x, -p, -q)),
            );
            let pieces = ThresholdPieces::new(items);
            Ok(pieces.values.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        }
        ClassKind::Finite { functions, .. } => {
            let mut best = f64::NEG_INFINITY;
            for index in 0..functions.len() {
                let h = Hypothesis::Member { index };
                let gap = member_empirical_risk(class, &h, loss, ghost)? - member_empirical_risk(class, &h, loss, train)?;
                best = best.max(gap);
            }
            Ok(best)
        }
        _ => unreachable!("checked enumerable"),
    }
}

/// Monte-Carlo check of the symmetrization inequality
/// `P(sup L - L_hat >= eps) <= 2 P(sup L_hat' - L_hat >= eps/2)` with the
/// ghost sample drawn independently from the stationary marginal.
pub fn verify_symmetrization(
    class: &FunctionClassDescriptor,
    loss: &LossSpec,
    spec: &ProcessSpec,
    n: usize,
    epsilon: f64,
    replications: usize,
    seed: u64,
) -> Result<SymmetrizationCheck> {
    require_enumerable(class)?;
    if loss.kind != LossKind::ZeroOne {
        return Err(Error::Incompatible("symmetrization check uses the zero-one loss".into()));
    }
    check_positive("epsilon", epsilon)?;
    if n == 0 || replications < 2 {
        return Err(Error::param("n, replications", "need n >= 1 and replications >= 2"));
    }
    let b = loss.range_b;
    if (n as f64) * epsilon * epsilon < 2.0 * b * b {
        return Err(Error::HypothesisViolated(format!(
            "symmetrization requires n eps^2 >= 2 B^2, got {} < {}",
            n as f64 * epsilon * epsilon,
            2.0 * b * b
        )));
    }
    let risk = analytic_zero_one_risk(class, spec)?;
    let risk = &risk;
    let hits = (0..replications as u64)
        .into_par_iter()
        .map(|r| {
            let rep = replication_seed(seed, r);
            let train = simulate_with(spec, n, rep, &mut stream(rep, 0, StreamRole::Path))?;
            let ghost = sample_marginal_with(spec, n, rep, &mut stream(rep, 0, StreamRole::Ghost))?;
            let (_, dev) = sup_deviation(class, loss, &train, &|h| risk(h))?;
            let gap = sup_ghost_gap(class, loss, &train, &ghost)?;
            Ok((dev >= epsilon, gap >= epsilon / 2.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let rf = replications as f64;
    let lhs = hits.iter().filter(|h| h.0).count() as f64 / rf;
    let rhs = hits.iter().filter(|h| h.1).count() as f64 / rf;
    let se_l2 = lhs * (1.0 - lhs) / rf;
    let se_r2 = rhs * (1.0 - rhs) / rf;
    let combined = (se_l2 + 4.0 * se_r2).sqrt();
    Ok(SymmetrizationCheck {
        lhs_freq: lhs,
        rhs_freq: rhs,
        combined_std_error: combined,
        holds: lhs <= 2.0 * rhs + 3.0 * combined,
        replications,
        seed,
    })
}
