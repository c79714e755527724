//! Bounded losses and the models evaluated with them.

use serde::{Deserialize, Serialize};

use crate::classes::sign;
use crate::error::{check_positive, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossKind {
    ZeroOne,
    /// `min{1, max{0, (1 - y g(x)) / gamma}}`.
    Margin { gamma: f64 },
    /// `(y - clip(y_hat))^2` with predictions clipped to `[-bound, bound]`.
    ClippedSquared { bound: f64 },
    /// Squared distance to the nearest of `codepoints` codepoints, all inside
    /// the ball of the given radius.
    VqNearest { codepoints: usize, radius: f64 },
}

/// A bounded loss with its range `[0, range_b]` and the Lipschitz constant of
/// its scalar link.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub kind: LossKind,
    pub range_b: f64,
    pub lipschitz: f64,
}

impl LossSpec {
    pub fn zero_one() -> Self {
        Self {
            kind: LossKind::ZeroOne,
            range_b: 1.0,
            lipschitz: 1.0,
        }
    }

    pub fn margin(gamma: f64) -> Result<Self> {
        check_positive("gamma", gamma)?;
        Ok(Self {
            kind: LossKind::Margin { gamma },
            range_b: 1.0,
            lipschitz: 1.0 / gamma,
        })
    }

    /// Labels are assumed to lie in `[-bound, bound]`, so the loss lies in
    /// `[0, 4 bound^2]` and the link `u -> u^2` is `4 bound`-Lipschitz there.
    pub fn clipped_squared(bound: f64) -> Result<Self> {
        check_positive("bound", bound)?;
        Ok(Self {
            kind: LossKind::ClippedSquared { bound },
            range_b: 4.0 * bound * bound,
            lipschitz: 4.0 * bound,
        })
    }

    pub fn vq_nearest(codepoints: usize, radius: f64) -> Result<Self> {
        if codepoints == 0 {
            return Err(Error::param("codepoints", "must be >= 1"));
        }
        check_positive("radius", radius)?;
        Ok(Self {
            kind: LossKind::VqNearest { codepoints, radius },
            range_b: 4.0 * radius * radius,
            lipschitz: 4.0 * radius,
        })
    }
}

/// What a model hands to a loss.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Prediction<'a> {
    /// Real-valued score; classifiers predict `sign(score)`.
    Score(f64),
    Codebook(&'a [Vec<f64>]),
}

pub trait Model {
    fn predict(&self, x: &[f64]) -> Prediction<'_>;
}

/// `x -> x[0] - b`, i.e. the classifier `sign(x - b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdModel {
    pub b: f64,
}

impl Model for ThresholdModel {
    fn predict(&self, x: &[f64]) -> Prediction<'_> {
        Prediction::Score(x[0] - self.b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub offset: f64,
}

impl Model for LinearModel {
    fn predict(&self, x: &[f64]) -> Prediction<'_> {
        let s: f64 = self.weights.iter().zip(x).map(|(w, v)| w * v).sum();
        Prediction::Score(s + self.offset)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub codepoints: Vec<Vec<f64>>,
}

impl Model for Codebook {
    fn predict(&self, _x: &[f64]) -> Prediction<'_> {
        Prediction::Codebook(&self.codepoints)
    }
}

/// Wraps a scoring closure as a [`Model`].
pub struct ScoreFn<F>(pub F);

impl<F: Fn(&[f64]) -> f64> Model for ScoreFn<F> {
    fn predict(&self, x: &[f64]) -> Prediction<'_> {
        Prediction::Score((self.0)(x))
    }
}

/// Piecewise-linear margin loss on the signed score `y g(x)`.
#[inline]
pub fn margin_loss(gamma: f64, signed_score: f64) -> f64 {
    ((1.0 - signed_score) / gamma).clamp(0.0, 1.0)
}

pub fn eval_loss(spec: &LossSpec, prediction: Prediction<'_>, x: &[f64], y: f64) -> Result<f64> {
    match (&spec.kind, prediction) {
        (LossKind::ZeroOne, Prediction::Score(s)) => Ok(if sign(s) != y { 1.0 } else { 0.0 }),
        (LossKind::Margin { gamma }, Prediction::Score(s)) => Ok(margin_loss(*gamma, y * s)),
        (LossKind::ClippedSquared { bound }, Prediction::Score(s)) => {
            let r = y - s.clamp(-bound, *bound);
            Ok(r * r)
        }
        (LossKind::VqNearest { codepoints, .. }, Prediction::Codebook(points)) => {
            if points.is_empty() || points.len() > *codepoints {
                return Err(Error::Incompatible(format!(
                    "codebook has {} codepoints, loss expects 1..={codepoints}",
                    points.len()
                )));
            }
            Ok(points
                .iter()
                .map(|c| c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                .fold(f64::INFINITY, f64::min))
        }
        (LossKind::VqNearest { .. }, Prediction::Score(_)) => Err(Error::Incompatible(
            "quantization loss needs a codebook, got a scalar score".into(),
        )),
        (kind, Prediction::Codebook(_)) => Err(Error::Incompatible(format!(
            "{kind:?} needs a scalar score, got a codebook"
        ))),
    }
}
