//! Hypothesis classes and their capacity.
//!
//! Classifiers output labels in `{-1, +1}` through `sign(score)` with the
//! convention `sign(0) = +1`. Inputs are slices of `f64`; the one-dimensional
//! classes (finite grids and thresholds) read `x[0]`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};

/// Largest grid on which the VC dimension of a finite class is computed by
/// enumerating subsets.
const MAX_VC_ENUMERATION_GRID: usize = 20;

/// Largest function set accepted by [`covering_number_exhaustive`].
pub const MAX_EXHAUSTIVE_COVER: usize = 20;

/// `sign` with `sign(0) = +1`.
#[inline]
pub fn sign(value: f64) -> f64 {
    if value >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Kernel {
    /// `K(x, x') = exp(-||x - x'||^2 / (2 bandwidth^2))`.
    Gaussian { bandwidth: f64 },
}

impl Kernel {
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Kernel::Gaussian { bandwidth } => {
                let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-sq / (2.0 * bandwidth * bandwidth)).exp()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassKind {
    /// Explicit functions tabulated on a finite grid of scalar inputs:
    /// `functions[k][j]` is the value of function `k` at `grid[j]`.
    Finite {
        grid: Vec<f64>,
        functions: Vec<Vec<f64>>,
    },
    /// `x -> sign(x - b)` for `b` in R.
    Threshold1d,
    /// `x -> <w, x> (+ b)` with `||w|| <= radius`.
    LinearBall {
        dim: usize,
        radius: f64,
        offset: bool,
    },
    /// Ball of the given radius in the RKHS of `kernel`.
    KernelBall { kernel: Kernel, radius: f64 },
    /// `codepoints` vectors in R^dim, each of norm at most `radius`.
    Codebook {
        codepoints: usize,
        dim: usize,
        radius: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionClassDescriptor {
    pub kind: ClassKind,
    /// Known VC dimension of the induced classifiers, when positive and known.
    pub vc_dim: Option<usize>,
    /// Range of the real-valued outputs; `None` when unbounded.
    pub output_range: Option<Interval>,
}

/// A single member of an enumerable class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Hypothesis {
    Threshold { b: f64 },
    Member { index: usize },
}

impl FunctionClassDescriptor {
    pub fn finite(grid: Vec<f64>, functions: Vec<Vec<f64>>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::Empty("finite class grid"));
        }
        if functions.is_empty() {
            return Err(Error::Empty("finite class functions"));
        }
        if grid.iter().any(|g| !g.is_finite()) {
            return Err(Error::param("grid", "grid points must be finite"));
        }
        let distinct: HashSet<u64> = grid.iter().map(|g| g.to_bits()).collect();
        if distinct.len() != grid.len() {
            return Err(Error::param("grid", "grid points must be distinct"));
        }
        for f in &functions {
            if f.len() != grid.len() {
                return Err(Error::param(
                    "functions",
                    format!("expected {} values per function, got {}", grid.len(), f.len()),
                ));
            }
            if f.iter().any(|v| !v.is_finite()) {
                return Err(Error::param("functions", "values must be finite"));
            }
        }
        let low = functions.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
        let high = functions.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
        let vc_dim = if grid.len() <= MAX_VC_ENUMERATION_GRID {
            Some(finite_vc_dimension(&functions)).filter(|&d| d > 0)
        } else {
            None
        };
        Ok(Self {
            kind: ClassKind::Finite { grid, functions },
            vc_dim,
            output_range: Some(Interval { low, high }),
        })
    }

    pub fn threshold1d() -> Self {
        Self {
            kind: ClassKind::Threshold1d,
            vc_dim: Some(1),
            output_range: Some(Interval { low: -1.0, high: 1.0 }),
        }
    }

    pub fn linear_ball(dim: usize, radius: f64, offset: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "must be >= 1"));
        }
        check_positive("radius", radius)?;
        Ok(Self {
            kind: ClassKind::LinearBall { dim, radius, offset },
            vc_dim: Some(if offset { dim + 1 } else { dim }),
            output_range: None,
        })
    }

    pub fn kernel_ball(kernel: Kernel, radius: f64) -> Result<Self> {
        check_positive("radius", radius)?;
        let Kernel::Gaussian { bandwidth } = &kernel;
        check_positive("bandwidth", *bandwidth)?;
        Ok(Self {
            kind: ClassKind::KernelBall { kernel, radius },
            vc_dim: None,
            output_range: Some(Interval { low: -radius, high: radius }),
        })
    }

    pub fn codebook(codepoints: usize, dim: usize, radius: f64) -> Result<Self> {
        if codepoints == 0 {
            return Err(Error::param("codepoints", "must be >= 1"));
        }
        if dim == 0 {
            return Err(Error::param("dim", "must be >= 1"));
        }
        check_positive("radius", radius)?;
        Ok(Self {
            kind: ClassKind::Codebook { codepoints, dim, radius },
            vc_dim: None,
            output_range: None,
        })
    }

    /// True for classes whose dichotomies can be enumerated exhaustively.
    pub fn is_enumerable(&self) -> bool {
        matches!(self.kind, ClassKind::Finite { .. } | ClassKind::Threshold1d)
    }

    /// Real-valued output of `h` at `x`.
    pub fn evaluate(&self, h: &Hypothesis, x: &[f64]) -> Result<f64> {
        match (&self.kind, h) {
            (ClassKind::Threshold1d, Hypothesis::Threshold { b }) => Ok(sign(x[0] - b)),
            (ClassKind::Finite { grid, functions }, Hypothesis::Member { index }) => {
                let f = functions.get(*index).ok_or_else(|| {
                    Error::param("index", format!("class has {} members", functions.len()))
                })?;
                Ok(f[grid_index(grid, x[0])?])
            }
            _ => Err(Error::Unsupported(format!(
                "hypothesis {h:?} is not a member of this class"
            ))),
        }
    }
}

fn grid_index(grid: &[f64], x: f64) -> Result<usize> {
    grid.iter()
        .position(|&g| g == x)
        .ok_or_else(|| Error::param("points", format!("{x} is not on the class grid")))
}

/// Largest subset size of the grid shattered by the sign patterns of
/// `functions`.
fn finite_vc_dimension(functions: &[Vec<f64>]) -> usize {
    let m = functions[0].len();
    let patterns: Vec<u32> = functions
        .iter()
        .map(|f| {
            f.iter()
                .enumerate()
                .fold(0u32, |acc, (j, &v)| if v >= 0.0 { acc | (1 << j) } else { acc })
        })
        .collect();
    let mut best = 0;
    for subset in 1u32..(1u32 << m) {
        let size = subset.count_ones() as usize;
        if size <= best || (1usize << size) > patterns.len() {
            continue;
        }
        let realized: HashSet<u32> = patterns.iter().map(|p| p & subset).collect();
        if realized.len() == 1 << size {
            best = size;
        }
    }
    best
}

/// Exact number of distinct label vectors the class realises on `points`.
pub fn growth_function_exact(class: &FunctionClassDescriptor, points: &[f64]) -> Result<u64> {
    match &class.kind {
        ClassKind::Finite { grid, functions } => {
            let idx = points
                .iter()
                .map(|&x| grid_index(grid, x))
                .collect::<Result<Vec<_>>>()?;
            let labelings: HashSet<Vec<bool>> = functions
                .iter()
                .map(|f| idx.iter().map(|&j| f[j] >= 0.0).collect())
                .collect();
            Ok(labelings.len() as u64)
        }
        ClassKind::Threshold1d => {
            let mut sorted = points.to_vec();
            sorted.sort_by(f64::total_cmp);
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::param("points", "threshold points must be pairwise distinct"));
            }
            let labelings: HashSet<Vec<bool>> = canonical_thresholds(&sorted)
                .into_iter()
                .map(|b| points.iter().map(|&x| x >= b).collect())
                .collect();
            Ok(labelings.len() as u64)
        }
        _ => Err(Error::Unsupported(
            "growth function enumeration needs a finite or threshold class".into(),
        )),
    }
}

/// One threshold per dichotomy of sorted distinct points: below all points,
/// between each consecutive pair, above all points.
pub fn canonical_thresholds(sorted: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(sorted.len() + 1);
    match (sorted.first(), sorted.last()) {
        (Some(&lo), Some(&hi)) => {
            out.push(lo - 1.0);
            out.extend(sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])));
            out.push(hi + 1.0);
        }
        _ => out.push(0.0),
    }
    out
}

/// Sauer-lemma cap on the growth function: `2^n` when `n < d`, otherwise
/// `min(2^n, (e n / d)^d)`.
pub fn sauer_growth_bound(d_vc: usize, n: usize) -> Result<f64> {
    if d_vc == 0 {
        return Err(Error::param("d_vc", "must be >= 1"));
    }
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    let full = 2f64.powi(n.min(i32::MAX as usize) as i32);
    if n < d_vc {
        return Ok(full);
    }
    let (d, n) = (d_vc as f64, n as f64);
    Ok(full.min((std::f64::consts::E * n / d).powf(d)))
}

/// `d_{2,t}(f, g) = sqrt(mean |f(t_i) - g(t_i)|^2)` on evaluation vectors.
pub fn pseudo_metric(f: &[f64], g: &[f64]) -> f64 {
    debug_assert_eq!(f.len(), g.len());
    let n = f.len() as f64;
    (f.iter().zip(g).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n).sqrt()
}

/// Evaluation points together with cached evaluations of a finite set of
/// candidate functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoMetricSample {
    points: Vec<Vec<f64>>,
    /// `evaluations[k][i]` is function `k` at point `i`.
    evaluations: Vec<Vec<f64>>,
}

impl PseudoMetricSample {
    pub fn from_evaluations(points: Vec<Vec<f64>>, evaluations: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("pseudo-metric evaluation points"));
        }
        for row in &evaluations {
            if row.len() != points.len() {
                return Err(Error::param("evaluations", "one value per point is required"));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::param("evaluations", "values must be finite"));
            }
        }
        Ok(Self { points, evaluations })
    }

    #[allow(clippy::type_complexity)]
    pub fn from_functions(points: Vec<Vec<f64>>, functions: &[&dyn Fn(&[f64]) -> f64]) -> Result<Self> {
        let evaluations = functions
            .iter()
            .map(|f| points.iter().map(|p| f(p)).collect())
            .collect();
        Self::from_evaluations(points, evaluations)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn evaluations(&self) -> &[Vec<f64>] {
        &self.evaluations
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn num_functions(&self) -> usize {
        self.evaluations.len()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        pseudo_metric(&self.evaluations[i], &self.evaluations[j])
    }

    /// Largest pairwise pseudo-distance; zero for fewer than two functions.
    pub fn diameter(&self) -> f64 {
        let k = self.num_functions();
        let mut d = 0.0f64;
        for i in 0..k {
            for j in i + 1..k {
                d = d.max(self.distance(i, j));
            }
        }
        d
    }
}

/// Size of a greedy farthest-point proper `epsilon`-net: every function ends
/// up at distance `< epsilon` from a chosen centre. An upper bound on the
/// covering number, non-increasing in `epsilon`.
pub fn covering_number_greedy(sample: &PseudoMetricSample, epsilon: f64) -> Result<usize> {
    check_positive("epsilon", epsilon)?;
    let k = sample.num_functions();
    if k == 0 {
        return Err(Error::Empty("function set"));
    }
    let mut nearest: Vec<f64> = (0..k).map(|j| sample.distance(0, j)).collect();
    let mut centres = 1;
    loop {
        let (far, &dist) = nearest
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("non-empty");
        if dist < epsilon {
            return Ok(centres);
        }
        centres += 1;
        for (j, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sample.distance(far, j));
        }
    }
}

/// Exact covering number by searching subsets in order of increasing size.
/// Limited to [`MAX_EXHAUSTIVE_COVER`] functions.
pub fn covering_number_exhaustive(sample: &PseudoMetricSample, epsilon: f64) -> Result<usize> {
    check_positive("epsilon", epsilon)?;
    let k = sample.num_functions();
    if k == 0 {
        return Err(Error::Empty("function set"));
    }
    if k > MAX_EXHAUSTIVE_COVER {
        return Err(Error::Unsupported(format!(
            "exhaustive covering search is limited to {MAX_EXHAUSTIVE_COVER} functions"
        )));
    }
    // covers[c] = bitmask of functions within epsilon of centre c
    let covers: Vec<u32> = (0..k)
        .map(|c| {
            (0..k)
                .filter(|&j| sample.distance(c, j) < epsilon)
                .fold(0u32, |m, j| m | (1 << j))
        })
        .collect();
    let all = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    let mut best = k;
    for subset in 1u32..=all {
        let size = subset.count_ones() as usize;
        if size >= best {
            continue;
        }
        let covered = (0..k)
            .filter(|c| subset & (1 << c) != 0)
            .fold(0u32, |m, c| m | covers[c]);
        if covered == all {
            best = size;
        }
    }
    Ok(best)
}
