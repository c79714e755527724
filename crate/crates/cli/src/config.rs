//! Run configuration, read from JSON. Unknown fields are rejected at every
//! level so a typo never silently falls back to a default.

use serde::{Deserialize, Serialize};

use seqrisk::bounds::{Capacity, MomentInput, RadFamily, RademacherVariant};
use seqrisk::classes::ClassKind;
use seqrisk::scenario::ViolationParams;
use seqrisk::{CertifyMethod, FunctionClassDescriptor, ProcessSpec, ScenarioProgramSpec};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub command: Command,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Command {
    Plan(PlanConfig),
    Bound(BoundConfig),
    Simulate(SimulateConfig),
    Rad(RadConfig),
    Validate(ValidateConfig),
    Scenario(ScenarioConfig),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Plan(_) => "plan",
            Command::Bound(_) => "bound",
            Command::Simulate(_) => "simulate",
            Command::Rad(_) => "rad",
            Command::Validate(_) => "validate",
            Command::Scenario(_) => "scenario",
        }
    }
}

/// Sample size for a scenario program at `(epsilon, delta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub params: ViolationParams,
}

/// One risk bound evaluated at every sample size in `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    pub n: Vec<usize>,
    pub delta: f64,
    pub bound: BoundKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundKind {
    Vc {
        emp_risk: f64,
        capacity: Capacity,
    },
    VcRelative {
        emp_risk: f64,
        capacity: Capacity,
        #[serde(default = "yes")]
        stationary: bool,
    },
    /// `d_vc` of the induced threshold classifiers.
    Regression {
        emp_risk: f64,
        d_vc: usize,
        range_b: f64,
    },
    Rademacher {
        emp_risk: f64,
        range_b: f64,
        variant: RademacherVariant,
    },
    /// Marginal bound with `R_bar` from a class family's closed form.
    RademacherClass {
        emp_risk: f64,
        range_b: f64,
        family: RadFamily,
        moment: MomentInput,
    },
    /// `mu = n / 2a` blocks of length `a`.
    Mixing {
        emp_risk: f64,
        rad_mu: f64,
        range_b: f64,
        a: usize,
        beta_a: f64,
    },
    /// Chaining bound on the Rademacher complexity of a linear class with
    /// the spectral covering estimate, minimized over the depth.
    Chaining {
        diameter: f64,
        a: f64,
        sum_sq_norms: f64,
        lipschitz: f64,
    },
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub process: ProcessSpec,
    pub n: usize,
}

/// Monte-Carlo empirical Rademacher complexity of `class` on one path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadConfig {
    pub class: ClassKind,
    pub process: ProcessSpec,
    pub n: usize,
    pub sign_draws: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    pub process: ProcessSpec,
    pub n: usize,
    pub delta: f64,
    pub replications: usize,
    pub experiment: Experiment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Threshold classifiers against the basic VC bound.
    Vc,
    /// Threshold classifiers against the relative-deviation bound.
    Relative,
    /// Margin-loss linear scores against the marginal Rademacher bound.
    Margin { gamma: f64, lambda: f64 },
    /// Threshold classifiers, ghost-sample symmetrization at `epsilon`.
    Symmetrization { epsilon: f64 },
    /// Scenario certificates on independent paths. `n` is ignored: every
    /// replication uses the sample size planned from `epsilon` and `delta`.
    Scenario {
        program: ScenarioProgramSpec,
        epsilon: f64,
        draws: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub program: ScenarioProgramSpec,
    pub process: ProcessSpec,
    pub epsilon: f64,
    pub delta: f64,
    pub method: CertifyMethod,
}

/// Builds a class with its capacity metadata filled in.
pub fn build_class(kind: &ClassKind) -> seqrisk::Result<FunctionClassDescriptor> {
    match kind.clone() {
        ClassKind::Finite { grid, functions } => FunctionClassDescriptor::finite(grid, functions),
        ClassKind::Threshold1d => Ok(FunctionClassDescriptor::threshold1d()),
        ClassKind::LinearBall { dim, radius, offset } => FunctionClassDescriptor::linear_ball(dim, radius, offset),
        ClassKind::KernelBall { kernel, radius } => FunctionClassDescriptor::kernel_ball(kernel, radius),
        ClassKind::Codebook { codepoints, dim, radius } => FunctionClassDescriptor::codebook(codepoints, dim, radius),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Applies command-line overrides.
    pub fn resolve(mut self, seed: Option<u64>, replications: Option<usize>) -> Result<Self, CliError> {
        if let Some(seed) = seed {
            self.seed = seed;
        }
        if let Some(r) = replications {
            match &mut self.command {
                Command::Validate(v) => v.replications = r,
                other => {
                    return Err(CliError::Config(format!(
                        "--replications applies to validate, not {}",
                        other.name()
                    )))
                }
            }
        }
        Ok(self)
    }
}
