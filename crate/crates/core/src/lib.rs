//! Uniform risk bounds for learning from dependent data sequences.
//!
//! The crate is organised around the pieces needed to state, compute and
//! empirically check generalization bounds when the training sample is a
//! single path of a dependent (but stationary) process:
//!
//! * [`classes`]: hypothesis classes and their capacity (growth function,
//!   Sauer bound, empirical pseudo-metric, covering numbers).
//! * [`losses`]: bounded losses and the models that feed them.
//! * [`processes`]: seeded simulation of dependent sequences together with
//!   independent draws from their stationary marginals (ghost samples).
//! * [`estimators`]: Monte-Carlo and exact estimators of risks, Rademacher
//!   complexities and uniform deviations.
//! * [`bounds`]: VC, relative-deviation, Rademacher, chaining and
//!   mixing-based bound calculators.
//! * [`scenario`]: pseudo-linear scenario programs, their solver, sample
//!   size planners and feasibility certificates.
//! * [`validation`]: replicated coverage experiments tying all of the above
//!   together.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod classes;
pub mod error;
pub mod estimators;
pub mod losses;
pub mod processes;
pub mod rng;
pub mod scenario;
pub mod validation;

pub use bounds::{Capacity, RiskBoundReport};
pub use classes::{ClassKind, FunctionClassDescriptor, Hypothesis, PseudoMetricSample};
pub use error::{Error, Result};
pub use estimators::MonteCarloEstimate;
pub use losses::{LossKind, LossSpec, Model, Prediction};
pub use processes::{MarginalLaw, ProcessSpec, SequenceSample};
pub use scenario::{Certificate, CertifyMethod, ScenarioProgramSpec};
