//! Bound calculators.
//!
//! All logarithms are natural and every value is computed in double
//! precision. Each risk bound is returned as a [`RiskBoundReport`] whose
//! `theorem_tag` names the inequality it instantiates (see [`tags`]).

mod chaining;
mod concentration;
mod rademacher;
mod vc;

pub use chaining::{chaining_rad_upper, chaining_rad_upper_optimal, spectral_log_covering, MAX_CHAINING_DEPTH};
pub use concentration::{
    binomial_pmf, binomial_quarter_lemma_holds, binomial_upper_tail, concentration_tail, TailKind,
};
pub use rademacher::{
    class_rad_upper, mixing_reference_bound, rademacher_risk_bound, MixingOutcome, MomentInput,
    RadFamily, RademacherVariant,
};
pub use vc::{linear_system_induced_vc, regression_vc_bound, vc_bound, vc_relative_bound, Capacity};

use serde::{Deserialize, Serialize};

/// Identifiers of the inequalities behind each report.
pub mod tags {
    pub const VC_BASIC: &str = "vc-dependent: L <= L_hat + 2 sqrt(2 (log Pi(2n) + log(2/delta)) / n)";
    pub const VC_RELATIVE: &str =
        "vc-relative-deviation-stationary: L <= L_hat + 2 sqrt(L_hat c) + 4 c, c = (log Pi(2n) + log(4/delta)) / n";
    pub const VC_REGRESSION: &str =
        "vc-regression-reduction: L <= L_hat + 2 B sqrt(2 (log Pi(2n) + log(2/delta)) / n)";
    pub const RAD_TWO_SIDED: &str =
        "rademacher-ghost: L <= L_hat + R(Z) + R(Z') + B sqrt(log(1/delta) / 2n)";
    pub const RAD_WORST_CASE: &str =
        "rademacher-worst-case: L <= L_hat + 2 sup_z R_hat_z + B sqrt(log(1/delta) / 2n)";
    pub const RAD_MARGINAL: &str =
        "rademacher-marginal: L <= L_hat + 2 R_bar + B sqrt(log(1/delta) / 2n)";
    pub const MIXING_REFERENCE: &str =
        "beta-mixing-reference: L <= L_hat + 2 R_bar_mu + B sqrt(log(1/(delta - 4(mu-1)beta(a))) / 2 mu)";
}

/// A computed risk bound split into its additive parts.
///
/// For bounds whose slack is a single square root of a sum, the
/// concentration term is the slack evaluated with zero capacity and the
/// complexity term is the remainder, so the parts always add up.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskBoundReport {
    pub bound_value: f64,
    pub empirical_risk_term: f64,
    pub complexity_term: f64,
    pub concentration_term: f64,
    pub delta: f64,
    pub theorem_tag: String,
    pub n: usize,
}

impl RiskBoundReport {
    pub(crate) fn new(
        tag: &str,
        n: usize,
        delta: f64,
        empirical: f64,
        complexity: f64,
        concentration: f64,
    ) -> Self {
        Self {
            bound_value: empirical + complexity + concentration,
            empirical_risk_term: empirical,
            complexity_term: complexity,
            concentration_term: concentration,
            delta,
            theorem_tag: tag.to_string(),
            n,
        }
    }

    /// `bound_value - empirical_risk_term`.
    pub fn slack(&self) -> f64 {
        self.complexity_term + self.concentration_term
    }
}

impl std::fmt::Display for RiskBoundReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "bound {:.5e} = {:.5e} (empirical) + {:.5e} (complexity) + {:.5e} (concentration) [n={}, delta={}, {}]",
            self.bound_value,
            self.empirical_risk_term,
            self.complexity_term,
            self.concentration_term,
            self.n,
            self.delta,
            self.theorem_tag
        )
    }
}
