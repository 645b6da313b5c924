//! Oriented list defective coloring in `O(h)` rounds.
//!
//! [`single_defect_oldc`] and [`multi_defect_oldc`] form the basic
//! algorithm: nodes are bucketed into classes by `β_v/(d_v+1)`, every node
//! looks up a family of candidate sets in a shared zero-round table, keeps
//! one candidate set with few conflicts and finally picks the least
//! contended color of it, classes in descending order. [`two_phase_oldc`]
//! and [`main_oldc`] refine this so a node only competes with out-neighbors
//! of its own class when choosing candidates.

mod basic;
mod full;
mod two_phase;

pub use basic::{class_of, multi_defect_oldc, single_defect_oldc, SingleDefectInput};
pub use full::{class_window, lambda_exponent, lambda_profile, main_oldc, ClassChoice, LambdaProfile, NodeProfile};
pub use two_phase::{two_phase_oldc, ClassBudget};

use crate::conflict::{ConflictParams, DEFAULT_TABLE_CAP};
use crate::error::{Error, Result};
use crate::graph::{Color, ColoredGraph, ColoringOutput, LdcInstance};
use crate::scalar::Scalar;
use crate::sim::{Budget, RoundTrace};
use serde::{Deserialize, Serialize};

/// Tunables shared by all OLDC variants.
#[derive(Debug, Clone)]
pub struct OldcConfig<S: Scalar> {
    /// The list-size constant; one value serves every site that needs one.
    pub alpha: S,
    /// Replaces the conflict threshold `τ` of the color-selection tables.
    pub tau_override: Option<u64>,
    /// Replaces `τ′`. Without it an overridden `τ` gets `τ′ = max(2, 2^{τ−⌈2h+log₂2e⌉})`.
    pub tau_prime_override: Option<u64>,
    /// Replaces the threshold of the class-assignment stage of [`main_oldc`].
    pub taubar_override: Option<u64>,
    /// Number of classes; must cover every class that occurs.
    pub h_override: Option<u32>,
    /// Class proximity window of [`two_phase_oldc`]; defaults to `h`.
    pub q: Option<u64>,
    /// Limit on candidate sets examined per table.
    pub table_cap: u64,
    pub budget: Budget,
}

impl<S: Scalar> Default for OldcConfig<S> {
    fn default() -> Self {
        OldcConfig {
            alpha: S::from_u64(16),
            tau_override: None,
            tau_prime_override: None,
            taubar_override: None,
            h_override: None,
            q: None,
            table_cap: DEFAULT_TABLE_CAP,
            budget: Budget::default(),
        }
    }
}

impl<S: Scalar> OldcConfig<S> {
    /// Small thresholds that keep table construction tractable.
    pub fn scaled(tau: u64) -> Self {
        OldcConfig { tau_override: Some(tau), ..Self::default() }
    }

    pub fn conflict_params(&self, h: u32, space: u64, m: u64, g: u64) -> Result<ConflictParams> {
        self.params_with(self.tau_override, h, space, m, g)
    }

    fn params_with(&self, tau: Option<u64>, h: u32, space: u64, m: u64, g: u64) -> Result<ConflictParams> {
        match (tau, self.tau_prime_override) {
            (None, None) => Ok(ConflictParams::formula(h, space, m, g)),
            (tau, tau_prime) => {
                let tau = tau.unwrap_or_else(|| crate::conflict::tau_formula(h, space, m));
                let tau_prime = tau_prime.unwrap_or_else(|| {
                    let e = crate::conflict::tau_prime_exponent(h, tau).min(62);
                    let cap = if tau < 63 { 1u64 << tau } else { u64::MAX };
                    (1u64 << e).max(2).min(cap)
                });
                ConflictParams::scaled(h, space, m, g, tau, tau_prime)
            }
        }
    }
}

/// Per-node record of how the color was reached.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDiag {
    /// `None` for nodes whose defect covers their whole out-degree.
    pub class: Option<u32>,
    /// Same-or-lower-class out-neighbors whose candidate set conflicts with ours.
    pub conflicting: u64,
    /// Out-neighbors ignored while choosing the color.
    pub ignored: u64,
    /// Contention of the chosen color.
    pub frequency: u64,
    /// Defect the node worked with.
    pub defect: u64,
}

/// Result of an OLDC run. Outputs are validated before they are returned.
#[derive(Debug, Clone)]
pub struct OldcRun {
    pub output: ColoringOutput,
    pub trace: RoundTrace,
    pub diagnostics: Vec<NodeDiag>,
    pub params: ConflictParams,
    pub h: u32,
}

pub(crate) fn out_neighbors(graph: &ColoredGraph, v: usize) -> &[usize] {
    graph.out_neighbors(v).unwrap_or_else(|| graph.neighbors(v))
}

/// Largest `d′ ≤ d` with `d′+1` a power of two.
pub(crate) fn round_defect(d: u64) -> u64 {
    (1u64 << (63 - (d + 1).leading_zeros())) - 1
}

/// Refuses to hand out a coloring that breaks a defect.
pub(crate) fn validated(graph: &ColoredGraph, inst: &LdcInstance, colors: Vec<Color>) -> Result<ColoringOutput> {
    let out = ColoringOutput::from_colors(colors);
    let report = crate::graph::validate_ldc(graph, inst, &out)?;
    if !report.valid {
        return Err(Error::InvariantViolated(format!("coloring violates defects at nodes {:?}", report.violations)));
    }
    Ok(out)
}
