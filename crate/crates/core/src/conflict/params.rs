use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Threshold and family-size parameters of the conflict relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConflictParams {
    /// Number of classes; classes are `1..=h`.
    pub h: u32,
    pub color_space_size: u64,
    pub m: u64,
    pub g: u64,
    /// Two candidate sets conflict once their proximity count reaches `tau`.
    pub tau: u64,
    /// Two families conflict once `tau_prime` members of one hit the other.
    pub tau_prime: u64,
    pub overridden: bool,
}

fn log2_log2(x: u64) -> f64 {
    if x <= 2 {
        0.0
    } else {
        (x as f64).log2().log2()
    }
}

/// `⌈8h + 2·log₂log₂|𝒞| + 2·log₂log₂ m + 16⌉`.
pub fn tau_formula(h: u32, color_space_size: u64, m: u64) -> u64 {
    (8.0 * h as f64 + 2.0 * log2_log2(color_space_size) + 2.0 * log2_log2(m) + 16.0).ceil() as u64
}

/// Exponent of the family size: `τ − ⌈2h + log₂(2e)⌉`.
pub fn tau_prime_exponent(h: u32, tau: u64) -> u64 {
    let sub = (2.0 * h as f64 + (2.0 * std::f64::consts::E).log2()).ceil() as u64;
    tau.saturating_sub(sub)
}

impl ConflictParams {
    /// Unscaled parameters. `tau_prime` saturates at `u64::MAX`.
    pub fn formula(h: u32, color_space_size: u64, m: u64, g: u64) -> Self {
        let tau = tau_formula(h, color_space_size, m);
        let e = tau_prime_exponent(h, tau);
        let tau_prime = if e >= 64 { u64::MAX } else { 1u64 << e };
        ConflictParams { h, color_space_size, m, g, tau, tau_prime, overridden: false }
    }

    /// Explicit `(τ, τ′)`; requires both ≥ 1 and `τ′ ≤ 2^τ`.
    pub fn scaled(h: u32, color_space_size: u64, m: u64, g: u64, tau: u64, tau_prime: u64) -> Result<Self> {
        if tau == 0 || tau_prime == 0 {
            return Err(Error::InfeasibleParams("tau and tau' must be at least 1".into()));
        }
        if tau < 64 && tau_prime > 1u64 << tau {
            return Err(Error::InfeasibleParams(format!("tau' = {tau_prime} exceeds 2^{tau}")));
        }
        Ok(ConflictParams { h, color_space_size, m, g, tau, tau_prime, overridden: true })
    }

    /// Candidate set size `2^class · τ`.
    pub fn subset_size(&self, class: u32) -> u64 {
        self.tau << class
    }

    /// Family size `2^h · τ′`.
    pub fn family_size(&self) -> u64 {
        self.tau_prime.saturating_mul(1u64 << self.h.min(63))
    }

    /// Family size for a single class, `2^class · τ′`.
    pub fn class_family_size(&self, class: u32) -> u64 {
        self.tau_prime.saturating_mul(1u64 << class.min(63))
    }
}
