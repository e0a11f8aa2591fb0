//! Zeta, chi and related constants.
//!
//! Critical-line values use Euler–Maclaurin up to height 5000 and the
//! Riemann–Siegel formula with four correction terms above.  Real-axis
//! values use Euler–Maclaurin for σ > 1 and the accelerated alternating
//! series for 0 < σ < 1.

pub(crate) mod critical;
pub(crate) mod gamma;
mod real;

pub use critical::{
    critical_parts, zeta_critical, zeta_critical_estimate, CriticalParts, Estimate, RS_THRESHOLD,
};
pub use gamma::{chi_general, chi_half, ln_gamma, riemann_siegel_theta};
pub use real::{gamma_constants, zeta_real, zeta_real_deriv};

use serde::{Deserialize, Serialize};

/// Accuracy target and work budget for a single evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Absolute error tolerance.
    pub target_abs_error: f64,
    /// Maximum number of main-sum terms.
    pub series_terms_cap: usize,
}

impl EvalConfig {
    pub fn new(target_abs_error: f64, series_terms_cap: usize) -> crate::Result<Self> {
        if !(target_abs_error > 0.0) {
            return Err(crate::Error::InvalidInput(
                "target_abs_error must be positive".into(),
            ));
        }
        if series_terms_cap < 16 {
            return Err(crate::Error::InvalidInput(
                "series_terms_cap must be at least 16".into(),
            ));
        }
        Ok(EvalConfig {
            target_abs_error,
            series_terms_cap,
        })
    }

    /// Default for real-axis constants.
    pub fn constants() -> Self {
        EvalConfig {
            target_abs_error: 1e-10,
            series_terms_cap: 1 << 20,
        }
    }
}

impl Default for EvalConfig {
    /// Default for critical-line values.
    fn default() -> Self {
        EvalConfig {
            target_abs_error: 1e-8,
            series_terms_cap: 1 << 20,
        }
    }
}
