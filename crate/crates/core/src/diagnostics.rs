use serde::{Deserialize, Serialize};

/// Non-fatal events recorded while computing a test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// A negative variance estimate (floating-point cancellation) was set to 0.
    Sigma2Clamped {
        group: String,
        raw: f64,
    },
    Gamma2Clamped {
        group: String,
        raw: f64,
    },
    /// The estimated correlation fell outside `[-1, 1]` and was clamped.
    XiClamped {
        group: String,
        raw: f64,
    },
    /// More eigenvalues than the limiting rank survived the threshold; the
    /// smallest ones were dropped.
    EigenvaluesCapped {
        kept: usize,
        dropped: Vec<f64>,
    },
    /// Quadrature did not converge and the Monte Carlo estimate was used.
    QuadratureFallback {
        reason: String,
    },
    /// Method that produced the reported p-value.
    PValueMethod {
        method: String,
    },
    /// A p-value of 1 was clipped before the Fisher-z transform.
    PValueClipped {
        index: usize,
    },
}
