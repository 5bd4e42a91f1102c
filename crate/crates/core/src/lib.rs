//! Generalized Fréchet test for repeatedly observed random objects.
//!
//! Subjects carry an arbitrary number `r_i >= 1` of exchangeable repeated
//! observations in a bounded metric space. The test compares Fréchet means,
//! Fréchet variances and within-subject variabilities across `k` groups and
//! is calibrated by a weighted chi-squared law.

pub mod baselines;
pub mod dataset;
pub mod diagnostics;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod io;
pub mod metric;
pub mod simgen;
pub mod sum;

pub use dataset::{Dataset, Group, Subject};
pub use diagnostics::Diagnostic;
pub use error::{Error, Result};
pub use inference::{run_test, PValueMethod, TestConfig, TestMode, TestResult};
pub use metric::MetricObject;
