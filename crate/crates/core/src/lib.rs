//! Exact and guarded computations for inhomogeneous Diophantine
//! approximation: best approximations, transference with explicit
//! constants, Khintchine's shift construction and Monte Carlo surrogates of
//! the metric statements.

pub mod approx_functions;
pub mod best_approx;
pub mod error;
pub mod numerics;
pub mod report;
pub mod khintchine;
pub mod metric_lab;
pub mod rng;
pub mod transference;

pub use error::{Error, Result};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
