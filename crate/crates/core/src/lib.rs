//! Exact desk-scale computation of spectral quantities, information
//! complexity, minimal errors, and exponential-convergence tractability
//! classifications for multivariate approximation with analytic Korobov
//! kernels, in the worst case and average case settings.
//!
//! The library works in the log domain throughout: eigenvalues omega^E are
//! represented by their exponents E, so ordering and threshold tests stay
//! exact long after the eigenvalues themselves underflow.

pub mod approx;
pub mod caps;
pub mod complexity;
pub mod counting;
pub mod entropy;
pub mod error;
pub mod output;
pub mod sequences;
pub mod spectrum;
pub mod tractability;

pub use caps::ResourceCaps;
pub use error::{Error, Result};
pub use sequences::{SequenceFamily, WeightSpec};
