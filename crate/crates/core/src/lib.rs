//! Delayed heat equation `u_t(x, t + tau) = D u_xx(x, t)`: Lambert W based
//! spectra, an exact method-of-steps modal solver and a finite-difference
//! cross-check.

pub mod dispersion;
pub mod error;
pub mod fd_oracle;
pub mod field;
pub mod growth;
pub mod lambert_w;
pub mod solver;
pub mod spectrum;

pub use num_complex::Complex64;

/// Complex scalar used for Lambert W values and characteristic roots.
pub type ComplexValue = Complex64;

pub use dispersion::{PhysicalParams, RatePair};
pub use error::{Error, Result};
pub use fd_oracle::Grid;
pub use field::Field;
pub use solver::{HistorySpec, Profile};
pub use spectrum::{Mode, Problem, Regime, RootSet, StabilityTable};
