//! Numerics for quantum white noise with a singular quadratic interaction.
//!
//! * [`quadratic_model`]: Bogoliubov diagonalization and renormalization of
//!   `ω b⁺b + g(b⁺² + b²) + c`, plus the critical ε-family.
//! * [`evolution`]: regularization schemes, the normal-symbol kernel σ, the
//!   closed-form correlators and the linear model's vacuum amplitude.
//! * [`fock_oracle`]: truncated Fock-space brute force on a time lattice.
//! * [`ito_algebra`]: the non-associative algebra of differentials `dB^(m,n)`.
//! * [`stochastic_limit`]: the van Hove rescaled field covariance.

pub mod error;
pub mod evolution;
pub mod exec;
pub mod fock_oracle;
pub mod grid;
pub mod ito_algebra;
pub mod quadratic_model;
pub mod stochastic_limit;

pub use error::{Error, Result};
pub use exec::Execution;
pub use grid::TimeGrid;
pub use num_complex::Complex64;
