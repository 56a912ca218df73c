//! Circulant / skew-circulant splitting of Toeplitz transmit covariances,
//! iterative channel covariance (ICC) matrices, and Monte Carlo mean
//! capacity of transmit-correlated MIMO Rayleigh channels.
//!
//! Module map:
//!
//! - [`linalg`]: dense complex linear algebra (LU, Cholesky, Jacobi
//!   eigensolver, PSD square root, spectral radius, DFT)
//! - [`toeplitz`]: Toeplitz matrices and the `R = A + B` split
//! - [`icc`]: `R(α)`, closed-form spectra, the `σ(α)` bound, α sweeps
//! - [`channel`]: seeded channel draws and transmit correlation
//! - [`capacity`]: capacity estimators, CDFs, SNR sweeps, gains
//! - [`cli`]: the experiment runner behind the `icc-mimo` binary

pub mod capacity;
pub mod channel;
pub mod cli;
pub mod icc;
pub mod linalg;
pub mod plot;
pub mod reference;
pub mod report;
pub mod toeplitz;

pub use linalg::{ComplexMatrix, Scalar};
