//! Iterative channel covariance matrices built from a circulant /
//! skew-circulant split, their closed-form spectra, and the `σ(α)` bound on
//! their spectral radius.
//!
//! Two four-factor products are supported, see [`IccVariant`].

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, LinalgError, Scalar};
use crate::report::fmt_sig6;
use crate::toeplitz::{CirculantMatrix, SkewCirculantMatrix, SplitPair};

/// `|α + λ|` at or below this is treated as a pole.
pub const POLE_TOL: f64 = 1e-12;
/// Default max-norm tolerance for `‖R(α) − I‖` convergence.
pub const DEFAULT_EPS_CONV: f64 = 1e-3;
/// The α grid swept by default.
pub const DEFAULT_ALPHA_GRID: [f64; 13] = [
    5.0, 10.0, 20.0, 30.0, 50.0, 100.0, 200.0, 600.0, 1000.0, 20000.0, 40000.0, 50000.0, 60000.0,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IccError {
    #[error("alpha must be positive and finite, got {alpha}")]
    InvalidAlpha { alpha: f64 },
    #[error("alpha grid is empty")]
    EmptyGrid,
    #[error("alpha = {alpha}: |alpha + eigenvalue| = {distance:e} is at a pole")]
    Pole { alpha: f64, distance: f64 },
    #[error("alpha = {alpha}: {source}")]
    Linalg {
        alpha: f64,
        #[source]
        source: LinalgError,
    },
}

/// Which four-factor product defines `R(α)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IccVariant {
    /// `(αI+B)⁻¹(αI−A)(αI+A)⁻¹(αI+B)`. The outer `B` factors form a
    /// similarity, so the spectrum is that of `(αI−A)(αI+A)⁻¹` alone.
    #[default]
    AsPrinted,
    /// `(αI+B)⁻¹(αI−A)(αI+A)⁻¹(αI−B)`, the CSCS splitting-iteration matrix.
    #[serde(rename = "cscs")]
    CscsCorrected,
}

impl IccVariant {
    pub const ALL: [IccVariant; 2] = [IccVariant::AsPrinted, IccVariant::CscsCorrected];

    pub fn as_str(self) -> &'static str {
        match self {
            IccVariant::AsPrinted => "as-printed",
            IccVariant::CscsCorrected => "cscs",
        }
    }
}

impl fmt::Display for IccVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IccVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "as-printed" => Ok(IccVariant::AsPrinted),
            "cscs" => Ok(IccVariant::CscsCorrected),
            other => Err(format!("unknown variant {other:?}, expected as-printed or cscs")),
        }
    }
}

/// Eigenvalues of the circulant (`lambda`) and skew-circulant (`mu`) parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPair {
    pub lambda: Vec<Scalar>,
    pub mu: Vec<Scalar>,
}

impl SpectrumPair {
    pub fn of(pair: &SplitPair) -> Self {
        Self {
            lambda: circulant_spectrum(&pair.circulant),
            mu: skew_circulant_spectrum(&pair.skew),
        }
    }
}

/// `λ_k = Σ_j a_j e^{+2πi jk/N}`.
pub fn circulant_spectrum(a: &CirculantMatrix) -> Vec<Scalar> {
    linalg::dft(a.first_row())
}

/// `μ_k = Σ_j b_j e^{+iπ j(2k+1)/N}`.
pub fn skew_circulant_spectrum(b: &SkewCirculantMatrix) -> Vec<Scalar> {
    linalg::twisted_dft(b.first_row(), 0.5)
}

fn check_alpha(alpha: f64) -> Result<(), IccError> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(IccError::InvalidAlpha { alpha })
    }
}

/// `max_j |α − z_j| / |α + z_j|`.
fn max_shifted_ratio(values: &[Scalar], alpha: f64) -> Result<f64, IccError> {
    let mut worst = 0.0_f64;
    for z in values {
        let den = (z + alpha).norm();
        if den <= POLE_TOL {
            return Err(IccError::Pole {
                alpha,
                distance: den,
            });
        }
        worst = worst.max((alpha - z).norm() / den);
    }
    Ok(worst)
}

/// `σ(α) = max_j |α−λ_j|/|α+λ_j| · max_j |α−μ_j|/|α+μ_j|`.
pub fn sigma_bound(spectra: &SpectrumPair, alpha: f64) -> Result<f64, IccError> {
    check_alpha(alpha)?;
    Ok(max_shifted_ratio(&spectra.lambda, alpha)? * max_shifted_ratio(&spectra.mu, alpha)?)
}

/// Spectral radius of the [`IccVariant::AsPrinted`] matrix from the
/// circulant spectrum: `max_j |α−λ_j|/|α+λ_j|`.
pub fn rho_closed_form_as_printed(spectra: &SpectrumPair, alpha: f64) -> Result<f64, IccError> {
    check_alpha(alpha)?;
    max_shifted_ratio(&spectra.lambda, alpha)
}

pub fn iteration_matrix(pair: &SplitPair, alpha: f64, variant: IccVariant) -> Result<ComplexMatrix, IccError> {
    check_alpha(alpha)?;
    let wrap = |source| IccError::Linalg { alpha, source };
    let a = pair.circulant.to_dense();
    let b = pair.skew.to_dense();
    let shift = Scalar::new(alpha, 0.0);
    let plus_b_inv = linalg::inverse(&b.shift_diag(shift)).map_err(wrap)?;
    let plus_a_inv = linalg::inverse(&a.shift_diag(shift)).map_err(wrap)?;
    let minus_a = a.scale(Scalar::new(-1.0, 0.0)).shift_diag(shift);
    let last = match variant {
        IccVariant::AsPrinted => b.shift_diag(shift),
        IccVariant::CscsCorrected => b.scale(Scalar::new(-1.0, 0.0)).shift_diag(shift),
    };
    let product = [&minus_a, &plus_a_inv, &last]
        .into_iter()
        .try_fold(plus_b_inv, |acc, m| linalg::mat_mul(&acc, m))
        .map_err(wrap)?;
    Ok(product)
}

/// Largest off-diagonal modulus of the Hermitian part of `r`.
pub fn correlation_coefficient(r: &ComplexMatrix) -> f64 {
    let h = r.hermitian_part();
    let n = h.rows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                worst = worst.max(h[(i, j)].norm());
            }
        }
    }
    worst
}

/// One row of an α sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IccRecord {
    pub alpha: f64,
    pub sigma: f64,
    pub rho: f64,
    /// Whether `rho` came from converged power iteration rather than the
    /// Gelfand fallback.
    pub rho_power_converged: bool,
    pub variant: IccVariant,
    /// `‖R(α) − I‖_max`.
    pub distance_to_identity: f64,
    pub correlation_coefficient: f64,
    /// `distance_to_identity ≤ eps_conv`, i.e. no correlation left.
    pub converged: bool,
}

pub fn icc_record(
    pair: &SplitPair,
    spectra: &SpectrumPair,
    alpha: f64,
    variant: IccVariant,
    eps_conv: f64,
) -> Result<IccRecord, IccError> {
    let sigma = sigma_bound(spectra, alpha)?;
    let r = iteration_matrix(pair, alpha, variant)?;
    let radius = linalg::spectral_radius(&r).map_err(|source| IccError::Linalg { alpha, source })?;
    let distance = r.max_abs_diff(&ComplexMatrix::identity(r.rows()));
    Ok(IccRecord {
        alpha,
        sigma,
        rho: radius.value,
        rho_power_converged: radius.converged,
        variant,
        distance_to_identity: distance,
        correlation_coefficient: correlation_coefficient(&r),
        converged: distance <= eps_conv,
    })
}

/// One [`IccRecord`] per α, in input order.
pub fn icc_sweep(pair: &SplitPair, alphas: &[f64], variant: IccVariant, eps_conv: f64) -> Result<Vec<IccRecord>, IccError> {
    if alphas.is_empty() {
        return Err(IccError::EmptyGrid);
    }
    if let Some(&alpha) = alphas.iter().find(|&&a| !(a > 0.0 && a.is_finite())) {
        return Err(IccError::InvalidAlpha { alpha });
    }
    let spectra = SpectrumPair::of(pair);
    alphas
        .par_iter()
        .map(|&alpha| icc_record(pair, &spectra, alpha, variant, eps_conv))
        .collect()
}

/// CSV with header `alpha,sigma,rho,variant,dist_identity,converged`.
pub fn write_sweep_csv<W: Write>(out: &mut W, records: &[IccRecord]) -> io::Result<()> {
    writeln!(out, "alpha,sigma,rho,variant,dist_identity,converged")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_sig6(r.alpha),
            fmt_sig6(r.sigma),
            fmt_sig6(r.rho),
            r.variant,
            fmt_sig6(r.distance_to_identity),
            r.converged
        )?;
    }
    Ok(())
}
