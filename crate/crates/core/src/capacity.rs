//! Instantaneous and Monte Carlo mean capacity, empirical CDFs, SNR and α
//! sweeps.
//!
//! All Monte Carlo estimators use common random numbers: trial `t` draws its
//! `H_w` from substream `t` of the configured seed, so runs that differ only
//! in covariance, α or SNR see the same channels and their differences are
//! coupled.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{sample_hw, ChannelConfig, ChannelRealization, ConfigError, RandomStream};
use crate::icc::{self, IccError, IccVariant};
use crate::linalg::{self, conj_transpose, ComplexMatrix, LinalgError, Scalar};
use crate::report::fmt_sig6;
use crate::toeplitz::SplitPair;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0} covariance mode needs a split pair")]
    MissingPair(&'static str),
    #[error("covariance is {got:?} but n_t = {n_t}")]
    Dimension { n_t: usize, got: (usize, usize) },
    #[error(transparent)]
    Icc(#[from] IccError),
    #[error("covariance preparation failed: {0}")]
    Covariance(#[source] LinalgError),
    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: LinalgError,
    },
    #[error("cannot compare runs: {0}")]
    Mismatch(String),
    #[error("no samples")]
    Empty,
    #[error("{0} must not be empty")]
    EmptyInput(&'static str),
}

/// How the transmit covariance enters the log-det.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceProjection {
    /// Hermitian part with negative eigenvalues clamped to zero; capacity is
    /// real and nonnegative.
    #[default]
    Hermitized,
    /// Covariance used as-is; capacity is `log₂|det(I + c·H_w R H_wᴴ)|`.
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CovarianceMode {
    /// Uncorrelated `H = H_w`.
    Iid,
    /// A fixed transmit covariance.
    Fixed { label: String, matrix: ComplexMatrix },
    /// The ICC matrix `R(α)` of a split pair.
    Icc { alpha: f64, variant: IccVariant },
}

impl CovarianceMode {
    pub fn fixed(label: impl Into<String>, matrix: ComplexMatrix) -> Self {
        CovarianceMode::Fixed {
            label: label.into(),
            matrix,
        }
    }

    pub fn label(&self) -> String {
        match self {
            CovarianceMode::Iid => "iid".to_string(),
            CovarianceMode::Fixed { label, .. } => label.clone(),
            CovarianceMode::Icc { alpha, variant } => format!("icc-{variant}-a{}", fmt_sig6(*alpha)),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            CovarianceMode::Icc { alpha, .. } => Some(*alpha),
            _ => None,
        }
    }
}

/// Per-trial capacities in bps/Hz, in trial order.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacitySamples {
    pub values: Vec<f64>,
    pub config: ChannelConfig,
    pub covariance_label: String,
}

impl CapacitySamples {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Sample standard deviation (n − 1 denominator); 0 for one sample.
    pub fn std_dev(&self) -> f64 {
        sample_std(&self.values)
    }

    pub fn std_error(&self) -> f64 {
        self.std_dev() / (self.values.len() as f64).sqrt()
    }

    /// CSV `trial,capacity` preceded by `#` metadata lines.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "# mode={}", self.covariance_label)?;
        writeln!(
            out,
            "# n_t={} n_r={} snr_db={} trials={} seed={}",
            self.config.n_t,
            self.config.n_r,
            fmt_sig6(self.config.snr_db),
            self.config.trials,
            self.config.seed
        )?;
        writeln!(out, "trial,capacity")?;
        for (t, c) in self.values.iter().enumerate() {
            writeln!(out, "{t},{}", fmt_sig6(*c))?;
        }
        Ok(())
    }
}

fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (n - 1) as f64).sqrt()
}

fn gram_capacity(gram: &ComplexMatrix, gamma0: f64, n_t: usize, projection: CovarianceProjection) -> Result<f64, LinalgError> {
    let m = gram.scale(Scalar::new(gamma0 / n_t as f64, 0.0)).shift_diag(Scalar::new(1.0, 0.0));
    match projection {
        // I + PSD has determinant ≥ 1; clamp rounding below zero
        CovarianceProjection::Hermitized => Ok(linalg::log2_det_hermitian_pd(&m)?.max(0.0)),
        CovarianceProjection::Raw => linalg::log2_abs_det_lu(&m),
    }
}

/// `log₂ det(I + (γ₀/N_t) H Hᴴ)`.
pub fn instantaneous_capacity(h: &ChannelRealization, gamma0: f64, n_t: usize) -> Result<f64, LinalgError> {
    let gram = linalg::mat_mul(&h.h, &conj_transpose(&h.h))?;
    gram_capacity(&gram, gamma0, n_t, CovarianceProjection::Hermitized)
}

/// `log₂ det(I + (γ₀/N_t) H_w R̃ H_wᴴ)` where `R̃` is the PSD-clamped
/// Hermitian part of `r_t`.
pub fn instantaneous_capacity_correlated(
    hw: &ChannelRealization,
    r_t: &ComplexMatrix,
    gamma0: f64,
    n_t: usize,
) -> Result<f64, LinalgError> {
    let r = linalg::project_psd(r_t)?;
    correlated_with_effective(hw, &r, gamma0, n_t, CovarianceProjection::Hermitized)
}

/// Like [`instantaneous_capacity_correlated`] but with `r_t` used as given
/// and `log₂|det|` in place of the Hermitian log-det.
pub fn instantaneous_capacity_raw(hw: &ChannelRealization, r_t: &ComplexMatrix, gamma0: f64, n_t: usize) -> Result<f64, LinalgError> {
    correlated_with_effective(hw, r_t, gamma0, n_t, CovarianceProjection::Raw)
}

fn correlated_with_effective(
    hw: &ChannelRealization,
    r: &ComplexMatrix,
    gamma0: f64,
    n_t: usize,
    projection: CovarianceProjection,
) -> Result<f64, LinalgError> {
    let hr = linalg::mat_mul(&hw.h, r)?;
    let gram = linalg::mat_mul(&hr, &conj_transpose(&hw.h))?;
    gram_capacity(&gram, gamma0, n_t, projection)
}

/// The covariance a mode feeds into the log-det, after projection.
/// `None` means i.i.d.
pub fn effective_covariance(
    mode: &CovarianceMode,
    pair: Option<&SplitPair>,
    n_t: usize,
    projection: CovarianceProjection,
) -> Result<Option<ComplexMatrix>, CapacityError> {
    let raw = match mode {
        CovarianceMode::Iid => return Ok(None),
        CovarianceMode::Fixed { matrix, .. } => matrix.clone(),
        CovarianceMode::Icc { alpha, variant } => {
            let pair = pair.ok_or(CapacityError::MissingPair("icc"))?;
            icc::iteration_matrix(pair, *alpha, *variant)?
        }
    };
    if raw.shape() != (n_t, n_t) {
        return Err(CapacityError::Dimension { n_t, got: raw.shape() });
    }
    match projection {
        CovarianceProjection::Hermitized => linalg::project_psd(&raw).map(Some).map_err(CapacityError::Covariance),
        CovarianceProjection::Raw => Ok(Some(raw)),
    }
}

/// Monte Carlo capacity samples for one covariance mode.
pub fn mean_capacity(config: &ChannelConfig, mode: &CovarianceMode, pair: Option<&SplitPair>) -> Result<CapacitySamples, CapacityError> {
    mean_capacity_with(config, mode, pair, CovarianceProjection::Hermitized)
}

pub fn mean_capacity_with(
    config: &ChannelConfig,
    mode: &CovarianceMode,
    pair: Option<&SplitPair>,
    projection: CovarianceProjection,
) -> Result<CapacitySamples, CapacityError> {
    config.validate()?;
    let cov = effective_covariance(mode, pair, config.n_t, projection)?;
    let gamma0 = config.gamma0();
    let values = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let hw = sample_hw(config.n_r, config.n_t, &mut RandomStream::for_trial(config.seed, trial));
            let result = match &cov {
                None => instantaneous_capacity(&hw, gamma0, config.n_t),
                Some(r) => correlated_with_effective(&hw, r, gamma0, config.n_t, projection),
            };
            result.map_err(|source| CapacityError::Trial { trial, source })
        })
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(CapacitySamples {
        values,
        config: config.clone(),
        covariance_label: mode.label(),
    })
}

/// Mean capacity of `R(α)` for every α (common random numbers), plus the
/// α with the largest mean. Ties go to the smaller α.
pub fn max_mean_capacity_over_alpha(
    config: &ChannelConfig,
    pair: &SplitPair,
    alphas: &[f64],
    variant: IccVariant,
) -> Result<(f64, Vec<CapacitySamples>), CapacityError> {
    if alphas.is_empty() {
        return Err(CapacityError::EmptyInput("alpha grid"));
    }
    let runs = alphas
        .iter()
        .map(|&alpha| mean_capacity(config, &CovarianceMode::Icc { alpha, variant }, Some(pair)))
        .collect::<Result<Vec<_>, _>>()?;
    let means: Vec<f64> = runs.iter().map(CapacitySamples::mean).collect();
    Ok((alphas[best_alpha_index(alphas, &means)], runs))
}

/// Index of the largest mean; ties go to the smaller α.
pub fn best_alpha_index(alphas: &[f64], means: &[f64]) -> usize {
    let mut best = 0;
    for k in 1..alphas.len() {
        if means[k] > means[best] || (means[k] == means[best] && alphas[k] < alphas[best]) {
            best = k;
        }
    }
    best
}

fn check_comparable(base: &CapacitySamples, improved: &CapacitySamples) -> Result<(), CapacityError> {
    let (a, b) = (&base.config, &improved.config);
    if a.n_t != b.n_t || a.n_r != b.n_r || a.snr_db != b.snr_db {
        return Err(CapacityError::Mismatch(format!(
            "{}x{} at {} dB vs {}x{} at {} dB",
            a.n_r, a.n_t, a.snr_db, b.n_r, b.n_t, b.snr_db
        )));
    }
    if base.is_empty() || improved.is_empty() {
        return Err(CapacityError::Empty);
    }
    Ok(())
}

/// `mean(improved) − mean(base)`.
pub fn capacity_gain(base: &CapacitySamples, improved: &CapacitySamples) -> Result<f64, CapacityError> {
    check_comparable(base, improved)?;
    Ok(improved.mean() - base.mean())
}

/// Gain estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainEstimate {
    pub gain: f64,
    pub std_error: f64,
}

/// Gain from per-trial differences of two coupled runs (same seed and trial
/// count), whose standard error reflects the coupling.
pub fn paired_gain(base: &CapacitySamples, improved: &CapacitySamples) -> Result<GainEstimate, CapacityError> {
    check_comparable(base, improved)?;
    if base.config.seed != improved.config.seed || base.len() != improved.len() {
        return Err(CapacityError::Mismatch("paired gain needs the same seed and trial count".into()));
    }
    let diffs: Vec<f64> = improved.values.iter().zip(&base.values).map(|(i, b)| i - b).collect();
    let n = diffs.len() as f64;
    Ok(GainEstimate {
        gain: diffs.iter().sum::<f64>() / n,
        std_error: sample_std(&diffs) / n.sqrt(),
    })
}

/// Gain of two independent runs; standard error from both variances.
pub fn unpaired_gain(base: &CapacitySamples, improved: &CapacitySamples) -> Result<GainEstimate, CapacityError> {
    let gain = capacity_gain(base, improved)?;
    Ok(GainEstimate {
        gain,
        std_error: (base.std_error().powi(2) + improved.std_error().powi(2)).sqrt(),
    })
}

/// Step CDF: the i-th order statistic carries probability `(i+1)/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    pub points: Vec<(f64, f64)>,
}

impl EmpiricalCdf {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "capacity,probability")?;
        for (c, p) in &self.points {
            writeln!(out, "{},{}", fmt_sig6(*c), fmt_sig6(*p))?;
        }
        Ok(())
    }
}

pub fn empirical_cdf(samples: &CapacitySamples) -> Result<EmpiricalCdf, CapacityError> {
    empirical_cdf_of(&samples.values)
}

pub fn empirical_cdf_of(values: &[f64]) -> Result<EmpiricalCdf, CapacityError> {
    if values.is_empty() {
        return Err(CapacityError::Empty);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(EmpiricalCdf {
        points: sorted
            .into_iter()
            .enumerate()
            .map(|(i, c)| (c, (i + 1) as f64 / n))
            .collect(),
    })
}

/// One `(SNR, mode)` cell of an SNR sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub snr_db: f64,
    pub mode: String,
    pub alpha: Option<f64>,
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Mean capacity for every `(snr, mode)` pair, SNR-major. Every cell uses
/// the same seed, so rows at one SNR are coupled.
pub fn snr_sweep(
    template: &ChannelConfig,
    snrs_db: &[f64],
    modes: &[CovarianceMode],
    pair: Option<&SplitPair>,
) -> Result<Vec<SweepRow>, CapacityError> {
    let samples = snr_sweep_samples(template, snrs_db, modes, pair, CovarianceProjection::Hermitized)?;
    Ok(sweep_rows(&samples, modes))
}

/// Full samples behind [`snr_sweep`], in the same order.
pub fn snr_sweep_samples(
    template: &ChannelConfig,
    snrs_db: &[f64],
    modes: &[CovarianceMode],
    pair: Option<&SplitPair>,
    projection: CovarianceProjection,
) -> Result<Vec<CapacitySamples>, CapacityError> {
    if snrs_db.is_empty() {
        return Err(CapacityError::EmptyInput("SNR list"));
    }
    if modes.is_empty() {
        return Err(CapacityError::EmptyInput("mode list"));
    }
    let mut out = Vec::with_capacity(snrs_db.len() * modes.len());
    for &snr in snrs_db {
        let config = template.with_snr_db(snr);
        for mode in modes {
            out.push(mean_capacity_with(&config, mode, pair, projection)?);
        }
    }
    Ok(out)
}

/// Summarizes SNR-major sweep samples; `modes` is the per-SNR mode list.
pub fn sweep_rows(samples: &[CapacitySamples], modes: &[CovarianceMode]) -> Vec<SweepRow> {
    samples
        .iter()
        .zip(modes.iter().cycle())
        .map(|(s, mode)| SweepRow {
            snr_db: s.config.snr_db,
            mode: s.covariance_label.clone(),
            alpha: mode.alpha(),
            mean: s.mean(),
            std_error: s.std_error(),
            trials: s.config.trials,
            seed: s.config.seed,
        })
        .collect()
}

/// CSV `snr_db,mode,alpha,mean,stderr,trials,seed`; `alpha` is empty for
/// non-ICC modes.
pub fn write_sweep_csv<W: Write>(out: &mut W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "snr_db,mode,alpha,mean,stderr,trials,seed")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_sig6(r.snr_db),
            r.mode,
            r.alpha.map(fmt_sig6).unwrap_or_default(),
            fmt_sig6(r.mean),
            fmt_sig6(r.std_error),
            r.trials,
            r.seed
        )?;
    }
    Ok(())
}
