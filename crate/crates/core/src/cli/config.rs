//! Experiment configuration: one JSON document, every field optional.
//!
//! ```json
//! {
//!   "covariance": {"n": 4, "first_column": [[1, 0], ...], "first_row_tail": [[-0.3581, -0.4435], ...]},
//!   "hermitian": false,
//!   "channel": {"n_t": 4, "n_r": 4, "snr_db": 30, "trials": 10000, "seed": 0,
//!               "cdf_trials": 1000, "snr_grid_db": [0, 5, 10, 15, 20, 25, 30]},
//!   "icc": {"variant": "both", "alpha_grid": [5, 10, ...], "capacity_alphas": [5, 10, 20, 30],
//!           "eps_conv": 0.001, "projection": "hermitized"},
//!   "output_dir": "out",
//!   "formats": ["csv", "svg"]
//! }
//! ```
//!
//! `covariance` may also be `{"dense": [[[re, im], ...], ...]}` or
//! `{"file": "path.json"}`; relative paths resolve against the config file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::capacity::CovarianceProjection;
use crate::channel::ChannelConfig;
use crate::icc::{IccVariant, DEFAULT_ALPHA_GRID, DEFAULT_EPS_CONV};
use crate::linalg::{ComplexMatrix, Scalar};
use crate::toeplitz::{example_covariance, ToeplitzCovariance, ToeplitzJson};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CovarianceSource {
    Toeplitz(ToeplitzJson),
    Dense { dense: Vec<Vec<[f64; 2]>> },
    File { file: PathBuf },
}

impl Default for CovarianceSource {
    fn default() -> Self {
        CovarianceSource::Toeplitz(example_covariance().to_json())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantChoice {
    AsPrinted,
    Cscs,
    #[default]
    Both,
}

impl VariantChoice {
    pub fn variants(self) -> Vec<IccVariant> {
        match self {
            VariantChoice::AsPrinted => vec![IccVariant::AsPrinted],
            VariantChoice::Cscs => vec![IccVariant::CscsCorrected],
            VariantChoice::Both => IccVariant::ALL.to_vec(),
        }
    }
}

impl std::str::FromStr for VariantChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "as-printed" => Ok(VariantChoice::AsPrinted),
            "cscs" => Ok(VariantChoice::Cscs),
            "both" => Ok(VariantChoice::Both),
            other => Err(format!("unknown variant {other:?}, expected as-printed, cscs or both")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionChoice {
    #[default]
    Hermitized,
    Raw,
}

impl From<ProjectionChoice> for CovarianceProjection {
    fn from(p: ProjectionChoice) -> Self {
        match p {
            ProjectionChoice::Hermitized => CovarianceProjection::Hermitized,
            ProjectionChoice::Raw => CovarianceProjection::Raw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub n_t: usize,
    pub n_r: usize,
    pub snr_db: f64,
    pub trials: usize,
    pub seed: u64,
    pub cdf_trials: usize,
    pub snr_grid_db: Vec<f64>,
}

impl Default for ChannelSection {
    fn default() -> Self {
        let base = ChannelConfig::default();
        Self {
            n_t: base.n_t,
            n_r: base.n_r,
            snr_db: base.snr_db,
            trials: base.trials,
            seed: base.seed,
            cdf_trials: 1000,
            snr_grid_db: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
        }
    }
}

impl ChannelSection {
    pub fn channel_config(&self) -> ChannelConfig {
        ChannelConfig {
            n_t: self.n_t,
            n_r: self.n_r,
            snr_db: self.snr_db,
            trials: self.trials,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IccSection {
    pub variant: VariantChoice,
    pub alpha_grid: Vec<f64>,
    pub capacity_alphas: Vec<f64>,
    pub eps_conv: f64,
    pub projection: ProjectionChoice,
}

impl Default for IccSection {
    fn default() -> Self {
        Self {
            variant: VariantChoice::Both,
            alpha_grid: DEFAULT_ALPHA_GRID.to_vec(),
            capacity_alphas: vec![5.0, 10.0, 20.0, 30.0],
            eps_conv: DEFAULT_EPS_CONV,
            projection: ProjectionChoice::Hermitized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub covariance: CovarianceSource,
    pub hermitian: bool,
    pub channel: ChannelSection,
    pub icc: IccSection,
    pub output_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
    /// Directory relative covariance files resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            covariance: CovarianceSource::default(),
            hermitian: false,
            channel: ChannelSection::default(),
            icc: IccSection::default(),
            output_dir: PathBuf::from("out"),
            formats: vec![OutputFormat::Csv, OutputFormat::Svg],
            base_dir: PathBuf::from("."),
        }
    }
}

fn positive_list(name: &str, values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Config(format!("{name} must not be empty")));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(CliError::Config(format!("{name} must be strictly positive, found {v}")));
    }
    Ok(())
}

fn dense_to_toeplitz(rows: &[Vec<[f64; 2]>], hermitian: bool) -> Result<ToeplitzCovariance, CliError> {
    let rows: Vec<Vec<Scalar>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| Scalar::new(re, im)).collect())
        .collect();
    let m = ComplexMatrix::from_rows(&rows).map_err(|e| CliError::Config(format!("covariance: {e}")))?;
    ToeplitzCovariance::from_dense(&m, hermitian).map_err(|e| CliError::Config(format!("covariance: {e}")))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        Ok(cfg)
    }

    pub fn wants(&self, format: OutputFormat) -> bool {
        self.formats.contains(&format)
    }

    pub fn covariance(&self) -> Result<ToeplitzCovariance, CliError> {
        let cov_err = |e: crate::toeplitz::ToeplitzError| CliError::Config(format!("covariance: {e}"));
        match &self.covariance {
            CovarianceSource::Toeplitz(t) => t.to_toeplitz(self.hermitian).map_err(cov_err),
            CovarianceSource::Dense { dense } => dense_to_toeplitz(dense, self.hermitian),
            CovarianceSource::File { file } => {
                let path = self.base_dir.join(file);
                let text =
                    fs::read_to_string(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let source: CovarianceSource =
                    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                match source {
                    CovarianceSource::Toeplitz(t) => t.to_toeplitz(self.hermitian).map_err(cov_err),
                    CovarianceSource::Dense { dense } => dense_to_toeplitz(&dense, self.hermitian),
                    CovarianceSource::File { .. } => {
                        Err(CliError::Config("covariance files cannot reference other files".into()))
                    }
                }
            }
        }
    }

    /// Checks everything that can be checked without running anything.
    pub fn validate(&self) -> Result<ToeplitzCovariance, CliError> {
        let cov = self.covariance()?;
        self.channel
            .channel_config()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if self.channel.n_t != cov.n() {
            return Err(CliError::Config(format!(
                "channel.n_t = {} but the covariance is {}x{}",
                self.channel.n_t,
                cov.n(),
                cov.n()
            )));
        }
        if self.channel.cdf_trials == 0 {
            return Err(CliError::Config("channel.cdf_trials must be at least 1".into()));
        }
        if self.channel.snr_grid_db.is_empty() || self.channel.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return Err(CliError::Config("channel.snr_grid_db must be a nonempty list of finite values".into()));
        }
        positive_list("icc.alpha_grid", &self.icc.alpha_grid)?;
        positive_list("icc.capacity_alphas", &self.icc.capacity_alphas)?;
        if !(self.icc.eps_conv > 0.0 && self.icc.eps_conv.is_finite()) {
            return Err(CliError::Config("icc.eps_conv must be positive".into()));
        }
        Ok(cov)
    }
}
