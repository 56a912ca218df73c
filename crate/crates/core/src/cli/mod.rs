//! Experiment runner behind the `icc-mimo` binary.
//!
//! Exit codes: 0 when every requested output was written, 2 for
//! configuration or validation errors, 1 for numerical or I/O failures.

mod commands;
pub mod config;

use std::path::PathBuf;

use thiserror::Error;

pub use commands::{cmd_capacity, GainRow, TableRow, cmd_icc_table, cmd_split, reproduce_all, CapacitySummary, IccTableSummary, SplitSummary};
pub use config::{ExperimentConfig, OutputFormat, VariantChoice};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io { .. } => 1,
        }
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub alphas: Option<Vec<f64>>,
    pub variant: Option<VariantChoice>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<OutputFormat>>,
    pub raw_covariance: bool,
}

/// Which α list an `--alpha` override replaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaTarget {
    Table,
    Capacity,
    Both,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig, target: AlphaTarget) {
        if let Some(seed) = self.seed {
            cfg.channel.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.channel.trials = trials;
            cfg.channel.cdf_trials = cfg.channel.cdf_trials.min(trials.max(1));
        }
        if let Some(alphas) = &self.alphas {
            if matches!(target, AlphaTarget::Table | AlphaTarget::Both) {
                cfg.icc.alpha_grid = alphas.clone();
            }
            if matches!(target, AlphaTarget::Capacity | AlphaTarget::Both) {
                cfg.icc.capacity_alphas = alphas.clone();
            }
        }
        if let Some(v) = self.variant {
            cfg.icc.variant = v;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(formats) = &self.formats {
            cfg.formats = formats.clone();
        }
        if self.raw_covariance {
            cfg.icc.projection = config::ProjectionChoice::Raw;
        }
    }
}

/// Parses `5,10,20` into α values.
pub fn parse_alpha_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("bad alpha {s:?}: {e}")))
        })
        .collect()
}

/// Parses `csv,svg`.
pub fn parse_formats(text: &str) -> Result<Vec<OutputFormat>, CliError> {
    text.split(',')
        .map(|s| match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(CliError::Config(format!("unknown format {other:?}"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        assert_eq!(parse_alpha_list("5, 10,20").unwrap(), vec![5.0, 10.0, 20.0]);
        assert!(parse_alpha_list("5,x").is_err());
        assert_eq!(parse_formats("svg").unwrap(), vec![OutputFormat::Svg]);
        assert!(parse_formats("png").is_err());
    }

    #[test]
    fn overrides_target_alpha_lists() {
        let mut cfg = ExperimentConfig::default();
        let o = Overrides {
            alphas: Some(vec![7.0]),
            trials: Some(1),
            ..Default::default()
        };
        o.apply(&mut cfg, AlphaTarget::Capacity);
        assert_eq!(cfg.icc.capacity_alphas, vec![7.0]);
        assert_eq!(cfg.icc.alpha_grid.len(), 13);
        assert_eq!((cfg.channel.trials, cfg.channel.cdf_trials), (1, 1));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config(String::new()).exit_code(), 2);
        assert_eq!(CliError::Numerical(String::new()).exit_code(), 1);
    }
}
