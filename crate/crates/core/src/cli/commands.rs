use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ExperimentConfig, OutputFormat};
use super::CliError;
use crate::capacity::{
    self, best_alpha_index, empirical_cdf_of, paired_gain, CapacitySamples, CovarianceMode, CovarianceProjection,
    SweepRow,
};
use crate::icc::{self, IccRecord, IccVariant};
use crate::linalg::ComplexMatrix;
use crate::plot::{LinePlot, Series};
use crate::reference::{reference, RadiusRow};
use crate::report::{fmt_sig6, write_metadata};
use crate::toeplitz::{split, SplitPair, ToeplitzCovariance, ToeplitzJson};

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn numerical(e: impl fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

fn pairs(v: &[crate::Scalar]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn dense_pairs(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    m.to_rows().iter().map(|r| pairs(r)).collect()
}

fn is_reference_example(cov: &ToeplitzCovariance) -> bool {
    let r = reference().covariance();
    cov.first_column() == r.first_column() && cov.first_row_tail() == r.first_row_tail()
}

// ---------------------------------------------------------------------------
// split
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SplitDocument {
    n: usize,
    source: ToeplitzJson,
    circulant_first_row: Vec<[f64; 2]>,
    skew_first_row: Vec<[f64; 2]>,
    circulant_dense: Vec<Vec<[f64; 2]>>,
    skew_dense: Vec<Vec<[f64; 2]>>,
    reconstruction_residual: f64,
}

#[derive(Debug, Clone)]
pub struct SplitSummary {
    pub pair: SplitPair,
    pub residual: f64,
    pub files: Vec<PathBuf>,
}

impl fmt::Display for SplitSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "split of {}x{} Toeplitz covariance", self.pair.n(), self.pair.n())?;
        for (j, (a, b)) in self
            .pair
            .circulant
            .first_row()
            .iter()
            .zip(self.pair.skew.first_row())
            .enumerate()
        {
            writeln!(f, "  a_{j} = {:+.4}{:+.4}i   b_{j} = {:+.4}{:+.4}i", a.re, a.im, b.re, b.im)?;
        }
        write!(f, "reconstruction residual max|A + B - R| = {:e}", self.residual)
    }
}

/// Writes `split.json` with the coefficients and dense parts of the split.
pub fn cmd_split(cfg: &ExperimentConfig) -> Result<SplitSummary, CliError> {
    let cov = cfg.covariance()?;
    let pair = split(&cov);
    let residual = pair.reconstruction_error();
    let doc = SplitDocument {
        n: cov.n(),
        source: cov.to_json(),
        circulant_first_row: pairs(pair.circulant.first_row()),
        skew_first_row: pairs(pair.skew.first_row()),
        circulant_dense: dense_pairs(&pair.circulant.to_dense()),
        skew_dense: dense_pairs(&pair.skew.to_dense()),
        reconstruction_residual: residual,
    };
    let mut json = serde_json::to_string_pretty(&doc).map_err(numerical)?;
    json.push('\n');
    let path = write_file(&cfg.output_dir, "split.json", json.as_bytes())?;
    Ok(SplitSummary {
        pair,
        residual,
        files: vec![path],
    })
}

// ---------------------------------------------------------------------------
// icc-table
// ---------------------------------------------------------------------------

/// Both variants at one α.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub alpha: f64,
    pub sigma: f64,
    pub as_printed: IccRecord,
    pub cscs: IccRecord,
    pub reference: Option<RadiusRow>,
}

impl TableRow {
    pub fn distance_to_identity(&self) -> f64 {
        self.as_printed.distance_to_identity.max(self.cscs.distance_to_identity)
    }
}

#[derive(Debug, Clone)]
pub struct IccTableSummary {
    pub rows: Vec<TableRow>,
    pub eps_conv: f64,
    pub files: Vec<PathBuf>,
}

impl fmt::Display for IccTableSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>8} {:>9} {:>9} {:>9} {:>9} | {:>8} {:>8} {:>9} {:>9}  conv",
            "alpha", "sigma", "rho_ap", "rho_cscs", "dist", "ref_sig", "ref_rho", "d_rho_ap", "d_rho_cs"
        )?;
        for r in &self.rows {
            let (rs, rr, dap, dcs) = match r.reference {
                Some(p) => (
                    format!("{:.4}", p.sigma),
                    format!("{:.4}", p.rho),
                    format!("{:+.4}", r.as_printed.rho - p.rho),
                    format!("{:+.4}", r.cscs.rho - p.rho),
                ),
                None => ("-".into(), "-".into(), "-".into(), "-".into()),
            };
            writeln!(
                f,
                "{:>8} {:>9.6} {:>9.6} {:>9.6} {:>9.2e} | {:>8} {:>8} {:>9} {:>9}  {}",
                fmt_sig6(r.alpha),
                r.sigma,
                r.as_printed.rho,
                r.cscs.rho,
                r.distance_to_identity(),
                rs,
                rr,
                dap,
                dcs,
                r.distance_to_identity() <= self.eps_conv
            )?;
        }
        Ok(())
    }
}

/// Sweeps the α grid for both variants; writes `table2.csv`,
/// `table2_diff.csv`, `icc_sweep.csv` and optionally `table2.svg`.
pub fn cmd_icc_table(cfg: &ExperimentConfig) -> Result<IccTableSummary, CliError> {
    let cov = cfg.covariance()?;
    let alphas = &cfg.icc.alpha_grid;
    if alphas.is_empty() || alphas.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(CliError::Config(format!("alpha grid must be nonempty and strictly positive: {alphas:?}")));
    }
    if cfg.icc.eps_conv.is_nan() || cfg.icc.eps_conv <= 0.0 {
        return Err(CliError::Config("icc.eps_conv must be positive".into()));
    }
    let pair = split(&cov);
    let eps = cfg.icc.eps_conv;
    let as_printed = icc::icc_sweep(&pair, alphas, IccVariant::AsPrinted, eps).map_err(numerical)?;
    let cscs = icc::icc_sweep(&pair, alphas, IccVariant::CscsCorrected, eps).map_err(numerical)?;
    let with_reference = is_reference_example(&cov);
    let rows: Vec<TableRow> = as_printed
        .into_iter()
        .zip(cscs)
        .map(|(ap, cs)| TableRow {
            alpha: ap.alpha,
            sigma: ap.sigma,
            reference: with_reference.then(|| reference().table_row(ap.alpha)).flatten(),
            as_printed: ap,
            cscs: cs,
        })
        .collect();

    let mut files = Vec::new();
    let meta = [
        ("covariance_n", cov.n().to_string()),
        ("eps_conv", fmt_sig6(eps)),
        ("dist_identity", "max over both variants of max|R(alpha) - I|".to_string()),
    ];
    if cfg.wants(OutputFormat::Csv) {
        let mut table = Vec::new();
        write_metadata(&mut table, &meta).map_err(numerical)?;
        writeln!(table, "alpha,sigma,rho_as_printed,rho_cscs,dist_identity,converged").map_err(numerical)?;
        for r in &rows {
            writeln!(
                table,
                "{},{},{},{},{},{}",
                fmt_sig6(r.alpha),
                fmt_sig6(r.sigma),
                fmt_sig6(r.as_printed.rho),
                fmt_sig6(r.cscs.rho),
                fmt_sig6(r.distance_to_identity()),
                r.distance_to_identity() <= eps
            )
            .map_err(numerical)?;
        }
        files.push(write_file(&cfg.output_dir, "table2.csv", &table)?);

        let mut diff = Vec::new();
        write_metadata(&mut diff, &meta[..2]).map_err(numerical)?;
        writeln!(
            diff,
            "alpha,ref_sigma,sigma,delta_sigma,ref_rho,rho_as_printed,delta_rho_as_printed,rho_cscs,delta_rho_cscs,corr_as_printed,corr_cscs"
        )
        .map_err(numerical)?;
        for r in &rows {
            let opt = |v: Option<f64>| v.map(fmt_sig6).unwrap_or_default();
            let reference = r.reference;
            writeln!(
                diff,
                "{},{},{},{},{},{},{},{},{},{},{}",
                fmt_sig6(r.alpha),
                opt(reference.map(|p| p.sigma)),
                fmt_sig6(r.sigma),
                opt(reference.map(|p| r.sigma - p.sigma)),
                opt(reference.map(|p| p.rho)),
                fmt_sig6(r.as_printed.rho),
                opt(reference.map(|p| r.as_printed.rho - p.rho)),
                fmt_sig6(r.cscs.rho),
                opt(reference.map(|p| r.cscs.rho - p.rho)),
                fmt_sig6(r.as_printed.correlation_coefficient),
                fmt_sig6(r.cscs.correlation_coefficient),
            )
            .map_err(numerical)?;
        }
        files.push(write_file(&cfg.output_dir, "table2_diff.csv", &diff)?);

        let mut sweep = Vec::new();
        write_metadata(&mut sweep, &meta[..2]).map_err(numerical)?;
        let records: Vec<IccRecord> = rows
            .iter()
            .flat_map(|r| [r.as_printed.clone(), r.cscs.clone()])
            .collect();
        icc::write_sweep_csv(&mut sweep, &records).map_err(numerical)?;
        files.push(write_file(&cfg.output_dir, "icc_sweep.csv", &sweep)?);
    }
    if cfg.wants(OutputFormat::Svg) {
        let series = |label: &str, f: &dyn Fn(&TableRow) -> f64| Series {
            label: label.to_string(),
            points: rows.iter().map(|r| (r.alpha.log10(), f(r))).collect(),
        };
        let plot = LinePlot {
            title: "Spectral radius and bound versus alpha".into(),
            x_label: "log10(alpha)".into(),
            y_label: "value".into(),
            series: vec![
                series("sigma", &|r| r.sigma),
                series("rho as-printed", &|r| r.as_printed.rho),
                series("rho cscs", &|r| r.cscs.rho),
            ],
        };
        files.push(write_file(&cfg.output_dir, "table2.svg", plot.to_svg().as_bytes())?);
    }
    Ok(IccTableSummary {
        rows,
        eps_conv: eps,
        files,
    })
}

// ---------------------------------------------------------------------------
// capacity
// ---------------------------------------------------------------------------

/// One row of `gains.csv`.
#[derive(Debug, Clone)]
pub struct GainRow {
    pub comparison: String,
    pub variant: Option<IccVariant>,
    pub alpha: Option<f64>,
    pub snr_db: f64,
    pub gain: f64,
    pub std_error: f64,
    /// Gain averaged over the SNR grid.
    pub gain_snr_avg: f64,
    pub reference: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CapacitySummary {
    pub modes: Vec<CovarianceMode>,
    /// One run per mode at the configured SNR, in `modes` order.
    pub runs: Vec<CapacitySamples>,
    pub sweep: Vec<SweepRow>,
    pub gains: Vec<GainRow>,
    pub best_alpha: Vec<(IccVariant, f64)>,
    pub files: Vec<PathBuf>,
}

impl CapacitySummary {
    pub fn run(&self, label: &str) -> Option<&CapacitySamples> {
        self.runs.iter().find(|r| r.covariance_label == label)
    }
}

impl fmt::Display for CapacitySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(first) = self.runs.first() {
            writeln!(
                f,
                "mean capacity at {} dB, {}x{}, {} trials, seed {}",
                fmt_sig6(first.config.snr_db),
                first.config.n_r,
                first.config.n_t,
                first.config.trials,
                first.config.seed
            )?;
        }
        for r in &self.runs {
            writeln!(f, "  {:<22} {:>9.4} ± {:.4}", r.covariance_label, r.mean(), r.std_error())?;
        }
        writeln!(f, "gains over the correlated baseline:")?;
        for g in &self.gains {
            let reference = g
                .reference
                .map(|p| format!("  (reference {p}, delta {:+.3})", g.gain - p))
                .unwrap_or_default();
            writeln!(
                f,
                "  {:<22} {:>7.4} ± {:.4}  snr-avg {:>7.4}{reference}",
                g.comparison, g.gain, g.std_error, g.gain_snr_avg
            )?;
        }
        for (v, a) in &self.best_alpha {
            writeln!(f, "best alpha ({v}): {}", fmt_sig6(*a))?;
        }
        Ok(())
    }
}

fn modes_for(cfg: &ExperimentConfig, cov: &ToeplitzCovariance) -> Vec<CovarianceMode> {
    let mut modes = vec![
        CovarianceMode::Iid,
        CovarianceMode::fixed("correlated", cov.to_dense()),
    ];
    for variant in cfg.icc.variant.variants() {
        for &alpha in &cfg.icc.capacity_alphas {
            modes.push(CovarianceMode::Icc { alpha, variant });
        }
    }
    modes
}

/// Runs every covariance mode at the configured SNR and across the SNR
/// grid; writes samples, CDFs, the SNR sweep, gains and optional plots.
pub fn cmd_capacity(cfg: &ExperimentConfig) -> Result<CapacitySummary, CliError> {
    let cov = cfg.validate()?;
    let pair = split(&cov);
    let projection: CovarianceProjection = cfg.icc.projection.into();
    let channel = cfg.channel.channel_config();
    let modes = modes_for(cfg, &cov);

    let runs = modes
        .iter()
        .map(|m| capacity::mean_capacity_with(&channel, m, Some(&pair), projection))
        .collect::<Result<Vec<_>, _>>()
        .map_err(numerical)?;
    let sweep_samples = capacity::snr_sweep_samples(&channel, &cfg.channel.snr_grid_db, &modes, Some(&pair), projection)
        .map_err(numerical)?;
    let sweep = capacity::sweep_rows(&sweep_samples, &modes);

    let with_reference = is_reference_example(&cov)
        && channel.n_r == reference().capacity.n_r
        && channel.snr_db == reference().capacity.snr_db;
    let base = &runs[1];
    let per_snr = modes.len();
    let snr_avg_gain = |k: usize| -> f64 {
        let gaps: Vec<f64> = sweep_samples
            .chunks(per_snr)
            .map(|chunk| chunk[k].mean() - chunk[1].mean())
            .collect();
        gaps.iter().sum::<f64>() / gaps.len() as f64
    };
    let mut gains = Vec::new();
    for (k, mode) in modes.iter().enumerate() {
        let (comparison, variant, alpha, reference_gain) = match mode {
            CovarianceMode::Iid => (
                "iid-vs-correlated".to_string(),
                None,
                None,
                with_reference.then(|| reference().capacity.correlation_loss),
            ),
            CovarianceMode::Fixed { .. } => continue,
            CovarianceMode::Icc { alpha, variant } => (
                format!("{}-vs-correlated", mode.label()),
                Some(*variant),
                Some(*alpha),
                with_reference.then(|| reference().gain(*alpha)).flatten(),
            ),
        };
        let g = paired_gain(base, &runs[k]).map_err(numerical)?;
        gains.push(GainRow {
            comparison,
            variant,
            alpha,
            snr_db: channel.snr_db,
            gain: g.gain,
            std_error: g.std_error,
            gain_snr_avg: snr_avg_gain(k),
            reference: reference_gain,
        });
    }

    let mut best_alpha = Vec::new();
    for variant in cfg.icc.variant.variants() {
        let (alphas, means): (Vec<f64>, Vec<f64>) = modes
            .iter()
            .zip(&runs)
            .filter_map(|(m, r)| match m {
                CovarianceMode::Icc { alpha, variant: v } if *v == variant => Some((*alpha, r.mean())),
                _ => None,
            })
            .unzip();
        if !alphas.is_empty() {
            best_alpha.push((variant, alphas[best_alpha_index(&alphas, &means)]));
        }
    }

    let mut files = Vec::new();
    let cdf_n = cfg.channel.cdf_trials.min(channel.trials);
    let header = |trials: usize| {
        vec![
            ("seed", channel.seed.to_string()),
            ("trials", trials.to_string()),
            ("n_t", channel.n_t.to_string()),
            ("n_r", channel.n_r.to_string()),
            ("projection", format!("{:?}", projection).to_lowercase()),
        ]
    };
    if cfg.wants(OutputFormat::Csv) {
        for run in &runs {
            let mut buf = Vec::new();
            run.write_csv(&mut buf).map_err(numerical)?;
            files.push(write_file(&cfg.output_dir, &format!("samples_{}.csv", run.covariance_label), &buf)?);

            let cdf = empirical_cdf_of(&run.values[..cdf_n]).map_err(numerical)?;
            let mut buf = Vec::new();
            let mut meta = header(cdf_n);
            meta.push(("mode", run.covariance_label.clone()));
            meta.push(("snr_db", fmt_sig6(channel.snr_db)));
            write_metadata(&mut buf, &meta).map_err(numerical)?;
            cdf.write_csv(&mut buf).map_err(numerical)?;
            files.push(write_file(&cfg.output_dir, &format!("cdf_{}.csv", run.covariance_label), &buf)?);
        }

        let mut buf = Vec::new();
        write_metadata(&mut buf, &header(channel.trials)).map_err(numerical)?;
        capacity::write_sweep_csv(&mut buf, &sweep).map_err(numerical)?;
        files.push(write_file(&cfg.output_dir, "snr_sweep.csv", &buf)?);

        let mut buf = Vec::new();
        let mut meta = header(channel.trials);
        meta.push(("baseline", "correlated".into()));
        meta.push((
            "snr_grid_db",
            cfg.channel.snr_grid_db.iter().map(|s| fmt_sig6(*s)).collect::<Vec<_>>().join(" "),
        ));
        for (v, a) in &best_alpha {
            meta.push(("best_alpha", format!("{v}:{}", fmt_sig6(*a))));
        }
        write_metadata(&mut buf, &meta).map_err(numerical)?;
        writeln!(buf, "comparison,variant,alpha,snr_db,gain,stderr,gain_snr_avg,reference,delta").map_err(numerical)?;
        for g in &gains {
            writeln!(
                buf,
                "{},{},{},{},{},{},{},{},{}",
                g.comparison,
                g.variant.map(|v| v.to_string()).unwrap_or_default(),
                g.alpha.map(fmt_sig6).unwrap_or_default(),
                fmt_sig6(g.snr_db),
                fmt_sig6(g.gain),
                fmt_sig6(g.std_error),
                fmt_sig6(g.gain_snr_avg),
                g.reference.map(fmt_sig6).unwrap_or_default(),
                g.reference.map(|p| fmt_sig6(g.gain - p)).unwrap_or_default(),
            )
            .map_err(numerical)?;
        }
        files.push(write_file(&cfg.output_dir, "gains.csv", &buf)?);
    }
    if cfg.wants(OutputFormat::Svg) {
        let cdf_series = runs
            .iter()
            .map(|run| {
                let cdf = empirical_cdf_of(&run.values[..cdf_n]).map_err(numerical)?;
                Ok(Series {
                    label: run.covariance_label.clone(),
                    points: cdf.points,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let cdf_plot = LinePlot {
            title: format!("Capacity CDF at {} dB", fmt_sig6(channel.snr_db)),
            x_label: "capacity (bps/Hz)".into(),
            y_label: "CDF".into(),
            series: cdf_series,
        };
        files.push(write_file(&cfg.output_dir, "cdf.svg", cdf_plot.to_svg().as_bytes())?);

        let sweep_series = modes
            .iter()
            .map(|m| {
                let label = m.label();
                Series {
                    points: sweep
                        .iter()
                        .filter(|r| r.mode == label)
                        .map(|r| (r.snr_db, r.mean))
                        .collect(),
                    label,
                }
            })
            .collect();
        let sweep_plot = LinePlot {
            title: "Mean capacity versus SNR".into(),
            x_label: "SNR (dB)".into(),
            y_label: "mean capacity (bps/Hz)".into(),
            series: sweep_series,
        };
        files.push(write_file(&cfg.output_dir, "snr_sweep.svg", sweep_plot.to_svg().as_bytes())?);
    }

    Ok(CapacitySummary {
        modes,
        runs,
        sweep,
        gains,
        best_alpha,
        files,
    })
}

/// `split`, `icc-table` and `capacity` into one output directory.
pub fn reproduce_all(cfg: &ExperimentConfig) -> Result<(SplitSummary, IccTableSummary, CapacitySummary), CliError> {
    cfg.validate()?;
    Ok((cmd_split(cfg)?, cmd_icc_table(cfg)?, cmd_capacity(cfg)?))
}
