use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use icc_mimo::cli::config::VariantChoice;
use icc_mimo::cli::{
    cmd_capacity, cmd_icc_table, cmd_split, parse_alpha_list, parse_formats, reproduce_all, AlphaTarget, CliError,
    ExperimentConfig, Overrides,
};

#[derive(Parser)]
#[command(name = "icc-mimo", version, about = "Toeplitz covariance splitting, ICC spectral radii and MIMO capacity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split the covariance into circulant and skew-circulant parts.
    Split(Common),
    /// Sweep alpha and tabulate the spectral-radius bound and actual radius.
    IccTable(Common),
    /// Monte Carlo mean capacity, CDFs, SNR sweep and gains.
    Capacity(Common),
    /// Run split, icc-table and capacity into one output directory.
    ReproduceAll(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; every field is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated alpha values.
    #[arg(long)]
    alpha: Option<String>,
    /// as-printed, cscs or both.
    #[arg(long)]
    variant: Option<VariantChoice>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of csv,svg.
    #[arg(long)]
    format: Option<String>,
    /// Use the raw ICC matrix in the capacity determinant instead of its PSD projection.
    #[arg(long)]
    raw_covariance: bool,
}

impl Common {
    fn config(&self, target: AlphaTarget) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let overrides = Overrides {
            seed: self.seed,
            trials: self.trials,
            alphas: self.alpha.as_deref().map(parse_alpha_list).transpose()?,
            variant: self.variant,
            out: self.out.clone(),
            formats: self.format.as_deref().map(parse_formats).transpose()?,
            raw_covariance: self.raw_covariance,
        };
        overrides.apply(&mut cfg, target);
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Split(c) => println!("{}", cmd_split(&c.config(AlphaTarget::Both)?)?),
        Command::IccTable(c) => print!("{}", cmd_icc_table(&c.config(AlphaTarget::Table)?)?),
        Command::Capacity(c) => print!("{}", cmd_capacity(&c.config(AlphaTarget::Capacity)?)?),
        Command::ReproduceAll(c) => {
            let (split, table, capacity) = reproduce_all(&c.config(AlphaTarget::Capacity)?)?;
            println!("{split}\n");
            println!("{table}");
            print!("{capacity}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
