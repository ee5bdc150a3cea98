//! `aim-dirac` command line: argument parsing and dispatch.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use aim_dirac::spectrum::KummerMode;
use aim_dirac::SpinorComponent;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::{Outcome, EXIT_OK, EXIT_USAGE};
use config::{Engine, OutputFormat, Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "aim-dirac", version, about = "Dirac-Coulomb bound states with a position-dependent mass")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels n = 0..=nMax from the selected engine(s)
    Spectrum,
    /// Normalised closed-form eigenfunction samples
    Wavefunction {
        /// Level
        #[arg(long, default_value_t = 0)]
        n: usize,
        /// Radii, comma separated
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        r: Vec<f64>,
    },
    /// Asymptotic-iteration roots with stability data
    Aim,
    /// Finite-difference oracle energies
    Oracle,
    /// Cross-engine verification suites; exit code 3 on any failure
    Verify,
}

#[derive(Debug, Args, Default)]
pub struct Flags {
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub m0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub v0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub k: Option<i64>,
    /// upper | lower
    #[arg(long, global = true)]
    pub component: Option<SpinorComponent>,
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub engine: Option<Engine>,
    #[arg(long, global = true)]
    pub aim_depth: Option<usize>,
    /// Evaluation point r0 of the AIM determinant
    #[arg(long, global = true)]
    pub aim_point: Option<f64>,
    #[arg(long, global = true)]
    pub grid_rmin: Option<f64>,
    #[arg(long, global = true)]
    pub grid_rmax: Option<f64>,
    #[arg(long, global = true)]
    pub grid_h: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// ode-consistent | paper-literal
    #[arg(long, global = true)]
    pub kummer_mode: Option<KummerMode>,
    /// JSON file mirroring the run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            m0: self.m0,
            v0: self.v0,
            b: self.b,
            k: self.k,
            component: self.component,
            n_max: self.n_max,
            engine: self.engine,
            aim_depth: self.aim_depth,
            aim_point: self.aim_point,
            grid_r_min: self.grid_rmin,
            grid_r_max: self.grid_rmax,
            grid_h: self.grid_h,
            format: self.format,
            kummer_mode: self.kummer_mode,
        }
    }
}

/// Defaults, then the config file, then flags.
pub fn resolve_config(flags: &Flags) -> Result<RunConfig, String> {
    let mut config = match &flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config.apply(&flags.overrides());
    config.validate()?;
    Ok(config)
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { stdout: text, stderr: String::new(), code: EXIT_OK }
                }
                _ => Outcome { stdout: String::new(), stderr: text, code: EXIT_USAGE },
            };
        }
    };
    let config = match resolve_config(&cli.flags) {
        Ok(c) => c,
        Err(msg) => return Outcome::fail(EXIT_USAGE, msg),
    };
    match &cli.command {
        Command::Spectrum => commands::spectrum(&config),
        Command::Wavefunction { n, r } => commands::wavefunction(&config, *n, r),
        Command::Aim => commands::aim(&config),
        Command::Oracle => commands::oracle(&config),
        Command::Verify => commands::verify(&config),
    }
}
