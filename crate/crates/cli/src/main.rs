//! `rotovac`: band tables, energy curves, ground states and self-checks for
//! a charged or neutral ring with a Dirichlet cut.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod manifest;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rotovac_core::spectrum::Frame;

pub use output::CliError;

#[derive(Parser, Debug)]
#[command(name = "rotovac", version, about = "Zero-point rotation of a ring with a Dirichlet cut")]
struct Cli {
    /// JSON file with constant and material overrides.
    #[arg(long, global = true, env = "ROTOVAC_CONFIG")]
    config: Option<PathBuf>,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameArg {
    Lab,
    Corotating,
}

impl From<FrameArg> for Frame {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::Lab => Frame::Lab,
            FrameArg::Corotating => Frame::Corotating,
        }
    }
}

/// Ring and material.
#[derive(Args, Debug, Clone, Serialize)]
pub struct DeviceArgs {
    /// Magnetic field, T.
    #[arg(long = "B", allow_hyphen_values = true)]
    #[serde(rename = "B")]
    pub b: f64,
    /// Ring radius, m.
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub r: f64,
    /// Material preset or a name defined in the config.
    #[arg(long, default_value = "photon-charged")]
    pub material: String,
    /// Wave speed override, m/s.
    #[arg(long)]
    pub v: Option<f64>,
    /// Linear mass density override, kg/m.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Classical moment of inertia, kg·m² (default 2πμR³).
    #[arg(long = "I-cl")]
    #[serde(rename = "I_cl")]
    pub i_cl: Option<f64>,
    /// Number of identical rings.
    #[arg(long = "N", default_value_t = 1)]
    #[serde(rename = "N")]
    pub n_rings: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RangeArgs {
    /// Lower end of the Ω range, 1/s.
    #[arg(long = "omega-min", allow_hyphen_values = true)]
    pub omega_min: Option<f64>,
    /// Upper end of the Ω range, 1/s.
    #[arg(long = "omega-max", allow_hyphen_values = true)]
    pub omega_max: Option<f64>,
    #[arg(long, default_value_t = 401)]
    pub samples: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Band boundaries Ω_n at fixed field.
    Bands {
        #[command(flatten)]
        device: DeviceArgs,
        /// Number of bands, starting at n = 1.
        #[arg(long, default_value_t = 10)]
        n: i64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Energy and angular momentum over a range of Ω.
    EnergyCurve {
        #[command(flatten)]
        device: DeviceArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, value_enum, default_value_t = FrameArg::Lab)]
        frame: FrameArg,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also write an SVG plot.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Global minimum of the total energy.
    GroundState {
        #[command(flatten)]
        device: DeviceArgs,
        /// Highest band searched.
        #[arg(long = "n-max", default_value_t = rotovac_core::device::DEFAULT_N_MAX)]
        n_max: i64,
    },
    /// Smallest radius with a rotating ground state, and the operating point there.
    CriticalRadius {
        /// Magnetic field, T.
        #[arg(long = "B", allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value = "nanotube")]
        material: String,
        #[arg(long)]
        v: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Characteristic scales for four field/radius pairs, against quoted values.
    Table1 {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Total energy against total angular momentum.
    ElCurve {
        #[command(flatten)]
        device: DeviceArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Cross-checks between independent computations.
    Verify {
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        #[arg(long)]
        full: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = commands::load_config(cli.config.as_deref())?;
    let sink = output::Sink::new(cli.out);
    match cli.command {
        Command::Bands { device, n, format } => commands::bands(&config, &device, n, format, &sink),
        Command::EnergyCurve { device, range, frame, format, svg } => {
            commands::energy_curve(&config, &device, &range, frame, format, svg.as_deref(), &sink)
        }
        Command::GroundState { device, n_max } => commands::ground_state(&config, &device, n_max, &sink),
        Command::CriticalRadius { b, material, v, mu, format } => {
            commands::critical_radius(&config, b, &material, v, mu, format, &sink)
        }
        Command::Table1 { format } => commands::table1(&config, format, &sink),
        Command::ElCurve { device, range, format, svg } => commands::el_curve(&config, &device, &range, format, svg.as_deref(), &sink),
        Command::Verify { full, format, .. } => commands::verify(&config, full, format, &sink),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rotovac: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
