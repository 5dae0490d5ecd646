use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ct_compand::{BitDepth, Mode};

mod batch;
mod compare;
mod params;
mod window;

#[derive(Parser, Debug)]
#[command(name = "ct-compand", version, about = "Compand HDR CT slices into a single display image")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compand DICOM or raw-float slices into PNGs.
    Compand(batch::CompandArgs),
    /// Render a slice through a single window.
    Window(window::WindowArgs),
    /// Compare region metrics of the companded output and the preset windows.
    Compare(compare::CompareArgs),
    /// Write or check a parameter file.
    Params {
        #[command(subcommand)]
        action: params::ParamsAction,
    },
    /// Write the synthetic mandible phantom as a raw-float file.
    Phantom {
        output: PathBuf,
        #[arg(long, default_value_t = 256)]
        size: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub(crate) enum Depth {
    #[value(name = "8")]
    Eight,
    #[value(name = "16")]
    Sixteen,
}

impl From<Depth> for BitDepth {
    fn from(d: Depth) -> Self {
        match d {
            Depth::Eight => BitDepth::Eight,
            Depth::Sixteen => BitDepth::Sixteen,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub(crate) enum ModeArg {
    Ct,
    Natural,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Ct => Mode::Ct,
            ModeArg::Natural => Mode::Natural,
        }
    }
}

/// Options shared by commands that run the companding pipeline.
#[derive(Args, Debug, Clone)]
pub(crate) struct PipelineArgs {
    /// Parameter file (defaults are used when omitted).
    #[arg(long)]
    params: Option<PathBuf>,
    /// Overrides the mode in the parameter file.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Soft-tissue turnover V given in HU; converted with the clip range.
    #[arg(long)]
    v_hu: Option<f64>,
    /// Pixel spacing in mm for raw-float inputs, which carry none.
    #[arg(long)]
    spacing: Option<f64>,
}

pub(crate) fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Compand(args) => batch::run(args),
        Command::Window(args) => window::run(args),
        Command::Compare(args) => compare::run(args),
        Command::Params { action } => params::run(action),
        Command::Phantom { output, size, seed } => {
            if size < 16 {
                return fail("phantom size must be at least 16");
            }
            let mut spec = ct_compand::phantom::PhantomSpec { size, ..Default::default() };
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            let slice = ct_compand::phantom::mandible_phantom(&spec);
            match ct_compand::ingest::save_raw_float(&output, slice.values()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(e),
            }
        }
    }
}
