use std::path::PathBuf;
use std::process::ExitCode;

use clap::Args;
use ct_compand::render::png::write_png;
use ct_compand::{window_render, WindowSpec};

use crate::{batch::load_input, fail, Depth};

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("window").required(true).args(["preset", "level"]))]
pub(crate) struct WindowArgs {
    input: PathBuf,
    /// Named window: bone (400/1800), soft (50/400) or lung (-600/1500).
    #[arg(long, value_parser = ["bone", "soft", "lung"], conflicts_with_all = ["level", "width"])]
    preset: Option<String>,
    /// Window center in HU.
    #[arg(long, requires = "width", allow_hyphen_values = true)]
    level: Option<f64>,
    /// Window width in HU.
    #[arg(long, requires = "level", allow_hyphen_values = true)]
    width: Option<f64>,
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "8")]
    bit_depth: Depth,
}

pub(crate) fn run(args: WindowArgs) -> ExitCode {
    let window = match (&args.preset, args.level, args.width) {
        (Some(name), _, _) => WindowSpec::preset(name).expect("clap restricts preset names"),
        (None, Some(level), Some(width)) => match WindowSpec::new(level, width, "custom") {
            Ok(w) => w,
            Err(e) => return fail(e),
        },
        _ => unreachable!("clap enforces one window source"),
    };
    let slice = match load_input(&args.input, None) {
        Ok(s) => s,
        Err(e) => return fail(format!("{}: {e}", args.input.display())),
    };
    let img = window_render(&slice, &window, args.bit_depth.into());
    match write_png(&args.output, &img) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
