use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Subcommand;
use ct_compand::{CompandParams, Error};
use sha2::{Digest, Sha256};

use crate::{fail, PipelineArgs};

#[derive(Subcommand, Debug)]
pub(crate) enum ParamsAction {
    /// Write the default parameter set, with comments, to PATH (or stdout).
    Dump { path: Option<PathBuf> },
    /// Parse and validate a parameter file.
    Validate { path: PathBuf },
}

pub(crate) fn read_params_file(path: &Path) -> Result<CompandParams, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    CompandParams::from_file_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parameters for a pipeline run: file (or defaults) plus flag overrides.
/// Invariants are not checked here so that violations surface per input.
pub(crate) fn resolve(args: &PipelineArgs) -> Result<CompandParams, String> {
    let mut p = match &args.params {
        Some(path) => read_params_file(path)?,
        None => CompandParams::default(),
    };
    if let Some(mode) = args.mode {
        p.mode = mode.into();
    }
    if let Some(hu) = args.v_hu {
        p.v = p.hu_to_unit(hu);
    }
    Ok(p)
}

/// SHA-256 of the canonical parameter text, hex encoded.
pub(crate) fn param_hash(p: &CompandParams) -> String {
    hex::encode(Sha256::digest(p.canonical_text().as_bytes()))
}

pub(crate) fn run(action: ParamsAction) -> ExitCode {
    match action {
        ParamsAction::Dump { path } => {
            let text = CompandParams::default().to_file_string();
            match path {
                Some(path) => match std::fs::write(&path, text) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => fail(format!("{}: {e}", path.display())),
                },
                None => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
            }
        }
        ParamsAction::Validate { path } => {
            let p = match read_params_file(&path) {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            match p.validate() {
                Ok(()) => {
                    println!("{}: ok (hash {})", path.display(), param_hash(&p));
                    ExitCode::SUCCESS
                }
                Err(Error::Params(errs)) => {
                    for e in &errs {
                        eprintln!("error: {}: {}: {e}", path.display(), e.key);
                    }
                    ExitCode::from(1)
                }
                Err(e) => fail(e),
            }
        }
    }
}
