use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Args;
use ct_compand::ingest::{decode_raw_float, parse_dicom, RAW_MAGIC};
use ct_compand::render::png::write_png;
use ct_compand::render::{contrast_metrics, ContrastMetrics, Roi};
use ct_compand::{compand_stages, quantize_output, BitDepth, CompandParams, HuSlice};
use rayon::prelude::*;

use crate::params::{param_hash, resolve};
use crate::{fail, Depth, PipelineArgs};

pub(crate) const REPORT_NAME: &str = "ct-compand-report.txt";
const THREADS_VAR: &str = "CT_COMPAND_THREADS";

#[derive(Args, Debug)]
pub(crate) struct CompandArgs {
    /// Input files, or directories whose files are all processed.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, short)]
    output_dir: PathBuf,
    #[arg(long, value_enum, default_value = "8")]
    bit_depth: Depth,
}

/// Load a DICOM or raw-float slice. `spacing` overrides the unit spacing of
/// raw-float files and is ignored for DICOM.
pub(crate) fn load_input(path: &Path, spacing: Option<f64>) -> Result<HuSlice, String> {
    let bytes = std::fs::read(path).map_err(|e| e.to_string())?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    if bytes.starts_with(RAW_MAGIC) {
        let grid = decode_raw_float(&bytes).map_err(|e| e.to_string())?;
        let s = spacing.unwrap_or(1.0);
        HuSlice::new(grid, (s, s), stem).map_err(|e| e.to_string())
    } else {
        parse_dicom(&bytes, &stem).map(|(slice, _)| slice).map_err(|e| e.to_string())
    }
}

/// Files named on the command line plus the visible files of every named
/// directory, each directory listing sorted by name.
fn expand_inputs(inputs: &[PathBuf]) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut entries: Vec<PathBuf> = match std::fs::read_dir(input) {
                Ok(rd) => rd
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.is_file())
                    .filter(|p| !p.file_name().is_some_and(|n| n.to_string_lossy().starts_with('.')))
                    .collect(),
                Err(_) => vec![input.clone()],
            };
            entries.sort();
            out.extend(entries);
        } else {
            out.push(input.clone());
        }
    }
    out
}

fn thread_count() -> Result<usize, String> {
    match std::env::var(THREADS_VAR) {
        Ok(v) if !v.trim().is_empty() => {
            v.trim().parse::<usize>().map_err(|_| format!("{THREADS_VAR} must be a non-negative integer, got `{v}`"))
        }
        _ => Ok(0),
    }
}

struct Done {
    output: String,
    metrics: ContrastMetrics,
    degenerate: bool,
    teeth_level: usize,
}

fn process(
    path: &Path,
    out_dir: &Path,
    p: &CompandParams,
    spacing: Option<f64>,
    depth: BitDepth,
) -> Result<Done, String> {
    let slice = load_input(path, spacing)?;
    let stages = compand_stages(&slice, p).map_err(|e| e.to_string())?;
    let q = quantize_output(&stages.output, depth, p.lo_pct, p.hi_pct).map_err(|e| e.to_string())?;
    let name = format!("{}.macc.png", slice.source_id);
    write_png(out_dir.join(&name), &q.image).map_err(|e| e.to_string())?;
    let full = Roi::new("image", 0, 0, q.image.width(), q.image.height());
    let metrics = contrast_metrics(&q.image, &full).map_err(|e| e.to_string())?;
    Ok(Done { output: name, metrics, degenerate: q.degenerate, teeth_level: stages.teeth_level })
}

pub(crate) fn run(args: CompandArgs) -> ExitCode {
    let p = match resolve(&args.pipeline) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let threads = match thread_count() {
        Ok(n) => n,
        Err(e) => return fail(e),
    };
    let files = expand_inputs(&args.inputs);
    if files.is_empty() {
        return fail("no input files found");
    }
    if let Err(e) = std::fs::create_dir_all(&args.output_dir) {
        return fail(format!("{}: {e}", args.output_dir.display()));
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => return fail(e),
    };

    // Two inputs with the same stem would write the same PNG.
    let mut seen = HashSet::new();
    let duplicate: Vec<bool> =
        files.iter().map(|f| !seen.insert(f.file_stem().map(|s| s.to_os_string()).unwrap_or_default())).collect();

    let depth: BitDepth = args.bit_depth.into();
    let spacing = args.pipeline.spacing;
    let results: Vec<Result<Done, String>> = pool.install(|| {
        files
            .par_iter()
            .zip(&duplicate)
            .map(|(f, &dup)| {
                if dup {
                    Err("another input has the same file stem".to_string())
                } else {
                    process(f, &args.output_dir, &p, spacing, depth)
                }
            })
            .collect()
    });

    let failed = results.iter().filter(|r| r.is_err()).count();
    let report = render_report(&p, depth, &files, &results);
    let report_path = args.output_dir.join(REPORT_NAME);
    if let Err(e) = std::fs::write(&report_path, report) {
        return fail(format!("{}: {e}", report_path.display()));
    }
    for (f, r) in files.iter().zip(&results) {
        if let Err(e) = r {
            eprintln!("error: {}: {e}", f.display());
        }
    }
    eprintln!("{} of {} inputs companded; report in {}", files.len() - failed, files.len(), report_path.display());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn render_report(p: &CompandParams, depth: BitDepth, files: &[PathBuf], results: &[Result<Done, String>]) -> String {
    let failed = results.iter().filter(|r| r.is_err()).count();
    let mut out = String::new();
    let _ = writeln!(out, "# ct-compand report");
    let _ = writeln!(out, "param_hash = {}", param_hash(p));
    let _ = writeln!(out, "mode = {}", p.mode);
    let _ = writeln!(out, "bit_depth = {}", depth.bits());
    let _ = writeln!(out, "inputs = {}", files.len());
    let _ = writeln!(out, "succeeded = {}", files.len() - failed);
    let _ = writeln!(out, "failed = {failed}");
    let _ = writeln!(out);
    for (f, r) in files.iter().zip(results) {
        match r {
            Ok(d) => {
                let _ = writeln!(
                    out,
                    "ok {} -> {} rms_contrast={:.6} entropy={:.6} dynamic_range={} teeth_level={}{}",
                    f.display(),
                    d.output,
                    d.metrics.rms_contrast,
                    d.metrics.entropy,
                    d.metrics.dynamic_range,
                    d.teeth_level,
                    if d.degenerate { " degenerate" } else { "" }
                );
            }
            Err(e) => {
                let _ = writeln!(out, "error {}: {e}", f.display());
            }
        }
    }
    out
}
