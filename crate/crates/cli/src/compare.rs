use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Args;
use ct_compand::render::{contrast_metrics, edge_gradient, Roi};
use ct_compand::{compand, window_render, BitDepth, LdrImage, WindowSpec};
use serde::Serialize;

use crate::batch::load_input;
use crate::params::{param_hash, resolve};
use crate::{fail, Depth, PipelineArgs};

#[derive(Args, Debug)]
pub(crate) struct CompareArgs {
    input: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// One `name x y w h` rectangle per line; `#` starts a comment.
    #[arg(long)]
    rois: PathBuf,
    /// Machine-readable (JSON) copy of the table.
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "8")]
    bit_depth: Depth,
}

pub(crate) fn parse_rois(text: &str) -> Result<Vec<Roi>, String> {
    let mut rois = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [name, rest @ ..] = fields.as_slice() else { unreachable!("line is not empty") };
        if rest.len() != 4 {
            return Err(format!("line {}: expected `name x y w h`, got {} fields", idx + 1, fields.len()));
        }
        let mut nums = [0usize; 4];
        for (n, s) in nums.iter_mut().zip(rest) {
            *n = s.parse().map_err(|_| format!("line {}: `{s}` is not a non-negative integer", idx + 1))?;
        }
        rois.push(Roi::new(*name, nums[0], nums[1], nums[2], nums[3]));
    }
    Ok(rois)
}

#[derive(Serialize, Debug, PartialEq)]
struct Row {
    roi: String,
    image: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rms_contrast: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entropy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dynamic_range: Option<u16>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge_gradient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct Table<'a> {
    input: String,
    param_hash: String,
    bit_depth: u32,
    rows: &'a [Row],
}

fn rows_for(roi: &Roi, images: &[(String, LdrImage)]) -> Vec<Row> {
    let (w, h) = (images[0].1.width(), images[0].1.height());
    if let Err(e) = roi.check_bounds(w, h) {
        return vec![Row {
            roi: roi.name.clone(),
            image: "*".into(),
            rms_contrast: None,
            entropy: None,
            dynamic_range: None,
            edge_gradient: None,
            error: Some(e.to_string()),
        }];
    }
    images
        .iter()
        .map(|(name, img)| {
            let m = contrast_metrics(img, roi).expect("bounds checked");
            Row {
                roi: roi.name.clone(),
                image: name.clone(),
                rms_contrast: Some(m.rms_contrast),
                entropy: Some(m.entropy),
                dynamic_range: Some(m.dynamic_range),
                edge_gradient: edge_gradient(img, roi).ok(),
                error: None,
            }
        })
        .collect()
}

fn render_table(rows: &[Row]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:<6} {:>12} {:>8} {:>13} {:>13}",
        "roi", "image", "rms_contrast", "entropy", "dynamic_range", "edge_gradient"
    );
    for r in rows {
        match &r.error {
            Some(e) => {
                let _ = writeln!(out, "{:<16} {:<6} error: {e}", r.roi, r.image);
            }
            None => {
                let grad = r.edge_gradient.map_or("-".to_string(), |g| format!("{g:.6}"));
                let _ = writeln!(
                    out,
                    "{:<16} {:<6} {:>12.6} {:>8.4} {:>13} {:>13}",
                    r.roi,
                    r.image,
                    r.rms_contrast.unwrap_or_default(),
                    r.entropy.unwrap_or_default(),
                    r.dynamic_range.unwrap_or_default(),
                    grad
                );
            }
        }
    }
    out
}

pub(crate) fn run(args: CompareArgs) -> ExitCode {
    let p = match resolve(&args.pipeline) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let rois = match std::fs::read_to_string(&args.rois) {
        Ok(text) => match parse_rois(&text) {
            Ok(r) => r,
            Err(e) => return fail(format!("{}: {e}", args.rois.display())),
        },
        Err(e) => return fail(format!("{}: {e}", args.rois.display())),
    };
    let slice = match load_input(&args.input, args.pipeline.spacing) {
        Ok(s) => s,
        Err(e) => return fail(format!("{}: {e}", args.input.display())),
    };
    let depth: BitDepth = args.bit_depth.into();
    let macc = match compand(&slice, &p, depth) {
        Ok(img) => img,
        Err(e) => return fail(format!("{}: {e}", args.input.display())),
    };
    let mut images = vec![("macc".to_string(), macc)];
    for w in WindowSpec::presets() {
        let img = window_render(&slice, &w, depth);
        images.push((w.name.clone(), img));
    }

    let rows: Vec<Row> = rois.iter().flat_map(|r| rows_for(r, &images)).collect();
    print!("{}", render_table(&rows));

    let table = Table {
        input: args.input.display().to_string(),
        param_hash: param_hash(&p),
        bit_depth: depth.bits(),
        rows: &rows,
    };
    let json = serde_json::to_string_pretty(&table).expect("table serializes");
    match std::fs::write(&args.output, json + "\n") {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(format!("{}: {e}", args.output.display())),
    }
}
