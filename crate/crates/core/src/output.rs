//! CSV and JSON serialization of spectrum files.
//!
//! CSV files carry their metadata in `#` comment lines: the code version,
//! the canonical scenario text (`# config:`), derived scalars (`# header:`)
//! and, per block, the spectrum metadata (`# meta.`) followed by
//! `detuning,intensity` rows written with 17 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::LineList;
use crate::scenario::{Format, SpectrumBlock, SpectrumFile};
use crate::spectrum::{Kernel, Spectrum, SpectrumMeta};

const COLUMNS: &str = "detuning,intensity";

fn fmt_row(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Io(format!("malformed number `{s}` in {what}")))
}

#[derive(Serialize, Deserialize)]
struct JsonBlock {
    name: String,
    meta: SpectrumMeta,
    detuning: Vec<f64>,
    intensity: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct JsonFile {
    code_version: String,
    config: String,
    header: BTreeMap<String, f64>,
    blocks: Vec<JsonBlock>,
}

/// Serializes a bare spectrum as a one-block file.
pub fn serialize_spectrum(s: &Spectrum, format: Format) -> Vec<u8> {
    serialize_file(&SpectrumFile::from_spectrum(s.clone()), format)
}

pub fn serialize_file(file: &SpectrumFile, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => to_csv(file).into_bytes(),
        Format::Json => to_json(file).into_bytes(),
    }
}

pub fn parse_file(bytes: &[u8], format: Format) -> Result<SpectrumFile> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Io(format!("output is not UTF-8: {e}")))?;
    match format {
        Format::Csv => from_csv(text),
        Format::Json => from_json(text),
    }
}

fn to_json(file: &SpectrumFile) -> String {
    let doc = JsonFile {
        code_version: file.code_version.clone(),
        config: file.config.clone(),
        header: file.header.clone(),
        blocks: file
            .blocks
            .iter()
            .map(|b| JsonBlock {
                name: b.name.clone(),
                meta: b.spectrum.meta.clone(),
                detuning: b.spectrum.grid.clone(),
                intensity: b.spectrum.intensity.clone(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("spectrum metadata is always serializable");
    s.push('\n');
    s
}

fn from_json(text: &str) -> Result<SpectrumFile> {
    let doc: JsonFile = serde_json::from_str(text).map_err(|e| Error::Io(format!("bad JSON spectrum: {e}")))?;
    let blocks = doc
        .blocks
        .into_iter()
        .map(|b| {
            if b.detuning.len() != b.intensity.len() {
                return Err(Error::Io(format!("block `{}` has arrays of different length", b.name)));
            }
            Ok(SpectrumBlock {
                name: b.name,
                spectrum: Spectrum {
                    grid: b.detuning,
                    intensity: b.intensity,
                    meta: b.meta,
                },
            })
        })
        .collect::<Result<_>>()?;
    Ok(SpectrumFile {
        code_version: doc.code_version,
        config: doc.config,
        header: doc.header,
        blocks,
        lines: None,
    })
}

fn to_csv(file: &SpectrumFile) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {}", file.code_version);
    for line in file.config.lines() {
        let _ = writeln!(s, "# config: {line}");
    }
    for (k, v) in &file.header {
        let _ = writeln!(s, "# header: {k} = {v:?}");
    }
    for b in &file.blocks {
        let m = &b.spectrum.meta;
        let _ = writeln!(s, "# block: {}", b.name);
        let _ = writeln!(s, "# meta.method: {}", m.method);
        if let Some(k) = m.kernel {
            let _ = writeln!(s, "# meta.kernel: {}", k.name());
        }
        if let Some(w) = m.width {
            let _ = writeln!(s, "# meta.width: {w:?}");
        }
        let _ = writeln!(s, "# meta.target_weight: {:?}", m.target_weight);
        let _ = writeln!(s, "# meta.integral: {:?}", m.integral);
        let _ = writeln!(s, "# meta.clipped_weight: {:?}", m.clipped_weight);
        for (k, v) in &m.extras {
            let _ = writeln!(s, "# meta.extras.{k}: {v:?}");
        }
        for w in &m.warnings {
            let _ = writeln!(s, "# meta.warning: {}", w.replace('\n', " "));
        }
        let _ = writeln!(s, "{COLUMNS}");
        for (x, y) in b.spectrum.grid.iter().zip(&b.spectrum.intensity) {
            let _ = writeln!(s, "{},{}", fmt_row(*x), fmt_row(*y));
        }
    }
    s
}

fn from_csv(text: &str) -> Result<SpectrumFile> {
    let mut file = SpectrumFile {
        code_version: String::new(),
        config: String::new(),
        header: BTreeMap::new(),
        blocks: Vec::new(),
        lines: None,
    };
    let mut current: Option<SpectrumBlock> = None;
    for (no, line) in text.lines().enumerate() {
        let ctx = format!("line {}", no + 1);
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some(c) = rest.strip_prefix("config: ") {
                file.config.push_str(c);
                file.config.push('\n');
            } else if let Some(h) = rest.strip_prefix("header: ") {
                let (k, v) = h
                    .split_once(" = ")
                    .ok_or_else(|| Error::Io(format!("malformed header at {ctx}")))?;
                file.header.insert(k.to_string(), parse_f64(v, &ctx)?);
            } else if let Some(name) = rest.strip_prefix("block: ") {
                if let Some(b) = current.take() {
                    file.blocks.push(b);
                }
                current = Some(SpectrumBlock {
                    name: name.to_string(),
                    spectrum: Spectrum {
                        grid: Vec::new(),
                        intensity: Vec::new(),
                        meta: SpectrumMeta::default(),
                    },
                });
            } else if let Some(m) = rest.strip_prefix("meta.") {
                let block = current
                    .as_mut()
                    .ok_or_else(|| Error::Io(format!("metadata outside a block at {ctx}")))?;
                let meta = &mut block.spectrum.meta;
                let (k, v) = m
                    .split_once(": ")
                    .ok_or_else(|| Error::Io(format!("malformed metadata at {ctx}")))?;
                match k {
                    "method" => meta.method = v.to_string(),
                    "kernel" => {
                        meta.kernel = Some(Kernel::parse(v).ok_or_else(|| Error::Io(format!("unknown kernel at {ctx}")))?)
                    }
                    "width" => meta.width = Some(parse_f64(v, &ctx)?),
                    "target_weight" => meta.target_weight = parse_f64(v, &ctx)?,
                    "integral" => meta.integral = parse_f64(v, &ctx)?,
                    "clipped_weight" => meta.clipped_weight = parse_f64(v, &ctx)?,
                    "warning" => meta.warnings.push(v.to_string()),
                    other => {
                        let key = other
                            .strip_prefix("extras.")
                            .ok_or_else(|| Error::Io(format!("unknown metadata key `{other}` at {ctx}")))?;
                        meta.extras.insert(key.to_string(), parse_f64(v, &ctx)?);
                    }
                }
            } else if file.code_version.is_empty() && file.blocks.is_empty() && current.is_none() {
                file.code_version = rest.to_string();
            } else {
                return Err(Error::Io(format!("unrecognized comment at {ctx}")));
            }
        } else if line == COLUMNS || line.is_empty() {
            continue;
        } else {
            let block = current
                .as_mut()
                .ok_or_else(|| Error::Io(format!("data row outside a block at {ctx}")))?;
            let (x, y) = line
                .split_once(',')
                .ok_or_else(|| Error::Io(format!("expected two columns at {ctx}")))?;
            block.spectrum.grid.push(parse_f64(x, &ctx)?);
            block.spectrum.intensity.push(parse_f64(y, &ctx)?);
        }
    }
    if let Some(b) = current.take() {
        file.blocks.push(b);
    }
    Ok(file)
}

/// Line list sidecar: `excited,m,detuning,weight`.
pub fn serialize_lines(lines: &LineList) -> Vec<u8> {
    let mut s = String::new();
    let _ = writeln!(s, "# n_fermi = {}", lines.n_fermi);
    let _ = writeln!(s, "# total_weight = {:?}", lines.total_weight);
    let _ = writeln!(s, "# truncated_weight = {:?}", lines.truncated_weight);
    let _ = writeln!(s, "excited,m,detuning,weight");
    for l in &lines.lines {
        let _ = writeln!(s, "{},{},{},{}", l.excited, l.m, fmt_row(l.detuning), fmt_row(l.weight));
    }
    s.into_bytes()
}
