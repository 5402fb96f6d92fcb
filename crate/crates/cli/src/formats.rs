//! Text formats for hex images, kernels, and resampled square images.
//!
//! All floating-point values are written with 17 significant digits
//! (`{:.16e}`), which round-trips every finite f64 bit-faithfully. The hexcsv
//! header carries the column parity convention so a reader built around the
//! mirrored convention fails loudly instead of silently transposing geometry.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use hexgrid_core::{GridSpec, HexKernel, HexTensor, SquareTensor};

use crate::error::CliError;

pub const PARITY_TOKEN: &str = "odd-low";

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str, what: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Data(format!("bad number {s:?} in {what}")))
}

fn parse_usize(s: &str, what: &str) -> Result<usize, CliError> {
    s.parse::<usize>()
        .map_err(|_| CliError::Data(format!("bad count {s:?} in {what}")))
}

/// Pulls `key=value` out of a header token list.
fn header_field<'a>(tokens: &[&'a str], key: &str) -> Result<&'a str, CliError> {
    tokens
        .iter()
        .find_map(|t| t.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| CliError::Data(format!("header is missing {key}=")))
}

fn parse_values_line(line: &str, cols: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = line.split(',').collect();
    if parts.len() != cols {
        return Err(CliError::Data(format!(
            "{what}: expected {cols} values per line, got {}",
            parts.len()
        )));
    }
    parts.iter().map(|p| parse_f64(p, what)).collect()
}

fn join_values(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",")
}

/// Serializes a single image (batch must be 1) to the hexcsv text format.
pub fn write_hexcsv(x: &HexTensor) -> Result<String, CliError> {
    if x.batch() != 1 {
        return Err(CliError::Data(format!(
            "hexcsv holds a single image; got batch {}",
            x.batch()
        )));
    }
    let mut out = String::new();
    out.push_str(&format!(
        "hexcsv v1 rows={} cols={} channels={} parity={PARITY_TOKEN}\n",
        x.rows(),
        x.cols(),
        x.channels()
    ));
    for k in 0..x.channels() {
        out.push_str(&format!("#channel {k}\n"));
        for row in x.plane(0, k).chunks(x.cols()) {
            out.push_str(&join_values(row));
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn read_hexcsv(text: &str) -> Result<HexTensor, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Data("empty hexcsv file".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() < 2 || tokens[0] != "hexcsv" || tokens[1] != "v1" {
        return Err(CliError::Data(format!("not a hexcsv v1 header: {header:?}")));
    }
    let rows = parse_usize(header_field(&tokens, "rows")?, "hexcsv header")?;
    let cols = parse_usize(header_field(&tokens, "cols")?, "hexcsv header")?;
    let channels = parse_usize(header_field(&tokens, "channels")?, "hexcsv header")?;
    let parity = header_field(&tokens, "parity")?;
    if parity != PARITY_TOKEN {
        return Err(CliError::Data(format!(
            "parity token {parity:?} does not match this library's convention {PARITY_TOKEN:?}"
        )));
    }

    let grid = GridSpec::new(rows, cols)?;
    let mut values = Vec::with_capacity(channels * rows * cols);
    for k in 0..channels {
        let marker = lines
            .next()
            .ok_or_else(|| CliError::Data(format!("missing '#channel {k}' marker")))?;
        if marker.trim() != format!("#channel {k}") {
            return Err(CliError::Data(format!(
                "expected '#channel {k}', found {marker:?}"
            )));
        }
        for r in 0..rows {
            let line = lines.next().ok_or_else(|| {
                CliError::Data(format!("channel {k}: missing row {r} of {rows}"))
            })?;
            values.extend(parse_values_line(line, cols, "hexcsv body")?);
        }
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(CliError::Data("trailing content after last channel".into()));
    }
    Ok(HexTensor::from_values(1, channels, grid, values)?)
}

/// Serializes a kernel: one line per (out, in) channel pair, weights in
/// canonical layout order, then an optional `bias=` line.
pub fn write_kernel(k: &HexKernel) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "hexkernel v1 size={} in={} out={}\n",
        k.size(),
        k.in_channels(),
        k.out_channels()
    ));
    for oc in 0..k.out_channels() {
        for ic in 0..k.in_channels() {
            out.push_str(&join_values(k.weights_for(oc, ic)));
            out.push('\n');
        }
    }
    // Compare bit patterns so a negative zero still gets a bias line.
    if k.bias().iter().any(|&b| b.to_bits() != 0) {
        out.push_str("bias=");
        out.push_str(&join_values(k.bias()));
        out.push('\n');
    }
    out
}

pub fn read_kernel(text: &str) -> Result<HexKernel, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Data("empty kernel file".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() < 2 || tokens[0] != "hexkernel" || tokens[1] != "v1" {
        return Err(CliError::Data(format!(
            "not a hexkernel v1 header: {header:?}"
        )));
    }
    let size = parse_usize(header_field(&tokens, "size")?, "kernel header")? as u32;
    let ci = parse_usize(header_field(&tokens, "in")?, "kernel header")?;
    let co = parse_usize(header_field(&tokens, "out")?, "kernel header")?;

    let per_pair = hexgrid_core::KernelLayout::new(size).element_count();
    let mut weights = Vec::with_capacity(co * ci * per_pair);
    for oc in 0..co {
        for ic in 0..ci {
            let line = lines.next().ok_or_else(|| {
                CliError::Data(format!("missing weight line for out {oc}, in {ic}"))
            })?;
            weights.extend(parse_values_line(line, per_pair, "kernel weights")?);
        }
    }
    let mut bias = None;
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some(rest) = line.strip_prefix("bias=") else {
            return Err(CliError::Data(format!("unexpected line {line:?}")));
        };
        if bias.is_some() {
            return Err(CliError::Data("duplicate bias line".into()));
        }
        bias = Some(parse_values_line(rest, co, "kernel bias")?);
    }
    Ok(HexKernel::new(size, co, ci, weights, bias)?)
}

/// Serializes a single resampled image (batch must be 1) as a plain
/// rectangular CSV with the same block structure as hexcsv.
pub fn write_squarecsv(x: &SquareTensor) -> Result<String, CliError> {
    if x.batch() != 1 {
        return Err(CliError::Data(format!(
            "squarecsv holds a single image; got batch {}",
            x.batch()
        )));
    }
    let mut out = String::new();
    out.push_str(&format!(
        "squarecsv v1 rows={} cols={} channels={}\n",
        x.rows(),
        x.cols(),
        x.channels()
    ));
    for k in 0..x.channels() {
        out.push_str(&format!("#channel {k}\n"));
        for row in x.plane(0, k).chunks(x.cols()) {
            out.push_str(&join_values(row));
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn read_squarecsv(text: &str) -> Result<SquareTensor, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Data("empty squarecsv file".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() < 2 || tokens[0] != "squarecsv" || tokens[1] != "v1" {
        return Err(CliError::Data(format!(
            "not a squarecsv v1 header: {header:?}"
        )));
    }
    let rows = parse_usize(header_field(&tokens, "rows")?, "squarecsv header")?;
    let cols = parse_usize(header_field(&tokens, "cols")?, "squarecsv header")?;
    let channels = parse_usize(header_field(&tokens, "channels")?, "squarecsv header")?;
    let mut values = Vec::with_capacity(channels * rows * cols);
    for k in 0..channels {
        let marker = lines
            .next()
            .ok_or_else(|| CliError::Data(format!("missing '#channel {k}' marker")))?;
        if marker.trim() != format!("#channel {k}") {
            return Err(CliError::Data(format!(
                "expected '#channel {k}', found {marker:?}"
            )));
        }
        for r in 0..rows {
            let line = lines.next().ok_or_else(|| {
                CliError::Data(format!("channel {k}: missing row {r} of {rows}"))
            })?;
            values.extend(parse_values_line(line, cols, "squarecsv body")?);
        }
    }
    Ok(SquareTensor::from_values(1, channels, rows, cols, values)?)
}

/// Writes via a temp file in the destination directory and renames into
/// place, so readers never observe a half-written file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .map_err(|e| CliError::Data(format!("cannot persist {}: {}", path.display(), e.error)))?;
    Ok(())
}
