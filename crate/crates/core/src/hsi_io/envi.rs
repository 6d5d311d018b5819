//! Strict ENVI subset: band-sequential float32 little-endian.
//!
//! The header is a text file of `key = value` lines; the samples live in a
//! sibling file with the same stem and a `.raw` extension.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use super::SpectralCube;
use crate::error::{Error, Result};

/// Raw data path paired with a header path.
pub fn raw_path_for(header: &Path) -> PathBuf {
    header.with_extension("raw")
}

fn parse_header(path: &Path, text: &str) -> Result<HashMap<String, String>> {
    let mut fields = HashMap::new();
    let mut lines = text.lines();
    while let Some(line) = lines.next() {
        let line = line.trim();
        if line.is_empty() || line.eq_ignore_ascii_case("envi") || line.starts_with(';') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::format(path, format!("malformed header line `{line}`")));
        };
        let mut value = value.trim().to_string();
        // brace-delimited values may span several lines
        if value.starts_with('{') {
            while !value.contains('}') {
                match lines.next() {
                    Some(more) => {
                        value.push(' ');
                        value.push_str(more.trim());
                    }
                    None => return Err(Error::format(path, format!("unterminated `{{` in `{}`", key.trim()))),
                }
            }
        }
        let key = key.split_whitespace().collect::<Vec<_>>().join(" ").to_ascii_lowercase();
        fields.insert(key, value);
    }
    Ok(fields)
}

fn required<'a>(path: &Path, fields: &'a HashMap<String, String>, key: &str) -> Result<&'a str> {
    fields
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::format(path, format!("missing header field `{key}`")))
}

fn required_count(path: &Path, fields: &HashMap<String, String>, key: &str) -> Result<usize> {
    let raw = required(path, fields, key)?;
    match raw.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::format(path, format!("header field `{key}` must be a positive integer, got `{raw}`"))),
    }
}

fn parse_wavelengths(path: &Path, raw: &str) -> Result<Vec<f64>> {
    raw.trim_matches(|c| c == '{' || c == '}')
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Error::format(path, format!("bad wavelength `{s}`"))))
        .collect()
}

pub fn read_cube(path: impl AsRef<Path>) -> Result<SpectralCube> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let fields = parse_header(path, &text)?;

    let width = required_count(path, &fields, "samples")?;
    let height = required_count(path, &fields, "lines")?;
    let bands = required_count(path, &fields, "bands")?;
    let data_type = required(path, &fields, "data type")?;
    if data_type != "4" {
        return Err(Error::format(path, format!("unsupported data type {data_type} (only 4 = float32)")));
    }
    let interleave = required(path, &fields, "interleave")?;
    if !interleave.eq_ignore_ascii_case("bsq") {
        return Err(Error::UnsupportedInterleave(interleave.to_string()));
    }
    let byte_order = required(path, &fields, "byte order")?;
    if byte_order != "0" {
        return Err(Error::format(path, format!("unsupported byte order {byte_order} (only 0 = little-endian)")));
    }

    let raw_path = raw_path_for(path);
    let bytes = fs::read(&raw_path).map_err(|e| Error::io(&raw_path, e))?;
    let n = width * height;
    let expected = 4 * bands * n;
    if bytes.len() != expected {
        return Err(Error::format(
            &raw_path,
            format!("raw file holds {} bytes, header implies {expected}", bytes.len()),
        ));
    }

    let mut data = DMatrix::<f64>::zeros(bands, n);
    for (k, chunk) in bytes.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
        let (band, pixel) = (k / n, k % n);
        if !v.is_finite() {
            return Err(Error::format(&raw_path, format!("non-finite value at band {band}, pixel {pixel}")));
        }
        data[(band, pixel)] = f64::from(v);
    }

    let cube = SpectralCube::new(height, width, data)?;
    match fields.get("wavelength") {
        Some(raw) => {
            let wl = parse_wavelengths(path, raw)?;
            if wl.len() != bands {
                return Err(Error::format(path, format!("{} wavelengths for {bands} bands", wl.len())));
            }
            cube.with_wavelengths(wl)
        }
        None => Ok(cube),
    }
}

/// Writes the header at `path` and the samples next to it. Values are stored as
/// float32, so a cube holding values not representable in f32 is rounded.
pub fn write_cube(cube: &SpectralCube, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut header = format!(
        "ENVI\nsamples = {}\nlines = {}\nbands = {}\nheader offset = 0\ndata type = 4\ninterleave = bsq\nbyte order = 0\n",
        cube.width(),
        cube.height(),
        cube.bands()
    );
    if let Some(wl) = cube.band_wavelengths() {
        let list = wl.iter().map(|w| format!("{w}")).collect::<Vec<_>>().join(", ");
        header.push_str(&format!("wavelength = {{{list}}}\n"));
    }
    fs::write(path, header).map_err(|e| Error::io(path, e))?;

    let n = cube.pixels();
    let mut bytes = Vec::with_capacity(4 * cube.bands() * n);
    for band in 0..cube.bands() {
        for pixel in 0..n {
            bytes.extend_from_slice(&(cube.data()[(band, pixel)] as f32).to_le_bytes());
        }
    }
    let raw_path = raw_path_for(path);
    fs::write(&raw_path, bytes).map_err(|e| Error::io(&raw_path, e))
}
