//! Field and profile files.
//!
//! Field layout: the 8-byte magic `PWFIELD1`, a little-endian `u32` header
//! length, a JSON header, then `N^d` complex samples as pairs of
//! little-endian `f64` (real, imaginary) in row-major order.
//! Profiles are two-column CSV (`r,value`) preceded by a `# config_hash=` line.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::field::Field;
use super::grid::Grid;
use super::radial::RadialProfile;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAGIC: &[u8; 8] = b"PWFIELD1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub d: u32,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub band_limit: Option<f64>,
    pub config_hash: String,
}

pub fn encode_field<T: Real>(f: &Field<T>, config_hash: &str) -> Result<Vec<u8>> {
    let header = FieldHeader {
        d: f.grid().d(),
        l: f.grid().l().as_f64(),
        n: f.grid().n(),
        band_limit: f.band_limit().map(|b| b.as_f64()),
        config_hash: config_hash.to_string(),
    };
    let json = serde_json::to_vec(&header)?;
    let mut out = Vec::with_capacity(12 + json.len() + 16 * f.values().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for v in f.values() {
        out.extend_from_slice(&v.re.as_f64().to_le_bytes());
        out.extend_from_slice(&v.im.as_f64().to_le_bytes());
    }
    Ok(out)
}

pub fn decode_field<T: Real>(bytes: &[u8]) -> Result<(Field<T>, FieldHeader)> {
    let bad = |m: &str| Error::Parse(format!("field file: {m}"));
    if bytes.len() < 12 || &bytes[..8] != MAGIC {
        return Err(bad("missing magic"));
    }
    let hlen = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let body = bytes.get(12 + hlen..).ok_or_else(|| bad("truncated header"))?;
    let header: FieldHeader = serde_json::from_slice(&bytes[12..12 + hlen])?;
    let grid = Grid::new(header.d, T::lit(header.l), header.n)?;
    if body.len() != 16 * grid.len() {
        return Err(bad("sample count does not match header"));
    }
    let values = body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect();
    let mut field = Field::from_values(&grid, values)?;
    field.set_band_limit(header.band_limit.map(T::lit));
    Ok((field, header))
}

pub fn write_field<T: Real>(path: &Path, f: &Field<T>, config_hash: &str) -> Result<()> {
    fs::write(path, encode_field(f, config_hash)?)?;
    Ok(())
}

pub fn read_field<T: Real>(path: &Path) -> Result<(Field<T>, FieldHeader)> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_field(&bytes)
}

/// Log-spaced radii on `[lo, hi]`.
pub fn log_mesh(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

pub fn write_profile_csv(
    out: &mut impl Write,
    prof: &RadialProfile,
    radii: &[f64],
    config_hash: &str,
) -> Result<()> {
    writeln!(out, "# config_hash={config_hash}")?;
    writeln!(out, "r,value")?;
    for &r in radii {
        writeln!(out, "{r:e},{:e}", prof.eval(r))?;
    }
    Ok(())
}

/// Read a two-column CSV into a tabulated profile in dimension `d`.
pub fn read_profile_csv(input: impl Read, d: u32) -> Result<RadialProfile> {
    let mut r = Vec::new();
    let mut v = Vec::new();
    for line in BufReader::new(input).lines() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with("r,") {
            continue;
        }
        let (a, b) = t.split_once(',').ok_or_else(|| Error::Parse(format!("bad CSV row: {t}")))?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s}: {e}")));
        r.push(parse(a)?);
        v.push(parse(b)?);
    }
    RadialProfile::tabulated(d, r, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip() {
        let grid = Grid::<f64>::new(1, 4.0, 16).unwrap();
        let f = Field::from_real_fn(&grid, |x| (-x[0] * x[0]).exp());
        let bytes = encode_field(&f, "abc").unwrap();
        let (g, h) = decode_field::<f64>(&bytes).unwrap();
        assert_eq!(h.config_hash, "abc");
        assert_eq!(g.values(), f.values());
    }

    #[test]
    fn profile_round_trip() {
        let prof = RadialProfile::power_log(2, 0.5, 0.0, 0.5, 0.0).unwrap();
        let radii = log_mesh(1e-3, 0.5, 9);
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &prof, &radii, "h").unwrap();
        let back = read_profile_csv(&buf[..], 2).unwrap();
        assert!((back.eval(radii[4]) - prof.eval(radii[4])).abs() < 1e-12 * prof.eval(radii[4]));
    }
}
