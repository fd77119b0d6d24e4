//! File formats: BSNF1 coefficient snapshots, norm-series CSV, JSON helpers.
//!
//! BSNF1 layout, little-endian: magic `BSNF`, version byte `1`, `u32` dimension,
//! `u32` grid size, `u32` component count, `u8` homogeneous flag, then
//! `(re, im)` `f64` pairs in component-major, row-major frequency order.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::{NormRow, SolutionRecord};
use crate::spectral::{Grid, SpectralField};

const MAGIC: &[u8; 4] = b"BSNF";
const VERSION: u8 = b'1';
const HEADER_LEN: usize = 4 + 1 + 4 * 3 + 1;

/// Column names of the norm-series CSV, in order.
pub const CSV_HEADER: &str = "t,besov_minus1_eps,linf,z_norm,rho,guaranteed_T";

pub fn encode_snapshot(u: &SpectralField) -> Vec<u8> {
    let grid = u.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * u.coeffs().len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    for v in [grid.dim(), grid.size(), u.components()] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    out.push(u8::from(u.homogeneous()));
    for z in u.coeffs() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<SpectralField> {
    if bytes.len() < 5 || &bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes[4] != VERSION {
        return Err(Error::UnknownVersion(bytes[4] as char));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Corrupt(format!("header truncated at {} bytes", bytes.len())));
    }
    let word = |k: usize| u32::from_le_bytes(bytes[5 + 4 * k..9 + 4 * k].try_into().unwrap()) as usize;
    let (dim, size, components) = (word(0), word(1), word(2));
    let flag = bytes[17];
    if flag > 1 {
        return Err(Error::Corrupt(format!("homogeneous flag {flag}")));
    }
    let grid = Grid::new(dim, size).map_err(|e| Error::Corrupt(e.to_string()))?;
    if components == 0 {
        return Err(Error::Corrupt("zero components".into()));
    }
    let expected = HEADER_LEN + 16 * components * grid.len();
    if bytes.len() != expected {
        return Err(Error::Corrupt(format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let coeffs = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(f64::from_le_bytes(c[..8].try_into().unwrap()), f64::from_le_bytes(c[8..].try_into().unwrap()))
        })
        .collect();
    SpectralField::new(grid, components, coeffs, flag == 1).map_err(|e| Error::Corrupt(e.to_string()))
}

pub fn write_snapshot(path: &Path, u: &SpectralField) -> Result<()> {
    fs::write(path, encode_snapshot(u))?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<SpectralField> {
    decode_snapshot(&fs::read(path)?)
}

/// Writes `snapshot_<m>.bsnf` for every `stride`-th node and the last node.
pub fn write_snapshots(dir: &Path, record: &SolutionRecord, stride: usize) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let steps = record.u.time().steps();
    let stride = stride.max(1);
    let mut written = Vec::new();
    for m in (0..=steps).filter(|m| m % stride == 0 || *m == steps) {
        let path = dir.join(format!("snapshot_{m:05}.bsnf"));
        write_snapshot(&path, record.u.at(m))?;
        written.push(path);
    }
    Ok(written)
}

fn csv_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn norm_series_csv(rows: &[NormRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let cells = [r.t, r.besov_minus1_eps, r.linf, r.z_norm, r.rho, r.guaranteed_t].map(csv_number);
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_norm_series(path: &Path, rows: &[NormRow]) -> Result<()> {
    fs::write(path, norm_series_csv(rows))?;
    Ok(())
}

/// Pretty JSON with a trailing newline; key order follows field declaration order.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(to_json(value)?.as_bytes())?;
    Ok(())
}

/// Serde adapter writing non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod json_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&super::csv_number(*v))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SpectralField {
        let g = Grid::new(2, 8).unwrap();
        SpectralField::from_modes(g, 2, true, |c, k| {
            if k == [0, 0, 0] {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(c as f64 + 0.1 * k[0] as f64, -0.3 * k[1] as f64)
            }
        })
        .unwrap()
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let u = sample();
        let back = decode_snapshot(&encode_snapshot(&u)).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn corruption_is_reported() {
        let bytes = encode_snapshot(&sample());
        assert!(matches!(decode_snapshot(&bytes[..bytes.len() - 3]), Err(Error::Corrupt(_))));
        assert!(matches!(decode_snapshot(&bytes[..10]), Err(Error::Corrupt(_))));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_snapshot(&bad), Err(Error::BadMagic)));
        let mut bad = bytes;
        bad[4] = b'2';
        assert!(matches!(decode_snapshot(&bad), Err(Error::UnknownVersion('2'))));
    }

    #[test]
    fn csv_header_matches_schema() {
        let csv = norm_series_csv(&[]);
        assert_eq!(csv.lines().next().unwrap(), "t,besov_minus1_eps,linf,z_norm,rho,guaranteed_T");
    }
}
