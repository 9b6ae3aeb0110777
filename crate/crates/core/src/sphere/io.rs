//! Text formats for coefficient sets and grid samples.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::coeffs::ShCoeffs;
use crate::error::{Error, Result};

pub(crate) fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        msg: msg.into(),
    })
}

/// Parses `TAG key=value ...`, returning the key/value pairs.
pub(crate) fn parse_header(line: &str, line_no: usize, tag: &str) -> Result<HashMap<String, String>> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(tag) {
        return parse_err(line_no, format!("expected header starting with '{tag}'"));
    }
    let mut out = HashMap::new();
    for p in parts {
        let Some((k, v)) = p.split_once('=') else {
            return parse_err(line_no, format!("malformed header field '{p}'"));
        };
        out.insert(k.to_string(), v.to_string());
    }
    Ok(out)
}

pub(crate) fn header_value<T: std::str::FromStr>(
    h: &HashMap<String, String>,
    key: &str,
    line_no: usize,
) -> Result<T> {
    match h.get(key).map(|v| v.parse::<T>()) {
        Some(Ok(v)) => Ok(v),
        Some(Err(_)) => parse_err(line_no, format!("invalid value for '{key}'")),
        None => parse_err(line_no, format!("missing header field '{key}'")),
    }
}

pub(crate) fn parse_fields<T: std::str::FromStr>(line: &str, line_no: usize, n: usize) -> Result<Vec<T>> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != n {
        return parse_err(line_no, format!("expected {n} fields, found {}", fields.len()));
    }
    fields
        .iter()
        .map(|f| f.parse::<T>().or_else(|_| parse_err(line_no, format!("cannot parse '{f}'"))))
        .collect()
}

/// Writes the "ℓ m re im" record block (without header).
pub(crate) fn write_sh_records(out: &mut String, c: &ShCoeffs) {
    for (l, m, z) in c.iter() {
        let _ = writeln!(out, "{l} {m} {} {}", z.re, z.im);
    }
}

/// Reads `(L+1)²` records "ℓ m re im" starting at `lines[start]`.
pub(crate) fn read_sh_records(lines: &[&str], start: usize, l_max: usize) -> Result<ShCoeffs> {
    let n = (l_max + 1) * (l_max + 1);
    let mut data = Vec::with_capacity(n);
    let mut expect = (0usize, 0i64);
    for k in 0..n {
        let line_no = start + k + 1;
        let Some(line) = lines.get(start + k) else {
            return parse_err(line_no, "unexpected end of coefficient block");
        };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return parse_err(line_no, format!("expected 4 fields, found {}", f.len()));
        }
        let l: usize = f[0].parse().or_else(|_| parse_err(line_no, "bad degree"))?;
        let m: i64 = f[1].parse().or_else(|_| parse_err(line_no, "bad order"))?;
        if k == 0 {
            expect = (0, 0);
        }
        if (l, m) != expect {
            return parse_err(line_no, format!("expected mode ({}, {}), found ({l}, {m})", expect.0, expect.1));
        }
        let re: f64 = f[2].parse().or_else(|_| parse_err(line_no, "bad real part"))?;
        let im: f64 = f[3].parse().or_else(|_| parse_err(line_no, "bad imaginary part"))?;
        data.push(Complex64::new(re, im));
        expect = if m == l as i64 { (l + 1, -(l as i64) - 1) } else { (l, m + 1) };
    }
    Ok(ShCoeffs::from_modes(l_max, data))
}

/// "SH L=<L>" followed by one "ℓ m re im" record per mode.
pub fn sh_to_string(c: &ShCoeffs) -> String {
    let mut out = format!("SH L={}\n", c.band_limit());
    write_sh_records(&mut out, c);
    out
}

pub fn sh_from_str(text: &str) -> Result<ShCoeffs> {
    let lines: Vec<&str> = text.lines().collect();
    let Some(first) = lines.first() else {
        return parse_err(1, "empty coefficient file");
    };
    let h = parse_header(first, 1, "SH")?;
    let l: usize = header_value(&h, "L", 1)?;
    let c = read_sh_records(&lines, 1, l)?;
    if lines.len() > 1 + (l + 1) * (l + 1) {
        return parse_err(2 + (l + 1) * (l + 1), "trailing content after coefficient block");
    }
    Ok(c)
}

/// Grid samples in "i j value" rows, without header.
pub(crate) fn write_grid_records(out: &mut String, n_phi: usize, values: &[f64]) {
    for (k, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{} {} {v}", k / n_phi, k % n_phi);
    }
}

pub(crate) fn read_grid_records(lines: &[&str], start: usize, n_theta: usize, n_phi: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for k in 0..n_theta * n_phi {
        let line_no = start + k + 1;
        let Some(line) = lines.get(start + k) else {
            return parse_err(line_no, "unexpected end of grid block");
        };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return parse_err(line_no, format!("expected 3 fields, found {}", f.len()));
        }
        let i: usize = f[0].parse().or_else(|_| parse_err(line_no, "bad ring index"))?;
        let j: usize = f[1].parse().or_else(|_| parse_err(line_no, "bad column index"))?;
        if (i, j) != (k / n_phi, k % n_phi) {
            return parse_err(line_no, format!("expected node ({}, {})", k / n_phi, k % n_phi));
        }
        let v: f64 = f[2].parse().or_else(|_| parse_err(line_no, "bad value"))?;
        out.push(v);
    }
    Ok(out)
}

/// "GRID n_theta=<..> n_phi=<..>" followed by "i j value" rows.
pub fn grid_to_string(n_theta: usize, n_phi: usize, values: &[f64]) -> String {
    let mut out = format!("GRID n_theta={n_theta} n_phi={n_phi}\n");
    write_grid_records(&mut out, n_phi, values);
    out
}

/// Returns (n_theta, n_phi, values).
pub fn grid_from_str(text: &str) -> Result<(usize, usize, Vec<f64>)> {
    let lines: Vec<&str> = text.lines().collect();
    let Some(first) = lines.first() else {
        return parse_err(1, "empty grid file");
    };
    let h = parse_header(first, 1, "GRID")?;
    let nt: usize = header_value(&h, "n_theta", 1)?;
    let np: usize = header_value(&h, "n_phi", 1)?;
    let v = read_grid_records(&lines, 1, nt, np)?;
    Ok((nt, np, v))
}
