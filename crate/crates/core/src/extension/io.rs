use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::Result;
use crate::sphere::io::{header_value, parse_err, parse_header, read_sh_records, write_sh_records};
use crate::sphere::{GridSpec, ShCoeffs, TangentField};

use super::field::LinearizedExtension;
use super::modes::ModeSolution;

/// "LINEXT L=<L>", records "ℓ m v_re v_im xi_re xi_im", then the α and β
/// potentials of W as two "SH L=<L>" blocks.
pub fn extension_to_string(ext: &LinearizedExtension) -> String {
    let m = ext.modes();
    let mut out = format!("LINEXT L={}\n", m.v.band_limit());
    for (l, mm, v) in m.v.iter() {
        let xi = m.xi.get(l, mm);
        let _ = writeln!(out, "{l} {mm} {} {} {} {}", v.re, v.im, xi.re, xi.im);
    }
    for c in [&ext.tangent().alpha, &ext.tangent().beta] {
        let _ = writeln!(out, "SH L={}", c.band_limit());
        write_sh_records(&mut out, c);
    }
    out
}

pub fn extension_from_str(text: &str, grid: &GridSpec) -> Result<LinearizedExtension> {
    let lines: Vec<&str> = text.lines().collect();
    let Some(first) = lines.first() else {
        return parse_err(1, "empty extension file");
    };
    let h = parse_header(first, 1, "LINEXT")?;
    let l: usize = header_value(&h, "L", 1)?;
    let n = (l + 1) * (l + 1);
    let mut v = Vec::with_capacity(n);
    let mut xi = Vec::with_capacity(n);
    for k in 0..n {
        let line_no = k + 2;
        let Some(line) = lines.get(k + 1) else {
            return parse_err(line_no, "unexpected end of mode block");
        };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 {
            return parse_err(line_no, format!("expected 6 fields, found {}", f.len()));
        }
        let nums: Vec<f64> = f[2..]
            .iter()
            .map(|s| s.parse::<f64>().or_else(|_| parse_err(line_no, format!("cannot parse '{s}'"))))
            .collect::<Result<_>>()?;
        v.push(Complex64::new(nums[0], nums[1]));
        xi.push(Complex64::new(nums[2], nums[3]));
    }
    let mut pos = n + 1;
    let mut pots = Vec::new();
    for _ in 0..2 {
        let Some(line) = lines.get(pos) else {
            return parse_err(pos + 1, "missing SH block");
        };
        let hh = parse_header(line, pos + 1, "SH")?;
        let lb: usize = header_value(&hh, "L", pos + 1)?;
        pots.push(read_sh_records(&lines, pos + 1, lb)?);
        pos += 1 + (lb + 1) * (lb + 1);
    }
    if pos < lines.len() {
        return parse_err(pos + 1, "trailing content after extension");
    }
    let beta = pots.pop().unwrap();
    let alpha = pots.pop().unwrap();
    let modes = ModeSolution {
        v: ShCoeffs::from_modes(l, v),
        xi: ShCoeffs::from_modes(l, xi),
    };
    LinearizedExtension::from_parts(grid, modes, TangentField { alpha, beta }).or_else(|e| parse_err(1, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bartnik::random_data;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_byte_exact() {
        let g = GridSpec::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = random_data(&g, 0.01, 3, &mut rng).unwrap();
        let ext = LinearizedExtension::build(&d, 1.0).unwrap();
        let text = extension_to_string(&ext);
        let back = extension_from_str(&text, &g).unwrap();
        assert_eq!(back.modes(), ext.modes());
        assert_eq!(extension_to_string(&back), text);
        assert!(extension_from_str("LINEXT L=1\n0 0 1 0 0\n", &g).is_err());
    }
}
