//! Run configuration in a flat "[section]" / "key = value" text format.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::extension::DEFAULT_FD_STEP;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SphereModeSetting {
    Series,
    Oracle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub band_limit: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Data preset (mass, extend) or metric preset (small-sphere).
    pub preset: String,
    pub params: BTreeMap<String, f64>,
    pub flux_radii: Vec<f64>,
    pub fd_step: f64,
    pub epsilon_threshold: f64,
    /// Deviation sizes of the extension residual sweep.
    pub epsilons: Vec<f64>,
    pub radii: Vec<f64>,
    pub sphere_mode: SphereModeSetting,
    pub seed: u64,
    pub out: String,
}

pub const DEFAULT_BAND_LIMIT: usize = 32;
/// Data deviations above this are refused by the extension builder.
pub const DEFAULT_EPSILON_THRESHOLD: f64 = 1.0;

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            band_limit: DEFAULT_BAND_LIMIT,
            n_theta: DEFAULT_BAND_LIMIT + 1,
            n_phi: 2 * DEFAULT_BAND_LIMIT + 1,
            preset: "round".into(),
            params: BTreeMap::new(),
            flux_radii: vec![3.0, 10.0, 40.0],
            fd_step: DEFAULT_FD_STEP,
            epsilon_threshold: DEFAULT_EPSILON_THRESHOLD,
            epsilons: vec![1e-1, 1e-2, 1e-3],
            radii: vec![0.2, 0.1, 0.05],
            sphere_mode: SphereModeSetting::Oracle,
            seed: 1,
            out: "out".into(),
        }
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn parse_num<T: std::str::FromStr>(v: &str, line: usize, key: &str) -> Result<T> {
    v.parse().or_else(|_| parse_err(line, format!("invalid value '{v}' for '{key}'")))
}

pub fn parse_list(v: &str) -> std::result::Result<Vec<f64>, String> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("invalid number '{s}'")))
        .collect()
}

impl RunConfig {
    /// Config for band limit L with the default grid sizes.
    pub fn with_band_limit(mut self, l: usize) -> Self {
        self.band_limit = l;
        self.n_theta = l + 1;
        self.n_phi = 2 * l + 1;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Input(msg));
        if self.band_limit < 4 {
            return bad(format!("band_limit must be at least 4, got {}", self.band_limit));
        }
        if self.n_theta < self.band_limit + 1 || self.n_phi < 2 * self.band_limit + 1 {
            return bad(format!(
                "grid {}x{} too small for band limit {}",
                self.n_theta, self.n_phi, self.band_limit
            ));
        }
        if self.flux_radii.iter().any(|r| !(*r >= 1.0 && r.is_finite())) {
            return bad("flux radii must be finite and at least 1".into());
        }
        if !(self.fd_step > 0.0 && self.fd_step < 0.1) {
            return bad(format!("fd_step must lie in (0, 0.1), got {}", self.fd_step));
        }
        if !(self.epsilon_threshold > 0.0) {
            return bad("epsilon_threshold must be positive".into());
        }
        if self.epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return bad("sweep epsilons must be positive".into());
        }
        if self.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return bad("radii must be positive".into());
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[grid]");
        let _ = writeln!(s, "band_limit = {}", self.band_limit);
        let _ = writeln!(s, "n_theta = {}", self.n_theta);
        let _ = writeln!(s, "n_phi = {}", self.n_phi);
        let _ = writeln!(s, "\n[preset]");
        let _ = writeln!(s, "name = {}", self.preset);
        for (k, v) in &self.params {
            let _ = writeln!(s, "param.{k} = {v}");
        }
        let _ = writeln!(s, "\n[mass]");
        let _ = writeln!(s, "flux_radii = {}", join(&self.flux_radii));
        let _ = writeln!(s, "epsilon_threshold = {}", self.epsilon_threshold);
        let _ = writeln!(s, "\n[extend]");
        let _ = writeln!(s, "fd_step = {}", self.fd_step);
        let _ = writeln!(s, "epsilons = {}", join(&self.epsilons));
        let _ = writeln!(s, "\n[small_sphere]");
        let _ = writeln!(s, "radii = {}", join(&self.radii));
        let mode = match self.sphere_mode {
            SphereModeSetting::Series => "series",
            SphereModeSetting::Oracle => "oracle",
        };
        let _ = writeln!(s, "mode = {mode}");
        let _ = writeln!(s, "\n[run]");
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "out = {}", self.out);
        s
    }

    /// Parses a config; missing keys keep their defaults. Grid sizes
    /// default to the band limit's when only `band_limit` is given.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        let mut section = String::new();
        let mut grid_sizes = (None, None);
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                if !["grid", "preset", "mass", "extend", "small_sphere", "run"].contains(&name) {
                    return parse_err(line_no, format!("unknown section [{name}]"));
                }
                section = name.to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return parse_err(line_no, "expected 'key = value'");
            };
            let (key, value) = (key.trim(), value.trim());
            let list = |v: &str| parse_list(v).or_else(|e| parse_err(line_no, e));
            match (section.as_str(), key) {
                ("grid", "band_limit") => c.band_limit = parse_num(value, line_no, key)?,
                ("grid", "n_theta") => grid_sizes.0 = Some(parse_num(value, line_no, key)?),
                ("grid", "n_phi") => grid_sizes.1 = Some(parse_num(value, line_no, key)?),
                ("preset", "name") => c.preset = value.to_string(),
                ("preset", k) if k.starts_with("param.") => {
                    c.params.insert(k["param.".len()..].to_string(), parse_num(value, line_no, key)?);
                }
                ("mass", "flux_radii") => c.flux_radii = list(value)?,
                ("mass", "epsilon_threshold") => c.epsilon_threshold = parse_num(value, line_no, key)?,
                ("extend", "fd_step") => c.fd_step = parse_num(value, line_no, key)?,
                ("extend", "epsilons") => c.epsilons = list(value)?,
                ("small_sphere", "radii") => c.radii = list(value)?,
                ("small_sphere", "mode") => {
                    c.sphere_mode = match value {
                        "series" => SphereModeSetting::Series,
                        "oracle" => SphereModeSetting::Oracle,
                        _ => return parse_err(line_no, format!("mode must be 'series' or 'oracle', got '{value}'")),
                    }
                }
                ("run", "seed") => c.seed = parse_num(value, line_no, key)?,
                ("run", "out") => c.out = value.to_string(),
                _ => return parse_err(line_no, format!("unknown key '{key}' in section [{section}]")),
            }
        }
        c.n_theta = grid_sizes.0.unwrap_or(c.band_limit + 1);
        c.n_phi = grid_sizes.1.unwrap_or(2 * c.band_limit + 1);
        c.validate()?;
        Ok(c)
    }

    pub fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_byte_exactly() {
        let mut c = RunConfig::default();
        c.params.insert("m".into(), 0.01);
        c.radii = vec![0.3, 0.15, 1.0 / 3.0];
        let text = c.to_text();
        let back = RunConfig::from_text(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn partial_files_use_defaults() {
        let c = RunConfig::from_text("[grid]\nband_limit = 8\n# comment\n[run]\nseed = 7\n").unwrap();
        assert_eq!((c.band_limit, c.n_theta, c.n_phi, c.seed), (8, 9, 17, 7));
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [
            ("[grid]\nband_limit = x\n", 2),
            ("[run]\n\nbogus = 1\n", 3),
            ("[nope]\n", 1),
            ("[mass]\nflux_radii = 3,,4\n", 2),
        ] {
            match RunConfig::from_text(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(RunConfig::from_text("[grid]\nband_limit = 2\n"), Err(Error::Input(_))));
    }
}
