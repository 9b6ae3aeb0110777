//! Decaying solutions of the flat Poisson equation Δu = f on {|x| ≥ 1},
//! one spherical-harmonic mode at a time.
//!
//! For a mode f_ℓm(r)Y_ℓm the radial equation u'' + 2u'/r − ℓ(ℓ+1)u/r² = f
//! is solved by variation of parameters,
//!
//!   u = −(2ℓ+1)⁻¹ [ r^ℓ ∫_r^∞ s^{1−ℓ} f ds + r^{−ℓ−1} ∫_a^r s^{ℓ+2} f ds ],
//!
//! with a = 1 when ℓ+1 ≥ q+β and a = ∞ otherwise, so that u decays like
//! r^{−q−β}. Fields are Re Σ f_ℓm(r) Y_ℓm(x/|x|).

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{input, Error, Result};
use crate::jet::Jet;
use crate::quadrature;
use crate::sphere::cartesian::{eval_jet, unit_and_radius};
use crate::sphere::io::{header_value, parse_err, parse_fields, parse_header};
use crate::sphere::{GridSpec, ShCoeffs};

/// Default number of log-spaced radial nodes for sampled profiles.
pub const DEFAULT_RADIAL_NODES: usize = 801;
/// Default outer radius of sampled profiles.
pub const DEFAULT_R_MAX: f64 = 100.0;

const QUAD_ABS_TOL: f64 = 1e-15;
const QUAD_REL_TOL: f64 = 1e-14;
const QUAD_MAX_PANELS: usize = 200;

/// Radial dependence of one mode of the source.
#[derive(Clone, Debug, PartialEq)]
pub enum RadialFunction {
    /// c·r^{−p}.
    Power { coeff: f64, exponent: f64 },
    /// Values on the profile's log grid; beyond R_max continued as a power
    /// with the profile's decay tag.
    Sampled(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeProfile {
    pub l: usize,
    pub m: i64,
    pub radial: RadialFunction,
}

/// Per-mode radial functions on a logarithmic grid over [1, R_max] with a
/// decay exponent tag: |f_ℓm(r)| ≲ r^{−tag}.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    band_limit: usize,
    r_max: f64,
    radii: Vec<f64>,
    decay: f64,
    modes: Vec<ModeProfile>,
}

// Points built as r·(unit vector) on r = 1 land a few ulps inside.
fn snap_to_sphere(r: f64) -> f64 {
    if r < 1.0 && r > 1.0 - 1e-12 {
        1.0
    } else {
        r
    }
}

fn log_grid(r_max: f64, n: usize) -> Vec<f64> {
    let step = r_max.ln() / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { r_max } else { (step * i as f64).exp() })
        .collect()
}

impl RadialProfile {
    pub fn new(band_limit: usize, r_max: f64, n_r: usize, decay: f64) -> Result<Self> {
        if !(r_max > 1.0 && r_max.is_finite()) {
            return input(format!("R_max must exceed 1, got {r_max}"));
        }
        if n_r < 6 {
            return input(format!("need at least 6 radial nodes, got {n_r}"));
        }
        if !decay.is_finite() {
            return input("decay tag must be finite");
        }
        Ok(Self {
            band_limit,
            r_max,
            radii: log_grid(r_max, n_r),
            decay,
            modes: Vec::new(),
        })
    }

    fn check_mode(&self, l: usize, m: i64) -> Result<()> {
        if l > self.band_limit || m.unsigned_abs() as usize > l {
            return input(format!("mode ({l}, {m}) outside band limit {}", self.band_limit));
        }
        Ok(())
    }

    /// Adds c·r^{−p}·Y_ℓm. The exponent must respect the decay tag.
    pub fn with_power(mut self, l: usize, m: i64, coeff: f64, exponent: f64) -> Result<Self> {
        self.check_mode(l, m)?;
        if exponent < self.decay {
            return input(format!("power r^-{exponent} decays slower than the tag {}", self.decay));
        }
        self.modes.push(ModeProfile {
            l,
            m,
            radial: RadialFunction::Power { coeff, exponent },
        });
        Ok(self)
    }

    /// Adds f(r)·Y_ℓm sampled on the profile grid.
    pub fn with_sampled(mut self, l: usize, m: i64, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.check_mode(l, m)?;
        let values = self.radii.iter().map(|&r| f(r)).collect();
        self.modes.push(ModeProfile {
            l,
            m,
            radial: RadialFunction::Sampled(values),
        });
        Ok(self)
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }
    pub fn r_max(&self) -> f64 {
        self.r_max
    }
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
    pub fn decay(&self) -> f64 {
        self.decay
    }
    pub fn modes(&self) -> &[ModeProfile] {
        &self.modes
    }

    /// a·self + b·other; both must share the grid.
    pub fn lin_comb(&self, a: f64, other: &RadialProfile, b: f64) -> Result<Self> {
        if self.radii != other.radii || self.band_limit != other.band_limit {
            return input("profiles live on different grids");
        }
        let mut out = Self {
            decay: self.decay.min(other.decay),
            modes: Vec::new(),
            ..self.clone()
        };
        let n = self.radii.len();
        for (s, src) in [(a, self), (b, other)] {
            for mode in &src.modes {
                let values: Vec<f64> = (0..n).map(|i| s * src.node_value(mode, i)).collect();
                match out.modes.iter_mut().find(|p| p.l == mode.l && p.m == mode.m) {
                    Some(p) => {
                        if let RadialFunction::Sampled(v) = &mut p.radial {
                            for (x, y) in v.iter_mut().zip(&values) {
                                *x += y;
                            }
                        }
                    }
                    None => out.modes.push(ModeProfile {
                        l: mode.l,
                        m: mode.m,
                        radial: RadialFunction::Sampled(values),
                    }),
                }
            }
        }
        Ok(out)
    }

    fn node_value(&self, mode: &ModeProfile, i: usize) -> f64 {
        match &mode.radial {
            RadialFunction::Power { coeff, exponent } => coeff * self.radii[i].powf(-exponent),
            RadialFunction::Sampled(v) => v[i],
        }
    }

    /// Six-point Lagrange interpolation in log r.
    fn interpolate(&self, values: &[f64], r: f64) -> f64 {
        let n = self.radii.len();
        if r >= self.r_max {
            return values[n - 1] * (self.r_max / r).powf(self.decay);
        }
        let t = r.ln();
        let h = self.r_max.ln() / (n - 1) as f64;
        let k = ((t / h).floor() as usize).min(n - 2);
        let start = k.saturating_sub(2).min(n - 6);
        let mut out = 0.0;
        for i in start..start + 6 {
            let ti = h * i as f64;
            let mut w = 1.0;
            for j in start..start + 6 {
                if j != i {
                    w *= (t - h * j as f64) / (ti - h * j as f64);
                }
            }
            out += w * values[i];
        }
        out
    }

    /// Radial function of one mode at r ≥ 1.
    pub fn radial_value(&self, mode: &ModeProfile, r: f64) -> f64 {
        match &mode.radial {
            RadialFunction::Power { coeff, exponent } => coeff * r.powf(-exponent),
            RadialFunction::Sampled(v) => self.interpolate(v, r),
        }
    }

    /// "RADIAL L= R_max= n_r= decay=" then "ℓ m i value" records.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "RADIAL L={} R_max={} n_r={} decay={}\n",
            self.band_limit,
            self.r_max,
            self.radii.len(),
            self.decay
        );
        for mode in &self.modes {
            for i in 0..self.radii.len() {
                let _ = writeln!(out, "{} {} {i} {}", mode.l, mode.m, self.node_value(mode, i));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().collect();
        let Some(first) = lines.first() else {
            return parse_err(1, "empty radial profile file");
        };
        let h = parse_header(first, 1, "RADIAL")?;
        let l: usize = header_value(&h, "L", 1)?;
        let r_max: f64 = header_value(&h, "R_max", 1)?;
        let n_r: usize = header_value(&h, "n_r", 1)?;
        let decay: f64 = header_value(&h, "decay", 1)?;
        let mut out = Self::new(l, r_max, n_r, decay).or_else(|e| parse_err(1, e.to_string()))?;
        for (k, line) in lines.iter().enumerate().skip(1) {
            let line_no = k + 1;
            let f: Vec<f64> = parse_fields(line, line_no, 4)?;
            let (ml, mm, i) = (f[0] as usize, f[1] as i64, f[2] as usize);
            if f[0] != ml as f64 || f[1] != mm as f64 || f[2] != i as f64 {
                return parse_err(line_no, "mode and node indices must be integers");
            }
            if i == 0 {
                if out.check_mode(ml, mm).is_err() || out.modes.iter().any(|p| p.l == ml && p.m == mm) {
                    return parse_err(line_no, format!("invalid or repeated mode ({ml}, {mm})"));
                }
                out.modes.push(ModeProfile {
                    l: ml,
                    m: mm,
                    radial: RadialFunction::Sampled(Vec::with_capacity(n_r)),
                });
            }
            let Some(ModeProfile {
                l: pl,
                m: pm,
                radial: RadialFunction::Sampled(v),
            }) = out.modes.last_mut()
            else {
                return parse_err(line_no, "record before the first node of a mode");
            };
            if (*pl, *pm) != (ml, mm) || v.len() != i || i >= n_r {
                return parse_err(line_no, format!("expected node {} of mode ({pl}, {pm})", v.len()));
            }
            v.push(f[3]);
        }
        if let Some(ModeProfile {
            radial: RadialFunction::Sampled(v),
            ..
        }) = out.modes.last()
        {
            if v.len() != n_r {
                return parse_err(lines.len() + 1, "incomplete radial block");
            }
        }
        Ok(out)
    }
}

/// Rapidly decaying solution of Δu = f; evaluable anywhere in |x| ≥ 1.
#[derive(Clone, Debug)]
pub struct PoissonSolution {
    source: RadialProfile,
    q: i32,
    beta: f64,
    modes: Vec<ModeSolve>,
}

#[derive(Clone, Debug)]
struct ModeSolve {
    l: usize,
    m: i64,
    /// Whether the r^{−ℓ−1} integral starts at 1 (else at ∞).
    from_one: bool,
    homogeneous: f64,
    /// Sampled sources: ∫_{r_i}^{R_max} s^{1−ℓ}f and ∫_1^{r_i} s^{ℓ+2}f at nodes.
    outer: Vec<f64>,
    inner: Vec<f64>,
}

fn panel_integral(profile: &RadialProfile, values: &[f64], power: f64, a: f64, b: f64) -> Result<f64> {
    // s = e^t, ds = s dt
    let q = quadrature::integrate(
        |t| {
            let s = t.exp();
            s.powf(power + 1.0) * profile.interpolate(values, s)
        },
        a.ln(),
        b.ln(),
        QUAD_ABS_TOL,
        QUAD_REL_TOL,
        QUAD_MAX_PANELS,
    )?;
    Ok(q.value)
}

/// ∫_r^∞ s^k·c·s^{−p} ds, requiring p > k+1.
fn power_tail(c: f64, p: f64, k: f64, r: f64) -> f64 {
    c * r.powf(k + 1.0 - p) / (p - k - 1.0)
}

/// ∫_1^r s^k·c·s^{−p} ds.
fn power_from_one(c: f64, p: f64, k: f64, r: f64) -> f64 {
    let e = k + 1.0 - p;
    if e.abs() < 1e-14 {
        c * r.ln()
    } else {
        c * (r.powf(e) - 1.0) / e
    }
}

impl PoissonSolution {
    pub fn source(&self) -> &RadialProfile {
        &self.source
    }

    /// The guaranteed decay rate q+β of u.
    pub fn decay_rate(&self) -> f64 {
        self.q as f64 + self.beta
    }

    /// Adds c·r^{−ℓ−1}Y_ℓm, a homogeneous solution, to mode (ℓ, m).
    pub fn with_homogeneous(mut self, l: usize, m: i64, c: f64) -> Result<Self> {
        self.source.check_mode(l, m)?;
        match self.modes.iter_mut().find(|s| s.l == l && s.m == m) {
            Some(s) => s.homogeneous += c,
            None => self.modes.push(ModeSolve {
                l,
                m,
                from_one: true,
                homogeneous: c,
                outer: Vec::new(),
                inner: Vec::new(),
            }),
        }
        Ok(self)
    }

    /// (I_out(r), I_in(r)) = (∫_r^∞ s^{1−ℓ}f, ∫_a^r s^{ℓ+2}f) for one mode.
    fn integrals(&self, k: usize, r: f64) -> Result<(f64, f64)> {
        let sol = &self.modes[k];
        let Some(mode) = self.source.modes.iter().find(|p| p.l == sol.l && p.m == sol.m) else {
            return Ok((0.0, 0.0));
        };
        let l = sol.l as f64;
        let (k_out, k_in) = (1.0 - l, l + 2.0);
        match &mode.radial {
            RadialFunction::Power { coeff, exponent } => {
                let outer = power_tail(*coeff, *exponent, k_out, r);
                let inner = if sol.from_one {
                    power_from_one(*coeff, *exponent, k_in, r)
                } else {
                    -power_tail(*coeff, *exponent, k_in, r)
                };
                Ok((outer, inner))
            }
            RadialFunction::Sampled(values) => {
                let src = &self.source;
                let n = src.radii.len();
                let (c, p) = (values[n - 1] * src.r_max.powf(src.decay), src.decay);
                if r >= src.r_max {
                    let outer = power_tail(c, p, k_out, r);
                    let inner = if sol.from_one {
                        sol.inner[n - 1] + power_from_one(c, p, k_in, r) - power_from_one(c, p, k_in, src.r_max)
                    } else {
                        -power_tail(c, p, k_in, r)
                    };
                    return Ok((outer, inner));
                }
                let h = src.r_max.ln() / (n - 1) as f64;
                let i = ((r.ln() / h).floor() as usize).min(n - 2);
                let (ri, rj) = (src.radii[i], src.radii[i + 1]);
                let tail_out = power_tail(c, p, k_out, src.r_max);
                let outer = sol.outer[i + 1] + panel_integral(src, values, k_out, r, rj)? + tail_out;
                let inner_from_one = sol.inner[i] + panel_integral(src, values, k_in, ri, r)?;
                let inner = if sol.from_one {
                    inner_from_one
                } else {
                    let total = sol.inner[n - 1] + power_tail(c, p, k_in, src.r_max);
                    inner_from_one - total
                };
                Ok((outer, inner))
            }
        }
    }

    /// Univariate derivatives [u, u', u''] of the radial function of mode k.
    fn radial_derivatives(&self, k: usize, r: f64) -> Result<[f64; 3]> {
        let sol = &self.modes[k];
        let l = sol.l as f64;
        let (outer, inner) = self.integrals(k, r)?;
        let c = -1.0 / (2.0 * l + 1.0);
        let a = r.powf(l);
        let b = r.powf(-l - 1.0);
        let u = c * (a * outer + b * inner) + sol.homogeneous * b;
        let du = c * (l * a / r * outer - (l + 1.0) * b / r * inner) - (l + 1.0) * sol.homogeneous * b / r;
        let f = self
            .source
            .modes
            .iter()
            .find(|p| p.l == sol.l && p.m == sol.m)
            .map_or(0.0, |p| self.source.radial_value(p, r));
        let ddu = f - 2.0 * du / r + l * (l + 1.0) * u / (r * r);
        Ok([u, du, ddu])
    }

    /// Radial function u_ℓm(r).
    pub fn radial_value(&self, l: usize, m: i64, r: f64) -> Result<f64> {
        let r = snap_to_sphere(r);
        if r < 1.0 {
            return input(format!("radius {r} inside the unit ball"));
        }
        match self.modes.iter().position(|s| s.l == l && s.m == m) {
            Some(k) => Ok(self.radial_derivatives(k, r)?[0]),
            None => Ok(0.0),
        }
    }

    /// Samples the solution on the source grid.
    pub fn to_profile(&self) -> Result<RadialProfile> {
        let src = &self.source;
        let mut out = RadialProfile::new(src.band_limit, src.r_max, src.radii.len(), self.decay_rate())?;
        for (k, sol) in self.modes.iter().enumerate() {
            let values = src
                .radii
                .iter()
                .map(|&r| Ok(self.radial_derivatives(k, r)?[0]))
                .collect::<Result<Vec<f64>>>()?;
            out.modes.push(ModeProfile {
                l: sol.l,
                m: sol.m,
                radial: RadialFunction::Sampled(values),
            });
        }
        Ok(out)
    }
}

/// Solves Δu = f mode by mode; see the module docs for the limit rule.
pub fn solve_poisson(f: &RadialProfile, q: i32, beta: f64) -> Result<PoissonSolution> {
    if !(beta > 0.0 && beta < 1.0) {
        return input(format!("β must lie in (0, 1), got {beta}"));
    }
    if q < 0 {
        return input(format!("q must be non-negative, got {q}"));
    }
    let rate = q as f64 + beta;
    if f.decay < rate + 2.0 {
        return input(format!("source decay tag {} is below q+β+2 = {}", f.decay, rate + 2.0));
    }
    let n = f.radii.len();
    let modes = f
        .modes
        .par_iter()
        .map(|mode| {
            let l = mode.l as f64;
            let from_one = l + 1.0 >= rate;
            let (mut outer, mut inner) = (Vec::new(), Vec::new());
            if let RadialFunction::Sampled(values) = &mode.radial {
                outer = vec![0.0; n];
                inner = vec![0.0; n];
                for i in (0..n - 1).rev() {
                    outer[i] = outer[i + 1] + panel_integral(f, values, 1.0 - l, f.radii[i], f.radii[i + 1])?;
                }
                for i in 1..n {
                    inner[i] = inner[i - 1] + panel_integral(f, values, l + 2.0, f.radii[i - 1], f.radii[i])?;
                }
            }
            Ok(ModeSolve {
                l: mode.l,
                m: mode.m,
                from_one,
                homogeneous: 0.0,
                outer,
                inner,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| match e {
            Error::Numerical(msg) => Error::Numerical(format!("radial solve: {msg}")),
            e => e,
        })?;
    Ok(PoissonSolution {
        source: f.clone(),
        q,
        beta,
        modes,
    })
}

/// A field on {|x| ≥ 1} evaluable as jets, possibly with several components.
pub trait ExteriorField: Sync {
    fn components(&self, x: &[Jet; 3]) -> Result<Vec<Jet>>;
}

fn mode_jet(l: usize, m: i64, radial: [f64; 3], x: &[Jet; 3]) -> Result<Jet> {
    let order = x[0].order();
    if order > 2 {
        return input(format!("radial modes support derivatives up to order 2, requested {order}"));
    }
    let (u, r) = unit_and_radius(x);
    let y = eval_jet(&ShCoeffs::unit(l, l, m), &u);
    Ok(r.compose(&[radial[0], radial[1], 0.5 * radial[2]]) * y)
}

impl ExteriorField for RadialProfile {
    fn components(&self, x: &[Jet; 3]) -> Result<Vec<Jet>> {
        let order = x[0].order();
        let r = (x[0].value().powi(2) + x[1].value().powi(2) + x[2].value().powi(2)).sqrt();
        let mut out = Jet::zero(order);
        for mode in &self.modes {
            let radial = match &mode.radial {
                RadialFunction::Power { coeff, exponent } => {
                    let p = *exponent;
                    let v = coeff * r.powf(-p);
                    [v, -p * v / r, p * (p + 1.0) * v / (r * r)]
                }
                RadialFunction::Sampled(_) => {
                    if order > 0 {
                        return input("sampled profiles are evaluated without derivatives");
                    }
                    [self.radial_value(mode, r), 0.0, 0.0]
                }
            };
            out += mode_jet(mode.l, mode.m, radial, x)?;
        }
        Ok(vec![out])
    }
}

impl ExteriorField for PoissonSolution {
    fn components(&self, x: &[Jet; 3]) -> Result<Vec<Jet>> {
        let r = snap_to_sphere((x[0].value().powi(2) + x[1].value().powi(2) + x[2].value().powi(2)).sqrt());
        if r < 1.0 {
            return input(format!("radius {r} inside the unit ball"));
        }
        let mut out = Jet::zero(x[0].order());
        for (k, sol) in self.modes.iter().enumerate() {
            out += mode_jet(sol.l, sol.m, self.radial_derivatives(k, r)?, x)?;
        }
        Ok(vec![out])
    }
}

/// Wraps a closure as an exterior field.
pub struct FnField<F>(pub F);

impl<F: Fn(&[Jet; 3]) -> Result<Vec<Jet>> + Sync> ExteriorField for FnField<F> {
    fn components(&self, x: &[Jet; 3]) -> Result<Vec<Jet>> {
        (self.0)(x)
    }
}

/// F − G componentwise.
pub struct Difference<'a, A: ?Sized, B: ?Sized>(pub &'a A, pub &'a B);

impl<A: ExteriorField + ?Sized, B: ExteriorField + ?Sized> ExteriorField for Difference<'_, A, B> {
    fn components(&self, x: &[Jet; 3]) -> Result<Vec<Jet>> {
        let a = self.0.components(x)?;
        let b = self.1.components(x)?;
        if a.len() != b.len() {
            return input("component counts differ");
        }
        Ok(a.into_iter().zip(b).map(|(p, q)| p - q).collect())
    }
}

/// Σ_i sup (1+r)^{exponent+i}|D^i F| over a sample set.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedNormEstimate {
    pub exponent: f64,
    pub order: usize,
    pub value: f64,
    /// Per derivative order i, sup (1+r)^{exponent+i}|D^i F|.
    pub per_order: Vec<f64>,
    /// Weighted order-0 value at the outermost sample radius: the envelope
    /// constant for fields decaying exactly like r^{−exponent}.
    pub tail: f64,
}

/// Deterministic sample set: log-spaced radii in [1, R_max] times grid directions.
#[derive(Clone, Debug)]
pub struct SampleSet {
    pub radii: Vec<f64>,
    pub directions: Vec<[f64; 3]>,
}

impl SampleSet {
    pub fn new(r_max: f64, n_radii: usize, direction_grid: &GridSpec) -> Result<Self> {
        if !(r_max > 1.0) || n_radii < 2 {
            return input("sample set needs R_max > 1 and at least two radii");
        }
        let directions = (0..direction_grid.n_theta())
            .flat_map(|i| (0..direction_grid.n_phi()).map(move |j| (i, j)))
            .map(|(i, j)| direction_grid.direction(i, j))
            .collect();
        Ok(Self {
            radii: log_grid(r_max, n_radii),
            directions,
        })
    }

    /// 48 radii up to R_max over the L = 4 Gauss grid.
    pub fn standard(r_max: f64) -> Result<Self> {
        Self::new(r_max, 48, &GridSpec::new(4)?)
    }
}

/// |D^i F|_δ from the order-i coefficients of a jet.
fn derivative_norm(f: &Jet, i: usize) -> f64 {
    let mut s = 0.0;
    for a in 0..=i {
        for b in 0..=i - a {
            let c = i - a - b;
            let d = f.partial([a, b, c]);
            // number of ordered index tuples with this multi-index
            let mult = factorial(i) / (factorial(a) * factorial(b) * factorial(c));
            s += mult * d * d;
        }
    }
    s.sqrt()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn weighted_sup_norm(
    field: &(impl ExteriorField + ?Sized),
    exponent: f64,
    order: usize,
    samples: &SampleSet,
) -> Result<WeightedNormEstimate> {
    let points: Vec<(f64, [f64; 3])> = samples
        .radii
        .iter()
        .flat_map(|&r| samples.directions.iter().map(move |d| (r, [r * d[0], r * d[1], r * d[2]])))
        .collect();
    let r_out = *samples.radii.last().expect("non-empty radii");
    let per_point = points
        .par_iter()
        .map(|(r, x)| {
            let comps = field.components(&Jet::point(*x, order))?;
            let mut w = vec![0.0; order + 1];
            for (i, wi) in w.iter_mut().enumerate() {
                let n: f64 = comps.iter().map(|c| derivative_norm(c, i).powi(2)).sum::<f64>().sqrt();
                *wi = (1.0 + r).powf(exponent + i as f64) * n;
            }
            Ok((*r, w))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut per_order = vec![0.0f64; order + 1];
    let mut tail = 0.0f64;
    for (r, w) in &per_point {
        for (p, v) in per_order.iter_mut().zip(w) {
            *p = p.max(*v);
        }
        if *r == r_out {
            tail = tail.max(w[0]);
        }
    }
    Ok(WeightedNormEstimate {
        exponent,
        order,
        value: per_order.iter().sum(),
        per_order,
        tail,
    })
}

/// Sixth-order central-difference flat Laplacian of a scalar field.
pub fn fd_laplacian(field: &(impl ExteriorField + ?Sized), x: [f64; 3], h: f64) -> Result<f64> {
    const C: [f64; 4] = [-49.0 / 18.0, 1.5, -0.15, 1.0 / 90.0];
    let value = |p: [f64; 3]| -> Result<f64> { Ok(field.components(&Jet::point(p, 0))?[0].value()) };
    let centre = value(x)?;
    let mut sum = 3.0 * C[0] * centre;
    for axis in 0..3 {
        for (k, c) in C.iter().enumerate().skip(1) {
            let mut p = x;
            p[axis] = x[axis] + k as f64 * h;
            let mut q = x;
            q[axis] = x[axis] - k as f64 * h;
            sum += c * (value(p)? + value(q)?);
        }
    }
    Ok(sum / (h * h))
}

/// Default step for [`fd_laplacian`].
pub const FD_LAPLACIAN_STEP: f64 = 5e-3;

#[cfg(test)]
mod tests {
    use super::*;

    fn test_source(sampled: bool) -> RadialProfile {
        let p = RadialProfile::new(4, 100.0, DEFAULT_RADIAL_NODES, 5.0).unwrap();
        if sampled {
            p.with_sampled(1, 0, |r| 4.0 * r.powi(-5)).unwrap()
        } else {
            p.with_power(1, 0, 4.0, 5.0).unwrap()
        }
    }

    #[test]
    fn zero_source_gives_zero() {
        let f = RadialProfile::new(3, 50.0, 40, 6.0).unwrap();
        let u = solve_poisson(&f, 2, 0.5).unwrap();
        assert_eq!(u.components(&Jet::point([2.0, 0.0, 0.0], 0)).unwrap()[0].value(), 0.0);
    }

    #[test]
    fn power_source_recovers_r_minus_three() {
        for sampled in [false, true] {
            let u = solve_poisson(&test_source(sampled), 2, 0.9).unwrap();
            for r in [1.0f64, 1.7, 9.0, 80.0, 300.0] {
                let v = u.radial_value(1, 0, r).unwrap();
                assert!((v - r.powi(-3)).abs() < 1e-10 * r.powi(-3), "sampled={sampled} r={r}: {v}");
            }
        }
    }

    #[test]
    fn high_modes_integrate_from_the_sphere() {
        // ℓ = 3 with q+β = 2.5: a = 1, so u carries an r^{−4} homogeneous piece
        let f = RadialProfile::new(4, 100.0, 60, 5.0).unwrap().with_power(3, 1, 1.0, 5.0).unwrap();
        let u = solve_poisson(&f, 2, 0.5).unwrap();
        for r in [1.0f64, 2.0, 5.0] {
            // −(1/7)[r³·r^{−6}/6 + r^{−4}(r − 1)]
            let exact = -(7.0 / 6.0 * r.powi(-3) - r.powi(-4)) / 7.0;
            assert!((u.radial_value(3, 1, r).unwrap() - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_slow_decay_and_bad_beta() {
        let f = RadialProfile::new(2, 10.0, 20, 4.0).unwrap();
        assert!(matches!(solve_poisson(&f, 2, 0.5), Err(Error::Input(_))));
        assert!(matches!(solve_poisson(&f, 1, 1.0), Err(Error::Input(_))));
        assert!(RadialProfile::new(2, 10.0, 20, 4.0).unwrap().with_power(1, 0, 1.0, 3.0).is_err());
    }

    #[test]
    fn homogeneous_addition() {
        let u = solve_poisson(&test_source(false), 2, 0.9).unwrap().with_homogeneous(2, 1, 0.5).unwrap();
        assert!((u.radial_value(2, 1, 2.0).unwrap() - 0.5 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn weighted_norm_of_inverse_radius() {
        let f = FnField(|x: &[Jet; 3]| Ok(vec![unit_and_radius(x).1.recip()]));
        let w = weighted_sup_norm(&f, 1.0, 0, &SampleSet::standard(1000.0).unwrap()).unwrap();
        assert!((w.tail - 1.0).abs() < 0.05);
        assert!((w.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fd_laplacian_matches_source() {
        let u = solve_poisson(&test_source(true), 2, 0.9).unwrap();
        let src = test_source(false);
        for x in [[1.5, 0.3, -0.4], [0.2, 3.0, 2.0], [-7.0, 1.0, 5.0]] {
            let lap = fd_laplacian(&u, x, FD_LAPLACIAN_STEP).unwrap();
            let f = src.components(&Jet::point(x, 0)).unwrap()[0].value();
            assert!((lap - f).abs() < 1e-7, "{lap} vs {f}");
        }
    }

    #[test]
    fn profile_text_round_trips() {
        let p = RadialProfile::new(2, 20.0, 12, 4.5)
            .unwrap()
            .with_sampled(2, -1, |r| r.powf(-4.5).sin())
            .unwrap()
            .with_power(0, 0, 2.0, 5.0)
            .unwrap();
        let text = p.to_text();
        let back = RadialProfile::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert!(matches!(
            RadialProfile::from_text("RADIAL L=2 R_max=20 n_r=12 decay=4.5\n0 0 1 1.0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
