//! Bartnik data (γ, H) on the unit sphere and the mass functionals defined
//! directly on it.
//!
//! Sign convention: the mean curvature of the unit sphere in flat space is
//! H = −2 (divergence of the inward normal).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{input, Result};
use crate::sphere::io::{header_value, parse_err, parse_header, read_grid_records, write_grid_records};
use crate::sphere::{tensor_norm_factor, GridSpec, ShCoeffs, SphereScalarField, SphereSymTensorField, TangentField};

/// Spectral Sobolev-type surrogate for a C^k norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSurrogate {
    pub order: usize,
    pub value: f64,
}

/// Derivative order of the surrogate applied to γ − g.
pub const METRIC_NORM_ORDER: usize = 4;
/// Derivative order of the surrogate applied to H + 2.
pub const CURVATURE_NORM_ORDER: usize = 3;

fn sobolev_weight(k: usize) -> impl Fn(usize) -> f64 {
    move |l| (1.0 + l as f64).powi(2 * k as i32 + 2)
}

/// (Σ (1+ℓ)^{2k+2} |c_ℓm|²)^{1/2}.
pub fn scalar_norm(f: &ShCoeffs, k: usize) -> NormSurrogate {
    NormSurrogate {
        order: k,
        value: f.weighted_sum(sobolev_weight(k)).sqrt(),
    }
}

/// Tensor surrogate: the scalar weight applied to the trace coefficients and
/// to the E/B potentials, each weighted by the squared L² norm of its unit harmonic.
pub fn tensor_norm(omega: &SphereSymTensorField, k: usize) -> Result<NormSurrogate> {
    let tr = omega.trace()?;
    let (_, w) = omega.decompose()?;
    let wgt = sobolev_weight(k);
    let sum = 0.5 * tr.coeffs().weighted_sum(&wgt)
        + w.alpha.weighted_sum(|l| wgt(l) * 2.0 * tensor_norm_factor(l))
        + w.beta.weighted_sum(|l| wgt(l) * 2.0 * tensor_norm_factor(l));
    Ok(NormSurrogate {
        order: k,
        value: sum.sqrt(),
    })
}

/// Induced metric γ and mean curvature H on the unit sphere.
#[derive(Clone, Debug)]
pub struct BartnikData {
    gamma: SphereSymTensorField,
    h: SphereScalarField,
}

impl BartnikData {
    pub fn new(gamma: SphereSymTensorField, h: SphereScalarField) -> Result<Self> {
        if gamma.grid() != h.grid() {
            return input("metric and mean curvature live on different grids");
        }
        for k in 0..gamma.grid().len() {
            let [a, b, c] = gamma.at(k);
            if !(a > 0.0 && a * c - b * b > 0.0) {
                return input(format!("induced metric not positive definite at node {k}"));
            }
        }
        Ok(BartnikData { gamma, h })
    }

    /// Round data (g, −2).
    pub fn round(grid: &GridSpec) -> Self {
        BartnikData {
            gamma: SphereSymTensorField::round_metric(grid),
            h: SphereScalarField::constant(grid, -2.0),
        }
    }

    /// (g + ω, −2 + κ).
    pub fn from_deviation(omega: &SphereSymTensorField, kappa: &SphereScalarField) -> Result<Self> {
        let grid = omega.grid();
        let gamma = SphereSymTensorField::round_metric(grid).add(omega);
        let h = kappa.lin_comb(1.0, &SphereScalarField::constant(grid, -2.0), 1.0);
        Self::new(gamma, h)
    }

    pub fn grid(&self) -> &GridSpec {
        self.gamma.grid()
    }
    pub fn gamma(&self) -> &SphereSymTensorField {
        &self.gamma
    }
    pub fn mean_curvature(&self) -> &SphereScalarField {
        &self.h
    }

    /// (γ − g, H + 2).
    pub fn deviation(&self) -> (SphereSymTensorField, SphereScalarField) {
        let grid = self.grid();
        (
            self.gamma.sub(&SphereSymTensorField::round_metric(grid)),
            self.h.lin_comb(1.0, &SphereScalarField::constant(grid, 2.0), 1.0),
        )
    }

    /// √(A/16π)·(1 − (1/16π)∫H² dA_γ) with the γ area element.
    pub fn hawking_mass(&self) -> f64 {
        let grid = self.grid();
        let hs = self.h.samples();
        let np = grid.n_phi();
        let (mut area, mut willmore) = (0.0, 0.0);
        for i in 0..grid.n_theta() {
            let w = grid.area_weight(i);
            for j in 0..np {
                let k = i * np + j;
                let [a, b, c] = self.gamma.at(k);
                let da = (a * c - b * b).sqrt() * w;
                area += da;
                willmore += hs[k] * hs[k] * da;
            }
        }
        (area / (16.0 * PI)).sqrt() * (1.0 - willmore / (16.0 * PI))
    }

    /// (1/16π)∫(6 + 2H − tr γ) against the round measure, trace taken with g.
    pub fn first_order_mass(&self) -> f64 {
        let hs = self.h.samples();
        let [g11, _, g22] = self.gamma.components();
        let integrand: Vec<f64> = (0..hs.len()).map(|k| 6.0 + 2.0 * hs[k] - g11[k] - g22[k]).collect();
        self.grid().integrate(&integrand) / (16.0 * PI)
    }

    /// (‖γ − g‖ of order 4, ‖H + 2‖ of order 3).
    pub fn data_norms(&self) -> Result<(NormSurrogate, NormSurrogate)> {
        let (omega, kappa) = self.deviation();
        Ok((
            tensor_norm(&omega, METRIC_NORM_ORDER)?,
            scalar_norm(kappa.coeffs(), CURVATURE_NORM_ORDER),
        ))
    }

    /// ε = ‖γ − g‖₄ + ‖H + 2‖₃.
    pub fn epsilon(&self) -> Result<f64> {
        let (a, b) = self.data_norms()?;
        Ok(a.value + b.value)
    }

    /// Isotropic Schwarzschild coordinate sphere |x| = 1 with mass parameter m.
    pub fn schwarzschild(m: f64, grid: &GridSpec) -> Result<Self> {
        if !(m.abs() < 1.0) {
            return input(format!("Schwarzschild parameter |m| = {} must be below 1", m.abs()));
        }
        let q = 1.0 + 0.5 * m;
        let gamma = SphereSymTensorField::round_metric(grid).scale(q.powi(4));
        let h = SphereScalarField::constant(grid, -2.0 * (1.0 - 0.5 * m) / q.powi(3));
        Self::new(gamma, h)
    }

    /// "BARTNIK L=.. n_theta=.. n_phi=.." then GRID blocks for γ₁₁, γ₁₂, γ₂₂ and H.
    pub fn to_text(&self) -> String {
        let grid = self.grid();
        let (nt, np) = (grid.n_theta(), grid.n_phi());
        let mut out = format!("BARTNIK L={} n_theta={nt} n_phi={np}\n", grid.band_limit());
        let [a, b, c] = self.gamma.components();
        for block in [a, b, c, self.h.samples()] {
            out.push_str(&format!("GRID n_theta={nt} n_phi={np}\n"));
            write_grid_records(&mut out, np, block);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().collect();
        let Some(first) = lines.first() else {
            return parse_err(1, "empty Bartnik data file");
        };
        let h = parse_header(first, 1, "BARTNIK")?;
        let l: usize = header_value(&h, "L", 1)?;
        let nt: usize = header_value(&h, "n_theta", 1)?;
        let np: usize = header_value(&h, "n_phi", 1)?;
        let grid = GridSpec::with_sizes(l, nt, np).or_else(|e| parse_err(1, e.to_string()))?;
        let mut blocks = Vec::with_capacity(4);
        let mut pos = 1;
        for _ in 0..4 {
            let Some(line) = lines.get(pos) else {
                return parse_err(pos + 1, "missing GRID block");
            };
            let gh = parse_header(line, pos + 1, "GRID")?;
            let (bt, bp): (usize, usize) = (header_value(&gh, "n_theta", pos + 1)?, header_value(&gh, "n_phi", pos + 1)?);
            if (bt, bp) != (nt, np) {
                return parse_err(pos + 1, "GRID block size disagrees with header");
            }
            blocks.push(read_grid_records(&lines, pos + 1, nt, np)?);
            pos += 1 + nt * np;
        }
        if pos < lines.len() {
            return parse_err(pos + 1, "trailing content after Bartnik data");
        }
        let hv = blocks.pop().unwrap();
        let c = blocks.pop().unwrap();
        let b = blocks.pop().unwrap();
        let a = blocks.pop().unwrap();
        let gamma = SphereSymTensorField::new(&grid, a, b, c)?;
        Self::new(gamma, SphereScalarField::from_samples(&grid, hv)?)
    }
}

/// Random band-limited deviation (trace part, gauge-free vector potentials,
/// mean-curvature part) with modes up to `max_degree`, unit-scale coefficients.
pub fn random_deviation<R: Rng>(
    grid: &GridSpec,
    max_degree: usize,
    rng: &mut R,
) -> Result<(SphereSymTensorField, SphereScalarField)> {
    let l = grid.band_limit();
    let max_degree = max_degree.min(l);
    let mut draw = |lmin: usize| {
        let mut c = ShCoeffs::zeros(l, true);
        for ll in lmin..=max_degree {
            for m in 0..=ll as i64 {
                let im = if m == 0 { 0.0 } else { rng.random_range(-1.0..1.0) };
                c.set(ll, m, Complex64::new(rng.random_range(-1.0..1.0), im));
            }
        }
        c
    };
    let h = draw(0);
    let alpha = draw(2);
    let beta = draw(2);
    let kappa = draw(0);
    let w = TangentField { alpha, beta };
    let omega = SphereSymTensorField::conformal(&SphereScalarField::from_coeffs(grid, h)?)
        .add(&w.lie_derivative_round(grid)?);
    Ok((omega, SphereScalarField::from_coeffs(grid, kappa)?))
}

/// Random data whose deviation has ε exactly `epsilon` (ε is 1-homogeneous).
pub fn random_data<R: Rng>(grid: &GridSpec, epsilon: f64, max_degree: usize, rng: &mut R) -> Result<BartnikData> {
    let (omega, kappa) = random_deviation(grid, max_degree, rng)?;
    let unit = tensor_norm(&omega, METRIC_NORM_ORDER)?.value + scalar_norm(kappa.coeffs(), CURVATURE_NORM_ORDER).value;
    let s = epsilon / unit;
    BartnikData::from_deviation(&omega.scale(s), &kappa.scale(s))
}
