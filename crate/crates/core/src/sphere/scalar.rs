use num_complex::Complex64;

use super::coeffs::ShCoeffs;
use super::grid::GridSpec;
use super::transform::{analyze, dp_signed, p_signed, synthesize, synthesize_real_with};
use crate::error::{input, Result};

/// Real scalar field on the unit sphere, held both as coefficients and as
/// grid samples.
#[derive(Clone, Debug)]
pub struct SphereScalarField {
    grid: GridSpec,
    coeffs: ShCoeffs,
    samples: Vec<f64>,
}

impl SphereScalarField {
    pub fn from_samples(grid: &GridSpec, samples: Vec<f64>) -> Result<Self> {
        let coeffs = analyze(&samples, grid)?;
        Ok(SphereScalarField {
            grid: grid.clone(),
            coeffs,
            samples,
        })
    }

    pub fn from_coeffs(grid: &GridSpec, coeffs: ShCoeffs) -> Result<Self> {
        if !coeffs.is_real() {
            return input("scalar fields require real coefficient sets");
        }
        let samples = synthesize(&coeffs, grid)?;
        Ok(SphereScalarField {
            grid: grid.clone(),
            coeffs: coeffs.with_band_limit(grid.band_limit()),
            samples,
        })
    }

    pub fn from_fn(grid: &GridSpec, f: impl FnMut([f64; 3]) -> f64) -> Result<Self> {
        Self::from_samples(grid, grid.sample(f))
    }

    pub fn constant(grid: &GridSpec, c: f64) -> Self {
        let mut coeffs = ShCoeffs::zeros(grid.band_limit(), true);
        coeffs.set(0, 0, Complex64::new(c * (4.0 * std::f64::consts::PI).sqrt(), 0.0));
        SphereScalarField {
            grid: grid.clone(),
            coeffs,
            samples: vec![c; grid.len()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn coeffs(&self) -> &ShCoeffs {
        &self.coeffs
    }
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    fn map_coeffs(&self, f: impl Fn(usize) -> f64) -> Self {
        Self::from_coeffs(&self.grid, self.coeffs.map_degree(f)).expect("band limit preserved")
    }

    /// Δ on the round sphere: mode ℓ scaled by −ℓ(ℓ+1).
    pub fn laplace_beltrami(&self) -> Self {
        self.map_coeffs(|l| -((l * (l + 1)) as f64))
    }

    /// Poisson-kernel extension into the unit ball: mode ℓ scaled by r^ℓ.
    pub fn disk_extension(&self, r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return input(format!("disk extension radius {r} outside [0, 1)"));
        }
        Ok(self.map_coeffs(|l| r.powi(l as i32)))
    }

    /// Bounded harmonic extension to the exterior: mode ℓ scaled by r^{−ℓ−1}.
    pub fn exterior_extension(&self, r: f64) -> Result<Self> {
        if r.is_nan() || r < 1.0 {
            return input(format!("exterior extension radius {r} below 1"));
        }
        Ok(self.map_coeffs(|l| r.powi(-(l as i32) - 1)))
    }

    /// Round-measure quadrature of the samples.
    pub fn integrate(&self) -> f64 {
        self.grid.integrate(&self.samples)
    }

    /// Quadrature inner product ∫ f g.
    pub fn inner(&self, other: &SphereScalarField) -> f64 {
        let prod: Vec<f64> = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect();
        self.grid.integrate(&prod)
    }

    pub fn add(&self, other: &SphereScalarField) -> Self {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        SphereScalarField {
            grid: self.grid.clone(),
            coeffs: self.coeffs.scale(s),
            samples: self.samples.iter().map(|v| v * s).collect(),
        }
    }

    pub fn lin_comb(&self, a: f64, other: &SphereScalarField, b: f64) -> Self {
        SphereScalarField {
            grid: self.grid.clone(),
            coeffs: self.coeffs.lin_comb(a, &other.coeffs, b),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Frame gradient (∂_θ f, ∂_φ f / sin θ) synthesized from the coefficients.
    pub fn gradient(&self) -> [Vec<f64>; 2] {
        gradient_samples(&self.grid, &self.coeffs)
    }
}

/// Frame components of the round gradient of Σ c_ℓm Y_ℓm.
pub(crate) fn gradient_samples(grid: &GridSpec, c: &ShCoeffs) -> [Vec<f64>; 2] {
    let d_theta = synthesize_real_with(grid, c, |l, m, i| Complex64::new(dp_signed(grid, l, m, i), 0.0));
    let d_phi = synthesize_real_with(grid, c, |l, m, i| {
        Complex64::new(0.0, m as f64 * p_signed(grid, l, m, i) / grid.sin_theta(i))
    });
    [d_theta, d_phi]
}
