//! Symmetric 2-tensors on the round sphere and the uniformization split
//! ω = h·g + L_W g.
//!
//! Components live in the orthonormal frame (e_θ, e_φ/sin θ). A tangent
//! field is stored through potentials, W = ∇α + J∇β with J the rotation by
//! a right angle (W₁ = α₁ + β₂, W₂ = α₂ − β₁). Its Lie derivative of the
//! round metric splits as (Δα)g + E(α) + B(β), where E = 2·Hess^tf and B is
//! E rotated: B₁₁ = E₁₂, B₁₂ = −E₁₁.

use num_complex::Complex64;

use super::coeffs::ShCoeffs;
use super::grid::GridSpec;
use super::scalar::{gradient_samples, SphereScalarField};
use super::transform::{check_band, dp_signed, p_signed, project_with, ring_fourier, synthesize_real_with};
use crate::error::{input, Result};

/// (ℓ−1)ℓ(ℓ+1)(ℓ+2); the E- and B-harmonics have squared L² norm 2N_ℓ.
pub fn tensor_norm_factor(l: usize) -> f64 {
    let l = l as f64;
    (l - 1.0) * l * (l + 1.0) * (l + 2.0)
}

/// θ-factor of E₁₁ for mode (ℓ, m).
#[inline]
fn e11(grid: &GridSpec, l: usize, m: i64, i: usize) -> f64 {
    let (s, c) = (grid.sin_theta(i), grid.cos_theta(i));
    let p = p_signed(grid, l, m, i);
    let dp = dp_signed(grid, l, m, i);
    let lam = (l * (l + 1)) as f64;
    let m2 = (m * m) as f64;
    -2.0 * c / s * dp - lam * p + 2.0 * m2 * p / (s * s)
}

/// θ-factor of E₁₂ for mode (ℓ, m), which is purely imaginary: E₁₂ = i·q.
#[inline]
fn e12(grid: &GridSpec, l: usize, m: i64, i: usize) -> Complex64 {
    let (s, c) = (grid.sin_theta(i), grid.cos_theta(i));
    let p = p_signed(grid, l, m, i);
    let dp = dp_signed(grid, l, m, i);
    Complex64::new(0.0, 2.0 * m as f64 * (dp - c / s * p) / s)
}

/// Tangent vector field on S² through its gradient and curl potentials.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentField {
    pub alpha: ShCoeffs,
    pub beta: ShCoeffs,
}

impl TangentField {
    pub fn zero(band_limit: usize) -> Self {
        TangentField {
            alpha: ShCoeffs::zeros(band_limit, true),
            beta: ShCoeffs::zeros(band_limit, true),
        }
    }

    pub fn band_limit(&self) -> usize {
        self.alpha.band_limit().max(self.beta.band_limit())
    }

    /// Drops the ℓ ≤ 1 parts of both potentials.
    pub fn gauge_fixed(&self) -> Self {
        let cut = |c: &ShCoeffs| c.map_degree(|l| if l < 2 { 0.0 } else { 1.0 });
        TangentField {
            alpha: cut(&self.alpha),
            beta: cut(&self.beta),
        }
    }

    /// Frame components (W₁, W₂) at the grid nodes.
    pub fn samples(&self, grid: &GridSpec) -> Result<[Vec<f64>; 2]> {
        check_band(grid, &self.alpha)?;
        check_band(grid, &self.beta)?;
        let [a1, a2] = gradient_samples(grid, &self.alpha);
        let [b1, b2] = gradient_samples(grid, &self.beta);
        let w1 = a1.iter().zip(&b2).map(|(a, b)| a + b).collect();
        let w2 = a2.iter().zip(&b1).map(|(a, b)| a - b).collect();
        Ok([w1, w2])
    }

    /// div W = Δα.
    pub fn divergence(&self, grid: &GridSpec) -> Result<SphereScalarField> {
        SphereScalarField::from_coeffs(grid, self.alpha.map_degree(|l| -((l * (l + 1)) as f64)))
    }

    /// Frame components of L_W g for the round metric g.
    pub fn lie_derivative_round(&self, grid: &GridSpec) -> Result<SphereSymTensorField> {
        check_band(grid, &self.alpha)?;
        check_band(grid, &self.beta)?;
        let lam = |l: usize| (l * (l + 1)) as f64;
        let a_trace = synthesize_real_with(grid, &self.alpha, |l, m, i| {
            Complex64::new(-lam(l) * p_signed(grid, l, m, i), 0.0)
        });
        let a_e11 = synthesize_real_with(grid, &self.alpha, |l, m, i| Complex64::new(e11(grid, l, m, i), 0.0));
        let a_e12 = synthesize_real_with(grid, &self.alpha, |l, m, i| e12(grid, l, m, i));
        let b_e11 = synthesize_real_with(grid, &self.beta, |l, m, i| Complex64::new(e11(grid, l, m, i), 0.0));
        let b_e12 = synthesize_real_with(grid, &self.beta, |l, m, i| e12(grid, l, m, i));
        let n = grid.len();
        let mut t11 = vec![0.0; n];
        let mut t12 = vec![0.0; n];
        let mut t22 = vec![0.0; n];
        for k in 0..n {
            let d = a_e11[k] + b_e12[k];
            t11[k] = a_trace[k] + d;
            t22[k] = a_trace[k] - d;
            t12[k] = a_e12[k] - b_e11[k];
        }
        SphereSymTensorField::new(grid, t11, t12, t22)
    }
}

/// Symmetric 2-tensor on S² in the orthonormal frame (e_θ, e_φ/sin θ).
#[derive(Clone, Debug)]
pub struct SphereSymTensorField {
    grid: GridSpec,
    t11: Vec<f64>,
    t12: Vec<f64>,
    t22: Vec<f64>,
}

impl SphereSymTensorField {
    pub fn new(grid: &GridSpec, t11: Vec<f64>, t12: Vec<f64>, t22: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        if t11.len() != n || t12.len() != n || t22.len() != n {
            return input(format!("tensor components must each have {n} samples"));
        }
        Ok(SphereSymTensorField {
            grid: grid.clone(),
            t11,
            t12,
            t22,
        })
    }

    pub fn zero(grid: &GridSpec) -> Self {
        let n = grid.len();
        SphereSymTensorField {
            grid: grid.clone(),
            t11: vec![0.0; n],
            t12: vec![0.0; n],
            t22: vec![0.0; n],
        }
    }

    /// f·g for the round metric g.
    pub fn conformal(f: &SphereScalarField) -> Self {
        let s = f.samples().to_vec();
        SphereSymTensorField {
            grid: f.grid().clone(),
            t11: s.clone(),
            t12: vec![0.0; s.len()],
            t22: s,
        }
    }

    pub fn round_metric(grid: &GridSpec) -> Self {
        Self::conformal(&SphereScalarField::constant(grid, 1.0))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> [&[f64]; 3] {
        [&self.t11, &self.t12, &self.t22]
    }

    /// Component triple (ω₁₁, ω₁₂, ω₂₂) at flat index k.
    pub fn at(&self, k: usize) -> [f64; 3] {
        [self.t11[k], self.t12[k], self.t22[k]]
    }

    /// Round-metric trace ω₁₁ + ω₂₂.
    pub fn trace(&self) -> Result<SphereScalarField> {
        let tr = self.t11.iter().zip(&self.t22).map(|(a, b)| a + b).collect();
        SphereScalarField::from_samples(&self.grid, tr)
    }

    pub fn lin_comb(&self, a: f64, other: &SphereSymTensorField, b: f64) -> Self {
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        SphereSymTensorField {
            grid: self.grid.clone(),
            t11: mix(&self.t11, &other.t11),
            t12: mix(&self.t12, &other.t12),
            t22: mix(&self.t22, &other.t22),
        }
    }

    pub fn add(&self, other: &SphereSymTensorField) -> Self {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &SphereSymTensorField) -> Self {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.lin_comb(s, self, 0.0)
    }

    /// Largest absolute component over the grid.
    pub fn sup_norm(&self) -> f64 {
        self.t11
            .iter()
            .chain(&self.t12)
            .chain(&self.t22)
            .fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Uniformization split ω = h·g + L_W g with W free of ℓ ≤ 1 modes.
    ///
    /// The trace-free part is projected onto the E/B harmonics by quadrature,
    /// which is exact for band-limited input; h absorbs the trace remainder.
    pub fn decompose(&self) -> Result<(SphereScalarField, TangentField)> {
        let grid = &self.grid;
        let l_max = grid.band_limit();
        let diff: Vec<f64> = self.t11.iter().zip(&self.t22).map(|(a, b)| a - b).collect();
        let fd = ring_fourier(grid, &diff);
        let fo = ring_fourier(grid, &self.t12);
        let n2 = |l: usize| if l < 2 { 0.0 } else { 2.0 * tensor_norm_factor(l) };
        let n1 = |l: usize| if l < 2 { 0.0 } else { tensor_norm_factor(l) };
        let e11c = |l, m, i| Complex64::new(e11(grid, l, m, i), 0.0);
        let e12c = |l, m, i| e12(grid, l, m, i);
        let alpha = project_with(grid, &fd, l_max, true, e11c, n2)
            .lin_comb(1.0, &project_with(grid, &fo, l_max, true, e12c, n1), 1.0);
        let beta = project_with(grid, &fd, l_max, true, e12c, n2)
            .lin_comb(1.0, &project_with(grid, &fo, l_max, true, e11c, n1), -1.0);
        let w = TangentField { alpha, beta };
        let div = w.divergence(grid)?;
        let h: Vec<f64> = self
            .t11
            .iter()
            .zip(&self.t22)
            .zip(div.samples())
            .map(|((a, b), d)| 0.5 * (a + b) - d)
            .collect();
        Ok((SphereScalarField::from_samples(grid, h)?, w))
    }
}

/// h·g + L_W g.
pub fn assemble(h: &SphereScalarField, w: &TangentField) -> Result<SphereSymTensorField> {
    Ok(SphereSymTensorField::conformal(h).add(&w.lie_derivative_round(h.grid())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_coeffs(rng: &mut ChaCha8Rng, lmax: usize, lmin: usize) -> ShCoeffs {
        let mut c = ShCoeffs::zeros(lmax, true);
        for l in lmin..=lmax {
            for m in 0..=l as i64 {
                c.set(l, m, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
        }
        c
    }

    #[test]
    fn round_metric_is_pure_trace() {
        let g = GridSpec::new(6).unwrap();
        let (h, w) = SphereSymTensorField::round_metric(&g).scale(0.3).decompose().unwrap();
        assert!(h.samples().iter().all(|v| (v - 0.3).abs() < 1e-13));
        assert!(w.alpha.max_abs() < 1e-13 && w.beta.max_abs() < 1e-13);
    }

    #[test]
    fn gradient_of_y20_is_recovered() {
        let g = GridSpec::new(6).unwrap();
        let w = TangentField {
            alpha: ShCoeffs::unit(6, 2, 0),
            beta: ShCoeffs::zeros(6, true),
        };
        let omega = w.lie_derivative_round(&g).unwrap();
        let (h, back) = omega.decompose().unwrap();
        assert!(h.sup_norm() < 1e-12);
        assert!((back.alpha.get(2, 0).re - 1.0).abs() < 1e-12);
        assert!(back.beta.max_abs() < 1e-12);
    }

    #[test]
    fn killing_fields_have_zero_lie_derivative() {
        let g = GridSpec::new(5).unwrap();
        for m in 0..=1 {
            let w = TangentField {
                alpha: ShCoeffs::zeros(5, true),
                beta: ShCoeffs::real_mode(5, 1, m, Complex64::new(0.7, -0.2)),
            };
            assert!(w.lie_derivative_round(&g).unwrap().sup_norm() < 1e-13);
        }
    }

    #[test]
    fn conformal_killing_gradient_is_pure_trace() {
        let g = GridSpec::new(5).unwrap();
        let w = TangentField {
            alpha: ShCoeffs::real_mode(5, 1, 1, Complex64::new(0.4, 0.1)),
            beta: ShCoeffs::zeros(5, true),
        };
        let omega = w.lie_derivative_round(&g).unwrap();
        let [t11, t12, t22] = omega.components();
        for k in 0..g.len() {
            assert!((t11[k] - t22[k]).abs() < 1e-13 && t12[k].abs() < 1e-13);
        }
    }

    #[test]
    fn decomposition_round_trip_on_random_data() {
        let g = GridSpec::new(10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = SphereScalarField::from_coeffs(&g, random_coeffs(&mut rng, 10, 0)).unwrap();
        let w = TangentField {
            alpha: random_coeffs(&mut rng, 10, 2),
            beta: random_coeffs(&mut rng, 10, 2),
        };
        let omega = assemble(&h, &w).unwrap();
        let (h2, w2) = omega.decompose().unwrap();
        assert!(h2.lin_comb(1.0, &h, -1.0).sup_norm() < 1e-10);
        assert!(w2.alpha.lin_comb(1.0, &w.alpha, -1.0).max_abs() < 1e-11);
        assert!(w2.beta.lin_comb(1.0, &w.beta, -1.0).max_abs() < 1e-11);
        let re = assemble(&h2, &w2).unwrap();
        assert!(re.sub(&omega).sup_norm() < 1e-10);
        // trace identity
        let tr = omega.trace().unwrap();
        assert!((tr.integrate() - 2.0 * h2.integrate()).abs() < 1e-10);
        let div = w.divergence(&g).unwrap();
        let lhs = tr.samples();
        for k in 0..g.len() {
            assert!((lhs[k] - 2.0 * h.samples()[k] - 2.0 * div.samples()[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn tangent_samples_of_rotation() {
        // β = cos θ (up to normalization) generates rotation about z: W = −sinθ e_φ · c
        let g = GridSpec::new(5).unwrap();
        let c = (4.0 * std::f64::consts::PI / 3.0).sqrt();
        let w = TangentField {
            alpha: ShCoeffs::zeros(5, true),
            beta: ShCoeffs::real_mode(5, 1, 0, Complex64::new(c, 0.0)),
        };
        let [w1, w2] = w.samples(&g).unwrap();
        for i in 0..g.n_theta() {
            for j in 0..g.n_phi() {
                let k = i * g.n_phi() + j;
                assert!(w1[k].abs() < 1e-13);
                assert!((w2[k] - g.sin_theta(i)).abs() < 1e-13);
            }
        }
    }
}
