//! Legendre–Fourier transforms on the product grid.
//!
//! Synthesis and analysis are written against a per-ring "θ-factor" closure
//! `t(ℓ, m, i)` so the same loops serve scalar values, derivatives, and the
//! tensor harmonics of the uniformization decomposition.

use num_complex::Complex64;

use super::coeffs::ShCoeffs;
use super::grid::GridSpec;
use crate::error::{input, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Signed-m Legendre value, P̄ℓ,−m = (−1)^m P̄ℓm.
#[inline]
pub(crate) fn p_signed(grid: &GridSpec, l: usize, m: i64, i: usize) -> f64 {
    let v = grid.p(l, m.unsigned_abs() as usize, i);
    if m < 0 && m % 2 != 0 {
        -v
    } else {
        v
    }
}

#[inline]
pub(crate) fn dp_signed(grid: &GridSpec, l: usize, m: i64, i: usize) -> f64 {
    let v = grid.dp(l, m.unsigned_abs() as usize, i);
    if m < 0 && m % 2 != 0 {
        -v
    } else {
        v
    }
}

pub(crate) fn check_band(grid: &GridSpec, coeffs: &ShCoeffs) -> Result<()> {
    if coeffs.band_limit() > grid.band_limit() {
        return input(format!(
            "coefficient band limit {} exceeds grid band limit {}",
            coeffs.band_limit(),
            grid.band_limit()
        ));
    }
    Ok(())
}

/// Σ_ℓm c_ℓm t(ℓ,m,i) e^{imφ_j} at every node, row-major.
pub(crate) fn synthesize_with(
    grid: &GridSpec,
    coeffs: &ShCoeffs,
    t: impl Fn(usize, i64, usize) -> Complex64,
) -> Vec<Complex64> {
    let l_max = coeffs.band_limit().min(grid.band_limit());
    let (nt, np) = (grid.n_theta(), grid.n_phi());
    let width = 2 * l_max + 1;
    let mut out = vec![ZERO; nt * np];
    let mut ring = vec![ZERO; width];
    for i in 0..nt {
        for m in -(l_max as i64)..=l_max as i64 {
            let mut acc = ZERO;
            for l in m.unsigned_abs() as usize..=l_max {
                let c = coeffs.get(l, m);
                if c != ZERO {
                    acc += c * t(l, m, i);
                }
            }
            ring[(m + l_max as i64) as usize] = acc;
        }
        for j in 0..np {
            let mut acc = ZERO;
            for (k, r) in ring.iter().enumerate() {
                if *r != ZERO {
                    acc += r * grid.cis(k as i64 - l_max as i64, j);
                }
            }
            out[i * np + j] = acc;
        }
    }
    out
}

/// Real part of [`synthesize_with`].
pub(crate) fn synthesize_real_with(
    grid: &GridSpec,
    coeffs: &ShCoeffs,
    t: impl Fn(usize, i64, usize) -> Complex64,
) -> Vec<f64> {
    synthesize_with(grid, coeffs, t).into_iter().map(|z| z.re).collect()
}

/// Ring Fourier coefficients (2π/nφ) Σ_j f_ij e^{−imφ_j}, laid out as
/// `out[i * (2L+1) + m + L]`.
pub(crate) fn ring_fourier(grid: &GridSpec, samples: &[f64]) -> Vec<Complex64> {
    let l = grid.band_limit();
    let (nt, np) = (grid.n_theta(), grid.n_phi());
    let width = 2 * l + 1;
    let scale = 2.0 * std::f64::consts::PI / np as f64;
    let mut out = vec![ZERO; nt * width];
    for i in 0..nt {
        let row = &samples[i * np..(i + 1) * np];
        for m in 0..=l as i64 {
            let mut acc = ZERO;
            for (j, f) in row.iter().enumerate() {
                acc += grid.cis(m, j).conj() * *f;
            }
            acc *= scale;
            out[i * width + (m + l as i64) as usize] = acc;
            // real samples: negative frequencies are conjugates
            out[i * width + (l as i64 - m) as usize] = acc.conj();
        }
    }
    out
}

/// Projection Σ_i w_i conj(t(ℓ,m,i)) F̂_m(i) / norm(ℓ) for ℓ ≤ `l_max`.
pub(crate) fn project_with(
    grid: &GridSpec,
    fourier: &[Complex64],
    l_max: usize,
    real: bool,
    t: impl Fn(usize, i64, usize) -> Complex64,
    norm: impl Fn(usize) -> f64,
) -> ShCoeffs {
    let lg = grid.band_limit();
    let width = 2 * lg + 1;
    let mut out = ShCoeffs::zeros(l_max, real);
    for l in 0..=l_max {
        let nrm = norm(l);
        if nrm == 0.0 {
            continue;
        }
        let m_lo = if real { 0 } else { -(l as i64) };
        for m in m_lo..=l as i64 {
            let mut acc = ZERO;
            for i in 0..grid.n_theta() {
                acc += t(l, m, i).conj() * fourier[i * width + (m + lg as i64) as usize] * grid.weight(i);
            }
            out.set(l, m, acc / nrm);
        }
    }
    out
}

/// Scalar synthesis Σ c_ℓm Y_ℓm (real part).
pub fn synthesize(coeffs: &ShCoeffs, grid: &GridSpec) -> Result<Vec<f64>> {
    check_band(grid, coeffs)?;
    Ok(synthesize_real_with(grid, coeffs, |l, m, i| {
        Complex64::new(p_signed(grid, l, m, i), 0.0)
    }))
}

/// L² projection of real grid samples onto Y_ℓm, ℓ ≤ L.
pub fn analyze(samples: &[f64], grid: &GridSpec) -> Result<ShCoeffs> {
    if samples.len() != grid.len() {
        return input(format!(
            "sample count {} does not match grid {}x{}",
            samples.len(),
            grid.n_theta(),
            grid.n_phi()
        ));
    }
    let f = ring_fourier(grid, samples);
    Ok(project_with(
        grid,
        &f,
        grid.band_limit(),
        true,
        |l, m, i| Complex64::new(p_signed(grid, l, m, i), 0.0),
        |_| 1.0,
    ))
}
