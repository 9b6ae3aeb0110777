use num_complex::Complex64;

use crate::error::{input, Result};
use crate::sphere::ShCoeffs;

/// Per-mode normal-graph and conformal coefficients (v_ℓm, ξ_ℓm).
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSolution {
    pub v: ShCoeffs,
    pub xi: ShCoeffs,
}

/// Solves v + 2ξ = h, (ℓ+2)v − (ℓ−1)(ℓ+2)ξ = k for one mode.
pub fn solve_mode(l: usize, h: Complex64, k: Complex64) -> (Complex64, Complex64) {
    let lf = l as f64;
    let v = h * ((lf - 1.0) / (lf + 1.0)) + k * (2.0 / ((lf + 1.0) * (lf + 2.0)));
    let xi = h / (lf + 1.0) - k / ((lf + 1.0) * (lf + 2.0));
    (v, xi)
}

/// Left-hand sides (v + 2ξ, (ℓ+2)v − (ℓ−1)(ℓ+2)ξ) of the mode system.
pub fn apply_mode(l: usize, v: Complex64, xi: Complex64) -> (Complex64, Complex64) {
    let lf = l as f64;
    (v + xi * 2.0, v * (lf + 2.0) - xi * ((lf - 1.0) * (lf + 2.0)))
}

pub fn solve_modes(h: &ShCoeffs, k: &ShCoeffs) -> Result<ModeSolution> {
    if h.band_limit() != k.band_limit() {
        return input(format!(
            "band limits differ: h has {}, k has {}",
            h.band_limit(),
            k.band_limit()
        ));
    }
    let real = h.is_real() && k.is_real();
    let v = h.map_modes(real, |l, m, hc| solve_mode(l, hc, k.get(l, m)).0);
    let xi = h.map_modes(real, |l, m, hc| solve_mode(l, hc, k.get(l, m)).1);
    Ok(ModeSolution { v, xi })
}

/// Largest back-substitution residual relative to |h| + |k| over all modes.
pub fn back_substitution_residual(h: &ShCoeffs, k: &ShCoeffs, sol: &ModeSolution) -> f64 {
    let mut worst: f64 = 0.0;
    for (l, m, hc) in h.iter() {
        let kc = k.get(l, m);
        let (a, b) = apply_mode(l, sol.v.get(l, m), sol.xi.get(l, m));
        let scale = hc.norm() + kc.norm();
        let res = (a - hc).norm().max((b - kc).norm());
        if scale > 0.0 {
            worst = worst.max(res / scale);
        } else {
            worst = worst.max(res);
        }
    }
    worst
}
