//! Mass of small geodesic spheres and the limits m/r³ → R/12, m/r⁵ → ΔR/120.
//!
//! By the scaling law m[λ²g] = λ·m[g], the sphere of radius r is measured
//! in the metric r⁻²g, where its data (r⁻²γ, rH) is close to round, and the
//! first-order mass of that data is multiplied by r.

use crate::bartnik::BartnikData;
use crate::error::{input, Result};
use crate::sphere::GridSpec;

use super::expansion::expansion_boundary_data;
use super::metric::AmbientMetric;
use super::oracle::geodesic_sphere_oracle;
use super::riemann::curvature_jet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SphereMode {
    /// Truncated Taylor series in r from the curvature jet at p.
    Series,
    /// Direct integration of the exponential map.
    Oracle,
}

/// Rescaled data (r⁻²γ, rH) of the geodesic sphere of radius r about p.
pub fn rescaled_sphere_data(
    metric: &(impl AmbientMetric + ?Sized),
    p: [f64; 3],
    r: f64,
    mode: SphereMode,
    grid: &GridSpec,
) -> Result<BartnikData> {
    let valid = metric.validity_radius(p);
    if !(r > 0.0 && r < valid) {
        return input(format!("radius {r} outside (0, {valid}) at {p:?}"));
    }
    match mode {
        SphereMode::Series => expansion_boundary_data(&curvature_jet(metric, p)?, r, grid)?.rescaled(),
        SphereMode::Oracle => geodesic_sphere_oracle(metric, p, r, grid)?.rescaled(),
    }
}

/// r · first_order_mass(r⁻²γ, rH).
pub fn small_sphere_mass(
    metric: &(impl AmbientMetric + ?Sized),
    p: [f64; 3],
    r: f64,
    mode: SphereMode,
    grid: &GridSpec,
) -> Result<f64> {
    Ok(r * rescaled_sphere_data(metric, p, r, mode, grid)?.first_order_mass())
}

/// Closed form of [`small_sphere_mass`] for the unit round 3-sphere, from
/// γ = sin²r·(round) and H = −2cot r.
pub fn three_sphere_mass(r: f64) -> f64 {
    0.25 * r * (6.0 - 4.0 * r / r.tan() - 2.0 * (r.sin() / r).powi(2))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitFit {
    /// Extrapolated lim_{r→0} mass/r^power.
    pub coefficient: f64,
    /// |highest-order − next-order| extrapolation.
    pub error: f64,
    /// mass/r^power at each radius.
    pub ratios: Vec<f64>,
    /// Set when the ratios do not approach their limit monotonically.
    pub non_monotone: bool,
}

/// Neville extrapolation to r = 0 of mass/r^power, treating the ratio as a
/// polynomial in r through all given points.
pub fn limit_fit(pairs: &[(f64, f64)], power: i32) -> Result<LimitFit> {
    if power != 3 && power != 5 {
        return input(format!("power must be 3 or 5, got {power}"));
    }
    if pairs.len() < 3 {
        return input(format!("need at least 3 radii, got {}", pairs.len()));
    }
    if pairs.windows(2).any(|w| !(w[1].0 < w[0].0)) || pairs.iter().any(|p| !(p.0 > 0.0)) {
        return input("radii must be positive and strictly decreasing");
    }
    let r: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ratios: Vec<f64> = pairs.iter().map(|p| p.1 / p.0.powi(power)).collect();
    // Neville tableau evaluated at 0; column k uses k+1 consecutive points.
    let n = r.len();
    let mut col = ratios.clone();
    let mut previous_best = col[n - 1];
    for k in 1..n {
        let next: Vec<f64> = (0..n - k)
            .map(|i| (r[i] * col[i + 1] - r[i + k] * col[i]) / (r[i] - r[i + k]))
            .collect();
        if k < n - 1 {
            // extrapolation through the n−1 smallest radii
            previous_best = next[next.len() - 1];
        }
        col = next;
    }
    let coefficient = col[0];
    let diffs: Vec<f64> = ratios.windows(2).map(|w| w[1] - w[0]).collect();
    let non_monotone = diffs.windows(2).any(|d| d[0] * d[1] < 0.0);
    Ok(LimitFit {
        coefficient,
        error: (coefficient - previous_best).abs(),
        ratios,
        non_monotone,
    })
}
