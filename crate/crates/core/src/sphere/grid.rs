use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{input, Result};

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_and_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Index of (ℓ, m ≥ 0) in triangular storage.
#[inline]
pub(crate) fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Orthonormal associated Legendre values P̄ℓm(cos θ) (Condon–Shortley phase)
/// and their θ-derivatives, for all ℓ ≤ lmax, 0 ≤ m ≤ ℓ.
pub fn normalized_legendre(lmax: usize, cos_t: f64, sin_t: f64) -> (Vec<f64>, Vec<f64>) {
    let n = tri(lmax, lmax) + 1;
    let mut p = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let x = cos_t;
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            pmm *= -((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * sin_t;
        }
        p[tri(m, m)] = pmm;
        if m < lmax {
            p[tri(m + 1, m)] = ((2 * m + 3) as f64).sqrt() * x * pmm;
        }
        for l in m + 2..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[tri(l, m)] = a * (x * p[tri(l - 1, m)] - b * p[tri(l - 2, m)]);
        }
    }
    for l in 0..=lmax {
        for m in 0..=l {
            let (lf, mf) = (l as f64, m as f64);
            let lower = if l > m {
                ((2.0 * lf + 1.0) * (lf * lf - mf * mf) / (2.0 * lf - 1.0)).sqrt() * p[tri(l - 1, m)]
            } else {
                0.0
            };
            dp[tri(l, m)] = (lf * x * p[tri(l, m)] - lower) / sin_t;
        }
    }
    (p, dp)
}

pub(crate) struct Tables {
    pub cos_t: Vec<f64>,
    pub sin_t: Vec<f64>,
    pub weights: Vec<f64>,
    pub phi: Vec<f64>,
    /// `p[tri(l,m) * n_theta + i]`
    pub p: Vec<f64>,
    pub dp: Vec<f64>,
    /// `cis[m * n_phi + j] = exp(i m φ_j)` for 0 ≤ m ≤ L.
    pub cis: Vec<Complex64>,
}

/// Gauss–Legendre (in cos θ) × equispaced-φ product grid with cached
/// Legendre tables.
#[derive(Clone)]
pub struct GridSpec {
    band_limit: usize,
    n_theta: usize,
    n_phi: usize,
    pub(crate) t: Arc<Tables>,
}

impl std::fmt::Debug for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridSpec")
            .field("band_limit", &self.band_limit)
            .field("n_theta", &self.n_theta)
            .field("n_phi", &self.n_phi)
            .finish()
    }
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.band_limit == other.band_limit
            && self.n_theta == other.n_theta
            && self.n_phi == other.n_phi
            && (Arc::ptr_eq(&self.t, &other.t) || self.t.weights == other.t.weights)
    }
}

impl GridSpec {
    /// Minimal exact grid for band limit `l`.
    pub fn new(l: usize) -> Result<Self> {
        Self::with_sizes(l, l + 1, 2 * l + 1)
    }

    pub fn with_sizes(l: usize, n_theta: usize, n_phi: usize) -> Result<Self> {
        if l < 4 {
            return input(format!("band limit {l} below minimum 4"));
        }
        if n_theta < l + 1 || n_phi < 2 * l + 1 {
            return input(format!(
                "grid {n_theta}x{n_phi} too small for band limit {l} (need {}x{})",
                l + 1,
                2 * l + 1
            ));
        }
        let (x, w) = gauss_legendre(n_theta);
        let sin_t: Vec<f64> = x.iter().map(|c| (1.0 - c * c).sqrt()).collect();
        let nl = tri(l, l) + 1;
        let mut p = vec![0.0; nl * n_theta];
        let mut dp = vec![0.0; nl * n_theta];
        for i in 0..n_theta {
            let (pi, dpi) = normalized_legendre(l, x[i], sin_t[i]);
            for k in 0..nl {
                p[k * n_theta + i] = pi[k];
                dp[k * n_theta + i] = dpi[k];
            }
        }
        let phi: Vec<f64> = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
        let mut cis = Vec::with_capacity((l + 1) * n_phi);
        for m in 0..=l {
            for &ph in &phi {
                cis.push(Complex64::from_polar(1.0, m as f64 * ph));
            }
        }
        Ok(GridSpec {
            band_limit: l,
            n_theta,
            n_phi,
            t: Arc::new(Tables {
                cos_t: x,
                sin_t,
                weights: w,
                phi,
                p,
                dp,
                cis,
            }),
        })
    }

    /// Copy of this grid whose first quadrature weight is scaled by `factor`.
    /// Used only for fault-injection runs of the validation suite.
    pub fn with_corrupted_weights(&self, factor: f64) -> Self {
        let t = &self.t;
        let mut weights = t.weights.clone();
        weights[0] *= factor;
        GridSpec {
            t: Arc::new(Tables {
                cos_t: t.cos_t.clone(),
                sin_t: t.sin_t.clone(),
                weights,
                phi: t.phi.clone(),
                p: t.p.clone(),
                dp: t.dp.clone(),
                cis: t.cis.clone(),
            }),
            ..self.clone()
        }
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }
    pub fn n_phi(&self) -> usize {
        self.n_phi
    }
    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn theta(&self, i: usize) -> f64 {
        self.t.cos_t[i].acos()
    }
    pub fn cos_theta(&self, i: usize) -> f64 {
        self.t.cos_t[i]
    }
    pub fn sin_theta(&self, i: usize) -> f64 {
        self.t.sin_t[i]
    }
    pub fn phi(&self, j: usize) -> f64 {
        self.t.phi[j]
    }
    pub fn weight(&self, i: usize) -> f64 {
        self.t.weights[i]
    }

    /// Area weight of node (i, j) for the round measure.
    pub fn area_weight(&self, i: usize) -> f64 {
        self.t.weights[i] * 2.0 * PI / self.n_phi as f64
    }

    /// Unit vector of grid node (i, j).
    pub fn direction(&self, i: usize, j: usize) -> [f64; 3] {
        let (s, c) = (self.t.sin_t[i], self.t.cos_t[i]);
        let (sp, cp) = self.t.phi[j].sin_cos();
        [s * cp, s * sp, c]
    }

    /// Orthonormal frame (e_θ, e_φ) at node (i, j), as Cartesian vectors.
    pub fn frame(&self, i: usize, j: usize) -> [[f64; 3]; 2] {
        let (s, c) = (self.t.sin_t[i], self.t.cos_t[i]);
        let (sp, cp) = self.t.phi[j].sin_cos();
        [[c * cp, c * sp, -s], [-sp, cp, 0.0]]
    }

    #[inline]
    pub(crate) fn p(&self, l: usize, m: usize, i: usize) -> f64 {
        self.t.p[tri(l, m) * self.n_theta + i]
    }

    #[inline]
    pub(crate) fn dp(&self, l: usize, m: usize, i: usize) -> f64 {
        self.t.dp[tri(l, m) * self.n_theta + i]
    }

    /// exp(i m φ_j) for any signed m with |m| ≤ L.
    #[inline]
    pub(crate) fn cis(&self, m: i64, j: usize) -> Complex64 {
        let c = self.t.cis[m.unsigned_abs() as usize * self.n_phi + j];
        if m < 0 {
            c.conj()
        } else {
            c
        }
    }

    /// Quadrature sum of grid samples against the round measure.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        let mut total = 0.0;
        for i in 0..self.n_theta {
            let row: f64 = samples[i * self.n_phi..(i + 1) * self.n_phi].iter().sum();
            total += self.area_weight(i) * row;
        }
        total
    }

    /// Evaluates `f(direction)` at every node, row-major in (θ, φ).
    pub fn sample(&self, mut f: impl FnMut([f64; 3]) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n_theta {
            for j in 0..self.n_phi {
                out.push(f(self.direction(i, j)));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // exact through degree 13
        let i12: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((i12 - 2.0 / 13.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn legendre_matches_closed_forms() {
        let th = 0.7f64;
        let (c, s) = (th.cos(), th.sin());
        let (p, dp) = normalized_legendre(3, c, s);
        let y10 = (3.0 / (4.0 * PI)).sqrt() * c;
        assert!((p[tri(1, 0)] - y10).abs() < 1e-15);
        let y11 = -(3.0 / (8.0 * PI)).sqrt() * s;
        assert!((p[tri(1, 1)] - y11).abs() < 1e-15);
        let y20 = (5.0 / (16.0 * PI)).sqrt() * (3.0 * c * c - 1.0);
        assert!((p[tri(2, 0)] - y20).abs() < 1e-15);
        let dy20 = (5.0 / (16.0 * PI)).sqrt() * (-6.0 * c * s);
        assert!((dp[tri(2, 0)] - dy20).abs() < 1e-14);
        let y32 = 0.25 * (105.0 / (2.0 * PI)).sqrt() * s * s * c;
        assert!((p[tri(3, 2)] - y32).abs() < 1e-14);
    }

    #[test]
    fn legendre_derivative_matches_finite_difference() {
        let h = 1e-5;
        let th = 1.1f64;
        let (_, dp) = normalized_legendre(12, th.cos(), th.sin());
        let (pp, _) = normalized_legendre(12, (th + h).cos(), (th + h).sin());
        let (pm, _) = normalized_legendre(12, (th - h).cos(), (th - h).sin());
        for k in 0..dp.len() {
            let fd = (pp[k] - pm[k]) / (2.0 * h);
            assert!((fd - dp[k]).abs() < 1e-7, "k={k}");
        }
    }

    #[test]
    fn area_is_four_pi() {
        let g = GridSpec::new(8).unwrap();
        let ones = vec![1.0; g.len()];
        assert!((g.integrate(&ones) - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn rejects_small_grids() {
        assert!(GridSpec::new(3).is_err());
        assert!(GridSpec::with_sizes(8, 8, 17).is_err());
        assert!(GridSpec::with_sizes(8, 9, 16).is_err());
    }
}
