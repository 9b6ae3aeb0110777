//! Nonlinear residuals of the linearized extension: the static vacuum
//! equations at g = δ + η, Φ = 1 + u, the boundary operators against the
//! data, and the convexity of r² that rules out closed minimal surfaces.

use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::bartnik::BartnikData;
use crate::error::{input, Result};
use crate::geometry::{christoffel, hessian, ricci_from_mixed, riemann_mixed};
use crate::jet::{invert3, Jet, JetMatrix};

use super::field::LinearizedExtension;

/// How second derivatives of the metric are obtained for the static residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurvatureMethod {
    /// Fourth-order central differences of the exactly evaluated η with one
    /// Richardson refinement (steps h and h/2).
    FiniteDifference { step: f64 },
    /// Exact jets of η.
    Analytic,
}

pub const DEFAULT_FD_STEP: f64 = 1e-3;

impl Default for CurvatureMethod {
    fn default() -> Self {
        CurvatureMethod::FiniteDifference { step: DEFAULT_FD_STEP }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualStats {
    /// sup |Hess_g Φ − Φ Ric[g]| over samples and components
    pub hessian_sup: f64,
    pub hessian_rms: f64,
    /// sup |Δ_g Φ|
    pub laplacian_sup: f64,
    pub laplacian_rms: f64,
    /// estimated finite-difference roundoff level (0 for analytic jets)
    pub noise_floor: f64,
    pub warning: Option<String>,
}

impl ResidualStats {
    pub fn sup(&self) -> f64 {
        self.hessian_sup.max(self.laplacian_sup)
    }
}

/// Directions on a Fibonacci lattice, deterministic.
pub fn fibonacci_directions(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let s = (1.0 - z * z).sqrt();
            let t = golden * k as f64;
            [s * t.cos(), s * t.sin(), z]
        })
        .collect()
}

/// Sample set: the given radii times `n_dirs` Fibonacci directions.
pub fn sample_points(radii: &[f64], n_dirs: usize) -> Vec<[f64; 3]> {
    let dirs = fibonacci_directions(n_dirs);
    radii
        .iter()
        .flat_map(|&r| dirs.iter().map(move |d| [r * d[0], r * d[1], r * d[2]]))
        .collect()
}

/// Default static-residual sample radii, covering the boundary, the bump
/// transition and the conformally flat far region.
pub const STATIC_SAMPLE_RADII: [f64; 9] = [1.0, 1.5, 2.0, 2.25, 2.5, 2.75, 3.0, 4.0, 6.0];

fn eta_values(ext: &LinearizedExtension, p: [f64; 3]) -> [[f64; 3]; 3] {
    let e = ext.eta_jet(p, 0);
    std::array::from_fn(|a| std::array::from_fn(|b| e[a][b].value()))
}

type Sym = [[f64; 3]; 3];

fn shifted(p: [f64; 3], k: usize, s: f64, l: usize, t: f64) -> [f64; 3] {
    let mut q = p;
    q[k] += s;
    q[l] += t;
    q
}

/// Fourth-order central gradient and Hessian of η at step h.
fn fd_derivatives(ext: &LinearizedExtension, p: [f64; 3], h: f64) -> ([Sym; 3], [[Sym; 3]; 3]) {
    const OFF: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];
    const C1: [f64; 4] = [1.0, -8.0, 8.0, -1.0];
    const C2: [f64; 4] = [-1.0, 16.0, 16.0, -1.0];
    let center = eta_values(ext, p);
    let mut grad = [[[0.0; 3]; 3]; 3];
    let mut hess = [[[[0.0; 3]; 3]; 3]; 3];
    for k in 0..3 {
        let vals: Vec<Sym> = OFF.iter().map(|&s| eta_values(ext, shifted(p, k, s * h, k, 0.0))).collect();
        for a in 0..3 {
            for b in 0..3 {
                let mut d1 = 0.0;
                let mut d2 = -30.0 * center[a][b];
                for n in 0..4 {
                    d1 += C1[n] * vals[n][a][b];
                    d2 += C2[n] * vals[n][a][b];
                }
                grad[k][a][b] = d1 / (12.0 * h);
                hess[k][k][a][b] = d2 / (12.0 * h * h);
            }
        }
        for l in k + 1..3 {
            let mut acc = [[0.0; 3]; 3];
            for (n, &s) in OFF.iter().enumerate() {
                for (m, &t) in OFF.iter().enumerate() {
                    let v = eta_values(ext, shifted(p, k, s * h, l, t * h));
                    let w = C1[n] * C1[m];
                    for a in 0..3 {
                        for b in 0..3 {
                            acc[a][b] += w * v[a][b];
                        }
                    }
                }
            }
            for a in 0..3 {
                for b in 0..3 {
                    let d = acc[a][b] / (144.0 * h * h);
                    hess[k][l][a][b] = d;
                    hess[l][k][a][b] = d;
                }
            }
        }
    }
    (grad, hess)
}

/// Metric jet δ + η of order 2 assembled from Richardson-refined differences.
fn fd_metric_jet(ext: &LinearizedExtension, p: [f64; 3], h: f64) -> JetMatrix {
    let (g1, h1) = fd_derivatives(ext, p, h);
    let (g2, h2) = fd_derivatives(ext, p, 0.5 * h);
    let eta = eta_values(ext, p);
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let grad = std::array::from_fn(|k| (16.0 * g2[k][a][b] - g1[k][a][b]) / 15.0);
            let hess = std::array::from_fn(|k| std::array::from_fn(|l| (16.0 * h2[k][l][a][b] - h1[k][l][a][b]) / 15.0));
            let delta = if a == b { 1.0 } else { 0.0 };
            Jet::from_derivatives(delta + eta[a][b], grad, hess, 2)
        })
    })
}

/// (Hess_g Φ − Φ Ric[g], Δ_g Φ) at one point.
pub fn static_operator(g: &JetMatrix, phi: &Jet) -> ([[f64; 3]; 3], f64) {
    let gamma = christoffel(g);
    let ric = ricci_from_mixed(&riemann_mixed(&gamma));
    let hess = hessian(phi, &gamma);
    let (ginv, _) = invert3(g);
    let phi0 = phi.value();
    let mut s1 = [[0.0; 3]; 3];
    let mut lap = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            s1[a][b] = hess[a][b].value() - phi0 * ric[a][b].value();
            lap += ginv[a][b].value() * hess[a][b].value();
        }
    }
    (s1, lap)
}

/// Static vacuum residual sup/RMS over `points` (all with |x| ≥ 1).
pub fn static_residual(ext: &LinearizedExtension, points: &[[f64; 3]], method: CurvatureMethod) -> Result<ResidualStats> {
    if points.is_empty() {
        return input("static residual needs at least one sample point");
    }
    for p in points {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        if !(r >= 1.0 - 1e-12) {
            return input(format!("sample point at radius {r} lies inside the boundary"));
        }
    }
    let per_point: Vec<([[f64; 3]; 3], f64, f64)> = points
        .par_iter()
        .map(|&p| {
            let g = match method {
                CurvatureMethod::Analytic => ext.metric_jet(p, 2),
                CurvatureMethod::FiniteDifference { step } => fd_metric_jet(ext, p, step),
            };
            let phi = ext.u_jet(&Jet::point(p, 2)) + 1.0;
            let eta_max = g
                .iter()
                .enumerate()
                .flat_map(|(a, row)| row.iter().enumerate().map(move |(b, j)| (j.value() - if a == b { 1.0 } else { 0.0 }).abs()))
                .fold(0.0, f64::max);
            let (s1, s2) = static_operator(&g, &phi);
            (s1, s2, eta_max)
        })
        .collect();
    let n = per_point.len() as f64;
    let (mut hs, mut hr, mut ls, mut lr, mut eta_max) = (0.0f64, 0.0, 0.0f64, 0.0, 0.0f64);
    for (s1, s2, e) in &per_point {
        for row in s1 {
            for v in row {
                hs = hs.max(v.abs());
                hr += v * v / 9.0;
            }
        }
        ls = ls.max(s2.abs());
        lr += s2 * s2;
        eta_max = eta_max.max(*e);
    }
    let (noise_floor, warning) = match method {
        CurvatureMethod::Analytic => (0.0, None),
        CurvatureMethod::FiniteDifference { step } => {
            // cancellation in the second-difference stencils, weights summing to ~64/12
            let floor = 6.0 * f64::EPSILON * eta_max.max(f64::MIN_POSITIVE) / (step * step);
            let warning = (step < 1e-5 || !(step.is_finite()))
                .then(|| format!("finite-difference step {step:e} is near the roundoff regime; noise floor ≈ {floor:.1e}"));
            (floor, warning)
        }
    };
    Ok(ResidualStats {
        hessian_sup: hs,
        hessian_rms: (hr / n).sqrt(),
        laplacian_sup: ls,
        laplacian_rms: (lr / n).sqrt(),
        noise_floor,
        warning,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryResidual {
    /// sup over nodes of |ι*(δ+η) − γ| (frame components)
    pub metric_sup: f64,
    /// sup over nodes of |H[δ+η] − H|
    pub mean_curvature_sup: f64,
}

impl BoundaryResidual {
    pub fn sup(&self) -> f64 {
        self.metric_sup.max(self.mean_curvature_sup)
    }
}

/// Induced metric (orthonormal round frame) and mean curvature of |x| = 1 in
/// δ + η at grid node (i, j). The unit normal is the g-dual of −dr, normalized.
pub fn boundary_geometry(ext: &LinearizedExtension, i: usize, j: usize) -> Result<([f64; 3], f64)> {
    let grid = ext.grid();
    let x = grid.direction(i, j);
    let [e1, e2] = grid.frame(i, j);
    let g = ext.metric_jet(x, 1);
    let gv = |a: &[f64; 3], b: &[f64; 3]| {
        let mut s = 0.0;
        for p in 0..3 {
            for q in 0..3 {
                s += a[p] * g[p][q].value() * b[q];
            }
        }
        s
    };
    let induced = [gv(&e1, &e1), gv(&e1, &e2), gv(&e2, &e2)];
    if !(induced[0] > 0.0 && induced[0] * induced[2] - induced[1] * induced[1] > 0.0) {
        return input(format!("induced metric degenerate at node ({i}, {j})"));
    }
    let p = Jet::point(x, 2);
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let dr: [Jet; 3] = std::array::from_fn(|b| r.diff(b));
    let (ginv, det) = invert3(&g);
    let raised: [Jet; 3] = std::array::from_fn(|a| {
        let mut s = Jet::zero(1);
        for b in 0..3 {
            s += ginv[a][b] * dr[b];
        }
        s
    });
    let mut norm2 = Jet::zero(1);
    for a in 0..3 {
        norm2 += raised[a] * dr[a];
    }
    let inv_norm = norm2.sqrt().recip();
    let mut h = 0.0;
    for a in 0..3 {
        let n_a = -(raised[a] * inv_norm);
        h += n_a.d1(a) + n_a.value() * 0.5 * det.d1(a) / det.value();
    }
    Ok((induced, h))
}

pub fn boundary_residual(ext: &LinearizedExtension, data: &BartnikData) -> Result<BoundaryResidual> {
    let grid = ext.grid();
    if grid != data.grid() {
        return input("extension and data use different grids");
    }
    let np = grid.n_phi();
    let nodes: Vec<(usize, usize)> = (0..grid.n_theta()).flat_map(|i| (0..np).map(move |j| (i, j))).collect();
    let vals = nodes
        .par_iter()
        .map(|&(i, j)| boundary_geometry(ext, i, j))
        .collect::<Result<Vec<_>>>()?;
    let hs = data.mean_curvature().samples();
    let mut out = BoundaryResidual {
        metric_sup: 0.0,
        mean_curvature_sup: 0.0,
    };
    for (k, (induced, h)) in vals.iter().enumerate() {
        let target = data.gamma().at(k);
        for c in 0..3 {
            out.metric_sup = out.metric_sup.max((induced[c] - target[c]).abs());
        }
        out.mean_curvature_sup = out.mean_curvature_sup.max((h - hs[k]).abs());
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvexityReport {
    pub convex: bool,
    /// smallest eigenvalue of Hess_g(r²) relative to g over the samples
    pub margin: f64,
}

/// Smallest generalized eigenvalue of Hess_g(|x|²) with respect to g at `x`.
pub fn r2_hessian_min_eigenvalue(ext: &LinearizedExtension, x: [f64; 3]) -> f64 {
    let g = ext.metric_jet(x, 1);
    let gamma = christoffel(&g);
    let mut hm = Matrix3::zeros();
    let mut gm = Matrix3::zeros();
    for a in 0..3 {
        for b in 0..3 {
            let mut v = if a == b { 2.0 } else { 0.0 };
            for c in 0..3 {
                v -= 2.0 * gamma[c][a][b].value() * x[c];
            }
            hm[(a, b)] = v;
            gm[(a, b)] = g[a][b].value();
        }
    }
    let Some(chol) = gm.cholesky() else {
        return f64::NEG_INFINITY;
    };
    let linv = chol.l().try_inverse().expect("Cholesky factor is invertible");
    let m = linv * hm * linv.transpose();
    let m = (m + m.transpose()) * 0.5;
    m.symmetric_eigenvalues().min()
}

/// Default convexity samples: radii 1..4 times 64 directions.
pub fn convexity_points() -> Vec<[f64; 3]> {
    sample_points(&[1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0, 4.0], 64)
}

pub fn convexity_check(ext: &LinearizedExtension, points: &[[f64; 3]]) -> ConvexityReport {
    let margin = points
        .par_iter()
        .map(|&x| r2_hessian_min_eigenvalue(ext, x))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    ConvexityReport {
        convex: margin > 0.0,
        margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bartnik::random_data;
    use crate::sphere::GridSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_data_residuals_vanish() {
        let g = GridSpec::new(6).unwrap();
        let d = BartnikData::round(&g);
        let ext = LinearizedExtension::build(&d, 1.0).unwrap();
        let pts = sample_points(&[1.0, 2.5], 6);
        let s = static_residual(&ext, &pts, CurvatureMethod::default()).unwrap();
        assert!(s.sup() < 1e-9);
        let b = boundary_residual(&ext, &d).unwrap();
        assert!(b.sup() < 1e-14);
        let c = convexity_check(&ext, &pts);
        assert!((c.margin - 2.0).abs() < 1e-14 && c.convex);
    }

    #[test]
    fn finite_differences_agree_with_jets() {
        let g = GridSpec::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let d = random_data(&g, 1e-1, 3, &mut rng).unwrap();
        let ext = LinearizedExtension::build(&d, 1.0).unwrap();
        for p in sample_points(&[1.2, 2.4, 2.8], 4) {
            let a = ext.metric_jet(p, 2);
            let f = fd_metric_jet(&ext, p, DEFAULT_FD_STEP);
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        assert!((a[i][j].d1(k) - f[i][j].d1(k)).abs() < 1e-9);
                        for l in 0..3 {
                            assert!((a[i][j].d2(k, l) - f[i][j].d2(k, l)).abs() < 1e-7);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn linear_static_identity() {
        // Ṙic[η] = D²u for the linear extension: the residual is second order.
        let g = GridSpec::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let d1 = random_data(&g, 1e-2, 3, &mut rng).unwrap();
        let (o, k) = d1.deviation();
        let d2 = BartnikData::from_deviation(&o.scale(0.1), &k.scale(0.1)).unwrap();
        let pts = sample_points(&[1.0, 2.5], 8);
        let r1 = static_residual(&LinearizedExtension::build(&d1, 1.0).unwrap(), &pts, CurvatureMethod::Analytic).unwrap();
        let r2 = static_residual(&LinearizedExtension::build(&d2, 1.0).unwrap(), &pts, CurvatureMethod::Analytic).unwrap();
        let ratio = r1.sup() / r2.sup();
        assert!((ratio - 100.0).abs() < 10.0, "ratio {ratio}");
    }

    #[test]
    fn step_warning() {
        let g = GridSpec::new(6).unwrap();
        let ext = LinearizedExtension::build(&BartnikData::round(&g), 1.0).unwrap();
        let s = static_residual(&ext, &[[1.5, 0.0, 0.0]], CurvatureMethod::FiniteDifference { step: 1e-7 }).unwrap();
        assert!(s.warning.is_some());
        assert!(static_residual(&ext, &[[0.5, 0.0, 0.0]], CurvatureMethod::Analytic).is_err());
    }
}
