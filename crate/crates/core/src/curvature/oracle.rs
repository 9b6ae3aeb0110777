//! Geodesic spheres by direct integration of the exponential map.
//!
//! Along each radial geodesic s ↦ exp_p(s·n) the two Jacobi fields with
//! J(0) = 0, J'(0) = e_μ are integrated together with the geodesic by
//! Gragg–Bulirsch–Stoer extrapolation.
//! Then γ_μν = g(J_μ, J_ν) and H = −½γ^{μν}∂_tγ_μν, the sign fixed so
//! that round spheres in flat space have H = −2/t.

use rayon::prelude::*;

use crate::bartnik::BartnikData;
use crate::error::{input, Error, Result};
use crate::geometry::christoffel;
use crate::sphere::{GridSpec, SphereScalarField, SphereSymTensorField};

use super::metric::AmbientMetric;
use super::riemann::orthonormal_frame;

/// Target error of the rescaled quantities t⁻²γ and tH.
pub const ORACLE_TOLERANCE: f64 = 1e-12;
const MIN_LEVELS: usize = 3;
const MAX_LEVELS: usize = 14;

type State = [f64; 18];

/// Unrescaled geodesic-sphere data with the integrator's error estimate.
#[derive(Clone, Debug)]
pub struct OracleSphere {
    pub t: f64,
    pub gamma: SphereSymTensorField,
    pub mean_curvature: SphereScalarField,
    /// Largest estimated error of t⁻²γ or tH over all directions.
    pub error_estimate: f64,
    /// Grid node attaining `error_estimate`.
    pub worst_direction: (usize, usize),
}

impl OracleSphere {
    pub fn to_bartnik_data(&self) -> Result<BartnikData> {
        BartnikData::new(self.gamma.clone(), self.mean_curvature.clone())
    }

    /// (t⁻²γ, tH).
    pub fn rescaled(&self) -> Result<BartnikData> {
        BartnikData::new(self.gamma.scale(1.0 / (self.t * self.t)), self.mean_curvature.scale(self.t))
    }
}

fn rhs(metric: &(impl AmbientMetric + ?Sized), y: &State) -> Result<State> {
    let x = [y[0], y[1], y[2]];
    let g = metric.metric_jet(x, 2)?;
    let gamma = christoffel(&g);
    let v = &y[3..6];
    let mut out = [0.0; 18];
    out[..3].copy_from_slice(v);
    for c in 0..3 {
        let mut acc = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                acc -= gamma[c][a][b].value() * v[a] * v[b];
            }
        }
        out[3 + c] = acc;
    }
    for f in 0..2 {
        let j = &y[6 + 6 * f..9 + 6 * f];
        let k = &y[9 + 6 * f..12 + 6 * f];
        out[6 + 6 * f..9 + 6 * f].copy_from_slice(k);
        for c in 0..3 {
            let mut acc = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    let gab = &gamma[c][a][b];
                    let dj: f64 = (0..3).map(|e| gab.d1(e) * j[e]).sum();
                    acc -= dj * v[a] * v[b] + 2.0 * gab.value() * v[a] * k[b];
                }
            }
            out[9 + 6 * f + c] = acc;
        }
    }
    Ok(out)
}

/// Modified midpoint rule with `steps` substeps over [0, t].
fn midpoint(metric: &(impl AmbientMetric + ?Sized), y0: &State, t: f64, steps: usize) -> Result<State> {
    let h = t / steps as f64;
    let mut prev = *y0;
    let f0 = rhs(metric, y0)?;
    let mut cur: State = std::array::from_fn(|i| y0[i] + h * f0[i]);
    for _ in 1..steps {
        let f = rhs(metric, &cur)?;
        let next: State = std::array::from_fn(|i| prev[i] + 2.0 * h * f[i]);
        prev = cur;
        cur = next;
    }
    let f = rhs(metric, &cur)?;
    Ok(std::array::from_fn(|i| 0.5 * (cur[i] + prev[i] + h * f[i])))
}

/// (t⁻²γ11, t⁻²γ12, t⁻²γ22, tH) from the end state.
fn sphere_values(metric: &(impl AmbientMetric + ?Sized), y: &State, t: f64) -> Result<[f64; 4]> {
    let g = metric.metric_jet([y[0], y[1], y[2]], 1)?;
    let v = &y[3..6];
    let j = [&y[6..9], &y[12..15]];
    let k = [&y[9..12], &y[15..18]];
    let mut gam = [[0.0; 2]; 2];
    let mut dgam = [[0.0; 2]; 2];
    for mu in 0..2 {
        for nu in 0..2 {
            for a in 0..3 {
                for b in 0..3 {
                    let gab = &g[a][b];
                    let dg: f64 = (0..3).map(|e| gab.d1(e) * v[e]).sum();
                    gam[mu][nu] += gab.value() * j[mu][a] * j[nu][b];
                    dgam[mu][nu] += dg * j[mu][a] * j[nu][b]
                        + gab.value() * (k[mu][a] * j[nu][b] + j[mu][a] * k[nu][b]);
                }
            }
        }
    }
    let det = gam[0][0] * gam[1][1] - gam[0][1] * gam[1][0];
    if !(det > 0.0) {
        return Err(Error::Numerical("geodesic sphere degenerated (conjugate point?)".into()));
    }
    let inv = [[gam[1][1] / det, -gam[0][1] / det], [-gam[1][0] / det, gam[0][0] / det]];
    let mut tr = 0.0;
    for mu in 0..2 {
        for nu in 0..2 {
            tr += inv[mu][nu] * dgam[nu][mu];
        }
    }
    let t2 = t * t;
    Ok([gam[0][0] / t2, gam[0][1] / t2, gam[1][1] / t2, -0.5 * tr * t])
}

/// Gragg–Bulirsch–Stoer: midpoint results for n = 2, 4, 6, … substeps
/// extrapolated in h² until successive diagonal entries agree. Returns the
/// sphere values and the error estimate, or the last estimate on failure.
fn integrate_direction(
    metric: &(impl AmbientMetric + ?Sized),
    y0: &State,
    t: f64,
    tol: f64,
) -> std::result::Result<([f64; 4], f64), f64> {
    let mut table: Vec<Vec<State>> = Vec::new();
    let mut last: Option<[f64; 4]> = None;
    let mut err = f64::INFINITY;
    for k in 0..MAX_LEVELS {
        let n = 2 * (k + 1);
        let base = midpoint(metric, y0, t, n).map_err(|_| f64::INFINITY)?;
        let mut row = vec![base];
        for j in 1..=k {
            let ratio = (n as f64 / (2 * (k - j + 1)) as f64).powi(2);
            let (a, b) = (&row[j - 1], &table[k - 1][j - 1]);
            row.push(std::array::from_fn(|i| a[i] + (a[i] - b[i]) / (ratio - 1.0)));
        }
        let vals = sphere_values(metric, &row[k], t).map_err(|_| f64::INFINITY)?;
        if let Some(prev) = last {
            err = (0..4).map(|i| (vals[i] - prev[i]).abs()).fold(0.0, f64::max);
            if err <= tol && k >= MIN_LEVELS {
                return Ok((vals, err));
            }
        }
        last = Some(vals);
        table.push(row);
    }
    Err(err)
}

/// Data induced on the geodesic sphere of radius t about p. Directions and
/// the tangent frame come from `grid`, read in the Cholesky orthonormal
/// frame at p (the frame used by `curvature_jet`).
pub fn geodesic_sphere_oracle(
    metric: &(impl AmbientMetric + ?Sized),
    p: [f64; 3],
    t: f64,
    grid: &GridSpec,
) -> Result<OracleSphere> {
    if !(t > 0.0 && t.is_finite()) {
        return input(format!("radius must be positive, got {t}"));
    }
    let valid = metric.validity_radius(p);
    if t >= valid {
        return input(format!("radius {t} exceeds the validity radius {valid} at {p:?}"));
    }
    let gp = metric.metric_jet(p, 0)?;
    let frame = orthonormal_frame(std::array::from_fn(|a| std::array::from_fn(|b| gp[a][b].value())))?;
    let to_coords = |w: [f64; 3]| -> [f64; 3] { std::array::from_fn(|a| (0..3).map(|i| frame[a][i] * w[i]).sum()) };
    let nodes: Vec<(usize, usize)> = (0..grid.n_theta()).flat_map(|i| (0..grid.n_phi()).map(move |j| (i, j))).collect();
    let results: Vec<std::result::Result<([f64; 4], f64), f64>> = nodes
        .par_iter()
        .map(|&(i, j)| {
            let n = to_coords(grid.direction(i, j));
            let [e1, e2] = grid.frame(i, j).map(to_coords);
            let mut y0 = [0.0; 18];
            y0[..3].copy_from_slice(&p);
            y0[3..6].copy_from_slice(&n);
            y0[9..12].copy_from_slice(&e1);
            y0[15..18].copy_from_slice(&e2);
            integrate_direction(metric, &y0, t, ORACLE_TOLERANCE)
        })
        .collect();
    let mut vals = Vec::with_capacity(nodes.len());
    let mut worst = (0.0f64, (0, 0));
    for (node, r) in nodes.iter().zip(results) {
        match r {
            Ok((v, err)) => {
                if err > worst.0 {
                    worst = (err, *node);
                }
                vals.push(v);
            }
            Err(err) => {
                return Err(Error::Numerical(format!(
                    "geodesic integration did not reach tolerance {ORACLE_TOLERANCE:e} in direction {node:?} (error {err:.3e})"
                )))
            }
        }
    }
    let t2 = t * t;
    let gamma = SphereSymTensorField::new(
        grid,
        vals.iter().map(|v| v[0] * t2).collect(),
        vals.iter().map(|v| v[1] * t2).collect(),
        vals.iter().map(|v| v[2] * t2).collect(),
    )?;
    let h = SphereScalarField::from_samples(grid, vals.iter().map(|v| v[3] / t).collect())?;
    Ok(OracleSphere {
        t,
        gamma,
        mean_curvature: h,
        error_estimate: worst.0,
        worst_direction: worst.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::MetricPreset;

    #[test]
    fn euclidean_spheres() {
        let g = GridSpec::new(4).unwrap();
        let o = geodesic_sphere_oracle(&MetricPreset::Euclidean, [0.5, 0.0, 1.0], 0.7, &g).unwrap();
        for k in 0..g.len() {
            let [a, b, c] = o.gamma.at(k);
            assert!((a - 0.49).abs() < 1e-12 && b.abs() < 1e-12 && (c - 0.49).abs() < 1e-12);
            assert!((o.mean_curvature.samples()[k] + 2.0 / 0.7).abs() < 1e-9);
        }
    }

    #[test]
    fn three_sphere_mean_curvature() {
        let g = GridSpec::new(4).unwrap();
        let t: f64 = 0.2;
        let o = geodesic_sphere_oracle(&MetricPreset::ConstantCurvature { k: 1.0 }, [0.1, 0.0, 0.0], t, &g).unwrap();
        for k in 0..g.len() {
            assert!((o.mean_curvature.samples()[k] + 2.0 / t.tan()).abs() < 1e-9);
            assert!((o.gamma.at(k)[0] - t.sin().powi(2)).abs() < 1e-12);
        }
        assert!(o.error_estimate <= ORACLE_TOLERANCE);
    }

    #[test]
    fn refuses_radius_beyond_validity() {
        let g = GridSpec::new(4).unwrap();
        let m = MetricPreset::SchwarzschildIsotropic { m: 1.0 };
        assert!(matches!(geodesic_sphere_oracle(&m, [1.0, 0.0, 0.0], 0.6, &g), Err(Error::Input(_))));
    }
}
