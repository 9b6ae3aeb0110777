//! Riemann tensor and its first two covariant derivatives at a point, in
//! an orthonormal frame.

use crate::error::{Error, Result};
use crate::geometry::{christoffel, riemann_lower, riemann_mixed, Christoffel};
use crate::jet::Jet;

use super::metric::AmbientMetric;

pub type Tensor4 = [[[[f64; 3]; 3]; 3]; 3];
pub type Tensor5 = [Tensor4; 3];
pub type Tensor6 = [Tensor5; 3];

type Jet4 = [[[[Jet; 3]; 3]; 3]; 3];
type Jet5 = [Jet4; 3];

/// Curvature data at `point`, with frame components taken against the
/// orthonormal frame `frame` (columns are the frame vectors in coordinates).
///
/// Index order: `riemann[a][b][c][d] = ⟨R(e_a, e_b)e_c, e_d⟩`,
/// `nabla_riemann[e][a][b][c][d] = (∇_e R)_abcd` and
/// `nabla2_riemann[f][e][..] = (∇_f ∇_e R)_..`.
#[derive(Clone, Debug)]
pub struct CurvatureJet {
    pub point: [f64; 3],
    pub frame: [[f64; 3]; 3],
    pub riemann: Tensor4,
    pub nabla_riemann: Tensor5,
    pub nabla2_riemann: Tensor6,
    pub ricci: [[f64; 3]; 3],
    pub scalar: f64,
    pub laplacian_scalar: f64,
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
fn cholesky(g: [[f64; 3]; 3]) -> Result<[[f64; 3]; 3]> {
    let m = nalgebra::Matrix3::from_fn(|i, j| g[i][j]);
    let c = m
        .cholesky()
        .ok_or_else(|| Error::Input("metric is not positive definite at the base point".into()))?;
    let l = c.l();
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| l[(i, j)])))
}

/// Orthonormal frame E = L^{−T} for g = L Lᵀ, as columns.
pub(crate) fn orthonormal_frame(g: [[f64; 3]; 3]) -> Result<[[f64; 3]; 3]> {
    let l = cholesky(g)?;
    let lt = nalgebra::Matrix3::from_fn(|i, j| l[j][i]);
    let e = lt
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| e[(i, j)])))
}

fn covariant_derivative4(r: &Jet4, gamma: &Christoffel) -> Jet5 {
    let order = r[0][0][0][0].order() - 1;
    let gm = |f: usize, e: usize, a: usize| gamma[f][e][a].truncate(order);
    std::array::from_fn(|e| {
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                std::array::from_fn(|c| {
                    std::array::from_fn(|d| {
                        let mut s = r[a][b][c][d].diff(e);
                        for f in 0..3 {
                            s -= gm(f, e, a) * r[f][b][c][d].truncate(order);
                            s -= gm(f, e, b) * r[a][f][c][d].truncate(order);
                            s -= gm(f, e, c) * r[a][b][f][d].truncate(order);
                            s -= gm(f, e, d) * r[a][b][c][f].truncate(order);
                        }
                        s
                    })
                })
            })
        })
    })
}

fn covariant_derivative5(r: &Jet5, gamma: &Christoffel) -> Tensor6 {
    let gm = |f: usize, g: usize, a: usize| gamma[f][g][a].value();
    let v = |e: usize, a: usize, b: usize, c: usize, d: usize| r[e][a][b][c][d].value();
    std::array::from_fn(|g| {
        std::array::from_fn(|e| {
            std::array::from_fn(|a| {
                std::array::from_fn(|b| {
                    std::array::from_fn(|c| {
                        std::array::from_fn(|d| {
                            let mut s = r[e][a][b][c][d].d1(g);
                            for f in 0..3 {
                                s -= gm(f, g, e) * v(f, a, b, c, d);
                                s -= gm(f, g, a) * v(e, f, b, c, d);
                                s -= gm(f, g, b) * v(e, a, f, c, d);
                                s -= gm(f, g, c) * v(e, a, b, f, d);
                                s -= gm(f, g, d) * v(e, a, b, c, f);
                            }
                            s
                        })
                    })
                })
            })
        })
    })
}

/// Contracts every slot of a flattened rank-n tensor with the frame.
fn to_frame(data: &[f64], rank: usize, frame: &[[f64; 3]; 3]) -> Vec<f64> {
    let mut cur = data.to_vec();
    for slot in 0..rank {
        let stride = 3usize.pow((rank - 1 - slot) as u32);
        let mut next = vec![0.0; cur.len()];
        for (idx, out) in next.iter_mut().enumerate() {
            let i = (idx / stride) % 3;
            let base = idx - i * stride;
            *out = (0..3).map(|a| frame[a][i] * cur[base + a * stride]).sum();
        }
        cur = next;
    }
    cur
}

fn flatten4(t: &Tensor4) -> Vec<f64> {
    t.iter().flatten().flatten().flatten().copied().collect()
}

fn unflatten4(v: &[f64]) -> Tensor4 {
    std::array::from_fn(|a| std::array::from_fn(|b| std::array::from_fn(|c| std::array::from_fn(|d| v[((a * 3 + b) * 3 + c) * 3 + d]))))
}

fn unflatten5(v: &[f64]) -> Tensor5 {
    std::array::from_fn(|e| unflatten4(&v[e * 81..(e + 1) * 81]))
}

fn unflatten6(v: &[f64]) -> Tensor6 {
    std::array::from_fn(|f| unflatten5(&v[f * 243..(f + 1) * 243]))
}

/// Curvature jet in the Cholesky orthonormal frame at `p`.
pub fn curvature_jet(metric: &(impl AmbientMetric + ?Sized), p: [f64; 3]) -> Result<CurvatureJet> {
    curvature_jet_rotated(metric, p, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
}

/// As [`curvature_jet`], with the Cholesky frame rotated by the orthogonal
/// matrix `rotation` (new frame vector i = Σ_j E_j rotation[j][i]).
pub fn curvature_jet_rotated(
    metric: &(impl AmbientMetric + ?Sized),
    p: [f64; 3],
    rotation: [[f64; 3]; 3],
) -> Result<CurvatureJet> {
    metric.check_point(p)?;
    let g = metric.metric_jet(p, 4)?;
    let gv: [[f64; 3]; 3] = std::array::from_fn(|a| std::array::from_fn(|b| g[a][b].value()));
    let base = orthonormal_frame(gv)?;
    let frame: [[f64; 3]; 3] =
        std::array::from_fn(|a| std::array::from_fn(|i| (0..3).map(|j| base[a][j] * rotation[j][i]).sum()));

    let gamma = christoffel(&g);
    let rm = riemann_mixed(&gamma);
    let r = riemann_lower(&g.map(|row| row.map(|x| x.truncate(2))), &rm);
    let dr = covariant_derivative4(&r, &gamma);
    let ddr = covariant_derivative5(&dr, &gamma);

    let r0: Tensor4 = r.map(|x| x.map(|y| y.map(|z| z.map(|w| w.value()))));
    let dr0: Vec<f64> = dr.iter().flatten().flatten().flatten().flatten().map(|j| j.value()).collect();
    let ddr0: Vec<f64> = ddr.iter().flatten().flatten().flatten().flatten().flatten().copied().collect();

    let riemann = unflatten4(&to_frame(&flatten4(&r0), 4, &frame));
    let nabla_riemann = unflatten5(&to_frame(&dr0, 5, &frame));
    let nabla2_riemann = unflatten6(&to_frame(&ddr0, 6, &frame));

    let ricci: [[f64; 3]; 3] = std::array::from_fn(|b| std::array::from_fn(|c| (0..3).map(|a| riemann[a][b][c][a]).sum()));
    let scalar = (0..3).map(|b| ricci[b][b]).sum();
    let mut laplacian_scalar = 0.0;
    for f in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                laplacian_scalar += nabla2_riemann[f][f][a][b][b][a];
            }
        }
    }
    Ok(CurvatureJet {
        point: p,
        frame,
        riemann,
        nabla_riemann,
        nabla2_riemann,
        ricci,
        scalar,
        laplacian_scalar,
    })
}

impl CurvatureJet {
    /// |Riem|² = Σ R_abcd².
    pub fn riemann_norm_squared(&self) -> f64 {
        flatten4(&self.riemann).iter().map(|v| v * v).sum()
    }

    /// Largest violation of the algebraic Riemann symmetries and of the
    /// consistency between stored contractions and direct ones.
    pub fn symmetry_defect(&self) -> f64 {
        let r = &self.riemann;
        let mut worst = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        let v = r[a][b][c][d];
                        worst = worst
                            .max((v + r[b][a][c][d]).abs())
                            .max((v + r[a][b][d][c]).abs())
                            .max((v - r[c][d][a][b]).abs())
                            .max((v + r[b][c][a][d] + r[c][a][b][d]).abs());
                    }
                }
            }
        }
        let mut trace = 0.0;
        for b in 0..3 {
            for c in 0..3 {
                let direct: f64 = (0..3).map(|a| r[a][b][c][a]).sum();
                worst = worst.max((direct - self.ricci[b][c]).abs());
                worst = worst.max((self.ricci[b][c] - self.ricci[c][b]).abs());
            }
            trace += self.ricci[b][b];
        }
        worst.max((trace - self.scalar).abs())
    }

    fn contract4(t: &Tensor4, u: [[f64; 3]; 4]) -> f64 {
        let mut s = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        s += t[a][b][c][d] * u[0][a] * u[1][b] * u[2][c] * u[3][d];
                    }
                }
            }
        }
        s
    }

    /// R(x, n, y, n) for frame-component vectors.
    pub fn jacobi(&self, x: [f64; 3], y: [f64; 3], n: [f64; 3]) -> f64 {
        Self::contract4(&self.riemann, [x, n, y, n])
    }

    /// (∇_n R)(x, n, y, n).
    pub fn jacobi_d1(&self, x: [f64; 3], y: [f64; 3], n: [f64; 3]) -> f64 {
        (0..3).map(|e| n[e] * Self::contract4(&self.nabla_riemann[e], [x, n, y, n])).sum()
    }

    /// (∇_n ∇_n R)(x, n, y, n).
    pub fn jacobi_d2(&self, x: [f64; 3], y: [f64; 3], n: [f64; 3]) -> f64 {
        let mut s = 0.0;
        for f in 0..3 {
            for e in 0..3 {
                s += n[f] * n[e] * Self::contract4(&self.nabla2_riemann[f][e], [x, n, y, n]);
            }
        }
        s
    }

    /// Ric(n, n).
    pub fn ricci_nn(&self, n: [f64; 3]) -> f64 {
        let mut s = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                s += self.ricci[a][b] * n[a] * n[b];
            }
        }
        s
    }
}
