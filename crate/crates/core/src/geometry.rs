//! Coordinate curvature of a Riemannian 3-metric given as a matrix of jets.
//!
//! Conventions: R(∂a,∂b)∂c = ∇a∇b∂c − ∇b∇a∂c = Rm[a][b][c][f] ∂f,
//! R_abcd = ⟨R(∂a,∂b)∂c, ∂d⟩ and Ric_bc = Σ_a Rm[a][b][c][a], so the round
//! 3-sphere has Ric = 2g.

use crate::jet::{invert3, Jet, JetMatrix};

pub type Christoffel = [[[Jet; 3]; 3]; 3];
pub type Rank4 = [[[[Jet; 3]; 3]; 3]; 3];

/// Γ[c][a][b] = Γ^c_ab, one order below the metric.
pub fn christoffel(g: &JetMatrix) -> Christoffel {
    let order = g[0][0].order();
    assert!(order >= 1, "Christoffel symbols need a first-order metric jet");
    let (ginv, _) = invert3(g);
    let dg: [[[Jet; 3]; 3]; 3] = std::array::from_fn(|e| std::array::from_fn(|a| std::array::from_fn(|b| g[a][b].diff(e))));
    // lowered Γ_dab = ½(∂a g_bd + ∂b g_ad − ∂d g_ab)
    let low: [[[Jet; 3]; 3]; 3] = std::array::from_fn(|d| {
        std::array::from_fn(|a| std::array::from_fn(|b| (dg[a][b][d] + dg[b][a][d] - dg[d][a][b]).scale(0.5)))
    });
    std::array::from_fn(|c| {
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let mut s = Jet::zero(order - 1);
                for (d, ld) in low.iter().enumerate() {
                    s += ginv[c][d].truncate(order - 1) * ld[a][b];
                }
                s
            })
        })
    })
}

/// Rm[a][b][c][f] with R(∂a,∂b)∂c = Rm[a][b][c][f] ∂f, two orders below the metric.
pub fn riemann_mixed(gamma: &Christoffel) -> Rank4 {
    let order = gamma[0][0][0].order();
    assert!(order >= 1, "curvature needs a second-order metric jet");
    let lo = order - 1;
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| {
                std::array::from_fn(|f| {
                    let mut s = gamma[f][b][c].diff(a) - gamma[f][a][c].diff(b);
                    for e in 0..3 {
                        s += gamma[e][b][c].truncate(lo) * gamma[f][a][e].truncate(lo);
                        s -= gamma[e][a][c].truncate(lo) * gamma[f][b][e].truncate(lo);
                    }
                    s
                })
            })
        })
    })
}

/// Fully covariant R_abcd = g_df Rm[a][b][c][f].
pub fn riemann_lower(g: &JetMatrix, rm: &Rank4) -> Rank4 {
    let order = rm[0][0][0][0].order();
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| {
                std::array::from_fn(|d| {
                    let mut s = Jet::zero(order);
                    for f in 0..3 {
                        s += g[d][f].truncate(order) * rm[a][b][c][f];
                    }
                    s
                })
            })
        })
    })
}

pub fn ricci_from_mixed(rm: &Rank4) -> JetMatrix {
    let order = rm[0][0][0][0].order();
    std::array::from_fn(|b| {
        std::array::from_fn(|c| {
            let mut s = Jet::zero(order);
            for (a, rma) in rm.iter().enumerate() {
                s += rma[b][c][a];
            }
            s
        })
    })
}

/// Ricci tensor of g, two orders below the metric.
pub fn ricci(g: &JetMatrix) -> JetMatrix {
    ricci_from_mixed(&riemann_mixed(&christoffel(g)))
}

/// Covariant Hessian ∂a∂bΦ − Γ^c_ab ∂cΦ at the lowest common order.
pub fn hessian(phi: &Jet, gamma: &Christoffel) -> JetMatrix {
    let order = (phi.order() - 2).min(gamma[0][0][0].order());
    let d: [Jet; 3] = std::array::from_fn(|c| phi.diff(c).truncate(order));
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let mut s = phi.diff(a).diff(b).truncate(order);
            for (c, dc) in d.iter().enumerate() {
                s -= gamma[c][a][b].truncate(order) * *dc;
            }
            s
        })
    })
}

/// Plain value of a jet matrix.
pub fn values(m: &JetMatrix) -> [[f64; 3]; 3] {
    std::array::from_fn(|a| std::array::from_fn(|b| m[a][b].value()))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Round 3-sphere of curvature K in conformally flat form δ/(1+K|x|²/4)².
    fn sphere_metric(x: [f64; 3], k: f64, order: usize) -> JetMatrix {
        let p = Jet::point(x, order);
        let r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        let conf = (r2 * (0.25 * k) + 1.0).powi(-2);
        std::array::from_fn(|a| std::array::from_fn(|b| if a == b { conf } else { Jet::zero(order) }))
    }

    #[test]
    fn constant_curvature_ricci() {
        let x = [0.3, -0.2, 0.5];
        let g = sphere_metric(x, 1.0, 2);
        let ric = ricci(&g);
        let gv = values(&g);
        for a in 0..3 {
            for b in 0..3 {
                assert!((ric[a][b].value() - 2.0 * gv[a][b]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn riemann_lowered_matches_constant_curvature_form() {
        let x = [0.1, 0.4, -0.3];
        let k = 0.7;
        let g = sphere_metric(x, k, 2);
        let r = riemann_lower(&g, &riemann_mixed(&christoffel(&g)));
        let gv = values(&g);
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        // ⟨R(X,Y)Z,W⟩ = K(⟨Y,Z⟩⟨X,W⟩ − ⟨X,Z⟩⟨Y,W⟩)
                        let expected = k * (gv[b][c] * gv[a][d] - gv[a][c] * gv[b][d]);
                        assert!((r[a][b][c][d].value() - expected).abs() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn flat_hessian_is_second_derivative() {
        let order = 2;
        let p = Jet::point([1.0, 2.0, 0.5], order + 1);
        let phi = p[0] * p[0] * p[1] + p[2];
        let g: JetMatrix = std::array::from_fn(|a| {
            std::array::from_fn(|b| Jet::constant(if a == b { 1.0 } else { 0.0 }, order + 1))
        });
        let h = hessian(&phi, &christoffel(&g));
        assert!((h[0][0].value() - 4.0).abs() < 1e-14);
        assert!((h[0][1].value() - 2.0).abs() < 1e-14);
        assert!(h[2][2].value().abs() < 1e-14);
    }
}
