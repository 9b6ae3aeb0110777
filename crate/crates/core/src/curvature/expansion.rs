//! Truncated Taylor series in the radius t of the data induced on geodesic
//! spheres about a point, with all curvature evaluated at the centre.
//!
//! With M_μν = R(e_μ, n, e_ν, n), M' = ∇_n M, M'' = ∇_n∇_n M and (MM)_μν =
//! Σ_λ M_μλ M_λν over the tangent frame:
//!
//!   t⁻²γ  = δ + ⅓t²M + ⅙t³M' + t⁴(M''/20 + 2MM/45)
//!   t²γ⁻¹ = δ − ⅓t²M − ⅙t³M' − t⁴(M''/20 − MM/15)
//!   t⁻¹A  = −δ − ⅔t²M − (5/12)t³M' − t⁴(3M''/20 + 2MM/15)
//!   tH    = −2 + ⅓t²Ric(n,n) + ¼t³(∇_n Ric)(n,n) + t⁴((∇²_nn Ric)(n,n)/10 + |M|²/45)

use crate::bartnik::BartnikData;
use crate::error::{input, Result};
use crate::sphere::{GridSpec, SphereScalarField, SphereSymTensorField};

use super::riemann::CurvatureJet;

#[derive(Clone, Debug)]
pub struct GeodesicSphereExpansion {
    pub t: f64,
    /// Induced metric γ(t) in the round orthonormal frame.
    pub gamma: SphereSymTensorField,
    pub gamma_inv: SphereSymTensorField,
    /// Second fundamental form A(t).
    pub second_fundamental_form: SphereSymTensorField,
    pub mean_curvature: SphereScalarField,
}

type Sym2 = [[f64; 2]; 2];

fn sym(f: impl Fn(usize, usize) -> f64) -> Sym2 {
    [[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]]
}

fn prod(a: &Sym2, b: &Sym2) -> Sym2 {
    sym(|i, j| a[i][0] * b[0][j] + a[i][1] * b[1][j])
}

/// Series coefficients at one direction: (M, M', M'', Ric_nn, ∇Ric_nn, ∇²Ric_nn).
struct Local {
    m: Sym2,
    m1: Sym2,
    m2: Sym2,
    rnn: [f64; 3],
}

fn local(jet: &CurvatureJet, n: [f64; 3], frame: [[f64; 3]; 2]) -> Local {
    let m = sym(|i, j| jet.jacobi(frame[i], frame[j], n));
    let m1 = sym(|i, j| jet.jacobi_d1(frame[i], frame[j], n));
    let m2 = sym(|i, j| jet.jacobi_d2(frame[i], frame[j], n));
    // Ric_nn and its radial derivatives are minus the traces of M, M', M''
    // since R(n, n, ·, ·) = 0.
    let rnn = [-(m[0][0] + m[1][1]), -(m1[0][0] + m1[1][1]), -(m2[0][0] + m2[1][1])];
    Local { m, m1, m2, rnn }
}

pub fn expansion_boundary_data(jet: &CurvatureJet, t: f64, grid: &GridSpec) -> Result<GeodesicSphereExpansion> {
    if !(t > 0.0 && t.is_finite()) {
        return input(format!("radius must be positive, got {t}"));
    }
    let n_pts = grid.len();
    let mut comps: [Vec<[f64; 3]>; 3] = std::array::from_fn(|_| Vec::with_capacity(n_pts));
    let mut h = Vec::with_capacity(n_pts);
    let (t2, t3, t4) = (t * t, t * t * t, t * t * t * t);
    for i in 0..grid.n_theta() {
        for j in 0..grid.n_phi() {
            let n = grid.direction(i, j);
            let Local { m, m1, m2, rnn } = local(jet, n, grid.frame(i, j));
            let mm = prod(&m, &m);
            let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
            let g = sym(|a, b| {
                t2 * (d(a, b) + t2 * m[a][b] / 3.0 + t3 * m1[a][b] / 6.0 + t4 * (m2[a][b] / 20.0 + 2.0 * mm[a][b] / 45.0))
            });
            let gi = sym(|a, b| {
                (d(a, b) - t2 * m[a][b] / 3.0 - t3 * m1[a][b] / 6.0 - t4 * (m2[a][b] / 20.0 - mm[a][b] / 15.0)) / t2
            });
            let sff = sym(|a, b| {
                t * (-d(a, b)
                    - 2.0 * t2 * m[a][b] / 3.0
                    - 5.0 * t3 * m1[a][b] / 12.0
                    - t4 * (3.0 * m2[a][b] / 20.0 + 2.0 * mm[a][b] / 15.0))
            });
            let m_sq = mm[0][0] + mm[1][1];
            let th = -2.0 + t2 * rnn[0] / 3.0 + t3 * rnn[1] / 4.0 + t4 * (rnn[2] / 10.0 + m_sq / 45.0);
            for (c, s) in comps.iter_mut().zip([g, gi, sff]) {
                c.push([s[0][0], s[0][1], s[1][1]]);
            }
            h.push(th / t);
        }
    }
    let field = |v: &[[f64; 3]]| {
        SphereSymTensorField::new(
            grid,
            v.iter().map(|x| x[0]).collect(),
            v.iter().map(|x| x[1]).collect(),
            v.iter().map(|x| x[2]).collect(),
        )
    };
    Ok(GeodesicSphereExpansion {
        t,
        gamma: field(&comps[0])?,
        gamma_inv: field(&comps[1])?,
        second_fundamental_form: field(&comps[2])?,
        mean_curvature: SphereScalarField::from_samples(grid, h)?,
    })
}

impl GeodesicSphereExpansion {
    /// (γ(t), H(t)) as Bartnik data.
    pub fn to_bartnik_data(&self) -> Result<BartnikData> {
        BartnikData::new(self.gamma.clone(), self.mean_curvature.clone())
    }

    /// (t⁻²γ(t), tH(t)): the data of the rescaled metric t⁻²g.
    pub fn rescaled(&self) -> Result<BartnikData> {
        BartnikData::new(self.gamma.scale(1.0 / (self.t * self.t)), self.mean_curvature.scale(self.t))
    }

    /// Largest |γ·γ⁻¹ − id| entry over the grid; of order t⁵ for the
    /// truncated series.
    pub fn inverse_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..self.gamma.grid().len() {
            let [a, b, c] = self.gamma.at(k);
            let [p, q, r] = self.gamma_inv.at(k);
            let prod = [[a * p + b * q, a * q + b * r], [b * p + c * q, b * q + c * r]];
            worst = worst
                .max((prod[0][0] - 1.0).abs())
                .max((prod[1][1] - 1.0).abs())
                .max(prod[0][1].abs())
                .max(prod[1][0].abs());
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{curvature_jet, MetricPreset};

    #[test]
    fn zero_jet_gives_scaled_round_data() {
        let g = GridSpec::new(6).unwrap();
        let jet = curvature_jet(&MetricPreset::Euclidean, [0.0; 3]).unwrap();
        let e = expansion_boundary_data(&jet, 0.3, &g).unwrap();
        let d = e.rescaled().unwrap();
        assert!(d.gamma().sub(&SphereSymTensorField::round_metric(&g)).sup_norm() < 1e-15);
        assert!(d.mean_curvature().samples().iter().all(|h| (h + 2.0).abs() < 1e-15));
        assert!(e.inverse_defect() < 1e-15);
    }

    #[test]
    fn three_sphere_series_coefficients() {
        let g = GridSpec::new(6).unwrap();
        let jet = curvature_jet(&MetricPreset::ConstantCurvature { k: 1.0 }, [0.0; 3]).unwrap();
        let t: f64 = 0.1;
        let e = expansion_boundary_data(&jet, t, &g).unwrap();
        let d = e.rescaled().unwrap();
        let th = -2.0 + 2.0 * t * t / 3.0 + 2.0 * t.powi(4) / 45.0;
        let gg = 1.0 - t * t / 3.0 + 2.0 * t.powi(4) / 45.0;
        for k in 0..g.len() {
            assert!((d.mean_curvature().samples()[k] - th).abs() < 1e-14);
            let [a, b, c] = d.gamma().at(k);
            assert!((a - gg).abs() < 1e-14 && b.abs() < 1e-14 && (c - gg).abs() < 1e-14);
        }
        // against the closed forms −2t·cot t and sin²t/t²
        assert!((th + 2.0 * t / t.tan()).abs() < 1e-8);
        assert!((gg - (t.sin() / t).powi(2)).abs() < 1e-8);
        assert!(e.inverse_defect() < 1e-6);
    }
}
