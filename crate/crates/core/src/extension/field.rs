//! The explicit linearized static extension of near-round Bartnik data.
//!
//! With (h, W) the uniformization of γ − g and k = H + 2, each mode is solved
//! for (v_ℓm, ξ_ℓm). The exterior fields are
//!
//!   v = Σ v_ℓm r^{−ℓ−1} Y_ℓm,   u = −v/2,
//!   ξ = ψ(r)·(ξ⊥(x̂) x̂ + W(x̂)),
//!   η_ab = ∂a ξ_b + ∂b ξ_a + v δ_ab,
//!
//! with ξ⊥ and W radially constant. W(x) = r∇A + ∇B × x where A, B are the
//! degree-0 homogeneous extensions of the potentials α, β.

use crate::bartnik::BartnikData;
use crate::error::{input, Error, Result};
use crate::jet::{Jet, JetMatrix};
use crate::sphere::cartesian::{degree_sums, eval_jet, unit_and_radius};
use crate::sphere::{GridSpec, ShCoeffs, SphereScalarField, SphereSymTensorField, TangentField};

use super::bump::{BumpProfile, BUMP_OUTER};
use super::modes::{solve_modes, ModeSolution};

/// Coefficients below this fraction of the largest one are dropped before
/// pointwise evaluation; they are transform roundoff.
const TRIM_RELATIVE: f64 = 1e-12;
// Roundoff level of deviations extracted from unit-scale metrics.
const TRIM_ABSOLUTE: f64 = 1e-15;

fn trimmed(c: &ShCoeffs) -> ShCoeffs {
    let max = c.max_abs();
    if max == 0.0 {
        return c.with_band_limit(0);
    }
    let mut top = 0;
    for (l, _, z) in c.iter() {
        if z.norm() > (TRIM_RELATIVE * max).max(TRIM_ABSOLUTE) {
            top = top.max(l);
        }
    }
    c.with_band_limit(top)
}

#[derive(Clone, Debug)]
pub struct LinearizedExtension {
    grid: GridSpec,
    modes: ModeSolution,
    w: TangentField,
    bump: BumpProfile,
    ev_v: ShCoeffs,
    ev_xi: ShCoeffs,
    ev_alpha: ShCoeffs,
    ev_beta: ShCoeffs,
}

/// η, u and their first and second Cartesian derivatives at a point.
#[derive(Clone, Debug)]
pub struct FieldValues {
    pub eta: [[f64; 3]; 3],
    /// `d_eta[k][a][b] = ∂k η_ab`
    pub d_eta: [[[f64; 3]; 3]; 3],
    /// `dd_eta[k][l][a][b] = ∂k ∂l η_ab`
    pub dd_eta: [[[[f64; 3]; 3]; 3]; 3],
    pub u: f64,
    pub du: [f64; 3],
    pub ddu: [[f64; 3]; 3],
}

impl LinearizedExtension {
    pub fn from_parts(grid: &GridSpec, modes: ModeSolution, w: TangentField) -> Result<Self> {
        if modes.v.band_limit() > grid.band_limit() || w.band_limit() > grid.band_limit() {
            return input("extension band limit exceeds grid band limit");
        }
        Ok(LinearizedExtension {
            grid: grid.clone(),
            ev_v: trimmed(&modes.v),
            ev_xi: trimmed(&modes.xi),
            ev_alpha: trimmed(&w.alpha),
            ev_beta: trimmed(&w.beta),
            modes,
            w,
            bump: BumpProfile,
        })
    }

    /// Builds the extension for (g + ω, −2 + κ) without a smallness check.
    pub fn from_deviation(omega: &SphereSymTensorField, kappa: &SphereScalarField) -> Result<Self> {
        let (h, w) = omega.decompose()?;
        let modes = solve_modes(h.coeffs(), &kappa.coeffs().with_band_limit(h.coeffs().band_limit()))?;
        Self::from_parts(omega.grid(), modes, w)
    }

    /// Builds the extension, refusing data with ε above `threshold`.
    pub fn build(data: &BartnikData, threshold: f64) -> Result<Self> {
        let epsilon = data.epsilon()?;
        if epsilon > threshold {
            return Err(Error::Refused { epsilon, threshold });
        }
        let (omega, kappa) = data.deviation();
        Self::from_deviation(&omega, &kappa)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn modes(&self) -> &ModeSolution {
        &self.modes
    }
    pub fn tangent(&self) -> &TangentField {
        &self.w
    }
    pub fn bump(&self) -> BumpProfile {
        self.bump
    }

    /// Same extension with W replaced by `w` (e.g. shifted by a Killing field).
    pub fn with_tangent(&self, w: TangentField) -> Result<Self> {
        Self::from_parts(&self.grid, self.modes.clone(), w)
    }

    /// v = Σ v_ℓm r^{−ℓ−1} Y_ℓm at the order of `x`.
    pub fn v_jet(&self, x: &[Jet; 3]) -> Jet {
        let (u, r) = unit_and_radius(x);
        let sums = degree_sums(&self.ev_v, &u);
        let rinv = r.recip();
        let mut pow = rinv;
        let mut out = Jet::zero(x[0].order());
        for s in sums {
            out += s * pow;
            pow = pow * rinv;
        }
        out
    }

    pub fn u_jet(&self, x: &[Jet; 3]) -> Jet {
        self.v_jet(x).scale(-0.5)
    }

    /// ξ one order below `x` (zero beyond the bump support).
    pub fn xi_jet(&self, x: &[Jet; 3]) -> [Jet; 3] {
        let order = x[0].order();
        assert!(order >= 1);
        let lo = order - 1;
        let (u, r) = unit_and_radius(x);
        if r.value() >= BUMP_OUTER {
            return [Jet::zero(lo); 3];
        }
        let a = eval_jet(&self.ev_alpha, &u);
        let b = eval_jet(&self.ev_beta, &u);
        let da: [Jet; 3] = std::array::from_fn(|i| a.diff(i));
        let db: [Jet; 3] = std::array::from_fn(|i| b.diff(i));
        let ul: [Jet; 3] = std::array::from_fn(|i| u[i].truncate(lo));
        let xl: [Jet; 3] = std::array::from_fn(|i| x[i].truncate(lo));
        let rl = r.truncate(lo);
        let normal = eval_jet(&self.ev_xi, &ul);
        let psi = self.bump.jet(&rl);
        std::array::from_fn(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let tangential = rl * da[i] + db[j] * xl[k] - db[k] * xl[j];
            psi * (normal * ul[i] + tangential)
        })
    }

    /// η as a jet of the given order (≤ 2) about `p`.
    pub fn eta_jet(&self, p: [f64; 3], order: usize) -> JetMatrix {
        let x = Jet::point(p, order + 2);
        let xi = self.xi_jet(&x);
        let xo: [Jet; 3] = std::array::from_fn(|i| x[i].truncate(order));
        let v = self.v_jet(&xo);
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let mut e = xi[b].diff(a) + xi[a].diff(b);
                if a == b {
                    e += v;
                }
                e
            })
        })
    }

    /// δ + η as a jet.
    pub fn metric_jet(&self, p: [f64; 3], order: usize) -> JetMatrix {
        let mut g = self.eta_jet(p, order);
        for (a, row) in g.iter_mut().enumerate() {
            row[a] = row[a] + 1.0;
        }
        g
    }

    /// Exact η, u and derivatives through second order at an exterior point.
    pub fn eval_fields(&self, p: [f64; 3]) -> Result<FieldValues> {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        if r.is_nan() || r < 1.0 {
            return input(format!("point at radius {r} is inside the unit sphere"));
        }
        let eta = self.eta_jet(p, 2);
        let u = self.u_jet(&Jet::point(p, 2));
        Ok(FieldValues {
            eta: std::array::from_fn(|a| std::array::from_fn(|b| eta[a][b].value())),
            d_eta: std::array::from_fn(|k| std::array::from_fn(|a| std::array::from_fn(|b| eta[a][b].d1(k)))),
            dd_eta: std::array::from_fn(|k| {
                std::array::from_fn(|l| std::array::from_fn(|a| std::array::from_fn(|b| eta[a][b].d2(k, l))))
            }),
            u: u.value(),
            du: u.gradient(),
            ddu: u.hessian(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bartnik::random_data;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> GridSpec {
        GridSpec::new(8).unwrap()
    }

    #[test]
    fn round_data_gives_zero_extension() {
        let g = grid();
        let ext = LinearizedExtension::build(&BartnikData::round(&g), 1.0).unwrap();
        let f = ext.eval_fields([1.3, -0.4, 0.9]).unwrap();
        assert!(f.eta.iter().flatten().all(|v| *v == 0.0));
        assert_eq!(f.u, 0.0);
    }

    #[test]
    fn pure_trace_mode() {
        let g = grid();
        let c = 0.01;
        let omega = SphereSymTensorField::round_metric(&g).scale(c);
        let ext = LinearizedExtension::from_deviation(&omega, &SphereScalarField::constant(&g, 0.0)).unwrap();
        let s = (4.0 * std::f64::consts::PI).sqrt();
        assert!((ext.modes().v.get(0, 0).re + c * s).abs() < 1e-15);
        assert!((ext.modes().xi.get(0, 0).re - c * s).abs() < 1e-15);
        let p = [0.0, 4.0, 0.0];
        let f = ext.eval_fields(p).unwrap();
        assert!((f.u - c / 8.0).abs() < 1e-15);
        for a in 0..3 {
            for b in 0..3 {
                let expected = if a == b { -c / 4.0 } else { 0.0 };
                assert!((f.eta[a][b] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn far_field_is_conformal() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = random_data(&g, 1e-2, 3, &mut rng).unwrap();
        let ext = LinearizedExtension::build(&d, 1.0).unwrap();
        let f = ext.eval_fields([2.0, -2.5, 1.0]).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let expected = if a == b { -2.0 * f.u } else { 0.0 };
                assert!((f.eta[a][b] - expected).abs() < 1e-16);
            }
        }
        assert!(ext.eval_fields([0.5, 0.0, 0.0]).is_err());
    }

    #[test]
    fn derivatives_match_central_differences() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = random_data(&g, 1e-1, 3, &mut rng).unwrap();
        let ext = LinearizedExtension::build(&d, 1.0).unwrap();
        let h = 1e-4;
        for _ in 0..10 {
            let r: f64 = rng.random_range(1.1..3.5);
            let ct: f64 = rng.random_range(-1.0..1.0);
            let ph: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let st = (1.0 - ct * ct).sqrt();
            let p = [r * st * ph.cos(), r * st * ph.sin(), r * ct];
            let f = ext.eval_fields(p).unwrap();
            for k in 0..3 {
                let mut pp = p;
                let mut pm = p;
                pp[k] += h;
                pm[k] -= h;
                let fp = ext.eval_fields(pp).unwrap();
                let fm = ext.eval_fields(pm).unwrap();
                for a in 0..3 {
                    for b in 0..3 {
                        let fd = (fp.eta[a][b] - fm.eta[a][b]) / (2.0 * h);
                        assert!((fd - f.d_eta[k][a][b]).abs() < 1e-7);
                        for l in 0..3 {
                            let fd2 = (fp.d_eta[l][a][b] - fm.d_eta[l][a][b]) / (2.0 * h);
                            assert!((fd2 - f.dd_eta[k][l][a][b]).abs() < 1e-6);
                        }
                    }
                }
                assert!(((fp.u - fm.u) / (2.0 * h) - f.du[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn u_is_harmonic() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let d = random_data(&g, 1e-2, 4, &mut rng).unwrap();
        let ext = LinearizedExtension::build(&d, 1.0).unwrap();
        let f = ext.eval_fields([1.2, 0.7, -0.3]).unwrap();
        let lap = f.ddu[0][0] + f.ddu[1][1] + f.ddu[2][2];
        assert!(lap.abs() < 1e-15);
    }

    #[test]
    fn refuses_large_data() {
        let g = grid();
        let d = BartnikData::schwarzschild(0.3, &g).unwrap();
        match LinearizedExtension::build(&d, 0.1) {
            Err(Error::Refused { epsilon, threshold }) => {
                assert!(epsilon > threshold);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }
}
