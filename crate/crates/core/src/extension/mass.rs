use std::f64::consts::PI;

use crate::error::Result;
use crate::jet::Jet;
use crate::sphere::GridSpec;

use super::bump::BUMP_OUTER;
use super::field::LinearizedExtension;

/// A metric perturbation η of the flat metric, evaluable with first derivatives.
pub trait MetricPerturbation {
    /// (η_ab, ∂k η_ab indexed [k][a][b]) at `x`.
    fn eta_with_gradient(&self, x: [f64; 3]) -> ([[f64; 3]; 3], [[[f64; 3]; 3]; 3]);
}

impl MetricPerturbation for LinearizedExtension {
    fn eta_with_gradient(&self, x: [f64; 3]) -> ([[f64; 3]; 3], [[[f64; 3]; 3]; 3]) {
        let e = self.eta_jet(x, 1);
        (
            std::array::from_fn(|a| std::array::from_fn(|b| e[a][b].value())),
            std::array::from_fn(|k| std::array::from_fn(|a| std::array::from_fn(|b| e[a][b].d1(k)))),
        )
    }
}

/// η = −2uδ with u = a/|x|.
#[derive(Clone, Copy, Debug)]
pub struct ConformalPointMass {
    pub a: f64,
}

impl MetricPerturbation for ConformalPointMass {
    fn eta_with_gradient(&self, x: [f64; 3]) -> ([[f64; 3]; 3], [[[f64; 3]; 3]; 3]) {
        let p = Jet::point(x, 1);
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        let f = r.recip().scale(-2.0 * self.a);
        let mut eta = [[0.0; 3]; 3];
        let mut d = [[[0.0; 3]; 3]; 3];
        for a in 0..3 {
            eta[a][a] = f.value();
            for (k, dk) in d.iter_mut().enumerate() {
                dk[a][a] = f.d1(k);
            }
        }
        (eta, d)
    }
}

/// η ≡ 0.
#[derive(Clone, Copy, Debug)]
pub struct Flat;

impl MetricPerturbation for Flat {
    fn eta_with_gradient(&self, _: [f64; 3]) -> ([[f64; 3]; 3], [[[f64; 3]; 3]; 3]) {
        ([[0.0; 3]; 3], [[[0.0; 3]; 3]; 3])
    }
}

/// ADM flux mass on one coordinate sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxMass {
    pub radius: f64,
    pub mass: f64,
    /// False when the sphere meets the gauge (bump) region r < 3.
    pub asymptotic: bool,
}

/// (1/16π)∫_{|x|=r} (∂_k η_ik − ∂_i η_kk) x^i/r dA.
pub fn adm_mass_flux(field: &impl MetricPerturbation, radius: f64, grid: &GridSpec) -> Result<FluxMass> {
    let np = grid.n_phi();
    let mut samples = vec![0.0; grid.len()];
    for i in 0..grid.n_theta() {
        for j in 0..np {
            let n = grid.direction(i, j);
            let x = [radius * n[0], radius * n[1], radius * n[2]];
            let (_, d) = field.eta_with_gradient(x);
            let mut s = 0.0;
            for (a, na) in n.iter().enumerate() {
                let mut div = 0.0;
                let mut dtr = 0.0;
                for k in 0..3 {
                    div += d[k][a][k];
                    dtr += d[a][k][k];
                }
                s += (div - dtr) * na;
            }
            samples[i * np + j] = s * radius * radius;
        }
    }
    Ok(FluxMass {
        radius,
        mass: grid.integrate(&samples) / (16.0 * PI),
        asymptotic: radius >= BUMP_OUTER,
    })
}

/// −(1/4π)∫_{|x|=1} u, read off the ℓ = 0 coefficient of v.
pub fn adm_mass_closed_form(ext: &LinearizedExtension) -> f64 {
    (4.0 * PI).sqrt() * ext.modes().v.get(0, 0).re / (8.0 * PI)
}
