//! Spherical harmonics written as functions of a unit-vector jet, so that
//! fields on S² can be extended off the sphere and differentiated exactly.
//!
//! Y_ℓm(u) = Q̄ℓm(u_z)·(u_x + i u_y)^m with Q̄ℓm = P̄ℓm / sin^m θ, which obeys
//! the same three-term recurrence in ℓ as P̄ℓm.

use super::coeffs::ShCoeffs;
use crate::jet::Jet;

/// Per-degree partial sums S_ℓ(u) = Re Σ_m c_ℓm Y_ℓm(u), ℓ = 0..=L.
pub fn degree_sums(coeffs: &ShCoeffs, u: &[Jet; 3]) -> Vec<Jet> {
    let l_max = coeffs.band_limit();
    let order = u[0].order();
    let mut sums = vec![Jet::zero(order); l_max + 1];
    // (ux + i uy)^m as C_m + i S_m
    let mut c_m = Jet::constant(1.0, order);
    let mut s_m = Jet::zero(order);
    let mut qmm = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
    for m in 0..=l_max {
        if m > 0 {
            qmm *= -((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
            let c_next = c_m * u[0] - s_m * u[1];
            s_m = s_m * u[0] + c_m * u[1];
            c_m = c_next;
        }
        let mut q_prev = Jet::zero(order);
        let mut q = Jet::constant(qmm, order);
        for l in m..=l_max {
            if l == m + 1 {
                q_prev = q;
                q = u[2] * (((2 * m + 3) as f64).sqrt() * qmm);
            } else if l > m + 1 {
                let (lf, mf) = (l as f64, m as f64);
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
                let next = (u[2] * q - q_prev * b) * a;
                q_prev = q;
                q = next;
            }
            let cp = coeffs.get(l, m as i64);
            let mut re = c_m * cp.re - s_m * cp.im;
            if m > 0 {
                // Y_ℓ,−m = (−1)^m conj(Y_ℓm)
                let cn = coeffs.get(l, -(m as i64));
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                re += (c_m * cn.re + s_m * cn.im) * sign;
            }
            sums[l] += q * re;
        }
    }
    sums
}

/// Re Σ c_ℓm Y_ℓm(u).
pub fn eval_jet(coeffs: &ShCoeffs, u: &[Jet; 3]) -> Jet {
    let sums = degree_sums(coeffs, u);
    let mut out = Jet::zero(u[0].order());
    for s in sums {
        out += s;
    }
    out
}

/// Re Σ c_ℓm Y_ℓm at a unit vector.
pub fn eval(coeffs: &ShCoeffs, u: [f64; 3]) -> f64 {
    eval_jet(coeffs, &Jet::point(u, 0)).value()
}

/// Unit-vector jet x/|x| and |x| from a point jet.
pub fn unit_and_radius(x: &[Jet; 3]) -> ([Jet; 3], Jet) {
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    let r = r2.sqrt();
    let inv = r.recip();
    ([x[0] * inv, x[1] * inv, x[2] * inv], r)
}
