//! Linearized boundary operator: first-order change of (induced metric,
//! mean curvature) of the unit sphere under the two kinds of perturbation
//! used by the extension.

use crate::error::Result;
use crate::sphere::{GridSpec, ShCoeffs, SphereScalarField, SphereSymTensorField, TangentField};

/// Deformation by ψ(ξ⊥ ∂_r + ξ⊤): (L_W g + 2ξ⊥ g, (Δ + 2)ξ⊥).
pub fn bdot_vector(xi_perp: &SphereScalarField, w: &TangentField) -> Result<(SphereSymTensorField, SphereScalarField)> {
    let grid = xi_perp.grid();
    let metric = w
        .lie_derivative_round(grid)?
        .add(&SphereSymTensorField::conformal(&xi_perp.scale(2.0)));
    let h = xi_perp.laplace_beltrami().lin_comb(1.0, xi_perp, 2.0);
    Ok((metric, h))
}

/// Conformal perturbation v δ with v = Σ v_ℓm r^{−ℓ−1} Y_ℓm:
/// (v g, v − ∂_r v) on the unit sphere, the latter being Σ (ℓ+2) v_ℓm Y_ℓm.
pub fn bdot_conformal(v: &ShCoeffs, grid: &GridSpec) -> Result<(SphereSymTensorField, SphereScalarField)> {
    let trace = SphereScalarField::from_coeffs(grid, v.clone())?;
    let h = SphereScalarField::from_coeffs(grid, v.map_degree(|l| l as f64 + 2.0))?;
    Ok((SphereSymTensorField::conformal(&trace), h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bartnik::random_deviation;
    use crate::extension::LinearizedExtension;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dipole_normal_motion_is_pure_metric() {
        let g = GridSpec::new(6).unwrap();
        let y = SphereScalarField::from_coeffs(&g, ShCoeffs::real_mode(6, 1, 1, Complex64::new(1.0, 0.0))).unwrap();
        let (m, h) = bdot_vector(&y, &TangentField::zero(6)).unwrap();
        assert!(m.sub(&SphereSymTensorField::conformal(&y.scale(2.0))).sup_norm() < 1e-14);
        assert!(h.sup_norm() < 1e-13);
        let y2 = SphereScalarField::from_coeffs(&g, ShCoeffs::unit(6, 2, 0)).unwrap();
        let (_, h2) = bdot_vector(&y2, &TangentField::zero(6)).unwrap();
        assert!(h2.lin_comb(1.0, &y2, 4.0).sup_norm() < 1e-13);
    }

    #[test]
    fn killing_and_zero_fields() {
        let g = GridSpec::new(6).unwrap();
        let w = TangentField {
            alpha: ShCoeffs::zeros(6, true),
            beta: ShCoeffs::real_mode(6, 1, 1, Complex64::new(0.3, 0.2)),
        };
        let (m, h) = bdot_vector(&SphereScalarField::constant(&g, 0.0), &w).unwrap();
        assert!(m.sup_norm() < 1e-14 && h.sup_norm() == 0.0);
        let (m, h) = bdot_conformal(&ShCoeffs::zeros(6, true), &g).unwrap();
        assert!(m.sup_norm() == 0.0 && h.sup_norm() == 0.0);
    }

    #[test]
    fn monopole_conformal_factor() {
        let g = GridSpec::new(6).unwrap();
        let (m, h) = bdot_conformal(&ShCoeffs::unit(6, 0, 0), &g).unwrap();
        let y00 = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
        assert!(m.sub(&SphereSymTensorField::round_metric(&g).scale(y00)).sup_norm() < 1e-15);
        assert!(h.samples().iter().all(|v| (v - 2.0 * y00).abs() < 1e-15));
    }

    #[test]
    fn assembled_operator_reproduces_data() {
        let g = GridSpec::new(10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let (omega, kappa) = random_deviation(&g, 6, &mut rng).unwrap();
        let ext = LinearizedExtension::from_deviation(&omega, &kappa).unwrap();
        let xi = SphereScalarField::from_coeffs(&g, ext.modes().xi.clone()).unwrap();
        let (m1, h1) = bdot_vector(&xi, ext.tangent()).unwrap();
        let (m2, h2) = bdot_conformal(&ext.modes().v, &g).unwrap();
        assert!(m1.add(&m2).sub(&omega).sup_norm() < 1e-10);
        assert!(h1.add(&h2).lin_comb(1.0, &kappa, -1.0).sup_norm() < 1e-10);
    }
}
