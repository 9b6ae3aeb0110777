use num_complex::Complex64;
use proptest::prelude::*;
use quasilocal::sphere::io::{sh_from_str, sh_to_string};
use quasilocal::sphere::*;

fn coeffs_strategy(l: usize, lmin: usize) -> impl Strategy<Value = ShCoeffs> {
    let n = (l + 1) * (l + 1);
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(move |v| {
        let mut c = ShCoeffs::zeros(l, true);
        let mut it = v.into_iter();
        for ll in lmin..=l {
            for m in 0..=ll as i64 {
                let (a, b) = it.next().unwrap();
                c.set(ll, m, Complex64::new(a, if m == 0 { 0.0 } else { b }));
            }
        }
        c
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval(c in coeffs_strategy(10, 0)) {
        let g = GridSpec::new(10).unwrap();
        let f = synthesize(&c, &g).unwrap();
        let sq: Vec<f64> = f.iter().map(|x| x * x).collect();
        let e = c.norm().powi(2);
        prop_assert!((g.integrate(&sq) - e).abs() <= 1e-12 * e.max(1.0));
    }

    #[test]
    fn analysis_inverts_synthesis(c in coeffs_strategy(9, 0)) {
        let g = GridSpec::with_sizes(9, 12, 21).unwrap();
        let back = analyze(&synthesize(&c, &g).unwrap(), &g).unwrap();
        prop_assert!(back.lin_comb(1.0, &c, -1.0).max_abs() < 1e-12);
    }

    #[test]
    fn tensor_decomposition_round_trips(h in coeffs_strategy(8, 0), a in coeffs_strategy(8, 2), b in coeffs_strategy(8, 2)) {
        let g = GridSpec::new(8).unwrap();
        let h = SphereScalarField::from_coeffs(&g, h).unwrap();
        let w = TangentField { alpha: a, beta: b };
        let omega = assemble(&h, &w).unwrap();
        let (h2, w2) = omega.decompose().unwrap();
        prop_assert!(h2.lin_comb(1.0, &h, -1.0).sup_norm() < 1e-10);
        prop_assert!(w2.alpha.lin_comb(1.0, &w.alpha, -1.0).max_abs() < 1e-10);
        prop_assert!(w2.beta.lin_comb(1.0, &w.beta, -1.0).max_abs() < 1e-10);
    }

    #[test]
    fn coefficient_files_round_trip(c in coeffs_strategy(6, 0)) {
        let text = sh_to_string(&c);
        let back = sh_from_str(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(sh_to_string(&back), text);
    }
}

#[test]
fn laplacian_and_integral_of_harmonics() {
    let g = GridSpec::new(12).unwrap();
    for l in 0..=12usize {
        let c = ShCoeffs::real_mode(12, l, 1.min(l as i64), Complex64::new(0.3, -0.2));
        let f = SphereScalarField::from_coeffs(&g, c).unwrap();
        let lap = f.laplace_beltrami();
        let want = f.scale(-((l * (l + 1)) as f64));
        assert!(lap.lin_comb(1.0, &want, -1.0).sup_norm() < 1e-11 * (1.0 + (l * l) as f64), "l={l}");
    }
    let one = SphereScalarField::constant(&g, 1.0);
    assert!((one.integrate() - 4.0 * std::f64::consts::PI).abs() < 1e-13);
}

#[test]
fn grid_must_resolve_band_limit() {
    assert!(GridSpec::with_sizes(8, 8, 17).is_err());
    assert!(GridSpec::with_sizes(8, 9, 16).is_err());
    assert!(GridSpec::with_sizes(8, 9, 17).is_ok());
}
