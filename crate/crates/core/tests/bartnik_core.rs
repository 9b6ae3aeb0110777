use proptest::prelude::*;
use quasilocal::bartnik::*;
use quasilocal::sphere::*;
use quasilocal::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn first_order_mass_is_linear(seed in any::<u64>(), a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let g = GridSpec::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (o1, k1) = random_deviation(&g, 4, &mut rng).unwrap();
        let (o2, k2) = random_deviation(&g, 4, &mut rng).unwrap();
        let (o2, k2) = (o2.scale(o1.sup_norm() / o2.sup_norm()), k2.scale(k1.sup_norm() / k2.sup_norm()));
        let m = |o: &SphereSymTensorField, k: &SphereScalarField| {
            BartnikData::from_deviation(&o.scale(0.1 / o1.sup_norm()), &k.scale(0.1 / k1.sup_norm())).unwrap().first_order_mass()
        };
        let lhs = m(&o1.lin_comb(a, &o2, b), &k1.lin_comb(a, &k2, b));
        prop_assert!((lhs - a * m(&o1, &k1) - b * m(&o2, &k2)).abs() < 1e-14);
    }

    #[test]
    fn data_files_round_trip(seed in any::<u64>(), eps in 1e-4f64..0.5) {
        let g = GridSpec::new(6).unwrap();
        let d = random_data(&g, eps, 3, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let text = d.to_text();
        let back = BartnikData::from_text(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn epsilon_is_homogeneous(seed in any::<u64>(), eps in 1e-4f64..0.5) {
        let g = GridSpec::new(8).unwrap();
        let d = random_data(&g, eps, 4, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let e = d.epsilon().unwrap();
        // deviations are recovered from unit-scale metrics, so roundoff is ~1e-16 absolute
        prop_assert!((e - eps).abs() < 1e-8 * eps, "{} vs {}", e, eps);
    }
}

#[test]
fn schwarzschild_sphere_masses() {
    let g = GridSpec::new(8).unwrap();
    for m in [1e-3, 1e-2, 0.1] {
        let d = BartnikData::schwarzschild(m, &g).unwrap();
        assert!((d.hawking_mass() - m).abs() < 1e-12);
        assert!((d.first_order_mass() - m).abs() <= 10.0 * m * m);
    }
}

#[test]
fn hawking_mass_linearizes_to_first_order_mass() {
    let g = GridSpec::new(10).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (o, k) = random_deviation(&g, 5, &mut rng).unwrap();
    let s = 1e-5;
    let (o, k) = (o.scale(0.1 / o.sup_norm()), k.scale(0.1 / k.sup_norm()));
    let at = |t: f64| BartnikData::from_deviation(&o.scale(t), &k.scale(t)).unwrap();
    let fd = (at(s).hawking_mass() - at(-s).hawking_mass()) / (2.0 * s);
    let lin = at(s).first_order_mass() / s;
    assert!((fd - lin).abs() < 1e-6 * lin.abs(), "{fd} vs {lin}");
}

#[test]
fn malformed_data_file_reports_line() {
    let g = GridSpec::new(4).unwrap();
    let text = BartnikData::round(&g).to_text();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[3] = "not numbers".into();
    let bad = lines.join("\n") + "\n";
    match BartnikData::from_text(&bad) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected a parse error, got {other:?}"),
    }
}
