//! The invariant suite behind the `validate` subcommand.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bartnik::{random_data, random_deviation, BartnikData};
use crate::curvature::{
    curvature_jet, curvature_jet_rotated, expansion_boundary_data, geodesic_sphere_oracle, MetricPreset, Polynomial,
};
use crate::error::Result;
use crate::extension::{
    adm_mass_closed_form, adm_mass_flux, back_substitution_residual, convexity_check, convexity_points, solve_modes,
    CurvatureMethod, LinearizedExtension,
};
use crate::sphere::{analyze, assemble, synthesize, GridSpec, ShCoeffs, SphereScalarField, SphereSymTensorField};

use super::commands::{write_file, Outcome, EXIT_OK, EXIT_VALIDATION, loglog_slope, poisson_check, residual_sweep, POISSON_TOLERANCE};
use super::config::{RunConfig, SphereModeSetting};

/// Band limit of the grids used by the suite.
pub const VALIDATE_BAND_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Scale one Gauss–Legendre weight by 1.01.
    CorruptWeights,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# validate seed={}\n", self.seed);
        for c in &self.checks {
            let _ = writeln!(s, "{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let _ = writeln!(s, "{}", if self.passed() { "ALL PASS" } else { "FAILED" });
        s
    }
}

fn random_coeffs(rng: &mut ChaCha8Rng, l: usize, lmin: usize) -> ShCoeffs {
    let mut c = ShCoeffs::zeros(l, true);
    for ll in lmin..=l {
        for m in 0..=ll as i64 {
            let im = if m == 0 { 0.0 } else { rng.random_range(-1.0..1.0) };
            c.set(ll, m, Complex64::new(rng.random_range(-1.0..1.0), im));
        }
    }
    c
}

fn bounded(name: &'static str, value: f64, tol: f64) -> Check {
    Check {
        name,
        passed: value <= tol,
        detail: format!("{value:.3e} (tolerance {tol:.0e})"),
    }
}

/// Random deviation with sup norm 0.1 in each of (γ − g, H + 2).
fn small_deviation(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Result<(SphereSymTensorField, SphereScalarField)> {
    let (omega, kappa) = random_deviation(grid, 4, rng)?;
    Ok((omega.scale(0.1 / omega.sup_norm()), kappa.scale(0.1 / kappa.sup_norm())))
}

type CheckFn = fn(&GridSpec, &mut ChaCha8Rng) -> Result<Check>;

fn parseval(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Result<Check> {
    let c = random_coeffs(rng, grid.band_limit(), 0);
    let f = synthesize(&c, grid)?;
    let sq: Vec<f64> = f.iter().map(|x| x * x).collect();
    let energy = c.norm().powi(2);
    Ok(bounded("parseval", (grid.integrate(&sq) - energy).abs() / energy, 1e-12))
}

fn transform_round_trip(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Result<Check> {
    let c = random_coeffs(rng, grid.band_limit(), 0);
    let back = analyze(&synthesize(&c, grid)?, grid)?;
    Ok(bounded("transform_round_trip", back.lin_comb(1.0, &c, -1.0).max_abs(), 1e-12))
}

fn tensor_decomposition(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Result<Check> {
    let (omega, _) = random_deviation(grid, 6, rng)?;
    let (h, w) = omega.decompose()?;
    let err = assemble(&h, &w)?.sub(&omega).sup_norm() / omega.sup_norm();
    Ok(bounded("tensor_decomposition", err, 1e-11))
}

fn trace_identity(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Result<Check> {
    let (omega, _) = random_deviation(grid, 6, rng)?;
    let (h, w) = omega.decompose()?;
    // tr ω = 2h + 2 div W
    let expect = h.lin_comb(2.0, &w.divergence(grid)?, 2.0);
    let err = omega.trace()?.lin_comb(1.0, &expect, -1.0).sup_norm() / omega.sup_norm();
    Ok(bounded("trace_identity", err, 1e-11))
}

fn first_order_linearity(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Result<Check> {
    let (o1, k1) = small_deviation(grid, rng)?;
    let (o2, k2) = small_deviation(grid, rng)?;
    let (a, b) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let m = |o: &_, k: &_| BartnikData::from_deviation(o, k).map(|d| d.first_order_mass());
    let lhs = m(&o1.lin_comb(a, &o2, b), &k1.lin_comb(a, &k2, b))?;
    let rhs = a * m(&o1, &k1)? + b * m(&o2, &k2)?;
    Ok(bounded("first_order_linearity", (lhs - rhs).abs(), 1e-13))
}

fn schwarzschild_fixture(grid: &GridSpec, _: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst = 0.0f64;
    let mut detail = String::new();
    let mut passed = true;
    for m in [1e-3, 1e-2] {
        let d = BartnikData::schwarzschild(m, grid)?;
        let ext = LinearizedExtension::build(&d, 1.0)?;
        let e_h = (d.hawking_mass() - m).abs();
        let e_1 = (d.first_order_mass() - m).abs();
        let e_c = (adm_mass_closed_form(&ext) - d.first_order_mass()).abs();
        passed &= e_h <= 1e-9 && e_1 <= 10.0 * m * m && e_c <= 1e-10;
        worst = worst.max(e_h);
        let _ = write!(detail, "m={m}: |hawking-m|={e_h:.1e} |first-m|={e_1:.1e} |closed-first|={e_c:.1e}; ");
    }
    Ok(Check {
        name: "schwarzschild_fixture",
        passed,
        detail: detail.trim_end_matches("; ").to_string(),
    })
}

fn hawking_linearization(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Result<Check> {
    let (omega, kappa) = small_deviation(grid, rng)?;
    let s = 1e-4;
    let mh = |t: f64| BartnikData::from_deviation(&omega.scale(t), &kappa.scale(t)).map(|d| d.hawking_mass());
    let fd = (mh(s)? - mh(-s)?) / (2.0 * s);
    // first_order_mass is linear in the deviation
    let lin = BartnikData::from_deviation(&omega.scale(s), &kappa.scale(s))?.first_order_mass() / s;
    Ok(bounded("hawking_linearization", (fd - lin).abs() / lin.abs(), 1e-6))
}

fn mode_solver(_: &GridSpec, rng: &mut ChaCha8Rng) -> Result<Check> {
    let h = random_coeffs(rng, 32, 0);
    let k = random_coeffs(rng, 32, 0);
    let sol = solve_modes(&h, &k)?;
    Ok(bounded("mode_solver", back_substitution_residual(&h, &k, &sol), 1e-12))
}

fn flux_closed_form(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Result<Check> {
    let d = random_data(grid, 1e-2, 4, rng)?;
    let ext = LinearizedExtension::build(&d, 1.0)?;
    let closed = adm_mass_closed_form(&ext);
    let mut worst = 0.0f64;
    for r in [3.0, 10.0, 40.0] {
        worst = worst.max((adm_mass_flux(&ext, r, grid)?.mass - closed).abs());
    }
    Ok(bounded("flux_closed_form", worst, 1e-9))
}

fn convexity(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Result<Check> {
    let d = random_data(grid, 1e-2, 4, rng)?;
    let report = convexity_check(&LinearizedExtension::build(&d, 1.0)?, &convexity_points());
    Ok(Check {
        name: "convexity",
        passed: report.convex && report.margin >= 1.9,
        detail: format!("min eigenvalue of Hess r^2 {:.6}", report.margin),
    })
}

fn residual_slope(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Result<Check> {
    let d = random_data(grid, 1e-1, 3, rng)?;
    let eps = [1e-1, 1e-2, 1e-3];
    let rows = residual_sweep(&d, &eps, CurvatureMethod::Analytic)?;
    let st = loglog_slope(&eps, &rows.iter().map(|r| r.static_sup).collect::<Vec<_>>());
    let bd = loglog_slope(&eps, &rows.iter().map(|r| r.boundary_h_sup).collect::<Vec<_>>());
    Ok(Check {
        name: "residual_slope",
        passed: (st - 2.0).abs() <= 0.15 && (bd - 2.0).abs() <= 0.15,
        detail: format!("static {st:.3}, boundary H {bd:.3}"),
    })
}

fn poisson(_: &GridSpec, rng: &mut ChaCha8Rng) -> Result<Check> {
    let (r, _) = poisson_check(rng.random(), 100)?;
    Ok(Check {
        name: "poisson",
        passed: r.weighted_residual <= POISSON_TOLERANCE && r.laplacian_residual <= POISSON_TOLERANCE,
        detail: format!(
            "weighted {:.3e}, FD Laplacian {:.3e}",
            r.weighted_residual, r.laplacian_residual
        ),
    })
}

fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|c| c / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn curvature_fixtures(_: &GridSpec, rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst = 0.0f64;
    let flat = curvature_jet(&MetricPreset::Euclidean, [0.0; 3])?;
    worst = worst.max(flat.riemann_norm_squared().sqrt());
    let s3 = curvature_jet(&MetricPreset::ConstantCurvature { k: 1.0 }, [0.0; 3])?;
    for a in 0..3 {
        for b in 0..3 {
            let want = if a == b { 2.0 } else { 0.0 };
            worst = worst.max((s3.ricci[a][b] - want).abs());
        }
    }
    worst = worst.max((s3.scalar - 6.0).abs());
    let quartic = MetricPreset::Conformal { phi: Polynomial::quartic() };
    let q = curvature_jet(&quartic, [0.0; 3])?;
    worst = worst.max(q.scalar.abs()).max((q.laplacian_scalar + 480.0).abs() / 480.0);

    // Scalars are frame independent.
    let schw = MetricPreset::SchwarzschildIsotropic { m: 1.0 };
    let p = [2.0 + rng.random_range(0.0..1.0), rng.random_range(-0.5..0.5), 0.3];
    let base = curvature_jet(&schw, p)?;
    let rot = curvature_jet_rotated(&schw, p, random_rotation(rng))?;
    let scale = base.riemann_norm_squared();
    worst = worst
        .max((base.riemann_norm_squared() - rot.riemann_norm_squared()).abs() / scale)
        .max((base.scalar - rot.scalar).abs())
        .max(rot.symmetry_defect() / scale.sqrt());
    Ok(bounded("curvature_fixtures", worst, 1e-8))
}

fn expansion_vs_oracle(_: &GridSpec, _: &mut ChaCha8Rng) -> Result<Check> {
    let grid = GridSpec::new(8)?;
    let metric = MetricPreset::ConstantCurvature { k: 1.0 };
    let t = 0.1;
    let oracle = geodesic_sphere_oracle(&metric, [0.0; 3], t, &grid)?.rescaled()?;
    let series = expansion_boundary_data(&curvature_jet(&metric, [0.0; 3])?, t, &grid)?.rescaled()?;
    let dg = oracle.gamma().sub(series.gamma()).sup_norm();
    let dh = oracle.mean_curvature().lin_comb(1.0, series.mean_curvature(), -1.0).sup_norm();
    Ok(bounded("expansion_vs_oracle", dg.max(dh), 1e-7))
}

fn config_round_trip(_: &GridSpec, rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = RunConfig::default();
    c.band_limit = rng.random_range(4..20);
    c.n_theta = c.band_limit + 1 + rng.random_range(0..3);
    c.n_phi = 2 * c.band_limit + 1 + rng.random_range(0..3);
    c.preset = "schwarzschild".into();
    c.params.insert("m".into(), rng.random_range(0.0..0.1));
    c.flux_radii = vec![rng.random_range(2.0..5.0), rng.random_range(5.0..50.0)];
    c.epsilons = vec![rng.random_range(0.05..0.2), rng.random_range(1e-4..1e-2)];
    c.radii = vec![rng.random_range(0.1..0.3), rng.random_range(0.01..0.1)];
    c.sphere_mode = if rng.random() { SphereModeSetting::Series } else { SphereModeSetting::Oracle };
    c.seed = rng.random();
    let text = c.to_text();
    let back = RunConfig::from_text(&text)?;
    Ok(Check {
        name: "config_round_trip",
        passed: back == c && back.to_text() == text,
        detail: String::new(),
    })
}

const CHECKS: [(&str, CheckFn); 15] = [
    ("parseval", parseval),
    ("transform_round_trip", transform_round_trip),
    ("tensor_decomposition", tensor_decomposition),
    ("trace_identity", trace_identity),
    ("first_order_linearity", first_order_linearity),
    ("schwarzschild_fixture", schwarzschild_fixture),
    ("hawking_linearization", hawking_linearization),
    ("mode_solver", mode_solver),
    ("flux_closed_form", flux_closed_form),
    ("convexity", convexity),
    ("residual_slope", residual_slope),
    ("poisson", poisson),
    ("curvature_fixtures", curvature_fixtures),
    ("expansion_vs_oracle", expansion_vs_oracle),
    ("config_round_trip", config_round_trip),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs every check with its own generator derived from `seed`. Errors
/// raised inside a check are reported as failures of that check.
pub fn run_validation(seed: u64, fault: Option<Fault>) -> Result<ValidationReport> {
    let mut grid = GridSpec::new(VALIDATE_BAND_LIMIT)?;
    if fault == Some(Fault::CorruptWeights) {
        grid = grid.with_corrupted_weights(1.01);
    }
    let checks = CHECKS
        .par_iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            f(&grid, &mut rng).unwrap_or_else(|e| Check {
                name,
                passed: false,
                detail: format!("error: {e}"),
            })
        })
        .collect();
    Ok(ValidationReport { seed, checks })
}

pub fn cmd_validate(config: &RunConfig, fault: Option<Fault>) -> Result<Outcome> {
    let report = run_validation(config.seed, fault)?;
    let text = report.to_text();
    let path = write_file(std::path::Path::new(&config.out), "validate_report.txt", &text)?;
    Ok(Outcome {
        code: if report.passed() { EXIT_OK } else { EXIT_VALIDATION },
        summary: text,
        files: vec![path],
    })
}
