//! Subcommand implementations. Each writes its artifacts under the
//! configured output directory and returns an outcome with an exit code.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bartnik::{random_data, BartnikData};
use crate::curvature::{limit_fit, small_sphere_mass, MetricPreset, Polynomial, SphereMode};
use crate::error::{Error, Result};
use crate::extension::io::extension_to_string;
use crate::extension::{
    adm_mass_closed_form, adm_mass_flux, boundary_residual, sample_points, static_residual, CurvatureMethod,
    LinearizedExtension, STATIC_SAMPLE_RADII,
};
use crate::jet::Jet;
use crate::poisson::{
    fd_laplacian, solve_poisson, weighted_sup_norm, Difference, ExteriorField, RadialProfile, SampleSet,
    DEFAULT_RADIAL_NODES, DEFAULT_R_MAX, FD_LAPLACIAN_STEP,
};
use crate::sphere::GridSpec;

use super::config::{RunConfig, SphereModeSetting};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

/// Exit code for an error: input/parse/io → 2, refusal or numerical → 3.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Refused { .. } | Error::Numerical(_) => EXIT_REFUSED,
        Error::Input(_) | Error::Parse { .. } | Error::Io(_) => EXIT_INPUT,
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

/// Directions per radius for static residual sampling.
pub const STATIC_SAMPLE_DIRECTIONS: usize = 24;

pub fn grid_of(config: &RunConfig) -> Result<GridSpec> {
    GridSpec::with_sizes(config.band_limit, config.n_theta, config.n_phi)
}

/// Data presets: round, schwarzschild (m), random (epsilon, degree; seeded).
pub fn data_preset(config: &RunConfig, grid: &GridSpec) -> Result<BartnikData> {
    match config.preset.as_str() {
        "round" => Ok(BartnikData::round(grid)),
        "schwarzschild" => BartnikData::schwarzschild(config.param("m", 0.01), grid),
        "random" => {
            let degree = config.param("degree", 3.0);
            if !(degree >= 0.0 && degree.fract() == 0.0) {
                return Err(Error::Input(format!("degree must be a non-negative integer, got {degree}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            random_data(grid, config.param("epsilon", 1e-2), degree as usize, &mut rng)
        }
        other => Err(Error::Input(format!(
            "unknown data preset '{other}' (expected round, schwarzschild, random)"
        ))),
    }
}

/// Metric presets with their base point: euclidean, s3 (k), quartic,
/// schwarzschild (m). The point can be overridden by px, py, pz.
pub fn metric_preset(config: &RunConfig) -> Result<(MetricPreset, [f64; 3])> {
    let metric = match config.preset.as_str() {
        "euclidean" => MetricPreset::Euclidean,
        "s3" | "constant_curvature" => MetricPreset::ConstantCurvature { k: config.param("k", 1.0) },
        "quartic" => MetricPreset::Conformal { phi: Polynomial::quartic() },
        "schwarzschild" => MetricPreset::SchwarzschildIsotropic { m: config.param("m", 1.0) },
        other => {
            return Err(Error::Input(format!(
                "unknown metric preset '{other}' (expected euclidean, s3, quartic, schwarzschild)"
            )))
        }
    };
    let d = crate::curvature::AmbientMetric::default_point(&metric);
    let p = [config.param("px", d[0]), config.param("py", d[1]), config.param("pz", d[2])];
    Ok((metric, p))
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluxEntry {
    pub radius: f64,
    pub mass: f64,
    pub asymptotic: bool,
}

/// Masses of one data set. Extension-derived fields are absent when the
/// data was refused.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassReport {
    pub hawking: f64,
    pub first_order: f64,
    pub adm_closed_form: Option<f64>,
    pub adm_flux: Vec<FluxEntry>,
    pub epsilon: f64,
    pub epsilon_threshold: f64,
    /// C·ε² with C = 1; the gap between the upper and lower estimates is
    /// expected below this for small ε.
    pub quadratic_error_bound: f64,
    pub refused: bool,
}

pub fn mass_report(data: &BartnikData, config: &RunConfig) -> Result<MassReport> {
    let epsilon = data.epsilon()?;
    let mut report = MassReport {
        hawking: data.hawking_mass(),
        first_order: data.first_order_mass(),
        adm_closed_form: None,
        adm_flux: Vec::new(),
        epsilon,
        epsilon_threshold: config.epsilon_threshold,
        quadratic_error_bound: epsilon * epsilon,
        refused: false,
    };
    match LinearizedExtension::build(data, config.epsilon_threshold) {
        Ok(ext) => {
            report.adm_closed_form = Some(adm_mass_closed_form(&ext));
            for &r in &config.flux_radii {
                let f = adm_mass_flux(&ext, r, data.grid())?;
                report.adm_flux.push(FluxEntry {
                    radius: f.radius,
                    mass: f.mass,
                    asymptotic: f.asymptotic,
                });
            }
        }
        Err(Error::Refused { .. }) => report.refused = true,
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// Reads an input file; failures are input errors naming the path.
pub fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_data(config: &RunConfig, data_file: Option<&Path>) -> Result<BartnikData> {
    match data_file {
        Some(path) => BartnikData::from_text(&read_input(path)?),
        None => data_preset(config, &grid_of(config)?),
    }
}

pub fn cmd_mass(config: &RunConfig, data_file: Option<&Path>) -> Result<Outcome> {
    let data = load_data(config, data_file)?;
    let report = mass_report(&data, config)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Numerical(format!("serialization: {e}")))?;
    let path = write_file(Path::new(&config.out), "mass_report.json", &(json + "\n"))?;
    let mut summary = format!(
        "hawking {:.12e}\nfirst_order {:.12e}\nepsilon {:.6e}\n",
        report.hawking, report.first_order, report.epsilon
    );
    match report.adm_closed_form {
        Some(m) => {
            let _ = writeln!(summary, "adm_closed_form {m:.12e}");
            for f in &report.adm_flux {
                let _ = writeln!(summary, "adm_flux r={} {:.12e}", f.radius, f.mass);
            }
        }
        None => {
            let _ = writeln!(summary, "extension refused: epsilon above threshold {}", config.epsilon_threshold);
        }
    }
    Ok(Outcome {
        code: if report.refused { EXIT_REFUSED } else { EXIT_OK },
        summary,
        files: vec![path],
    })
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in lx.iter().zip(&ly) {
        num += (a - mx) * (b - my);
        den += (a - mx) * (a - mx);
    }
    num / den
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualRow {
    pub epsilon: f64,
    pub static_sup: f64,
    pub boundary_metric_sup: f64,
    pub boundary_h_sup: f64,
}

/// Residuals of the extension of `data` rescaled to each ε in `epsilons`.
pub fn residual_sweep(data: &BartnikData, epsilons: &[f64], method: CurvatureMethod) -> Result<Vec<ResidualRow>> {
    let eps0 = data.epsilon()?;
    if eps0 == 0.0 {
        return Ok(Vec::new());
    }
    let (omega, kappa) = data.deviation();
    let points = sample_points(&STATIC_SAMPLE_RADII, STATIC_SAMPLE_DIRECTIONS);
    let mut rows = Vec::new();
    for &eps in epsilons {
        let s = eps / eps0;
        let d = BartnikData::from_deviation(&omega.scale(s), &kappa.scale(s))?;
        let ext = LinearizedExtension::build(&d, f64::INFINITY)?;
        let st = static_residual(&ext, &points, method)?;
        let b = boundary_residual(&ext, &d)?;
        rows.push(ResidualRow {
            epsilon: eps,
            static_sup: st.sup(),
            boundary_metric_sup: b.metric_sup,
            boundary_h_sup: b.mean_curvature_sup,
        });
    }
    Ok(rows)
}

pub fn residual_csv(rows: &[ResidualRow]) -> String {
    let mut s = String::from(
        "# epsilon: deviation size of the data; static_sup: sup of |Hess Φ - Φ Ric| and |ΔΦ| for the \
         extension; boundary_metric_sup: sup |induced metric - γ|; boundary_H_sup: sup |mean curvature - H|\n",
    );
    s.push_str("epsilon,static_sup,boundary_metric_sup,boundary_H_sup\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{:e},{:e},{:e},{:e}",
            r.epsilon, r.static_sup, r.boundary_metric_sup, r.boundary_h_sup
        );
    }
    s
}

pub fn cmd_extend(config: &RunConfig, data_file: Option<&Path>) -> Result<Outcome> {
    let data = load_data(config, data_file)?;
    let method = CurvatureMethod::FiniteDifference { step: config.fd_step };
    let rows = residual_sweep(&data, &config.epsilons, method)?;
    let out = Path::new(&config.out);
    let mut files = vec![write_file(out, "residuals.csv", &residual_csv(&rows))?];
    let mut summary = String::new();
    if rows.len() >= 2 {
        let e: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
        let st: Vec<f64> = rows.iter().map(|r| r.static_sup).collect();
        let bd: Vec<f64> = rows.iter().map(|r| r.boundary_metric_sup.max(r.boundary_h_sup)).collect();
        let _ = writeln!(summary, "static residual slope {:.4}", loglog_slope(&e, &st));
        let _ = writeln!(summary, "boundary residual slope {:.4}", loglog_slope(&e, &bd));
    }
    match LinearizedExtension::build(&data, config.epsilon_threshold) {
        Ok(ext) => {
            files.push(write_file(out, "extension.txt", &extension_to_string(&ext))?);
            let _ = writeln!(summary, "adm_closed_form {:.12e}", adm_mass_closed_form(&ext));
            Ok(Outcome {
                code: EXIT_OK,
                summary,
                files,
            })
        }
        Err(e @ Error::Refused { .. }) => {
            let _ = writeln!(summary, "extension refused: {e}");
            Ok(Outcome {
                code: EXIT_REFUSED,
                summary,
                files,
            })
        }
        Err(e) => Err(e),
    }
}

pub fn small_sphere_csv(rows: &[(f64, f64)]) -> String {
    let mut s = String::from(
        "# r: geodesic radius; mass: r times the first-order mass of the rescaled sphere data; \
         mass_over_r3 -> R(p)/12; mass_over_r5 -> ΔR(p)/120 when R(p) = 0\n",
    );
    s.push_str("r,mass,mass_over_r3,mass_over_r5\n");
    for (r, m) in rows {
        let _ = writeln!(s, "{r:e},{m:e},{:e},{:e}", m / r.powi(3), m / r.powi(5));
    }
    s
}

pub fn cmd_small_sphere(config: &RunConfig) -> Result<Outcome> {
    let (metric, p) = metric_preset(config)?;
    let grid = grid_of(config)?;
    let mode = match config.sphere_mode {
        SphereModeSetting::Series => SphereMode::Series,
        SphereModeSetting::Oracle => SphereMode::Oracle,
    };
    let rows = config
        .radii
        .iter()
        .map(|&r| Ok((r, small_sphere_mass(&metric, p, r, mode, &grid)?)))
        .collect::<Result<Vec<_>>>()?;
    let path = write_file(Path::new(&config.out), "small_sphere.csv", &small_sphere_csv(&rows))?;
    let mut summary = String::new();
    let decreasing = rows.windows(2).all(|w| w[1].0 < w[0].0);
    if rows.len() >= 3 && decreasing {
        for power in [3, 5] {
            let f = limit_fit(&rows, power)?;
            let _ = writeln!(
                summary,
                "limit mass/r^{power} = {:.8e} (error {:.2e}{})",
                f.coefficient,
                f.error,
                if f.non_monotone { ", non-monotone" } else { "" }
            );
        }
    }
    Ok(Outcome {
        code: EXIT_OK,
        summary,
        files: vec![path],
    })
}

/// Outcome of the analytic Poisson test Δu = 4r⁻⁵Y₁₀, whose decaying
/// solution is r⁻³Y₁₀.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoissonReport {
    /// Weighted (exponent 3, order 2) norm of u − r⁻³Y₁₀.
    pub weighted_residual: f64,
    /// max |Δ_FD u − f| at random exterior points.
    pub laplacian_residual: f64,
    /// ‖u‖ (exponent q+β) over ‖f‖ (exponent q+β+2).
    pub decay_constant: f64,
    /// Relative change of ‖u‖ when the sample radius doubles.
    pub doubling_change: f64,
    pub points: usize,
}

pub const POISSON_TOLERANCE: f64 = 1e-7;

pub fn poisson_check(seed: u64, points: usize) -> Result<(PoissonReport, RadialProfile)> {
    use rand::Rng;
    let (q, beta) = (2, 0.9);
    let source = RadialProfile::new(1, DEFAULT_R_MAX, DEFAULT_RADIAL_NODES, 5.0)?.with_sampled(1, 0, |r| 4.0 * r.powi(-5))?;
    let u = solve_poisson(&source, q, beta)?;
    let exact = RadialProfile::new(1, DEFAULT_R_MAX, 6, 3.0)?.with_power(1, 0, 1.0, 3.0)?;
    let analytic_source = RadialProfile::new(1, DEFAULT_R_MAX, 6, 5.0)?.with_power(1, 0, 4.0, 5.0)?;
    let samples = SampleSet::standard(DEFAULT_R_MAX)?;
    let weighted_residual = weighted_sup_norm(&Difference(&u, &exact), 3.0, 2, &samples)?.value;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut laplacian_residual = 0.0f64;
    for _ in 0..points {
        let dir = loop {
            let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 0.1 && n <= 1.0 {
                break v.map(|c| c / n);
            }
        };
        let r = 1.05 * (20.0f64).powf(rng.random_range(0.0..1.0));
        let x = dir.map(|c| c * r);
        let lap = fd_laplacian(&u, x, FD_LAPLACIAN_STEP)?;
        let f = analytic_source.components(&Jet::point(x, 0))?[0].value();
        laplacian_residual = laplacian_residual.max((lap - f).abs());
    }

    let rate = u.decay_rate();
    let norm_u = weighted_sup_norm(&u, rate, 2, &samples)?.value;
    let norm_f = weighted_sup_norm(&analytic_source, rate + 2.0, 2, &samples)?.value;
    let wider = weighted_sup_norm(&u, rate, 2, &SampleSet::standard(2.0 * DEFAULT_R_MAX)?)?.value;
    let report = PoissonReport {
        weighted_residual,
        laplacian_residual,
        decay_constant: norm_u / norm_f,
        doubling_change: (wider - norm_u).abs() / norm_u,
        points,
    };
    Ok((report, u.to_profile()?))
}

pub fn cmd_poisson_test(config: &RunConfig) -> Result<Outcome> {
    let (report, profile) = poisson_check(config.seed, 100)?;
    let out = Path::new(&config.out);
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Numerical(format!("serialization: {e}")))?;
    let files = vec![
        write_file(out, "poisson_solution.txt", &profile.to_text())?,
        write_file(out, "poisson_report.json", &(json + "\n"))?,
    ];
    let ok = report.weighted_residual <= POISSON_TOLERANCE && report.laplacian_residual <= POISSON_TOLERANCE;
    let summary = format!(
        "weighted residual {:.3e}\nFD Laplacian residual {:.3e}\ndecay constant {:.4}\n{}\n",
        report.weighted_residual,
        report.laplacian_residual,
        report.decay_constant,
        if ok { "PASS" } else { "FAIL" }
    );
    Ok(Outcome {
        code: if ok { EXIT_OK } else { EXIT_VALIDATION },
        summary,
        files,
    })
}
