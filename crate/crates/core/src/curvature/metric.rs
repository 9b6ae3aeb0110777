//! Ambient Riemannian 3-metrics evaluated as Taylor jets.

use crate::error::{input, Result};
use crate::jet::{Jet, JetMatrix, MAX_ORDER};

/// A Riemannian metric on (a domain of) R³.
pub trait AmbientMetric: Sync {
    /// Components g_ij as jets of the given order about `p`.
    fn metric_jet(&self, p: [f64; 3], order: usize) -> Result<JetMatrix>;

    /// Riemannian distance from `p` within which geodesics stay in the
    /// domain and the exponential map is expected to be a diffeomorphism.
    fn validity_radius(&self, p: [f64; 3]) -> f64;

    /// Base point used when none is given.
    fn default_point(&self) -> [f64; 3] {
        [0.0; 3]
    }

    fn check_point(&self, p: [f64; 3]) -> Result<()> {
        if self.validity_radius(p) > 0.0 {
            Ok(())
        } else {
            input(format!("point {p:?} lies outside the metric's domain"))
        }
    }
}

fn conformal_jet(factor: Jet) -> JetMatrix {
    let order = factor.order();
    std::array::from_fn(|a| std::array::from_fn(|b| if a == b { factor } else { Jet::zero(order) }))
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return input(format!("metric jets are available up to order {MAX_ORDER}, requested {order}"));
    }
    Ok(())
}

/// Polynomial Σ c·x^a y^b z^c.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub terms: Vec<(f64, [u32; 3])>,
}

impl Polynomial {
    /// |x|⁴ = (x² + y² + z²)².
    pub fn quartic() -> Self {
        Self {
            terms: vec![
                (1.0, [4, 0, 0]),
                (1.0, [0, 4, 0]),
                (1.0, [0, 0, 4]),
                (2.0, [2, 2, 0]),
                (2.0, [2, 0, 2]),
                (2.0, [0, 2, 2]),
            ],
        }
    }

    pub fn eval_jet(&self, x: &[Jet; 3]) -> Jet {
        let mut out = Jet::zero(x[0].order());
        for (c, e) in &self.terms {
            let mut t = Jet::constant(*c, x[0].order());
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t = t * xi.powi(k as i32);
                }
            }
            out += t;
        }
        out
    }
}

/// Closed-form presets.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricPreset {
    Euclidean,
    /// δ/(1 + K|x|²/4)², constant sectional curvature K.
    ConstantCurvature { k: f64 },
    /// e^{2φ}δ with polynomial φ.
    Conformal { phi: Polynomial },
    /// (1 + m/2|x|)⁴δ.
    SchwarzschildIsotropic { m: f64 },
}

impl AmbientMetric for MetricPreset {
    fn metric_jet(&self, p: [f64; 3], order: usize) -> Result<JetMatrix> {
        check_order(order)?;
        self.check_point(p)?;
        let x = Jet::point(p, order);
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let factor = match self {
            MetricPreset::Euclidean => Jet::constant(1.0, order),
            MetricPreset::ConstantCurvature { k } => (r2 * (0.25 * k) + 1.0).powi(-2),
            MetricPreset::Conformal { phi } => (phi.eval_jet(&x) * 2.0).exp(),
            MetricPreset::SchwarzschildIsotropic { m } => (r2.sqrt().recip() * (0.5 * m) + 1.0).powi(4),
        };
        Ok(conformal_jet(factor))
    }

    fn validity_radius(&self, p: [f64; 3]) -> f64 {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        match self {
            MetricPreset::Euclidean | MetricPreset::Conformal { .. } => f64::INFINITY,
            MetricPreset::ConstantCurvature { k } if *k > 0.0 => std::f64::consts::PI / k.sqrt(),
            // the chart boundary |x| = 2/√−K is at infinite distance
            MetricPreset::ConstantCurvature { k } if *k < 0.0 && r >= 2.0 / (-k).sqrt() => 0.0,
            MetricPreset::ConstantCurvature { .. } => f64::INFINITY,
            // coordinate displacement is bounded by arc length since the factor is ≥ 1
            MetricPreset::SchwarzschildIsotropic { m } => (r - 0.5 * m.abs()).max(0.0),
        }
    }

    fn default_point(&self) -> [f64; 3] {
        match self {
            MetricPreset::SchwarzschildIsotropic { m } => [2.0 * m.abs().max(0.5), 0.0, 0.0],
            _ => [0.0; 3],
        }
    }
}

/// Per-order FD steps; higher derivatives use wider stencils.
pub const FD_METRIC_STEPS: [f64; MAX_ORDER + 1] = [0.0, 1e-3, 2.5e-3, 5e-3, 1e-2];

// Second-order central stencils for the k-th derivative, offsets −2..=2.
const STENCILS: [[f64; 5]; MAX_ORDER + 1] = [
    [0.0, 0.0, 1.0, 0.0, 0.0],
    [0.0, -0.5, 0.0, 0.5, 0.0],
    [0.0, 1.0, -2.0, 1.0, 0.0],
    [-0.5, 1.0, 0.0, -1.0, 0.5],
    [1.0, -4.0, 6.0, -4.0, 1.0],
];

/// A metric known only pointwise; jets come from tensor-product central
/// differences with one Richardson step.
pub struct FdMetric<F> {
    pub eval: F,
    pub radius: f64,
}

impl<F: Fn([f64; 3]) -> [[f64; 3]; 3] + Sync> FdMetric<F> {
    fn partial(&self, p: [f64; 3], e: [usize; 3], h: f64) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        let offsets = |k: usize| (0..5).filter(move |&i| STENCILS[k][i] != 0.0);
        for i in offsets(e[0]) {
            for j in offsets(e[1]) {
                for k in offsets(e[2]) {
                    let w = STENCILS[e[0]][i] * STENCILS[e[1]][j] * STENCILS[e[2]][k];
                    let x = [
                        p[0] + (i as f64 - 2.0) * h,
                        p[1] + (j as f64 - 2.0) * h,
                        p[2] + (k as f64 - 2.0) * h,
                    ];
                    let g = (self.eval)(x);
                    for a in 0..3 {
                        for b in 0..3 {
                            out[a][b] += w * g[a][b];
                        }
                    }
                }
            }
        }
        let n = (e[0] + e[1] + e[2]) as i32;
        for row in out.iter_mut() {
            for v in row.iter_mut() {
                *v /= h.powi(n);
            }
        }
        out
    }
}

impl<F: Fn([f64; 3]) -> [[f64; 3]; 3] + Sync> AmbientMetric for FdMetric<F> {
    fn metric_jet(&self, p: [f64; 3], order: usize) -> Result<JetMatrix> {
        check_order(order)?;
        self.check_point(p)?;
        let mut parts = Vec::new();
        let exponents = (0..=order).flat_map(|n| (0..=n).flat_map(move |a| (0..=n - a).map(move |b| [a, b, n - a - b])));
        for e in exponents {
            let n = e[0] + e[1] + e[2];
            let d = if n == 0 {
                (self.eval)(p)
            } else {
                let h = FD_METRIC_STEPS[n];
                let coarse = self.partial(p, e, h);
                let fine = self.partial(p, e, 0.5 * h);
                std::array::from_fn(|a| std::array::from_fn(|b| (4.0 * fine[a][b] - coarse[a][b]) / 3.0))
            };
            parts.push((e, d));
        }
        let lookup = |e: [usize; 3], a: usize, b: usize| {
            parts.iter().find(|(f, _)| *f == e).map_or(0.0, |(_, d)| d[a][b])
        };
        Ok(std::array::from_fn(|a| {
            std::array::from_fn(|b| Jet::from_partials(order, |e| 0.5 * (lookup(e, a, b) + lookup(e, b, a))))
        }))
    }

    fn validity_radius(&self, p: [f64; 3]) -> f64 {
        (self.radius - (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()).max(0.0)
    }
}
