use crate::jet::Jet;

/// Radial cutoff ψ: 1 for r ≤ 2, 0 for r ≥ 3, ψ(r) = B(3 − r) in between with
/// B(s) = f(s)/(f(s) + f(1 − s)), f(s) = exp(−1/s).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BumpProfile;

pub const BUMP_INNER: f64 = 2.0;
pub const BUMP_OUTER: f64 = 3.0;

/// Below this argument f and all its derivatives are under 1e−25 and are treated as zero.
const F_CUTOFF: f64 = 0.01;

fn f_jet(s: &Jet) -> Jet {
    if s.value() < F_CUTOFF {
        Jet::zero(s.order())
    } else {
        (-s.recip()).exp()
    }
}

impl BumpProfile {
    pub fn jet(&self, r: &Jet) -> Jet {
        let s = (-*r) + BUMP_OUTER;
        if s.value() <= 0.0 {
            return Jet::zero(r.order());
        }
        if s.value() >= 1.0 {
            return Jet::constant(1.0, r.order());
        }
        let a = f_jet(&s);
        let b = f_jet(&((-s) + 1.0));
        a * (a + b).recip()
    }

    pub fn value(&self, r: f64) -> f64 {
        self.jet(&Jet::variable(r, 0, 0)).value()
    }

    /// (ψ, ψ', ψ'').
    pub fn derivatives(&self, r: f64) -> (f64, f64, f64) {
        let j = self.jet(&Jet::variable(r, 0, 2));
        (j.value(), j.d1(0), j.d2(0, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus_and_transition() {
        let b = BumpProfile;
        assert_eq!(b.value(1.0), 1.0);
        assert_eq!(b.value(2.0), 1.0);
        assert_eq!(b.value(3.0), 0.0);
        assert_eq!(b.value(7.0), 0.0);
        let mid = b.value(2.5);
        assert!((mid - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 1..100 {
            let v = b.value(2.0 + k as f64 / 100.0);
            assert!(v <= prev && (0.0..=1.0).contains(&v));
            if (5..=95).contains(&k) {
                assert!(v > 0.0 && v < 1.0);
            }
            prev = v;
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let b = BumpProfile;
        let h = 1e-5;
        for r in [2.1, 2.37, 2.5, 2.8, 2.95] {
            let (_, d1, d2) = b.derivatives(r);
            let fd1 = (b.value(r + h) - b.value(r - h)) / (2.0 * h);
            let fd2 = (b.value(r + h) - 2.0 * b.value(r) + b.value(r - h)) / (h * h);
            assert!((d1 - fd1).abs() < 1e-8, "r={r}");
            assert!((d2 - fd2).abs() < 1e-4, "r={r}");
        }
    }
}
