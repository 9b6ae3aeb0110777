use num_complex::Complex64;

/// Spherical-harmonic coefficients c_ℓm, 0 ≤ ℓ ≤ L, |m| ≤ ℓ, in the
/// orthonormal Condon–Shortley basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ShCoeffs {
    band_limit: usize,
    data: Vec<Complex64>,
    real: bool,
}

impl ShCoeffs {
    pub fn zeros(band_limit: usize, real: bool) -> Self {
        ShCoeffs {
            band_limit,
            data: vec![Complex64::new(0.0, 0.0); (band_limit + 1) * (band_limit + 1)],
            real,
        }
    }

    /// Builds from a full (ℓ, m) listing; flagged real when the listing
    /// satisfies c_ℓ,−m = (−1)^m conj(c_ℓm) exactly.
    pub fn from_modes(band_limit: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), (band_limit + 1) * (band_limit + 1));
        let mut out = ShCoeffs {
            band_limit,
            data,
            real: false,
        };
        let real = out.iter().all(|(l, m, c)| {
            let partner = out.get(l, -m);
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            c == partner.conj() * sign
        });
        out.real = real;
        out
    }

    #[inline]
    fn index(l: usize, m: i64) -> usize {
        ((l * l + l) as i64 + m) as usize
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Coefficient of Y_ℓm; zero outside the stored range.
    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        if l > self.band_limit || m.unsigned_abs() as usize > l {
            return Complex64::new(0.0, 0.0);
        }
        self.data[Self::index(l, m)]
    }

    /// Sets c_ℓm; for real coefficient sets the partner c_ℓ,−m = (−1)^m conj(c) is set too
    /// (and the imaginary part of c_ℓ0 is dropped).
    pub fn set(&mut self, l: usize, m: i64, c: Complex64) {
        assert!(l <= self.band_limit && m.unsigned_abs() as usize <= l);
        if self.real {
            if m == 0 {
                self.data[Self::index(l, 0)] = Complex64::new(c.re, 0.0);
            } else {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                self.data[Self::index(l, m)] = c;
                self.data[Self::index(l, -m)] = c.conj() * sign;
            }
        } else {
            self.data[Self::index(l, m)] = c;
        }
    }

    /// Copy restricted or zero-padded to a new band limit.
    pub fn with_band_limit(&self, band_limit: usize) -> Self {
        let mut out = Self::zeros(band_limit, self.real);
        for l in 0..=band_limit.min(self.band_limit) {
            for m in -(l as i64)..=l as i64 {
                out.data[Self::index(l, m)] = self.get(l, m);
            }
        }
        out
    }

    /// Iterator over (ℓ, m, c_ℓm).
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, Complex64)> + '_ {
        (0..=self.band_limit).flat_map(move |l| {
            (-(l as i64)..=l as i64).map(move |m| (l, m, self.data[Self::index(l, m)]))
        })
    }

    /// Multiplies each degree-ℓ block by `f(ℓ)`.
    pub fn map_degree(&self, f: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for l in 0..=self.band_limit {
            let s = f(l);
            for m in -(l as i64)..=l as i64 {
                out.data[Self::index(l, m)] *= s;
            }
        }
        out
    }

    /// Per-mode map; the result is flagged real only if both the input is and `real` is set.
    pub fn map_modes(&self, real: bool, f: impl Fn(usize, i64, Complex64) -> Complex64) -> Self {
        let mut out = Self::zeros(self.band_limit, self.real && real);
        for (l, m, c) in self.iter() {
            out.data[Self::index(l, m)] = f(l, m, c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_degree(|_| s)
    }

    /// `a·self + b·other`, padded to the larger band limit.
    pub fn lin_comb(&self, a: f64, other: &ShCoeffs, b: f64) -> Self {
        let l = self.band_limit.max(other.band_limit);
        let mut out = Self::zeros(l, self.real && other.real);
        for ll in 0..=l {
            for m in -(ll as i64)..=ll as i64 {
                out.data[Self::index(ll, m)] = self.get(ll, m) * a + other.get(ll, m) * b;
            }
        }
        out
    }

    /// Hermitian inner product Σ conj(a_ℓm) b_ℓm.
    pub fn inner(&self, other: &ShCoeffs) -> Complex64 {
        let l = self.band_limit.min(other.band_limit);
        (0..=l)
            .flat_map(|ll| (-(ll as i64)..=ll as i64).map(move |m| (ll, m)))
            .map(|(ll, m)| self.get(ll, m).conj() * other.get(ll, m))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Weighted Sobolev-type sum Σ w(ℓ) |c_ℓm|².
    pub fn weighted_sum(&self, w: impl Fn(usize) -> f64) -> f64 {
        self.iter().map(|(l, _, c)| w(l) * c.norm_sqr()).sum()
    }

    /// Single harmonic Y_ℓm with unit coefficient (complex unless m = 0).
    pub fn unit(band_limit: usize, l: usize, m: i64) -> Self {
        let mut out = Self::zeros(band_limit, m == 0);
        out.set(l, m, Complex64::new(1.0, 0.0));
        out
    }

    /// Real combination c·Y_ℓm + conj part, i.e. a real field with c_ℓm = c.
    pub fn real_mode(band_limit: usize, l: usize, m: i64, c: Complex64) -> Self {
        let mut out = Self::zeros(band_limit, true);
        out.set(l, m, c);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reality_partner_is_set() {
        let mut c = ShCoeffs::zeros(4, true);
        c.set(3, 2, Complex64::new(1.0, 2.0));
        c.set(3, -1, Complex64::new(0.5, -1.0));
        assert_eq!(c.get(3, -2), Complex64::new(1.0, -2.0));
        assert_eq!(c.get(3, 1), Complex64::new(-0.5, -1.0));
        assert_eq!(c.get(5, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn band_limit_padding_round_trips() {
        let mut c = ShCoeffs::zeros(3, false);
        c.set(2, -1, Complex64::new(0.25, 0.5));
        let up = c.with_band_limit(6);
        assert_eq!(up.with_band_limit(3), c);
        assert_eq!(up.norm(), c.norm());
    }
}
