//! Truncated multivariate Taylor arithmetic in three variables.
//!
//! A [`Jet`] carries the Taylor coefficients of a smooth function of
//! `(x, y, z)` about a base point, truncated at total degree `order <= 4`.
//! Arithmetic on jets propagates exact partial derivatives, which is how the
//! crate differentiates metric components, spherical harmonics written in
//! Cartesian form, and bump profiles without finite differences.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

/// Highest supported total degree.
pub const MAX_ORDER: usize = 4;
const NCOEF: usize = 35;
/// Number of monomials of total degree `<= k`, for k = 0..=4.
const PREFIX: [usize; 5] = [1, 4, 10, 20, 35];

struct Tables {
    exps: [[u8; 3]; NCOEF],
    index: [[[u8; 5]; 5]; 5],
    /// (a, b, target) with deg(a) + deg(b) <= MAX_ORDER, sorted by degree sum.
    mul: Vec<(u8, u8, u8)>,
    /// `mul_prefix[k]` entries of `mul` have degree sum <= k.
    mul_prefix: [usize; 5],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut exps = [[0u8; 3]; NCOEF];
        let mut index = [[[u8::MAX; 5]; 5]; 5];
        let mut n = 0;
        for deg in 0..=MAX_ORDER {
            for i in (0..=deg).rev() {
                for j in (0..=deg - i).rev() {
                    let k = deg - i - j;
                    exps[n] = [i as u8, j as u8, k as u8];
                    index[i][j][k] = n as u8;
                    n += 1;
                }
            }
        }
        debug_assert_eq!(n, NCOEF);
        let deg = |e: [u8; 3]| (e[0] + e[1] + e[2]) as usize;
        let mut mul = Vec::new();
        for a in 0..NCOEF {
            for b in 0..NCOEF {
                let (ea, eb) = (exps[a], exps[b]);
                if deg(ea) + deg(eb) <= MAX_ORDER {
                    let t = index[(ea[0] + eb[0]) as usize][(ea[1] + eb[1]) as usize]
                        [(ea[2] + eb[2]) as usize];
                    mul.push((a as u8, b as u8, t));
                }
            }
        }
        mul.sort_by_key(|&(a, b, _)| deg(exps[a as usize]) + deg(exps[b as usize]));
        let mut mul_prefix = [0usize; 5];
        for (k, slot) in mul_prefix.iter_mut().enumerate() {
            *slot = mul
                .iter()
                .take_while(|&&(a, b, _)| deg(exps[a as usize]) + deg(exps[b as usize]) <= k)
                .count();
        }
        Tables {
            exps,
            index,
            mul,
            mul_prefix,
        }
    })
}

fn monomial(e: [usize; 3]) -> usize {
    tables().index[e[0]][e[1]][e[2]] as usize
}

/// Truncated Taylor polynomial of a function of three variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    c: [f64; NCOEF],
    order: u8,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut c = [0.0; NCOEF];
        c[0] = value;
        Jet {
            c,
            order: order as u8,
        }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(0.0, order)
    }

    /// The coordinate function `x_axis`, expanded about `value`.
    pub fn variable(value: f64, axis: usize, order: usize) -> Self {
        let mut j = Self::constant(value, order);
        if order >= 1 {
            let mut e = [0; 3];
            e[axis] = 1;
            j.c[monomial(e)] = 1.0;
        }
        j
    }

    /// Coordinate jets `(x, y, z)` about the point `p`.
    pub fn point(p: [f64; 3], order: usize) -> [Jet; 3] {
        [
            Self::variable(p[0], 0, order),
            Self::variable(p[1], 1, order),
            Self::variable(p[2], 2, order),
        ]
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    fn active(&self) -> usize {
        PREFIX[self.order as usize]
    }

    /// Taylor coefficient of `dx^e0 dy^e1 dz^e2`.
    pub fn coeff(&self, e: [usize; 3]) -> f64 {
        if e[0] + e[1] + e[2] > self.order() {
            return 0.0;
        }
        self.c[monomial(e)]
    }

    /// Partial derivative `∂^{e0}_x ∂^{e1}_y ∂^{e2}_z` at the base point.
    pub fn partial(&self, e: [usize; 3]) -> f64 {
        let fact = |n: usize| (1..=n).product::<usize>() as f64;
        self.coeff(e) * fact(e[0]) * fact(e[1]) * fact(e[2])
    }

    pub fn d1(&self, i: usize) -> f64 {
        let mut e = [0; 3];
        e[i] = 1;
        self.partial(e)
    }

    pub fn d2(&self, i: usize, j: usize) -> f64 {
        let mut e = [0; 3];
        e[i] += 1;
        e[j] += 1;
        self.partial(e)
    }

    pub fn gradient(&self) -> [f64; 3] {
        [self.d1(0), self.d1(1), self.d1(2)]
    }

    pub fn hessian(&self) -> [[f64; 3]; 3] {
        let mut h = [[0.0; 3]; 3];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, hij) in row.iter_mut().enumerate() {
                *hij = self.d2(i, j);
            }
        }
        h
    }

    /// Drops terms above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        let mut out = Self::zero(order);
        out.c[..PREFIX[order]].copy_from_slice(&self.c[..PREFIX[order]]);
        out
    }

    /// Builds a jet from partial derivatives up to second order.
    pub fn from_derivatives(value: f64, grad: [f64; 3], hess: [[f64; 3]; 3], order: usize) -> Self {
        let order = order.min(2);
        let mut j = Self::constant(value, order);
        if order >= 1 {
            for (i, g) in grad.iter().enumerate() {
                let mut e = [0; 3];
                e[i] = 1;
                j.c[monomial(e)] = *g;
            }
        }
        if order >= 2 {
            for i in 0..3 {
                for k in i..3 {
                    let mut e = [0; 3];
                    e[i] += 1;
                    e[k] += 1;
                    let scale = if i == k { 0.5 } else { 1.0 };
                    j.c[monomial(e)] = hess[i][k] * scale;
                }
            }
        }
        j
    }

    /// Builds a jet from all partial derivatives `∂^e f` with |e| <= order.
    pub fn from_partials(order: usize, mut partial: impl FnMut([usize; 3]) -> f64) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let fact = |n: usize| (1..=n).product::<usize>() as f64;
        let t = tables();
        let mut j = Self::zero(order);
        for k in 0..PREFIX[order] {
            let e = t.exps[k].map(|v| v as usize);
            j.c[k] = partial(e) / (fact(e[0]) * fact(e[1]) * fact(e[2]));
        }
        j
    }

    /// Partial derivative along `axis`; the result has one order less.
    pub fn diff(&self, axis: usize) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let t = tables();
        let order = self.order() - 1;
        let mut out = Self::zero(order);
        for n in 0..PREFIX[order] {
            let mut e = t.exps[n];
            e[axis] += 1;
            let src = t.index[e[0] as usize][e[1] as usize][e[2] as usize] as usize;
            out.c[n] = self.c[src] * e[axis] as f64;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for v in out.c[..self.active()].iter_mut() {
            *v *= s;
        }
        out
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Jet) {
        let order = self.order.min(other.order);
        self.order = order;
        for n in 0..PREFIX[order as usize] {
            self.c[n] += s * other.c[n];
        }
        for v in self.c[PREFIX[order as usize]..].iter_mut() {
            *v = 0.0;
        }
    }

    /// Composition `f(self)` from the Taylor coefficients `f^(k)(v)/k!` at the base value.
    pub fn compose(&self, taylor: &[f64]) -> Self {
        let order = self.order();
        let mut du = *self;
        du.c[0] = 0.0;
        let mut out = Self::constant(taylor[0], order);
        let mut power = Self::constant(1.0, order);
        for coef in taylor.iter().take(order + 1).skip(1) {
            power = power * du;
            out.axpy(*coef, &power);
        }
        out
    }

    pub fn recip(&self) -> Self {
        let v = self.value();
        let mut t = [0.0; MAX_ORDER + 1];
        let mut p = 1.0 / v;
        for (k, tk) in t.iter_mut().enumerate() {
            *tk = if k % 2 == 0 { p } else { -p };
            p /= v;
        }
        self.compose(&t)
    }

    pub fn sqrt(&self) -> Self {
        let v = self.value();
        let mut t = [0.0; MAX_ORDER + 1];
        // binomial(1/2, k) v^(1/2 - k)
        let mut binom = 1.0;
        let mut p = v.sqrt();
        for (k, tk) in t.iter_mut().enumerate() {
            *tk = binom * p;
            binom *= (0.5 - k as f64) / (k as f64 + 1.0);
            p /= v;
        }
        self.compose(&t)
    }

    /// Real power `self^a` for a positive base value.
    pub fn powf(&self, a: f64) -> Self {
        let v = self.value();
        let mut t = [0.0; MAX_ORDER + 1];
        let mut binom = 1.0;
        let mut p = v.powf(a);
        for (k, tk) in t.iter_mut().enumerate() {
            *tk = binom * p;
            binom *= (a - k as f64) / (k as f64 + 1.0);
            p /= v;
        }
        self.compose(&t)
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        let mut t = [0.0; MAX_ORDER + 1];
        let mut fact = 1.0;
        for (k, tk) in t.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *tk = e / fact;
        }
        self.compose(&t)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let derivs = [s, c, -s, -c];
        let mut t = [0.0; MAX_ORDER + 1];
        let mut fact = 1.0;
        for (k, tk) in t.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *tk = derivs[k % 4] / fact;
        }
        self.compose(&t)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let derivs = [c, -s, -c, s];
        let mut t = [0.0; MAX_ORDER + 1];
        let mut fact = 1.0;
        for (k, tk) in t.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *tk = derivs[k % 4] / fact;
        }
        self.compose(&t)
    }

    pub fn powi(&self, n: i32) -> Self {
        if n >= 0 {
            let mut out = Self::constant(1.0, self.order());
            for _ in 0..n {
                out = out * *self;
            }
            out
        } else {
            self.recip().powi(-n)
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut out = self;
        out.axpy(1.0, &rhs);
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let mut out = self;
        out.axpy(-1.0, &rhs);
        out
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        self.axpy(1.0, &rhs);
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        self.axpy(-1.0, &rhs);
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let t = tables();
        let order = self.order.min(rhs.order);
        let mut out = Jet::zero(order as usize);
        for &(a, b, target) in &t.mul[..t.mul_prefix[order as usize]] {
            out.c[target as usize] += self.c[a as usize] * rhs.c[b as usize];
        }
        out
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self;
        out.c[0] += rhs;
        out
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        self + (-rhs)
    }
}

/// Symmetric 3x3 matrix of jets.
pub type JetMatrix = [[Jet; 3]; 3];

/// Inverse and determinant of a 3x3 jet matrix (by cofactors).
pub fn invert3(m: &JetMatrix) -> (JetMatrix, Jet) {
    let cof = |i: usize, j: usize| {
        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
        m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
    };
    let mut adj = [[Jet::zero(0); 3]; 3];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, a) in row.iter_mut().enumerate() {
            // adjugate is the transposed cofactor matrix
            *a = cof(j, i);
        }
    }
    let det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
    let inv_det = det.recip();
    let mut inv = adj;
    for row in inv.iter_mut() {
        for a in row.iter_mut() {
            *a = *a * inv_det;
        }
    }
    (inv, det)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn product_rule_matches_closed_form() {
        let [x, y, z] = Jet::point([0.3, -0.7, 1.1], 4);
        let f = x * x * y + z * y * y * y;
        // ∂x∂y f = 2x, ∂y^3 f = 6z, ∂y^2 ∂z f = 6y
        assert!(close(f.partial([1, 1, 0]), 2.0 * 0.3, 1e-14));
        assert!(close(f.partial([0, 3, 0]), 6.0 * 1.1, 1e-14));
        assert!(close(f.partial([0, 2, 1]), 6.0 * -0.7, 1e-14));
        assert!(close(f.partial([0, 0, 0]), 0.09 * -0.7 + 1.1 * -0.343, 1e-14));
    }

    #[test]
    fn elementary_functions_match_derivatives() {
        let x = Jet::variable(0.8, 0, 4);
        let r = x.recip();
        // d^4/dx^4 (1/x) = 24 / x^5
        assert!(close(r.partial([4, 0, 0]), 24.0 / 0.8f64.powi(5), 1e-12));
        let s = x.sqrt();
        // d^3/dx^3 sqrt(x) = 3/8 x^{-5/2}
        assert!(close(s.partial([3, 0, 0]), 0.375 * 0.8f64.powf(-2.5), 1e-12));
        let e = (x * x).exp();
        // d^2/dx^2 exp(x^2) = (2 + 4x^2) exp(x^2)
        assert!(close(e.partial([2, 0, 0]), (2.0 + 4.0 * 0.64) * 0.64f64.exp(), 1e-12));
        let p = x.powf(-2.5);
        assert!(close(p.partial([1, 0, 0]), -2.5 * 0.8f64.powf(-3.5), 1e-12));
        let c = x.cos();
        assert!(close(c.partial([3, 0, 0]), 0.8f64.sin(), 1e-12));
    }

    #[test]
    fn diff_lowers_order_and_differentiates() {
        let [x, y, _] = Jet::point([1.0, 2.0, 3.0], 3);
        let f = x * x * x * y;
        let fx = f.diff(0);
        assert_eq!(fx.order(), 2);
        assert!(close(fx.value(), 3.0 * 2.0, 1e-14));
        assert!(close(fx.d2(0, 1), 6.0, 1e-14));
    }

    #[test]
    fn inverse_of_metric_jet() {
        let [x, y, z] = Jet::point([0.2, 0.1, -0.3], 2);
        let one = Jet::constant(1.0, 2);
        let zero = Jet::zero(2);
        let m = [
            [one + x * x, x * y, zero],
            [x * y, one + y * z, z],
            [zero, z, one + z * z],
        ];
        let (inv, _) = invert3(&m);
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Jet::zero(2);
                for k in 0..3 {
                    s += m[i][k] * inv[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((s.value() - target).abs() < 1e-14);
                assert!(s.gradient().iter().all(|g| g.abs() < 1e-14));
                assert!(s.hessian().iter().flatten().all(|g| g.abs() < 1e-13));
            }
        }
    }
}
