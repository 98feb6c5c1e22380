//! Möbius automorphisms of the unit ball.
//!
//! For an interior parameter `a` the automorphism is
//! `phi_a = (s_a Q_a + P_a) ∘ m_a` with `m_a(x) = (a - x) / (1 - <x, a>)`,
//! `s_a = sqrt(1 - ||a||^2)`, `P_a` the orthogonal projection onto `span{a}`
//! and `Q_a = I - P_a`. It swaps `0` and `a` and is an involution.
//!
//! At `a = 0` the projection is taken to be zero, so `phi_0 = -id`.

use crate::error::Result;
use crate::point::{Point, C64, CONE};

#[derive(Debug, Clone, PartialEq)]
pub struct MobiusAutomorphism {
    a: Point,
    norm_a_sq: f64,
    s_a: f64,
}

impl MobiusAutomorphism {
    pub fn new(a: Point) -> Result<Self> {
        a.ensure_interior("automorphism parameter")?;
        let norm_a_sq = a.norm_sq();
        Ok(Self { s_a: (1.0 - norm_a_sq).sqrt(), norm_a_sq, a })
    }

    pub fn parameter(&self) -> &Point {
        &self.a
    }

    pub fn s(&self) -> f64 {
        self.s_a
    }

    pub fn norm_a_sq(&self) -> f64 {
        self.norm_a_sq
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// `P_a y`; zero when `a = 0`.
    pub fn project(&self, y: &Point) -> Point {
        if self.norm_a_sq == 0.0 {
            return Point::zeros(y.dim());
        }
        self.a.scale(y.inner(&self.a) / self.norm_a_sq)
    }

    /// Applies the map, checking that `x` is interior.
    pub fn apply(&self, x: &Point) -> Result<Point> {
        x.ensure_dim(self.dim())?;
        x.ensure_interior("argument")?;
        Ok(self.apply_unchecked(x))
    }

    /// Applies the map to any `x` with `<x, a> != 1`. Used for boundary probes
    /// and inside quadrature loops where the caller guarantees the domain.
    pub fn apply_unchecked(&self, x: &Point) -> Point {
        let denom = CONE - x.inner(&self.a);
        assert!(denom.norm() > 0.0, "Möbius denominator vanished");
        let m = (&self.a - x).scale(denom.inv());
        if self.norm_a_sq == 0.0 {
            return m;
        }
        let p = self.project(&m);
        // s (m - p) + p
        (&m - &p).scale_real(self.s_a).axpy(CONE, &p)
    }

    pub fn derivative(&self, at: DerivativeAt) -> LinearMap {
        let s = self.s_a;
        let (on_a, on_complement) = match at {
            DerivativeAt::Origin => (-s * s, -s),
            DerivativeAt::FixedA => (-1.0 / (s * s), -1.0 / s),
        };
        LinearMap { a: self.a.clone(), norm_a_sq: self.norm_a_sq, on_a, on_complement }
    }
}

/// Where to evaluate the derivative of `phi_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeAt {
    /// `phi_a'(0) = -s_a^2 P_a - s_a Q_a`
    Origin,
    /// `phi_a'(a) = -(1/s_a^2) P_a - (1/s_a) Q_a`
    FixedA,
}

/// A linear map of the form `y -> on_a * P_a y + on_complement * Q_a y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    a: Point,
    norm_a_sq: f64,
    on_a: f64,
    on_complement: f64,
}

impl LinearMap {
    pub fn coefficients(&self) -> (f64, f64) {
        (self.on_a, self.on_complement)
    }

    fn split(&self, y: &Point) -> (Point, Point) {
        if self.norm_a_sq == 0.0 {
            return (Point::zeros(y.dim()), y.clone());
        }
        let p = self.a.scale(y.inner(&self.a) / self.norm_a_sq);
        let q = y - &p;
        (p, q)
    }

    pub fn apply(&self, y: &Point) -> Point {
        let (p, q) = self.split(y);
        p.scale_real(self.on_a).axpy(C64::new(self.on_complement, 0.0), &q)
    }

    /// Bilinear transpose: the map `g -> T^t g` with `y.pairing(T^t g) = (T y).pairing(g)`.
    ///
    /// `P_a` has matrix `a a^H / ||a||^2`, so its transpose is
    /// `conj(a) a^t / ||a||^2`.
    pub fn transpose_apply(&self, g: &Point) -> Point {
        if self.norm_a_sq == 0.0 {
            return g.scale_real(self.on_complement);
        }
        let a_bar = self.a.conj();
        let p = a_bar.scale(self.a.pairing(g) / self.norm_a_sq);
        let q = g - &p;
        p.scale_real(self.on_a).axpy(C64::new(self.on_complement, 0.0), &q)
    }

    /// Dense row-major matrix, mostly for tests.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let n = self.a.dim();
        let cols: Vec<Point> = (0..n).map(|j| self.apply(&Point::basis(n, j))).collect();
        (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
    }
}

/// `phi_a(x)` with both arguments checked to be interior.
pub fn mobius_apply(a: &Point, x: &Point) -> Result<Point> {
    MobiusAutomorphism::new(a.clone())?.apply(x)
}

pub fn mobius_derivative(a: &Point, at: DerivativeAt) -> Result<LinearMap> {
    Ok(MobiusAutomorphism::new(a.clone())?.derivative(at))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::c;

    fn p(v: &[(f64, f64)]) -> Point {
        Point::new(v.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
    }

    #[test]
    fn swaps_zero_and_a() {
        let a = p(&[(0.5, 0.0), (0.0, 0.0)]);
        assert_eq!(mobius_apply(&a, &Point::zeros(2)).unwrap(), a);
        assert!(mobius_apply(&a, &a).unwrap().norm() < 1e-15);
    }

    #[test]
    fn zero_parameter_is_negation() {
        let x = p(&[(0.3, 0.0), (0.0, 0.4)]);
        let y = mobius_apply(&Point::zeros(2), &x).unwrap();
        assert_eq!(y, p(&[(-0.3, 0.0), (0.0, -0.4)]));
    }

    #[test]
    fn rejects_non_interior() {
        let a = p(&[(1.0, 0.0)]);
        assert!(mobius_apply(&a, &Point::zeros(1)).is_err());
        let a = p(&[(0.2, 0.0)]);
        assert!(mobius_apply(&a, &p(&[(0.0, 1.0)])).is_err());
    }

    #[test]
    fn derivative_examples() {
        let d0 = mobius_derivative(&Point::zeros(3), DerivativeAt::Origin).unwrap();
        let y = p(&[(1.0, 2.0), (0.5, 0.0), (0.0, -1.0)]);
        assert_eq!(d0.apply(&y), -&y);

        let a = p(&[(0.6, 0.0), (0.0, 0.0)]);
        let d = mobius_derivative(&a, DerivativeAt::Origin).unwrap();
        let out = d.apply(&p(&[(1.0, 0.0), (0.0, 0.0)]));
        assert!((out[0] - c(-0.64, 0.0)).norm() < 1e-15);
        assert!(out[1].norm() < 1e-15);
    }

    #[test]
    fn derivative_pair_is_inverse() {
        let a = p(&[(0.3, 0.2), (-0.1, 0.4), (0.05, 0.0)]);
        let d0 = mobius_derivative(&a, DerivativeAt::Origin).unwrap();
        let da = mobius_derivative(&a, DerivativeAt::FixedA).unwrap();
        let y = p(&[(0.7, -0.1), (0.2, 0.9), (-1.0, 0.3)]);
        assert!(d0.apply(&da.apply(&y)).distance(&y) < 1e-13);
        assert!(da.apply(&d0.apply(&y)).distance(&y) < 1e-13);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let a = p(&[(0.3, 0.2), (-0.1, 0.4)]);
        let m = MobiusAutomorphism::new(a).unwrap();
        let d0 = m.derivative(DerivativeAt::Origin);
        let y = p(&[(0.2, -0.3), (0.5, 0.1)]);
        let h = 1e-6;
        let plus = m.apply(&y.scale_real(h)).unwrap();
        let minus = m.apply(&y.scale_real(-h)).unwrap();
        let fd = (&plus - &minus).scale_real(0.5 / h);
        assert!(fd.distance(&d0.apply(&y)) < 1e-8);
    }

    #[test]
    fn transpose_is_bilinear_adjoint() {
        let a = p(&[(0.3, 0.2), (-0.1, 0.4), (0.05, -0.3)]);
        let d = mobius_derivative(&a, DerivativeAt::Origin).unwrap();
        let y = p(&[(0.7, -0.1), (0.2, 0.9), (-1.0, 0.3)]);
        let g = p(&[(0.1, 0.1), (-0.4, 0.2), (0.3, 0.0)]);
        let lhs = y.pairing(&d.transpose_apply(&g));
        let rhs = d.apply(&y).pairing(&g);
        assert!((lhs - rhs).norm() < 1e-14);
    }
}
