//! Complex coordinate vectors of a fixed truncation dimension.
//!
//! A [`Point`] is just a vector in `C^n`; it stands in for elements of the
//! Hilbert space written in the fixed orthonormal basis `(e_k)`. Two pairings
//! are used throughout and they are easy to confuse:
//!
//! * [`Point::inner`] is the Hermitian inner product `<x, y> = sum x_k conj(y_k)`,
//!   linear in the first slot.
//! * [`Point::pairing`] is the bilinear pairing `sum x_k y_k`. Gradients are
//!   stored as bilinear coefficient vectors, so `f'(x)(y) = y.pairing(grad)`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Zero complex scalar.
pub const CZERO: C64 = C64::new(0.0, 0.0);
/// Unit complex scalar.
pub const CONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<C64>,
}

impl Point {
    /// Any finite vector; no ball constraint.
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite { what: "point coordinates" });
        }
        Ok(Self { coords })
    }

    /// A point of the open unit ball. Rejects `||x|| >= 1`.
    pub fn interior(coords: Vec<C64>) -> Result<Self> {
        let p = Self::new(coords)?;
        p.ensure_interior("point")?;
        Ok(p)
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<C64>) -> Self {
        Self { coords }
    }

    pub fn from_real(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&r| C64::new(r, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self { coords: vec![CZERO; n] }
    }

    /// The basis vector `e_k` (0-based index).
    pub fn basis(n: usize, k: usize) -> Self {
        let mut p = Self::zeros(n);
        p.coords[k] = CONE;
        p
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<C64> {
        self.coords
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `1 - ||x||^2`.
    pub fn defect(&self) -> f64 {
        1.0 - self.norm_sq()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == CZERO)
    }

    pub fn is_interior(&self) -> bool {
        self.norm_sq() < 1.0
    }

    pub fn ensure_interior(&self, what: &'static str) -> Result<()> {
        let n2 = self.norm_sq();
        if n2 < 1.0 {
            Ok(())
        } else {
            Err(Error::OutsideBall { what, norm: n2.sqrt() })
        }
    }

    pub fn ensure_dim(&self, n: usize) -> Result<()> {
        if self.dim() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: n, got: self.dim() })
        }
    }

    /// Hermitian inner product, linear in `self`.
    pub fn inner(&self, other: &Point) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    /// Bilinear pairing `sum x_k y_k`.
    pub fn pairing(&self, other: &Point) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    pub fn conj(&self) -> Point {
        Self { coords: self.coords.iter().map(|c| c.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Point {
        Self { coords: self.coords.iter().map(|c| c * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Point {
        Self { coords: self.coords.iter().map(|c| c * s).collect() }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: C64, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Unit vector in the direction of `self`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Point> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale_real(1.0 / n))
    }

    /// Coordinates as `(re, im)` pairs, for error payloads and reports.
    pub fn to_pairs(&self) -> Vec<(f64, f64)> {
        self.coords.iter().map(|c| (c.re, c.im)).collect()
    }

    /// Real coordinates `[re_0, im_0, re_1, im_1, ...]`.
    pub fn to_real(&self) -> Vec<f64> {
        self.coords.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn from_real_pairs(v: &[f64]) -> Point {
        Self {
            coords: v.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect(),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.coords.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.coords.iter().map(|c| format!("{:.6}{:+.6}i", c.re, c.im)))
            .finish()
    }
}

impl Index<usize> for Point {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.coords[i]
    }
}

impl IndexMut<usize> for Point {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.coords[i]
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        self.axpy(CONE, rhs)
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        self.axpy(-CONE, rhs)
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        self.scale_real(-1.0)
    }
}

impl Mul<C64> for &Point {
    type Output = Point;
    fn mul(self, rhs: C64) -> Point {
        self.scale(rhs)
    }
}

/// Shorthand for building complex scalars in tests and examples.
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_rejects_boundary() {
        assert!(Point::interior(vec![c(0.6, 0.0), c(0.0, 0.8)]).is_err());
        assert!(Point::interior(vec![c(0.6, 0.0), c(0.0, 0.79)]).is_ok());
        assert!(Point::new(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn inner_is_conjugate_linear_in_second_slot() {
        let x = Point::new(vec![c(1.0, 1.0), c(0.0, 2.0)]).unwrap();
        let y = Point::new(vec![c(0.0, 1.0), c(3.0, 0.0)]).unwrap();
        // (1+i)(-i) + (2i)(3) = 1 - i + 6i
        assert_eq!(x.inner(&y), c(1.0, 5.0));
        assert_eq!(x.inner(&y.scale(c(0.0, 1.0))), x.inner(&y) * c(0.0, -1.0));
        // bilinear pairing has no conjugation
        assert_eq!(x.pairing(&y), c(-1.0, 7.0));
    }

    #[test]
    fn real_pair_round_trip() {
        let x = Point::new(vec![c(0.1, -0.2), c(0.3, 0.4)]).unwrap();
        assert_eq!(Point::from_real_pairs(&x.to_real()), x);
    }
}
