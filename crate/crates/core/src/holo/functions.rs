//! Built-in test functions with analytic gradients and known norms.

use rand::Rng;

use super::{AnalyticFunction, KnownNorms};
use crate::point::{Point, C64, CONE};

/// `f(z) = c`.
pub fn constant(n: usize, c: C64) -> AnalyticFunction {
    AnalyticFunction::new(n, format!("const({c})"), move |_| c)
        .with_gradient(move |_| Point::zeros(n))
        .with_known(KnownNorms { bloch: Some(0.0), invariant: Some(0.0), sup: Some(c.norm()) })
}

/// `f(z) = <z, u>`; its gradient is `conj(u)` and all three norms equal `|u|`.
pub fn linear(u: &Point) -> AnalyticFunction {
    let n = u.dim();
    let nu = u.norm();
    let (ue, ug) = (u.clone(), u.conj());
    AnalyticFunction::new(n, "linear", move |z: &Point| z.inner(&ue))
        .with_gradient(move |_| ug.clone())
        .with_known(KnownNorms { bloch: Some(nu), invariant: Some(nu), sup: Some(nu) })
}

/// `sup_{0<r<1} (1 - r^2) m r^(m-1)`, attained at `r^2 = (m-1)/(m+1)`.
pub fn monomial_bloch_norm(m: u32) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let m = m as f64;
    m * (2.0 / (m + 1.0)) * ((m - 1.0) / (m + 1.0)).powf((m - 1.0) / 2.0)
}

/// `f(z) = z_k^m` (0-based `k`).
pub fn monomial(n: usize, k: usize, m: u32) -> AnalyticFunction {
    assert!(k < n, "coordinate index out of range");
    AnalyticFunction::new(n, format!("z{}^{m}", k + 1), move |z: &Point| z[k].powu(m))
        .with_gradient(move |z: &Point| {
            let mut g = Point::zeros(n);
            if m > 0 {
                g[k] = z[k].powu(m - 1) * m as f64;
            }
            g
        })
        .with_known(KnownNorms {
            bloch: Some(monomial_bloch_norm(m)),
            invariant: None,
            sup: Some(1.0),
        })
}

/// `f(z) = prod_{j in idx} z_j` over distinct coordinates; `sup |f| = |idx|^(-|idx|/2)`.
pub fn coordinate_product(n: usize, idx: &[usize]) -> AnalyticFunction {
    let idx = idx.to_vec();
    let m = idx.len() as f64;
    let sup = m.powf(-m / 2.0);
    let label = format!(
        "prod({})",
        idx.iter().map(|i| format!("z{}", i + 1)).collect::<Vec<_>>().join(" ")
    );
    let ie = idx.clone();
    AnalyticFunction::new(n, label, move |z: &Point| ie.iter().map(|&j| z[j]).product())
        .with_gradient(move |z: &Point| {
            let mut g = Point::zeros(n);
            for (pos, &k) in idx.iter().enumerate() {
                g[k] += idx
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != pos)
                    .map(|(_, &j)| z[j])
                    .product::<C64>();
            }
            g
        })
        .with_known(KnownNorms { bloch: None, invariant: None, sup: Some(sup) })
}

/// `f(z) = log(1 / (1 - <z, xi>))`, `|xi| <= 1`.
pub fn log_kernel(xi: &Point) -> AnalyticFunction {
    let n = xi.dim();
    let (xe, xg) = (xi.clone(), xi.clone());
    AnalyticFunction::new(n, "log kernel", move |z: &Point| -(CONE - z.inner(&xe)).ln())
        .with_gradient(move |z: &Point| xg.conj().scale((CONE - z.inner(&xg)).inv()))
}

/// One term `coeff * prod z_k^{e_k}` of a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: C64,
    pub exponents: Vec<(usize, u32)>,
}

/// Polynomial as a sum of monomials, with analytic gradient.
pub fn polynomial(n: usize, terms: Vec<Monomial>) -> AnalyticFunction {
    let degree = terms
        .iter()
        .map(|t| t.exponents.iter().map(|e| e.1).sum::<u32>())
        .max()
        .unwrap_or(0);
    let te = terms.clone();
    let eval = move |z: &Point| -> C64 {
        te.iter()
            .map(|t| t.exponents.iter().fold(t.coeff, |acc, &(k, e)| acc * z[k].powu(e)))
            .sum()
    };
    AnalyticFunction::new(n, format!("polynomial(deg {degree}, {} terms)", terms.len()), eval).with_gradient(
        move |z: &Point| {
            let mut g = Point::zeros(n);
            for t in &terms {
                for (pos, &(k, e)) in t.exponents.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let mut d = t.coeff * e as f64 * z[k].powu(e - 1);
                    for (p, &(j, ej)) in t.exponents.iter().enumerate() {
                        if p != pos {
                            d *= z[j].powu(ej);
                        }
                    }
                    g[k] += d;
                }
            }
            g
        },
    )
}

/// Random polynomial of total degree at most `degree` with `terms` terms and
/// coefficients of modulus at most 1.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, n: usize, degree: u32, terms: usize) -> AnalyticFunction {
    let terms = (0..terms)
        .map(|_| {
            let total = rng.random_range(0..=degree);
            let mut exponents: Vec<(usize, u32)> = Vec::new();
            for _ in 0..total {
                let k = rng.random_range(0..n);
                match exponents.iter_mut().find(|e| e.0 == k) {
                    Some(e) => e.1 += 1,
                    None => exponents.push((k, 1)),
                }
            }
            let coeff = C64::from_polar(rng.random::<f64>(), rng.random::<f64>() * std::f64::consts::TAU);
            Monomial { coeff, exponents }
        })
        .collect();
    polynomial(n, terms)
}

/// A bounded family used where `sup |f| <= 1` (hence `|f|_inv <= 1`) must hold:
/// linear functionals of norm 1, powers of one coordinate, and coordinate products.
pub fn unit_ball_test_family(n: usize, direction: &Point) -> Vec<AnalyticFunction> {
    let mut out = vec![linear(direction), monomial(n, 0, 1), monomial(n, n - 1, 3)];
    if n >= 2 {
        out.push(coordinate_product(n, &[0, 1]));
    }
    if n >= 3 {
        out.push(coordinate_product(n, &[0, 1, 2]));
    }
    out
}

/// The 1-D identity `f(λ) = λ`.
pub fn identity_1d() -> AnalyticFunction {
    monomial(1, 0, 1)
}
