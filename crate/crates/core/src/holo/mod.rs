//! Differentiation of holomorphic functions on the ball.
//!
//! Derivatives are computed with the Cauchy integral on a small circle,
//! `f'(x)(u) = (1 / 2 pi i) ∮ f(x + λu) / λ^2 dλ`, discretized by the
//! trapezoidal rule. For holomorphic integrands the rule converges
//! geometrically in the node count, so 64 nodes reach machine precision for
//! the functions used here.
//!
//! Gradients are stored as bilinear coefficient vectors `g` with
//! `f'(x)(y) = sum_k y_k g_k` (see [`Point::pairing`]).

mod functions;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub use functions::*;

use crate::error::{Error, Result};
use crate::mobius::{DerivativeAt, MobiusAutomorphism};
use crate::optimize::nelder_mead_max;
use crate::point::{Point, C64, CZERO};

pub type EvalFn = Arc<dyn Fn(&Point) -> C64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;

/// Analytically known norms of a test function, used as oracles.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KnownNorms {
    /// `sup (1 - |x|^2) |f'(x)|`
    pub bloch: Option<f64>,
    /// `sup |∇̃f(x)|`
    pub invariant: Option<f64>,
    /// An upper bound on `sup |f|`.
    pub sup: Option<f64>,
}

/// A scalar holomorphic function on the ball of `C^dim`.
#[derive(Clone)]
pub struct AnalyticFunction {
    dim: usize,
    eval: EvalFn,
    gradient: Option<GradientFn>,
    label: String,
    known: KnownNorms,
}

impl fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFunction")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

impl AnalyticFunction {
    /// Wraps a user-supplied function. Holomorphy is trusted, not checked.
    pub fn new<F>(dim: usize, label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&Point) -> C64 + Send + Sync + 'static,
    {
        Self { dim, eval: Arc::new(eval), gradient: None, label: label.into(), known: KnownNorms::default() }
    }

    /// Attaches an analytic gradient; `check_gradient` compares it with
    /// contour differentiation.
    pub fn with_gradient<G>(mut self, gradient: G) -> Self
    where
        G: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn with_known(mut self, known: KnownNorms) -> Self {
        self.known = known;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn known(&self) -> KnownNorms {
        self.known
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    /// Raw evaluation; no domain checks.
    pub fn value(&self, x: &Point) -> C64 {
        (self.eval)(x)
    }

    /// Evaluation that reports non-finite results with the offending point.
    pub fn try_value(&self, x: &Point) -> Result<C64> {
        let v = (self.eval)(x);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { label: self.label.clone(), point: x.to_pairs() })
        }
    }

    pub fn analytic_gradient(&self, x: &Point) -> Option<Point> {
        self.gradient.as_ref().map(|g| g(x))
    }

    /// Compares the analytic gradient against quadrature at a few fixed points.
    pub fn check_gradient(&self, tol: f64) -> std::result::Result<(), String> {
        let Some(grad) = &self.gradient else { return Ok(()) };
        let n = self.dim;
        let q = QuadratureConfig::default();
        let mut probes = vec![Point::zeros(n)];
        let diag: Vec<C64> = (0..n)
            .map(|k| C64::from_polar(0.55 / (n as f64).sqrt(), 0.7 * k as f64 + 0.3))
            .collect();
        probes.push(Point::from_vec_unchecked(diag));
        probes.push(Point::basis(n, n - 1).scale(C64::new(0.2, -0.5)));
        for x in &probes {
            let a = grad(x);
            let mut b = Point::zeros(n);
            for k in 0..n {
                b[k] = directional_derivative(self, x, &Point::basis(n, k), &q).map_err(|e| e.to_string())?;
            }
            let err = a.distance(&b);
            if err > tol * (1.0 + a.norm()) {
                return Err(format!("at {x:?}: |analytic - quadrature| = {err:e}"));
            }
        }
        Ok(())
    }
}

/// Trapezoidal Cauchy-contour settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub nodes: usize,
    /// Contour radius in the `λ` variable. `None` picks
    /// `0.25 (1 - |x|) / |u|`, i.e. a probe circle of Euclidean radius
    /// `0.25 (1 - |x|)` around `x`.
    pub radius: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { nodes: 64, radius: None }
    }
}

impl QuadratureConfig {
    pub fn with_nodes(nodes: usize) -> Result<Self> {
        if nodes < 8 {
            return Err(Error::Parameter { name: "nodes", value: nodes as f64, range: ">= 8" });
        }
        Ok(Self { nodes, radius: None })
    }
}

/// Unit roots `exp(2 pi i j / n)`.
pub(crate) fn roots_of_unity(n: usize) -> impl Iterator<Item = C64> {
    (0..n).map(move |j| C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
}

/// `f'(x)(u)` by contour quadrature.
pub fn directional_derivative(f: &AnalyticFunction, x: &Point, u: &Point, q: &QuadratureConfig) -> Result<C64> {
    x.ensure_dim(f.dim)?;
    u.ensure_dim(f.dim)?;
    x.ensure_interior("differentiation point")?;
    let un = u.norm();
    if un == 0.0 {
        return Ok(CZERO);
    }
    let xn = x.norm();
    let r = q.radius.unwrap_or(0.25 * (1.0 - xn) / un);
    if xn + r * un >= 1.0 {
        return Err(Error::OutsideBall { what: "quadrature probe circle", norm: xn + r * un });
    }
    let mut acc = CZERO;
    for w in roots_of_unity(q.nodes) {
        let lambda = w * r;
        let v = f.try_value(&x.axpy(lambda, u))?;
        acc += v / lambda;
    }
    Ok(acc / q.nodes as f64)
}

/// Bilinear gradient coefficients at `x`; the analytic gradient is used when present.
pub fn gradient(f: &AnalyticFunction, x: &Point, q: &QuadratureConfig) -> Result<Point> {
    x.ensure_dim(f.dim)?;
    x.ensure_interior("differentiation point")?;
    if let Some(g) = f.analytic_gradient(x) {
        return Ok(g);
    }
    quadrature_gradient(f, x, q)
}

/// Gradient by quadrature only, ignoring any analytic gradient.
pub fn quadrature_gradient(f: &AnalyticFunction, x: &Point, q: &QuadratureConfig) -> Result<Point> {
    let n = f.dim;
    let mut g = Point::zeros(n);
    for k in 0..n {
        g[k] = directional_derivative(f, x, &Point::basis(n, k), q)?;
    }
    Ok(g)
}

/// `Rf(x) = f'(x)(x)`.
pub fn radial_derivative(f: &AnalyticFunction, x: &Point, q: &QuadratureConfig) -> Result<C64> {
    x.ensure_dim(f.dim)?;
    x.ensure_interior("differentiation point")?;
    if x.is_zero() {
        return Ok(CZERO);
    }
    match f.analytic_gradient(x) {
        Some(g) => Ok(x.pairing(&g)),
        None => directional_derivative(f, x, x, q),
    }
}

/// `∇̃f(x) = ∇(f ∘ phi_x)(0)`, computed as the bilinear transpose of
/// `phi_x'(0)` applied to `∇f(x)`.
pub fn invariant_gradient(f: &AnalyticFunction, x: &Point, q: &QuadratureConfig) -> Result<Point> {
    let g = gradient(f, x, q)?;
    let m = MobiusAutomorphism::new(x.clone())?;
    Ok(m.derivative(DerivativeAt::Origin).transpose_apply(&g))
}

/// `∇̃f(x)` by differentiating `f ∘ phi_x` at the origin directly.
pub fn invariant_gradient_by_composition(f: &AnalyticFunction, x: &Point, q: &QuadratureConfig) -> Result<Point> {
    x.ensure_dim(f.dim)?;
    let m = MobiusAutomorphism::new(x.clone())?;
    let inner = f.clone();
    let composed = AnalyticFunction::new(f.dim, format!("{} ∘ phi_x", f.label), move |z| {
        inner.value(&m.apply_unchecked(z))
    });
    quadrature_gradient(&composed, &Point::zeros(f.dim), q)
}

/// `|∇̃f(x)|` from the variational formula
/// `sup_{w != 0} |<∇f(x), conj(w)>| (1 - |x|^2) / sqrt((1 - |x|^2)|w|^2 + |<w, x>|^2)`.
///
/// Components of `w` orthogonal to both `conj(∇f(x))` and `x` only enlarge the
/// denominator, so the supremum is taken over their span. On that (at most
/// two-dimensional) span `w = cos(a) v1 + sin(a) e^{it} v2`, and the ratio is
/// maximized by a 64×64 grid over `(a, t)` followed by Nelder–Mead.
pub fn invariant_gradient_norm(f: &AnalyticFunction, x: &Point, q: &QuadratureConfig) -> Result<f64> {
    let g = gradient(f, x, q)?;
    Ok(invariant_norm_from_gradient(&g, x))
}

pub(crate) fn invariant_norm_from_gradient(g: &Point, x: &Point) -> f64 {
    let Some(v1) = g.conj().normalized() else {
        return 0.0;
    };
    let defect = x.defect();
    let ratio = |w: &Point| -> f64 {
        let num = w.pairing(g).norm() * defect;
        let den = (defect * w.norm_sq() + w.inner(x).norm_sqr()).sqrt();
        if den > 0.0 { num / den } else { 0.0 }
    };
    let v2 = x.axpy(-x.inner(&v1), &v1).normalized().filter(|v| v.inner(&v1).norm() < 1e-12);
    let Some(v2) = v2 else {
        return ratio(&v1);
    };
    let w_at = |a: f64, t: f64| v1.scale_real(a.cos()).axpy(C64::from_polar(a.sin(), t), &v2);
    const GRID: usize = 64;
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..GRID {
        let a = (PI / 2.0) * i as f64 / (GRID - 1) as f64;
        for j in 0..GRID {
            let t = 2.0 * PI * j as f64 / GRID as f64;
            let v = ratio(&w_at(a, t));
            if v > best.2 {
                best = (a, t, v);
            }
        }
    }
    let (_, polished) = nelder_mead_max(|p| Some(ratio(&w_at(p[0], p[1]))), &[best.0, best.1], 0.02, 400);
    polished.max(best.2)
}

/// Right-hand side of `(1 - |x|^2) Rf(x) = (-1 / 2 pi i) ∮_{|ξ|=1} f(phi_x(ξ x)) dξ / ξ^2`,
/// by the trapezoidal rule with `nodes` points. Returns 0 at `x = 0`.
pub fn radial_boundary_integral(f: &AnalyticFunction, x: &Point, nodes: usize) -> Result<C64> {
    x.ensure_dim(f.dim)?;
    x.ensure_interior("boundary-integral point")?;
    if x.is_zero() {
        return Ok(CZERO);
    }
    let m = MobiusAutomorphism::new(x.clone())?;
    let mut acc = CZERO;
    for w in roots_of_unity(nodes) {
        acc += f.try_value(&m.apply_unchecked(&x.scale(w)))? / w;
    }
    Ok(-acc / nodes as f64)
}
