//! Holomorphic self-maps of the ball (symbols of composition operators).

mod spec;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

pub use spec::*;

use crate::error::{Error, Result};
use crate::holo::{gradient, roots_of_unity, AnalyticFunction, QuadratureConfig};
use crate::point::{Point, C64, CZERO};
use crate::sampling::{seeded, stratified_point};

pub type MapFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

/// Samples used by the construction-time checks.
pub const CONSTRUCTION_SAMPLES: usize = 256;

const RADIAL_CACHE_CAPACITY: usize = 1 << 14;

/// A holomorphic map `phi: B_n -> B_n`, `phi = sum_k phi_k e_k`.
#[derive(Clone)]
pub struct SymbolMap {
    n: usize,
    eval: MapFn,
    radial: Option<MapFn>,
    family: String,
    spec: Option<SymbolSpec>,
    fixes_origin: bool,
    sup_norm_bound: Option<f64>,
    active_components: usize,
    seeds: Vec<Point>,
    quadrature: QuadratureConfig,
    cache: Option<Arc<RwLock<HashMap<Vec<u64>, Point>>>>,
}

impl fmt::Debug for SymbolMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolMap")
            .field("family", &self.family)
            .field("n", &self.n)
            .field("fixes_origin", &self.fixes_origin)
            .field("sup_norm_bound", &self.sup_norm_bound)
            .field("analytic_radial", &self.radial.is_some())
            .finish()
    }
}

impl SymbolMap {
    /// Wraps an arbitrary map. Ball preservation (and the Schwarz inequality when
    /// `phi(0) = 0`) is checked on seeded samples.
    pub fn custom<F>(n: usize, family: impl Into<String>, eval: F) -> Result<Self>
    where
        F: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        let eval: MapFn = Arc::new(eval);
        let fixes_origin = eval(&Point::zeros(n)).norm() <= 1e-14;
        Self::from_parts(n, family.into(), eval, None, fixes_origin)
    }

    pub(crate) fn from_parts(
        n: usize,
        family: String,
        eval: MapFn,
        radial: Option<MapFn>,
        fixes_origin: bool,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec { family, reason: "dimension must be positive".into() });
        }
        let map = Self {
            n,
            eval,
            radial,
            family,
            spec: None,
            fixes_origin,
            sup_norm_bound: None,
            active_components: n,
            seeds: Vec::new(),
            quadrature: QuadratureConfig::default(),
            cache: None,
        };
        map.check_samples()?;
        Ok(map)
    }

    fn check_samples(&self) -> Result<()> {
        let mut rng = seeded(0xba11);
        let origin = self.eval_raw(&Point::zeros(self.n));
        if origin.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: origin.dim() });
        }
        if self.fixes_origin && origin.norm() > 1e-12 {
            return Err(self.invalid(format!("declared origin-fixing but |phi(0)| = {:e}", origin.norm())));
        }
        for _ in 0..CONSTRUCTION_SAMPLES {
            let z = stratified_point(&mut rng, self.n, 30);
            let w = self.eval_raw(&z);
            if !w.all_finite() {
                return Err(Error::Evaluation { label: self.family.clone(), point: z.to_pairs() });
            }
            if w.norm() >= 1.0 {
                return Err(self.invalid(format!("ball preservation fails: |phi(z)| = {} at |z| = {}", w.norm(), z.norm())));
            }
            if self.fixes_origin && w.norm() > z.norm() + 1e-10 {
                return Err(self.invalid(format!("Schwarz inequality fails: |phi(z)| = {} > |z| = {}", w.norm(), z.norm())));
            }
        }
        Ok(())
    }

    fn invalid(&self, reason: String) -> Error {
        Error::InvalidSpec { family: self.family.clone(), reason }
    }

    pub fn with_radial<R>(mut self, radial: R) -> Self
    where
        R: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        self.radial = Some(Arc::new(radial));
        self
    }

    /// Drops the analytic radial derivative so quadrature is used instead.
    pub fn without_analytic_radial(mut self) -> Self {
        self.radial = None;
        self
    }

    /// Caches quadrature radial derivatives per point (bounded size).
    pub fn with_radial_cache(mut self) -> Self {
        self.cache = Some(Arc::new(RwLock::new(HashMap::new())));
        self
    }

    pub fn with_quadrature(mut self, q: QuadratureConfig) -> Self {
        self.quadrature = q;
        self
    }

    /// Records a proven bound `sup |phi| <= bound`.
    pub fn with_sup_norm_bound(mut self, bound: f64) -> Self {
        self.sup_norm_bound = Some(bound);
        self
    }

    pub fn with_seeds(mut self, seeds: Vec<Point>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn with_active_components(mut self, k: usize) -> Self {
        self.active_components = k.min(self.n);
        self
    }

    pub(crate) fn with_spec(mut self, spec: SymbolSpec) -> Self {
        self.spec = Some(spec);
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn spec(&self) -> Option<&SymbolSpec> {
        self.spec.as_ref()
    }

    pub fn fixes_origin(&self) -> bool {
        self.fixes_origin
    }

    /// Certified `sup_z |phi(z)|`, when the family provides one.
    pub fn sup_norm_bound(&self) -> Option<f64> {
        self.sup_norm_bound
    }

    /// Components `phi_k` with `k >= active_components()` vanish identically.
    pub fn active_components(&self) -> usize {
        self.active_components
    }

    /// Directions along which the family's extremal behaviour is expected.
    pub fn seed_directions(&self) -> &[Point] {
        &self.seeds
    }

    pub fn has_analytic_radial(&self) -> bool {
        self.radial.is_some()
    }

    fn eval_raw(&self, z: &Point) -> Point {
        (self.eval)(z)
    }

    pub fn eval(&self, z: &Point) -> Result<Point> {
        z.ensure_dim(self.n)?;
        z.ensure_interior("symbol argument")?;
        let w = self.eval_raw(z);
        if !w.all_finite() {
            return Err(Error::Evaluation { label: self.family.clone(), point: z.to_pairs() });
        }
        Ok(w)
    }

    /// `phi_k = <phi(.), e_k>` as a scalar function.
    pub fn component(&self, k: usize) -> Result<AnalyticFunction> {
        if k >= self.n {
            return Err(Error::Index { index: k, len: self.n });
        }
        let eval = self.eval.clone();
        Ok(AnalyticFunction::new(self.n, format!("{}[{}]", self.family, k + 1), move |z| eval(z)[k]))
    }

    /// `R phi(z) = phi'(z)(z)`, analytic when available, otherwise by contour quadrature.
    pub fn radial(&self, z: &Point) -> Result<Point> {
        z.ensure_dim(self.n)?;
        z.ensure_interior("symbol argument")?;
        if let Some(r) = &self.radial {
            return Ok(r(z));
        }
        self.radial_by_quadrature(z)
    }

    pub fn radial_by_quadrature(&self, z: &Point) -> Result<Point> {
        if z.is_zero() {
            return Ok(Point::zeros(self.n));
        }
        let key: Option<Vec<u64>> = self
            .cache
            .as_ref()
            .map(|_| z.coords().iter().flat_map(|c| [c.re.to_bits(), c.im.to_bits()]).collect());
        if let (Some(cache), Some(key)) = (&self.cache, &key) {
            if let Some(hit) = cache.read().expect("radial cache poisoned").get(key) {
                return Ok(hit.clone());
            }
        }
        let d = map_directional_derivative(self, z, z, &self.quadrature)?;
        if let (Some(cache), Some(key)) = (&self.cache, key) {
            let mut guard = cache.write().expect("radial cache poisoned");
            if guard.len() < RADIAL_CACHE_CAPACITY {
                guard.entry(key).or_insert_with(|| d.clone());
            }
        }
        Ok(d)
    }
}

/// `phi'(z)(u)` for a vector map, by the same contour rule as scalar derivatives.
pub fn map_directional_derivative(phi: &SymbolMap, z: &Point, u: &Point, q: &QuadratureConfig) -> Result<Point> {
    let un = u.norm();
    if un == 0.0 {
        return Ok(Point::zeros(phi.n));
    }
    let zn = z.norm();
    let r = q.radius.unwrap_or(0.25 * (1.0 - zn) / un);
    if zn + r * un >= 1.0 {
        return Err(Error::OutsideBall { what: "quadrature probe circle", norm: zn + r * un });
    }
    let mut acc = vec![CZERO; phi.n];
    for w in roots_of_unity(q.nodes) {
        let lambda = w * r;
        let v = phi.eval_raw(&z.axpy(lambda, u));
        if !v.all_finite() {
            return Err(Error::Evaluation { label: phi.family.clone(), point: z.axpy(lambda, u).to_pairs() });
        }
        for (a, b) in acc.iter_mut().zip(v.coords()) {
            *a += b / lambda;
        }
    }
    let inv = 1.0 / q.nodes as f64;
    Ok(Point::new(acc.into_iter().map(|a| a * inv).collect()).expect("finite by construction"))
}

pub fn radial_of_symbol(phi: &SymbolMap, z: &Point) -> Result<Point> {
    phi.radial(z)
}

/// A holomorphic map of the unit disk.
#[derive(Clone)]
pub struct ScalarMap {
    label: String,
    f: ScalarFn,
    df: Option<ScalarFn>,
    sup_bound: Option<f64>,
    nodes: usize,
}

impl fmt::Debug for ScalarMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarMap")
            .field("label", &self.label)
            .field("sup_bound", &self.sup_bound)
            .field("analytic_derivative", &self.df.is_some())
            .finish()
    }
}

impl ScalarMap {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(C64) -> C64 + Send + Sync + 'static,
    {
        Self { label: label.into(), f: Arc::new(f), df: None, sup_bound: None, nodes: 64 }
    }

    pub fn with_derivative<D>(mut self, df: D) -> Self
    where
        D: Fn(C64) -> C64 + Send + Sync + 'static,
    {
        self.df = Some(Arc::new(df));
        self
    }

    pub fn with_sup_bound(mut self, b: f64) -> Self {
        self.sup_bound = Some(b);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Proven bound on `sup |F|`, if known.
    pub fn sup_bound(&self) -> Option<f64> {
        self.sup_bound
    }

    pub fn value(&self, lambda: C64) -> C64 {
        (self.f)(lambda)
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.df.is_some()
    }

    pub fn derivative(&self, lambda: C64) -> C64 {
        match &self.df {
            Some(df) => df(lambda),
            None => self.quadrature_derivative(lambda),
        }
    }

    /// `F'(λ)` by the trapezoidal Cauchy rule on a circle of radius `(1 - |λ|) / 4`.
    pub fn quadrature_derivative(&self, lambda: C64) -> C64 {
        let r = 0.25 * (1.0 - lambda.norm());
        let mut acc = CZERO;
        for w in roots_of_unity(self.nodes) {
            acc += (self.f)(lambda + w * r) / (w * r);
        }
        acc / self.nodes as f64
    }
}

/// `λ -> phi_k(λ e_l)` (0-based indices).
pub fn restrict_component(phi: &SymbolMap, k: usize, l: usize) -> Result<ScalarMap> {
    for i in [k, l] {
        if i >= phi.n {
            return Err(Error::Index { index: i, len: phi.n });
        }
    }
    let eval = phi.eval.clone();
    let n = phi.n;
    let e = Point::basis(n, l);
    let mut map = ScalarMap::new(format!("{}[{},{}]", phi.family, k + 1, l + 1), move |lambda| {
        eval(&e.scale(lambda))[k]
    });
    if let Some(radial) = phi.radial.clone() {
        // F'(λ) = R phi_k(λ e_l) / λ away from the origin
        let e = Point::basis(n, l);
        let fallback = map.clone();
        map = map.with_derivative(move |lambda| {
            if lambda.norm() > 1e-6 {
                radial(&e.scale(lambda))[k] / lambda
            } else {
                fallback.quadrature_derivative(lambda)
            }
        });
    }
    if let Some(b) = phi.sup_norm_bound {
        map = map.with_sup_bound(b);
    }
    Ok(map)
}

/// `f ∘ phi`.
pub fn pullback(phi: &SymbolMap, f: &AnalyticFunction) -> Result<AnalyticFunction> {
    if f.dim() != phi.n {
        return Err(Error::DimensionMismatch { expected: phi.n, got: f.dim() });
    }
    let eval = phi.eval.clone();
    let inner = f.clone();
    Ok(AnalyticFunction::new(phi.n, format!("{} ∘ {}", f.label(), phi.family), move |z| {
        inner.value(&eval(z))
    }))
}

/// `R(f ∘ phi)(z) = ∇f(phi(z)) · R phi(z)` (bilinear pairing).
pub fn chain_rule_radial(phi: &SymbolMap, f: &AnalyticFunction, z: &Point, q: &QuadratureConfig) -> Result<C64> {
    let w = phi.eval(z)?;
    let g = gradient(f, &w, q)?;
    Ok(phi.radial(z)?.pairing(&g))
}
