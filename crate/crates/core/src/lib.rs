//! Numerical geometry of the unit ball of a (truncated) complex Hilbert space,
//! Bloch-function calculus, and compactness diagnostics for composition
//! operators `C_phi f = f ∘ phi` on the Bloch space of the ball.
//!
//! The infinite-dimensional space is modelled by `C^n` with the standard
//! basis standing in for a fixed orthonormal basis; `n` is chosen by the caller.

pub mod bloch;
pub mod diagnostics;
pub mod error;
pub mod holo;
pub mod metric;
pub mod mobius;
pub mod optimize;
pub mod point;
pub mod sampling;
pub mod search;
pub mod symbols;

pub use bloch::{estimate_seminorm, eval_bound, lipschitz_constant, EvalBound, SeminormEstimate, SeminormKind};
pub use error::{Error, Result};
pub use holo::{AnalyticFunction, QuadratureConfig};
pub use metric::{hyperbolic, pseudo_hyperbolic, MetricValue};
pub use mobius::{mobius_apply, mobius_derivative, DerivativeAt, LinearMap, MobiusAutomorphism};
pub use point::{Point, C64};
pub use search::SearchBudget;
pub use symbols::{build_symbol, pullback, radial_of_symbol, restrict_component, ScalarMap, SymbolMap, SymbolSpec};
pub use diagnostics::{
    boundary_sweep, compactness_report, q1, q2, schwarz_pick_residuals, xi_direction, CompactnessVerdict,
    CriterionEstimate, CriterionName, ReportConfig, Trend, Verdict,
};
