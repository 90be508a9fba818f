//! Exact arithmetic: rationals, sparse multivariate polynomials, univariate
//! piecewise polynomials, interpolation and quadrature.

pub mod multipoly;
pub mod piecewise;
pub mod rational;
pub mod unipoly;

use thiserror::Error;

pub use multipoly::{angle_vars, canonical_var_order, MultiPoly, TermRecord};
pub use piecewise::{interior_nodes, interpolate, quadrature_weights, C1Report, Interval, PiecewisePoly};
pub use rational::{
    double_factorial_odd, factorial, fmt_rational, fmt_rational_pq, fmt_vector, int, parse_rational, parse_vector, rat,
    rational_factorial, to_f64, Rational,
};
pub use unipoly::UniPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MathError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("integration bound involves the integration variable `{0}`")]
    BoundInvolvesVariable(String),
    #[error("polynomial is not univariate in `{0}`")]
    NotUnivariate(String),
    #[error("expected {expected} coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("cannot parse rational `{0}`")]
    Parse(String),
    #[error("interval with lo > hi")]
    InvalidInterval,
    #[error("malformed piecewise polynomial: {0}")]
    MalformedPiecewise(String),
    #[error("{value} lies outside [{lo}, {hi}]")]
    OutOfDomain { value: String, lo: String, hi: String },
    #[error("pieces disagree at breakpoint {at}: {left} vs {right}")]
    Discontinuity { at: String, left: String, right: String },
    #[error("need {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("repeated abscissa {0}")]
    RepeatedAbscissa(String),
    #[error("inconsistent samples at {at}: fit gives {expected}, sample is {got}")]
    InconsistentSamples { at: String, expected: String, got: String },
}
