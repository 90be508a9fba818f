//! Exact computation of piecewise-polynomial volume functions of moduli spaces
//! of hyperbolic cone surfaces with cone angles up to 4π, built from ψ/κ₁
//! intersection numbers, together with exact checks of the identities they satisfy.

pub mod exactmath;
pub mod graphs;
pub mod intersections;
pub mod mirzakhani;
pub mod tautclasses;
pub mod verify;
pub mod volumes;

pub use exactmath::{MultiPoly, PiecewisePoly, Rational, UniPoly};
