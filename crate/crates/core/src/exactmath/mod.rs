//! Exact arithmetic: rationals, bivariate polynomials, piecewise functions
//! and rational root isolation.

mod piecewise;
mod poly;
mod rational;
mod roots;

pub use piecewise::{integrate_inner, integrate_piecewise, Piece, PiecewiseFn};
pub use poly::{Assignment, Monomial, Poly, Var, MAX_DEGREE};
pub use rational::Rational;
pub use roots::rational_roots;
