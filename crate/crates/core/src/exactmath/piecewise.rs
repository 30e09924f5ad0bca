use std::fmt;

use crate::error::{Error, Result};
use crate::exactmath::{Assignment, Poly, Rational, Var};

/// `∫_{lo}^{hi} p d(var)`, where the bounds may depend on the other variable.
pub fn integrate_inner(p: &Poly, var: Var, lo: &Poly, hi: &Poly) -> Result<Poly> {
    let anti = p.antiderivative(var);
    Ok(&anti.substitute(var, hi)? - &anti.substitute(var, lo)?)
}

/// One polynomial piece `value` valid for `lo <= var <= hi`.
#[derive(Clone, PartialEq, Eq)]
pub struct Piece {
    pub lo: Poly,
    pub hi: Poly,
    pub value: Poly,
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]: {}", self.lo, self.hi, self.value)
    }
}

/// A function of `var` given by consecutive polynomial pieces. Bounds of an
/// inner variable may be polynomials in the outer one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseFn {
    pub var: Var,
    pub pieces: Vec<Piece>,
}

impl PiecewiseFn {
    pub fn new(var: Var, pieces: Vec<Piece>) -> Result<Self> {
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(Error::BadPartition(format!(
                    "piece ending at {} is followed by one starting at {}",
                    w[0].hi, w[1].lo
                )));
            }
        }
        Ok(Self { var, pieces })
    }

    pub fn start(&self) -> Option<&Poly> {
        self.pieces.first().map(|p| &p.lo)
    }

    pub fn end(&self) -> Option<&Poly> {
        self.pieces.last().map(|p| &p.hi)
    }

    /// Integral over the full support.
    pub fn integrate(&self) -> Result<Poly> {
        let mut total = Poly::zero();
        for piece in &self.pieces {
            total = &total + &integrate_inner(&piece.value, self.var, &piece.lo, &piece.hi)?;
        }
        Ok(total)
    }

    /// Integral over `[lo, hi]` for a function with constant breakpoints.
    /// The pieces must cover the window exactly.
    pub fn integrate_over(&self, lo: &Rational, hi: &Rational) -> Result<Rational> {
        let bounds: Vec<(Rational, Rational)> = self
            .pieces
            .iter()
            .map(|p| match (p.lo.as_constant(), p.hi.as_constant()) {
                (Some(a), Some(b)) => Ok((a, b)),
                _ => Err(Error::BadPartition("breakpoints are not constant".into())),
            })
            .collect::<Result<_>>()?;
        let covers = bounds.first().is_some_and(|(a, _)| a == lo)
            && bounds.last().is_some_and(|(_, b)| b == hi);
        if !covers {
            return Err(Error::BadPartition(format!("pieces do not cover [{lo}, {hi}]")));
        }
        let total = self.integrate()?;
        total
            .as_constant()
            .ok_or_else(|| Error::BadPartition("integrand depends on a free variable".into()))
    }

    /// Value at a point, using the first piece whose interval contains it.
    pub fn eval(&self, at: &Assignment) -> Result<Option<Rational>> {
        let x = at.get(self.var).ok_or(Error::MissingAssignment(self.var))?;
        for piece in &self.pieces {
            if &piece.lo.eval(at)? <= x && x <= &piece.hi.eval(at)? {
                return piece.value.eval(at).map(Some);
            }
        }
        Ok(None)
    }

    /// Jumps `value_{i+1} - value_i` at each interior breakpoint, as
    /// polynomials in the remaining variable.
    pub fn continuity_defects(&self) -> Result<Vec<Poly>> {
        self.pieces
            .windows(2)
            .map(|w| {
                let left = w[0].value.substitute(self.var, &w[0].hi)?;
                let right = w[1].value.substitute(self.var, &w[1].lo)?;
                Ok(&right - &left)
            })
            .collect()
    }
}

/// Sum of integrals of several piecewise functions.
pub fn integrate_piecewise<'a>(fns: impl IntoIterator<Item = &'a PiecewiseFn>) -> Result<Poly> {
    let mut total = Poly::zero();
    for f in fns {
        total = &total + &f.integrate()?;
    }
    Ok(total)
}
