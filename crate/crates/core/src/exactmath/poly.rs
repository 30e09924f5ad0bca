use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::exactmath::Rational;

/// Highest total degree a polynomial may reach through multiplication.
pub const MAX_DEGREE: u32 = 16;

/// The two parameters every family in the engine is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    U,
    V,
}

impl Var {
    fn idx(self) -> usize {
        match self {
            Var::U => 0,
            Var::V => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::U => "u",
            Var::V => "v",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Values for some of the variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    values: [Option<Rational>; 2],
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u(u: Rational) -> Self {
        Self::new().with(Var::U, u)
    }

    pub fn uv(u: Rational, v: Rational) -> Self {
        Self::new().with(Var::U, u).with(Var::V, v)
    }

    pub fn with(mut self, var: Var, value: Rational) -> Self {
        self.values[var.idx()] = Some(value);
        self
    }

    pub fn get(&self, var: Var) -> Option<&Rational> {
        self.values[var.idx()].as_ref()
    }
}

/// Exponent pair `(deg_u, deg_v)`.
pub type Monomial = [u32; 2];

/// Polynomial in `u` and `v` with exact rational coefficients. Zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term([0, 0], c);
        p
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rational::from(c))
    }

    pub fn var(var: Var) -> Self {
        let mut m = [0, 0];
        m[var.idx()] = 1;
        let mut p = Self::zero();
        p.add_term(m, Rational::one());
        p
    }

    /// `c0 + c1 * var`.
    pub fn linear(var: Var, c0: Rational, c1: Rational) -> Self {
        &Self::constant(c0) + &Self::var(var).scale(&c1)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Univariate polynomial from ascending coefficients.
    pub fn from_coeffs(var: Var, coeffs: &[Rational]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(k, c)| {
            let mut m = [0, 0];
            m[var.idx()] = k as u32;
            (m, c.clone())
        }))
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&[0, 0]).cloned(),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&[0, 0]).cloned().unwrap_or_default()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            if m[0] > 0 {
                out.insert(Var::U);
            }
            if m[1] > 0 {
                out.insert(Var::V);
            }
        }
        out
    }

    pub fn depends_on(&self, var: Var) -> bool {
        self.terms.keys().any(|m| m[var.idx()] > 0)
    }

    pub fn degree_in(&self, var: Var) -> u32 {
        self.terms.keys().map(|m| m[var.idx()]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m[0] + m[1]).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (*m, k * c)).collect(),
        }
    }

    pub fn checked_mul(&self, rhs: &Poly) -> Result<Poly> {
        let degree = self.total_degree() + rhs.total_degree();
        if !self.is_zero() && !rhs.is_zero() && degree > MAX_DEGREE {
            return Err(Error::DegreeCap {
                degree,
                cap: MAX_DEGREE,
            });
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term([ma[0] + mb[0], ma[1] + mb[1]], ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> Result<Poly> {
        let mut acc = Poly::int(1);
        for _ in 0..exp {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    pub fn eval(&self, at: &Assignment) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for var in [Var::U, Var::V] {
                let e = m[var.idx()];
                if e > 0 {
                    let x = at.get(var).ok_or(Error::MissingAssignment(var))?;
                    term *= &x.pow(e);
                }
            }
            acc += &term;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, u: f64, v: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c.to_f64() * u.powi(m[0] as i32) * v.powi(m[1] as i32))
            .sum()
    }

    /// Specializes one variable, leaving the other symbolic.
    pub fn partial_eval(&self, var: Var, value: &Rational) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut rest = *m;
            rest[var.idx()] = 0;
            out.add_term(rest, c * &value.pow(m[var.idx()]));
        }
        out
    }

    /// Replaces `var` by the polynomial `by` (which must not involve `var`).
    pub fn substitute(&self, var: Var, by: &Poly) -> Result<Poly> {
        let mut powers = vec![Poly::int(1)];
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m[var.idx()] as usize;
            while powers.len() <= e {
                let next = powers.last().expect("non-empty").checked_mul(by)?;
                powers.push(next);
            }
            let mut rest = *m;
            rest[var.idx()] = 0;
            let mono = Poly::from_terms([(rest, c.clone())]);
            out = &out + &mono.checked_mul(&powers[e])?;
        }
        Ok(out)
    }

    pub fn derivative(&self, var: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m[var.idx()];
            if e > 0 {
                let mut d = *m;
                d[var.idx()] -= 1;
                out.add_term(d, c * &Rational::from(e as i64));
            }
        }
        out
    }

    /// Antiderivative in `var` with zero constant of integration.
    pub fn antiderivative(&self, var: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut d = *m;
            d[var.idx()] += 1;
            out.add_term(d, c / &Rational::from(d[var.idx()] as i64));
        }
        out
    }

    /// Coefficients of `1, var, var^2, ...`, each a polynomial in the other
    /// variable.
    pub fn coefficients_in(&self, var: Var) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(var) as usize + 1];
        for (m, c) in &self.terms {
            let mut rest = *m;
            rest[var.idx()] = 0;
            out[m[var.idx()] as usize].add_term(rest, c.clone());
        }
        out
    }

    /// Dense ascending coefficients of a polynomial that involves no
    /// variable other than `var`.
    pub fn univariate_coeffs(&self, var: Var) -> Result<Vec<Rational>> {
        let other = match var {
            Var::U => Var::V,
            Var::V => Var::U,
        };
        if self.depends_on(other) {
            return Err(Error::NotUnivariate(var));
        }
        let mut out = vec![Rational::zero(); self.degree_in(var) as usize + 1];
        for (m, c) in &self.terms {
            out[m[var.idx()] as usize] = c.clone();
        }
        Ok(out)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&Rational::from(-1))
    }
}

impl std::ops::Mul<i64> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: i64) -> Poly {
        self.scale(&Rational::from(rhs))
    }
}

impl From<Rational> for Poly {
    fn from(c: Rational) -> Self {
        Poly::constant(c)
    }
}

impl From<&Rational> for Poly {
    fn from(r: &Rational) -> Poly {
        Poly::constant(r.clone())
    }
}

impl fmt::Display for Poly {
    /// Ascending order, e.g. `22 - 6u - 6u^2 - 2u^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by_key(|(m, _)| (m[0] + m[1], std::cmp::Reverse(m[0])));
        for (i, (m, c)) in ordered.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mut mono = String::new();
            for var in [Var::U, Var::V] {
                match m[var.idx()] {
                    0 => {}
                    1 => mono.push_str(var.name()),
                    e => mono.push_str(&format!("{}^{}", var.name(), e)),
                }
            }
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&mono)?;
            } else if mag.is_integer() {
                write!(f, "{mag}{mono}")?;
            } else {
                write!(f, "({mag}){mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}
