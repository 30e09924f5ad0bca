//! Exact rational root finding for univariate polynomials.
//!
//! Real roots of the square-free part are isolated with Sturm sequences and
//! bisection on rational endpoints. For a primitive integer polynomial with
//! leading coefficient `a`, every rational root `x` has `a * x` integral, so
//! once an isolating interval is narrower than `1 / (2|a|)` a single candidate
//! decides whether the root is rational.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{Poly, Rational, Var};

type Dense = Vec<Rational>;

fn trim(mut p: Dense) -> Dense {
    while p.last().is_some_and(Rational::is_zero) {
        p.pop();
    }
    p
}

fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter()
        .rev()
        .fold(Rational::zero(), |acc, c| &acc * x + c)
}

fn derivative(p: &[Rational]) -> Dense {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * &Rational::from(k as i64))
        .collect()
}

/// Remainder of `a` divided by `b` (b non-zero).
fn rem(a: &[Rational], b: &[Rational]) -> Dense {
    let mut r = a.to_vec();
    let lead = b.last().expect("non-zero divisor");
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let factor = r.last().expect("non-empty") / lead;
        for (i, c) in b.iter().enumerate() {
            let t = c * &factor;
            r[shift + i] -= &t;
        }
        r.pop();
        r = trim(r);
    }
    r
}

fn quotient(a: &[Rational], b: &[Rational]) -> Dense {
    let mut r = a.to_vec();
    let lead = b.last().expect("non-zero divisor");
    let mut q = vec![Rational::zero(); a.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let factor = r.last().expect("non-empty") / lead;
        for (i, c) in b.iter().enumerate() {
            let t = c * &factor;
            r[shift + i] -= &t;
        }
        q[shift] = factor;
        r.pop();
    }
    trim(q)
}

fn gcd(a: &[Rational], b: &[Rational]) -> Dense {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn sturm_chain(p: &[Rational]) -> Vec<Dense> {
    let mut chain = vec![p.to_vec(), derivative(p)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let r = rem(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn variations(chain: &[Dense], x: &Rational) -> usize {
    let signs: Vec<i32> = chain
        .iter()
        .map(|p| eval(p, x).signum())
        .filter(|s| *s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Primitive integer polynomial proportional to `p`.
fn primitive(p: &[Rational]) -> Vec<BigInt> {
    let den = Rational::common_denominator(p.iter());
    let ints: Vec<BigInt> = p
        .iter()
        .map(|c| (c * &Rational::from(den.clone())).numer().clone())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    ints.into_iter().map(|c| c / &g).collect()
}

/// All rational roots of `p` (univariate in `var`) inside the closed window
/// `[lo, hi]`, sorted ascending and without repetition.
///
/// A real root in the window that is not rational yields
/// [`Error::IrrationalBreakpoint`].
pub fn rational_roots(p: &Poly, var: Var, lo: &Rational, hi: &Rational) -> Result<Vec<Rational>> {
    let coeffs = trim(p.univariate_coeffs(var)?);
    if coeffs.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    if lo > hi {
        return Ok(Vec::new());
    }
    let g = gcd(&coeffs, &derivative(&coeffs));
    let sqfree = if g.len() > 1 { quotient(&coeffs, &g) } else { coeffs.clone() };
    if sqfree.len() <= 1 {
        return Ok(Vec::new());
    }
    let ints = primitive(&sqfree);
    let lead = ints.last().expect("non-empty").abs();
    let lead_q = Rational::from(lead.clone());
    let half_step = Rational::from_bigints(BigInt::one(), &lead * 2)?;
    let chain = sturm_chain(&sqfree);

    let mut roots = Vec::new();
    if eval(&sqfree, lo).is_zero() {
        roots.push(lo.clone());
    }
    // Half-open intervals (a, b] holding at least one root.
    let mut stack = vec![(lo.clone(), hi.clone())];
    let mut found_in_open = Vec::new();
    while let Some((a, b)) = stack.pop() {
        let count = variations(&chain, &a) - variations(&chain, &b);
        if count == 0 {
            continue;
        }
        if count == 1 && &b - &a < half_step {
            // The unique root r has lead * r integral if it is rational.
            let lo_k = (&a * &lead_q).floor();
            let hi_k = (&b * &lead_q).ceil();
            let mut k = lo_k;
            let mut hit = None;
            while k <= hi_k {
                let x = Rational::from_bigints(k.clone(), lead.clone())?;
                if x > a && x <= b && eval(&sqfree, &x).is_zero() {
                    hit = Some(x);
                    break;
                }
                k += 1;
            }
            match hit {
                Some(x) => found_in_open.push(x),
                None => {
                    return Err(Error::IrrationalBreakpoint {
                        poly: p.to_string(),
                        lo: a.to_string(),
                        hi: b.to_string(),
                    })
                }
            }
            continue;
        }
        let mid = (&a + &b) / Rational::from(2);
        stack.push((a, mid.clone()));
        stack.push((mid, b));
    }
    found_in_open.sort();
    roots.extend(found_in_open);
    roots.dedup();
    Ok(roots)
}
