#![allow(dead_code)]

use deltaflag_core::{Poly, Rational};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn r(s: &str) -> Rational {
    s.parse().unwrap_or_else(|_| panic!("bad fraction {s}"))
}

/// Reads a polynomial written like `3u^2 - v^2 - 12u + 12` or `1/3 uv`.
pub fn p(text: &str) -> Poly {
    let spaced = text.replace('+', " + ").replace('-', " - ");
    let mut out = Poly::zero();
    let mut sign = 1i64;
    let mut pending = String::new();
    let flush = |term: &str, sign: i64, out: &mut Poly| {
        let term: String = term.chars().filter(|c| !c.is_whitespace()).collect();
        if term.is_empty() {
            return;
        }
        let split = term.find(['u', 'v']).unwrap_or(term.len());
        let coeff = if split == 0 { Rational::one() } else { r(&term[..split]) };
        let mut exps = [0u32; 2];
        let rest: Vec<char> = term[split..].chars().collect();
        let mut i = 0;
        while i < rest.len() {
            let slot = if rest[i] == 'u' { 0 } else { 1 };
            i += 1;
            let mut e = 1;
            if i < rest.len() && rest[i] == '^' {
                let start = i + 1;
                i = start;
                while i < rest.len() && rest[i].is_ascii_digit() {
                    i += 1;
                }
                e = rest[start..i].iter().collect::<String>().parse().unwrap();
            }
            exps[slot] += e;
        }
        let t = Poly::from_terms([(exps, coeff * Rational::from(sign))]);
        *out = &*out + &t;
    };
    for tok in spaced.split_whitespace() {
        match tok {
            "+" | "-" => {
                flush(&pending, sign, &mut out);
                pending.clear();
                sign = if tok == "-" { -1 } else { 1 };
            }
            t => pending.push_str(t),
        }
    }
    flush(&pending, sign, &mut out);
    out
}

pub fn constant(x: &Rational) -> Poly {
    Poly::constant(x.clone())
}
