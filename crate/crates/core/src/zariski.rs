//! Parametric Zariski decomposition against a declared set of negative
//! curves.
//!
//! The walk moves along one variable `w` starting from a lower boundary. In
//! each chamber the support of the negative part is fixed and its
//! coefficients solve `P · f_i = 0` for the detector curves `f_i` of the
//! support. The chamber ends where the first non-support pairing `P · f`
//! reaches zero. On surfaces the walk may run over a range of an outer
//! variable, in which case the range is cut wherever the combinatorics of
//! the walk change.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::exactmath::{rational_roots, Assignment, Piece, PiecewiseFn, Poly, Rational, Var};
use crate::lattice::{intersect, intersect_curve, param_intersect, param_intersect_curve, CurveClass, DivisorClass, ParamDivisor};

const MAX_STEPS: usize = 4096;
const MAX_CHAMBERS: usize = 64;

/// A divisor that may enter the negative part, with the curve whose
/// pairing decides when it does. On a surface the curve is the divisor
/// itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeCandidate {
    pub name: String,
    pub class: DivisorClass,
    pub detector: CurveClass,
}

impl NegativeCandidate {
    pub fn new(name: impl Into<String>, class: DivisorClass, detector: CurveClass) -> Result<Self> {
        if class.lattice() != detector.lattice() {
            return Err(Error::LatticeMismatch(
                class.lattice().name().into(),
                detector.lattice().name().into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            class,
            detector,
        })
    }

    pub fn on_surface(name: impl Into<String>, class: DivisorClass) -> Result<Self> {
        let name = name.into();
        let detector = CurveClass::on_surface(name.clone(), class.clone())?;
        Ok(Self {
            name,
            class,
            detector,
        })
    }
}

/// One region of constant support: `lo <= w <= hi`, where the bounds are
/// polynomials in the outer variable (constants for one-parameter walks).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber {
    pub lo: Poly,
    pub hi: Poly,
    pub positive: ParamDivisor,
    /// Candidate index and coefficient.
    pub negative: Vec<(usize, Poly)>,
    pub volume: Poly,
}

impl Chamber {
    pub fn coefficient(&self, candidate: usize) -> Poly {
        self.negative
            .iter()
            .find(|(i, _)| *i == candidate)
            .map(|(_, c)| c.clone())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChamberedDecomposition {
    pub var: Var,
    /// Range of the outer variable, for walks on a two-parameter family.
    pub outer: Option<(Rational, Rational)>,
    pub candidates: Vec<NegativeCandidate>,
    pub chambers: Vec<Chamber>,
}

impl ChamberedDecomposition {
    /// Where the walk stopped.
    pub fn threshold(&self) -> Poly {
        self.chambers.last().map(|c| c.hi.clone()).unwrap_or_default()
    }

    pub fn candidate_index(&self, name: &str) -> Option<usize> {
        self.candidates.iter().position(|c| c.name == name)
    }

    /// Indices of candidates that appear in some negative part.
    pub fn active(&self) -> BTreeSet<usize> {
        self.chambers
            .iter()
            .flat_map(|c| c.negative.iter().map(|(i, _)| *i))
            .collect()
    }
}

pub fn volume_fn(dec: &ChamberedDecomposition) -> PiecewiseFn {
    PiecewiseFn {
        var: dec.var,
        pieces: dec
            .chambers
            .iter()
            .map(|c| Piece {
                lo: c.lo.clone(),
                hi: c.hi.clone(),
                value: c.volume.clone(),
            })
            .collect(),
    }
}

/// Coefficient of a candidate in the negative part, zero where it is absent.
pub fn ord_along(dec: &ChamberedDecomposition, name: &str) -> Result<PiecewiseFn> {
    let idx = dec
        .candidate_index(name)
        .ok_or_else(|| Error::UnknownCurve(name.into()))?;
    Ok(PiecewiseFn {
        var: dec.var,
        pieces: dec
            .chambers
            .iter()
            .map(|c| Piece {
                lo: c.lo.clone(),
                hi: c.hi.clone(),
                value: c.coefficient(idx),
            })
            .collect(),
    })
}

/// Walk `d(u)` for `u` in `[0, tau]`. The walk must reach `tau`; a declared
/// curve that is not a detector turning negative before that means the
/// family left the pseudoeffective cone.
pub fn decompose(
    d: &ParamDivisor,
    candidates: &[NegativeCandidate],
    mori: &[CurveClass],
    tau: &Rational,
) -> Result<ChamberedDecomposition> {
    let walk = Walk::new(d, Var::U, candidates, mori, None, Some(tau.clone()))?;
    let mut out = walk.run(None)?;
    Ok(out.remove(0))
}

/// Walk `d(u, v)` in `v` from 0 for every `u` in `u_range`, stopping where the
/// positive part stops pairing non-negatively with `z` or with a declared
/// curve of non-negative square. Returns one decomposition per piece of the
/// `u` range, in order.
pub fn decompose_in_v(
    d: &ParamDivisor,
    z: &CurveClass,
    candidates: &[NegativeCandidate],
    mori: &[CurveClass],
    u_range: (&Rational, &Rational),
) -> Result<Vec<ChamberedDecomposition>> {
    let walk = Walk::new(d, Var::V, candidates, mori, Some(z), None)?;
    walk.run(Some((u_range.0.clone(), u_range.1.clone())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Candidate(usize),
    /// Crossing it ends the walk.
    Terminator,
    /// A negative curve nobody declared as a candidate.
    Undeclared,
}

struct Check {
    name: String,
    vector: Vec<Rational>,
    kind: Kind,
}

struct Walk<'a> {
    w: Var,
    d: &'a ParamDivisor,
    candidates: &'a [NegativeCandidate],
    checks: Vec<Check>,
    surface: bool,
    end: Option<Rational>,
}

enum Step {
    Split(Vec<Rational>),
    Chamber {
        chamber: Option<Chamber>,
        next: Option<(Poly, BTreeSet<usize>)>,
    },
}

struct State {
    outer: Option<(Rational, Rational)>,
    lo: Poly,
    support: BTreeSet<usize>,
    chambers: Vec<Chamber>,
}

fn pairing(p: &ParamDivisor, vector: &[Rational]) -> Poly {
    let mut out = Poly::zero();
    for (c, k) in p.coords().iter().zip(vector) {
        out = &out + &c.scale(k);
    }
    out
}

fn solve(m: &[Vec<Rational>], rhs: &[Poly]) -> Option<Vec<Poly>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut b: Vec<Poly> = rhs.to_vec();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip().ok()?;
        for k in 0..n {
            a[col][k] = &a[col][k] * &inv;
        }
        b[col] = b[col].scale(&inv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..n {
                    let t = &a[col][k] * &f;
                    a[r][k] -= &t;
                }
                b[r] = &b[r] - &b[col].scale(&f);
            }
        }
    }
    Some(b)
}

fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            let f = &a[r][col] / &a[col][col];
            for k in col..n {
                let t = &a[col][k] * &f;
                a[r][k] -= &t;
            }
        }
    }
    det
}

/// Whether a symmetric matrix is negative definite, by the signs of its
/// leading principal minors.
pub fn is_negative_definite(m: &[Vec<Rational>]) -> bool {
    (1..=m.len()).all(|k| {
        let minor: Vec<Vec<Rational>> = m[..k].iter().map(|row| row[..k].to_vec()).collect();
        let want = if k % 2 == 1 { -1 } else { 1 };
        determinant(&minor).signum() == want
    })
}

fn names(candidates: &[NegativeCandidate], support: &BTreeSet<usize>) -> String {
    support
        .iter()
        .map(|&i| candidates[i].name.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Roots of `p` strictly inside `(a, b)`.
fn interior_roots(p: &Poly, a: &Rational, b: &Rational) -> Result<Vec<Rational>> {
    if p.is_zero() || p.as_constant().is_some() {
        return Ok(Vec::new());
    }
    Ok(rational_roots(p, Var::U, a, b)?
        .into_iter()
        .filter(|r| r > a && r < b)
        .collect())
}

impl<'a> Walk<'a> {
    fn new(
        d: &'a ParamDivisor,
        w: Var,
        candidates: &'a [NegativeCandidate],
        mori: &[CurveClass],
        z: Option<&CurveClass>,
        end: Option<Rational>,
    ) -> Result<Self> {
        let surface = d.lattice().degree() == 2;
        let mut checks = Vec::new();
        let mut names_seen = BTreeSet::new();
        for (i, c) in candidates.iter().enumerate() {
            if c.class.lattice() != d.lattice() || c.detector.lattice() != d.lattice() {
                return Err(Error::LatticeMismatch(
                    d.lattice().name().into(),
                    c.class.lattice().name().into(),
                ));
            }
            if !names_seen.insert(c.name.clone()) {
                return Err(Error::Validation(format!("duplicate candidate {}", c.name)));
            }
            checks.push(Check {
                name: c.name.clone(),
                vector: c.detector.pairing_vector(),
                kind: Kind::Candidate(i),
            });
        }
        let detectors: Vec<Vec<Rational>> = checks.iter().map(|c| c.vector.clone()).collect();
        for m in mori {
            if m.lattice() != d.lattice() {
                return Err(Error::LatticeMismatch(
                    d.lattice().name().into(),
                    m.lattice().name().into(),
                ));
            }
            let vector = m.pairing_vector();
            if detectors.contains(&vector) {
                continue;
            }
            let kind = match m.self_intersection() {
                Some(s) if s.is_negative() => Kind::Undeclared,
                _ => Kind::Terminator,
            };
            checks.push(Check {
                name: m.name().into(),
                vector,
                kind,
            });
        }
        if let Some(z) = z {
            if z.lattice() != d.lattice() {
                return Err(Error::LatticeMismatch(
                    d.lattice().name().into(),
                    z.lattice().name().into(),
                ));
            }
            checks.push(Check {
                name: z.name().into(),
                vector: z.pairing_vector(),
                kind: Kind::Terminator,
            });
        }
        Ok(Self {
            w,
            d,
            candidates,
            checks,
            surface,
            end,
        })
    }

    fn run(&self, outer: Option<(Rational, Rational)>) -> Result<Vec<ChamberedDecomposition>> {
        let mut stack = vec![State {
            outer,
            lo: Poly::zero(),
            support: BTreeSet::new(),
            chambers: Vec::new(),
        }];
        let mut done = Vec::new();
        let mut steps = 0;
        while let Some(mut state) = stack.pop() {
            loop {
                steps += 1;
                if steps > MAX_STEPS || state.chambers.len() > MAX_CHAMBERS {
                    return Err(Error::ChamberLimit);
                }
                match self.step(&state)? {
                    Step::Split(points) => {
                        let (a, b) = state.outer.clone().expect("splits need an outer range");
                        let mut cuts = vec![a];
                        cuts.extend(points);
                        cuts.push(b);
                        // Pushed in reverse so pieces are processed left to right.
                        for w in cuts.windows(2).rev() {
                            stack.push(State {
                                outer: Some((w[0].clone(), w[1].clone())),
                                lo: state.lo.clone(),
                                support: state.support.clone(),
                                chambers: state.chambers.clone(),
                            });
                        }
                        break;
                    }
                    Step::Chamber { chamber, next } => {
                        state.chambers.extend(chamber);
                        match next {
                            Some((lo, support)) => {
                                state.lo = lo;
                                state.support = support;
                            }
                            None => {
                                done.push(ChamberedDecomposition {
                                    var: self.w,
                                    outer: state.outer.clone(),
                                    candidates: self.candidates.to_vec(),
                                    chambers: std::mem::take(&mut state.chambers),
                                });
                                break;
                            }
                        }
                    }
                }
            }
        }
        done.sort_by(|x, y| x.outer.cmp(&y.outer));
        Ok(done)
    }

    /// Positive part and coefficients for a fixed support.
    fn solve_support(&self, support: &BTreeSet<usize>) -> Result<(Vec<(usize, Poly)>, ParamDivisor)> {
        let idx: Vec<usize> = support.iter().copied().collect();
        let m: Vec<Vec<Rational>> = idx
            .iter()
            .map(|&j| {
                idx.iter()
                    .map(|&i| intersect_curve(&self.candidates[i].class, &self.candidates[j].detector))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        let rhs: Vec<Poly> = idx
            .iter()
            .map(|&j| param_intersect_curve(self.d, &self.candidates[j].detector))
            .collect::<Result<_>>()?;
        let coeffs = solve(&m, &rhs).ok_or_else(|| Error::SingularGram(names(self.candidates, support)))?;
        if self.surface && !idx.is_empty() {
            let gram: Vec<Vec<Rational>> = idx
                .iter()
                .map(|&i| {
                    idx.iter()
                        .map(|&j| intersect(&[&self.candidates[i].class, &self.candidates[j].class]))
                        .collect::<Result<_>>()
                })
                .collect::<Result<_>>()?;
            if !is_negative_definite(&gram) {
                return Err(Error::NotNegativeDefinite(names(self.candidates, support)));
            }
        }
        let mut p = self.d.clone();
        for (&i, a) in idx.iter().zip(&coeffs) {
            p = p.sub_multiple(a, &self.candidates[i].class)?;
        }
        Ok((idx.into_iter().zip(coeffs).collect(), p))
    }

    /// Sign of `g` just after `w = lo`, at the outer sample point.
    fn sign_after(&self, g: &Poly, sample: &Assignment, lo: &Rational) -> Result<i32> {
        let at = sample.clone().with(self.w, lo.clone());
        let mut h = g.clone();
        loop {
            let s = h.eval(&at)?.signum();
            if s != 0 || !h.depends_on(self.w) {
                return Ok(s);
            }
            h = h.derivative(self.w);
        }
    }

    fn step(&self, state: &State) -> Result<Step> {
        let sample = match &state.outer {
            Some((a, b)) => Assignment::u((a + b) / Rational::from(2)),
            None => Assignment::new(),
        };
        let lo_s = state.lo.eval(&sample)?;
        if let Some(end) = &self.end {
            if &lo_s >= end {
                return Ok(Step::Chamber {
                    chamber: None,
                    next: None,
                });
            }
        }
        let mut split_polys = Vec::new();
        let mut support = state.support.clone();
        let (negative, p) = loop {
            let (negative, p) = self.solve_support(&support)?;
            let mut added = false;
            for check in &self.checks {
                let Kind::Candidate(i) = check.kind else { continue };
                if support.contains(&i) {
                    continue;
                }
                let g = pairing(&p, &check.vector);
                split_polys.push(g.substitute(self.w, &state.lo)?);
                if self.sign_after(&g, &sample, &lo_s)? < 0 {
                    support.insert(i);
                    added = true;
                }
            }
            if !added {
                break (negative, p);
            }
        };

        let mut terminated = false;
        let mut undeclared = None;
        let mut events: Vec<(Poly, Kind, &str)> = Vec::new();
        for check in &self.checks {
            if let Kind::Candidate(i) = check.kind {
                if support.contains(&i) {
                    continue;
                }
            }
            let g = pairing(&p, &check.vector);
            split_polys.push(g.substitute(self.w, &state.lo)?);
            match (self.sign_after(&g, &sample, &lo_s)? < 0, check.kind) {
                (true, Kind::Terminator) => terminated = true,
                (true, Kind::Undeclared) => undeclared = Some(check.name.clone()),
                _ => {}
            }
            let coeffs = g.coefficients_in(self.w);
            if coeffs.len() > 2 {
                return Err(Error::UnsupportedBoundary(format!(
                    "pairing with {} is not affine in {}",
                    check.name, self.w
                )));
            }
            let c1 = coeffs.get(1).cloned().unwrap_or_default();
            let Some(c1) = c1.as_constant() else {
                return Err(Error::UnsupportedBoundary(format!(
                    "pairing with {} has slope {} in {}",
                    check.name, c1, self.w
                )));
            };
            if c1.is_negative() {
                let root = coeffs[0].scale(&(-c1.recip()?));
                events.push((root, check.kind, check.name.as_str()));
            }
        }

        if let Some((a, b)) = &state.outer {
            let mut cuts = BTreeSet::new();
            for poly in &split_polys {
                cuts.extend(interior_roots(poly, a, b)?);
            }
            if !cuts.is_empty() {
                return Ok(Step::Split(cuts.into_iter().collect()));
            }
        }

        if terminated {
            if let Some(end) = &self.end {
                if &lo_s < end {
                    let curve = self
                        .checks
                        .iter()
                        .find(|c| c.kind == Kind::Terminator && self.sign_after(&pairing(&p, &c.vector), &sample, &lo_s).ok() == Some(-1))
                        .map(|c| c.name.clone())
                        .unwrap_or_default();
                    return Err(Error::NotPseudoeffective {
                        at: lo_s.to_string(),
                        curve,
                        tau: end.to_string(),
                    });
                }
            }
            return Ok(Step::Chamber {
                chamber: None,
                next: None,
            });
        }
        if let Some(name) = undeclared {
            return Err(Error::UndeclaredNegativeCurve(name));
        }

        if let Some(end) = &self.end {
            events.push((Poly::constant(end.clone()), Kind::Terminator, "end"));
        }
        let mut values = Vec::with_capacity(events.len());
        for (r, _, _) in &events {
            values.push(r.eval(&sample)?);
        }
        let Some(min) = values.iter().min().cloned() else {
            return Err(Error::Unbounded);
        };
        let first = values.iter().position(|v| *v == min).expect("non-empty");
        let hi = events[first].0.clone();

        if let Some((a, b)) = &state.outer {
            let mut cuts = BTreeSet::new();
            for (r, _, _) in &events {
                cuts.extend(interior_roots(&(r - &hi), a, b)?);
            }
            cuts.extend(interior_roots(&(&hi - &state.lo), a, b)?);
            if !cuts.is_empty() {
                return Ok(Step::Split(cuts.into_iter().collect()));
            }
        }

        let at_min: Vec<(Kind, &str)> = events
            .iter()
            .zip(&values)
            .filter(|(_, v)| **v == min)
            .map(|((_, k, n), _)| (*k, *n))
            .collect();
        let volume = {
            let copies: Vec<&ParamDivisor> = vec![&p; self.d.lattice().degree()];
            param_intersect(&copies)?
        };
        let chamber = Chamber {
            lo: state.lo.clone(),
            hi: hi.clone(),
            positive: p,
            negative,
            volume,
        };
        let ends = at_min.iter().any(|(k, _)| *k == Kind::Terminator);
        if ends {
            if let Some(end) = &self.end {
                if &min < end {
                    let curve = at_min
                        .iter()
                        .find(|(k, _)| *k == Kind::Terminator)
                        .map(|(_, n)| n.to_string())
                        .unwrap_or_default();
                    return Err(Error::NotPseudoeffective {
                        at: min.to_string(),
                        curve,
                        tau: end.to_string(),
                    });
                }
            }
            return Ok(Step::Chamber {
                chamber: Some(chamber),
                next: None,
            });
        }
        if let Some((_, name)) = at_min.iter().find(|(k, _)| *k == Kind::Undeclared) {
            return Err(Error::UndeclaredNegativeCurve(name.to_string()));
        }
        Ok(Step::Chamber {
            chamber: Some(chamber),
            next: Some((hi, support)),
        })
    }
}
