//! Expected vanishing orders along a flag and the lower bounds built from
//! them.
//!
//! With `L = -K_X`, `P(u)` the positive part of `L - uY` and `P(u, v)` the
//! positive part of `P(u)|_Y - vZ` on the surface:
//!
//! ```text
//! S_X(Y)   = 1/L^3 ∫ P(u)^3 du
//! S(V; Z)  = 3/L^3 [ ∫ (P(u)|_Y)^2 ord_Z(N(u)|_Y) du + ∫∫ P(u, v)^2 dv du ]
//! S(W; p)  = 3/L^3 ∫∫ (P(u, v) · Z)^2 dv du + F_p
//! F_p      = 6/L^3 ∫∫ (P(u, v) · Z) ord_p(N'(u)|_Z + N(u, v)|_Z) dv du
//! ```
//!
//! and the bound is the minimum of `A_X(Y)/S_X(Y)`, `A_Y(Z)/S(V; Z)` and
//! `(1 - ord_p Δ)/S(W; p)` over the declared point cases.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactmath::{integrate_inner, Poly, Rational, Var};
use crate::lattice::{param_intersect, param_intersect_curve, CurveClass, ParamDivisor};
use crate::scenarios::{FlagScenario, PointCase, SurfaceFlag};
use crate::zariski::{decompose, decompose_in_v, ChamberedDecomposition};

/// Integral contributions over one chamber of the threefold walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contribution {
    pub lo: Rational,
    pub hi: Rational,
    /// Unnormalized integral of the first summand.
    pub first: Rational,
    /// Unnormalized integral of the second summand.
    pub second: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointAnalysis {
    pub name: String,
    pub different: Rational,
    pub s_point: Rational,
    pub f_term: Rational,
    /// `first` holds `∫∫ (P·Z)^2`, `second` holds `∫∫ (P·Z) ord_p`.
    pub contributions: Vec<Contribution>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagAnalysis {
    pub name: String,
    /// Restriction of the positive part, one per threefold chamber.
    pub restricted: Vec<ParamDivisor>,
    /// Surface decompositions tagged with the threefold chamber they refine.
    pub pieces: Vec<(usize, ChamberedDecomposition)>,
    pub s_curve: Rational,
    /// `first` holds `∫ (P|_Y)^2 ord_Z`, `second` holds `∫∫ vol`.
    pub contributions: Vec<Contribution>,
    pub points: Vec<PointAnalysis>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaTerm {
    /// `divisor`, `<flag>/curve` or `<flag>/<point>`.
    pub id: String,
    pub numerator: Rational,
    pub s: Rational,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaReport {
    pub terms: Vec<DeltaTerm>,
    pub bound: Rational,
    pub argmin: String,
    /// `A_X(Y)/S_X(Y)`, which bounds the local threshold from above.
    pub upper_bound: Rational,
    /// Whether the lower bound meets the upper bound.
    pub sharp: bool,
}

impl DeltaReport {
    pub fn from_terms(terms: Vec<DeltaTerm>, upper_bound: Rational) -> Result<Self> {
        let best = terms
            .iter()
            .min_by(|a, b| a.value.cmp(&b.value))
            .ok_or_else(|| Error::Validation("no terms".into()))?;
        let bound = best.value.clone();
        let argmin = best.id.clone();
        let sharp = bound == upper_bound;
        Ok(Self {
            terms,
            bound,
            argmin,
            upper_bound,
            sharp,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    /// `(-K)^3`.
    pub norm: Rational,
    pub threefold: ChamberedDecomposition,
    pub s_divisor: Rational,
    pub flags: Vec<FlagAnalysis>,
    pub report: DeltaReport,
}

impl Analysis {
    pub fn flag(&self, name: &str) -> Result<&FlagAnalysis> {
        self.flags
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| Error::UnknownFlag(name.into()))
    }

    /// Computed values under the keys used by expected-value blocks.
    pub fn values(&self) -> BTreeMap<String, Rational> {
        let mut out = BTreeMap::new();
        out.insert("s_divisor".to_string(), self.s_divisor.clone());
        for t in &self.report.terms {
            let key = match t.id.split_once('/') {
                None => "divisor_term".to_string(),
                Some((flag, "curve")) => format!("{flag}.curve_term"),
                Some((flag, point)) => format!("{flag}.{point}.point_term"),
            };
            out.insert(key, t.value.clone());
        }
        for f in &self.flags {
            out.insert(format!("{}.s_curve", f.name), f.s_curve.clone());
            for p in &f.points {
                out.insert(format!("{}.{}.s_point", f.name, p.name), p.s_point.clone());
                out.insert(format!("{}.{}.f_term", f.name, p.name), p.f_term.clone());
            }
        }
        out.insert("delta".to_string(), self.report.bound.clone());
        out
    }
}

fn constant(p: &Poly) -> Result<Rational> {
    p.as_constant()
        .ok_or_else(|| Error::BadPartition(format!("expected a constant, got {p}")))
}

/// `-K - uY` on the ambient lattice.
pub fn threefold_family(s: &FlagScenario) -> Result<ParamDivisor> {
    let k = &s.flag.antican;
    let y = &s.flag.divisor;
    let coords = k
        .coords()
        .iter()
        .zip(y.coords())
        .map(|(a, b)| Poly::linear(Var::U, a.clone(), -b))
        .collect();
    ParamDivisor::new(k.lattice().clone(), coords)
}

pub fn threefold_decomposition(s: &FlagScenario) -> Result<ChamberedDecomposition> {
    let ambient = s.ambient()?;
    decompose(&threefold_family(s)?, &ambient.candidates, &ambient.mori, &s.flag.tau)
}

pub fn anticanonical_volume(s: &FlagScenario) -> Result<Rational> {
    let k = &s.flag.antican;
    crate::lattice::intersect(&[k, k, k])
}

fn s_divisor_from(norm: &Rational, dec: &ChamberedDecomposition) -> Result<Rational> {
    let mut total = Rational::zero();
    for c in &dec.chambers {
        total += &constant(&integrate_inner(&c.volume, Var::U, &c.lo, &c.hi)?)?;
    }
    total.checked_div(norm)
}

/// `S_X(Y)`.
pub fn s_divisor(s: &FlagScenario) -> Result<Rational> {
    s_divisor_from(&anticanonical_volume(s)?, &threefold_decomposition(s)?)
}

fn z_curve(flag: &SurfaceFlag) -> Result<CurveClass> {
    CurveClass::on_surface("Z", flag.curve.clone())
}

/// Restriction of each threefold positive part and the surface walks.
fn surface_pieces(
    s: &FlagScenario,
    flag: &SurfaceFlag,
    threefold: &ChamberedDecomposition,
) -> Result<(Vec<ParamDivisor>, Vec<(usize, ChamberedDecomposition)>)> {
    let data = s.lattice(&flag.lattice)?;
    let z = z_curve(flag)?;
    let mut restricted = Vec::new();
    let mut pieces = Vec::new();
    for (k, c) in threefold.chambers.iter().enumerate() {
        let rp = c.positive.map_linear(&flag.restriction, &data.lattice)?;
        let coords = rp
            .coords()
            .iter()
            .zip(flag.curve.coords())
            .map(|(p, zc)| p - &Poly::var(Var::V).scale(zc))
            .collect();
        let d = ParamDivisor::new(data.lattice.clone(), coords)?;
        let (a, b) = (constant(&c.lo)?, constant(&c.hi)?);
        for dec in decompose_in_v(&d, &z, &data.candidates, &data.mori, (&a, &b))? {
            pieces.push((k, dec));
        }
        restricted.push(rp);
    }
    Ok((restricted, pieces))
}

fn outer(dec: &ChamberedDecomposition) -> (Rational, Rational) {
    dec.outer.clone().expect("surface walks carry an outer range")
}

fn double_integral(p: &Poly, lo_v: &Poly, hi_v: &Poly, a: &Rational, b: &Rational) -> Result<Rational> {
    let inner = integrate_inner(p, Var::V, lo_v, hi_v)?;
    constant(&integrate_inner(&inner, Var::U, &Poly::constant(a.clone()), &Poly::constant(b.clone()))?)
}

fn contributions_skeleton(threefold: &ChamberedDecomposition) -> Result<Vec<Contribution>> {
    threefold
        .chambers
        .iter()
        .map(|c| {
            Ok(Contribution {
                lo: constant(&c.lo)?,
                hi: constant(&c.hi)?,
                first: Rational::zero(),
                second: Rational::zero(),
            })
        })
        .collect()
}

/// `ord_Z(N(u)|_Y)` on one threefold chamber.
fn ord_on_surface(flag: &SurfaceFlag, threefold: &ChamberedDecomposition, k: usize) -> Result<Poly> {
    let mut ord = Poly::zero();
    for (i, coeff) in &threefold.chambers[k].negative {
        let name = &threefold.candidates[*i].name;
        let m = flag
            .pullback
            .get(name)
            .ok_or_else(|| Error::Validation(format!("flag {}: no pullback order for {name}", flag.name)))?;
        ord = &ord + &coeff.scale(m);
    }
    Ok(ord)
}

/// `ord_p(N'(u)|_Z + N(u, v)|_Z)` on one surface chamber.
fn ord_at_point(
    point: &PointCase,
    threefold: &ChamberedDecomposition,
    k: usize,
    dec: &ChamberedDecomposition,
    chamber: usize,
) -> Result<Poly> {
    let mult = |name: &str| {
        point
            .multiplicities
            .get(name)
            .cloned()
            .ok_or_else(|| Error::MissingIncidence {
                point: point.name.clone(),
                curve: name.into(),
            })
    };
    let mut ord = Poly::zero();
    for (i, coeff) in &threefold.chambers[k].negative {
        ord = &ord + &coeff.scale(&mult(&threefold.candidates[*i].name)?);
    }
    for (j, coeff) in &dec.chambers[chamber].negative {
        ord = &ord + &coeff.scale(&mult(&dec.candidates[*j].name)?);
    }
    Ok(ord)
}

fn analyze_flag(
    s: &FlagScenario,
    flag: &SurfaceFlag,
    norm: &Rational,
    threefold: &ChamberedDecomposition,
) -> Result<FlagAnalysis> {
    let (restricted, pieces) = surface_pieces(s, flag, threefold)?;
    let z = z_curve(flag)?;

    let mut curve_parts = contributions_skeleton(threefold)?;
    for (k, rp) in restricted.iter().enumerate() {
        let ord = ord_on_surface(flag, threefold, k)?;
        if ord.is_zero() {
            continue;
        }
        let c = &threefold.chambers[k];
        let integrand = param_intersect(&[rp, rp])?.checked_mul(&ord)?;
        curve_parts[k].first = constant(&integrate_inner(&integrand, Var::U, &c.lo, &c.hi)?)?;
    }
    for (k, dec) in &pieces {
        let (a, b) = outer(dec);
        for c in &dec.chambers {
            curve_parts[*k].second += &double_integral(&c.volume, &c.lo, &c.hi, &a, &b)?;
        }
    }
    let three = Rational::from(3);
    let total: Rational = curve_parts.iter().map(|c| &c.first + &c.second).sum();
    let s_curve = (&three * &total).checked_div(norm)?;

    let mut points = Vec::new();
    for point in &flag.points {
        let mut parts = contributions_skeleton(threefold)?;
        for (k, dec) in &pieces {
            let (a, b) = outer(dec);
            for (ci, c) in dec.chambers.iter().enumerate() {
                let pz = param_intersect_curve(&c.positive, &z)?;
                parts[*k].first += &double_integral(&pz.pow(2)?, &c.lo, &c.hi, &a, &b)?;
                let ord = ord_at_point(point, threefold, *k, dec, ci)?;
                if !ord.is_zero() {
                    parts[*k].second += &double_integral(&pz.checked_mul(&ord)?, &c.lo, &c.hi, &a, &b)?;
                }
            }
        }
        let first: Rational = parts.iter().map(|c| c.first.clone()).sum();
        let second: Rational = parts.iter().map(|c| c.second.clone()).sum();
        let f_term = (Rational::from(6) * second).checked_div(norm)?;
        let s_point = (&three * &first).checked_div(norm)? + &f_term;
        points.push(PointAnalysis {
            name: point.name.clone(),
            different: point.different.clone(),
            s_point,
            f_term,
            contributions: parts,
        });
    }

    Ok(FlagAnalysis {
        name: flag.name.clone(),
        restricted,
        pieces,
        s_curve,
        contributions: curve_parts,
        points,
    })
}

/// Runs every walk and integral of a scenario.
pub fn analyze(s: &FlagScenario) -> Result<Analysis> {
    let norm = anticanonical_volume(s)?;
    let threefold = threefold_decomposition(s)?;
    let s_div = s_divisor_from(&norm, &threefold)?;
    let flags = s
        .surfaces
        .iter()
        .map(|f| analyze_flag(s, f, &norm, &threefold))
        .collect::<Result<Vec<_>>>()?;

    let mut terms = Vec::new();
    let upper = s.flag.log_discrepancy.checked_div(&s_div)?;
    terms.push(DeltaTerm {
        id: "divisor".into(),
        numerator: s.flag.log_discrepancy.clone(),
        s: s_div.clone(),
        value: upper.clone(),
    });
    for (f, flag) in flags.iter().zip(&s.surfaces) {
        terms.push(DeltaTerm {
            id: format!("{}/curve", f.name),
            numerator: flag.log_discrepancy.clone(),
            s: f.s_curve.clone(),
            value: flag.log_discrepancy.checked_div(&f.s_curve)?,
        });
        for p in &f.points {
            let numerator = Rational::one() - &p.different;
            terms.push(DeltaTerm {
                id: format!("{}/{}", f.name, p.name),
                value: numerator.checked_div(&p.s_point)?,
                numerator,
                s: p.s_point.clone(),
            });
        }
    }
    let report = DeltaReport::from_terms(terms, upper)?;
    Ok(Analysis {
        norm,
        threefold,
        s_divisor: s_div,
        flags,
        report,
    })
}

/// `S(V; Z)` for the named flag.
pub fn s_curve(s: &FlagScenario, flag: &str) -> Result<Rational> {
    let f = s.surface(flag)?;
    let norm = anticanonical_volume(s)?;
    let threefold = threefold_decomposition(s)?;
    Ok(analyze_flag(s, f, &norm, &threefold)?.s_curve)
}

fn point_analysis(s: &FlagScenario, flag: &str, point: &str) -> Result<PointAnalysis> {
    let f = s.surface(flag)?;
    let case = f
        .points
        .iter()
        .find(|p| p.name == point)
        .ok_or_else(|| Error::UnknownPoint(point.into()))?;
    let single = SurfaceFlag {
        points: vec![case.clone()],
        ..f.clone()
    };
    let norm = anticanonical_volume(s)?;
    let threefold = threefold_decomposition(s)?;
    let mut a = analyze_flag(s, &single, &norm, &threefold)?;
    Ok(a.points.remove(0))
}

/// `F_p`.
pub fn f_term(s: &FlagScenario, flag: &str, point: &str) -> Result<Rational> {
    Ok(point_analysis(s, flag, point)?.f_term)
}

/// `S(W; p)`.
pub fn s_point(s: &FlagScenario, flag: &str, point: &str) -> Result<Rational> {
    Ok(point_analysis(s, flag, point)?.s_point)
}

pub fn delta_bound(s: &FlagScenario) -> Result<DeltaReport> {
    Ok(analyze(s)?.report)
}

/// `P(u)^2 · Y` on the threefold against `(P(u)|_Y)^2` on the surface, per
/// threefold chamber.
pub fn restriction_defects(s: &FlagScenario, flag: &str) -> Result<Vec<Poly>> {
    let f = s.surface(flag)?;
    let data = s.lattice(&f.lattice)?;
    let threefold = threefold_decomposition(s)?;
    let y = s.flag.divisor.to_param();
    threefold
        .chambers
        .iter()
        .map(|c| {
            let up = param_intersect(&[&c.positive, &c.positive, &y])?;
            let rp = c.positive.map_linear(&f.restriction, &data.lattice)?;
            let down = param_intersect(&[&rp, &rp])?;
            Ok(&up - &down)
        })
        .collect()
}
