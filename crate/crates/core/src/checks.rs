//! Consistency checks on a computed analysis and comparison against the
//! expected values a scenario declares.

use crate::error::Result;
use crate::exactmath::{Assignment, Poly, Rational, Var};
use crate::invariants::{analyze, Analysis};
use crate::lattice::{param_intersect, param_intersect_curve};
use crate::scenarios::FlagScenario;
use crate::zariski::{volume_fn, ChamberedDecomposition};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub key: String,
    pub expected: Rational,
    /// `None` when the analysis has no value under that key.
    pub computed: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFailure {
    pub check: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Verification {
    pub analysis: Analysis,
    pub mismatches: Vec<Mismatch>,
    pub failures: Vec<CheckFailure>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.failures.is_empty()
    }
}

fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b).checked_div(&Rational::from(2)).expect("nonzero")
}

fn nonzero(polys: &[Poly]) -> Option<&Poly> {
    polys.iter().find(|p| !p.is_zero())
}

/// Orthogonality and sign of the negative part on one walk.
fn walk_failures(
    dec: &ChamberedDecomposition,
    label: &str,
    sample: impl Fn(&Poly, &Poly) -> Result<Assignment>,
    out: &mut Vec<CheckFailure>,
) -> Result<()> {
    for (k, c) in dec.chambers.iter().enumerate() {
        let at = sample(&c.lo, &c.hi)?;
        for (i, coeff) in &c.negative {
            let cand = &dec.candidates[*i];
            let p = param_intersect_curve(&c.positive, &cand.detector)?;
            if !p.is_zero() {
                out.push(CheckFailure {
                    check: "orthogonality",
                    detail: format!("{label} chamber {k}: P · {} = {p}", cand.name),
                });
            }
            let value = coeff.eval(&at)?;
            if value.is_negative() {
                out.push(CheckFailure {
                    check: "negative part sign",
                    detail: format!("{label} chamber {k}: coefficient of {} is {value} inside", cand.name),
                });
            }
        }
    }
    if let Some(d) = nonzero(&volume_fn(dec).continuity_defects()?) {
        out.push(CheckFailure {
            check: "volume continuity",
            detail: format!("{label}: volume jumps by {d}"),
        });
    }
    Ok(())
}

/// Structural checks on an analysis; an empty list means all hold.
pub fn consistency_failures(s: &FlagScenario, a: &Analysis) -> Result<Vec<CheckFailure>> {
    let mut out = Vec::new();
    let three = &a.threefold;

    let first = three.chambers.first().map(|c| c.volume.eval(&Assignment::u(Rational::zero())));
    if let Some(v) = first.transpose()? {
        if v != a.norm {
            out.push(CheckFailure {
                check: "anticanonical volume",
                detail: format!("volume at u = 0 is {v}, (-K)^3 is {}", a.norm),
            });
        }
    }
    if let Some(last) = three.chambers.last() {
        let v = last.volume.eval(&Assignment::u(s.flag.tau.clone()))?;
        if !v.is_zero() {
            out.push(CheckFailure {
                check: "threshold volume",
                detail: format!("volume at tau = {} is {v}", s.flag.tau),
            });
        }
    }
    walk_failures(
        three,
        "threefold",
        |lo, hi| {
            let (lo, hi) = (lo.eval(&Assignment::new())?, hi.eval(&Assignment::new())?);
            Ok(Assignment::u(midpoint(&lo, &hi)))
        },
        &mut out,
    )?;

    let y = s.flag.divisor.to_param();
    for f in &a.flags {
        for (k, rp) in f.restricted.iter().enumerate() {
            let pos = &three.chambers[k].positive;
            let up = param_intersect(&[pos, pos, &y])?;
            let down = param_intersect(&[rp, rp])?;
            let d = &up - &down;
            if !d.is_zero() {
                out.push(CheckFailure {
                    check: "restriction",
                    detail: format!("flag {} chamber {k}: P^2·Y - (P|Y)^2 = {d}", f.name),
                });
            }
        }
        for (k, dec) in &f.pieces {
            let (ua, ub) = dec.outer.clone().expect("surface walk");
            let label = format!("flag {} over [{ua}, {ub}] (threefold chamber {k})", f.name);
            let u = midpoint(&ua, &ub);
            walk_failures(
                dec,
                &label,
                |lo, hi| {
                    let at = Assignment::u(u.clone());
                    let v = midpoint(&lo.eval(&at)?, &hi.eval(&at)?);
                    Ok(at.with(Var::V, v))
                },
                &mut out,
            )?;
            if let Some(last) = dec.chambers.last() {
                let end = last.volume.substitute(Var::V, &last.hi)?;
                if !end.is_zero() {
                    out.push(CheckFailure {
                        check: "threshold volume",
                        detail: format!("{label}: volume at the end of the walk is {end}"),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Computed values against the expected block, key by key.
pub fn mismatches(s: &FlagScenario, a: &Analysis) -> Vec<Mismatch> {
    let values = a.values();
    s.expected
        .iter()
        .filter_map(|(key, expected)| {
            let computed = values.get(key).cloned();
            (computed.as_ref() != Some(expected)).then(|| Mismatch {
                key: key.clone(),
                expected: expected.clone(),
                computed,
            })
        })
        .collect()
}

pub fn verify_scenario(s: &FlagScenario) -> Result<Verification> {
    let analysis = analyze(s)?;
    let failures = consistency_failures(s, &analysis)?;
    let mismatches = mismatches(s, &analysis);
    Ok(Verification {
        analysis,
        mismatches,
        failures,
    })
}
