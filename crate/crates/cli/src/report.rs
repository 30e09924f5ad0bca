//! Machine-readable reports. Every exact number is a string such as `"37/44"`
//! or `"22"`, never a float.

use deltaflag_core::checks::{CheckFailure, Mismatch};
use deltaflag_core::invariants::{Contribution, FlagAnalysis};
use deltaflag_core::{Analysis, ChamberedDecomposition, DeltaReport, Rational, Verification};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "deltaflag-report/1";
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn frac(r: &Rational) -> String {
    r.to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub id: String,
    pub numerator: String,
    pub s: String,
    pub value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DeltaJson {
    pub terms: Vec<TermJson>,
    pub bound: String,
    pub argmin: String,
    pub upper_bound: String,
    pub sharp: bool,
}

impl From<&DeltaReport> for DeltaJson {
    fn from(r: &DeltaReport) -> Self {
        Self {
            terms: r
                .terms
                .iter()
                .map(|t| TermJson {
                    id: t.id.clone(),
                    numerator: frac(&t.numerator),
                    s: frac(&t.s),
                    value: frac(&t.value),
                })
                .collect(),
            bound: frac(&r.bound),
            argmin: r.argmin.clone(),
            upper_bound: frac(&r.upper_bound),
            sharp: r.sharp,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct QuantityJson {
    pub key: String,
    pub computed: Option<String>,
    pub expected: Option<String>,
    /// True iff both sides are present and equal.
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FailureJson {
    pub check: String,
    pub detail: String,
}

impl From<&CheckFailure> for FailureJson {
    fn from(f: &CheckFailure) -> Self {
        Self {
            check: f.check.to_string(),
            detail: f.detail.clone(),
        }
    }
}

/// Every computed value, joined with the expected block.
pub fn quantities(v: &Verification, expected: &std::collections::BTreeMap<String, Rational>) -> Vec<QuantityJson> {
    let computed = v.analysis.values();
    let mut keys: Vec<&String> = computed.keys().chain(expected.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|k| {
            let c = computed.get(k);
            let e = expected.get(k);
            QuantityJson {
                key: k.clone(),
                computed: c.map(frac),
                expected: e.map(frac),
                matches: c.is_some() && c == e,
            }
        })
        .collect()
}

pub fn mismatch_line(m: &Mismatch) -> String {
    match &m.computed {
        Some(c) => format!("{}: expected {}, computed {}", m.key, m.expected, c),
        None => format!("{}: expected {}, not computed", m.key, m.expected),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ChamberJson {
    pub lo: String,
    pub hi: String,
    /// Coordinates of the positive part, one polynomial per basis element.
    pub positive: Vec<String>,
    pub negative: Vec<NegativeJson>,
    pub volume: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NegativeJson {
    pub curve: String,
    pub coefficient: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WalkJson {
    pub var: String,
    pub basis: Vec<String>,
    /// Threefold chamber this walk refines, for surface walks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threefold_chamber: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer: Option<[String; 2]>,
    pub chambers: Vec<ChamberJson>,
}

pub fn walk(dec: &ChamberedDecomposition, threefold_chamber: Option<usize>) -> WalkJson {
    let basis = dec
        .chambers
        .first()
        .map(|c| c.positive.lattice().basis().to_vec())
        .unwrap_or_default();
    WalkJson {
        var: dec.var.name().to_string(),
        basis,
        threefold_chamber,
        outer: dec.outer.as_ref().map(|(a, b)| [frac(a), frac(b)]),
        chambers: dec
            .chambers
            .iter()
            .map(|c| ChamberJson {
                lo: c.lo.to_string(),
                hi: c.hi.to_string(),
                positive: c.positive.coords().iter().map(|p| p.to_string()).collect(),
                negative: c
                    .negative
                    .iter()
                    .map(|(i, a)| NegativeJson {
                        curve: dec.candidates[*i].name.clone(),
                        coefficient: a.to_string(),
                    })
                    .collect(),
                volume: c.volume.to_string(),
            })
            .collect(),
    }
}

/// Per-chamber contributions, already multiplied by their normalizing
/// factors so that they add up to the reported values.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ContributionJson {
    pub lo: String,
    pub hi: String,
    pub first: String,
    pub second: String,
}

fn contributions(cs: &[Contribution], first: &Rational, second: &Rational) -> Vec<ContributionJson> {
    cs.iter()
        .map(|c| ContributionJson {
            lo: frac(&c.lo),
            hi: frac(&c.hi),
            first: frac(&(&c.first * first)),
            second: frac(&(&c.second * second)),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PointJson {
    pub name: String,
    pub different: String,
    pub s_point: String,
    pub f_term: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contributions: Option<Vec<ContributionJson>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FlagJson {
    pub name: String,
    pub s_curve: String,
    pub walks: Vec<WalkJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contributions: Option<Vec<ContributionJson>>,
    pub points: Vec<PointJson>,
}

/// Normalizing factors: `3/(-K)^3` for squares and curve terms, `6/(-K)^3`
/// for the point correction.
pub fn factors(norm: &Rational) -> (Rational, Rational) {
    let three = Rational::from(3).checked_div(norm).expect("positive volume");
    let six = &three * &Rational::from(2);
    (three, six)
}

fn flag(f: &FlagAnalysis, norm: &Rational, verbose: bool) -> FlagJson {
    let (three, six) = factors(norm);
    FlagJson {
        name: f.name.clone(),
        s_curve: frac(&f.s_curve),
        walks: f.pieces.iter().map(|(k, d)| walk(d, Some(*k))).collect(),
        contributions: verbose.then(|| contributions(&f.contributions, &three, &three)),
        points: f
            .points
            .iter()
            .map(|p| PointJson {
                name: p.name.clone(),
                different: frac(&p.different),
                s_point: frac(&p.s_point),
                f_term: frac(&p.f_term),
                contributions: verbose.then(|| contributions(&p.contributions, &three, &six)),
            })
            .collect(),
    }
}

/// Output of `deltaflag compute --json`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ComputeJson {
    pub schema: String,
    pub engine_version: String,
    pub scenario: String,
    pub source: String,
    pub norm: String,
    pub tau: String,
    pub s_divisor: String,
    pub threefold: WalkJson,
    pub flags: Vec<FlagJson>,
    pub delta: DeltaJson,
    pub quantities: Vec<QuantityJson>,
    pub failures: Vec<FailureJson>,
    pub elapsed_ms: f64,
}

pub fn compute_json(
    v: &Verification,
    expected: &std::collections::BTreeMap<String, Rational>,
    tau: &Rational,
    source: String,
    verbose: bool,
    elapsed_ms: f64,
    name: &str,
) -> ComputeJson {
    let a: &Analysis = &v.analysis;
    ComputeJson {
        schema: SCHEMA.into(),
        engine_version: ENGINE_VERSION.into(),
        scenario: name.to_string(),
        source,
        norm: frac(&a.norm),
        tau: frac(tau),
        s_divisor: frac(&a.s_divisor),
        threefold: walk(&a.threefold, None),
        flags: a.flags.iter().map(|f| flag(f, &a.norm, verbose)).collect(),
        delta: (&a.report).into(),
        quantities: quantities(v, expected),
        failures: v.failures.iter().map(Into::into).collect(),
        elapsed_ms,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScenarioJson {
    pub scenario: String,
    pub source: String,
    /// `ok`, `mismatch` or `error`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaJson>,
    pub quantities: Vec<QuantityJson>,
    pub failures: Vec<FailureJson>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GlobalJson {
    pub bound: String,
    pub scenario: String,
    pub argmin: String,
}

/// Output of `deltaflag verify --json`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VerifyJson {
    pub schema: String,
    pub engine_version: String,
    pub scenarios: Vec<ScenarioJson>,
    pub global: Option<GlobalJson>,
    pub elapsed_ms: f64,
}
