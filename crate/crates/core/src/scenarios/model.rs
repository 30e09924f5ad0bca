use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactmath::Rational;
use crate::lattice::{CurveClass, DivisorClass, Lattice};
use crate::zariski::NegativeCandidate;

/// Everything living on one lattice: named classes, curves, candidates and
/// the curves used to test nefness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeData {
    pub lattice: Arc<Lattice>,
    /// Named classes beyond the basis, in declaration order.
    pub divisors: Vec<(String, DivisorClass)>,
    /// Curves given by intersection vectors (threefolds only).
    pub curves: Vec<CurveClass>,
    pub candidates: Vec<NegativeCandidate>,
    pub mori: Vec<CurveClass>,
}

impl LatticeData {
    pub fn new(lattice: Arc<Lattice>) -> Self {
        Self {
            lattice,
            divisors: Vec::new(),
            curves: Vec::new(),
            candidates: Vec::new(),
            mori: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        self.lattice.name()
    }

    /// A basis element or named class.
    pub fn class(&self, name: &str) -> Option<DivisorClass> {
        if let Some(i) = self.lattice.index_of(name) {
            return Some(DivisorClass::basis_element(self.lattice.clone(), i));
        }
        self.divisors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.clone())
    }

    /// A declared curve, or on a surface any named class.
    pub fn curve(&self, name: &str) -> Option<CurveClass> {
        if let Some(c) = self.curves.iter().find(|c| c.name() == name) {
            return Some(c.clone());
        }
        if self.lattice.degree() == 2 {
            return self
                .class(name)
                .and_then(|c| CurveClass::on_surface(name, c).ok());
        }
        None
    }

    /// Same data re-expressed over a replacement lattice with the same basis.
    pub fn rebased(&self, lattice: Arc<Lattice>) -> Result<Self> {
        let class = |c: &DivisorClass| DivisorClass::new(lattice.clone(), c.coords().to_vec());
        let curve = |c: &CurveClass| match c.kind() {
            crate::lattice::CurveKind::Surface(d) => CurveClass::on_surface(c.name(), class(d)?),
            crate::lattice::CurveKind::Cycle(v) => CurveClass::cycle(c.name(), lattice.clone(), v.clone()),
        };
        Ok(Self {
            lattice: lattice.clone(),
            divisors: self
                .divisors
                .iter()
                .map(|(n, c)| Ok((n.clone(), class(c)?)))
                .collect::<Result<_>>()?,
            curves: self.curves.iter().map(curve).collect::<Result<_>>()?,
            candidates: self
                .candidates
                .iter()
                .map(|c| NegativeCandidate::new(c.name.clone(), class(&c.class)?, curve(&c.detector)?))
                .collect::<Result<_>>()?,
            mori: self.mori.iter().map(curve).collect::<Result<_>>()?,
        })
    }
}

/// The threefold level: the divisor `Y` and the family `-K - uY`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreefoldFlag {
    pub ambient: String,
    pub antican: DivisorClass,
    pub divisor: DivisorClass,
    pub tau: Rational,
    /// `A_X(Y)`.
    pub log_discrepancy: Rational,
}

/// A point case on the flag curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointCase {
    pub name: String,
    /// Order of the different at the point.
    pub different: Rational,
    /// Local intersection multiplicity with `Z` of each candidate curve,
    /// keyed by candidate name (threefold or surface level).
    pub multiplicities: BTreeMap<String, Rational>,
}

/// The surface level: `Y` (or a blowup of it) with the curve `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceFlag {
    pub name: String,
    pub lattice: String,
    pub curve: DivisorClass,
    /// `A_Y(Z)`.
    pub log_discrepancy: Rational,
    /// Image of each ambient basis element.
    pub restriction: Vec<DivisorClass>,
    /// Order of `Z` in the (pulled back) restriction of each threefold
    /// candidate.
    pub pullback: BTreeMap<String, Rational>,
    pub points: Vec<PointCase>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagScenario {
    pub name: String,
    pub notes: Option<String>,
    pub lattices: Vec<LatticeData>,
    pub flag: ThreefoldFlag,
    pub surfaces: Vec<SurfaceFlag>,
    /// Expected values keyed like `s_divisor`, `L.s_curve`, `L.p.f_term`.
    pub expected: BTreeMap<String, Rational>,
}

impl FlagScenario {
    pub fn lattice(&self, name: &str) -> Result<&LatticeData> {
        self.lattices
            .iter()
            .find(|l| l.name() == name)
            .ok_or_else(|| Error::Validation(format!("unknown lattice {name}")))
    }

    pub fn ambient(&self) -> Result<&LatticeData> {
        self.lattice(&self.flag.ambient)
    }

    pub fn surface(&self, name: &str) -> Result<&SurfaceFlag> {
        self.surfaces
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownFlag(name.into()))
    }

    /// Structural checks that do not need any computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(format!("{}: {m}", self.name)));
        let ambient = self.ambient()?;
        if ambient.lattice.degree() != 3 {
            return bad(format!("ambient lattice {} must have degree 3", ambient.name()));
        }
        if !self.flag.tau.is_positive() {
            return bad(format!("tau must be positive, got {}", self.flag.tau));
        }
        if !self.flag.log_discrepancy.is_positive() {
            return bad("log discrepancy of the divisor must be positive".into());
        }
        let k = &self.flag.antican;
        let norm = crate::lattice::intersect(&[k, k, k])?;
        if !norm.is_positive() {
            return bad(format!("anticanonical volume must be positive, got {norm}"));
        }
        for (i, l) in self.lattices.iter().enumerate() {
            if self.lattices[..i].iter().any(|o| o.name() == l.name()) {
                return bad(format!("lattice {} declared twice", l.name()));
            }
        }
        let ambient_names: Vec<&str> = ambient.candidates.iter().map(|c| c.name.as_str()).collect();
        for (i, s) in self.surfaces.iter().enumerate() {
            if self.surfaces[..i].iter().any(|o| o.name == s.name) {
                return bad(format!("flag {} declared twice", s.name));
            }
            let lat = self.lattice(&s.lattice)?;
            if lat.lattice.degree() != 2 {
                return bad(format!("surface lattice {} must have degree 2", s.lattice));
            }
            if !s.log_discrepancy.is_positive() {
                return bad(format!("flag {}: log discrepancy must be positive", s.name));
            }
            if s.restriction.len() != ambient.lattice.rank() {
                return bad(format!("flag {}: restriction must map every ambient basis element", s.name));
            }
            for c in &lat.candidates {
                if ambient_names.contains(&c.name.as_str()) {
                    return bad(format!(
                        "flag {}: candidate name {} is used on both levels",
                        s.name, c.name
                    ));
                }
            }
            for name in &ambient_names {
                if !s.pullback.contains_key(*name) {
                    return bad(format!("flag {}: no pullback order for {name}", s.name));
                }
            }
            for (name, ord) in &s.pullback {
                if !ambient_names.contains(&name.as_str()) {
                    return bad(format!("flag {}: pullback order for unknown candidate {name}", s.name));
                }
                if ord.is_negative() {
                    return bad(format!("flag {}: negative pullback order for {name}", s.name));
                }
            }
            if s.points.is_empty() {
                return bad(format!("flag {}: no point cases", s.name));
            }
            for (j, p) in s.points.iter().enumerate() {
                if s.points[..j].iter().any(|o| o.name == p.name) {
                    return bad(format!("flag {}: point {} declared twice", s.name, p.name));
                }
                if p.different.is_negative() || p.different >= Rational::one() {
                    return bad(format!(
                        "flag {}: different at {} must lie in [0, 1), got {}",
                        s.name, p.name, p.different
                    ));
                }
                for (c, m) in &p.multiplicities {
                    if m.is_negative() {
                        return bad(format!("flag {}: negative multiplicity of {c} at {}", s.name, p.name));
                    }
                    let known = ambient_names.contains(&c.as_str())
                        || lat.candidates.iter().any(|x| &x.name == c);
                    if !known {
                        return bad(format!("flag {}: point {} refers to unknown curve {c}", s.name, p.name));
                    }
                }
            }
        }
        Ok(())
    }

    /// Copy with one form entry of one lattice replaced; every class is
    /// carried over by coordinates.
    pub fn with_tensor_entry(&self, lattice: &str, idx: &[usize], value: Rational) -> Result<Self> {
        let mut out = self.clone();
        let pos = out
            .lattices
            .iter()
            .position(|l| l.name() == lattice)
            .ok_or_else(|| Error::Validation(format!("unknown lattice {lattice}")))?;
        let new = Arc::new(out.lattices[pos].lattice.with_entry(idx, value));
        out.lattices[pos] = out.lattices[pos].rebased(new.clone())?;
        let move_class = |c: &DivisorClass| -> Result<DivisorClass> {
            if c.lattice().name() == lattice {
                DivisorClass::new(new.clone(), c.coords().to_vec())
            } else {
                Ok(c.clone())
            }
        };
        out.flag.antican = move_class(&out.flag.antican)?;
        out.flag.divisor = move_class(&out.flag.divisor)?;
        for s in &mut out.surfaces {
            s.curve = move_class(&s.curve)?;
            s.restriction = s.restriction.iter().map(move_class).collect::<Result<_>>()?;
        }
        Ok(out)
    }
}
