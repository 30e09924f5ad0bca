//! Lattices with a rational symmetric intersection form, divisor classes and
//! parametric divisor families.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactmath::{Assignment, Poly, Rational};

/// A free lattice with a symmetric multilinear form of degree 2 (surfaces) or
/// 3 (threefolds). Entries are stored once per multiset of basis indices.
#[derive(Clone, PartialEq, Eq)]
pub struct Lattice {
    name: String,
    basis: Vec<String>,
    degree: usize,
    entries: BTreeMap<Vec<usize>, Rational>,
}

impl Lattice {
    /// Builds a lattice from form entries. Index tuples may be given in any
    /// order; giving the same multiset twice with different values is an
    /// asymmetric form and is rejected. Missing entries are zero.
    pub fn new(
        name: impl Into<String>,
        basis: Vec<String>,
        degree: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, Rational)>,
    ) -> Result<Self> {
        let name = name.into();
        if degree != 2 && degree != 3 {
            return Err(Error::Validation(format!(
                "lattice {name}: degree must be 2 or 3, got {degree}"
            )));
        }
        if basis.is_empty() {
            return Err(Error::Validation(format!("lattice {name}: empty basis")));
        }
        for (i, b) in basis.iter().enumerate() {
            if basis[..i].contains(b) {
                return Err(Error::Validation(format!(
                    "lattice {name}: duplicate basis element {b}"
                )));
            }
        }
        let mut map: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (mut idx, value) in entries {
            if idx.len() != degree {
                return Err(Error::Arity {
                    expected: degree,
                    got: idx.len(),
                });
            }
            if let Some(bad) = idx.iter().find(|&&i| i >= basis.len()) {
                return Err(Error::Validation(format!(
                    "lattice {name}: basis index {bad} out of range"
                )));
            }
            idx.sort_unstable();
            match map.get(&idx) {
                Some(prev) if *prev != value => {
                    let names: Vec<&str> = idx.iter().map(|&i| basis[i].as_str()).collect();
                    return Err(Error::Validation(format!(
                        "lattice {name}: form is not symmetric at ({}): {prev} vs {value}",
                        names.join(", ")
                    )));
                }
                _ => {
                    map.insert(idx, value);
                }
            }
        }
        map.retain(|_, v| !v.is_zero());
        Ok(Self {
            name,
            basis,
            degree,
            entries: map,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn index_of(&self, basis_name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == basis_name)
    }

    /// Form value on basis elements, in any order.
    pub fn entry(&self, idx: &[usize]) -> Rational {
        let mut key = idx.to_vec();
        key.sort_unstable();
        self.entries.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    /// Non-zero entries keyed by sorted index multisets.
    pub fn entries(&self) -> &BTreeMap<Vec<usize>, Rational> {
        &self.entries
    }

    /// Every sorted index multiset, zero or not.
    pub fn all_multisets(&self) -> Vec<Vec<usize>> {
        fn go(start: usize, rank: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for i in start..rank {
                cur.push(i);
                go(i, rank, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(0, self.rank(), self.degree, &mut Vec::new(), &mut out);
        out
    }

    /// Copy with one entry replaced.
    pub fn with_entry(&self, idx: &[usize], value: Rational) -> Lattice {
        let mut key = idx.to_vec();
        key.sort_unstable();
        let mut out = self.clone();
        if value.is_zero() {
            out.entries.remove(&key);
        } else {
            out.entries.insert(key, value);
        }
        out
    }

    /// Sum over all index tuples of `coeff(i_1) * ... * coeff(i_d) * form(i)`,
    /// generic over the coefficient ring.
    fn evaluate<T, F>(&self, args: &[&[T]], zero: T, mut mul: F) -> T
    where
        T: Clone + std::ops::Add<Output = T>,
        F: FnMut(&T, &T) -> T,
        for<'a> &'a Rational: Into<T>,
    {
        let mut total = zero;
        let mut idx = vec![0usize; self.degree];
        let rank = self.rank();
        loop {
            let e = self.entry(&idx);
            if !e.is_zero() {
                let mut term: T = (&e).into();
                for (slot, &i) in idx.iter().enumerate() {
                    term = mul(&term, &args[slot][i]);
                }
                total = total + term;
            }
            let mut k = 0;
            loop {
                if k == self.degree {
                    return total;
                }
                idx[k] += 1;
                if idx[k] < rank {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice({}, {:?}, degree {})", self.name, self.basis, self.degree)
    }
}

fn same_lattice(a: &Arc<Lattice>, b: &Arc<Lattice>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::LatticeMismatch(a.name.clone(), b.name.clone()))
    }
}

/// A divisor class with rational coordinates in the lattice basis.
#[derive(Clone, PartialEq, Eq)]
pub struct DivisorClass {
    lattice: Arc<Lattice>,
    coords: Vec<Rational>,
}

impl DivisorClass {
    pub fn new(lattice: Arc<Lattice>, coords: Vec<Rational>) -> Result<Self> {
        if coords.len() != lattice.rank() {
            return Err(Error::Validation(format!(
                "class on {} needs {} coordinates, got {}",
                lattice.name,
                lattice.rank(),
                coords.len()
            )));
        }
        Ok(Self { lattice, coords })
    }

    pub fn zero(lattice: Arc<Lattice>) -> Self {
        let coords = vec![Rational::zero(); lattice.rank()];
        Self { lattice, coords }
    }

    pub fn basis_element(lattice: Arc<Lattice>, i: usize) -> Self {
        let mut c = Self::zero(lattice);
        c.coords[i] = Rational::one();
        c
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Rational::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            lattice: self.lattice.clone(),
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &DivisorClass) -> Result<Self> {
        same_lattice(&self.lattice, &other.lattice)?;
        Ok(Self {
            lattice: self.lattice.clone(),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &DivisorClass) -> Result<Self> {
        self.add(&other.scale(&Rational::from(-1)))
    }

    /// Constant family.
    pub fn to_param(&self) -> ParamDivisor {
        ParamDivisor {
            lattice: self.lattice.clone(),
            coords: self.coords.iter().cloned().map(Poly::constant).collect(),
        }
    }

    /// Pairing vector of this class against the basis, viewed as a curve on
    /// a surface.
    pub fn row(&self) -> Vec<Rational> {
        let l = &self.lattice;
        (0..l.rank())
            .map(|i| {
                (0..l.rank())
                    .map(|j| &self.coords[j] * &l.entry(&[i, j]))
                    .sum()
            })
            .collect()
    }

    /// Linear combination written with basis names, e.g. `4 H - E`.
    pub fn format(&self) -> String {
        format_combo(
            self.lattice
                .basis
                .iter()
                .zip(&self.coords)
                .map(|(n, c)| (n.as_str(), c.clone())),
        )
    }
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.format(), self.lattice.name)
    }
}

/// `c1 n1 + c2 n2 - ...`, omitting zero and unit coefficients.
pub fn format_combo<'a>(terms: impl IntoIterator<Item = (&'a str, Rational)>) -> String {
    let mut out = String::new();
    for (name, c) in terms {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        if !mag.is_one() {
            out.push_str(&format!("{mag} "));
        }
        out.push_str(name);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// A family of divisor classes whose coordinates are polynomials in the
/// parameters.
#[derive(Clone, PartialEq, Eq)]
pub struct ParamDivisor {
    lattice: Arc<Lattice>,
    coords: Vec<Poly>,
}

impl ParamDivisor {
    pub fn new(lattice: Arc<Lattice>, coords: Vec<Poly>) -> Result<Self> {
        if coords.len() != lattice.rank() {
            return Err(Error::Validation(format!(
                "family on {} needs {} coordinates, got {}",
                lattice.name,
                lattice.rank(),
                coords.len()
            )));
        }
        Ok(Self { lattice, coords })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn coords(&self) -> &[Poly] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Poly::is_zero)
    }

    pub fn add(&self, other: &ParamDivisor) -> Result<Self> {
        same_lattice(&self.lattice, &other.lattice)?;
        Ok(Self {
            lattice: self.lattice.clone(),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    /// `self - coeff * class`.
    pub fn sub_multiple(&self, coeff: &Poly, class: &DivisorClass) -> Result<Self> {
        same_lattice(&self.lattice, &class.lattice)?;
        Ok(Self {
            lattice: self.lattice.clone(),
            coords: self
                .coords
                .iter()
                .zip(&class.coords)
                .map(|(p, c)| p - &coeff.scale(c))
                .collect(),
        })
    }

    pub fn eval(&self, at: &Assignment) -> Result<DivisorClass> {
        let coords = self.coords.iter().map(|p| p.eval(at)).collect::<Result<_>>()?;
        DivisorClass::new(self.lattice.clone(), coords)
    }

    pub fn substitute(&self, var: crate::exactmath::Var, by: &Poly) -> Result<Self> {
        Ok(Self {
            lattice: self.lattice.clone(),
            coords: self.coords.iter().map(|p| p.substitute(var, by)).collect::<Result<_>>()?,
        })
    }

    /// Applies a linear map given by the images of the basis elements.
    pub fn map_linear(&self, images: &[DivisorClass], target: &Arc<Lattice>) -> Result<Self> {
        if images.len() != self.lattice.rank() {
            return Err(Error::Validation(format!(
                "linear map out of {} needs {} images, got {}",
                self.lattice.name,
                self.lattice.rank(),
                images.len()
            )));
        }
        let mut coords = vec![Poly::zero(); target.rank()];
        for (p, img) in self.coords.iter().zip(images) {
            same_lattice(target, &img.lattice)?;
            for (slot, c) in coords.iter_mut().zip(&img.coords) {
                *slot = &*slot + &p.scale(c);
            }
        }
        ParamDivisor::new(target.clone(), coords)
    }

    pub fn format(&self) -> String {
        let mut parts = Vec::new();
        for (name, p) in self.lattice.basis.iter().zip(&self.coords) {
            if p.is_zero() {
                continue;
            }
            parts.push(match p.as_constant() {
                Some(c) if c.is_one() => name.clone(),
                Some(c) => format!("{c} {name}"),
                None => format!("({p}) {name}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Debug for ParamDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

/// A curve: either a divisor on a surface lattice or a 1-cycle on a
/// threefold given by its pairings with the basis divisors.
#[derive(Clone, PartialEq, Eq)]
pub struct CurveClass {
    name: String,
    lattice: Arc<Lattice>,
    kind: CurveKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveKind {
    Surface(DivisorClass),
    Cycle(Vec<Rational>),
}

impl CurveClass {
    pub fn on_surface(name: impl Into<String>, class: DivisorClass) -> Result<Self> {
        if class.lattice.degree != 2 {
            return Err(Error::Validation(format!(
                "curve classes on {} must be given by intersection vectors",
                class.lattice.name
            )));
        }
        Ok(Self {
            name: name.into(),
            lattice: class.lattice.clone(),
            kind: CurveKind::Surface(class),
        })
    }

    pub fn cycle(name: impl Into<String>, lattice: Arc<Lattice>, pairings: Vec<Rational>) -> Result<Self> {
        let name = name.into();
        if pairings.len() != lattice.rank() {
            return Err(Error::Validation(format!(
                "curve {name} needs {} intersection numbers, got {}",
                lattice.rank(),
                pairings.len()
            )));
        }
        Ok(Self {
            name,
            lattice,
            kind: CurveKind::Cycle(pairings),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    /// Intersection numbers with the basis divisors.
    pub fn pairing_vector(&self) -> Vec<Rational> {
        match &self.kind {
            CurveKind::Surface(c) => c.row(),
            CurveKind::Cycle(v) => v.clone(),
        }
    }

    /// Self-intersection for curves on surfaces.
    pub fn self_intersection(&self) -> Option<Rational> {
        match &self.kind {
            CurveKind::Surface(c) => Some(intersect(&[c, c]).expect("same lattice")),
            CurveKind::Cycle(_) => None,
        }
    }
}

impl fmt::Debug for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}", self.name, self.kind)
    }
}

fn check_all(lattice: &Arc<Lattice>, got: usize, others: impl Iterator<Item = Arc<Lattice>>) -> Result<()> {
    if got != lattice.degree {
        return Err(Error::Arity {
            expected: lattice.degree,
            got,
        });
    }
    for l in others {
        same_lattice(lattice, &l)?;
    }
    Ok(())
}

/// Value of the form on `degree` classes.
pub fn intersect(classes: &[&DivisorClass]) -> Result<Rational> {
    let first = classes.first().ok_or(Error::Arity { expected: 2, got: 0 })?;
    let lattice = first.lattice.clone();
    check_all(&lattice, classes.len(), classes.iter().map(|c| c.lattice.clone()))?;
    let args: Vec<&[Rational]> = classes.iter().map(|c| c.coords.as_slice()).collect();
    Ok(lattice.evaluate(&args, Rational::zero(), |a, b| a * b))
}

/// Pairing of a divisor with a curve.
pub fn intersect_curve(d: &DivisorClass, c: &CurveClass) -> Result<Rational> {
    same_lattice(&d.lattice, &c.lattice)?;
    Ok(d.coords.iter().zip(c.pairing_vector()).map(|(a, b)| a * &b).sum())
}

/// Value of the form on `degree` parametric families, as a polynomial.
pub fn param_intersect(classes: &[&ParamDivisor]) -> Result<Poly> {
    let first = classes.first().ok_or(Error::Arity { expected: 2, got: 0 })?;
    let lattice = first.lattice.clone();
    check_all(&lattice, classes.len(), classes.iter().map(|c| c.lattice.clone()))?;
    let args: Vec<&[Poly]> = classes.iter().map(|c| c.coords.as_slice()).collect();
    let mut err = None;
    let out = lattice.evaluate(&args, Poly::zero(), |a, b| {
        a.checked_mul(b).unwrap_or_else(|e| {
            err = Some(e);
            Poly::zero()
        })
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Pairing of a parametric family with a fixed curve.
pub fn param_intersect_curve(d: &ParamDivisor, c: &CurveClass) -> Result<Poly> {
    same_lattice(&d.lattice, &c.lattice)?;
    let mut out = Poly::zero();
    for (p, k) in d.coords.iter().zip(c.pairing_vector()) {
        out = &out + &p.scale(&k);
    }
    Ok(out)
}
