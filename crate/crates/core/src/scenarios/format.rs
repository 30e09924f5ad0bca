//! The line-oriented scenario format.
//!
//! ```text
//! deltaflag-scenario v1
//! name = smoothQ-onQ
//!
//! [lattice X]
//! degree = 3
//! basis = H, E
//!
//! [tensor X]
//! H H H = 1
//! H E E = -6
//! ```
//!
//! Sections are `lattice`, `tensor`, `divisors`, `curves`, `candidates` and
//! `mori` (each naming a lattice), `flag`, `surface`, `restriction`,
//! `pullback` and `incidence` (the last four naming a surface flag), and
//! `expected`. Lines starting with `#` are comments. Numbers are integers or
//! `p/q` fractions.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactmath::Rational;
use crate::lattice::{CurveClass, DivisorClass, Lattice};
use crate::scenarios::model::{FlagScenario, LatticeData, PointCase, SurfaceFlag, ThreefoldFlag};
use crate::zariski::NegativeCandidate;

pub const HEADER: &str = "deltaflag-scenario v1";

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    key: String,
    key_col: usize,
    value: String,
    value_col: usize,
}

#[derive(Debug, Clone)]
struct Section {
    line: usize,
    kind: String,
    arg: Option<String>,
    entries: Vec<Entry>,
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

impl Entry {
    fn err(&self, message: impl Into<String>) -> Error {
        perr(self.line, self.value_col, message)
    }

    fn key_err(&self, message: impl Into<String>) -> Error {
        perr(self.line, self.key_col, message)
    }

    fn rational(&self) -> Result<Rational> {
        self.value
            .parse()
            .map_err(|_| self.err(format!("expected an integer or p/q fraction, got {:?}", self.value)))
    }
}

impl Section {
    fn label(&self) -> String {
        match &self.arg {
            Some(a) => format!("[{} {a}]", self.kind),
            None => format!("[{}]", self.kind),
        }
    }

    /// Entries by key, rejecting keys outside `allowed` and duplicates.
    fn keyed(&self, allowed: &[&str], required: &[&str]) -> Result<BTreeMap<String, Entry>> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            if !allowed.contains(&e.key.as_str()) {
                return Err(e.key_err(format!("unknown key {:?} in {}", e.key, self.label())));
            }
            if out.insert(e.key.clone(), e.clone()).is_some() {
                return Err(e.key_err(format!("duplicate key {:?} in {}", e.key, self.label())));
            }
        }
        for r in required {
            if !out.contains_key(*r) {
                return Err(perr(self.line, 1, format!("{} is missing required key {r:?}", self.label())));
            }
        }
        Ok(out)
    }

    fn arg(&self) -> Result<&str> {
        self.arg
            .as_deref()
            .ok_or_else(|| perr(self.line, 1, format!("[{}] needs a name", self.kind)))
    }
}

fn split_sections(text: &str) -> Result<(Vec<Entry>, Vec<Section>)> {
    let mut lines = text.lines().enumerate();
    let first = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() || l.trim_start().starts_with('#') => continue,
            Some((i, l)) => break (i + 1, l),
            None => return Err(perr(1, 1, "empty scenario file")),
        }
    };
    if first.1.trim() != HEADER {
        return Err(perr(first.0, 1, format!("expected header {HEADER:?}")));
    }
    let mut preamble = Vec::new();
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        let indent = raw.len() - raw.trim_start().len();
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let inner = rest
                .strip_suffix(']')
                .ok_or_else(|| perr(line, indent + 1, "unterminated section header"))?;
            let mut words = inner.split_whitespace();
            let kind = words
                .next()
                .ok_or_else(|| perr(line, indent + 1, "empty section header"))?
                .to_string();
            let arg = words.next().map(str::to_string);
            if words.next().is_some() {
                return Err(perr(line, indent + 1, "section header takes at most one name"));
            }
            sections.push(Section {
                line,
                kind,
                arg,
                entries: Vec::new(),
            });
            continue;
        }
        let eq = raw
            .find('=')
            .ok_or_else(|| perr(line, indent + 1, "expected `key = value`"))?;
        let key = raw[..eq].trim().to_string();
        if key.is_empty() {
            return Err(perr(line, indent + 1, "empty key"));
        }
        let after = &raw[eq + 1..];
        let value_col = eq + 2 + (after.len() - after.trim_start().len());
        let entry = Entry {
            line,
            key,
            key_col: indent + 1,
            value: after.trim().to_string(),
            value_col,
        };
        match sections.last_mut() {
            Some(s) => s.entries.push(entry),
            None => preamble.push(entry),
        }
    }
    Ok((preamble, sections))
}

/// Parses `a, b, c`.
fn list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Parses `name: r, name: r`.
fn pairs(e: &Entry) -> Result<Vec<(String, Rational)>> {
    let mut out: Vec<(String, Rational)> = Vec::new();
    for item in list(&e.value) {
        let (k, v) = item
            .split_once(':')
            .ok_or_else(|| e.err(format!("expected `name: value`, got {item:?}")))?;
        let k = k.trim().to_string();
        let v: Rational = v
            .trim()
            .parse()
            .map_err(|_| e.err(format!("bad number in {item:?}")))?;
        if out.iter().any(|(n, _)| *n == k) {
            return Err(e.err(format!("{k} listed twice")));
        }
        out.push((k, v));
    }
    Ok(out)
}

/// Parses a linear combination such as `4 H - E` or `1/3 Eh + 4/3 Sh`.
fn combo(e: &Entry, data: &LatticeData) -> Result<DivisorClass> {
    let spaced = e.value.replace('+', " + ").replace('-', " - ");
    // `2H` is read as `2 H`.
    let mut toks: Vec<&str> = Vec::new();
    for t in spaced.split_whitespace() {
        let split = t.find(|c: char| !(c.is_ascii_digit() || c == '/')).unwrap_or(t.len());
        if split > 0 && split < t.len() {
            toks.extend([&t[..split], &t[split..]]);
        } else {
            toks.push(t);
        }
    }
    let is_sign = |t: &str| t == "+" || t == "-";
    let mut total = DivisorClass::zero(data.lattice.clone());
    if toks == ["0"] {
        return Ok(total);
    }
    let mut i = 0;
    while i < toks.len() {
        let mut sign = Rational::one();
        if is_sign(toks[i]) {
            if toks[i] == "-" {
                sign = Rational::from(-1);
            }
            i += 1;
        } else if i > 0 {
            return Err(e.err(format!("expected + or - before {:?}", toks[i])));
        }
        let mut coeff = Rational::one();
        if let Some(c) = toks.get(i).and_then(|t| t.parse::<Rational>().ok()) {
            coeff = c;
            i += 1;
        }
        let name = match toks.get(i) {
            Some(t) if !is_sign(t) && t.parse::<Rational>().is_err() => *t,
            Some(t) => return Err(e.err(format!("expected a class name, got {t:?}"))),
            None => return Err(e.err("expression ends without a class")),
        };
        i += 1;
        let class = data
            .class(name)
            .ok_or_else(|| e.err(format!("unknown class {name:?} on lattice {}", data.name())))?;
        total = total.add(&class.scale(&(sign * coeff)))?;
    }
    if toks.is_empty() {
        return Err(e.err("empty expression"));
    }
    Ok(total)
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !name.chars().next().is_some_and(|c| c.is_ascii_digit())
}

fn check_name(e: &Entry, name: &str) -> Result<()> {
    if valid_name(name) {
        Ok(())
    } else {
        Err(e.key_err(format!("invalid name {name:?}")))
    }
}

/// Parses scenario text and runs the structural checks.
pub fn parse_scenario(text: &str) -> Result<FlagScenario> {
    let (preamble, sections) = split_sections(text)?;
    let pre = Section {
        line: 1,
        kind: "preamble".into(),
        arg: None,
        entries: preamble,
    };
    let pre = pre.keyed(&["name", "notes"], &["name"])?;
    let name = pre["name"].value.clone();
    let notes = pre.get("notes").map(|e| e.value.clone());

    const KINDS: [&str; 12] = [
        "lattice",
        "tensor",
        "divisors",
        "curves",
        "candidates",
        "mori",
        "flag",
        "surface",
        "restriction",
        "pullback",
        "incidence",
        "expected",
    ];
    let mut seen = BTreeMap::new();
    for s in &sections {
        if !KINDS.contains(&s.kind.as_str()) {
            return Err(perr(s.line, 1, format!("unknown section {}", s.label())));
        }
        let needs_arg = !matches!(s.kind.as_str(), "flag" | "expected");
        if needs_arg != s.arg.is_some() {
            return Err(perr(
                s.line,
                1,
                if needs_arg {
                    format!("[{}] needs a name", s.kind)
                } else {
                    format!("[{}] takes no name", s.kind)
                },
            ));
        }
        if let Some(prev) = seen.insert(s.label(), s.line) {
            return Err(perr(s.line, 1, format!("{} repeats the section on line {prev}", s.label())));
        }
    }
    let of_kind = |k: &'static str| sections.iter().filter(move |s| s.kind == k);
    let find = |k: &str, arg: &str| sections.iter().find(|s| s.kind == k && s.arg.as_deref() == Some(arg));

    // Lattices and their tensors.
    let mut lattices: Vec<LatticeData> = Vec::new();
    for s in of_kind("lattice") {
        let lname = s.arg()?.to_string();
        let keys = s.keyed(&["degree", "basis"], &["degree", "basis"])?;
        let degree = keys["degree"]
            .value
            .parse::<usize>()
            .map_err(|_| keys["degree"].err("degree must be 2 or 3"))?;
        let basis = list(&keys["basis"].value);
        for b in &basis {
            if !valid_name(b) {
                return Err(keys["basis"].err(format!("invalid basis name {b:?}")));
            }
        }
        let mut entries = Vec::new();
        if let Some(t) = find("tensor", &lname) {
            for e in &t.entries {
                let idx = e
                    .key
                    .split_whitespace()
                    .map(|b| {
                        basis
                            .iter()
                            .position(|x| x == b)
                            .ok_or_else(|| e.key_err(format!("{b:?} is not in the basis of {lname}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if idx.len() != degree {
                    return Err(e.key_err(format!(
                        "tensor entries of {lname} take {degree} basis names, got {}",
                        idx.len()
                    )));
                }
                let mut sorted = idx.clone();
                sorted.sort_unstable();
                if entries.iter().any(|(k, _, _): &(Vec<usize>, Rational, usize)| *k == sorted) {
                    let value = e.rational()?;
                    let prev = &entries.iter().find(|(k, _, _)| *k == sorted).expect("present").1;
                    if *prev != value {
                        return Err(Error::Validation(format!(
                            "{name}: tensor of {lname} is not symmetric at {} (line {})",
                            e.key, e.line
                        )));
                    }
                    return Err(e.key_err(format!("entry {} repeats an earlier permutation", e.key)));
                }
                entries.push((sorted, e.rational()?, e.line));
            }
        }
        let lattice = Lattice::new(
            lname.clone(),
            basis,
            degree,
            entries.into_iter().map(|(k, v, _)| (k, v)),
        )
        .map_err(|err| match err {
            Error::Validation(m) => Error::Validation(format!("{name}: {m}")),
            other => other,
        })?;
        lattices.push(LatticeData::new(Arc::new(lattice)));
    }
    for k in ["tensor", "divisors", "curves", "candidates", "mori"] {
        for s in of_kind(k) {
            let arg = s.arg()?;
            if !lattices.iter().any(|l| l.name() == arg) {
                return Err(perr(s.line, 1, format!("{} refers to undeclared lattice {arg}", s.label())));
            }
        }
    }

    for data in &mut lattices {
        let lname = data.name().to_string();
        if let Some(s) = find("divisors", &lname) {
            for e in &s.entries {
                check_name(e, &e.key)?;
                if data.class(&e.key).is_some() {
                    return Err(e.key_err(format!("class {} already defined on {lname}", e.key)));
                }
                let c = combo(e, data)?;
                data.divisors.push((e.key.clone(), c));
            }
        }
        if let Some(s) = find("curves", &lname) {
            if data.lattice.degree() != 3 {
                return Err(perr(s.line, 1, format!("curves on surface lattice {lname} are declared as divisors")));
            }
            for e in &s.entries {
                check_name(e, &e.key)?;
                if data.curves.iter().any(|c| c.name() == e.key) {
                    return Err(e.key_err(format!("curve {} already defined", e.key)));
                }
                let mut v = vec![Rational::zero(); data.lattice.rank()];
                for (b, r) in pairs(e)? {
                    let i = data
                        .lattice
                        .index_of(&b)
                        .ok_or_else(|| e.err(format!("{b:?} is not in the basis of {lname}")))?;
                    v[i] = r;
                }
                data.curves.push(CurveClass::cycle(e.key.clone(), data.lattice.clone(), v)?);
            }
        }
        if let Some(s) = find("candidates", &lname) {
            for e in &s.entries {
                let class = data
                    .class(&e.key)
                    .ok_or_else(|| e.key_err(format!("unknown class {:?} on {lname}", e.key)))?;
                let detector = data
                    .curve(&e.value)
                    .ok_or_else(|| e.err(format!("unknown curve {:?} on {lname}", e.value)))?;
                if data.lattice.degree() == 2 && detector.pairing_vector() != class.row() {
                    return Err(e.err(format!("on a surface the candidate {} must detect itself", e.key)));
                }
                if data.candidates.iter().any(|c| c.name == e.key) {
                    return Err(e.key_err(format!("candidate {} listed twice", e.key)));
                }
                data.candidates.push(NegativeCandidate::new(e.key.clone(), class, detector)?);
            }
        }
        if let Some(s) = find("mori", &lname) {
            let keys = s.keyed(&["classes"], &["classes"])?;
            let e = &keys["classes"];
            for n in list(&e.value) {
                let c = data
                    .curve(&n)
                    .ok_or_else(|| e.err(format!("unknown curve {n:?} on {lname}")))?;
                data.mori.push(c);
            }
        }
    }

    let lookup = |n: &str| lattices.iter().find(|l| l.name() == n);

    // Threefold level.
    let flag_section = of_kind("flag")
        .next()
        .ok_or_else(|| perr(1, 1, "missing [flag] section"))?;
    let keys = flag_section.keyed(
        &["ambient", "antican", "divisor", "tau", "log_discrepancy"],
        &["ambient", "antican", "divisor", "tau", "log_discrepancy"],
    )?;
    let ambient_name = keys["ambient"].value.clone();
    let ambient = lookup(&ambient_name)
        .ok_or_else(|| keys["ambient"].err(format!("undeclared lattice {ambient_name}")))?;
    let flag = ThreefoldFlag {
        ambient: ambient_name.clone(),
        antican: combo(&keys["antican"], ambient)?,
        divisor: combo(&keys["divisor"], ambient)?,
        tau: keys["tau"].rational()?,
        log_discrepancy: keys["log_discrepancy"].rational()?,
    };

    // Surface level.
    let mut surfaces = Vec::new();
    for s in of_kind("surface") {
        let fname = s.arg()?.to_string();
        if !valid_name(&fname) {
            return Err(perr(s.line, 1, format!("invalid flag name {fname:?}")));
        }
        let keys = s.keyed(
            &["lattice", "curve", "log_discrepancy"],
            &["lattice", "curve", "log_discrepancy"],
        )?;
        let lname = &keys["lattice"].value;
        let data = lookup(lname).ok_or_else(|| keys["lattice"].err(format!("undeclared lattice {lname}")))?;
        let curve = combo(&keys["curve"], data)?;
        let log_discrepancy = keys["log_discrepancy"].rational()?;

        let mut restriction: Vec<Option<DivisorClass>> = vec![None; ambient.lattice.rank()];
        let r = find("restriction", &fname)
            .ok_or_else(|| perr(s.line, 1, format!("flag {fname} has no [restriction {fname}] section")))?;
        for e in &r.entries {
            let i = ambient
                .lattice
                .index_of(&e.key)
                .ok_or_else(|| e.key_err(format!("{:?} is not in the basis of {ambient_name}", e.key)))?;
            if restriction[i].is_some() {
                return Err(e.key_err(format!("restriction of {} given twice", e.key)));
            }
            restriction[i] = Some(combo(e, data)?);
        }
        let restriction = restriction
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| {
                    perr(r.line, 1, format!("restriction {fname} misses {}", ambient.lattice.basis()[i]))
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut pullback = BTreeMap::new();
        if let Some(p) = find("pullback", &fname) {
            for e in &p.entries {
                if pullback.insert(e.key.clone(), e.rational()?).is_some() {
                    return Err(e.key_err(format!("pullback order of {} given twice", e.key)));
                }
            }
        }

        let mut points = Vec::new();
        let inc = find("incidence", &fname)
            .ok_or_else(|| perr(s.line, 1, format!("flag {fname} has no [incidence {fname}] section")))?;
        for e in &inc.entries {
            check_name(e, &e.key)?;
            let mut different = Rational::zero();
            let mut multiplicities = BTreeMap::new();
            for (k, v) in pairs(e)? {
                if k == "different" {
                    different = v;
                } else {
                    multiplicities.insert(k, v);
                }
            }
            points.push(PointCase {
                name: e.key.clone(),
                different,
                multiplicities,
            });
        }

        surfaces.push(SurfaceFlag {
            name: fname,
            lattice: lname.clone(),
            curve,
            log_discrepancy,
            restriction,
            pullback,
            points,
        });
    }
    for k in ["restriction", "pullback", "incidence"] {
        for s in of_kind(k) {
            let arg = s.arg()?;
            if !surfaces.iter().any(|f: &SurfaceFlag| f.name == arg) {
                return Err(perr(s.line, 1, format!("{} refers to undeclared flag {arg}", s.label())));
            }
        }
    }

    let mut expected = BTreeMap::new();
    if let Some(s) = of_kind("expected").next() {
        for e in &s.entries {
            if expected.insert(e.key.clone(), e.rational()?).is_some() {
                return Err(e.key_err(format!("expected value {} given twice", e.key)));
            }
        }
    }

    let scenario = FlagScenario {
        name,
        notes,
        lattices,
        flag,
        surfaces,
        expected,
    };
    check_expected_keys(&scenario, &sections)?;
    scenario.validate()?;
    Ok(scenario)
}

fn check_expected_keys(s: &FlagScenario, sections: &[Section]) -> Result<()> {
    let Some(sec) = sections.iter().find(|x| x.kind == "expected") else {
        return Ok(());
    };
    for e in &sec.entries {
        let parts: Vec<&str> = e.key.split('.').collect();
        let ok = match parts.as_slice() {
            ["s_divisor" | "divisor_term" | "delta"] => true,
            [flag, "s_curve" | "curve_term"] => s.surfaces.iter().any(|f| f.name == *flag),
            [flag, point, "s_point" | "f_term" | "point_term"] => s
                .surfaces
                .iter()
                .any(|f| f.name == *flag && f.points.iter().any(|p| p.name == *point)),
            _ => false,
        };
        if !ok {
            return Err(e.key_err(format!("unknown expected quantity {:?}", e.key)));
        }
    }
    Ok(())
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<FlagScenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenario(&text)
}

fn class_text(c: &DivisorClass) -> String {
    c.format()
}

/// Canonical text for a scenario. Parsing the output gives back an equal
/// scenario.
pub fn serialize(s: &FlagScenario) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "{HEADER}");
    let _ = writeln!(w, "name = {}", s.name);
    if let Some(n) = &s.notes {
        let _ = writeln!(w, "notes = {n}");
    }
    for data in &s.lattices {
        let l = &data.lattice;
        let _ = writeln!(w, "\n[lattice {}]", l.name());
        let _ = writeln!(w, "degree = {}", l.degree());
        let _ = writeln!(w, "basis = {}", l.basis().join(", "));
        if !l.entries().is_empty() {
            let _ = writeln!(w, "\n[tensor {}]", l.name());
            for (idx, v) in l.entries() {
                let names: Vec<&str> = idx.iter().map(|&i| l.basis()[i].as_str()).collect();
                let _ = writeln!(w, "{} = {v}", names.join(" "));
            }
        }
        if !data.divisors.is_empty() {
            let _ = writeln!(w, "\n[divisors {}]", l.name());
            for (n, c) in &data.divisors {
                let _ = writeln!(w, "{n} = {}", class_text(c));
            }
        }
        if !data.curves.is_empty() {
            let _ = writeln!(w, "\n[curves {}]", l.name());
            for c in &data.curves {
                let v = c.pairing_vector();
                let items: Vec<String> = l.basis().iter().zip(&v).map(|(b, r)| format!("{b}: {r}")).collect();
                let _ = writeln!(w, "{} = {}", c.name(), items.join(", "));
            }
        }
        if !data.candidates.is_empty() {
            let _ = writeln!(w, "\n[candidates {}]", l.name());
            for c in &data.candidates {
                let _ = writeln!(w, "{} = {}", c.name, c.detector.name());
            }
        }
        if !data.mori.is_empty() {
            let _ = writeln!(w, "\n[mori {}]", l.name());
            let names: Vec<&str> = data.mori.iter().map(CurveClass::name).collect();
            let _ = writeln!(w, "classes = {}", names.join(", "));
        }
    }
    let f = &s.flag;
    let _ = writeln!(w, "\n[flag]");
    let _ = writeln!(w, "ambient = {}", f.ambient);
    let _ = writeln!(w, "antican = {}", class_text(&f.antican));
    let _ = writeln!(w, "divisor = {}", class_text(&f.divisor));
    let _ = writeln!(w, "tau = {}", f.tau);
    let _ = writeln!(w, "log_discrepancy = {}", f.log_discrepancy);
    let ambient_basis: Vec<String> = s
        .ambient()
        .map(|a| a.lattice.basis().to_vec())
        .unwrap_or_default();
    for sf in &s.surfaces {
        let _ = writeln!(w, "\n[surface {}]", sf.name);
        let _ = writeln!(w, "lattice = {}", sf.lattice);
        let _ = writeln!(w, "curve = {}", class_text(&sf.curve));
        let _ = writeln!(w, "log_discrepancy = {}", sf.log_discrepancy);
        let _ = writeln!(w, "\n[restriction {}]", sf.name);
        for (b, c) in ambient_basis.iter().zip(&sf.restriction) {
            let _ = writeln!(w, "{b} = {}", class_text(c));
        }
        if !sf.pullback.is_empty() {
            let _ = writeln!(w, "\n[pullback {}]", sf.name);
            for (n, r) in &sf.pullback {
                let _ = writeln!(w, "{n} = {r}");
            }
        }
        let _ = writeln!(w, "\n[incidence {}]", sf.name);
        for p in &sf.points {
            let mut items = vec![format!("different: {}", p.different)];
            items.extend(p.multiplicities.iter().map(|(k, v)| format!("{k}: {v}")));
            let _ = writeln!(w, "{} = {}", p.name, items.join(", "));
        }
    }
    if !s.expected.is_empty() {
        let _ = writeln!(w, "\n[expected]");
        for (k, v) in &s.expected {
            let _ = writeln!(w, "{k} = {v}");
        }
    }
    out
}
