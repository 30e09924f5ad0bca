//! Acceptance suite. Prints one PASS or FAIL line per criterion and exits
//! non-zero if any criterion fails. Tolerances and limits are fixed below.

#[path = "../../core/tests/oracles/mod.rs"]
mod oracles;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use deltaflag_core::scenarios::{builtin, builtin_names, serialize};
use deltaflag_core::{analyze, Assignment, Rational};
use serde_json::Value;

const VERIFY_TIME_LIMIT: Duration = Duration::from_secs(10);
const MIN_MISMATCH_PERTURBATIONS: usize = 5;

fn deltaflag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deltaflag"))
        .args(args)
        .env_remove("DELTAFLAG_SCENARIO_DIR")
        .output()
        .expect("run deltaflag")
}

fn frac(v: &Value) -> Rational {
    v.as_str().expect("string fraction").parse().expect("fraction")
}

fn parse(s: &str) -> Rational {
    s.parse().expect("fraction")
}

/// Runs `f` once per builtin on its own thread; panics with every failure.
fn each_builtin(f: impl Fn(&str) + Sync) {
    let failures: Vec<String> = std::thread::scope(|scope| {
        let f = &f;
        let handles: Vec<_> = builtin_names()
            .into_iter()
            .map(|name| (name, scope.spawn(move || catch_unwind(AssertUnwindSafe(|| f(name))))))
            .collect();
        handles
            .into_iter()
            .filter_map(|(name, h)| match h.join().expect("thread") {
                Ok(()) => None,
                Err(e) => Some(format!("{name}: {}", panic_text(&*e))),
            })
            .collect()
    });
    assert!(failures.is_empty(), "{}", failures.join("; "));
}

fn panic_text(e: &(dyn std::any::Any + Send)) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panic".into())
}

fn exact_reproduction() -> String {
    let t = Instant::now();
    let o = deltaflag(&["verify", "--all-builtin", "--json"]);
    let elapsed = t.elapsed();
    assert_eq!(o.status.code(), Some(0), "verify --all-builtin exit code");
    assert!(elapsed < VERIFY_TIME_LIMIT, "took {elapsed:?}");
    let v: Value = serde_json::from_slice(&o.stdout).expect("json");
    let scenarios = v["scenarios"].as_array().expect("scenarios");
    let mut compared = 0;
    for (name, rows) in oracles::tables::TABLE {
        let s = scenarios
            .iter()
            .find(|s| s["scenario"] == *name)
            .unwrap_or_else(|| panic!("{name} missing from the report"));
        for (key, want) in *rows {
            let q = s["quantities"]
                .as_array()
                .unwrap()
                .iter()
                .find(|q| q["key"] == *key)
                .unwrap_or_else(|| panic!("{name}: {key} missing"));
            assert_eq!(frac(&q["computed"]), parse(want), "{name}: {key}");
            compared += 1;
        }
        for q in s["quantities"].as_array().unwrap() {
            if !q["expected"].is_null() {
                assert_eq!(q["matches"], true, "{name}: {q}");
            }
        }
    }
    assert_eq!(frac(&v["global"]["bound"]), parse(oracles::tables::GLOBAL));
    format!(
        "{compared} fractions exact, global bound {}, verify --all-builtin in {:.2} s (limit {} s)",
        oracles::tables::GLOBAL,
        elapsed.as_secs_f64(),
        VERIFY_TIME_LIMIT.as_secs()
    )
}

fn zariski_oracle() -> String {
    each_builtin(|name| {
        let seed = 0xacce_0000 + builtin_names().iter().position(|n| *n == name).unwrap() as u64;
        oracles::zariski::check_scenario(&builtin(name).unwrap(), seed);
    });
    format!(
        "{} random rational points per walk level, {} scenarios, subset enumeration agrees",
        oracles::zariski::POINTS,
        builtin_names().len()
    )
}

fn quadrature() -> String {
    each_builtin(oracles::quadrature::check);
    format!(
        "cells >= {}, relative tolerance {:e}, all S and F integrals agree",
        oracles::quadrature::CELLS,
        oracles::quadrature::TOL
    )
}

fn structure() -> String {
    each_builtin(|name| {
        oracles::structural::check_threefold(name);
        oracles::structural::check_surfaces(name);
        let s = builtin(name).unwrap();
        let a = analyze(&s).unwrap();
        let failures = deltaflag_core::checks::consistency_failures(&s, &a).unwrap();
        assert!(failures.is_empty(), "{failures:?}");
    });
    "P.C = 0 on supports, N >= 0, Gram negative definite, volume continuous, vol(tau) = 0".into()
}

/// Every single-entry +1 perturbation of every builtin tensor.
fn negative_controls() -> String {
    let dir = tempfile::tempdir().expect("temp dir");
    let counts = std::sync::Mutex::new(Vec::new());
    each_builtin(|name| {
        let s = builtin(name).unwrap();
        let (mut ones, mut total) = (0, 0);
        for data in &s.lattices {
            let l = &data.lattice;
            for idx in l.all_multisets() {
                let bumped = &l.entry(&idx) + &Rational::one();
                let bent = s.with_tensor_entry(l.name(), &idx, bumped).unwrap();
                let path = dir.path().join(format!("{name}-{}-{}.dfs", l.name(), total));
                std::fs::write(&path, serialize(&bent)).unwrap();
                let code = deltaflag(&["verify", path.to_str().unwrap()]).status.code();
                total += 1;
                match code {
                    Some(1) => ones += 1,
                    // A walk that breaks is a compute error rather than a mismatch.
                    Some(2) => {}
                    other => panic!("{} {idx:?}: exit {other:?}", l.name()),
                }
            }
        }
        assert!(
            ones >= MIN_MISMATCH_PERTURBATIONS,
            "only {ones} of {total} perturbations exit 1"
        );
        counts.lock().unwrap().push(format!("{name} {ones}/{total}"));
    });
    let mut counts = counts.into_inner().unwrap();
    counts.sort();
    format!(
        "exit 1 for >= {MIN_MISMATCH_PERTURBATIONS} per scenario, none exit 0 ({})",
        counts.join(", ")
    )
}

/// `(-K)^3` summed directly over ordered index triples.
fn cube(l: &deltaflag_core::Lattice, x: &[Rational]) -> Rational {
    let n = l.rank();
    let mut total = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                total += &(&(&(&x[i] * &x[j]) * &x[k]) * &l.entry(&[i, j, k]));
            }
        }
    }
    total
}

fn anticanonical_volume() -> String {
    let want = Rational::from(22);
    for name in builtin_names() {
        let s = builtin(name).unwrap();
        let tensor = cube(&s.ambient().unwrap().lattice, s.flag.antican.coords());
        let a = analyze(&s).unwrap();
        let at_zero = a.threefold.chambers[0].volume.eval(&Assignment::u(Rational::zero())).unwrap();
        assert_eq!(tensor, want, "{name}: tensor");
        assert_eq!(at_zero, want, "{name}: volume at u = 0");
        let o = deltaflag(&["compute", name, "--json"]);
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(frac(&v["norm"]), want, "{name}: reported norm");
    }
    "(-K)^3 = 22 from the tensor and vol(0) = 22 for every scenario".into()
}

fn main() {
    let criteria: [(&str, fn() -> String); 6] = [
        ("1 exact reproduction", exact_reproduction),
        ("2 zariski oracle", zariski_oracle),
        ("3 numeric quadrature", quadrature),
        ("4 structural invariants", structure),
        ("5 negative controls", negative_controls),
        ("6 anticanonical volume", anticanonical_volume),
    ];
    // Failures are reported on the criterion line; keep the default hook
    // from printing each panic as well.
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (label, run) in criteria {
        let t = Instant::now();
        match catch_unwind(run) {
            Ok(detail) => println!("PASS  {label}: {detail} [{:.1} s]", t.elapsed().as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("FAIL  {label}: {}", panic_text(&*e));
            }
        }
    }
    let _ = std::panic::take_hook();
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
