//! `deltaflag`: verify and inspect flag scenarios.

mod report;
mod sources;

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use deltaflag_core::{verify_scenario, ChamberedDecomposition, FlagScenario, Rational, Verification};

use report::{frac, GlobalJson, ScenarioJson, VerifyJson};
use sources::{Loaded, Origin};

const EXIT_OK: u8 = 0;
const EXIT_MISMATCH: u8 = 1;
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "deltaflag", version, about = "Exact lower bounds for local stability thresholds along flags")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check scenarios against their expected values.
    ///
    /// Arguments are scenario files, directories of `.dfs` files, or
    /// scenario names. With no arguments every builtin and every file in
    /// DELTAFLAG_SCENARIO_DIR is checked.
    Verify {
        paths: Vec<String>,
        /// Check every builtin scenario (in addition to any paths).
        #[arg(long)]
        all_builtin: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print the full analysis of one scenario.
    Compute {
        path: String,
        #[arg(long)]
        json: bool,
        /// Include per-chamber integral contributions.
        #[arg(long)]
        verbose: bool,
    },
    /// List the scenarios that can be named on the command line.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify { paths, all_builtin, json } => verify(&paths, all_builtin, json),
        Command::Compute { path, json, verbose } => compute(&path, json, verbose),
        Command::List => list(),
    };
    ExitCode::from(code)
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

struct Outcome {
    loaded: Loaded,
    result: Result<Verification, String>,
    elapsed_ms: f64,
}

impl Outcome {
    fn status(&self) -> &'static str {
        match &self.result {
            Err(_) => "error",
            Ok(v) if v.passed() => "ok",
            Ok(_) => "mismatch",
        }
    }
}

fn run(loaded: Loaded) -> Outcome {
    let t = Instant::now();
    let result = match &loaded.scenario {
        Ok(s) => verify_scenario(s).map_err(|e| format!("{}: {e}", s.name)),
        Err(e) => Err(format!("{}: {e}", loaded.label)),
    };
    Outcome {
        loaded,
        result,
        elapsed_ms: ms(t),
    }
}

fn verify(paths: &[String], all_builtin: bool, json: bool) -> u8 {
    let start = Instant::now();
    let mut inputs: Vec<Loaded> = Vec::new();
    if all_builtin {
        inputs.extend(sources::all_builtin());
    }
    if paths.is_empty() && !all_builtin {
        inputs.extend(sources::all_builtin());
        inputs.extend(sources::all_extra());
    }
    for p in paths {
        inputs.extend(sources::resolve(p));
    }
    inputs.sort_by(|a, b| a.name().cmp(b.name()));

    let outcomes: Vec<Outcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = inputs.into_iter().map(|l| scope.spawn(move || run(l))).collect();
        handles.into_iter().map(|h| h.join().expect("verify thread")).collect()
    });

    let global = outcomes
        .iter()
        .filter_map(|o| o.result.as_ref().ok().map(|v| (o, v)))
        .min_by(|a, b| a.1.analysis.report.bound.cmp(&b.1.analysis.report.bound));
    let code = if outcomes.iter().any(|o| o.result.is_err()) {
        EXIT_ERROR
    } else if outcomes.iter().any(|o| o.status() == "mismatch") {
        EXIT_MISMATCH
    } else {
        EXIT_OK
    };

    if json {
        let report = VerifyJson {
            schema: report::SCHEMA.into(),
            engine_version: report::ENGINE_VERSION.into(),
            scenarios: outcomes.iter().map(scenario_json).collect(),
            global: global.map(|(o, v)| GlobalJson {
                bound: frac(&v.analysis.report.bound),
                scenario: o.loaded.name().to_string(),
                argmin: v.analysis.report.argmin.clone(),
            }),
            elapsed_ms: ms(start),
        };
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable report"));
        return code;
    }

    let width = outcomes.iter().map(|o| o.loaded.name().len()).max().unwrap_or(8).max(8);
    println!("{:width$}  {:8}  {:>10}  {:>10}  argmin", "scenario", "status", "delta >=", "A/S");
    for o in &outcomes {
        let name = o.loaded.name();
        match &o.result {
            Ok(v) => {
                let r = &v.analysis.report;
                let sharp = if r.sharp { " (sharp)" } else { "" };
                println!(
                    "{name:width$}  {:8}  {:>10}  {:>10}  {}{sharp}",
                    o.status(),
                    frac(&r.bound),
                    frac(&r.upper_bound),
                    r.argmin
                );
                for m in &v.mismatches {
                    println!("    mismatch {}", report::mismatch_line(m));
                }
                for f in &v.failures {
                    println!("    check failed ({}): {}", f.check, f.detail);
                }
            }
            Err(e) => {
                println!("{name:width$}  {:8}", "error");
                eprintln!("error: {e}");
            }
        }
    }
    match global {
        Some((o, v)) => println!(
            "global bound: delta >= {} ({} at {})",
            v.analysis.report.bound,
            o.loaded.name(),
            v.analysis.report.argmin
        ),
        None => println!("global bound: none"),
    }
    let failed = outcomes.iter().filter(|o| o.status() != "ok").count();
    println!("{} scenario(s), {} failed, {:.0} ms", outcomes.len(), failed, ms(start));
    code
}

fn scenario_json(o: &Outcome) -> ScenarioJson {
    let (delta, quantities, failures, error) = match (&o.result, &o.loaded.scenario) {
        (Ok(v), Ok(s)) => (
            Some((&v.analysis.report).into()),
            report::quantities(v, &s.expected),
            v.failures.iter().map(Into::into).collect(),
            None,
        ),
        (Err(e), _) => (None, Vec::new(), Vec::new(), Some(e.clone())),
        (Ok(_), Err(_)) => unreachable!("verified scenarios have loaded"),
    };
    ScenarioJson {
        scenario: o.loaded.name().to_string(),
        source: o.loaded.origin.to_string(),
        status: o.status().to_string(),
        error,
        delta,
        quantities,
        failures,
        elapsed_ms: o.elapsed_ms,
    }
}

fn compute(path: &str, json: bool, verbose: bool) -> u8 {
    let mut found = sources::resolve(path);
    if found.len() != 1 {
        eprintln!("error: {path} names {} scenarios, compute takes one", found.len());
        return EXIT_ERROR;
    }
    let loaded = found.remove(0);
    let s = match &loaded.scenario {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", loaded.label);
            return EXIT_ERROR;
        }
    };
    let t = Instant::now();
    let v = match verify_scenario(s) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {}: {e}", s.name);
            return EXIT_ERROR;
        }
    };
    let elapsed = ms(t);
    if json {
        let out = report::compute_json(&v, &s.expected, &s.flag.tau, loaded.origin.to_string(), verbose, elapsed, &s.name);
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable report"));
    } else {
        print!("{}", render(s, &loaded.origin, &v, verbose));
    }
    if v.passed() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

fn render_walk(out: &mut String, dec: &ChamberedDecomposition, indent: &str) {
    let var = dec.var.name();
    for c in &dec.chambers {
        let neg = if c.negative.is_empty() {
            "0".to_string()
        } else {
            c.negative
                .iter()
                .map(|(i, a)| format!("({a}) {}", dec.candidates[*i].name))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        let _ = writeln!(out, "{indent}{var} in [{}, {}]", c.lo, c.hi);
        let _ = writeln!(out, "{indent}  P   = {}", c.positive.format());
        let _ = writeln!(out, "{indent}  N   = {neg}");
        let _ = writeln!(out, "{indent}  vol = {}", c.volume);
    }
}

fn render(s: &FlagScenario, origin: &Origin, v: &Verification, verbose: bool) -> String {
    let a = &v.analysis;
    let (three, six) = report::factors(&a.norm);
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "scenario {} ({origin})", s.name);
    if let Some(n) = &s.notes {
        let _ = writeln!(w, "  {n}");
    }
    let _ = writeln!(w, "(-K)^3 = {}, tau = {}", a.norm, s.flag.tau);
    let _ = writeln!(w, "\nthreefold: -K - u {}", s.flag.divisor.format());
    render_walk(w, &a.threefold, "  ");
    let _ = writeln!(w, "S_X(Y) = {}", a.s_divisor);

    for f in &a.flags {
        let _ = writeln!(w, "\nflag {}", f.name);
        for (k, dec) in &f.pieces {
            let (lo, hi) = dec.outer.clone().unwrap_or((Rational::zero(), Rational::zero()));
            let _ = writeln!(w, "  over u in [{lo}, {hi}] (threefold chamber {k})");
            render_walk(w, dec, "    ");
        }
        let _ = writeln!(w, "  S(V; Z) = {}", f.s_curve);
        if verbose {
            for c in &f.contributions {
                let _ = writeln!(
                    w,
                    "    u in [{}, {}]: first {}, second {}",
                    c.lo,
                    c.hi,
                    &c.first * &three,
                    &c.second * &three
                );
            }
        }
        for p in &f.points {
            let _ = writeln!(
                w,
                "  point {} (different {}): S(W; p) = {}, F_p = {}",
                p.name, p.different, p.s_point, p.f_term
            );
            if verbose {
                for c in &p.contributions {
                    let _ = writeln!(
                        w,
                        "    u in [{}, {}]: square {}, F_p {}",
                        c.lo,
                        c.hi,
                        &c.first * &three,
                        &c.second * &six
                    );
                }
            }
        }
    }

    let r = &a.report;
    let _ = writeln!(w, "\nterms");
    for t in &r.terms {
        let _ = writeln!(w, "  {:16} {} / {} = {}", t.id, t.numerator, t.s, t.value);
    }
    let sharp = if r.sharp { ", sharp" } else { "" };
    let _ = writeln!(w, "delta >= {} ({}), upper bound {}{sharp}", r.bound, r.argmin, r.upper_bound);

    if !v.mismatches.is_empty() || !v.failures.is_empty() {
        let _ = writeln!(w);
    }
    for m in &v.mismatches {
        let _ = writeln!(w, "mismatch {}", report::mismatch_line(m));
    }
    for f in &v.failures {
        let _ = writeln!(w, "check failed ({}): {}", f.check, f.detail);
    }
    if v.passed() && !s.expected.is_empty() {
        let _ = writeln!(w, "all {} expected values match", s.expected.len());
    }
    out
}

fn list() -> u8 {
    let mut rows: Vec<Loaded> = sources::all_builtin();
    rows.extend(sources::all_extra());
    rows.sort_by(|a, b| a.name().cmp(b.name()));
    let width = rows.iter().map(|l| l.name().len()).max().unwrap_or(8);
    let mut code = EXIT_OK;
    for l in &rows {
        match &l.scenario {
            Ok(s) => {
                let notes = s.notes.as_deref().unwrap_or("");
                println!("{:width$}  {}  {notes}", s.name, l.origin);
            }
            Err(e) => {
                eprintln!("error: {}: {e}", l.label);
                code = EXIT_ERROR;
            }
        }
    }
    code
}
