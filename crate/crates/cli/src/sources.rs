//! Resolving command-line arguments to scenarios.

use std::env;
use std::path::{Path, PathBuf};

use deltaflag_core::scenarios::{builtin, builtin_names};
use deltaflag_core::{load_scenario, Error, FlagScenario};

pub const SCENARIO_DIR_VAR: &str = "DELTAFLAG_SCENARIO_DIR";
pub const EXTENSION: &str = "dfs";

/// Where a scenario came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Builtin,
    File(PathBuf),
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::Builtin => f.write_str("builtin"),
            Origin::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// A scenario, or the error that kept it from loading.
pub struct Loaded {
    /// The argument or file that produced this entry.
    pub label: String,
    pub origin: Origin,
    pub scenario: Result<FlagScenario, Error>,
}

impl Loaded {
    /// Sort key: scenario name when it loaded, the label otherwise.
    pub fn name(&self) -> &str {
        match &self.scenario {
            Ok(s) => &s.name,
            Err(_) => &self.label,
        }
    }
}

/// Directories listed in `DELTAFLAG_SCENARIO_DIR`.
pub fn extra_dirs() -> Vec<PathBuf> {
    env::var_os(SCENARIO_DIR_VAR)
        .map(|v| env::split_paths(&v).filter(|p| !p.as_os_str().is_empty()).collect())
        .unwrap_or_default()
}

/// Scenario files directly inside `dir`, sorted by path.
pub fn files_in(dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let io = |e: std::io::Error| Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    };
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == EXTENSION) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn from_file(path: &Path) -> Loaded {
    Loaded {
        label: path.display().to_string(),
        origin: Origin::File(path.to_path_buf()),
        scenario: load_scenario(path),
    }
}

fn load_error(label: &str, e: Error) -> Loaded {
    Loaded {
        label: label.to_string(),
        origin: Origin::File(PathBuf::from(label)),
        scenario: Err(e),
    }
}

pub fn all_builtin() -> Vec<Loaded> {
    builtin_names()
        .into_iter()
        .map(|name| Loaded {
            label: name.to_string(),
            origin: Origin::Builtin,
            scenario: builtin(name),
        })
        .collect()
}

/// Every scenario file in the extra directories.
pub fn all_extra() -> Vec<Loaded> {
    let mut out = Vec::new();
    for dir in extra_dirs() {
        match files_in(&dir) {
            Ok(files) => out.extend(files.iter().map(|p| from_file(p))),
            Err(e) => out.push(load_error(&dir.display().to_string(), e)),
        }
    }
    out
}

/// Resolves one argument: an existing file or directory, then a
/// `<name>.dfs` in the extra directories, then a builtin name.
pub fn resolve(arg: &str) -> Vec<Loaded> {
    let path = Path::new(arg);
    if path.is_dir() {
        return match files_in(path) {
            Ok(files) => files.iter().map(|p| from_file(p)).collect(),
            Err(e) => vec![load_error(arg, e)],
        };
    }
    if path.is_file() {
        return vec![from_file(path)];
    }
    for dir in extra_dirs() {
        let candidate = dir.join(format!("{arg}.{EXTENSION}"));
        if candidate.is_file() {
            return vec![from_file(&candidate)];
        }
    }
    match builtin(arg) {
        Ok(s) => vec![Loaded {
            label: arg.to_string(),
            origin: Origin::Builtin,
            scenario: Ok(s),
        }],
        Err(Error::UnknownScenario(_)) => vec![load_error(
            arg,
            Error::Io {
                path: arg.to_string(),
                message: "no such file, and not a known scenario name".into(),
            },
        )],
        Err(e) => vec![load_error(arg, e)],
    }
}
