use crate::error::{Error, Result};

use super::{parse_scenario, FlagScenario};

const SOURCES: &[(&str, &str)] = &[
    ("smoothQ-onQ", include_str!("../../scenarios/smoothQ-onQ.dfs")),
    ("smoothQ-onQ-andE", include_str!("../../scenarios/smoothQ-onQ-andE.dfs")),
    ("coneQ-vertex", include_str!("../../scenarios/coneQ-vertex.dfs")),
    ("coneQ-offVertex", include_str!("../../scenarios/coneQ-offVertex.dfs")),
    ("nodal", include_str!("../../scenarios/nodal.dfs")),
    ("cusp", include_str!("../../scenarios/cusp.dfs")),
    ("eckardt", include_str!("../../scenarios/eckardt.dfs")),
    ("onE-onQ", include_str!("../../scenarios/onE-onQ.dfs")),
    ("onE-offQ", include_str!("../../scenarios/onE-offQ.dfs")),
];

/// Names of the built-in scenarios, in a fixed order.
pub fn builtin_names() -> Vec<&'static str> {
    SOURCES.iter().map(|(n, _)| *n).collect()
}

/// Looks up a built-in scenario; a leading `2.15/` is ignored.
pub fn builtin(name: &str) -> Result<FlagScenario> {
    let key = name.strip_prefix("2.15/").unwrap_or(name);
    let (_, text) = SOURCES
        .iter()
        .find(|(n, _)| *n == key)
        .ok_or_else(|| Error::UnknownScenario(name.into()))?;
    parse_scenario(text)
}

pub fn builtin_scenarios() -> Result<Vec<FlagScenario>> {
    SOURCES.iter().map(|(_, t)| parse_scenario(t)).collect()
}
