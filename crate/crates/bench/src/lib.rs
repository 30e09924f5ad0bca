//! Benchmark inputs shared by the criterion targets.

use deltaflag_core::scenarios::{builtin_names, builtin_scenarios};
use deltaflag_core::FlagScenario;

/// Every builtin scenario, in name order.
pub fn scenarios() -> Vec<FlagScenario> {
    builtin_scenarios().expect("builtins load")
}

/// Builtin scenario text, for parser benchmarks.
pub fn sources() -> Vec<(&'static str, String)> {
    scenarios()
        .iter()
        .zip(builtin_names())
        .map(|(s, n)| (n, deltaflag_core::scenarios::serialize(s)))
        .collect()
}
