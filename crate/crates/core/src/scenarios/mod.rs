//! Flag scenarios: the data model, the text format and the built-in set.

mod builtin;
mod format;
mod model;

pub use builtin::{builtin, builtin_names, builtin_scenarios};
pub use format::{load_scenario, parse_scenario, serialize, HEADER};
pub use model::{FlagScenario, LatticeData, PointCase, SurfaceFlag, ThreefoldFlag};
