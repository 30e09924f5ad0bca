//! Exact computation of Abban–Zhuang lower bounds for stability thresholds
//! along admissible flags on Fano threefolds.

pub mod checks;
pub mod error;
pub mod exactmath;
pub mod invariants;
pub mod lattice;
pub mod scenarios;
pub mod zariski;

pub use checks::{verify_scenario, Verification};
pub use error::{Error, Result};
pub use exactmath::{Assignment, Poly, Rational, Var};
pub use lattice::{CurveClass, DivisorClass, Lattice, ParamDivisor};
pub use zariski::{decompose, decompose_in_v, ChamberedDecomposition, NegativeCandidate};
pub use invariants::{analyze, Analysis, DeltaReport};
pub use scenarios::{builtin, load_scenario, parse_scenario, FlagScenario};
