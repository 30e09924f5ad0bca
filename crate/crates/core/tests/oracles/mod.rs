//! Independent oracles, shared by the test targets of this crate and the
//! acceptance suite of the command-line crate.
#![allow(dead_code)]

pub mod tables;
pub mod quadrature;
pub mod structural;
pub mod zariski;
