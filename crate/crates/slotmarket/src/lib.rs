//! File formats, reports and the command-line driver for the landing-slot
//! market in `slotmarket-core`.

pub mod cli;
pub mod gen;
pub mod report;
pub mod scenario;
pub mod verify;
pub mod windowed;

pub use slotmarket_core as core;
