//! Market clearing for airport landing slots.
//!
//! A single-airport market assigns every flight to one slot of its landing
//! window and prices the slots so that each flight pays the least combined
//! landing price and delay cost it could get anywhere in its window. The
//! schedule is found as a minimum-weight perfect b-matching, the prices come
//! from the matching duals and are then lowered to the unique component-wise
//! minimum, which coincides with VCG payments.
//!
//! The crate is `no_std` and only needs `alloc`. Scenario files, reports and
//! the command-line driver live in the `slotmarket` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bmatch;
pub mod equilibrium;
mod error;
pub mod horizon;
pub mod model;
pub mod oracle;
pub mod vcg;

pub use bmatch::{build_match_graph, solve_min_bmatching, DualPotentials, MatchGraph, MatchingSolution};
pub use equilibrium::{
    clear, extract_prices, indifference_graph, minimum_prices, minimum_prices_with_stats, verify_equilibrium,
    IndifferenceGraph, PriceRule, VerificationReport,
};
pub use error::{Error, Infeasibility};
pub use model::{
    total_delay_cost, validate_instance, CostMap, EquilibriumOutcome, Flight, FlightId, Instance, Money, PriceVector,
    Schedule, Slot, SlotId, ValidationReport, Violation,
};
pub use vcg::{check_leonard, truthfulness_probe, vcg_payments, PaymentVector, ProbeReport};

pub type Result<T, E = Error> = core::result::Result<T, E>;
