use alloc::string::String;

use crate::model::{FlightId, ValidationReport};

/// Why an instance admits no schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Infeasibility {
    /// Fewer landings available in total than there are flights.
    CapacityDeficit { capacity: u64, flights: u64 },
    /// Capacity suffices globally but the windows cannot all be served.
    Unmatchable { flight: FlightId },
}

impl core::fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Infeasibility::CapacityDeficit { capacity, flights } => {
                write!(f, "total capacity {capacity} < {flights} flights (deficit {})", flights - capacity)
            }
            Infeasibility::Unmatchable { flight } => {
                write!(f, "no slot left in the window of flight {flight}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(ValidationReport),
    #[error("infeasible: {0}")]
    Infeasible(Infeasibility),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid prices: {0}")]
    InvalidPrices(String),
    #[error("dual potentials not normalized: dummy potential is {0}, expected 1")]
    NotNormalized(i64),
    #[error("schedule and prices are not an equilibrium ({0} violations)")]
    NotEquilibrium(usize),
    #[error("minimum-price procedure exceeded its event cap of {0}")]
    IterationBound(u64),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("no equilibrium prices on the search lattice")]
    NoEquilibriumPrices,
    #[error("minimum-sum equilibrium prices are not the component-wise minimum")]
    NotLatticeMin,
    #[error("minimum-sum equilibrium prices touch the lattice bound {0}")]
    LatticeBoundReached(i64),
    #[error("invalid cost report for flight {flight}: {reason}")]
    InvalidCostReport { flight: FlightId, reason: String },
    #[error("unknown flight {0}")]
    UnknownFlight(FlightId),
}
