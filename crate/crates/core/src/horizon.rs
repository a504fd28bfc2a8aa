//! Rolling-horizon clearing over several airports.
//!
//! Each airport's day is split into rounds, each holding the flights whose
//! arrivals fall in a short window. Rounds are cleared in timestamp order;
//! rounds sharing a timestamp are independent markets. Airlines couple
//! airports only through their cost declarations, so the one channel between
//! rounds is a [`CostUpdateHook`] that may revise the delay costs of the
//! upcoming round's flights after seeing earlier outcomes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::equilibrium::{clear_with_stats, PriceRule};
use crate::error::Error;
use crate::model::{validate_instance, CostMap, EquilibriumOutcome, FlightId, Instance, Money, Violation};

pub use crate::model::AirportId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Round {
    pub timestamp: u64,
    pub instance: Instance,
}

/// Pre-windowed rounds per airport, each list in increasing timestamp order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WindowedScenario {
    pub airports: BTreeMap<AirportId, Vec<Round>>,
}

/// Lists scenario problems: flights appearing more than once, rounds out of
/// order, and malformed round instances. A capacity deficit is not listed
/// here; it surfaces as an infeasible round.
pub fn validate_scenario(scn: &WindowedScenario) -> Vec<String> {
    let mut problems = Vec::new();
    let mut seen: BTreeMap<&FlightId, (&AirportId, usize)> = BTreeMap::new();
    for (airport, rounds) in &scn.airports {
        for (k, round) in rounds.iter().enumerate() {
            if k > 0 && rounds[k - 1].timestamp >= round.timestamp {
                problems.push(format!("{airport} round {k}: timestamps must increase"));
            }
            for v in validate_instance(&round.instance).violations {
                if !matches!(v, Violation::CapacityDeficit { .. }) {
                    problems.push(format!("{airport} round {k}: {v}"));
                }
            }
            for flight in &round.instance.flights {
                if let Some((a, r)) = seen.insert(&flight.id, (airport, k)) {
                    problems.push(format!("flight {} appears in {a} round {r} and {airport} round {k}", flight.id));
                }
            }
        }
    }
    problems
}

/// Revised cost maps for some of the upcoming round's flights.
pub type CostRevisions = BTreeMap<FlightId, CostMap>;

/// Called before each round with the log of all earlier timestamps.
pub trait CostUpdateHook {
    fn revise(&mut self, log: &ClearingLog, airport: &AirportId, upcoming: &Instance) -> CostRevisions;
}

impl<F> CostUpdateHook for F
where
    F: FnMut(&ClearingLog, &AirportId, &Instance) -> CostRevisions,
{
    fn revise(&mut self, log: &ClearingLog, airport: &AirportId, upcoming: &Instance) -> CostRevisions {
        self(log, airport, upcoming)
    }
}

/// Scales every delay cost of a flight by `factor` when its feeder flight
/// landed with a positive delay cost in an earlier round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayPropagation {
    /// Flight -> the flight it connects from.
    pub feeders: BTreeMap<FlightId, FlightId>,
    pub factor: Money,
}

impl CostUpdateHook for DelayPropagation {
    fn revise(&mut self, log: &ClearingLog, _airport: &AirportId, upcoming: &Instance) -> CostRevisions {
        upcoming
            .flights
            .iter()
            .filter(|f| self.feeders.get(&f.id).and_then(|feeder| log.delay_of(feeder)).is_some_and(|d| d > 0))
            .map(|f| {
                let scaled = f.delay_cost.iter().map(|(s, &c)| (s.clone(), c * self.factor)).collect();
                (f.id.clone(), scaled)
            })
            .collect()
    }
}

/// What to do with a round that admits no schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "lowercase"))]
pub enum OnInfeasible {
    #[default]
    Abort,
    /// Log the round with every flight unserved and continue.
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HorizonConfig {
    pub on_infeasible: OnInfeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(tag = "status", rename_all = "lowercase"))]
pub enum RoundStatus {
    Cleared,
    Skipped { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CapacityStats {
    pub total: u64,
    pub used: u64,
    pub spare: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RoundRecord {
    pub airport: AirportId,
    pub timestamp: u64,
    /// Position of the round in its airport's list.
    pub round: usize,
    pub status: RoundStatus,
    /// Flights whose costs the hook revised before clearing.
    pub revised: Vec<FlightId>,
    pub outcome: Option<EquilibriumOutcome>,
    /// Landing price charged to each served flight.
    pub payments: BTreeMap<FlightId, Money>,
    pub revenue: Money,
    pub capacity: CapacityStats,
    pub unserved: Vec<FlightId>,
    /// Price decreases spent by the minimum-price procedure.
    pub price_events: u64,
}

impl RoundRecord {
    pub fn max_price(&self) -> Money {
        self.outcome.as_ref().and_then(|o| o.prices.price.values().copied().max()).unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ClearingLog {
    pub rounds: Vec<RoundRecord>,
}

impl ClearingLog {
    pub fn for_airport<'a>(&'a self, airport: &'a AirportId) -> impl Iterator<Item = &'a RoundRecord> + 'a {
        self.rounds.iter().filter(move |r| &r.airport == airport)
    }

    /// Delay cost a flight landed with, if it was served.
    pub fn delay_of(&self, flight: &FlightId) -> Option<Money> {
        self.rounds.iter().find_map(|r| {
            let o = r.outcome.as_ref()?;
            let slot = o.schedule.slot_of(flight)?;
            Some(o.flight_cost[flight] - o.prices.price[slot])
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HorizonError {
    #[error("invalid scenario: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),
    #[error("cost revision for {airport} round {round} rejected: {error}")]
    Revision { airport: AirportId, round: usize, error: Error },
    #[error("{airport} round {round} (t={timestamp}) failed: {error}")]
    RoundFailed { airport: AirportId, timestamp: u64, round: usize, error: Error, partial: ClearingLog },
}

fn apply_revisions(inst: &Instance, revisions: &CostRevisions) -> Result<Instance, Error> {
    let mut out = inst.clone();
    for (flight, costs) in revisions {
        out = out.with_reported_costs(flight, costs)?;
    }
    Ok(out)
}

fn clear_round(
    airport: &AirportId,
    timestamp: u64,
    round: usize,
    inst: &Instance,
    revised: Vec<FlightId>,
) -> Result<RoundRecord, Error> {
    let total = inst.total_capacity();
    let (outcome, stats) = clear_with_stats(inst, PriceRule::Min)?;
    let used = inst.flights.len() as u64;
    Ok(RoundRecord {
        airport: airport.clone(),
        timestamp,
        round,
        status: RoundStatus::Cleared,
        revised,
        payments: outcome.payments(),
        revenue: outcome.revenue(),
        outcome: Some(outcome),
        capacity: CapacityStats { total, used, spare: total - used },
        unserved: Vec::new(),
        price_events: stats.events,
    })
}

fn skipped_round(
    airport: &AirportId,
    timestamp: u64,
    round: usize,
    inst: &Instance,
    revised: Vec<FlightId>,
    error: &Error,
) -> RoundRecord {
    let total = inst.total_capacity();
    let mut unserved: Vec<FlightId> = inst.flights.iter().map(|f| f.id.clone()).collect();
    unserved.sort();
    RoundRecord {
        airport: airport.clone(),
        timestamp,
        round,
        status: RoundStatus::Skipped { reason: error.to_string() },
        revised,
        outcome: None,
        payments: BTreeMap::new(),
        revenue: 0,
        capacity: CapacityStats { total, used: 0, spare: total },
        unserved,
        price_events: 0,
    }
}

/// Clears every round of the scenario in timestamp order.
///
/// Rounds sharing a timestamp see the same log (earlier timestamps only),
/// are cleared independently, and are logged in airport-id order. The hook,
/// if any, runs serially before each round.
pub fn run_horizon(
    scn: &WindowedScenario,
    mut hook: Option<&mut dyn CostUpdateHook>,
    config: HorizonConfig,
) -> Result<ClearingLog, HorizonError> {
    let problems = validate_scenario(scn);
    if !problems.is_empty() {
        return Err(HorizonError::InvalidScenario(problems));
    }

    let timestamps: BTreeSet<u64> = scn.airports.values().flatten().map(|r| r.timestamp).collect();
    let mut log = ClearingLog::default();
    for t in timestamps {
        let due: Vec<(&AirportId, usize, &Round)> = scn
            .airports
            .iter()
            .filter_map(|(a, rounds)| rounds.iter().enumerate().find(|(_, r)| r.timestamp == t).map(|(k, r)| (a, k, r)))
            .collect();

        let mut prepared = Vec::with_capacity(due.len());
        for &(airport, k, round) in &due {
            let revisions = match hook.as_deref_mut() {
                Some(h) => h.revise(&log, airport, &round.instance),
                None => CostRevisions::new(),
            };
            let inst = apply_revisions(&round.instance, &revisions).map_err(|error| HorizonError::Revision {
                airport: airport.clone(),
                round: k,
                error,
            })?;
            prepared.push((airport, k, inst, revisions.into_keys().collect::<Vec<_>>()));
        }

        for (airport, k, inst, revised) in prepared {
            match clear_round(airport, t, k, &inst, revised.clone()) {
                Ok(record) => log.rounds.push(record),
                Err(error @ Error::Infeasible(_)) if config.on_infeasible == OnInfeasible::Skip => {
                    log.rounds.push(skipped_round(airport, t, k, &inst, revised, &error));
                }
                Err(error) => {
                    return Err(HorizonError::RoundFailed {
                        airport: airport.clone(),
                        timestamp: t,
                        round: k,
                        error,
                        partial: log,
                    })
                }
            }
        }
    }
    Ok(log)
}
