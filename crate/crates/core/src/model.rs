//! Market instances and the values the clearing pipeline produces.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Prices and delay costs, in minor currency units.
pub type Money = i64;

/// Delay cost (or a reported cost) per slot of a flight's window.
pub type CostMap = BTreeMap<SlotId, Money>;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        #[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(transparent))]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(id: &str) -> Self {
                Self(id.to_string())
            }
        }

        impl From<String> for $name {
            fn from(id: String) -> Self {
                Self(id)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

string_id!(
    /// Identifier of a landing slot, unique within one instance.
    SlotId
);
string_id!(
    /// Identifier of a flight.
    FlightId
);
string_id!(
    /// Identifier of an airport.
    AirportId
);

/// A landing slot. A capacity of zero models a slot closed by weather.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(deny_unknown_fields))]
pub struct Slot {
    pub id: SlotId,
    pub capacity: u32,
    /// Ordinal position within the period. Only used for ordering and reports.
    pub time_index: u32,
}

impl Slot {
    pub fn new(id: impl Into<SlotId>, capacity: u32, time_index: u32) -> Self {
        Self { id: id.into(), capacity, time_index }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(deny_unknown_fields))]
pub struct Flight {
    pub id: FlightId,
    pub airline: String,
    /// Slots the flight may land in. Need not be contiguous.
    pub window: Vec<SlotId>,
    /// Declared delay cost for every slot of the window.
    #[cfg_attr(feature = "serde", serde(rename = "costs"))]
    pub delay_cost: CostMap,
}

impl Flight {
    /// Builds a flight whose window is exactly the keys of `costs`, in the
    /// order given.
    pub fn new<S: Into<SlotId>>(
        id: impl Into<FlightId>,
        airline: impl Into<String>,
        costs: impl IntoIterator<Item = (S, Money)>,
    ) -> Self {
        let mut window = Vec::new();
        let mut delay_cost = CostMap::new();
        for (slot, cost) in costs {
            let slot = slot.into();
            window.push(slot.clone());
            delay_cost.insert(slot, cost);
        }
        Self { id: id.into(), airline: airline.into(), window, delay_cost }
    }

    pub fn cost(&self, slot: &SlotId) -> Option<Money> {
        self.delay_cost.get(slot).copied()
    }
}

/// One airport's market: the slots of a period and the flights to land in it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(deny_unknown_fields))]
pub struct Instance {
    pub slots: Vec<Slot>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub flights: Vec<Flight>,
}

impl Instance {
    pub fn new(slots: Vec<Slot>, flights: Vec<Flight>) -> Self {
        Self { slots, flights }
    }

    pub fn slot(&self, id: &SlotId) -> Option<&Slot> {
        self.slots.iter().find(|s| &s.id == id)
    }

    pub fn flight(&self, id: &FlightId) -> Option<&Flight> {
        self.flights.iter().find(|f| &f.id == id)
    }

    pub fn total_capacity(&self) -> u64 {
        self.slots.iter().map(|s| u64::from(s.capacity)).sum()
    }

    pub fn max_cost(&self) -> Money {
        self.flights.iter().flat_map(|f| f.delay_cost.values().copied()).max().unwrap_or(0)
    }

    /// The same market with one flight removed. Slots are unchanged.
    pub fn without_flight(&self, id: &FlightId) -> Instance {
        Instance { slots: self.slots.clone(), flights: self.flights.iter().filter(|f| &f.id != id).cloned().collect() }
    }

    /// The same market with `flight` reporting `costs` instead of its own.
    /// The window is kept; `costs` must cover exactly the window with
    /// nonnegative values.
    pub fn with_reported_costs(&self, flight: &FlightId, costs: &CostMap) -> Result<Instance, Error> {
        let mut out = self.clone();
        let target =
            out.flights.iter_mut().find(|f| &f.id == flight).ok_or_else(|| Error::UnknownFlight(flight.clone()))?;
        check_cost_report(target, costs)?;
        target.delay_cost = costs.clone();
        Ok(out)
    }
}

pub(crate) fn check_cost_report(flight: &Flight, costs: &CostMap) -> Result<(), Error> {
    let window: BTreeSet<&SlotId> = flight.window.iter().collect();
    let reported: BTreeSet<&SlotId> = costs.keys().collect();
    if window != reported {
        return Err(Error::InvalidCostReport {
            flight: flight.id.clone(),
            reason: "cost domain differs from the window".to_string(),
        });
    }
    if let Some((slot, cost)) = costs.iter().find(|(_, &c)| c < 0) {
        return Err(Error::InvalidCostReport {
            flight: flight.id.clone(),
            reason: format!("negative cost {cost} at slot {slot}"),
        });
    }
    Ok(())
}

/// Assignment of every flight to one slot of its window.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(transparent))]
pub struct Schedule {
    pub assignment: BTreeMap<FlightId, SlotId>,
}

impl Schedule {
    pub fn slot_of(&self, flight: &FlightId) -> Option<&SlotId> {
        self.assignment.get(flight)
    }

    pub fn load(&self) -> BTreeMap<&SlotId, u64> {
        let mut load = BTreeMap::new();
        for slot in self.assignment.values() {
            *load.entry(slot).or_insert(0) += 1;
        }
        load
    }
}

impl FromIterator<(FlightId, SlotId)> for Schedule {
    fn from_iter<T: IntoIterator<Item = (FlightId, SlotId)>>(iter: T) -> Self {
        Self { assignment: iter.into_iter().collect() }
    }
}

/// Landing price per slot.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(transparent))]
pub struct PriceVector {
    pub price: BTreeMap<SlotId, Money>,
}

impl PriceVector {
    pub fn get(&self, slot: &SlotId) -> Option<Money> {
        self.price.get(slot).copied()
    }

    /// `true` when every price is at most the corresponding one in `other`.
    pub fn le(&self, other: &PriceVector) -> bool {
        self.price.iter().all(|(s, p)| other.price.get(s).is_some_and(|q| p <= q))
    }
}

impl FromIterator<(SlotId, Money)> for PriceVector {
    fn from_iter<T: IntoIterator<Item = (SlotId, Money)>>(iter: T) -> Self {
        Self { price: iter.into_iter().collect() }
    }
}

/// Result of clearing one market.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct EquilibriumOutcome {
    pub schedule: Schedule,
    pub prices: PriceVector,
    /// Landing price plus delay cost at the assigned slot.
    pub flight_cost: BTreeMap<FlightId, Money>,
    /// Total delay cost of the schedule.
    pub objective: Money,
    pub minimal_prices: bool,
}

impl EquilibriumOutcome {
    /// Landing price collected from each flight.
    pub fn payments(&self) -> BTreeMap<FlightId, Money> {
        self.schedule.assignment.iter().map(|(f, s)| (f.clone(), self.prices.get(s).unwrap_or(0))).collect()
    }

    pub fn revenue(&self) -> Money {
        self.schedule.assignment.values().map(|s| self.prices.get(s).unwrap_or(0)).sum()
    }
}

/// One broken instance invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptySlotId { index: usize },
    EmptyFlightId { index: usize },
    DuplicateSlot(SlotId),
    DuplicateFlight(FlightId),
    EmptyWindow(FlightId),
    DuplicateWindowSlot { flight: FlightId, slot: SlotId },
    UnknownWindowSlot { flight: FlightId, slot: SlotId },
    CostDomainMismatch { flight: FlightId },
    NegativeCost { flight: FlightId, slot: SlotId, cost: Money },
    CapacityDeficit { capacity: u64, flights: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptySlotId { index } => write!(f, "slot #{index} has an empty id"),
            Violation::EmptyFlightId { index } => write!(f, "flight #{index} has an empty id"),
            Violation::DuplicateSlot(s) => write!(f, "duplicate slot id {s}"),
            Violation::DuplicateFlight(id) => write!(f, "duplicate flight id {id}"),
            Violation::EmptyWindow(id) => write!(f, "flight {id} has an empty window"),
            Violation::DuplicateWindowSlot { flight, slot } => {
                write!(f, "flight {flight} lists slot {slot} twice in its window")
            }
            Violation::UnknownWindowSlot { flight, slot } => {
                write!(f, "flight {flight} has unknown slot {slot} in its window")
            }
            Violation::CostDomainMismatch { flight } => {
                write!(f, "flight {flight}: cost domain \u{2260} window")
            }
            Violation::NegativeCost { flight, slot, cost } => {
                write!(f, "flight {flight} has negative cost {cost} at slot {slot}")
            }
            Violation::CapacityDeficit { capacity, flights } => {
                write!(f, "total capacity {capacity} < {flights} flights")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Lists every broken invariant of `inst`. An empty report means the
/// instance is well-formed and has enough total capacity.
pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let mut violations = Vec::new();

    let mut slot_ids = BTreeSet::new();
    for (index, slot) in inst.slots.iter().enumerate() {
        if slot.id.as_str().is_empty() {
            violations.push(Violation::EmptySlotId { index });
        }
        if !slot_ids.insert(&slot.id) {
            violations.push(Violation::DuplicateSlot(slot.id.clone()));
        }
    }

    let mut flight_ids = BTreeSet::new();
    for (index, flight) in inst.flights.iter().enumerate() {
        if flight.id.as_str().is_empty() {
            violations.push(Violation::EmptyFlightId { index });
        }
        if !flight_ids.insert(&flight.id) {
            violations.push(Violation::DuplicateFlight(flight.id.clone()));
        }
        if flight.window.is_empty() {
            violations.push(Violation::EmptyWindow(flight.id.clone()));
        }
        let mut window = BTreeSet::new();
        for slot in &flight.window {
            if !window.insert(slot) {
                violations.push(Violation::DuplicateWindowSlot { flight: flight.id.clone(), slot: slot.clone() });
            }
            if !slot_ids.contains(slot) {
                violations.push(Violation::UnknownWindowSlot { flight: flight.id.clone(), slot: slot.clone() });
            }
        }
        if !flight.delay_cost.keys().eq(window.iter().copied()) {
            violations.push(Violation::CostDomainMismatch { flight: flight.id.clone() });
        }
        for (slot, &cost) in &flight.delay_cost {
            if cost < 0 {
                violations.push(Violation::NegativeCost { flight: flight.id.clone(), slot: slot.clone(), cost });
            }
        }
    }

    let capacity = inst.total_capacity();
    let flights = inst.flights.len() as u64;
    if capacity < flights {
        violations.push(Violation::CapacityDeficit { capacity, flights });
    }

    ValidationReport { violations }
}

/// Checks that `sched` assigns every flight of `inst` exactly once, inside
/// its window, within slot capacities.
pub fn check_schedule(inst: &Instance, sched: &Schedule) -> Result<(), Error> {
    if sched.assignment.len() != inst.flights.len() {
        return Err(Error::InvalidSchedule(format!(
            "{} assignments for {} flights",
            sched.assignment.len(),
            inst.flights.len()
        )));
    }
    for flight in &inst.flights {
        let slot = sched
            .slot_of(&flight.id)
            .ok_or_else(|| Error::InvalidSchedule(format!("flight {} is unassigned", flight.id)))?;
        if flight.cost(slot).is_none() {
            return Err(Error::InvalidSchedule(format!("flight {} assigned to {slot} outside its window", flight.id)));
        }
    }
    for (slot, load) in sched.load() {
        let cap = inst.slot(slot).ok_or_else(|| Error::InvalidSchedule(format!("unknown slot {slot}")))?.capacity;
        if load > u64::from(cap) {
            return Err(Error::InvalidSchedule(format!("slot {slot} holds {load} flights, capacity {cap}")));
        }
    }
    Ok(())
}

/// Total delay cost of a valid schedule.
pub fn total_delay_cost(inst: &Instance, sched: &Schedule) -> Result<Money, Error> {
    check_schedule(inst, sched)?;
    Ok(inst.flights.iter().map(|f| f.cost(&sched.assignment[&f.id]).unwrap_or(0)).sum())
}
