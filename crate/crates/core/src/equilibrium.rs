//! Equilibrium prices: extraction from matching duals, verification, and
//! reduction to the component-wise minimum price vector.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bmatch::{build_match_graph, solve_indexed, DualPotentials, MatchGraph};
use crate::error::Error;
use crate::model::{check_schedule, EquilibriumOutcome, FlightId, Instance, Money, PriceVector, Schedule, SlotId};

/// Landing prices `p_s = -q_s` from normalized matching duals.
pub fn extract_prices(duals: &DualPotentials) -> Result<PriceVector, Error> {
    if !duals.is_normalized() {
        return Err(Error::NotNormalized(duals.dummy));
    }
    duals
        .slots
        .iter()
        .map(|(s, &q)| {
            if q > 0 {
                Err(Error::InvalidPrices(format!("slot {s} would get negative price {}", -q)))
            } else {
                Ok((s.clone(), -q))
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquilibriumViolation {
    InvalidSchedule(String),
    MissingPrice(SlotId),
    NegativePrice {
        slot: SlotId,
        price: Money,
    },
    /// A flight pays strictly less in total at `cheaper` than where it is.
    NotCheapest {
        flight: FlightId,
        assigned: SlotId,
        assigned_total: Money,
        cheaper: SlotId,
        cheaper_total: Money,
    },
    /// A slot with spare capacity carries a positive price.
    UnderfilledPriced {
        slot: SlotId,
        price: Money,
        load: u64,
        capacity: u32,
    },
}

impl fmt::Display for EquilibriumViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidSchedule(why) => write!(f, "invalid schedule: {why}"),
            Self::MissingPrice(s) => write!(f, "no price for slot {s}"),
            Self::NegativePrice { slot, price } => write!(f, "slot {slot} has negative price {price}"),
            Self::NotCheapest { flight, assigned, assigned_total, cheaper, cheaper_total } => {
                write!(f, "flight {flight} pays {assigned_total} at {assigned} but only {cheaper_total} at {cheaper}")
            }
            Self::UnderfilledPriced { slot, price, load, capacity } => {
                write!(f, "slot {slot} holds {load}/{capacity} flights but is priced {price}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerificationReport {
    pub violations: Vec<EquilibriumViolation>,
}

impl VerificationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks both equilibrium conditions and lists every violation: each flight
/// must pay the least total (price plus delay cost) over its window, and
/// every slot with spare capacity must be free.
pub fn verify_equilibrium(inst: &Instance, sched: &Schedule, prices: &PriceVector) -> VerificationReport {
    let mut violations = Vec::new();
    if let Err(e) = check_schedule(inst, sched) {
        let why = match e {
            Error::InvalidSchedule(why) => why,
            other => format!("{other}"),
        };
        violations.push(EquilibriumViolation::InvalidSchedule(why));
        return VerificationReport { violations };
    }

    let mut ok_prices = true;
    for slot in &inst.slots {
        match prices.get(&slot.id) {
            None => {
                violations.push(EquilibriumViolation::MissingPrice(slot.id.clone()));
                ok_prices = false;
            }
            Some(p) if p < 0 => {
                violations.push(EquilibriumViolation::NegativePrice { slot: slot.id.clone(), price: p })
            }
            Some(_) => {}
        }
    }
    if !ok_prices {
        return VerificationReport { violations };
    }

    for flight in &inst.flights {
        let assigned = &sched.assignment[&flight.id];
        let assigned_total = prices.price[assigned] + flight.delay_cost[assigned];
        for (slot, cost) in &flight.delay_cost {
            let total = prices.price[slot] + cost;
            if total < assigned_total {
                violations.push(EquilibriumViolation::NotCheapest {
                    flight: flight.id.clone(),
                    assigned: assigned.clone(),
                    assigned_total,
                    cheaper: slot.clone(),
                    cheaper_total: total,
                });
            }
        }
    }

    let load = sched.load();
    for slot in &inst.slots {
        let used = load.get(&slot.id).copied().unwrap_or(0);
        let price = prices.price[&slot.id];
        if used < u64::from(slot.capacity) && price != 0 {
            violations.push(EquilibriumViolation::UnderfilledPriced {
                slot: slot.id.clone(),
                price,
                load: used,
                capacity: slot.capacity,
            });
        }
    }
    VerificationReport { violations }
}

/// Edge `from -> to`: `flight` sits at `from` and pays the same total at `to`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IndifferenceEdge {
    pub from: SlotId,
    pub to: SlotId,
    pub flight: FlightId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndifferenceGraph {
    pub slots: Vec<SlotId>,
    pub edges: Vec<IndifferenceEdge>,
}

impl IndifferenceGraph {
    /// Slots reachable from any of `sources` along directed edges
    /// (sources included).
    pub fn reachable_from<'a>(&'a self, sources: impl IntoIterator<Item = &'a SlotId>) -> Vec<SlotId> {
        let mut out: BTreeMap<&SlotId, Vec<&SlotId>> = BTreeMap::new();
        for e in &self.edges {
            out.entry(&e.from).or_default().push(&e.to);
        }
        let mut seen: BTreeMap<&SlotId, ()> = BTreeMap::new();
        let mut queue: VecDeque<&SlotId> = VecDeque::new();
        for s in sources {
            if seen.insert(s, ()).is_none() {
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &v in out.get(u).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(v, ()).is_none() {
                    queue.push_back(v);
                }
            }
        }
        seen.into_keys().cloned().collect()
    }

    /// Slots with no directed path from a zero-priced slot.
    pub fn unreachable_from_zero(&self, prices: &PriceVector) -> Vec<SlotId> {
        let zero: Vec<&SlotId> = self.slots.iter().filter(|s| prices.get(s) == Some(0)).collect();
        let reached = self.reachable_from(zero);
        self.slots.iter().filter(|s| !reached.contains(s)).cloned().collect()
    }
}

/// Builds the indifference graph of an equilibrium.
pub fn indifference_graph(inst: &Instance, sched: &Schedule, prices: &PriceVector) -> Result<IndifferenceGraph, Error> {
    let report = verify_equilibrium(inst, sched, prices);
    if !report.is_ok() {
        return Err(Error::NotEquilibrium(report.violations.len()));
    }
    let mut edges = Vec::new();
    for flight in &inst.flights {
        let at = &sched.assignment[&flight.id];
        let total = prices.price[at] + flight.delay_cost[at];
        for (slot, cost) in &flight.delay_cost {
            if slot != at && prices.price[slot] + cost == total {
                edges.push(IndifferenceEdge { from: at.clone(), to: slot.clone(), flight: flight.id.clone() });
            }
        }
    }
    edges.sort();
    Ok(IndifferenceGraph { slots: inst.slots.iter().map(|s| s.id.clone()).collect(), edges })
}

/// Statistics of one run of the minimum-price procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MinPriceStats {
    /// Number of price decreases performed.
    pub events: u64,
    /// Event cap the run was allowed.
    pub cap: u64,
}

pub(crate) fn event_cap(flights: usize, slots: usize) -> u64 {
    let s = slots as u64;
    (s * s * (flights as u64 + s)).max(1)
}

pub(crate) fn is_equilibrium_indexed(g: &MatchGraph, assign: &[usize], prices: &[Money]) -> bool {
    if prices.iter().any(|&p| p < 0) {
        return false;
    }
    let mut load = vec![0u64; g.slots.len()];
    for (f, &s) in assign.iter().enumerate() {
        load[s] += 1;
        let total = prices[s] + g.cost(f, s).unwrap_or(0);
        if g.adjacency[f].iter().any(|&(t, c)| prices[t] + c < total) {
            return false;
        }
    }
    load.iter().zip(&g.capacity).zip(prices).all(|((&l, &c), &p)| l == c || p == 0)
}

/// Indifference edges as adjacency lists (`out`, `into`) over slot indices.
fn indifference_lists(g: &MatchGraph, assign: &[usize], prices: &[Money]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let ns = g.slots.len();
    let mut out = vec![Vec::new(); ns];
    let mut into = vec![Vec::new(); ns];
    for (f, &s) in assign.iter().enumerate() {
        let total = prices[s] + g.cost(f, s).unwrap_or(0);
        for &(t, c) in &g.adjacency[f] {
            if t != s && prices[t] + c == total {
                out[s].push(t);
                into[t].push(s);
            }
        }
    }
    (out, into)
}

fn search(adjacency: &[Vec<usize>], sources: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; adjacency.len()];
    let mut queue = VecDeque::new();
    for s in sources {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Lowers equilibrium prices (in place) to the minimum equilibrium prices.
///
/// Each round rebuilds the indifference graph, collects the slots `Z`
/// reachable from a zero-priced slot, picks the earliest slot `d` outside
/// `Z`, and lowers the prices of every slot that can reach `d` until one of
/// them hits zero or a flight outside that set becomes indifferent to a slot
/// inside it. Between rounds `Z` only grows, so `d` stays the pick until it
/// joins `Z`.
pub(crate) fn min_prices_indexed(
    g: &MatchGraph,
    assign: &[usize],
    prices: &mut [Money],
) -> Result<MinPriceStats, Error> {
    let ns = g.slots.len();
    let cap = event_cap(g.flights.len(), ns);
    let mut events = 0u64;
    loop {
        let (out, into) = indifference_lists(g, assign, prices);
        let zero = search(&out, (0..ns).filter(|&s| prices[s] == 0));
        let Some(d) = zero.iter().position(|&z| !z) else {
            return Ok(MinPriceStats { events, cap });
        };
        let lowered = search(&into, [d]);

        let mut delta = Money::MAX;
        for s in 0..ns {
            if lowered[s] {
                delta = delta.min(prices[s]);
            }
        }
        for (f, &s) in assign.iter().enumerate() {
            if lowered[s] {
                continue;
            }
            let total = prices[s] + g.cost(f, s).unwrap_or(0);
            for &(t, c) in &g.adjacency[f] {
                if lowered[t] {
                    delta = delta.min(prices[t] + c - total);
                }
            }
        }
        debug_assert!(delta > 0 && delta < Money::MAX);

        events += 1;
        if events > cap {
            return Err(Error::IterationBound(cap));
        }
        for s in 0..ns {
            if lowered[s] {
                prices[s] -= delta;
            }
        }
    }
}

fn index_prices(g: &MatchGraph, prices: &PriceVector) -> Result<Vec<Money>, Error> {
    g.slots
        .iter()
        .map(|s| prices.get(s).ok_or_else(|| Error::InvalidPrices(format!("no price for slot {s}"))))
        .collect()
}

fn price_vector(g: &MatchGraph, prices: &[Money]) -> PriceVector {
    g.slots.iter().cloned().zip(prices.iter().copied()).collect()
}

/// Minimum equilibrium prices for `sched`, starting from any equilibrium
/// price vector.
pub fn minimum_prices(inst: &Instance, sched: &Schedule, prices: &PriceVector) -> Result<PriceVector, Error> {
    minimum_prices_with_stats(inst, sched, prices).map(|(p, _)| p)
}

pub fn minimum_prices_with_stats(
    inst: &Instance,
    sched: &Schedule,
    prices: &PriceVector,
) -> Result<(PriceVector, MinPriceStats), Error> {
    let g = build_match_graph(inst)?;
    let assign = g.index_schedule(sched)?;
    let mut p = index_prices(&g, prices)?;
    if !is_equilibrium_indexed(&g, &assign, &p) {
        let report = verify_equilibrium(inst, sched, prices);
        return Err(Error::NotEquilibrium(report.violations.len().max(1)));
    }
    let stats = min_prices_indexed(&g, &assign, &mut p)?;
    Ok((price_vector(&g, &p), stats))
}

/// Which equilibrium prices the clearing reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum PriceRule {
    /// Prices read off the matching duals.
    Raw,
    /// Component-wise minimum equilibrium prices.
    #[default]
    Min,
}

/// Clears one market: optimal schedule, then prices by `rule`.
pub fn clear(inst: &Instance, rule: PriceRule) -> Result<EquilibriumOutcome, Error> {
    clear_with_stats(inst, rule).map(|(o, _)| o)
}

pub fn clear_with_stats(inst: &Instance, rule: PriceRule) -> Result<(EquilibriumOutcome, MinPriceStats), Error> {
    let g = build_match_graph(inst)?;
    let sol = solve_indexed(&g)?;
    let mut prices = sol.prices;
    let stats = match rule {
        PriceRule::Raw => MinPriceStats::default(),
        PriceRule::Min => min_prices_indexed(&g, &sol.assign, &mut prices)?,
    };
    let flight_cost = g
        .flights
        .iter()
        .zip(&sol.assign)
        .enumerate()
        .map(|(f, (id, &s))| (id.clone(), prices[s] + g.cost(f, s).unwrap_or(0)))
        .collect();
    let outcome = EquilibriumOutcome {
        schedule: g.schedule_from(&sol.assign),
        prices: price_vector(&g, &prices),
        flight_cost,
        objective: sol.objective,
        minimal_prices: rule == PriceRule::Min,
    };
    Ok((outcome, stats))
}
