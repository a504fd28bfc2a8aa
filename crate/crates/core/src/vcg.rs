//! VCG payments by repeated solving, the price/payment correspondence, and
//! misreport probes for truthfulness.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::bmatch::{build_match_graph, objective_without, solve_indexed, MatchGraph};
use crate::equilibrium::{clear, min_prices_indexed, PriceRule};
use crate::error::Error;
use crate::model::{check_cost_report, CostMap, FlightId, Instance, Money, Schedule};

/// Payment owed by each flight.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
pub struct PaymentVector {
    pub pay: BTreeMap<FlightId, Money>,
}

/// Payments by flight index, given an optimal assignment of `g`.
fn payments_indexed(g: &MatchGraph, assign: &[usize], total: Money) -> Result<Vec<Money>, Error> {
    assign
        .iter()
        .enumerate()
        .map(|(f, &s)| {
            let own = g.cost(f, s).unwrap_or(0);
            let without = objective_without(g, f)?;
            Ok((total - own) - without)
        })
        .collect()
}

/// Clarke-pivot payments: each flight pays the delay cost its presence
/// imposes on the others,
/// `pay_i = (C(A) - c_{i,sigma(i)}) - C(A \ {i})`,
/// with every optimum `C` recomputed from scratch on the same slots.
pub fn vcg_payments(inst: &Instance) -> Result<(Schedule, PaymentVector), Error> {
    let g = build_match_graph(inst)?;
    let sol = solve_indexed(&g)?;
    let pay = payments_indexed(&g, &sol.assign, sol.objective)?;
    let pay = g.flight_ids().iter().cloned().zip(pay).collect();
    Ok((g.schedule_from(&sol.assign), PaymentVector { pay }))
}

/// A flight whose minimum price differs from its VCG payment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeonardMismatch {
    pub flight: FlightId,
    pub min_price: Money,
    pub vcg_payment: Money,
}

/// Compares, flight by flight, the minimum equilibrium price of the assigned
/// slot with the VCG payment. Both use the solver's schedule.
pub fn leonard_mismatches(inst: &Instance) -> Result<Vec<LeonardMismatch>, Error> {
    let g = build_match_graph(inst)?;
    let sol = solve_indexed(&g)?;
    let mut prices = sol.prices;
    min_prices_indexed(&g, &sol.assign, &mut prices)?;
    let pay = payments_indexed(&g, &sol.assign, sol.objective)?;
    Ok(sol
        .assign
        .iter()
        .zip(pay)
        .enumerate()
        .filter(|&(_, (&s, vcg_payment))| prices[s] != vcg_payment)
        .map(|(f, (&s, vcg_payment))| LeonardMismatch {
            flight: g.flight_ids()[f].clone(),
            min_price: prices[s],
            vcg_payment,
        })
        .collect())
}

/// `true` iff minimum equilibrium prices equal VCG payments for every flight.
pub fn check_leonard(inst: &Instance) -> Result<bool, Error> {
    leonard_mismatches(inst).map(|m| m.is_empty())
}

/// A misreport that lowered the flight's true total cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfitableMisreport {
    pub report: CostMap,
    pub slot: crate::model::SlotId,
    pub price: Money,
    /// Price plus the flight's true delay cost at `slot`.
    pub true_total: Money,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    pub flight: FlightId,
    pub truthful_total: Money,
    pub reruns: usize,
    pub profitable: Vec<ProfitableMisreport>,
}

impl ProbeReport {
    pub fn is_empty(&self) -> bool {
        self.profitable.is_empty()
    }
}

/// Most mechanism reruns a default grid may request.
pub const MAX_GRID: u64 = 10_000;

/// Every cost report in the integer box `[0, 2 * max true cost]` over the
/// flight's window.
pub fn default_grid(inst: &Instance, flight: &FlightId) -> Result<Vec<CostMap>, Error> {
    let f = inst.flight(flight).ok_or_else(|| Error::UnknownFlight(flight.clone()))?;
    let top = 2 * f.delay_cost.values().copied().max().unwrap_or(0);
    box_grid(f.delay_cost.keys().cloned().collect(), top)
}

/// Every cost map over `window` with entries in `0..=top`.
pub fn box_grid(window: Vec<crate::model::SlotId>, top: Money) -> Result<Vec<CostMap>, Error> {
    let side = (top + 1) as u64;
    let size = (0..window.len()).try_fold(1u64, |acc, _| acc.checked_mul(side)).unwrap_or(u64::MAX);
    if size > MAX_GRID {
        return Err(Error::TooLarge(format!("misreport grid of {size} > {MAX_GRID}")));
    }
    let mut grid = Vec::with_capacity(size as usize);
    let mut values = alloc::vec![0 as Money; window.len()];
    loop {
        grid.push(window.iter().cloned().zip(values.iter().copied()).collect());
        let mut k = 0;
        while k < values.len() {
            if values[k] < top {
                values[k] += 1;
                break;
            }
            values[k] = 0;
            k += 1;
        }
        if k == values.len() {
            return Ok(grid);
        }
    }
}

/// Reruns the full mechanism (schedule, then minimum prices) once per
/// misreport of `flight` and lists the reports under which the flight's true
/// total cost is strictly lower than under truthful reporting.
pub fn truthfulness_probe(inst: &Instance, flight: &FlightId, grid: &[CostMap]) -> Result<ProbeReport, Error> {
    let truth = inst.flight(flight).ok_or_else(|| Error::UnknownFlight(flight.clone()))?;
    for report in grid {
        check_cost_report(truth, report)?;
    }
    let honest = clear(inst, PriceRule::Min)?;
    let truthful_total = honest.flight_cost[flight];

    let mut profitable = Vec::new();
    for report in grid {
        let lied = inst.with_reported_costs(flight, report)?;
        let outcome = clear(&lied, PriceRule::Min)?;
        let slot = outcome.schedule.assignment[flight].clone();
        let price = outcome.prices.price[&slot];
        let true_total = price + truth.delay_cost[&slot];
        if true_total < truthful_total {
            profitable.push(ProfitableMisreport { report: report.clone(), slot, price, true_total });
        }
    }
    Ok(ProbeReport { flight: flight.clone(), truthful_total, reruns: grid.len(), profitable })
}
