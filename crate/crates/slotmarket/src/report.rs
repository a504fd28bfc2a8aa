//! Clearing reports in JSON and CSV.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use slotmarket_core::horizon::{ClearingLog, RoundStatus};
use slotmarket_core::{EquilibriumOutcome, FlightId, Instance, Money, PriceRule, Schedule, SlotId};

/// Output of `solve`. All amounts are integers in minor currency units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveReport {
    pub prices_rule: PriceRule,
    pub objective: Money,
    pub revenue: Money,
    pub schedule: Schedule,
    pub prices: BTreeMap<SlotId, Money>,
    pub flight_cost: BTreeMap<FlightId, Money>,
}

impl SolveReport {
    pub fn new(outcome: &EquilibriumOutcome, rule: PriceRule) -> Self {
        Self {
            prices_rule: rule,
            objective: outcome.objective,
            revenue: outcome.revenue(),
            schedule: outcome.schedule.clone(),
            prices: outcome.prices.price.clone(),
            flight_cost: outcome.flight_cost.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// One table with a `kind` column:
    /// `flight` rows (slot, price, delay cost, total), `slot` rows (price),
    /// and `total` rows for the objective and revenue.
    pub fn to_csv(&self, inst: &Instance) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["kind", "id", "slot", "price", "delay_cost", "total_cost"]).unwrap();
        for (flight, slot) in &self.schedule.assignment {
            let price = self.prices[slot];
            let delay = inst.flight(flight).and_then(|f| f.cost(slot)).unwrap_or(0);
            w.write_record([
                "flight",
                flight.as_str(),
                slot.as_str(),
                &price.to_string(),
                &delay.to_string(),
                &self.flight_cost[flight].to_string(),
            ])
            .unwrap();
        }
        for (slot, price) in &self.prices {
            w.write_record(["slot", slot.as_str(), "", &price.to_string(), "", ""]).unwrap();
        }
        w.write_record(["total", "objective", "", "", &self.objective.to_string(), ""]).unwrap();
        w.write_record(["total", "revenue", "", &self.revenue.to_string(), "", ""]).unwrap();
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// Summary table of a horizon run: one row per round.
pub fn summary_csv(log: &ClearingLog) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["round", "airport", "timestamp", "status", "objective", "revenue", "max_price"]).unwrap();
    for r in &log.rounds {
        let status = match &r.status {
            RoundStatus::Cleared => "cleared",
            RoundStatus::Skipped { .. } => "skipped",
        };
        let objective = r.outcome.as_ref().map(|o| o.objective.to_string()).unwrap_or_default();
        w.write_record([
            &r.round.to_string(),
            r.airport.as_str(),
            &r.timestamp.to_string(),
            status,
            &objective,
            &r.revenue.to_string(),
            &r.max_price().to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
