//! Cross-checks of one instance against the brute-force oracles.

use slotmarket_core::oracle::{enumerate_optimal_schedules, min_equilibrium_prices_oracle};
use slotmarket_core::vcg::{default_grid, leonard_mismatches};
use slotmarket_core::{
    build_match_graph, extract_prices, indifference_graph, minimum_prices, solve_min_bmatching, truthfulness_probe,
    verify_equilibrium, Error, Instance, PriceVector,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name, passed, detail: detail.into() }
    }
}

/// Runs every check on `inst`. With `tamper`, one landing unit is added to
/// every minimum price before the price checks, which must then fail.
///
/// Errors (too large for the oracles, infeasible, malformed) abort the run.
pub fn verify_instance(inst: &Instance, tamper: bool) -> Result<Vec<Check>, Error> {
    let mut checks = Vec::new();

    let g = build_match_graph(inst)?;
    let sol = solve_min_bmatching(&g)?;
    let (best, optima) = enumerate_optimal_schedules(inst)?;
    checks.push(Check::new(
        "oracle-objective",
        sol.objective == best && optima.contains(&sol.schedule),
        format!("solver {} / enumeration {best}", sol.objective),
    ));

    let raw = extract_prices(&sol.duals)?;
    let report = verify_equilibrium(inst, &sol.schedule, &raw);
    checks.push(Check::new("equilibrium-raw", report.is_ok(), format!("{} violations", report.violations.len())));

    let mut min = minimum_prices(inst, &sol.schedule, &raw)?;
    if tamper {
        min = min.price.into_iter().map(|(s, p)| (s, p + 1)).collect::<PriceVector>();
    }
    let report = verify_equilibrium(inst, &sol.schedule, &min);
    checks.push(Check::new("equilibrium-min", report.is_ok(), format!("{} violations", report.violations.len())));

    let oracle = min_equilibrium_prices_oracle(inst, &sol.schedule)?;
    checks.push(Check::new(
        "oracle-min-prices",
        oracle == min,
        format!("{:?} vs oracle {:?}", min.price, oracle.price),
    ));

    let reach = match indifference_graph(inst, &sol.schedule, &min) {
        Ok(graph) => {
            let cut = graph.unreachable_from_zero(&min);
            Check::new("zero-reachability", cut.is_empty(), format!("{} slots unreachable", cut.len()))
        }
        Err(e) => Check::new("zero-reachability", false, e.to_string()),
    };
    checks.push(reach);

    let mismatches = leonard_mismatches(inst)?;
    checks.push(Check::new("vcg-correspondence", mismatches.is_empty(), format!("{} mismatches", mismatches.len())));

    let mut reruns = 0;
    let mut profitable = 0;
    for flight in &inst.flights {
        let grid = default_grid(inst, &flight.id)?;
        let probe = truthfulness_probe(inst, &flight.id, &grid)?;
        reruns += probe.reruns;
        profitable += probe.profitable.len();
    }
    checks.push(Check::new(
        "truthfulness",
        profitable == 0,
        format!("{profitable} profitable misreports in {reruns} reruns"),
    ));

    Ok(checks)
}
