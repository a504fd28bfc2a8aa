//! Brute-force reference computations for small instances.
//!
//! Nothing here shares code with the matching solver or the minimum-price
//! procedure; both are checked against these.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Infeasibility};
use crate::model::{check_schedule, validate_instance, Instance, Money, PriceVector, Schedule, SlotId, Violation};

pub const MAX_FLIGHTS: usize = 8;
pub const MAX_ASSIGNMENTS: u64 = 1_000_000;
pub const MAX_PRICE_SLOTS: usize = 4;

fn check_well_formed(inst: &Instance) -> Result<(), Error> {
    let report = validate_instance(inst);
    match report.violations.as_slice() {
        [] => Ok(()),
        [Violation::CapacityDeficit { capacity, flights }] => {
            Err(Error::Infeasible(Infeasibility::CapacityDeficit { capacity: *capacity, flights: *flights }))
        }
        _ => Err(Error::InvalidInstance(report)),
    }
}

/// Enumerates every capacity-feasible assignment and returns the minimum
/// total delay cost together with all schedules attaining it.
pub fn enumerate_optimal_schedules(inst: &Instance) -> Result<(Money, Vec<Schedule>), Error> {
    check_well_formed(inst)?;
    if inst.flights.len() > MAX_FLIGHTS {
        return Err(Error::TooLarge(format!("{} flights > {MAX_FLIGHTS}", inst.flights.len())));
    }
    let combos =
        inst.flights.iter().try_fold(1u64, |acc, f| acc.checked_mul(f.window.len() as u64)).unwrap_or(u64::MAX);
    if combos > MAX_ASSIGNMENTS {
        return Err(Error::TooLarge(format!("{combos} window combinations > {MAX_ASSIGNMENTS}")));
    }

    let mut remaining: BTreeMap<&SlotId, u32> = inst.slots.iter().map(|s| (&s.id, s.capacity)).collect();
    let mut chosen: Vec<&SlotId> = Vec::with_capacity(inst.flights.len());
    let mut best: Option<(Money, Vec<Vec<&SlotId>>)> = None;

    fn walk<'a>(
        inst: &'a Instance,
        remaining: &mut BTreeMap<&'a SlotId, u32>,
        chosen: &mut Vec<&'a SlotId>,
        cost: Money,
        best: &mut Option<(Money, Vec<Vec<&'a SlotId>>)>,
    ) {
        let k = chosen.len();
        if k == inst.flights.len() {
            match best {
                Some((b, all)) if *b == cost => all.push(chosen.clone()),
                Some((b, _)) if *b < cost => {}
                _ => *best = Some((cost, vec![chosen.clone()])),
            }
            return;
        }
        let flight = &inst.flights[k];
        for slot in &flight.window {
            let left = remaining.get_mut(slot).expect("window slot exists");
            if *left == 0 {
                continue;
            }
            *left -= 1;
            chosen.push(slot);
            walk(inst, remaining, chosen, cost + flight.delay_cost[slot], best);
            chosen.pop();
            *remaining.get_mut(slot).expect("window slot exists") += 1;
        }
    }

    walk(inst, &mut remaining, &mut chosen, 0, &mut best);
    let (objective, all) = best.ok_or(Error::Infeasible(Infeasibility::Unmatchable {
        flight: inst.flights.first().map(|f| f.id.clone()).unwrap_or_else(|| "".into()),
    }))?;
    let schedules = all
        .into_iter()
        .map(|slots| inst.flights.iter().zip(slots).map(|(f, s)| (f.id.clone(), s.clone())).collect())
        .collect();
    Ok((objective, schedules))
}

/// Finds the component-wise minimum equilibrium price vector for `sched` by
/// scanning the integer lattice `[0, max_cost * |S|]^|S|`.
///
/// Slots with spare capacity are pinned to zero. The scan records the
/// first feasible vector of least sum and the running component-wise
/// minimum over all feasible vectors; the two must coincide.
pub fn min_equilibrium_prices_oracle(inst: &Instance, sched: &Schedule) -> Result<PriceVector, Error> {
    check_well_formed(inst)?;
    check_schedule(inst, sched)?;
    let ns = inst.slots.len();
    if ns > MAX_PRICE_SLOTS {
        return Err(Error::TooLarge(format!("{ns} slots > {MAX_PRICE_SLOTS}")));
    }
    let bound = inst.max_cost() * ns as Money;

    let position: BTreeMap<&SlotId, usize> = inst.slots.iter().enumerate().map(|(k, s)| (&s.id, k)).collect();
    // p[a] - p[b] <= limit for each flight at a and alternative b.
    let mut constraints: Vec<(usize, usize, Money)> = Vec::new();
    for flight in &inst.flights {
        let at = &sched.assignment[&flight.id];
        let own = flight.delay_cost[at];
        for (slot, cost) in &flight.delay_cost {
            if slot != at {
                constraints.push((position[at], position[slot], cost - own));
            }
        }
    }
    let load = sched.load();
    let upper: Vec<Money> = inst
        .slots
        .iter()
        .map(|s| if load.get(&s.id).copied().unwrap_or(0) < u64::from(s.capacity) { 0 } else { bound })
        .collect();

    let mut p = vec![0 as Money; ns];
    let mut best_sum: Option<(Money, Vec<Money>)> = None;
    let mut lower: Option<Vec<Money>> = None;
    loop {
        if constraints.iter().all(|&(a, b, limit)| p[a] - p[b] <= limit) {
            let sum: Money = p.iter().sum();
            if best_sum.as_ref().is_none_or(|(s, _)| sum < *s) {
                best_sum = Some((sum, p.clone()));
            }
            match lower.as_mut() {
                None => lower = Some(p.clone()),
                Some(m) => m.iter_mut().zip(&p).for_each(|(m, &x)| *m = (*m).min(x)),
            }
        }
        // Odometer step over the box.
        let mut k = 0;
        while k < ns {
            if p[k] < upper[k] {
                p[k] += 1;
                break;
            }
            p[k] = 0;
            k += 1;
        }
        if k == ns {
            break;
        }
    }

    let (_, best) = best_sum.ok_or(Error::NoEquilibriumPrices)?;
    if Some(&best) != lower.as_ref() {
        return Err(Error::NotLatticeMin);
    }
    if bound > 0 && best.iter().any(|&x| x >= bound) {
        return Err(Error::LatticeBoundReached(bound));
    }
    Ok(inst.slots.iter().map(|s| s.id.clone()).zip(best).collect())
}
