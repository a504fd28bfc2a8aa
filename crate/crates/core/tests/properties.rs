use std::collections::BTreeSet;

use proptest::prelude::*;
use slotmarket_core::bmatch::{build_match_graph, solve_min_bmatching, Node};
use slotmarket_core::equilibrium::minimum_prices_with_stats;
use slotmarket_core::oracle::{enumerate_optimal_schedules, min_equilibrium_prices_oracle};
use slotmarket_core::vcg::vcg_payments;
use slotmarket_core::{
    check_leonard, extract_prices, indifference_graph, minimum_prices, total_delay_cost, verify_equilibrium, Error,
    Flight, Instance, Money, PriceVector, Schedule, Slot, SlotId,
};

fn instance(max_slots: usize, max_flights: usize, max_cap: u32, max_cost: Money) -> impl Strategy<Value = Instance> {
    (1..=max_slots)
        .prop_flat_map(move |ns| {
            let caps = proptest::collection::vec(0..=max_cap, ns);
            let flight = (1u32..(1 << ns), proptest::collection::vec(0..=max_cost, ns));
            (Just(ns), caps, proptest::collection::vec(flight, 0..=max_flights))
        })
        .prop_map(|(ns, caps, flights)| {
            let slots = (0..ns).map(|k| Slot::new(format!("s{k}"), caps[k], k as u32)).collect();
            let flights = flights
                .into_iter()
                .enumerate()
                .map(|(i, (mask, costs))| {
                    let window = (0..ns).filter(|k| mask & (1 << k) != 0).map(|k| (format!("s{k}"), costs[k]));
                    Flight::new(format!("f{i}"), "X", window)
                })
                .collect();
            Instance::new(slots, flights)
        })
}

/// Raises prices by `k` on the largest set of fully-sold slots whose
/// flights keep at least `k` of slack toward every slot outside the set.
fn raise_closed_component(inst: &Instance, sched: &Schedule, prices: &PriceVector, k: Money) -> PriceVector {
    let load = sched.load();
    let mut up: BTreeSet<SlotId> = inst
        .slots
        .iter()
        .filter(|s| load.get(&s.id).copied().unwrap_or(0) == u64::from(s.capacity))
        .map(|s| s.id.clone())
        .collect();
    loop {
        let mut drop = None;
        'scan: for f in &inst.flights {
            let at = &sched.assignment[&f.id];
            if !up.contains(at) {
                continue;
            }
            let total = prices.price[at] + f.delay_cost[at];
            for (t, c) in &f.delay_cost {
                if !up.contains(t) && prices.price[t] + c - total < k {
                    drop = Some(at.clone());
                    break 'scan;
                }
            }
        }
        match drop {
            Some(s) => {
                up.remove(&s);
            }
            None => break,
        }
    }
    prices.price.iter().map(|(s, &p)| (s.clone(), if up.contains(s) { p + k } else { p })).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solver_matches_enumeration(inst in instance(4, 6, 3, 9)) {
        let oracle = enumerate_optimal_schedules(&inst);
        let solved = build_match_graph(&inst).and_then(|g| solve_min_bmatching(&g));
        match (oracle, solved) {
            (Ok((best, optima)), Ok(sol)) => {
                prop_assert_eq!(sol.objective, best);
                prop_assert_eq!(total_delay_cost(&inst, &sol.schedule), Ok(best));
                prop_assert!(optima.contains(&sol.schedule));
            }
            (Err(Error::Infeasible(_)), Err(Error::Infeasible(_))) => {}
            (a, b) => prop_assert!(false, "oracle {:?} vs solver {:?}", a, b),
        }
    }

    #[test]
    fn duals_are_feasible_and_complementary(inst in instance(4, 6, 3, 9)) {
        let Ok(g) = build_match_graph(&inst) else { return Ok(()) };
        let Ok(sol) = solve_min_bmatching(&g) else { return Ok(()) };
        let q = &sol.duals;
        prop_assert_eq!(q.dummy, 1);
        let load = sol.schedule.load();
        for f in &inst.flights {
            let at = &sol.schedule.assignment[&f.id];
            for (s, &c) in &f.delay_cost {
                let lhs = q.flights[&f.id] + q.slots[s];
                prop_assert!(lhs <= c);
                if s == at {
                    prop_assert_eq!(lhs, c);
                }
            }
        }
        for slot in &inst.slots {
            let qs = q.slots[&slot.id];
            if slot.capacity > 0 {
                prop_assert!(q.dummy + qs <= 1);
            }
            if load.get(&slot.id).copied().unwrap_or(0) < u64::from(slot.capacity) {
                // a dummy edge is used here, so it must be tight
                prop_assert_eq!(q.dummy + qs, 1);
            }
        }
        prop_assert_eq!(q.objective(&g), sol.objective + g.b_value(Node::Dummy) as i64);
    }

    #[test]
    fn raw_and_minimum_prices_are_equilibria(inst in instance(5, 8, 3, 9)) {
        let Ok(g) = build_match_graph(&inst) else { return Ok(()) };
        let Ok(sol) = solve_min_bmatching(&g) else { return Ok(()) };
        let raw = extract_prices(&sol.duals).unwrap();
        prop_assert!(verify_equilibrium(&inst, &sol.schedule, &raw).is_ok());
        let (min, stats) = minimum_prices_with_stats(&inst, &sol.schedule, &raw).unwrap();
        prop_assert!(verify_equilibrium(&inst, &sol.schedule, &min).is_ok());
        prop_assert!(min.le(&raw));
        prop_assert!(stats.events <= stats.cap);
        let graph = indifference_graph(&inst, &sol.schedule, &min).unwrap();
        prop_assert!(graph.unreachable_from_zero(&min).is_empty());
        prop_assert_eq!(minimum_prices(&inst, &sol.schedule, &min).unwrap(), min);
    }

    #[test]
    fn minimum_prices_match_lattice_oracle(inst in instance(3, 5, 2, 9)) {
        let Ok(g) = build_match_graph(&inst) else { return Ok(()) };
        let Ok(sol) = solve_min_bmatching(&g) else { return Ok(()) };
        let raw = extract_prices(&sol.duals).unwrap();
        let min = minimum_prices(&inst, &sol.schedule, &raw).unwrap();
        let oracle = min_equilibrium_prices_oracle(&inst, &sol.schedule).unwrap();
        prop_assert_eq!(&min, &oracle);

        let raised = raise_closed_component(&inst, &sol.schedule, &raw, 5);
        prop_assert!(verify_equilibrium(&inst, &sol.schedule, &raised).is_ok());
        prop_assert_eq!(minimum_prices(&inst, &sol.schedule, &raised).unwrap(), min);
    }

    #[test]
    fn vcg_payments_match_minimum_prices(inst in instance(3, 5, 2, 6)) {
        let Ok((sched, pay)) = vcg_payments(&inst) else { return Ok(()) };
        prop_assert!(pay.pay.values().all(|&p| p >= 0));
        prop_assert!(check_leonard(&inst).unwrap());

        // externality identity with every optimum taken from the enumeration oracle
        let (full, _) = enumerate_optimal_schedules(&inst).unwrap();
        for f in &inst.flights {
            let (without, _) = enumerate_optimal_schedules(&inst.without_flight(&f.id)).unwrap();
            let others = full - f.delay_cost[&sched.assignment[&f.id]];
            prop_assert_eq!(pay.pay[&f.id], others - without);
        }
    }
}
