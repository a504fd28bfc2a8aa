use slotmarket_core::horizon::{run_horizon, AirportId, DelayPropagation, HorizonConfig, Round, WindowedScenario};
use slotmarket_core::oracle::{enumerate_optimal_schedules, min_equilibrium_prices_oracle};
use slotmarket_core::{check_leonard, clear, Flight, FlightId, Instance, PriceRule, Slot, SlotId};

fn slot_of<'a>(sched: &'a slotmarket_core::Schedule, f: &str) -> &'a str {
    sched.slot_of(&FlightId::from(f)).unwrap().as_str()
}

fn price(p: &slotmarket_core::PriceVector, s: &str) -> i64 {
    p.price[&SlotId::from(s)]
}

/// Four flights each pushing the next one level down a line of slots.
fn chain() -> Instance {
    Instance::new(
        (1..=4).map(|k| Slot::new(format!("s{k}"), 1, k)).collect(),
        vec![
            Flight::new("f1", "A", [("s1", 0), ("s2", 1)]),
            Flight::new("f2", "A", [("s2", 0), ("s3", 1)]),
            Flight::new("f3", "B", [("s3", 0), ("s4", 1)]),
            Flight::new("f4", "C", [("s1", 0)]),
        ],
    )
}

#[test]
fn chain_prices_step_down_the_line() {
    let inst = chain();
    let out = clear(&inst, PriceRule::Min).unwrap();
    assert_eq!(out.objective, 3);
    for (f, s) in [("f4", "s1"), ("f1", "s2"), ("f2", "s3"), ("f3", "s4")] {
        assert_eq!(slot_of(&out.schedule, f), s);
    }
    for (s, p) in [("s1", 3), ("s2", 2), ("s3", 1), ("s4", 0)] {
        assert_eq!(price(&out.prices, s), p);
    }
    let (best, optima) = enumerate_optimal_schedules(&inst).unwrap();
    assert_eq!((best, optima.len()), (3, 1));
    assert_eq!(min_equilibrium_prices_oracle(&inst, &out.schedule).unwrap(), out.prices);
    assert!(check_leonard(&inst).unwrap());
}

fn two_slots(a: &str, b: &str, flights: Vec<Flight>) -> Instance {
    Instance::new(vec![Slot::new(a, 1, 0), Slot::new(b, 1, 1)], flights)
}

fn delay_scenario() -> WindowedScenario {
    let first = two_slots(
        "a1",
        "a2",
        vec![Flight::new("F1", "AA", [("a1", 0), ("a2", 5)]), Flight::new("X", "BB", [("a1", 0), ("a2", 9)])],
    );
    let second = two_slots(
        "b1",
        "b2",
        vec![Flight::new("G", "AA", [("b1", 0), ("b2", 3)]), Flight::new("Y", "BB", [("b1", 0), ("b2", 5)])],
    );
    WindowedScenario {
        airports: [(
            AirportId::from("ATL"),
            vec![Round { timestamp: 0, instance: first }, Round { timestamp: 1, instance: second }],
        )]
        .into(),
    }
}

#[test]
fn late_feeder_moves_its_connection_forward() {
    let scn = delay_scenario();
    let plain = run_horizon(&scn, None, HorizonConfig::default()).unwrap();
    let first = plain.rounds[0].outcome.as_ref().unwrap();
    assert_eq!(slot_of(&first.schedule, "F1"), "a2");
    assert_eq!(plain.delay_of(&"F1".into()), Some(5));
    let second = plain.rounds[1].outcome.as_ref().unwrap();
    assert_eq!(slot_of(&second.schedule, "G"), "b2");

    let mut hook = DelayPropagation { feeders: [("G".into(), "F1".into())].into(), factor: 3 };
    let log = run_horizon(&scn, Some(&mut hook), HorizonConfig::default()).unwrap();
    assert_eq!(log.rounds[1].revised, vec![FlightId::from("G")]);
    let second = log.rounds[1].outcome.as_ref().unwrap();
    assert_eq!(slot_of(&second.schedule, "G"), "b1");
    assert_eq!(slot_of(&second.schedule, "Y"), "b2");
    assert_eq!(price(&second.prices, "b1"), 5);

    // same answer as clearing the revised round directly
    let revised = scn.airports[&AirportId::from("ATL")][1]
        .instance
        .with_reported_costs(&"G".into(), &[("b1".into(), 0), ("b2".into(), 9)].into())
        .unwrap();
    let (best, optima) = enumerate_optimal_schedules(&revised).unwrap();
    assert_eq!(best, 5);
    assert_eq!(optima, vec![second.schedule.clone()]);
    assert_eq!(min_equilibrium_prices_oracle(&revised, &second.schedule).unwrap(), second.prices);
}
