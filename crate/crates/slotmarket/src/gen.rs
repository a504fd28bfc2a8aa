//! Random instance generators for tests and benchmarks.
//!
//! The clearing pipeline itself is deterministic; randomness only enters
//! through these generators, seeded from `SLOTMARKET_SEED` when set.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slotmarket_core::{Flight, Instance, Money, Slot};

pub const SEED_VAR: &str = "SLOTMARKET_SEED";

/// Seed from `SLOTMARKET_SEED`, or `default` when unset or unparsable.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var(SEED_VAR).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(default)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct SmallParams {
    pub max_slots: usize,
    pub max_flights: usize,
    pub max_cap: u32,
    pub max_cost: Money,
}

/// Random small market: slot count, capacities, windows (any nonempty
/// subset) and costs all uniform. May be infeasible.
pub fn small_instance(rng: &mut impl Rng, p: SmallParams) -> Instance {
    let ns = rng.gen_range(1..=p.max_slots);
    let nf = rng.gen_range(0..=p.max_flights);
    let slots = (0..ns).map(|k| Slot::new(format!("s{k}"), rng.gen_range(0..=p.max_cap), k as u32)).collect();
    let flights = (0..nf)
        .map(|i| {
            let width = rng.gen_range(1..=ns);
            let mut picked = sample(rng, ns, width).into_vec();
            picked.sort_unstable();
            let costs: Vec<(String, Money)> =
                picked.into_iter().map(|k| (format!("s{k}"), rng.gen_range(0..=p.max_cost))).collect();
            Flight::new(format!("f{i}"), format!("A{}", i % 3), costs)
        })
        .collect();
    Instance::new(slots, flights)
}

/// Draws small instances until one admits a schedule.
pub fn feasible_small_instance(rng: &mut impl Rng, p: SmallParams) -> Instance {
    loop {
        let inst = small_instance(rng, p);
        let ok =
            slotmarket_core::build_match_graph(&inst).and_then(|g| slotmarket_core::solve_min_bmatching(&g)).is_ok();
        if ok {
            return inst;
        }
    }
}

/// Medium market with contiguous windows starting at each flight's
/// scheduled slot and delay costs rising along the window. Capacity is
/// sized so the market is always feasible.
pub fn windowed_instance(
    rng: &mut impl Rng,
    slots: usize,
    flights: usize,
    max_window: usize,
    max_rate: Money,
) -> Instance {
    let max_window = max_window.min(slots).max(1);
    let cap = flights.div_ceil(slots) as u32 + 1;
    let slot_list = (0..slots).map(|k| Slot::new(format!("s{k:03}"), cap, k as u32)).collect();
    let flight_list = (0..flights)
        .map(|i| {
            let width = rng.gen_range(1..=max_window);
            let start = rng.gen_range(0..=slots - width);
            let rate = rng.gen_range(1..=max_rate);
            let costs: Vec<(String, Money)> = (0..width)
                .map(|k| (format!("s{:03}", start + k), k as Money * rate + rng.gen_range(0..=rate)))
                .map(|(s, c)| if s == format!("s{start:03}") { (s, 0) } else { (s, c) })
                .collect();
            Flight::new(format!("f{i:05}"), format!("A{}", i % 7), costs)
        })
        .collect();
    Instance::new(slot_list, flight_list)
}

/// A busy airport day: `flights` arrivals over `slots` five-minute slots,
/// windows of up to `max_window` slots, and a weather dip that cuts capacity
/// by two landings per slot over the middle sixth of the day. Arrival
/// demand runs just under the normal capacity, so the dip backs up traffic.
pub fn synthetic_day(rng: &mut impl Rng, flights: usize, slots: usize, max_window: usize) -> Instance {
    let base = (flights.div_ceil(slots) + 1) as u32;
    let slot_list = (0..slots)
        .map(|k| {
            let dip = k >= 5 * slots / 12 && k < 7 * slots / 12;
            Slot::new(format!("t{k:03}"), if dip { base - 2 } else { base }, k as u32)
        })
        .collect();
    let last_start = slots - max_window;
    let flight_list = (0..flights)
        .map(|i| {
            let start = rng.gen_range(0..=last_start);
            let width = rng.gen_range(1..=max_window);
            let rate: Money = rng.gen_range(10..=500);
            let costs: Vec<(String, Money)> =
                (0..width).map(|k| (format!("t{:03}", start + k), rate * k as Money)).collect();
            Flight::new(format!("F{i:05}"), format!("AL{}", i % 12), costs)
        })
        .collect();
    Instance::new(slot_list, flight_list)
}
