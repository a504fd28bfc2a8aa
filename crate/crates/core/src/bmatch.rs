//! Minimum-weight perfect b-matching between flights and slots.
//!
//! Left side: every flight (b = 1) plus one dummy node that soaks up unused
//! capacity (b = total capacity - flights). Right side: the slots
//! (b = capacity). A flight is joined to each slot of its window at its delay
//! cost; the dummy is joined to every slot by `capacity` parallel edges of
//! weight 1.
//!
//! The matching is computed as a min-cost flow by successive shortest paths.
//! Flights are added one at a time in id order; each addition runs Dijkstra
//! on reduced costs from the new flight until it first reaches a slot with
//! spare capacity. Dummy edges are not materialized: spare capacity is the
//! dummy's share, and the flow potentials give dual values with the dummy
//! potential fixed at 1.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::error::{Error, Infeasibility};
use crate::model::{validate_instance, FlightId, Instance, Money, Schedule, SlotId, Violation};

/// Indexed b-matching graph of one instance.
///
/// Flights are indexed in id order and slots in `(time_index, id)` order;
/// the solver breaks ties by index, so results are reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchGraph {
    pub(crate) flights: Vec<FlightId>,
    pub(crate) slots: Vec<SlotId>,
    pub(crate) capacity: Vec<u64>,
    /// Per flight: `(slot index, delay cost)` sorted by slot index.
    pub(crate) adjacency: Vec<Vec<(usize, Money)>>,
    dummy_demand: u64,
}

/// Edge between a flight and a slot of its window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlightEdge {
    pub flight: usize,
    pub slot: usize,
    pub weight: Money,
}

/// `multiplicity` parallel dummy edges into one slot, each of weight 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DummyEdges {
    pub slot: usize,
    pub multiplicity: u64,
}

/// Node of the matching graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    Flight(usize),
    Slot(usize),
    Dummy,
}

impl MatchGraph {
    pub fn flight_ids(&self) -> &[FlightId] {
        &self.flights
    }

    pub fn slot_ids(&self) -> &[SlotId] {
        &self.slots
    }

    pub fn flight_index(&self, id: &FlightId) -> Option<usize> {
        self.flights.binary_search(id).ok()
    }

    pub fn slot_index(&self, id: &SlotId) -> Option<usize> {
        self.slots.iter().position(|s| s == id)
    }

    pub fn flight_edges(&self) -> impl Iterator<Item = FlightEdge> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(flight, arcs)| arcs.iter().map(move |&(slot, weight)| FlightEdge { flight, slot, weight }))
    }

    pub fn dummy_edges(&self) -> impl Iterator<Item = DummyEdges> + '_ {
        self.capacity
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(slot, &multiplicity)| DummyEdges { slot, multiplicity })
    }

    pub fn b_value(&self, node: Node) -> u64 {
        match node {
            Node::Flight(_) => 1,
            Node::Slot(s) => self.capacity[s],
            Node::Dummy => self.dummy_demand,
        }
    }

    pub(crate) fn cost(&self, flight: usize, slot: usize) -> Option<Money> {
        let arcs = &self.adjacency[flight];
        arcs.binary_search_by_key(&slot, |&(s, _)| s).ok().map(|k| arcs[k].1)
    }

    /// Maps a schedule onto slot indices, one per flight index.
    pub(crate) fn index_schedule(&self, sched: &Schedule) -> Result<Vec<usize>, Error> {
        if sched.assignment.len() != self.flights.len() {
            return Err(Error::InvalidSchedule(alloc::format!(
                "{} assignments for {} flights",
                sched.assignment.len(),
                self.flights.len()
            )));
        }
        let slot_pos: BTreeMap<&SlotId, usize> = self.slots.iter().enumerate().map(|(k, s)| (s, k)).collect();
        let mut assign = Vec::with_capacity(self.flights.len());
        let mut load = vec![0u64; self.slots.len()];
        for (f, id) in self.flights.iter().enumerate() {
            let slot =
                sched.slot_of(id).ok_or_else(|| Error::InvalidSchedule(alloc::format!("flight {id} is unassigned")))?;
            let s = *slot_pos.get(slot).ok_or_else(|| Error::InvalidSchedule(alloc::format!("unknown slot {slot}")))?;
            if self.cost(f, s).is_none() {
                return Err(Error::InvalidSchedule(alloc::format!(
                    "flight {id} assigned to {slot} outside its window"
                )));
            }
            load[s] += 1;
            if load[s] > self.capacity[s] {
                return Err(Error::InvalidSchedule(alloc::format!("slot {slot} over capacity")));
            }
            assign.push(s);
        }
        Ok(assign)
    }

    pub(crate) fn schedule_from(&self, assign: &[usize]) -> Schedule {
        self.flights.iter().zip(assign).map(|(f, &s)| (f.clone(), self.slots[s].clone())).collect()
    }
}

/// Builds the matching graph of a well-formed instance.
pub fn build_match_graph(inst: &Instance) -> Result<MatchGraph, Error> {
    let report = validate_instance(inst);
    if let Some(Violation::CapacityDeficit { capacity, flights }) = report.violations.last() {
        if report.violations.len() == 1 {
            return Err(Error::Infeasible(Infeasibility::CapacityDeficit { capacity: *capacity, flights: *flights }));
        }
    }
    if !report.is_empty() {
        return Err(Error::InvalidInstance(report));
    }

    let mut slot_order: Vec<usize> = (0..inst.slots.len()).collect();
    slot_order.sort_by(|&a, &b| {
        let (sa, sb) = (&inst.slots[a], &inst.slots[b]);
        (sa.time_index, &sa.id).cmp(&(sb.time_index, &sb.id))
    });
    let slots: Vec<SlotId> = slot_order.iter().map(|&k| inst.slots[k].id.clone()).collect();
    let capacity: Vec<u64> = slot_order.iter().map(|&k| u64::from(inst.slots[k].capacity)).collect();
    let slot_pos: BTreeMap<&SlotId, usize> = slots.iter().enumerate().map(|(k, s)| (s, k)).collect();

    let mut flight_order: Vec<usize> = (0..inst.flights.len()).collect();
    flight_order.sort_by(|&a, &b| inst.flights[a].id.cmp(&inst.flights[b].id));
    let flights = flight_order.iter().map(|&k| inst.flights[k].id.clone()).collect();
    let adjacency = flight_order
        .iter()
        .map(|&k| {
            let mut arcs: Vec<(usize, Money)> =
                inst.flights[k].delay_cost.iter().map(|(slot, &cost)| (slot_pos[slot], cost)).collect();
            arcs.sort_unstable();
            arcs
        })
        .collect();

    let dummy_demand = inst.total_capacity() - inst.flights.len() as u64;
    Ok(MatchGraph { flights, slots, capacity, adjacency, dummy_demand })
}

/// Dual values of the b-matching LP, one per node.
///
/// Feasibility: `flight + slot <= cost` on every flight edge and
/// `dummy + slot <= 1` on every dummy edge. Normalized duals have
/// `dummy == 1`, so slot potentials are the negated landing prices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPotentials {
    pub flights: BTreeMap<FlightId, i64>,
    pub slots: BTreeMap<SlotId, i64>,
    pub dummy: i64,
}

impl DualPotentials {
    pub fn is_normalized(&self) -> bool {
        self.dummy == 1
    }

    /// Dual objective `sum b_n q_n`, with the dummy's weight-1 edges included.
    pub fn objective(&self, g: &MatchGraph) -> i64 {
        let flights: i64 = self.flights.values().sum();
        let slots: i64 = g.slots.iter().zip(&g.capacity).map(|(s, &c)| c as i64 * self.slots[s]).sum();
        flights + slots + g.dummy_demand as i64 * self.dummy
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingSolution {
    pub schedule: Schedule,
    pub duals: DualPotentials,
    /// Total delay cost over flight edges (dummy edges excluded).
    pub objective: Money,
}

/// Raw solver output on indices.
pub(crate) struct IndexedSolution {
    pub assign: Vec<usize>,
    /// Landing price per slot index.
    pub prices: Vec<Money>,
    pub objective: Money,
}

const INF: i64 = i64::MAX / 4;

/// Successive shortest paths, one flight at a time in index order, leaving
/// out flight `skip`. Returns each flight's slot and the node potentials.
fn augment_all(g: &MatchGraph, skip: Option<usize>) -> Result<(Vec<Option<usize>>, Vec<i64>), Error> {
    let nf = g.flights.len();
    let ns = g.slots.len();
    // Node layout: flights, then slots, then the sink.
    let sink = nf + ns;
    let n = sink + 1;

    let mut potential = vec![0i64; n];
    let mut dist = vec![INF; n];
    // Slot node: flight that enters it on the path. Flight node: unused
    // (a flight is always reached from its current slot). Sink: slot.
    let mut parent = vec![usize::MAX; n];
    let mut assigned: Vec<Option<usize>> = vec![None; nf];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); ns];
    let mut heap = BinaryHeap::new();

    for root in (0..nf).filter(|&f| Some(f) != skip) {
        dist.fill(INF);
        parent.fill(usize::MAX);
        heap.clear();
        dist[root] = 0;
        heap.push(Reverse((0i64, root)));

        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            if u == sink {
                break;
            }
            if u < nf {
                let current = assigned[u];
                for &(s, cost) in &g.adjacency[u] {
                    if Some(s) == current {
                        continue;
                    }
                    let v = nf + s;
                    let nd = d + cost + potential[u] - potential[v];
                    if nd < dist[v] {
                        dist[v] = nd;
                        parent[v] = u;
                        heap.push(Reverse((nd, v)));
                    }
                }
            } else {
                let s = u - nf;
                if (members[s].len() as u64) < g.capacity[s] {
                    let nd = d + potential[u] - potential[sink];
                    if nd < dist[sink] {
                        dist[sink] = nd;
                        parent[sink] = s;
                        heap.push(Reverse((nd, sink)));
                    }
                }
                for &j in &members[s] {
                    let cost = g.cost(j, s).expect("member slot lies in window");
                    let nd = d - cost + potential[u] - potential[j];
                    if nd < dist[j] {
                        dist[j] = nd;
                        heap.push(Reverse((nd, j)));
                    }
                }
            }
        }

        let reach = dist[sink];
        if reach >= INF {
            return Err(Error::Infeasible(Infeasibility::Unmatchable { flight: g.flights[root].clone() }));
        }
        for (p, &d) in potential.iter_mut().zip(&dist) {
            *p += d.min(reach);
        }

        // Walk back: each slot on the path receives the flight that reached
        // it, and that flight vacates its previous slot.
        let mut s = parent[sink];
        loop {
            let f = parent[nf + s];
            let previous = assigned[f];
            assigned[f] = Some(s);
            let pos = members[s].binary_search(&f).unwrap_err();
            members[s].insert(pos, f);
            match previous {
                Some(old) => {
                    let pos = members[old].binary_search(&f).expect("flight was a member");
                    members[old].remove(pos);
                    s = old;
                }
                None => {
                    debug_assert_eq!(f, root);
                    break;
                }
            }
        }
    }

    Ok((assigned, potential))
}

pub(crate) fn solve_indexed(g: &MatchGraph) -> Result<IndexedSolution, Error> {
    let (nf, ns) = (g.flights.len(), g.slots.len());
    let sink = nf + ns;
    let (assigned, potential) = augment_all(g, None)?;
    let assign: Vec<usize> = assigned.into_iter().map(|s| s.expect("every flight assigned")).collect();
    let prices = (0..ns).map(|s| (potential[sink] - potential[nf + s]).max(0)).collect();
    let objective = assign.iter().enumerate().map(|(f, &s)| g.cost(f, s).expect("assigned within window")).sum();
    Ok(IndexedSolution { assign, prices, objective })
}

/// Optimal total delay cost with flight `f` left out.
pub(crate) fn objective_without(g: &MatchGraph, f: usize) -> Result<Money, Error> {
    let (assigned, _) = augment_all(g, Some(f))?;
    Ok(assigned.iter().enumerate().filter_map(|(j, s)| s.map(|s| g.cost(j, s).expect("assigned within window"))).sum())
}

/// Computes a minimum-weight perfect b-matching and matching duals.
///
/// The returned schedule has minimum total delay cost; the duals satisfy
/// complementary slackness with it and are normalized to a dummy potential
/// of 1.
pub fn solve_min_bmatching(g: &MatchGraph) -> Result<MatchingSolution, Error> {
    let sol = solve_indexed(g)?;
    let flights = g
        .flights
        .iter()
        .enumerate()
        .map(|(f, id)| {
            let s = sol.assign[f];
            (id.clone(), g.cost(f, s).unwrap_or(0) + sol.prices[s])
        })
        .collect();
    let slots = g.slots.iter().zip(&sol.prices).map(|(id, &p)| (id.clone(), -p)).collect();
    Ok(MatchingSolution {
        schedule: g.schedule_from(&sol.assign),
        duals: DualPotentials { flights, slots, dummy: 1 },
        objective: sol.objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Flight, Slot};

    fn contention() -> Instance {
        Instance::new(
            vec![Slot::new("s1", 1, 0), Slot::new("s2", 1, 1)],
            vec![Flight::new("f1", "A", [("s1", 0), ("s2", 10)]), Flight::new("f2", "B", [("s1", 0), ("s2", 4)])],
        )
    }

    #[test]
    fn dummy_demand_absorbs_spare_capacity() {
        let inst = Instance::new(
            vec![Slot::new("s1", 1, 0), Slot::new("s2", 2, 1)],
            vec![Flight::new("f1", "A", [("s1", 0)])],
        );
        let g = build_match_graph(&inst).unwrap();
        assert_eq!(g.b_value(Node::Dummy), 2);
        assert_eq!(g.b_value(Node::Flight(0)), 1);
        let dummy: Vec<_> = g.dummy_edges().collect();
        assert_eq!(dummy, vec![DummyEdges { slot: 0, multiplicity: 1 }, DummyEdges { slot: 1, multiplicity: 2 }]);
    }

    #[test]
    fn exact_capacity_leaves_dummy_empty() {
        let g = build_match_graph(&contention()).unwrap();
        assert_eq!(g.b_value(Node::Dummy), 0);
        assert_eq!(g.flight_edges().count(), 4);
        assert_eq!(g.dummy_edges().count(), 2);
        assert_eq!(g.b_value(Node::Slot(0)), 1);
    }

    #[test]
    fn capacity_deficit_is_infeasible() {
        let inst = Instance::new(
            vec![Slot::new("s1", 1, 0)],
            vec![Flight::new("f1", "A", [("s1", 0)]), Flight::new("f2", "A", [("s1", 0)])],
        );
        assert_eq!(
            build_match_graph(&inst),
            Err(Error::Infeasible(Infeasibility::CapacityDeficit { capacity: 1, flights: 2 }))
        );
    }

    #[test]
    fn contention_schedule() {
        let g = build_match_graph(&contention()).unwrap();
        let sol = solve_min_bmatching(&g).unwrap();
        assert_eq!(sol.objective, 4);
        assert_eq!(sol.schedule.slot_of(&"f1".into()), Some(&"s1".into()));
        assert_eq!(sol.schedule.slot_of(&"f2".into()), Some(&"s2".into()));
        assert!(sol.duals.is_normalized());
        assert_eq!(sol.duals.objective(&g), sol.objective + g.b_value(Node::Dummy) as i64);
    }

    #[test]
    fn single_flight() {
        let inst = Instance::new(vec![Slot::new("s1", 1, 0)], vec![Flight::new("f1", "A", [("s1", 0)])]);
        let sol = solve_min_bmatching(&build_match_graph(&inst).unwrap()).unwrap();
        assert_eq!(sol.objective, 0);
        assert_eq!(sol.schedule.slot_of(&"f1".into()), Some(&"s1".into()));
    }

    #[test]
    fn hall_violation_is_infeasible() {
        let inst = Instance::new(
            vec![Slot::new("s1", 1, 0), Slot::new("s2", 1, 1)],
            vec![Flight::new("f1", "A", [("s1", 0)]), Flight::new("f2", "A", [("s1", 0)])],
        );
        let g = build_match_graph(&inst).unwrap();
        assert_eq!(solve_min_bmatching(&g), Err(Error::Infeasible(Infeasibility::Unmatchable { flight: "f2".into() })));
    }

    #[test]
    fn closed_slot_gets_no_flights() {
        let inst = Instance::new(
            vec![Slot::new("s1", 0, 0), Slot::new("s2", 1, 1)],
            vec![Flight::new("f1", "A", [("s1", 0), ("s2", 7)])],
        );
        let sol = solve_min_bmatching(&build_match_graph(&inst).unwrap()).unwrap();
        assert_eq!(sol.objective, 7);
        assert!(sol.duals.slots.values().all(|&q| q <= 0));
    }

    #[test]
    fn displacement_chain() {
        // f3 can only use a; the solver must push f1 and f2 down the chain.
        let inst = Instance::new(
            vec![Slot::new("a", 1, 0), Slot::new("b", 1, 1), Slot::new("c", 1, 2)],
            vec![
                Flight::new("f1", "A", [("a", 0), ("b", 1)]),
                Flight::new("f2", "A", [("b", 0), ("c", 1)]),
                Flight::new("f3", "A", [("a", 0)]),
            ],
        );
        let sol = solve_min_bmatching(&build_match_graph(&inst).unwrap()).unwrap();
        assert_eq!(sol.objective, 2);
        assert_eq!(sol.schedule.slot_of(&"f1".into()), Some(&"b".into()));
        assert_eq!(sol.schedule.slot_of(&"f2".into()), Some(&"c".into()));
    }
}
