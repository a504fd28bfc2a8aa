//! Multi-airport rolling-horizon scenario files.
//!
//! ```json
//! {
//!   "airports": [
//!     {"id": "ATL", "rounds": [
//!       {"timestamp": 0, "slots": [...], "flights": [...]}
//!     ]}
//!   ],
//!   "connections": [{"flight": "g1", "feeder": "f1"}]
//! }
//! ```
//!
//! `slots` and `flights` use the single-airport schema. `connections`
//! (optional) feed the built-in delay-propagation hook.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use slotmarket_core::horizon::{AirportId, Round, WindowedScenario};
use slotmarket_core::{Flight, FlightId, Instance, Slot};

use crate::scenario::{from_json, read_file, ScenarioError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundFile {
    pub timestamp: u64,
    pub slots: Vec<Slot>,
    #[serde(default)]
    pub flights: Vec<Flight>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AirportFile {
    pub id: AirportId,
    pub rounds: Vec<RoundFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Connection {
    pub flight: FlightId,
    pub feeder: FlightId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowedFile {
    pub airports: Vec<AirportFile>,
    #[serde(default)]
    pub connections: Vec<Connection>,
}

impl WindowedFile {
    /// Core scenario plus the flight -> feeder map.
    pub fn into_scenario(self) -> Result<(WindowedScenario, BTreeMap<FlightId, FlightId>), ScenarioError> {
        let mut airports = BTreeMap::new();
        for (k, airport) in self.airports.into_iter().enumerate() {
            let rounds = airport
                .rounds
                .into_iter()
                .map(|r| Round { timestamp: r.timestamp, instance: Instance::new(r.slots, r.flights) })
                .collect();
            if airports.insert(airport.id.clone(), rounds).is_some() {
                return Err(ScenarioError::Parse {
                    path: format!("airports[{k}].id"),
                    message: format!("duplicate airport id {}", airport.id),
                });
            }
        }
        let feeders = self.connections.into_iter().map(|c| (c.flight, c.feeder)).collect();
        Ok((WindowedScenario { airports }, feeders))
    }
}

pub fn load_windowed(path: &Path) -> Result<(WindowedScenario, BTreeMap<FlightId, FlightId>), ScenarioError> {
    from_json::<WindowedFile>(&read_file(path)?)?.into_scenario()
}
