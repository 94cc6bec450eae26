//! Domain model: physical topology, traffic, system parameters and costs.

mod cost;
mod instance;
mod params;
mod topology;
mod traffic;

pub use cost::{derive_unit_costs, CostLabel, CostRatios, UnitCosts};
pub use instance::{CostRatioSpec, DemandRecord, Instance, InstanceFile, NodeLabel, ParamsRecord};
pub use params::SystemParams;
pub use topology::{
    average_connectivity, generate_topology, validate_topology, Link, NodeId, PhysicalTopology,
    TopologyReport, TopologyViolation,
};
pub use traffic::{random_demands, split_demands, Demand, LspDemand};

/// Absolute tolerance used when comparing bandwidths and costs.
pub const EPS: f64 = 1e-9;
