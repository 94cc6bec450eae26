//! Design of minimum-cost survivable packet-over-optical (MPLS over OTN)
//! networks.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: physical topologies, traffic, system parameters and the cost model.
//! - [`milp`]: a small mixed binary linear programming engine (bounded primal
//!   simplex + best-bound branch and bound) and an LP text format writer/reader.
//! - [`formulation`]: node-arc integer programs for logical topology design,
//!   LSP routing and lightpath routing, built per planning phase.
//! - [`planner`]: the survivability pipelines (sequential and integrated) that
//!   chain the phases, apply interlayer backup resource sharing and price the result.
//! - [`verify`]: failure enumeration, restorability and disjointness checks and a
//!   brute-force optimum for tiny instances.
//! - [`report`]: comparison tables in text, CSV and JSON.

pub mod error;
pub mod formulation;
pub mod milp;
pub mod model;
pub mod planner;
pub mod report;
pub mod verify;

pub use error::{Error, Result};

pub use formulation::{Approach, ProblemInstance, SurvivabilityMode};
pub use model::{derive_unit_costs, CostRatios, Instance, InstanceFile, PhysicalTopology, SystemParams, UnitCosts};
pub use planner::{plan, plan_with, total_cost, CostBreakdown, EngineKind, NetworkConfiguration, PlanOptions};
pub use report::{Report, ReportColumn, ReportFormat};
pub use verify::{brute_force_optimum, check_disjointness, check_restorability, enumerate_failures};
