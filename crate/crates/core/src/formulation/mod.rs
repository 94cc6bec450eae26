//! Node-arc integer programs for each planning phase.
//!
//! Every phase is described by a plain-data spec ([`LogicalPhase`],
//! [`RoutingPhase`], [`IntegratedPhase`]) that the planner assembles. Builders
//! turn a spec into a [`MilpModel`] plus a [`DecisionVarMap`], and decoders turn
//! solver values back into routes.

mod exclusion;
mod integrated;
mod logical;
mod routing;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::milp::{MilpModel, VarId};
use crate::model::{Instance, LspDemand, NodeId, PhysicalTopology, SystemParams, UnitCosts};

pub use exclusion::{compute_exclusion_sets, protection_lightpath_exclusion, ExclusionSets, WorkingDesign};
pub use integrated::{build_integrated, decode_integrated, encode_integrated};
pub use logical::{build_logical_design, decode_logical, encode_logical};
pub use routing::{build_lightpath_routing, decode_routing, encode_routing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurvivabilityMode {
    None,
    SingleLayer,
    MlDoubleProtection,
    MlSpareUnprotected,
    MlInterlayerBrs,
}

impl SurvivabilityMode {
    pub const ALL: [SurvivabilityMode; 5] = [
        SurvivabilityMode::None,
        SurvivabilityMode::SingleLayer,
        SurvivabilityMode::MlDoubleProtection,
        SurvivabilityMode::MlSpareUnprotected,
        SurvivabilityMode::MlInterlayerBrs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SurvivabilityMode::None => "none",
            SurvivabilityMode::SingleLayer => "single-layer",
            SurvivabilityMode::MlDoubleProtection => "ml-double-protection",
            SurvivabilityMode::MlSpareUnprotected => "ml-spare-unprotected",
            SurvivabilityMode::MlInterlayerBrs => "ml-interlayer-brs",
        }
    }

    pub fn is_multilayer(self) -> bool {
        matches!(
            self,
            SurvivabilityMode::MlDoubleProtection | SurvivabilityMode::MlSpareUnprotected | SurvivabilityMode::MlInterlayerBrs
        )
    }

    pub fn is_protected(self) -> bool {
        self != SurvivabilityMode::None
    }

    /// Short column label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            SurvivabilityMode::None => "Unprotected",
            SurvivabilityMode::SingleLayer => "Single layer",
            SurvivabilityMode::MlDoubleProtection => "Double protection",
            SurvivabilityMode::MlSpareUnprotected => "LSP spare unprotected",
            SurvivabilityMode::MlInterlayerBrs => "Interlayer BRS",
        }
    }
}

impl fmt::Display for SurvivabilityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SurvivabilityMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Instance(format!("unknown survivability mode `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Approach {
    Sequential,
    Integrated,
}

impl Approach {
    pub fn as_str(self) -> &'static str {
        match self {
            Approach::Sequential => "sequential",
            Approach::Integrated => "integrated",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Approach {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sequential" => Ok(Approach::Sequential),
            "integrated" => Ok(Approach::Integrated),
            _ => Err(Error::Instance(format!("unknown approach `{s}`"))),
        }
    }
}

/// Working or protection status of an LSP or of an MPLS-layer lightpath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Working,
    Protection,
}

impl Status {
    pub fn prefix(self) -> char {
        match self {
            Status::Working => 'w',
            Status::Protection => 'p',
        }
    }
}

/// The q-th lightpath of one status between nodes `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LightpathKey {
    pub i: NodeId,
    pub j: NodeId,
    pub q: usize,
}

impl LightpathKey {
    pub fn new(a: NodeId, b: NodeId, q: usize) -> Self {
        LightpathKey { i: a.min(b), j: a.max(b), q }
    }

    pub fn touches(&self, n: NodeId) -> bool {
        self.i == n || self.j == n
    }
}

impl fmt::Display for LightpathKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}_{}", self.i, self.j, self.q)
    }
}

/// One traversal of a lightpath by an LSP, in the LSP's direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Hop {
    pub from: NodeId,
    pub to: NodeId,
    pub q: usize,
}

impl Hop {
    pub fn key(&self) -> LightpathKey {
        LightpathKey::new(self.from, self.to, self.q)
    }
}

/// Nodes visited by a hop sequence, source first.
pub fn hop_nodes(hops: &[Hop]) -> Vec<NodeId> {
    let mut v = Vec::with_capacity(hops.len() + 1);
    if let Some(h) = hops.first() {
        v.push(h.from);
    }
    v.extend(hops.iter().map(|h| h.to));
    v
}

/// Inner nodes of a node sequence.
pub fn transit_nodes(path: &[NodeId]) -> BTreeSet<NodeId> {
    if path.len() <= 2 {
        BTreeSet::new()
    } else {
        path[1..path.len() - 1].iter().copied().collect()
    }
}

/// Link indices along a physical node sequence.
pub fn path_links(topology: &PhysicalTopology, path: &[NodeId]) -> Vec<usize> {
    path.windows(2)
        .map(|w| topology.link_index(w[0], w[1]).expect("path follows physical links"))
        .collect()
}

/// Everything a phase needs to know about the design problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub topology: PhysicalTopology,
    pub traffic: Vec<LspDemand>,
    pub params: SystemParams,
    pub costs: UnitCosts,
    pub mode: SurvivabilityMode,
    pub approach: Approach,
}

impl ProblemInstance {
    pub fn new(
        topology: PhysicalTopology,
        traffic: Vec<LspDemand>,
        params: SystemParams,
        costs: UnitCosts,
        mode: SurvivabilityMode,
        approach: Approach,
    ) -> Result<Self> {
        params.check().map_err(Error::Instance)?;
        let n = topology.node_count();
        for l in &traffic {
            if l.source >= n || l.destination >= n || l.source == l.destination {
                return Err(Error::Instance(format!("LSP {} has invalid endpoints {}-{}", l.id, l.source, l.destination)));
            }
            if l.bandwidth > params.capacity + 1e-9 {
                return Err(Error::Instance(format!(
                    "LSP {} needs {} Gbps, above the lightpath capacity {}; split demands first",
                    l.id, l.bandwidth, params.capacity
                )));
            }
            if !(l.bandwidth > 0.0) {
                return Err(Error::Instance(format!("LSP {} has non-positive bandwidth", l.id)));
            }
        }
        for (k, l) in traffic.iter().enumerate() {
            if l.id != k {
                return Err(Error::Instance(format!("LSP ids must be 0..K in order; position {k} holds {}", l.id)));
            }
        }
        let mut topology = topology;
        topology.wavelengths = params.wavelengths;
        Ok(ProblemInstance { topology, traffic, params, costs, mode, approach })
    }

    pub fn from_instance(instance: &Instance, mode: SurvivabilityMode, approach: Approach) -> Result<Self> {
        Self::new(
            instance.topology.clone(),
            instance.lsps.clone(),
            instance.params,
            instance.unit_costs(),
            mode,
            approach,
        )
    }

    pub fn node_count(&self) -> usize {
        self.topology.node_count()
    }
}

/// An LSP as seen by one logical phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseLsp {
    /// Index into the instance traffic.
    pub lsp: usize,
    pub source: NodeId,
    pub destination: NodeId,
    pub bandwidth: f64,
    /// Nodes the route may not visit (never the endpoints).
    pub excluded: BTreeSet<NodeId>,
}

/// "These LSPs may not all ride one lightpath between `i` and `j`."
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Nogood {
    pub i: NodeId,
    pub j: NodeId,
    /// Phase LSP indices.
    pub lsps: Vec<usize>,
}

/// Logical topology design plus LSP routing for one status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogicalPhase {
    pub status: Status,
    pub nodes: usize,
    pub lsps: Vec<PhaseLsp>,
    pub capacity: f64,
    pub max_parallel: usize,
    /// Interfaces still available per node.
    pub degree_budget: Vec<usize>,
    pub lightpath_cost: f64,
    pub transit_cost: f64,
    pub nogoods: Vec<Nogood>,
}

impl LogicalPhase {
    /// Step I: working logical design over all LSPs.
    pub fn working(instance: &ProblemInstance) -> Self {
        LogicalPhase {
            status: Status::Working,
            nodes: instance.node_count(),
            lsps: instance
                .traffic
                .iter()
                .map(|l| PhaseLsp {
                    lsp: l.id,
                    source: l.source,
                    destination: l.destination,
                    bandwidth: l.bandwidth,
                    excluded: BTreeSet::new(),
                })
                .collect(),
            capacity: instance.params.capacity,
            max_parallel: instance.params.max_parallel,
            degree_budget: vec![instance.params.max_interfaces; instance.node_count()],
            lightpath_cost: instance.costs.lightpath,
            transit_cost: instance.costs.transit_per_gbps,
            nogoods: Vec::new(),
        }
    }

    /// Candidate lightpath keys in canonical order.
    pub fn keys(&self) -> Vec<LightpathKey> {
        let mut v = Vec::new();
        for i in 0..self.nodes {
            for j in i + 1..self.nodes {
                for q in 1..=self.max_parallel {
                    v.push(LightpathKey { i, j, q });
                }
            }
        }
        v
    }

    /// Directed logical arcs usable by phase LSP `k`, in canonical order.
    pub fn arcs_for(&self, k: usize) -> Vec<Hop> {
        let ex = &self.lsps[k].excluded;
        let mut v = Vec::new();
        for from in 0..self.nodes {
            for to in 0..self.nodes {
                if from == to || ex.contains(&from) || ex.contains(&to) {
                    continue;
                }
                for q in 1..=self.max_parallel {
                    v.push(Hop { from, to, q });
                }
            }
        }
        v
    }

    /// Objective constant that turns per-hop transit charges into Σ b(hops - 1).
    pub fn transit_offset(&self) -> f64 {
        -self.transit_cost * self.lsps.iter().map(|l| l.bandwidth).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogicalSolution {
    /// Opened lightpaths, sorted.
    pub lightpaths: Vec<LightpathKey>,
    /// Route per phase LSP.
    pub routes: Vec<Vec<Hop>>,
}

impl LogicalSolution {
    pub fn transit(&self, phase: &LogicalPhase) -> f64 {
        self.routes
            .iter()
            .zip(&phase.lsps)
            .map(|(r, l)| l.bandwidth * (r.len().saturating_sub(1)) as f64)
            .sum()
    }

    pub fn objective(&self, phase: &LogicalPhase) -> f64 {
        phase.lightpath_cost * self.lightpaths.len() as f64 + phase.transit_cost * self.transit(phase)
    }
}

/// One lightpath to place on the physical topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteRequest {
    /// Used in variable names, e.g. `wlam_<label>_m_n`.
    pub label: String,
    pub source: NodeId,
    pub destination: NodeId,
    pub excluded_nodes: BTreeSet<NodeId>,
    pub excluded_links: BTreeSet<usize>,
}

/// Physical routing of a batch of lightpaths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingPhase {
    /// `wlam` for MPLS-layer lightpaths, `plam` for protection lightpaths.
    pub prefix: String,
    pub requests: Vec<RouteRequest>,
    /// Wavelengths still free per link.
    pub residual: Vec<usize>,
    pub wavelength_cost: f64,
}

impl RoutingPhase {
    pub fn arcs_for(&self, topology: &PhysicalTopology, r: usize) -> Vec<(NodeId, NodeId, usize)> {
        let req = &self.requests[r];
        topology
            .arcs()
            .into_iter()
            .filter(|&(m, n, e)| {
                !req.excluded_links.contains(&e) && !req.excluded_nodes.contains(&m) && !req.excluded_nodes.contains(&n)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingSolution {
    /// Node sequence per request, source first.
    pub paths: Vec<Vec<NodeId>>,
}

impl RoutingSolution {
    pub fn wavelength_links(&self) -> usize {
        self.paths.iter().map(|p| p.len().saturating_sub(1)).sum()
    }
}

/// Physical restrictions applied to any lightpath that carries a given LSP.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CarrierExclusion {
    pub nodes: BTreeSet<NodeId>,
    pub links: BTreeSet<usize>,
}

/// Logical design and lightpath routing solved as one program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratedPhase {
    pub logical: LogicalPhase,
    pub residual: Vec<usize>,
    pub wavelength_cost: f64,
    /// Per phase LSP; empty sets for the working phase.
    pub carrier_exclusions: Vec<CarrierExclusion>,
}

impl IntegratedPhase {
    /// Working design over all LSPs on an empty network.
    pub fn working(instance: &ProblemInstance) -> Self {
        IntegratedPhase {
            logical: LogicalPhase::working(instance),
            residual: vec![instance.params.wavelengths; instance.topology.link_count()],
            wavelength_cost: instance.costs.wavelength,
            carrier_exclusions: Vec::new(),
        }
    }

    pub fn prefix(&self) -> &'static str {
        match self.logical.status {
            Status::Working => "wlam",
            Status::Protection => "wlamp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratedSolution {
    pub logical: LogicalSolution,
    /// Physical route per entry of `logical.lightpaths`.
    pub paths: Vec<Vec<NodeId>>,
}

/// Semantic index to variable id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecisionVarMap {
    pub beta: BTreeMap<LightpathKey, VarId>,
    /// (phase LSP, directed hop)
    pub delta: BTreeMap<(usize, Hop), VarId>,
    /// (request, from, to) for sequential lightpath routing.
    pub lambda: BTreeMap<(usize, NodeId, NodeId), VarId>,
    /// (lightpath, from, to) for integrated routing.
    pub lambda_integrated: BTreeMap<(LightpathKey, NodeId, NodeId), VarId>,
}

impl DecisionVarMap {
    pub fn len(&self) -> usize {
        self.beta.len() + self.delta.len() + self.lambda.len() + self.lambda_integrated.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Closed-form size estimates for the routing variables of one phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeEstimate {
    pub nodes: usize,
    pub lsps: usize,
    pub max_parallel: usize,
    pub links: usize,
    pub approach: Approach,
    pub variables: u64,
}

/// q·N²·K/2 for the sequential approach, q·N²·(K/2 + E) for the integrated one.
pub fn estimate_problem_size(nodes: usize, lsps: usize, max_parallel: usize, links: usize, approach: Approach) -> SizeEstimate {
    let base = (max_parallel * nodes * nodes) as u64;
    let variables = match approach {
        Approach::Sequential => base * lsps as u64 / 2,
        Approach::Integrated => base * (lsps as u64 + 2 * links as u64) / 2,
    };
    SizeEstimate { nodes, lsps, max_parallel, links, approach, variables }
}

/// Per-family constraint counts and variable totals of a model.
pub fn audit(model: &MilpModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("model {}\n", model.name));
    out.push_str(&format!("variables {} (binary {})\n", model.variables.len(), model.num_binaries()));
    out.push_str(&format!("constraints {}\n", model.constraints.len()));
    for (family, count) in model.family_counts() {
        out.push_str(&format!("  {family:<8} {count}\n"));
    }
    out
}
