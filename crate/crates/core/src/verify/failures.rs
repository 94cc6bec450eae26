use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formulation::{hop_nodes, path_links, transit_nodes, Status, SurvivabilityMode};
use crate::model::NodeId;
use crate::planner::NetworkConfiguration;

/// A single failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FailureScenario {
    PhysicalLink { link: usize },
    /// Router and OXC together.
    Node { node: NodeId },
    /// One end of an MPLS-layer lightpath.
    IpOpticalInterface { node: NodeId, lightpath: usize },
}

impl fmt::Display for FailureScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureScenario::PhysicalLink { link } => write!(f, "link {link}"),
            FailureScenario::Node { node } => write!(f, "node {node}"),
            FailureScenario::IpOpticalInterface { node, lightpath } => write!(f, "interface {node}/lp{lightpath}"),
        }
    }
}

/// Every link, then every node, then both interfaces of each MPLS-layer
/// lightpath.
pub fn enumerate_failures(cfg: &NetworkConfiguration) -> Vec<FailureScenario> {
    let mut v: Vec<FailureScenario> =
        (0..cfg.topology.link_count()).map(|link| FailureScenario::PhysicalLink { link }).collect();
    v.extend((0..cfg.topology.node_count()).map(|node| FailureScenario::Node { node }));
    for l in &cfg.lightpaths {
        v.push(FailureScenario::IpOpticalInterface { node: l.key.i, lightpath: l.id });
        v.push(FailureScenario::IpOpticalInterface { node: l.key.j, lightpath: l.id });
    }
    v
}

/// The status of each network element under one scenario.
pub(crate) struct FailureView<'a> {
    cfg: &'a NetworkConfiguration,
    scenario: FailureScenario,
}

impl<'a> FailureView<'a> {
    pub(crate) fn new(cfg: &'a NetworkConfiguration, scenario: FailureScenario) -> Self {
        FailureView { cfg, scenario }
    }

    fn route_hit(&self, route: &[NodeId]) -> bool {
        match self.scenario {
            FailureScenario::PhysicalLink { link } => path_links(&self.cfg.topology, route).contains(&link),
            FailureScenario::Node { node } => route.contains(&node),
            FailureScenario::IpOpticalInterface { .. } => false,
        }
    }

    /// MPLS-layer lightpath is down.
    pub(crate) fn lightpath_failed(&self, id: usize) -> bool {
        match self.scenario {
            FailureScenario::IpOpticalInterface { lightpath, .. } => lightpath == id,
            _ => self.route_hit(&self.cfg.lightpaths[id].route),
        }
    }

    /// Down for a reason its protection lightpath can cover: a fiber, a
    /// transit OXC or an interface. An endpoint router failure cannot be.
    pub(crate) fn optically_recoverable(&self, id: usize) -> bool {
        let l = &self.cfg.lightpaths[id];
        self.lightpath_failed(id) && !matches!(self.scenario, FailureScenario::Node { node } if l.key.touches(node))
    }

    /// Protection lightpath of MPLS-layer lightpath `id` exists and survives.
    pub(crate) fn protection_intact(&self, id: usize) -> Option<usize> {
        let p = self.cfg.lightpaths[id].protection?;
        (!self.route_hit(&self.cfg.protection_lightpaths[p].route)).then_some(p)
    }

    pub(crate) fn node_failed(&self) -> Option<NodeId> {
        match self.scenario {
            FailureScenario::Node { node } => Some(node),
            _ => None,
        }
    }

    pub(crate) fn is_interface(&self) -> bool {
        matches!(self.scenario, FailureScenario::IpOpticalInterface { .. })
    }
}

/// How an affected working LSP fares under one scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Outcome {
    Exempt,
    Uncovered,
    Recovered {
        /// Protection lightpaths switched in.
        protection_lightpaths: BTreeSet<usize>,
        /// Protection-LSP lightpaths the LSP now needs.
        spare_lightpaths: BTreeSet<usize>,
    },
    Failed,
}

pub(crate) fn working_lightpaths(cfg: &NetworkConfiguration, lsp: usize) -> Vec<usize> {
    cfg.lsps[lsp]
        .working
        .iter()
        .filter_map(|h| cfg.lightpath(Status::Working, h.key()).map(|l| l.id))
        .collect()
}

fn protection_route_lightpaths(cfg: &NetworkConfiguration, lsp: usize) -> Option<Vec<usize>> {
    let r = cfg.lsps[lsp].protection.as_ref()?;
    r.iter().map(|h| cfg.lightpath(Status::Protection, h.key()).map(|l| l.id)).collect()
}

/// `None` when the LSP is not affected.
pub(crate) fn lsp_outcome(view: &FailureView<'_>, lsp: usize) -> Option<Outcome> {
    let cfg = view.cfg;
    let l = &cfg.lsps[lsp];
    let wl = working_lightpaths(cfg, lsp);
    let failed: Vec<usize> = wl.iter().copied().filter(|&id| view.lightpath_failed(id)).collect();
    if failed.is_empty() {
        return None;
    }
    if view.node_failed().is_some_and(|n| n == l.source || n == l.destination) {
        return Some(Outcome::Exempt);
    }
    let mode = cfg.mode;
    if !mode.is_protected() {
        return Some(Outcome::Uncovered);
    }
    let logical_transit = transit_nodes(&hop_nodes(&l.working));
    let mpls = !mode.is_multilayer()
        || view.node_failed().is_some_and(|n| logical_transit.contains(&n))
        || (view.is_interface() && l.is_multi_hop());
    let mut used_plp = BTreeSet::new();
    let mut used_spare = BTreeSet::new();
    if mpls {
        let Some(route) = protection_route_lightpaths(cfg, lsp) else { return Some(Outcome::Failed) };
        for id in route {
            used_spare.insert(id);
            if !view.lightpath_failed(id) {
                continue;
            }
            let fallback = mode == SurvivabilityMode::MlDoubleProtection && view.optically_recoverable(id);
            match view.protection_intact(id).filter(|_| fallback) {
                Some(p) => {
                    used_plp.insert(p);
                }
                None => return Some(Outcome::Failed),
            }
        }
    } else {
        for id in failed {
            match view.protection_intact(id).filter(|_| view.optically_recoverable(id)) {
                Some(p) => {
                    used_plp.insert(p);
                }
                None => return Some(Outcome::Failed),
            }
        }
    }
    Some(Outcome::Recovered { protection_lightpaths: used_plp, spare_lightpaths: used_spare })
}
