use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formulation::{hop_nodes, path_links, transit_nodes, Hop, Status, SurvivabilityMode};
use crate::model::NodeId;
use crate::planner::{total_cost, NetworkConfiguration};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisjointnessRule {
    /// Working and protection LSP share a lightpath.
    LogicalLink,
    /// Working and protection LSP share a router other than their endpoints.
    LogicalNode,
    /// Their physical routes share a node other than their endpoints.
    PhysicalNode,
    /// Their physical routes share a fiber.
    PhysicalLink,
    /// A protection lightpath touches a transit OXC of the lightpath it protects.
    LightpathNode,
    /// A protection lightpath shares a fiber with the lightpath it protects.
    LightpathLink,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointnessViolation {
    pub rule: DisjointnessRule,
    /// LSP id or MPLS-layer lightpath id, depending on the rule.
    pub subject: usize,
    /// Shared nodes, links or lightpath ids.
    pub shared: Vec<usize>,
}

impl fmt::Display for DisjointnessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} on {} shares {:?}", self.rule, self.subject, self.shared)
    }
}

struct Footprint {
    lightpaths: BTreeSet<usize>,
    nodes: BTreeSet<NodeId>,
    links: BTreeSet<usize>,
}

fn footprint(cfg: &NetworkConfiguration, route: &[Hop], status: Status) -> Footprint {
    let mut fp = Footprint { lightpaths: BTreeSet::new(), nodes: BTreeSet::new(), links: BTreeSet::new() };
    for h in route {
        if let Some(lp) = cfg.lightpath(status, h.key()) {
            fp.lightpaths.insert(lp.id);
            fp.nodes.extend(lp.route.iter().copied());
            fp.links.extend(path_links(&cfg.topology, &lp.route));
        }
    }
    fp
}

/// Literal set intersections of route elements, per the mode's rules.
pub fn check_disjointness(cfg: &NetworkConfiguration) -> Vec<DisjointnessViolation> {
    let mode = cfg.mode;
    let mut out = Vec::new();
    let mut push = |rule, subject, shared: BTreeSet<usize>| {
        if !shared.is_empty() {
            out.push(DisjointnessViolation { rule, subject, shared: shared.into_iter().collect() });
        }
    };
    for l in &cfg.lsps {
        let Some(p) = &l.protection else { continue };
        let ends = BTreeSet::from([l.source, l.destination]);
        let w = footprint(cfg, &l.working, Status::Working);
        let pf = footprint(cfg, p, Status::Protection);
        push(DisjointnessRule::LogicalLink, l.id, w.lightpaths.intersection(&pf.lightpaths).copied().collect());
        let wl: BTreeSet<NodeId> = hop_nodes(&l.working).into_iter().collect();
        let pl: BTreeSet<NodeId> = hop_nodes(p).into_iter().collect();
        push(DisjointnessRule::LogicalNode, l.id, wl.intersection(&pl).filter(|n| !ends.contains(n)).copied().collect());
        let physical = matches!(
            mode,
            SurvivabilityMode::SingleLayer | SurvivabilityMode::MlSpareUnprotected | SurvivabilityMode::MlInterlayerBrs
        );
        if physical {
            push(DisjointnessRule::PhysicalNode, l.id, w.nodes.intersection(&pf.nodes).filter(|n| !ends.contains(n)).copied().collect());
        }
        if mode == SurvivabilityMode::SingleLayer {
            push(DisjointnessRule::PhysicalLink, l.id, w.links.intersection(&pf.links).copied().collect());
        }
    }
    for p in &cfg.protection_lightpaths {
        let lp = &cfg.lightpaths[p.protects];
        let transit = transit_nodes(&lp.route);
        let pnodes: BTreeSet<NodeId> = p.route.iter().copied().collect();
        push(DisjointnessRule::LightpathNode, lp.id, transit.intersection(&pnodes).copied().collect());
        let wl: BTreeSet<usize> = path_links(&cfg.topology, &lp.route).into_iter().collect();
        let pl: BTreeSet<usize> = path_links(&cfg.topology, &p.route).into_iter().collect();
        push(DisjointnessRule::LightpathLink, lp.id, wl.intersection(&pl).copied().collect());
    }
    out
}

fn valid_path(cfg: &NetworkConfiguration, route: &[NodeId], from: NodeId, to: NodeId) -> bool {
    let distinct: BTreeSet<_> = route.iter().collect();
    route.len() >= 2
        && route.first() == Some(&from)
        && route.last() == Some(&to)
        && distinct.len() == route.len()
        && route.windows(2).all(|w| cfg.topology.link_index(w[0], w[1]).is_some())
}

fn valid_hops(route: &[Hop], from: NodeId, to: NodeId) -> bool {
    let nodes = hop_nodes(route);
    let distinct: BTreeSet<_> = nodes.iter().collect();
    !route.is_empty()
        && nodes.first() == Some(&from)
        && nodes.last() == Some(&to)
        && distinct.len() == nodes.len()
        && route.windows(2).all(|w| w[0].to == w[1].from)
}

/// Capacity, wavelength, interface, parallel-lightpath, route and status
/// checks, plus agreement of the stored derived fields with the routes.
pub fn check_consistency(cfg: &NetworkConfiguration) -> Vec<String> {
    let mut v = Vec::new();
    let p = &cfg.params;
    let mut load: BTreeMap<usize, f64> = BTreeMap::new();
    for l in &cfg.lsps {
        if !valid_hops(&l.working, l.source, l.destination) {
            v.push(format!("LSP {} working route is not a simple path from {} to {}", l.id, l.source, l.destination));
        }
        for h in &l.working {
            match cfg.lightpath(Status::Working, h.key()) {
                Some(lp) => *load.entry(lp.id).or_default() += l.bandwidth,
                None => v.push(format!("LSP {} working hop {}-{} has no working lightpath", l.id, h.from, h.to)),
            }
        }
        if let Some(r) = &l.protection {
            if !valid_hops(r, l.source, l.destination) {
                v.push(format!("LSP {} protection route is not a simple path", l.id));
            }
            for h in r {
                match cfg.lightpath(Status::Protection, h.key()) {
                    Some(lp) => *load.entry(lp.id).or_default() += l.bandwidth,
                    None => v.push(format!("LSP {} protection hop {}-{} has no protection lightpath", l.id, h.from, h.to)),
                }
            }
        }
        let want = match cfg.mode {
            SurvivabilityMode::None => false,
            SurvivabilityMode::SingleLayer => true,
            _ => l.is_multi_hop(),
        };
        if want != l.protection.is_some() {
            v.push(format!("LSP {} protection route presence does not match mode {}", l.id, cfg.mode));
        }
    }
    let mut degree = vec![0usize; cfg.topology.node_count()];
    let mut parallel: BTreeMap<(Status, NodeId, NodeId), usize> = BTreeMap::new();
    for lp in &cfg.lightpaths {
        let ld = load.get(&lp.id).copied().unwrap_or(0.0);
        if ld > p.capacity + 1e-9 {
            v.push(format!("lightpath {} carries {ld} Gbps above C = {}", lp.id, p.capacity));
        }
        if (ld - lp.load).abs() > 1e-9 {
            v.push(format!("lightpath {} stored load {} differs from routed {ld}", lp.id, lp.load));
        }
        if !valid_path(cfg, &lp.route, lp.key.i, lp.key.j) {
            v.push(format!("lightpath {} route {:?} is not a physical path between {} and {}", lp.id, lp.route, lp.key.i, lp.key.j));
        }
        if lp.key.q == 0 || lp.key.q > p.max_parallel {
            v.push(format!("lightpath {} index q = {} outside 1..={}", lp.id, lp.key.q, p.max_parallel));
        }
        degree[lp.key.i] += 1;
        degree[lp.key.j] += 1;
        *parallel.entry((lp.status, lp.key.i, lp.key.j)).or_default() += 1;
    }
    for (n, d) in degree.iter().enumerate() {
        if *d > p.max_interfaces {
            v.push(format!("node {n} terminates {d} lightpaths above T = {}", p.max_interfaces));
        }
    }
    for ((s, i, j), c) in parallel {
        if c > p.max_parallel {
            v.push(format!("{c} {s:?} lightpaths between {i} and {j} exceed Q = {}", p.max_parallel));
        }
    }
    for pl in &cfg.protection_lightpaths {
        let lp = &cfg.lightpaths[pl.protects];
        if !valid_path(cfg, &pl.route, lp.key.i, lp.key.j) {
            v.push(format!("protection lightpath {} route {:?} is not a physical path", pl.id, pl.route));
        }
        let want = cfg.mode.is_multilayer() && (lp.status == Status::Working || cfg.mode == SurvivabilityMode::MlDoubleProtection);
        if !want {
            v.push(format!("protection lightpath {} guards lightpath {} which the mode leaves unprotected", pl.id, lp.id));
        }
    }
    if cfg.mode.is_multilayer() {
        for lp in &cfg.lightpaths {
            let want = lp.status == Status::Working || cfg.mode == SurvivabilityMode::MlDoubleProtection;
            if want && lp.protection.is_none() {
                v.push(format!("lightpath {} has no protection lightpath", lp.id));
            }
        }
    }
    for u in &cfg.link_usage {
        if u.total > p.wavelengths {
            v.push(format!("link {} uses {} wavelengths above W = {}", u.link, u.total, p.wavelengths));
        }
    }
    let recomputed = total_cost(cfg);
    if (recomputed.total - cfg.cost.total).abs() > 1e-6 {
        v.push(format!("stored total cost {} differs from recomputed {}", cfg.cost.total, recomputed.total));
    }
    v
}
