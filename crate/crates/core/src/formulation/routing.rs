use std::collections::BTreeMap;

use super::{DecisionVarMap, RoutingPhase, RoutingSolution};
use crate::error::{Error, Result};
use crate::milp::{MilpModel, Relation, VarId};
use crate::model::{NodeId, PhysicalTopology};

/// Directed physical arcs in (from, to) order.
pub(crate) fn sorted_arcs(topology: &PhysicalTopology) -> Vec<(NodeId, NodeId, usize)> {
    let mut arcs = topology.arcs();
    arcs.sort();
    arcs
}

/// Lightpath routing over physical links with per-link wavelength limits.
///
/// Excluded nodes lose their arcs; excluded links stay as variables pinned
/// to zero by `Eq16` rows so the disjointness requirement is visible in the
/// model.
pub fn build_lightpath_routing(topology: &PhysicalTopology, phase: &RoutingPhase) -> Result<(MilpModel, DecisionVarMap)> {
    if phase.residual.len() != topology.link_count() {
        return Err(Error::Model(format!(
            "residual wavelengths given for {} links, topology has {}",
            phase.residual.len(),
            topology.link_count()
        )));
    }
    let flow_tag = if phase.prefix == "plam" { "Eq15" } else { "Eq14" };
    let mut model = MilpModel::new(format!("routing-{}", phase.prefix));
    let mut map = DecisionVarMap::default();
    let arcs = sorted_arcs(topology);
    let mut arc_link = BTreeMap::new();
    for (r, req) in phase.requests.iter().enumerate() {
        if req.excluded_nodes.contains(&req.source) || req.excluded_nodes.contains(&req.destination) {
            return Err(Error::Model(format!("lightpath {} excludes one of its own endpoints", req.label)));
        }
        for &(m, n, e) in &arcs {
            if req.excluded_nodes.contains(&m) || req.excluded_nodes.contains(&n) {
                continue;
            }
            let id = model.add_binary(format!("{}_{}_{m}_{n}", phase.prefix, req.label), phase.wavelength_cost);
            map.lambda.insert((r, m, n), id);
            arc_link.insert(id, e);
        }
    }

    for (r, req) in phase.requests.iter().enumerate() {
        let mut rows: BTreeMap<NodeId, Vec<(VarId, f64)>> = BTreeMap::new();
        for n in 0..topology.node_count() {
            if !req.excluded_nodes.contains(&n) {
                rows.insert(n, Vec::new());
            }
        }
        let mut on_link: BTreeMap<usize, Vec<(VarId, f64)>> = BTreeMap::new();
        for (&(rr, m, n), &id) in map.lambda.range((r, 0, 0)..) {
            if rr != r {
                break;
            }
            rows.get_mut(&m).expect("tail kept").push((id, 1.0));
            rows.get_mut(&n).expect("head kept").push((id, -1.0));
            on_link.entry(arc_link[&id]).or_default().push((id, 1.0));
        }
        for (n, terms) in rows {
            let rhs = if n == req.source {
                1.0
            } else if n == req.destination {
                -1.0
            } else {
                0.0
            };
            model.add_constraint(format!("lflow_{}_{}_{n}", phase.prefix, req.label), flow_tag, terms, Relation::Eq, rhs);
        }
        for &e in &req.excluded_links {
            if let Some(terms) = on_link.remove(&e) {
                model.add_constraint(format!("disj_{}_{}_{e}", phase.prefix, req.label), "Eq16", terms, Relation::Le, 0.0);
            }
        }
    }

    let mut per_link: BTreeMap<usize, Vec<(VarId, f64)>> = BTreeMap::new();
    for &id in map.lambda.values() {
        per_link.entry(arc_link[&id]).or_default().push((id, 1.0));
    }
    for (e, terms) in per_link {
        model.add_constraint(format!("wl_{}_{e}", phase.prefix), "Eq17", terms, Relation::Le, phase.residual[e] as f64);
    }
    Ok((model, map))
}

pub(crate) fn trace_physical(label: &str, source: NodeId, destination: NodeId, active: &[(NodeId, NodeId)]) -> Result<Vec<NodeId>> {
    let idx = super::logical::shortest_active_path(source, destination, active)
        .ok_or_else(|| Error::Model(format!("lightpath {label} has no active route from {source} to {destination}")))?;
    let mut path = vec![source];
    path.extend(idx.into_iter().map(|a| active[a].1));
    Ok(path)
}

pub fn decode_routing(phase: &RoutingPhase, map: &DecisionVarMap, values: &[f64]) -> Result<RoutingSolution> {
    let mut paths = Vec::with_capacity(phase.requests.len());
    for (r, req) in phase.requests.iter().enumerate() {
        let active: Vec<(NodeId, NodeId)> = map
            .lambda
            .range((r, 0, 0)..)
            .take_while(|((rr, _, _), _)| *rr == r)
            .filter(|(_, &id)| values[id] > 0.5)
            .map(|(&(_, m, n), _)| (m, n))
            .collect();
        paths.push(trace_physical(&req.label, req.source, req.destination, &active)?);
    }
    Ok(RoutingSolution { paths })
}

pub fn encode_routing(model: &MilpModel, map: &DecisionVarMap, sol: &RoutingSolution) -> Option<Vec<f64>> {
    let mut x = vec![0.0; model.variables.len()];
    for (r, p) in sol.paths.iter().enumerate() {
        for w in p.windows(2) {
            x[*map.lambda.get(&(r, w[0], w[1]))?] = 1.0;
        }
    }
    Some(x)
}
