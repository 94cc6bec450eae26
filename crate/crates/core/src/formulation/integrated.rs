use std::collections::BTreeMap;

use super::logical::{build_logical_design, decode_logical, encode_logical};
use super::routing::{sorted_arcs, trace_physical};
use super::{DecisionVarMap, Hop, IntegratedPhase, IntegratedSolution};
use crate::error::{Error, Result};
use crate::milp::{MilpModel, Relation, VarId};
use crate::model::{NodeId, PhysicalTopology};

/// Logical design, LSP routing and physical routing of the opened
/// lightpaths in one program. Lightpath flow is driven by β: one unit leaves
/// `i` and reaches `j` exactly when the lightpath exists.
pub fn build_integrated(topology: &PhysicalTopology, phase: &IntegratedPhase) -> Result<(MilpModel, DecisionVarMap)> {
    if phase.residual.len() != topology.link_count() {
        return Err(Error::Model("residual wavelengths do not match the topology".into()));
    }
    if phase.carrier_exclusions.len() != phase.logical.lsps.len() && !phase.carrier_exclusions.is_empty() {
        return Err(Error::Model("carrier exclusions must be given per LSP".into()));
    }
    let (mut model, mut map) = build_logical_design(&phase.logical)?;
    model.name = format!("integrated-{}", phase.logical.status.prefix());
    let prefix = phase.prefix();
    let arcs = sorted_arcs(topology);
    let mut arc_link = BTreeMap::new();
    let keys: Vec<_> = map.beta.keys().copied().collect();
    for key in &keys {
        for &(m, n, e) in &arcs {
            let id = model.add_binary(format!("{prefix}_{key}_{m}_{n}"), phase.wavelength_cost);
            map.lambda_integrated.insert((*key, m, n), id);
            arc_link.insert(id, e);
        }
    }

    for key in &keys {
        let beta = map.beta[key];
        let mut rows: BTreeMap<NodeId, Vec<(VarId, f64)>> = (0..topology.node_count()).map(|n| (n, Vec::new())).collect();
        for (&(_, m, n), &id) in map.lambda_integrated.range((*key, 0, 0)..=(*key, usize::MAX, usize::MAX)) {
            rows.get_mut(&m).unwrap().push((id, 1.0));
            rows.get_mut(&n).unwrap().push((id, -1.0));
        }
        rows.get_mut(&key.i).unwrap().push((beta, -1.0));
        rows.get_mut(&key.j).unwrap().push((beta, 1.0));
        for (n, terms) in rows {
            model.add_constraint(format!("lpflow_{prefix}_{key}_{n}"), "Eq18", terms, Relation::Eq, 0.0);
        }
    }

    let mut per_link: BTreeMap<usize, Vec<(VarId, f64)>> = BTreeMap::new();
    for &id in map.lambda_integrated.values() {
        per_link.entry(arc_link[&id]).or_default().push((id, 1.0));
    }
    for (e, terms) in per_link {
        model.add_constraint(format!("wl_{prefix}_{e}"), "Eq20", terms, Relation::Le, phase.residual[e] as f64);
    }

    // a lightpath carrying LSP k must keep clear of k's excluded nodes and links
    for (k, ex) in phase.carrier_exclusions.iter().enumerate() {
        if ex.nodes.is_empty() && ex.links.is_empty() {
            continue;
        }
        for key in &keys {
            let mut carry = Vec::new();
            for h in [Hop { from: key.i, to: key.j, q: key.q }, Hop { from: key.j, to: key.i, q: key.q }] {
                if let Some(&id) = map.delta.get(&(k, h)) {
                    carry.push((id, 1.0));
                }
            }
            if carry.is_empty() {
                continue;
            }
            for &x in &ex.nodes {
                if key.touches(x) {
                    continue;
                }
                let mut terms = carry.clone();
                for (&(_, _, n), &id) in map.lambda_integrated.range((*key, 0, 0)..=(*key, usize::MAX, usize::MAX)) {
                    if n == x {
                        terms.push((id, 1.0));
                    }
                }
                model.add_constraint(format!("exn_{}_{key}_{x}", phase.logical.lsps[k].lsp), "Excl", terms, Relation::Le, 1.0);
            }
            for &e in &ex.links {
                let l = topology.links[e];
                let mut terms = carry.clone();
                for (m, n) in [(l.0, l.1), (l.1, l.0)] {
                    if let Some(&id) = map.lambda_integrated.get(&(*key, m, n)) {
                        terms.push((id, 1.0));
                    }
                }
                model.add_constraint(format!("exl_{}_{key}_{e}", phase.logical.lsps[k].lsp), "Excl", terms, Relation::Le, 1.0);
            }
        }
    }
    Ok((model, map))
}

pub fn decode_integrated(phase: &IntegratedPhase, map: &DecisionVarMap, values: &[f64]) -> Result<IntegratedSolution> {
    let logical = decode_logical(&phase.logical, map, values)?;
    let mut paths = Vec::with_capacity(logical.lightpaths.len());
    for key in &logical.lightpaths {
        let active: Vec<(NodeId, NodeId)> = map
            .lambda_integrated
            .range((*key, 0, 0)..=(*key, usize::MAX, usize::MAX))
            .filter(|(_, &id)| values[id] > 0.5)
            .map(|(&(_, m, n), _)| (m, n))
            .collect();
        paths.push(trace_physical(&key.to_string(), key.i, key.j, &active)?);
    }
    Ok(IntegratedSolution { logical, paths })
}

pub fn encode_integrated(model: &MilpModel, map: &DecisionVarMap, sol: &IntegratedSolution) -> Option<Vec<f64>> {
    let mut x = encode_logical(model, map, &sol.logical)?;
    for (key, p) in sol.logical.lightpaths.iter().zip(&sol.paths) {
        for w in p.windows(2) {
            x[*map.lambda_integrated.get(&(*key, w[0], w[1]))?] = 1.0;
        }
    }
    Some(x)
}
