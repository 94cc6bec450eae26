use std::collections::{BTreeMap, BTreeSet};

use super::{DecisionVarMap, Hop, LightpathKey, LogicalPhase, LogicalSolution, Status};
use crate::error::{Error, Result};
use crate::milp::{MilpModel, Relation, VarId};

fn names(status: Status) -> (&'static str, &'static str, &'static str, &'static str) {
    match status {
        Status::Working => ("wbeta", "wdelta", "Eq9", "Eq12"),
        Status::Protection => ("pbeta", "pdelta", "Eq10", "Eq13"),
    }
}

/// Logical topology design and LSP routing for one status.
///
/// Variables come in canonical order: all β by key, then δ by
/// (LSP, from, to, q). The objective is c_LP·Σβ + c_TT·Σ b(hops - 1).
pub fn build_logical_design(phase: &LogicalPhase) -> Result<(MilpModel, DecisionVarMap)> {
    for l in &phase.lsps {
        if l.bandwidth > phase.capacity + 1e-9 {
            return Err(Error::Instance(format!(
                "LSP {} carries {} Gbps above capacity {}; split demands first",
                l.lsp, l.bandwidth, phase.capacity
            )));
        }
        if l.excluded.contains(&l.source) || l.excluded.contains(&l.destination) {
            return Err(Error::Model(format!("LSP {} excludes one of its own endpoints", l.lsp)));
        }
    }
    let (bname, dname, flow_tag, cap_tag) = names(phase.status);
    let mut model = MilpModel::new(format!("logical-{}", phase.status.prefix()));
    let mut map = DecisionVarMap::default();

    for key in phase.keys() {
        let id = model.add_binary(format!("{bname}_{key}"), phase.lightpath_cost);
        map.beta.insert(key, id);
    }
    for (k, l) in phase.lsps.iter().enumerate() {
        for h in phase.arcs_for(k) {
            let id = model.add_binary(
                format!("{dname}_{}_{}_{}_{}", l.lsp, h.from, h.to, h.q),
                phase.transit_cost * l.bandwidth,
            );
            map.delta.insert((k, h), id);
        }
    }
    model.objective_offset = phase.transit_offset();

    // flow conservation at every non-excluded node
    for (k, l) in phase.lsps.iter().enumerate() {
        let mut rows: BTreeMap<usize, Vec<(VarId, f64)>> = BTreeMap::new();
        for n in 0..phase.nodes {
            if !l.excluded.contains(&n) {
                rows.insert(n, Vec::new());
            }
        }
        for (&(kk, h), &id) in map.delta.range((k, Hop { from: 0, to: 0, q: 0 })..) {
            if kk != k {
                break;
            }
            rows.get_mut(&h.from).expect("arc tail kept").push((id, 1.0));
            rows.get_mut(&h.to).expect("arc head kept").push((id, -1.0));
        }
        for (n, terms) in rows {
            let rhs = if n == l.source {
                1.0
            } else if n == l.destination {
                -1.0
            } else {
                0.0
            };
            model.add_constraint(format!("flow_{}_{}_{n}", phase.status.prefix(), l.lsp), flow_tag, terms, Relation::Eq, rhs);
        }
    }

    // lightpath capacity, plus the implied per-LSP link to β
    for (&key, &beta) in &map.beta {
        let mut cap = Vec::new();
        for (k, l) in phase.lsps.iter().enumerate() {
            let mut both = Vec::new();
            for h in [Hop { from: key.i, to: key.j, q: key.q }, Hop { from: key.j, to: key.i, q: key.q }] {
                if let Some(&id) = map.delta.get(&(k, h)) {
                    cap.push((id, l.bandwidth));
                    both.push((id, 1.0));
                }
            }
            if !both.is_empty() {
                both.push((beta, -1.0));
                model.add_constraint(format!("use_{}_{}_{key}", phase.status.prefix(), l.lsp), "Link", both, Relation::Le, 0.0);
            }
        }
        cap.push((beta, -phase.capacity));
        model.add_constraint(format!("cap_{}_{key}", phase.status.prefix()), cap_tag, cap, Relation::Le, 0.0);
    }

    // interfaces per router
    for n in 0..phase.nodes {
        let terms: Vec<(VarId, f64)> =
            map.beta.iter().filter(|(key, _)| key.touches(n)).map(|(_, &id)| (id, 1.0)).collect();
        model.add_constraint(
            format!("deg_{}_{n}", phase.status.prefix()),
            "Eq7_8",
            terms,
            Relation::Le,
            phase.degree_budget[n] as f64,
        );
    }

    // groupings ruled out by earlier physical routing attempts
    for (g, ng) in phase.nogoods.iter().enumerate() {
        for q in 1..=phase.max_parallel {
            let mut terms = Vec::new();
            for &k in &ng.lsps {
                for h in [Hop { from: ng.i, to: ng.j, q }, Hop { from: ng.j, to: ng.i, q }] {
                    if let Some(&id) = map.delta.get(&(k, h)) {
                        terms.push((id, 1.0));
                    }
                }
            }
            if !terms.is_empty() {
                model.add_constraint(format!("nogood_{g}_{q}"), "Nogood", terms, Relation::Le, ng.lsps.len() as f64 - 1.0);
            }
        }
    }
    Ok((model, map))
}

/// Follows the δ values of each LSP from source to destination. Cycles off
/// the path and lightpaths no route uses are dropped.
pub fn decode_logical(phase: &LogicalPhase, map: &DecisionVarMap, values: &[f64]) -> Result<LogicalSolution> {
    let mut routes = Vec::with_capacity(phase.lsps.len());
    for (k, l) in phase.lsps.iter().enumerate() {
        let active: Vec<Hop> = map
            .delta
            .range((k, Hop { from: 0, to: 0, q: 0 })..)
            .take_while(|((kk, _), _)| *kk == k)
            .filter(|(_, &id)| values[id] > 0.5)
            .map(|((_, h), _)| *h)
            .collect();
        routes.push(trace(l.lsp, l.source, l.destination, &active)?);
    }
    let used: BTreeSet<LightpathKey> = routes.iter().flatten().map(Hop::key).collect();
    Ok(LogicalSolution { lightpaths: used.into_iter().collect(), routes })
}

fn trace(lsp: usize, source: usize, destination: usize, active: &[Hop]) -> Result<Vec<Hop>> {
    let arcs: Vec<(usize, usize)> = active.iter().map(|h| (h.from, h.to)).collect();
    let idx = shortest_active_path(source, destination, &arcs)
        .ok_or_else(|| Error::Model(format!("LSP {lsp} has no active route from {source} to {destination}")))?;
    Ok(idx.into_iter().map(|i| active[i]).collect())
}

/// Fewest-arc path through the active arcs, as arc indices. Extra flow on
/// cycles is ignored.
pub(crate) fn shortest_active_path(source: usize, destination: usize, arcs: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut seen = BTreeSet::from([source]);
    let mut queue = std::collections::VecDeque::from([source]);
    while let Some(at) = queue.pop_front() {
        if at == destination {
            let mut out = Vec::new();
            let mut n = destination;
            while n != source {
                let a = prev[&n];
                out.push(a);
                n = arcs[a].0;
            }
            out.reverse();
            return Some(out);
        }
        for (a, &(m, n)) in arcs.iter().enumerate() {
            if m == at && seen.insert(n) {
                prev.insert(n, a);
                queue.push_back(n);
            }
        }
    }
    None
}

/// Values vector for a known solution (used to seed the solver).
pub fn encode_logical(model: &MilpModel, map: &DecisionVarMap, sol: &LogicalSolution) -> Option<Vec<f64>> {
    let mut x = vec![0.0; model.variables.len()];
    for key in &sol.lightpaths {
        x[*map.beta.get(key)?] = 1.0;
    }
    for (k, r) in sol.routes.iter().enumerate() {
        for h in r {
            x[*map.delta.get(&(k, *h))?] = 1.0;
            x[*map.beta.get(&h.key())?] = 1.0;
        }
    }
    Some(x)
}
