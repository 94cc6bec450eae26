//! Constructive heuristics used to seed the solver, to carry `--emit-lp`
//! runs forward and as a standalone engine for instances too large to solve.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::formulation::{
    CarrierExclusion, Hop, IntegratedPhase, IntegratedSolution, LightpathKey, LogicalPhase, LogicalSolution, RoutingPhase,
    RoutingSolution,
};
use crate::model::{NodeId, PhysicalTopology};

const EPS: f64 = 1e-9;

/// Fewest-hop physical path avoiding excluded nodes and links and links with
/// no wavelength left. Ties go to the lowest-numbered neighbour.
pub fn shortest_physical_path(
    topology: &PhysicalTopology,
    source: NodeId,
    destination: NodeId,
    excluded_nodes: &BTreeSet<NodeId>,
    excluded_links: &BTreeSet<usize>,
    residual: Option<&[usize]>,
) -> Option<Vec<NodeId>> {
    let n = topology.node_count();
    let mut adj: Vec<Vec<(NodeId, usize)>> = vec![Vec::new(); n];
    for (e, l) in topology.links.iter().enumerate() {
        if excluded_links.contains(&e) || residual.is_some_and(|r| r[e] == 0) {
            continue;
        }
        adj[l.0].push((l.1, e));
        adj[l.1].push((l.0, e));
    }
    for a in &mut adj {
        a.sort();
    }
    let mut prev = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[source] = true;
    let mut queue = VecDeque::from([source]);
    while let Some(at) = queue.pop_front() {
        if at == destination {
            let mut path = vec![destination];
            let mut x = destination;
            while x != source {
                x = prev[x];
                path.push(x);
            }
            path.reverse();
            return Some(path);
        }
        for &(nb, _) in &adj[at] {
            if !seen[nb] && (nb == destination || !excluded_nodes.contains(&nb)) {
                seen[nb] = true;
                prev[nb] = at;
                queue.push_back(nb);
            }
        }
    }
    None
}

/// Routes each request in order on its shortest admissible path.
pub fn greedy_routing(topology: &PhysicalTopology, phase: &RoutingPhase) -> Option<RoutingSolution> {
    let mut residual = phase.residual.clone();
    let mut paths = Vec::with_capacity(phase.requests.len());
    for req in &phase.requests {
        let p = shortest_physical_path(
            topology,
            req.source,
            req.destination,
            &req.excluded_nodes,
            &req.excluded_links,
            Some(&residual),
        )?;
        for w in p.windows(2) {
            residual[topology.link_index(w[0], w[1]).expect("adjacent")] -= 1;
        }
        paths.push(p);
    }
    Some(RoutingSolution { paths })
}

/// Grooms LSPs one at a time (largest first) onto the cheapest logical path,
/// reusing open lightpaths with room before opening new ones. `admit` can
/// veto placing a phase LSP on a lightpath given the LSPs already on it.
pub fn greedy_logical(phase: &LogicalPhase) -> Option<LogicalSolution> {
    greedy_logical_with(phase, &|_, _, _| true)
}

pub fn greedy_logical_with(phase: &LogicalPhase, admit: &dyn Fn(usize, LightpathKey, &[usize]) -> bool) -> Option<LogicalSolution> {
    let n = phase.nodes;
    let mut order: Vec<usize> = (0..phase.lsps.len()).collect();
    order.sort_by(|&a, &b| phase.lsps[b].bandwidth.total_cmp(&phase.lsps[a].bandwidth).then(a.cmp(&b)));
    let mut load: BTreeMap<LightpathKey, f64> = BTreeMap::new();
    let mut carried: BTreeMap<LightpathKey, Vec<usize>> = BTreeMap::new();
    let mut degree = vec![0usize; n];
    let mut routes = vec![Vec::new(); phase.lsps.len()];

    for k in order {
        let l = &phase.lsps[k];
        let forbidden = |key: LightpathKey, on: &[usize]| -> bool {
            phase.nogoods.iter().any(|ng| {
                LightpathKey::new(ng.i, ng.j, key.q) == key
                    && ng.lsps.contains(&k)
                    && ng.lsps.iter().all(|x| *x == k || on.contains(x))
            }) || !admit(k, key, on)
        };
        let mut found = None;
        for allow_new in [true, false] {
            // edge choice per unordered pair: cheapest admissible lightpath
            let edge = |u: NodeId, v: NodeId| -> Option<(f64, LightpathKey, bool)> {
                let mut best: Option<(f64, LightpathKey, bool)> = None;
                for q in 1..=phase.max_parallel {
                    let key = LightpathKey::new(u, v, q);
                    let on = carried.get(&key).map_or(&[][..], |c| c);
                    if forbidden(key, on) {
                        continue;
                    }
                    let cand = match load.get(&key) {
                        Some(&ld) if ld + l.bandwidth <= phase.capacity + EPS => Some((0.0, key, false)),
                        None if allow_new && degree[u] < phase.degree_budget[u] && degree[v] < phase.degree_budget[v] => {
                            Some((phase.lightpath_cost, key, true))
                        }
                        _ => None,
                    };
                    if let Some(c) = cand {
                        if best.is_none_or(|b| c.0 < b.0 - EPS) {
                            best = Some(c);
                        }
                    }
                }
                best
            };
            let step = phase.transit_cost * l.bandwidth;
            let mut dist = vec![f64::INFINITY; n];
            let mut prev: Vec<Option<(NodeId, LightpathKey, bool)>> = vec![None; n];
            let mut done = vec![false; n];
            dist[l.source] = 0.0;
            loop {
                let mut at = None;
                for x in 0..n {
                    if !done[x] && dist[x].is_finite() && at.is_none_or(|a: usize| dist[x] < dist[a] - EPS) {
                        at = Some(x);
                    }
                }
                let Some(u) = at else { break };
                done[u] = true;
                if u == l.destination {
                    break;
                }
                for v in 0..n {
                    if v == u || done[v] || l.excluded.contains(&v) {
                        continue;
                    }
                    if let Some((c, key, new)) = edge(u, v) {
                        let d = dist[u] + c + step;
                        if d < dist[v] - EPS {
                            dist[v] = d;
                            prev[v] = Some((u, key, new));
                        }
                    }
                }
            }
            if !dist[l.destination].is_finite() {
                continue;
            }
            let mut hops = Vec::new();
            let mut x = l.destination;
            while x != l.source {
                let (u, key, new) = prev[x].expect("reached");
                hops.push((Hop { from: u, to: x, q: key.q }, new));
                x = u;
            }
            hops.reverse();
            let mut extra = vec![0usize; n];
            for (h, new) in &hops {
                if *new {
                    extra[h.from] += 1;
                    extra[h.to] += 1;
                }
            }
            if (0..n).all(|x| degree[x] + extra[x] <= phase.degree_budget[x]) {
                found = Some(hops);
                break;
            }
        }
        let hops = found?;
        for (h, new) in &hops {
            let key = h.key();
            if *new {
                degree[key.i] += 1;
                degree[key.j] += 1;
            }
            *load.entry(key).or_insert(0.0) += l.bandwidth;
            carried.entry(key).or_default().push(k);
        }
        routes[k] = hops.into_iter().map(|(h, _)| h).collect();
    }
    Some(LogicalSolution { lightpaths: load.keys().copied().collect(), routes })
}

/// Greedy logical design that only groups LSPs whose combined carrier
/// exclusions leave the lightpath routable, then shortest-path routing.
pub fn greedy_integrated(topology: &PhysicalTopology, phase: &IntegratedPhase) -> Option<IntegratedSolution> {
    let exclusion_of = |lsps: &[usize], key: LightpathKey| -> CarrierExclusion {
        let mut ex = CarrierExclusion::default();
        for &k in lsps {
            if let Some(c) = phase.carrier_exclusions.get(k) {
                ex.nodes.extend(c.nodes.iter().copied());
                ex.links.extend(c.links.iter().copied());
            }
        }
        ex.nodes.remove(&key.i);
        ex.nodes.remove(&key.j);
        ex
    };
    let admit = |k: usize, key: LightpathKey, on: &[usize]| -> bool {
        if phase.carrier_exclusions.is_empty() {
            return true;
        }
        let mut all = on.to_vec();
        all.push(k);
        let ex = exclusion_of(&all, key);
        shortest_physical_path(topology, key.i, key.j, &ex.nodes, &ex.links, None).is_some()
    };
    let logical = greedy_logical_with(&phase.logical, &admit)?;
    let mut carriers: BTreeMap<LightpathKey, Vec<usize>> = BTreeMap::new();
    for (k, r) in logical.routes.iter().enumerate() {
        for h in r {
            carriers.entry(h.key()).or_default().push(k);
        }
    }
    let mut residual = phase.residual.clone();
    let mut paths = Vec::with_capacity(logical.lightpaths.len());
    for key in &logical.lightpaths {
        let ex = exclusion_of(carriers.get(key).map_or(&[][..], |c| c), *key);
        let p = shortest_physical_path(topology, key.i, key.j, &ex.nodes, &ex.links, Some(&residual))?;
        for w in p.windows(2) {
            residual[topology.link_index(w[0], w[1]).expect("adjacent")] -= 1;
        }
        paths.push(p);
    }
    Some(IntegratedSolution { logical, paths })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulation::{Nogood, PhaseLsp, RouteRequest, Status};

    fn phase(nodes: usize, lsps: &[(usize, usize, f64)], budget: usize) -> LogicalPhase {
        LogicalPhase {
            status: Status::Working,
            nodes,
            lsps: lsps
                .iter()
                .enumerate()
                .map(|(k, &(s, d, b))| PhaseLsp { lsp: k, source: s, destination: d, bandwidth: b, excluded: BTreeSet::new() })
                .collect(),
            capacity: 10.0,
            max_parallel: 1,
            degree_budget: vec![budget; nodes],
            lightpath_cost: 17.0,
            transit_cost: 0.8,
            nogoods: Vec::new(),
        }
    }

    #[test]
    fn grooms_onto_open_lightpaths() {
        let p = phase(4, &[(0, 1, 4.0), (1, 2, 4.0), (0, 2, 4.0)], 4);
        let s = greedy_logical(&p).unwrap();
        // 0->2 rides 0-1 and 1-2 instead of opening a third lightpath
        assert_eq!(s.lightpaths.len(), 2);
        assert_eq!(s.routes[2].len(), 2);
    }

    #[test]
    fn nogood_forces_a_separate_lightpath() {
        let mut p = phase(3, &[(0, 1, 2.0), (0, 1, 2.0)], 4);
        p.max_parallel = 2;
        p.nogoods.push(Nogood { i: 0, j: 1, lsps: vec![0, 1] });
        let s = greedy_logical(&p).unwrap();
        assert_ne!(s.routes[0], s.routes[1]);
    }

    #[test]
    fn degree_budget_can_fail() {
        let p = phase(3, &[(0, 1, 10.0), (0, 2, 10.0)], 1);
        assert!(greedy_logical(&p).is_none());
    }

    #[test]
    fn routing_respects_exclusions_and_residual() {
        let t = PhysicalTopology::ring(4, 8);
        let req = RouteRequest {
            label: "a".into(),
            source: 0,
            destination: 2,
            excluded_nodes: BTreeSet::from([1]),
            excluded_links: BTreeSet::new(),
        };
        let p = RoutingPhase { prefix: "wlam".into(), requests: vec![req.clone()], residual: vec![8; 4], wavelength_cost: 3.0 };
        assert_eq!(greedy_routing(&t, &p).unwrap().paths[0], vec![0, 3, 2]);
        let blocked = RoutingPhase { residual: vec![8, 8, 0, 8], ..p };
        assert!(greedy_routing(&t, &blocked).is_none());
    }
}
