//! Exhaustive phase solver for tiny instances.
//!
//! Each phase is enumerated completely. Among equal-cost solutions the one
//! containing the smallest element of the symmetric difference wins, with
//! elements ordered lightpath choices first, then LSP hops, then physical
//! arcs, each by index.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::formulation::{
    CarrierExclusion, Hop, IntegratedPhase, IntegratedSolution, LightpathKey, LogicalPhase, LogicalSolution, ProblemInstance,
    RouteRequest, RoutingPhase, RoutingSolution,
};
use crate::model::{NodeId, PhysicalTopology};
use crate::planner::{plan_with, NetworkConfiguration, PhaseEngine, PhaseRecord, PhaseResult};

const COST_TOL: f64 = 1e-6;

pub const MAX_NODES: usize = 5;
pub const MAX_LSPS: usize = 3;

/// `Less` when `a` is preferred: it holds the smallest element of the
/// symmetric difference. Both slices must be sorted.
pub fn prefer<T: Ord>(a: &[T], b: &[T]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Less,
            (None, Some(_)) => return Ordering::Greater,
            (Some(x), Some(y)) => match x.cmp(y) {
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                Ordering::Less => return Ordering::Less,
                Ordering::Greater => return Ordering::Greater,
            },
        }
    }
}

fn cost_cmp(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= COST_TOL * a.abs().max(b.abs()).max(1.0) {
        Ordering::Equal
    } else {
        a.total_cmp(&b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Item {
    Beta(LightpathKey),
    Delta(usize, Hop),
}

/// Simple logical paths from `s` to `d` over allowed nodes, every hop on
/// any of the `q` parallel lightpaths.
fn logical_paths(nodes: usize, q: usize, s: NodeId, d: NodeId, excluded: &BTreeSet<NodeId>) -> Vec<Vec<Hop>> {
    fn rec(
        nodes: usize,
        q: usize,
        at: NodeId,
        d: NodeId,
        excluded: &BTreeSet<NodeId>,
        seen: &mut Vec<bool>,
        cur: &mut Vec<Hop>,
        out: &mut Vec<Vec<Hop>>,
    ) {
        if at == d {
            out.push(cur.clone());
            return;
        }
        for n in 0..nodes {
            if seen[n] || excluded.contains(&n) {
                continue;
            }
            seen[n] = true;
            for qq in 1..=q {
                cur.push(Hop { from: at, to: n, q: qq });
                rec(nodes, q, n, d, excluded, seen, cur, out);
                cur.pop();
            }
            seen[n] = false;
        }
    }
    let mut out = Vec::new();
    let mut seen = vec![false; nodes];
    seen[s] = true;
    rec(nodes, q, s, d, excluded, &mut seen, &mut Vec::new(), &mut out);
    out
}

struct LogicalCandidate {
    solution: LogicalSolution,
    cost: f64,
    items: Vec<Item>,
}

/// Every feasible logical design, unordered.
fn enumerate_logical(phase: &LogicalPhase, mut visit: impl FnMut(LogicalCandidate)) {
    let options: Vec<Vec<Vec<Hop>>> = phase
        .lsps
        .iter()
        .map(|l| logical_paths(phase.nodes, phase.max_parallel, l.source, l.destination, &l.excluded))
        .collect();
    if options.iter().any(|o| o.is_empty()) {
        return;
    }
    let k = phase.lsps.len();
    let mut pick = vec![0usize; k];
    loop {
        if let Some(c) = evaluate(phase, &options, &pick) {
            visit(c);
        }
        let mut i = 0;
        loop {
            if i == k {
                return;
            }
            pick[i] += 1;
            if pick[i] < options[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

fn evaluate(phase: &LogicalPhase, options: &[Vec<Vec<Hop>>], pick: &[usize]) -> Option<LogicalCandidate> {
    let mut load: BTreeMap<LightpathKey, f64> = BTreeMap::new();
    let mut on: BTreeMap<LightpathKey, Vec<usize>> = BTreeMap::new();
    for (k, &p) in pick.iter().enumerate() {
        for h in &options[k][p] {
            *load.entry(h.key()).or_default() += phase.lsps[k].bandwidth;
            on.entry(h.key()).or_default().push(k);
        }
    }
    if load.values().any(|&l| l > phase.capacity + 1e-9) {
        return None;
    }
    let mut degree = vec![0usize; phase.nodes];
    for key in load.keys() {
        degree[key.i] += 1;
        degree[key.j] += 1;
    }
    if degree.iter().zip(&phase.degree_budget).any(|(d, b)| d > b) {
        return None;
    }
    for ng in &phase.nogoods {
        for q in 1..=phase.max_parallel {
            let key = LightpathKey::new(ng.i, ng.j, q);
            if let Some(c) = on.get(&key) {
                if ng.lsps.iter().all(|k| c.contains(k)) {
                    return None;
                }
            }
        }
    }
    let routes: Vec<Vec<Hop>> = pick.iter().enumerate().map(|(k, &p)| options[k][p].clone()).collect();
    let solution = LogicalSolution { lightpaths: load.keys().copied().collect(), routes };
    let mut items: Vec<Item> = solution.lightpaths.iter().map(|&k| Item::Beta(k)).collect();
    for (k, r) in solution.routes.iter().enumerate() {
        let mut hs: Vec<Hop> = r.clone();
        hs.sort();
        items.extend(hs.into_iter().map(|h| Item::Delta(k, h)));
    }
    let cost = solution.objective(phase);
    Some(LogicalCandidate { solution, cost, items })
}

fn better(cost: f64, items: &[Item], best: &Option<LogicalCandidate>) -> bool {
    match best {
        None => true,
        Some(b) => match cost_cmp(cost, b.cost) {
            Ordering::Less => true,
            Ordering::Equal => prefer(items, &b.items) == Ordering::Less,
            Ordering::Greater => false,
        },
    }
}

/// Simple physical paths as (node sequence, sorted arcs).
fn physical_paths(topology: &PhysicalTopology, req: &RouteRequest) -> Vec<(Vec<NodeId>, Vec<(NodeId, NodeId)>)> {
    fn rec(
        topology: &PhysicalTopology,
        req: &RouteRequest,
        seen: &mut Vec<bool>,
        cur: &mut Vec<NodeId>,
        out: &mut Vec<Vec<NodeId>>,
    ) {
        let at = *cur.last().unwrap();
        if at == req.destination {
            out.push(cur.clone());
            return;
        }
        for (n, e) in topology.neighbors(at) {
            if seen[n] || req.excluded_links.contains(&e) || req.excluded_nodes.contains(&n) {
                continue;
            }
            seen[n] = true;
            cur.push(n);
            rec(topology, req, seen, cur, out);
            cur.pop();
            seen[n] = false;
        }
    }
    let mut out = Vec::new();
    let mut seen = vec![false; topology.node_count()];
    seen[req.source] = true;
    rec(topology, req, &mut seen, &mut vec![req.source], &mut out);
    let mut with_arcs: Vec<(Vec<NodeId>, Vec<(NodeId, NodeId)>)> = out
        .into_iter()
        .map(|p| {
            let mut arcs: Vec<(NodeId, NodeId)> = p.windows(2).map(|w| (w[0], w[1])).collect();
            arcs.sort();
            (p, arcs)
        })
        .collect();
    with_arcs.sort_by(|a, b| prefer(&a.1, &b.1));
    with_arcs
}

struct RoutingSearch<'a> {
    topology: &'a PhysicalTopology,
    cands: Vec<Vec<(Vec<NodeId>, Vec<(NodeId, NodeId)>)>>,
    rest_min: Vec<usize>,
    residual: Vec<usize>,
    best: usize,
    chosen: Vec<usize>,
    found: Option<Vec<usize>>,
}

impl RoutingSearch<'_> {
    fn fits(&self, path: &[NodeId]) -> bool {
        path.windows(2).all(|w| self.residual[self.topology.link_index(w[0], w[1]).unwrap()] > 0)
    }

    fn take(&mut self, path: &[NodeId], delta: isize) {
        for w in path.windows(2) {
            let e = self.topology.link_index(w[0], w[1]).unwrap();
            self.residual[e] = (self.residual[e] as isize + delta) as usize;
        }
    }

    /// Pass 1: least total length.
    fn minimise(&mut self, r: usize, len: usize) {
        if r == self.cands.len() {
            self.best = self.best.min(len);
            return;
        }
        let mut order: Vec<usize> = (0..self.cands[r].len()).collect();
        order.sort_by_key(|&c| self.cands[r][c].0.len());
        for c in order {
            let l = self.cands[r][c].0.len() - 1;
            if len + l + self.rest_min[r + 1] >= self.best {
                break;
            }
            let path = self.cands[r][c].0.clone();
            if !self.fits(&path) {
                continue;
            }
            self.take(&path, -1);
            self.minimise(r + 1, len + l);
            self.take(&path, 1);
        }
    }

    /// Pass 2: first optimal assignment in preference order.
    fn first(&mut self, r: usize, len: usize) -> bool {
        if r == self.cands.len() {
            if len == self.best {
                self.found = Some(self.chosen.clone());
                return true;
            }
            return false;
        }
        for c in 0..self.cands[r].len() {
            let l = self.cands[r][c].0.len() - 1;
            if len + l + self.rest_min[r + 1] > self.best {
                continue;
            }
            let path = self.cands[r][c].0.clone();
            if !self.fits(&path) {
                continue;
            }
            self.take(&path, -1);
            self.chosen.push(c);
            if self.first(r + 1, len + l) {
                return true;
            }
            self.chosen.pop();
            self.take(&path, 1);
        }
        false
    }
}

/// Exact routing with the preference tie-break; `None` if infeasible.
fn solve_routing(topology: &PhysicalTopology, requests: &[RouteRequest], residual: &[usize]) -> Option<(usize, Vec<Vec<NodeId>>)> {
    let cands: Vec<_> = requests.iter().map(|r| physical_paths(topology, r)).collect();
    if cands.iter().any(|c| c.is_empty()) {
        return None;
    }
    let mut rest_min = vec![0usize; cands.len() + 1];
    for r in (0..cands.len()).rev() {
        rest_min[r] = rest_min[r + 1] + cands[r].iter().map(|c| c.0.len() - 1).min().unwrap();
    }
    let mut s = RoutingSearch {
        topology,
        cands,
        rest_min,
        residual: residual.to_vec(),
        best: usize::MAX,
        chosen: Vec::new(),
        found: None,
    };
    s.minimise(0, 0);
    if s.best == usize::MAX {
        return None;
    }
    s.residual = residual.to_vec();
    s.first(0, 0);
    let pick = s.found.expect("an optimal assignment exists");
    Some((s.best, pick.iter().enumerate().map(|(r, &c)| s.cands[r][c].0.clone()).collect()))
}

fn record(phase: &str, started: Instant, objective: Option<f64>) -> PhaseRecord {
    PhaseRecord {
        phase: phase.to_string(),
        engine: "brute-force".into(),
        status: if objective.is_some() { "optimal" } else { "infeasible" }.into(),
        objective,
        best_bound: objective,
        gap: objective.map(|_| 0.0),
        wall_time: started.elapsed().as_secs_f64(),
        ..Default::default()
    }
}

/// Phase engine that enumerates every solution.
#[derive(Debug, Clone, Copy, Default)]
pub struct BruteEngine;

impl PhaseEngine for BruteEngine {
    fn name(&self) -> &'static str {
        "brute-force"
    }

    fn logical(&mut self, phase_name: &str, phase: &LogicalPhase) -> Result<PhaseResult<LogicalSolution>> {
        let t = Instant::now();
        let mut best: Option<LogicalCandidate> = None;
        enumerate_logical(phase, |c| {
            if better(c.cost, &c.items, &best) {
                best = Some(c);
            }
        });
        let obj = best.as_ref().map(|b| b.cost);
        Ok(PhaseResult { solution: best.map(|b| b.solution), record: record(phase_name, t, obj) })
    }

    fn routing(&mut self, phase_name: &str, topology: &PhysicalTopology, phase: &RoutingPhase) -> Result<PhaseResult<RoutingSolution>> {
        let t = Instant::now();
        let sol = solve_routing(topology, &phase.requests, &phase.residual);
        let obj = sol.as_ref().map(|(len, _)| phase.wavelength_cost * *len as f64);
        Ok(PhaseResult { solution: sol.map(|(_, paths)| RoutingSolution { paths }), record: record(phase_name, t, obj) })
    }

    fn integrated(
        &mut self,
        phase_name: &str,
        topology: &PhysicalTopology,
        phase: &IntegratedPhase,
    ) -> Result<PhaseResult<IntegratedSolution>> {
        let t = Instant::now();
        let mut memo: HashMap<Vec<(LightpathKey, Vec<NodeId>, Vec<usize>)>, Option<(usize, Vec<Vec<NodeId>>)>> = HashMap::new();
        let mut best: Option<(LogicalCandidate, Vec<Vec<NodeId>>)> = None;
        enumerate_logical(&phase.logical, |c| {
            let mut carriers: BTreeMap<LightpathKey, Vec<usize>> = BTreeMap::new();
            for (k, r) in c.solution.routes.iter().enumerate() {
                for h in r {
                    carriers.entry(h.key()).or_default().push(k);
                }
            }
            let requests: Vec<RouteRequest> = c
                .solution
                .lightpaths
                .iter()
                .map(|key| {
                    let mut ex = CarrierExclusion::default();
                    for &k in &carriers[key] {
                        if let Some(ce) = phase.carrier_exclusions.get(k) {
                            ex.nodes.extend(ce.nodes.iter().copied());
                            ex.links.extend(ce.links.iter().copied());
                        }
                    }
                    ex.nodes.remove(&key.i);
                    ex.nodes.remove(&key.j);
                    RouteRequest { label: key.to_string(), source: key.i, destination: key.j, excluded_nodes: ex.nodes, excluded_links: ex.links }
                })
                .collect();
            let sig: Vec<_> = requests
                .iter()
                .zip(&c.solution.lightpaths)
                .map(|(r, k)| (*k, r.excluded_nodes.iter().copied().collect(), r.excluded_links.iter().copied().collect()))
                .collect();
            let routed = memo.entry(sig).or_insert_with(|| solve_routing(topology, &requests, &phase.residual)).clone();
            let Some((len, paths)) = routed else { return };
            let cost = c.cost + phase.wavelength_cost * len as f64;
            let take = match &best {
                None => true,
                Some((b, _)) => match cost_cmp(cost, b.cost) {
                    Ordering::Less => true,
                    Ordering::Equal => prefer(&c.items, &b.items) == Ordering::Less,
                    Ordering::Greater => false,
                },
            };
            if take {
                best = Some((LogicalCandidate { cost, ..c }, paths));
            }
        });
        let obj = best.as_ref().map(|(b, _)| b.cost);
        Ok(PhaseResult {
            solution: best.map(|(b, paths)| IntegratedSolution { logical: b.solution, paths }),
            record: record(phase_name, t, obj),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub cost: f64,
    pub configuration: NetworkConfiguration,
}

/// Optimum of the mode's pipeline by exhaustive search of every phase.
/// Rejects instances with more than 5 nodes, more than 3 LSPs or Q > 1.
pub fn brute_force_optimum(instance: &ProblemInstance) -> Result<OracleResult> {
    let n = instance.node_count();
    let k = instance.traffic.len();
    let q = instance.params.max_parallel;
    if n > MAX_NODES || k > MAX_LSPS || q != 1 {
        return Err(Error::OracleBounds(format!(
            "N = {n}, K = {k}, Q = {q}; enumeration needs N <= {MAX_NODES}, K <= {MAX_LSPS}, Q = 1"
        )));
    }
    let configuration = plan_with(instance, &mut BruteEngine, 3)?;
    Ok(OracleResult { cost: configuration.cost.total, configuration })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preference_rule() {
        assert_eq!(prefer(&[1, 3], &[1, 2]), Ordering::Greater);
        assert_eq!(prefer(&[1, 2], &[1, 2, 5]), Ordering::Greater);
        assert_eq!(prefer(&[0], &[1, 2]), Ordering::Less);
        assert_eq!(prefer::<u8>(&[], &[]), Ordering::Equal);
    }

    #[test]
    fn logical_paths_in_k4() {
        // 0 -> 3 in K4: direct, via 1, via 2, via 1-2, via 2-1
        assert_eq!(logical_paths(4, 1, 0, 3, &BTreeSet::new()).len(), 5);
        assert_eq!(logical_paths(4, 2, 0, 3, &BTreeSet::new()).len(), 2 + 2 * 4 + 2 * 8);
    }

    #[test]
    fn routing_prefers_lower_arcs_on_ties() {
        let t = PhysicalTopology::ring(4, 8);
        let req = RouteRequest { label: "a".into(), source: 0, destination: 2, excluded_nodes: BTreeSet::new(), excluded_links: BTreeSet::new() };
        let (len, paths) = solve_routing(&t, &[req], &[8; 4]).unwrap();
        assert_eq!(len, 2);
        // arcs {(0,1),(1,2)} beat {(0,3),(3,2)}
        assert_eq!(paths[0], vec![0, 1, 2]);
    }

    #[test]
    fn bounds_rejected() {
        use crate::formulation::{Approach, SurvivabilityMode};
        use crate::model::{derive_unit_costs, CostRatios, LspDemand, SystemParams};
        let traffic = (0..4).map(|id| LspDemand { id, source: 0, destination: 1, bandwidth: 1.0 }).collect();
        let inst = ProblemInstance::new(
            PhysicalTopology::ring(4, 8),
            traffic,
            SystemParams { capacity: 10.0, wavelengths: 8, max_parallel: 1, max_interfaces: 6 },
            derive_unit_costs(&CostRatios::CR1, 10.0),
            SurvivabilityMode::None,
            Approach::Sequential,
        )
        .unwrap();
        assert!(matches!(brute_force_optimum(&inst), Err(Error::OracleBounds(_))));
    }
}
