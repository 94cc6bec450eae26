//! Survivability pipelines.
//!
//! Sequential approach, per mode:
//!
//! 1. `I`: working logical design over all LSPs.
//! 2. `III-w`: physical routing of the working lightpaths.
//! 3. `II`: protection logical design for the covered LSPs (all LSPs in
//!    single-layer mode, multi-hop ones in the multilayer modes), with the
//!    mode's exclusion sets. Groupings whose combined physical exclusions cut
//!    a lightpath off are forbidden and the phase is re-solved.
//! 4. `III-p`: physical routing of the protection-LSP lightpaths.
//! 5. `IV` (multilayer modes): protection lightpaths for the working
//!    lightpaths, and in double protection for the protection-LSP lightpaths
//!    too. Under interlayer BRS a contention check follows and offending
//!    links are forbidden before re-solving.
//!
//! The integrated approach solves 1+2 and 3+4 as single programs.

mod config;
mod engine;
mod greedy;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

pub use config::{
    apply_brs_sharing, cost_from_counts, total_cost, transit_traffic, BrsSharing, CostBreakdown, LightpathRecord, LinkUsage,
    LspRecord, NetworkConfiguration, PairCapacity, ProtectionLightpath,
};
pub use engine::{EmittedModel, GreedyEngine, MilpEngine, PhaseEngine, PhaseRecord, PhaseResult};
pub use greedy::{greedy_integrated, greedy_logical, greedy_routing, shortest_physical_path};

use crate::error::{Error, Result};
use crate::formulation::{
    compute_exclusion_sets, path_links, protection_lightpath_exclusion, Approach, ExclusionSets, IntegratedPhase, LightpathKey,
    LogicalPhase, Nogood, PhaseLsp, ProblemInstance, RouteRequest, RoutingPhase, Status, SurvivabilityMode, WorkingDesign,
};
use crate::model::{NodeId, PhysicalTopology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    #[default]
    Milp,
    Greedy,
}

#[derive(Debug, Clone)]
pub struct PlanOptions {
    pub gap: f64,
    pub time_limit: Option<Duration>,
    /// Canonical tie-break among equal-cost optima (gap 0 only).
    pub canonical: bool,
    /// Re-solves allowed after a forbidden grouping or a BRS contention.
    pub max_retries: usize,
    pub engine: EngineKind,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions { gap: 0.03, time_limit: Some(Duration::from_secs(300)), canonical: true, max_retries: 3, engine: EngineKind::Milp }
    }
}

impl PlanOptions {
    pub fn exact() -> Self {
        PlanOptions { gap: 0.0, time_limit: None, ..Default::default() }
    }
}

pub fn plan(instance: &ProblemInstance, options: &PlanOptions) -> Result<NetworkConfiguration> {
    match options.engine {
        EngineKind::Milp => {
            let mut engine = MilpEngine::new(options.gap, options.time_limit);
            engine.canonical = options.canonical;
            plan_with(instance, &mut engine, options.max_retries)
        }
        EngineKind::Greedy => plan_with(instance, &mut GreedyEngine, options.max_retries),
    }
}

fn infeasible(phase: &str, retries: usize, detail: impl Into<String>) -> Error {
    Error::Infeasible { phase: phase.to_string(), retries, detail: detail.into() }
}

fn phase_name(base: &str, attempt: usize) -> String {
    if attempt == 0 {
        base.to_string()
    } else {
        format!("{base}-retry{attempt}")
    }
}

fn residual_after(topology: &PhysicalTopology, wavelengths: usize, routes: &[&Vec<NodeId>]) -> Vec<usize> {
    let mut r = vec![wavelengths; topology.link_count()];
    for p in routes {
        for e in path_links(topology, p) {
            r[e] = r[e].saturating_sub(1);
        }
    }
    r
}

fn routable(topology: &PhysicalTopology, key: LightpathKey, ex: &crate::formulation::CarrierExclusion) -> bool {
    shortest_physical_path(topology, key.i, key.j, &ex.nodes, &ex.links, None).is_some()
}

/// Runs the mode's pipeline with the given phase engine.
pub fn plan_with(instance: &ProblemInstance, engine: &mut dyn PhaseEngine, max_retries: usize) -> Result<NetworkConfiguration> {
    let topo = &instance.topology;
    let costs = instance.costs;
    let w_max = instance.params.wavelengths;
    let mode = instance.mode;
    let mut phases = Vec::new();

    // working side
    let working = LogicalPhase::working(instance);
    let (wsol, wpaths) = match instance.approach {
        Approach::Sequential => {
            let r = engine.logical("I", &working)?;
            phases.push(r.record);
            let wsol = r.solution.ok_or_else(|| {
                infeasible("I", 0, "no working logical design fits capacity C, interface limit T and parallel limit Q")
            })?;
            let rp = RoutingPhase {
                prefix: "wlam".into(),
                requests: wsol
                    .lightpaths
                    .iter()
                    .map(|k| RouteRequest {
                        label: format!("w{k}"),
                        source: k.i,
                        destination: k.j,
                        excluded_nodes: BTreeSet::new(),
                        excluded_links: BTreeSet::new(),
                    })
                    .collect(),
                residual: vec![w_max; topo.link_count()],
                wavelength_cost: costs.wavelength,
            };
            let r = engine.routing("III-w", topo, &rp)?;
            phases.push(r.record);
            let paths = r
                .solution
                .ok_or_else(|| infeasible("III-w", 0, format!("{} working lightpaths exceed W = {w_max}", rp.requests.len())))?
                .paths;
            (wsol, paths)
        }
        Approach::Integrated => {
            let ip = IntegratedPhase::working(instance);
            let r = engine.integrated("I-III-w", topo, &ip)?;
            phases.push(r.record);
            let s = r.solution.ok_or_else(|| infeasible("I-III-w", 0, "no working design fits C, T, Q and W"))?;
            (s.logical, s.paths)
        }
    };
    let design = WorkingDesign {
        routes: wsol.routes.iter().enumerate().map(|(k, r)| (working.lsps[k].lsp, r.clone())).collect(),
        lightpaths: wsol.lightpaths.iter().copied().zip(wpaths.iter().cloned()).collect(),
    };
    let mut lsps: Vec<LspRecord> = instance
        .traffic
        .iter()
        .map(|l| LspRecord {
            id: l.id,
            source: l.source,
            destination: l.destination,
            bandwidth: l.bandwidth,
            working: design.routes[&l.id].clone(),
            protection: None,
        })
        .collect();
    let mut lightpaths: Vec<(Status, LightpathKey, Vec<NodeId>)> =
        design.lightpaths.iter().map(|(k, p)| (Status::Working, *k, p.clone())).collect();

    let assemble = |lsps: Vec<LspRecord>, lightpaths, prot, phases| {
        NetworkConfiguration::assemble(mode, instance.approach, topo.clone(), instance.params, costs, lsps, lightpaths, prot, phases)
    };
    if !mode.is_protected() {
        return Ok(assemble(lsps, lightpaths, Vec::new(), phases));
    }

    // protection LSPs
    let ex = compute_exclusion_sets(topo, &design, mode);
    let covered: Vec<usize> = ex.protected().collect();
    if !covered.is_empty() {
        let mut wdeg = vec![0usize; topo.node_count()];
        for k in design.lightpaths.keys() {
            wdeg[k.i] += 1;
            wdeg[k.j] += 1;
        }
        let prot = LogicalPhase {
            status: Status::Protection,
            nodes: topo.node_count(),
            lsps: covered
                .iter()
                .map(|&id| {
                    let l = &instance.traffic[id];
                    PhaseLsp {
                        lsp: id,
                        source: l.source,
                        destination: l.destination,
                        bandwidth: l.bandwidth,
                        excluded: ex.lsp[&id].clone(),
                    }
                })
                .collect(),
            capacity: instance.params.capacity,
            max_parallel: instance.params.max_parallel,
            degree_budget: wdeg.iter().map(|d| instance.params.max_interfaces.saturating_sub(*d)).collect(),
            lightpath_cost: costs.lightpath,
            transit_cost: costs.transit_per_gbps,
            nogoods: Vec::new(),
        };
        let wroutes: Vec<&Vec<NodeId>> = design.lightpaths.values().collect();
        let residual = residual_after(topo, w_max, &wroutes);
        let (psol, ppaths) = match instance.approach {
            Approach::Sequential => protection_sequential(engine, topo, &ex, prot, residual, costs.wavelength, max_retries, &mut phases)?,
            Approach::Integrated => {
                let ip = IntegratedPhase {
                    carrier_exclusions: covered.iter().map(|id| ex.carrier[id].clone()).collect(),
                    logical: prot,
                    residual,
                    wavelength_cost: costs.wavelength,
                };
                let r = engine.integrated("II-III-p", topo, &ip)?;
                phases.push(r.record);
                let s = r.solution.ok_or_else(|| {
                    infeasible("II-III-p", 0, "no protection design satisfies the exclusion sets within C, T, Q and W")
                })?;
                (s.logical, s.paths)
            }
        };
        for (k, r) in psol.routes.into_iter().enumerate() {
            lsps[covered[k]].protection = Some(r);
        }
        lightpaths.extend(psol.lightpaths.into_iter().zip(ppaths).map(|(k, p)| (Status::Protection, k, p)));
    }
    if !mode.is_multilayer() {
        return Ok(assemble(lsps, lightpaths, Vec::new(), phases));
    }

    // protection lightpaths, indexed like the assembled lightpath list
    lightpaths.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let guarded: Vec<usize> = lightpaths
        .iter()
        .enumerate()
        .filter(|(_, l)| l.0 == Status::Working || mode == SurvivabilityMode::MlDoubleProtection)
        .map(|(id, _)| id)
        .collect();
    let routes: Vec<&Vec<NodeId>> = lightpaths.iter().map(|l| &l.2).collect();
    let residual = residual_after(topo, w_max, &routes);
    let mut forbidden: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); guarded.len()];
    // contention-free candidates; the first is sharing withdrawn on the
    // contended links of the unrestricted routing
    let mut candidates: Vec<NetworkConfiguration> = Vec::new();
    for attempt in 0..=max_retries {
        let name = phase_name("IV", attempt);
        let requests: Vec<RouteRequest> = guarded
            .iter()
            .zip(&forbidden)
            .map(|(&id, extra)| {
                let (status, key, route) = &lightpaths[id];
                let base = protection_lightpath_exclusion(topo, route);
                RouteRequest {
                    label: format!("{}{key}", status.prefix()),
                    source: key.i,
                    destination: key.j,
                    excluded_nodes: base.nodes,
                    excluded_links: base.links.union(extra).copied().collect(),
                }
            })
            .collect();
        let rp = RoutingPhase { prefix: "plam".into(), requests, residual: residual.clone(), wavelength_cost: costs.wavelength };
        let r = engine.routing(&name, topo, &rp)?;
        phases.push(r.record);
        let Some(paths) = r.solution else {
            if attempt == 0 {
                return Err(infeasible(
                    "IV",
                    attempt,
                    format!("{} protection lightpaths cannot avoid their working lightpaths within W = {w_max}", guarded.len()),
                ));
            }
            break;
        };
        let prot: Vec<(usize, Vec<NodeId>)> = guarded.iter().copied().zip(paths.paths).collect();
        let mut cfg = assemble(lsps.clone(), lightpaths.clone(), prot, Vec::new());
        if mode != SurvivabilityMode::MlInterlayerBrs {
            cfg.phases = phases;
            return Ok(cfg);
        }
        let clashes = crate::verify::contention_violations(&cfg);
        if clashes.is_empty() {
            candidates.push(cfg);
            break;
        }
        if attempt == 0 {
            let mut fallback = cfg.clone();
            fallback.unshared_links = clashes.iter().map(|c| c.link).collect::<BTreeSet<_>>().into_iter().collect();
            fallback.refresh();
            debug_assert!(crate::verify::contention_violations(&fallback).is_empty());
            candidates.push(fallback);
        }
        for c in clashes {
            for p in c.protection_lightpaths {
                let lp = cfg.protection_lightpaths[p].protects;
                if let Some(r) = guarded.iter().position(|&g| g == lp) {
                    forbidden[r].insert(c.link);
                }
            }
        }
    }
    let mut best = candidates.into_iter().reduce(|a, b| if b.cost.total <= a.cost.total + 1e-9 { b } else { a }).expect("attempt 0 yields a candidate");
    best.phases = phases;
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn protection_sequential(
    engine: &mut dyn PhaseEngine,
    topo: &PhysicalTopology,
    ex: &ExclusionSets,
    mut prot: LogicalPhase,
    residual: Vec<usize>,
    wavelength_cost: f64,
    max_retries: usize,
    phases: &mut Vec<PhaseRecord>,
) -> Result<(crate::formulation::LogicalSolution, Vec<Vec<NodeId>>)> {
    for attempt in 0..=max_retries {
        let r = engine.logical(&phase_name("II", attempt), &prot)?;
        phases.push(r.record);
        let psol = r.solution.ok_or_else(|| {
            infeasible(
                "II",
                attempt,
                format!(
                    "no protection logical design for LSPs {:?} avoids their exclusion sets within C, T and Q",
                    prot.lsps.iter().map(|l| l.lsp).collect::<Vec<_>>()
                ),
            )
        })?;
        let mut carriers: BTreeMap<LightpathKey, Vec<usize>> = BTreeMap::new();
        for (k, route) in psol.routes.iter().enumerate() {
            for h in route {
                carriers.entry(h.key()).or_default().push(k);
            }
        }
        let mut nogoods = Vec::new();
        for (key, ks) in &carriers {
            let ids: Vec<usize> = ks.iter().map(|&k| prot.lsps[k].lsp).collect();
            if routable(topo, *key, &ex.lightpath(key.i, key.j, &ids)) {
                continue;
            }
            let alone: Vec<usize> = ks
                .iter()
                .copied()
                .filter(|&k| !routable(topo, *key, &ex.lightpath(key.i, key.j, &[prot.lsps[k].lsp])))
                .collect();
            if alone.is_empty() {
                nogoods.push(Nogood { i: key.i, j: key.j, lsps: ks.clone() });
            } else {
                nogoods.extend(alone.into_iter().map(|k| Nogood { i: key.i, j: key.j, lsps: vec![k] }));
            }
        }
        if nogoods.is_empty() {
            let requests = psol
                .lightpaths
                .iter()
                .map(|key| {
                    let ids: Vec<usize> = carriers[key].iter().map(|&k| prot.lsps[k].lsp).collect();
                    let e = ex.lightpath(key.i, key.j, &ids);
                    RouteRequest {
                        label: format!("p{key}"),
                        source: key.i,
                        destination: key.j,
                        excluded_nodes: e.nodes,
                        excluded_links: e.links,
                    }
                })
                .collect();
            let rp = RoutingPhase { prefix: "wlam".into(), requests, residual, wavelength_cost };
            let r = engine.routing("III-p", topo, &rp)?;
            phases.push(r.record);
            let paths = r.solution.ok_or_else(|| {
                infeasible("III-p", attempt, format!("{} protection-LSP lightpaths exceed the wavelengths left", rp.requests.len()))
            })?;
            return Ok((psol, paths.paths));
        }
        if attempt == max_retries {
            let groups: Vec<String> = nogoods
                .iter()
                .map(|n| {
                    format!("{}-{} carrying LSPs {:?}", n.i, n.j, n.lsps.iter().map(|&k| prot.lsps[k].lsp).collect::<Vec<_>>())
                })
                .collect();
            return Err(infeasible("II", attempt, format!("exclusions disconnect lightpaths {}", groups.join("; "))));
        }
        prot.nogoods.extend(nogoods);
    }
    unreachable!("loop returns on its last attempt")
}
