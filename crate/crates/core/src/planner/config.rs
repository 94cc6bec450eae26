use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::formulation::{hop_nodes, path_links, transit_nodes, Approach, Hop, LightpathKey, Status, SurvivabilityMode};
use crate::model::{NodeId, PhysicalTopology, SystemParams, UnitCosts};

use super::engine::PhaseRecord;

/// An MPLS-layer lightpath: a logical link that LSPs ride.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightpathRecord {
    pub id: usize,
    pub key: LightpathKey,
    pub status: Status,
    /// Physical node sequence from `key.i` to `key.j`.
    pub route: Vec<NodeId>,
    /// LSP ids routed over this lightpath.
    pub carries: Vec<usize>,
    /// Reserved bandwidth, Gbps.
    pub load: f64,
    /// Id of the protection lightpath guarding it, if any.
    pub protection: Option<usize>,
}

/// Optical-layer backup for one MPLS-layer lightpath.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtectionLightpath {
    pub id: usize,
    /// Id of the protected lightpath.
    pub protects: usize,
    pub route: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LspRecord {
    pub id: usize,
    pub source: NodeId,
    pub destination: NodeId,
    pub bandwidth: f64,
    pub working: Vec<Hop>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protection: Option<Vec<Hop>>,
}

impl LspRecord {
    pub fn is_multi_hop(&self) -> bool {
        self.working.len() >= 2
    }
}

/// Lightpath counts per node pair: w_(i,j) and s_(i,j).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCapacity {
    pub i: NodeId,
    pub j: NodeId,
    pub working: usize,
    pub spare: usize,
}

/// Wavelengths per physical link.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkUsage {
    pub link: usize,
    pub a: NodeId,
    pub b: NodeId,
    /// Lightpaths carrying working LSPs (w_e1).
    pub working: usize,
    /// Lightpaths carrying protection LSPs (w_e2).
    pub spare_mpls: usize,
    /// Protection lightpaths (s_e).
    pub protection: usize,
    /// Wavelengths charged on the link.
    pub total: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrsSharing {
    pub extra_wavelengths: usize,
    pub reuse_factor: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub transit_traffic: f64,
    pub lightpaths: usize,
    /// Lightpaths carrying protection LSPs.
    pub protection_carrying: usize,
    pub wavelengths: usize,
    /// BRS: wavelengths of protection-LSP lightpaths outside the shared pool.
    pub extra_wavelengths: usize,
    pub transit_cost: f64,
    pub lightpath_cost: f64,
    /// Optical layer cost.
    pub wavelength_cost: f64,
    pub total: f64,
}

/// Prices resource counts with the objective's three terms.
pub fn cost_from_counts(lightpaths: usize, wavelengths: usize, transit: f64, costs: &UnitCosts) -> CostBreakdown {
    let transit_cost = costs.transit_per_gbps * transit;
    let lightpath_cost = costs.lightpath * lightpaths as f64;
    let wavelength_cost = costs.wavelength * wavelengths as f64;
    CostBreakdown {
        transit_traffic: transit,
        lightpaths,
        wavelengths,
        transit_cost,
        lightpath_cost,
        wavelength_cost,
        total: transit_cost + lightpath_cost + wavelength_cost,
        ..Default::default()
    }
}

/// A complete two-layer design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfiguration {
    pub mode: SurvivabilityMode,
    pub approach: Approach,
    pub topology: PhysicalTopology,
    pub params: SystemParams,
    pub costs: UnitCosts,
    /// Working lightpaths first, then protection-LSP lightpaths, each sorted by key.
    pub lightpaths: Vec<LightpathRecord>,
    pub protection_lightpaths: Vec<ProtectionLightpath>,
    pub lsps: Vec<LspRecord>,
    pub pair_capacity: Vec<PairCapacity>,
    pub link_usage: Vec<LinkUsage>,
    /// Δ_n per node.
    pub transit: Vec<f64>,
    pub transit_total: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brs: Option<BrsSharing>,
    /// BRS links where sharing is withdrawn to avoid pool contention.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unshared_links: Vec<usize>,
    pub cost: CostBreakdown,
    #[serde(default)]
    pub phases: Vec<PhaseRecord>,
}

impl NetworkConfiguration {
    /// Assembles a configuration from routes and fills in every derived field.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        mode: SurvivabilityMode,
        approach: Approach,
        topology: PhysicalTopology,
        params: SystemParams,
        costs: UnitCosts,
        lsps: Vec<LspRecord>,
        lightpath_routes: Vec<(Status, LightpathKey, Vec<NodeId>)>,
        protection_routes: Vec<(usize, Vec<NodeId>)>,
        phases: Vec<PhaseRecord>,
    ) -> Self {
        let mut lps: Vec<(Status, LightpathKey, Vec<NodeId>)> = lightpath_routes;
        lps.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut lightpaths: Vec<LightpathRecord> = lps
            .into_iter()
            .enumerate()
            .map(|(id, (status, key, route))| LightpathRecord { id, key, status, route, carries: Vec::new(), load: 0.0, protection: None })
            .collect();
        let index: BTreeMap<(Status, LightpathKey), usize> =
            lightpaths.iter().map(|l| ((l.status, l.key), l.id)).collect();
        for l in &lsps {
            for h in &l.working {
                if let Some(&id) = index.get(&(Status::Working, h.key())) {
                    lightpaths[id].carries.push(l.id);
                    lightpaths[id].load += l.bandwidth;
                }
            }
            for h in l.protection.iter().flatten() {
                if let Some(&id) = index.get(&(Status::Protection, h.key())) {
                    lightpaths[id].carries.push(l.id);
                    lightpaths[id].load += l.bandwidth;
                }
            }
        }
        let mut prot: Vec<(usize, Vec<NodeId>)> = protection_routes;
        prot.sort_by_key(|p| p.0);
        let protection_lightpaths: Vec<ProtectionLightpath> = prot
            .into_iter()
            .enumerate()
            .map(|(id, (protects, route))| ProtectionLightpath { id, protects, route })
            .collect();
        for p in &protection_lightpaths {
            lightpaths[p.protects].protection = Some(p.id);
        }
        let mut cfg = NetworkConfiguration {
            mode,
            approach,
            topology,
            params,
            costs,
            lightpaths,
            protection_lightpaths,
            lsps,
            pair_capacity: Vec::new(),
            link_usage: Vec::new(),
            transit: Vec::new(),
            transit_total: 0.0,
            brs: None,
            unshared_links: Vec::new(),
            cost: CostBreakdown::default(),
            phases,
        };
        cfg.refresh();
        cfg
    }

    /// Recomputes capacities, transit, sharing and cost from the routes.
    pub fn refresh(&mut self) {
        let mut pairs: BTreeMap<(NodeId, NodeId), (usize, usize)> = BTreeMap::new();
        for l in &self.lightpaths {
            let e = pairs.entry((l.key.i, l.key.j)).or_default();
            match l.status {
                Status::Working => e.0 += 1,
                Status::Protection => e.1 += 1,
            }
        }
        self.pair_capacity =
            pairs.into_iter().map(|((i, j), (w, s))| PairCapacity { i, j, working: w, spare: s }).collect();
        let (transit, total) = transit_traffic(self);
        self.transit = transit;
        self.transit_total = total;
        let sharing = apply_brs_sharing(self);
        self.brs = (self.mode == SurvivabilityMode::MlInterlayerBrs).then_some(sharing);
        self.cost = total_cost(self);
    }

    pub fn lightpath(&self, status: Status, key: LightpathKey) -> Option<&LightpathRecord> {
        self.lightpaths.iter().find(|l| l.status == status && l.key == key)
    }

    pub fn wavelength_count(&self) -> usize {
        self.link_usage.iter().map(|u| u.total).sum()
    }

    /// Lightpaths in the MPLS layer (working plus protection-LSP carriers).
    pub fn mpls_lightpath_count(&self) -> usize {
        self.lightpaths.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serialises")
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Δ_n = incoming LSP bandwidth at n minus bandwidth terminating at n,
/// counting working and protection routes.
pub fn transit_traffic(cfg: &NetworkConfiguration) -> (Vec<f64>, f64) {
    let mut delta = vec![0.0; cfg.topology.node_count()];
    for l in &cfg.lsps {
        for route in std::iter::once(&l.working).chain(l.protection.iter()) {
            for n in transit_nodes(&hop_nodes(route)) {
                delta[n] += l.bandwidth;
            }
        }
    }
    let total = delta.iter().sum();
    (delta, total)
}

/// Per-link wavelength counts. Under interlayer BRS a link carries
/// w_e1 + max(s_e, w_e2); otherwise, and on BRS links listed as unshared,
/// w_e1 + w_e2 + s_e. The updated counts are written to `cfg.link_usage`.
pub fn apply_brs_sharing(cfg: &mut NetworkConfiguration) -> BrsSharing {
    let topo = &cfg.topology;
    let mut usage: Vec<LinkUsage> = topo
        .links
        .iter()
        .enumerate()
        .map(|(e, l)| LinkUsage { link: e, a: l.0, b: l.1, working: 0, spare_mpls: 0, protection: 0, total: 0 })
        .collect();
    for l in &cfg.lightpaths {
        for e in path_links(topo, &l.route) {
            match l.status {
                Status::Working => usage[e].working += 1,
                Status::Protection => usage[e].spare_mpls += 1,
            }
        }
    }
    for p in &cfg.protection_lightpaths {
        for e in path_links(topo, &p.route) {
            usage[e].protection += 1;
        }
    }
    let brs = cfg.mode == SurvivabilityMode::MlInterlayerBrs;
    let mut extra = 0;
    let mut spare_total = 0;
    for u in &mut usage {
        let shared = brs && !cfg.unshared_links.contains(&u.link);
        spare_total += u.spare_mpls;
        if shared {
            extra += u.spare_mpls.saturating_sub(u.protection);
            u.total = u.working + u.protection.max(u.spare_mpls);
        } else {
            extra += u.spare_mpls;
            u.total = u.working + u.spare_mpls + u.protection;
        }
    }
    cfg.link_usage = usage;
    let reuse_factor = if spare_total == 0 { 1.0 } else { 1.0 - extra as f64 / spare_total as f64 };
    BrsSharing { extra_wavelengths: extra, reuse_factor }
}

/// Prices the configuration from its routes alone.
pub fn total_cost(cfg: &NetworkConfiguration) -> CostBreakdown {
    let mut probe = cfg.clone();
    let sharing = apply_brs_sharing(&mut probe);
    let wavelengths = probe.wavelength_count();
    let (_, transit) = transit_traffic(cfg);
    let lightpaths = cfg.lightpaths.len() + cfg.protection_lightpaths.len();
    let mut c = cost_from_counts(lightpaths, wavelengths, transit, &cfg.costs);
    c.protection_carrying = cfg.lightpaths.iter().filter(|l| l.status == Status::Protection).count();
    if cfg.mode == SurvivabilityMode::MlInterlayerBrs {
        c.extra_wavelengths = sharing.extra_wavelengths;
    }
    c
}
