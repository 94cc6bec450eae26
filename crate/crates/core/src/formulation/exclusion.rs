use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{hop_nodes, path_links, transit_nodes, CarrierExclusion, Hop, LightpathKey, SurvivabilityMode};
use crate::model::{NodeId, PhysicalTopology};

/// Working-side results the protection phases depend on.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WorkingDesign {
    /// Logical route per LSP id.
    pub routes: BTreeMap<usize, Vec<Hop>>,
    /// Physical route of each working lightpath.
    pub lightpaths: BTreeMap<LightpathKey, Vec<NodeId>>,
}

impl WorkingDesign {
    pub fn is_multi_hop(&self, lsp: usize) -> bool {
        self.routes.get(&lsp).is_some_and(|r| r.len() >= 2)
    }

    /// Routers the LSP passes through electronically.
    pub fn logical_transit(&self, lsp: usize) -> BTreeSet<NodeId> {
        transit_nodes(&hop_nodes(&self.routes[&lsp]))
    }

    /// OXCs the LSP's lightpaths pass through optically.
    pub fn optical_transit(&self, lsp: usize) -> BTreeSet<NodeId> {
        self.routes[&lsp]
            .iter()
            .flat_map(|h| transit_nodes(self.lightpaths.get(&h.key()).map_or(&[][..], |p| p)))
            .collect()
    }

    pub fn physical_links(&self, topology: &PhysicalTopology, lsp: usize) -> BTreeSet<usize> {
        self.routes[&lsp]
            .iter()
            .filter_map(|h| self.lightpaths.get(&h.key()))
            .flat_map(|p| path_links(topology, p))
            .collect()
    }
}

/// Node sets protection routes must avoid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExclusionSets {
    /// Logical exclusions per protected LSP id.
    pub lsp: BTreeMap<usize, BTreeSet<NodeId>>,
    /// Physical exclusions for any lightpath carrying that LSP's protection.
    pub carrier: BTreeMap<usize, CarrierExclusion>,
}

impl ExclusionSets {
    pub fn protected(&self) -> impl Iterator<Item = usize> + '_ {
        self.lsp.keys().copied()
    }

    /// Exclusions of a lightpath between `i` and `j` carrying `lsps`.
    pub fn lightpath(&self, i: NodeId, j: NodeId, lsps: &[usize]) -> CarrierExclusion {
        let mut out = CarrierExclusion::default();
        for k in lsps {
            if let Some(c) = self.carrier.get(k) {
                out.nodes.extend(c.nodes.iter().copied());
                out.links.extend(c.links.iter().copied());
            }
        }
        out.nodes.remove(&i);
        out.nodes.remove(&j);
        out
    }
}

/// Protection-route exclusions for every LSP the mode protects.
///
/// All modes exclude the working route's logical transit routers from the
/// protection LSP. Single-layer, spare-unprotected and BRS also exclude
/// the OXCs the working lightpaths pass through, and require lightpaths that
/// carry the protection LSP to avoid every physical transit node of the
/// working LSP. Single layer additionally keeps those lightpaths off the
/// working LSP's fibers.
pub fn compute_exclusion_sets(topology: &PhysicalTopology, design: &WorkingDesign, mode: SurvivabilityMode) -> ExclusionSets {
    let mut out = ExclusionSets::default();
    if !mode.is_protected() {
        return out;
    }
    for (&lsp, route) in &design.routes {
        if route.is_empty() || (mode.is_multilayer() && route.len() < 2) {
            continue;
        }
        let nodes = hop_nodes(route);
        let (s, d) = (nodes[0], *nodes.last().unwrap());
        let mut logical = design.logical_transit(lsp);
        let optical = design.optical_transit(lsp);
        let physical_rule = mode != SurvivabilityMode::MlDoubleProtection;
        if physical_rule {
            logical.extend(optical.iter().copied());
        }
        logical.remove(&s);
        logical.remove(&d);
        out.lsp.insert(lsp, logical.clone());
        let carrier = match mode {
            SurvivabilityMode::SingleLayer => CarrierExclusion { nodes: logical, links: design.physical_links(topology, lsp) },
            SurvivabilityMode::MlSpareUnprotected | SurvivabilityMode::MlInterlayerBrs => {
                CarrierExclusion { nodes: logical, links: BTreeSet::new() }
            }
            _ => CarrierExclusion::default(),
        };
        out.carrier.insert(lsp, carrier);
    }
    out
}

/// A protection lightpath avoids the transit OXCs and fibers of the
/// lightpath it protects.
pub fn protection_lightpath_exclusion(topology: &PhysicalTopology, route: &[NodeId]) -> CarrierExclusion {
    CarrierExclusion { nodes: transit_nodes(route), links: path_links(topology, route).into_iter().collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring_design(route: Vec<Hop>, lps: &[(LightpathKey, Vec<NodeId>)]) -> WorkingDesign {
        WorkingDesign { routes: BTreeMap::from([(0, route)]), lightpaths: lps.iter().cloned().collect() }
    }

    #[test]
    fn single_layer_excludes_logical_transit() {
        let t = PhysicalTopology::ring(4, 8);
        let d = ring_design(
            vec![Hop { from: 0, to: 1, q: 1 }, Hop { from: 1, to: 2, q: 1 }],
            &[(LightpathKey::new(0, 1, 1), vec![0, 1]), (LightpathKey::new(1, 2, 1), vec![1, 2])],
        );
        let ex = compute_exclusion_sets(&t, &d, SurvivabilityMode::SingleLayer);
        assert!(ex.lsp[&0].contains(&1));
        assert_eq!(ex.carrier[&0].links.len(), 2);
    }

    #[test]
    fn spare_unprotected_excludes_optical_transit() {
        let t = PhysicalTopology::ring(4, 8);
        let key = LightpathKey::new(0, 2, 1);
        // single-hop: not protected in multilayer modes
        let d = ring_design(vec![Hop { from: 0, to: 2, q: 1 }], &[(key, vec![0, 1, 2])]);
        assert!(compute_exclusion_sets(&t, &d, SurvivabilityMode::MlSpareUnprotected).lsp.is_empty());
        // the protection lightpath of that working lightpath avoids node 1
        let p = protection_lightpath_exclusion(&t, &[0, 1, 2]);
        assert_eq!(p.nodes, BTreeSet::from([1]));
        // two-hop LSP whose first lightpath transits OXC 1
        let d = ring_design(
            vec![Hop { from: 0, to: 2, q: 1 }, Hop { from: 2, to: 3, q: 1 }],
            &[(key, vec![0, 1, 2]), (LightpathKey::new(2, 3, 1), vec![2, 3])],
        );
        let su = compute_exclusion_sets(&t, &d, SurvivabilityMode::MlSpareUnprotected);
        assert_eq!(su.lsp[&0], BTreeSet::from([1, 2]));
        let dp = compute_exclusion_sets(&t, &d, SurvivabilityMode::MlDoubleProtection);
        assert_eq!(dp.lsp[&0], BTreeSet::from([2]));
        assert!(dp.carrier[&0].nodes.is_empty());
    }

    #[test]
    fn endpoints_never_excluded() {
        let t = PhysicalTopology::ring(4, 8);
        // lightpath 0-1 routed the long way through 3 and 2, LSP 0 -> 1 -> 2
        let d = ring_design(
            vec![Hop { from: 0, to: 1, q: 1 }, Hop { from: 1, to: 2, q: 1 }],
            &[(LightpathKey::new(0, 1, 1), vec![0, 3, 2, 1]), (LightpathKey::new(1, 2, 1), vec![1, 2])],
        );
        let ex = compute_exclusion_sets(&t, &d, SurvivabilityMode::SingleLayer);
        assert!(!ex.lsp[&0].contains(&0) && !ex.lsp[&0].contains(&2));
        let lp = ex.lightpath(0, 3, &[0]);
        assert!(!lp.nodes.contains(&0) && !lp.nodes.contains(&3));
    }
}
