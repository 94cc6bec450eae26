use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CostLabel {
    CR1,
    CR2,
    CR3,
    Custom,
}

/// Relative prices of the three priced network elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostRatios {
    /// WDM transponder.
    pub transponder: f64,
    /// IP/optical interface card in a router.
    pub ip_interface: f64,
    /// Photonic OXC port.
    pub oxc_port: f64,
    pub label: CostLabel,
}

impl CostRatios {
    /// Current-price scenario, optical transmission dominated.
    pub const CR1: CostRatios = CostRatios {
        transponder: 1.0,
        ip_interface: 8.0,
        oxc_port: 0.5,
        label: CostLabel::CR1,
    };
    /// Regeneration/adaptation dominated.
    pub const CR2: CostRatios = CostRatios {
        transponder: 8.0,
        ip_interface: 0.5,
        oxc_port: 1.0,
        label: CostLabel::CR2,
    };
    /// Optical switching dominated (opaque OEO architectures).
    pub const CR3: CostRatios = CostRatios {
        transponder: 0.5,
        ip_interface: 1.0,
        oxc_port: 8.0,
        label: CostLabel::CR3,
    };

    pub fn custom(transponder: f64, ip_interface: f64, oxc_port: f64) -> Option<Self> {
        let ok = [transponder, ip_interface, oxc_port]
            .iter()
            .all(|c| c.is_finite() && *c >= 0.0);
        ok.then_some(CostRatios {
            transponder,
            ip_interface,
            oxc_port,
            label: CostLabel::Custom,
        })
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().as_str() {
            "CR1" => Some(Self::CR1),
            "CR2" => Some(Self::CR2),
            "CR3" => Some(Self::CR3),
            _ => None,
        }
    }
}

/// Per-entity costs that enter the objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitCosts {
    /// Cost of one lightpath: two interface cards and two OXC ports.
    pub lightpath: f64,
    /// Cost of one wavelength on one link: two transponders and two OXC ports.
    pub wavelength: f64,
    /// Transit traffic cost per Gbps.
    pub transit_per_gbps: f64,
}

impl UnitCosts {
    pub fn scaled(&self, factor: f64) -> UnitCosts {
        UnitCosts {
            lightpath: self.lightpath * factor,
            wavelength: self.wavelength * factor,
            transit_per_gbps: self.transit_per_gbps * factor,
        }
    }
}

/// `capacity` is the interface card rate C in Gbps and must be positive.
pub fn derive_unit_costs(ratios: &CostRatios, capacity: f64) -> UnitCosts {
    debug_assert!(capacity > 0.0);
    UnitCosts {
        lightpath: 2.0 * (ratios.ip_interface + ratios.oxc_port),
        wavelength: 2.0 * (ratios.oxc_port + ratios.transponder),
        transit_per_gbps: ratios.ip_interface / capacity,
    }
}
