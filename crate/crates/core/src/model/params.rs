use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Lightpath (interface card) capacity C in Gbps.
    pub capacity: f64,
    /// Wavelengths per physical link, W.
    pub wavelengths: usize,
    /// Maximum parallel lightpaths of one status per node pair, Q.
    pub max_parallel: usize,
    /// Maximum IP/optical interfaces per router, T.
    pub max_interfaces: usize,
}

impl SystemParams {
    pub fn default_interfaces(max_parallel: usize, nodes: usize) -> usize {
        2 * max_parallel * nodes.saturating_sub(1)
    }

    /// C = 10 Gbps, W = 32, Q = 2, T = 2Q(N-1).
    pub fn standard(nodes: usize) -> Self {
        SystemParams {
            capacity: 10.0,
            wavelengths: 32,
            max_parallel: 2,
            max_interfaces: Self::default_interfaces(2, nodes),
        }
    }

    pub fn check(&self) -> Result<(), String> {
        if !(self.capacity > 0.0 && self.capacity.is_finite()) {
            return Err(format!("lightpath capacity must be positive, got {}", self.capacity));
        }
        if !(1..=2).contains(&self.max_parallel) {
            return Err(format!("Q must be 1 or 2, got {}", self.max_parallel));
        }
        Ok(())
    }
}
