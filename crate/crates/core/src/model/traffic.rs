use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::topology::NodeId;

/// A bidirectional, symmetric traffic demand before splitting into LSPs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Demand {
    pub source: NodeId,
    pub destination: NodeId,
    /// Gbps.
    pub bandwidth: f64,
}

/// An indivisible flow routed on a single LSP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LspDemand {
    pub id: usize,
    pub source: NodeId,
    pub destination: NodeId,
    pub bandwidth: f64,
}

/// Each demand of bandwidth `b` becomes `ceil(b / C)` LSPs of equal bandwidth.
pub fn split_demands(demands: &[Demand], capacity: f64) -> Vec<LspDemand> {
    let mut out = Vec::new();
    for d in demands {
        // guard against 30.000000001 / 10 rounding up to 4 parts
        let parts = ((d.bandwidth / capacity) - 1e-9).ceil().max(1.0) as usize;
        let share = d.bandwidth / parts as f64;
        for _ in 0..parts {
            out.push(LspDemand {
                id: out.len(),
                source: d.source,
                destination: d.destination,
                bandwidth: share,
            });
        }
    }
    out
}

/// `count` demands between distinct node pairs drawn without replacement,
/// bandwidths drawn from `bandwidths`. Deterministic in `seed`.
pub fn random_demands(nodes: usize, count: usize, bandwidths: &[f64], seed: u64) -> Vec<Demand> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(NodeId, NodeId)> = (0..nodes).flat_map(|i| (i + 1..nodes).map(move |j| (i, j))).collect();
    pairs.shuffle(&mut rng);
    pairs
        .into_iter()
        .take(count)
        .map(|(a, b)| {
            let (source, destination) = if rand::Rng::gen_bool(&mut rng, 0.5) { (a, b) } else { (b, a) };
            Demand { source, destination, bandwidth: *bandwidths.choose(&mut rng).expect("bandwidth choices") }
        })
        .collect()
}
