use std::collections::BTreeSet;
use std::fmt;

use petgraph::algo::articulation_points::articulation_points;
use petgraph::algo::connected_components;
use petgraph::graph::UnGraph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Undirected fiber link, stored with the smaller endpoint first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Link(pub NodeId, pub NodeId);

impl Link {
    pub fn new(a: NodeId, b: NodeId) -> Self {
        if a <= b {
            Link(a, b)
        } else {
            Link(b, a)
        }
    }

    pub fn touches(&self, n: NodeId) -> bool {
        self.0 == n || self.1 == n
    }

    pub fn other(&self, n: NodeId) -> NodeId {
        if self.0 == n {
            self.1
        } else {
            self.0
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// Nodes are combined router + OXC sites addressed by index; `names` keeps
/// the labels from the instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalTopology {
    pub names: Vec<String>,
    pub links: Vec<Link>,
    pub wavelengths: usize,
}

impl PhysicalTopology {
    pub fn new(n: usize, links: impl IntoIterator<Item = (NodeId, NodeId)>, wavelengths: usize) -> Self {
        PhysicalTopology {
            names: (0..n).map(|i| i.to_string()).collect(),
            links: links.into_iter().map(|(a, b)| Link::new(a, b)).collect(),
            wavelengths,
        }
    }

    pub fn ring(n: usize, wavelengths: usize) -> Self {
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)), wavelengths)
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn link_index(&self, a: NodeId, b: NodeId) -> Option<usize> {
        let l = Link::new(a, b);
        self.links.iter().position(|x| *x == l)
    }

    pub fn neighbors(&self, n: NodeId) -> impl Iterator<Item = (NodeId, usize)> + '_ {
        self.links
            .iter()
            .enumerate()
            .filter(move |(_, l)| l.touches(n))
            .map(move |(e, l)| (l.other(n), e))
    }

    /// Directed arcs (both orientations of every link) in link order.
    pub fn arcs(&self) -> Vec<(NodeId, NodeId, usize)> {
        self.links
            .iter()
            .enumerate()
            .flat_map(|(e, l)| [(l.0, l.1, e), (l.1, l.0, e)])
            .collect()
    }

    fn graph(&self) -> UnGraph<(), ()> {
        let mut g = UnGraph::<(), ()>::with_capacity(self.node_count(), self.link_count());
        for _ in 0..self.node_count() {
            g.add_node(());
        }
        for l in &self.links {
            if l.0 != l.1 && l.1 < self.node_count() {
                g.add_edge((l.0 as u32).into(), (l.1 as u32).into(), ());
            }
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TopologyViolation {
    UnknownNode { link: usize },
    SelfLoop { node: NodeId },
    MultipleLinks { a: NodeId, b: NodeId },
    Disconnected,
    NotBiconnected { articulation_nodes: Vec<NodeId> },
    TooFewNodes,
}

impl fmt::Display for TopologyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyViolation::UnknownNode { link } => write!(f, "link #{link} references an unknown node"),
            TopologyViolation::SelfLoop { node } => write!(f, "self-loop at node {node}"),
            TopologyViolation::MultipleLinks { a, b } => write!(f, "multiple links between {a} and {b}"),
            TopologyViolation::Disconnected => write!(f, "not connected"),
            TopologyViolation::NotBiconnected { articulation_nodes } => {
                write!(f, "not bi-connected (articulation nodes {articulation_nodes:?})")
            }
            TopologyViolation::TooFewNodes => write!(f, "fewer than 3 nodes"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub violations: Vec<TopologyViolation>,
}

impl TopologyReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_topology(topology: &PhysicalTopology) -> TopologyReport {
    let n = topology.node_count();
    let mut violations = Vec::new();
    if n < 3 {
        violations.push(TopologyViolation::TooFewNodes);
    }
    let mut seen = BTreeSet::new();
    for (e, l) in topology.links.iter().enumerate() {
        if l.1 >= n {
            violations.push(TopologyViolation::UnknownNode { link: e });
        } else if l.0 == l.1 {
            violations.push(TopologyViolation::SelfLoop { node: l.0 });
        } else if !seen.insert(*l) {
            violations.push(TopologyViolation::MultipleLinks { a: l.0, b: l.1 });
        }
    }
    if n > 0 {
        let g = topology.graph();
        if connected_components(&g) > 1 {
            violations.push(TopologyViolation::Disconnected);
        } else {
            let mut cut: Vec<NodeId> = articulation_points(&g).into_iter().map(|v| v.index()).collect();
            if !cut.is_empty() {
                cut.sort_unstable();
                violations.push(TopologyViolation::NotBiconnected { articulation_nodes: cut });
            }
        }
    }
    TopologyReport { violations }
}

/// Average node degree 2E/N.
pub fn average_connectivity(topology: &PhysicalTopology) -> f64 {
    2.0 * topology.link_count() as f64 / topology.node_count() as f64
}

/// Random bi-connected topology with `round(n * degree / 2)` links: a random
/// Hamiltonian cycle plus uniformly drawn chords. Deterministic in `seed`.
pub fn generate_topology(n: usize, degree: f64, seed: u64) -> Result<PhysicalTopology> {
    if n < 3 {
        return Err(Error::Topology(format!("need at least 3 nodes, got {n}")));
    }
    if !(2.0..=(n as f64 - 1.0)).contains(&degree) {
        return Err(Error::Topology(format!(
            "average connectivity {degree} outside [2, {}]",
            n - 1
        )));
    }
    let target = (n as f64 * degree / 2.0).round() as usize;
    let max_links = n * (n - 1) / 2;
    let target = target.clamp(n, max_links);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut links: BTreeSet<Link> = (0..n).map(|i| Link::new(order[i], order[(i + 1) % n])).collect();
    while links.len() < target {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            // duplicates are simply redrawn
            links.insert(Link::new(a, b));
        }
    }
    Ok(PhysicalTopology {
        names: (0..n).map(|i| i.to_string()).collect(),
        links: links.into_iter().collect(),
        wavelengths: 32,
    })
}
