//! Instance files: topology, parameters, cost ratio and demands as JSON.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::cost::{CostRatios, UnitCosts};
use super::params::SystemParams;
use super::topology::{validate_topology, Link, PhysicalTopology};
use super::traffic::{split_demands, Demand, LspDemand};
use crate::error::{Error, Result};
use crate::model::derive_unit_costs;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeLabel {
    Int(i64),
    Name(String),
}

impl NodeLabel {
    fn key(&self) -> String {
        match self {
            NodeLabel::Int(i) => i.to_string(),
            NodeLabel::Name(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsRecord {
    #[serde(rename = "C")]
    pub capacity: f64,
    #[serde(rename = "W")]
    pub wavelengths: usize,
    #[serde(rename = "Q")]
    pub max_parallel: usize,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub max_interfaces: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CostRatioSpec {
    Named(String),
    Custom {
        #[serde(rename = "c_TR")]
        transponder: f64,
        #[serde(rename = "c_P_IP")]
        ip_interface: f64,
        #[serde(rename = "c_P_OXC")]
        oxc_port: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandRecord {
    pub s: NodeLabel,
    pub d: NodeLabel,
    pub b: f64,
}

/// On-disk layout of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub nodes: Vec<NodeLabel>,
    pub links: Vec<[NodeLabel; 2]>,
    pub params: ParamsRecord,
    pub cost_ratio: CostRatioSpec,
    pub demands: Vec<DemandRecord>,
}

/// A validated, index-addressed design instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub topology: PhysicalTopology,
    pub params: SystemParams,
    pub ratios: CostRatios,
    pub demands: Vec<Demand>,
    pub lsps: Vec<LspDemand>,
}

impl Instance {
    /// Builds an instance from indexed parts, splitting demands into LSPs.
    pub fn new(topology: PhysicalTopology, params: SystemParams, ratios: CostRatios, demands: Vec<Demand>) -> Result<Self> {
        params.check().map_err(Error::Instance)?;
        let n = topology.node_count();
        for d in &demands {
            if d.source >= n || d.destination >= n {
                return Err(Error::Instance(format!("demand {d:?} references an unknown node")));
            }
            if d.source == d.destination {
                return Err(Error::Instance(format!("demand {d:?} has equal endpoints")));
            }
            if !(d.bandwidth > 0.0) {
                return Err(Error::Instance(format!("demand {d:?} has non-positive bandwidth")));
            }
        }
        let report = validate_topology(&topology);
        if !report.is_ok() {
            let msg: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::Topology(msg.join("; ")));
        }
        let mut topology = topology;
        topology.wavelengths = params.wavelengths;
        let lsps = split_demands(&demands, params.capacity);
        Ok(Instance { topology, params, ratios, demands, lsps })
    }

    pub fn unit_costs(&self) -> UnitCosts {
        derive_unit_costs(&self.ratios, self.params.capacity)
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, label) in file.nodes.iter().enumerate() {
            if index.insert(label.key(), i).is_some() {
                return Err(Error::Instance(format!("duplicate node `{}`", label.key())));
            }
        }
        let lookup = |l: &NodeLabel| {
            index
                .get(&l.key())
                .copied()
                .ok_or_else(|| Error::Instance(format!("unknown node `{}`", l.key())))
        };
        let mut links = Vec::with_capacity(file.links.len());
        for [a, b] in &file.links {
            links.push(Link::new(lookup(a)?, lookup(b)?));
        }
        let p = &file.params;
        let n = file.nodes.len();
        let params = SystemParams {
            capacity: p.capacity,
            wavelengths: p.wavelengths,
            max_parallel: p.max_parallel,
            max_interfaces: p
                .max_interfaces
                .unwrap_or_else(|| SystemParams::default_interfaces(p.max_parallel, n)),
        };
        let ratios = match &file.cost_ratio {
            CostRatioSpec::Named(name) => CostRatios::by_name(name)
                .ok_or_else(|| Error::Instance(format!("unknown cost ratio `{name}`")))?,
            CostRatioSpec::Custom { transponder, ip_interface, oxc_port } => {
                CostRatios::custom(*transponder, *ip_interface, *oxc_port)
                    .ok_or_else(|| Error::Instance("cost ratios must be non-negative".into()))?
            }
        };
        let mut demands = Vec::with_capacity(file.demands.len());
        for d in &file.demands {
            demands.push(Demand { source: lookup(&d.s)?, destination: lookup(&d.d)?, bandwidth: d.b });
        }
        let topology = PhysicalTopology {
            names: file.nodes.iter().map(NodeLabel::key).collect(),
            links,
            wavelengths: params.wavelengths,
        };
        Instance::new(topology, params, ratios, demands)
    }

    pub fn to_file(&self) -> InstanceFile {
        let label = |i: usize| NodeLabel::Name(self.topology.names[i].clone());
        InstanceFile {
            description: None,
            nodes: (0..self.topology.node_count()).map(label).collect(),
            links: self.topology.links.iter().map(|l| [label(l.0), label(l.1)]).collect(),
            params: ParamsRecord {
                capacity: self.params.capacity,
                wavelengths: self.params.wavelengths,
                max_parallel: self.params.max_parallel,
                max_interfaces: Some(self.params.max_interfaces),
            },
            cost_ratio: match self.ratios.label {
                crate::model::CostLabel::Custom => CostRatioSpec::Custom {
                    transponder: self.ratios.transponder,
                    ip_interface: self.ratios.ip_interface,
                    oxc_port: self.ratios.oxc_port,
                },
                l => CostRatioSpec::Named(format!("{l:?}")),
            },
            demands: self
                .demands
                .iter()
                .map(|d| DemandRecord { s: label(d.source), d: label(d.destination), b: d.bandwidth })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
