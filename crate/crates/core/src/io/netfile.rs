//! JSON network files (schema version 1).
//!
//! ```json
//! {
//!   "version": 1,
//!   "nodes": [{"id": "a", "x": 0.0, "y": 0.0}, {"id": 2}],
//!   "edges": [{"tail": "a", "head": 2, "length": 10.0, "k": 2.0, "area": 2.5}],
//!   "boundary": {"inflow": ["a"], "outflow": [2]},
//!   "fixed": {"a": 10.0}
//! }
//! ```
//!
//! Node ids may be strings or integers; `1` and `"1"` name the same node.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::InputError;
use crate::error::{NetworkError, ReductionError};
use crate::network::{Edge, Network, Node};
use crate::reduction::BoundarySpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeId {
    Int(i64),
    Str(String),
}

impl NodeId {
    pub fn key(&self) -> String {
        match self {
            NodeId::Int(i) => i.to_string(),
            NodeId::Str(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub tail: NodeId,
    pub head: NodeId,
    pub length: f64,
    pub k: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundaryRecord {
    #[serde(default)]
    pub inflow: Vec<NodeId>,
    #[serde(default)]
    pub outflow: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub version: u32,
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
    pub boundary: BoundaryRecord,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fixed: BTreeMap<String, f64>,
}

/// A parsed network with the dense-index ↔ external-id table.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedNetwork {
    pub network: Network,
    pub boundary: BoundarySpec,
    pub node_ids: Vec<String>,
}

impl LoadedNetwork {
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.node_ids.iter().position(|s| s == id)
    }
}

pub fn parse_network(path: impl AsRef<Path>) -> Result<LoadedNetwork, InputError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| InputError::Read { path: path.display().to_string(), source })?;
    parse_network_str(&text)
}

pub fn parse_network_str(text: &str) -> Result<LoadedNetwork, InputError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: NetworkFile = serde_path_to_error::deserialize(de).map_err(|e| InputError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    file.into_loaded()
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> InputError {
    InputError::Schema { path: path.into(), message: message.into() }
}

impl NetworkFile {
    pub fn into_loaded(self) -> Result<LoadedNetwork, InputError> {
        if self.version != SCHEMA_VERSION {
            return Err(schema("version", format!("unsupported schema version {}", self.version)));
        }
        let mut index: HashMap<String, usize> = HashMap::with_capacity(self.nodes.len());
        let mut node_ids = Vec::with_capacity(self.nodes.len());
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (i, rec) in self.nodes.iter().enumerate() {
            let key = rec.id.key();
            if index.insert(key.clone(), i).is_some() {
                return Err(InputError::DuplicateId(key));
            }
            let position = match (rec.x, rec.y) {
                (Some(x), Some(y)) => Some([x, y]),
                (None, None) => None,
                _ => return Err(schema(format!("nodes[{i}]"), "x and y must be given together")),
            };
            node_ids.push(key);
            nodes.push(Node { position });
        }
        let lookup = |id: &NodeId, path: String| -> Result<usize, InputError> {
            index.get(&id.key()).copied().ok_or(InputError::UnknownId { path, id: id.key() })
        };

        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, rec) in self.edges.iter().enumerate() {
            let tail = lookup(&rec.tail, format!("edges[{i}].tail"))?;
            let head = lookup(&rec.head, format!("edges[{i}].head"))?;
            edges.push(Edge { tail, head, length: rec.length, conductivity: rec.k, area: rec.area });
        }
        let network = Network::new(nodes, edges).map_err(|e| {
            let (edge, field) = match &e {
                NetworkError::DanglingNode { edge, .. } | NetworkError::SelfLoop { edge, .. } => (*edge, "head"),
                NetworkError::NonPositiveLength { edge, .. } => (*edge, "length"),
                NetworkError::NonPositiveConductivity { edge, .. } => (*edge, "k"),
                NetworkError::NonPositiveArea { edge, .. } => (*edge, "area"),
            };
            schema(format!("edges[{edge}].{field}"), e.to_string())
        })?;

        let mut boundary = BoundarySpec::default();
        for (i, id) in self.boundary.inflow.iter().enumerate() {
            boundary.inflow.insert(lookup(id, format!("boundary.inflow[{i}]"))?);
        }
        for (i, id) in self.boundary.outflow.iter().enumerate() {
            boundary.outflow.insert(lookup(id, format!("boundary.outflow[{i}]"))?);
        }
        for (key, &value) in &self.fixed {
            let v = lookup(&NodeId::Str(key.clone()), format!("fixed.{key}"))?;
            boundary.fixed.insert(v, value);
        }
        boundary.validate(&network).map_err(|e| match e {
            ReductionError::InflowOutflowOverlap { node } => schema(
                "boundary",
                format!("node {} is listed as both inflow and outflow", node_ids[node]),
            ),
            other => schema("fixed", other.to_string()),
        })?;
        Ok(LoadedNetwork { network, boundary, node_ids })
    }

    /// Serializable form of a network; ids default to the dense indices.
    pub fn from_network(net: &Network, bspec: &BoundarySpec, ids: Option<&[String]>) -> Self {
        let id = |v: usize| match ids {
            Some(ids) => NodeId::Str(ids[v].clone()),
            None => NodeId::Int(v as i64),
        };
        let nodes = net
            .nodes()
            .iter()
            .enumerate()
            .map(|(v, n)| NodeRecord { id: id(v), x: n.position.map(|p| p[0]), y: n.position.map(|p| p[1]) })
            .collect();
        let edges = net
            .edges()
            .iter()
            .map(|e| EdgeRecord { tail: id(e.tail), head: id(e.head), length: e.length, k: e.conductivity, area: e.area })
            .collect();
        let boundary = BoundaryRecord {
            inflow: bspec.inflow.iter().map(|&v| id(v)).collect(),
            outflow: bspec.outflow.iter().map(|&v| id(v)).collect(),
        };
        let fixed = bspec.fixed.iter().map(|(&v, &val)| (id(v).key(), val)).collect();
        Self { version: SCHEMA_VERSION, nodes, edges, boundary, fixed }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("network files serialize");
        s.push('\n');
        s
    }
}
