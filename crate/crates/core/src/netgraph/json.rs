//! JSON form of a [`TNGraph`].

use serde::{Deserialize, Serialize};

use super::graph::{Edge, EdgeKind, Port, TNGraph, Topology, Vertex, VertexId};
use super::{GraphError, Result};

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    topology: String,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct VertexRecord {
    index: usize,
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    row: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    col: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRecord {
    id: usize,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    head: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    owner: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    external: Option<bool>,
    weight: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail_port: Option<Port>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    head_port: Option<Port>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    port: Option<Port>,
}

impl TNGraph {
    pub fn to_json(&self) -> String {
        let (topology, m, n) = match self.topology() {
            Topology::Torus { m, n } => ("torus", Some(m), Some(n)),
            Topology::Open { m, n } => ("open", Some(m), Some(n)),
            Topology::Custom => ("custom", None, None),
        };
        let file = GraphFile {
            topology: topology.to_string(),
            m,
            n,
            vertices: self
                .vertices()
                .iter()
                .map(|v| VertexRecord {
                    index: v.id.0,
                    label: v.label.clone(),
                    row: v.coords.map(|c| c.0),
                    col: v.coords.map(|c| c.1),
                })
                .collect(),
            edges: self
                .edges()
                .iter()
                .map(|e| match e.kind {
                    EdgeKind::Entanglement {
                        tail,
                        head,
                        tail_port,
                        head_port,
                    } => EdgeRecord {
                        id: e.id,
                        kind: "entanglement".into(),
                        tail: Some(tail.0),
                        head: Some(head.0),
                        owner: None,
                        external: None,
                        weight: e.weight,
                        tail_port,
                        head_port,
                        port: None,
                    },
                    EdgeKind::Physical {
                        owner,
                        external,
                        port,
                    } => EdgeRecord {
                        id: e.id,
                        kind: "physical".into(),
                        tail: None,
                        head: None,
                        owner: Some(owner.0),
                        external: Some(external),
                        weight: e.weight,
                        tail_port: None,
                        head_port: None,
                        port,
                    },
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<TNGraph> {
        let file: GraphFile = serde_json::from_str(text)?;
        let dims = || -> Result<(usize, usize)> {
            match (file.m, file.n) {
                (Some(m), Some(n)) => Ok((m, n)),
                _ => Err(GraphError::Malformed("grid topology needs M and N".into())),
            }
        };
        let topology = match file.topology.as_str() {
            "torus" => {
                let (m, n) = dims()?;
                Topology::Torus { m, n }
            }
            "open" => {
                let (m, n) = dims()?;
                Topology::Open { m, n }
            }
            "custom" => Topology::Custom,
            other => return Err(GraphError::Malformed(format!("unknown topology `{other}`"))),
        };
        let vertices = file
            .vertices
            .into_iter()
            .map(|v| Vertex {
                id: VertexId(v.index),
                label: v.label,
                coords: v.row.zip(v.col),
            })
            .collect();
        let missing = |what: &str, id: usize| {
            GraphError::Malformed(format!("edge {id} is missing field `{what}`"))
        };
        let edges = file
            .edges
            .into_iter()
            .map(|r| {
                let kind = match r.kind.as_str() {
                    "entanglement" => EdgeKind::Entanglement {
                        tail: VertexId(r.tail.ok_or_else(|| missing("tail", r.id))?),
                        head: VertexId(r.head.ok_or_else(|| missing("head", r.id))?),
                        tail_port: r.tail_port,
                        head_port: r.head_port,
                    },
                    "physical" => EdgeKind::Physical {
                        owner: VertexId(r.owner.ok_or_else(|| missing("owner", r.id))?),
                        external: r.external.unwrap_or(false),
                        port: r.port,
                    },
                    other => {
                        return Err(GraphError::Malformed(format!(
                            "edge {} has unknown kind `{other}`",
                            r.id
                        )))
                    }
                };
                Ok(Edge {
                    id: r.id,
                    kind,
                    weight: r.weight,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TNGraph::from_parts(topology, vertices, edges)
    }
}
