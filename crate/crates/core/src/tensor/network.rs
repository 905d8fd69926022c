use std::collections::BTreeMap;

use super::sparse::{contract_pair, Axis, Label, SparseTensor};
use super::TensorError;
use crate::netgraph::{EdgeId, Port, TNGraph, VertexId};

/// One tensor per vertex, each shaped like that vertex's space.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Assignment {
    tensors: BTreeMap<VertexId, SparseTensor>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, v: VertexId, t: SparseTensor) {
        self.tensors.insert(v, t);
    }

    pub fn get(&self, v: VertexId) -> Option<&SparseTensor> {
        self.tensors.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &SparseTensor)> + '_ {
        self.tensors.iter().map(|(v, t)| (*v, t))
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    /// Checks that every vertex has a tensor whose axes are exactly
    /// `vertex_space_shape` (labels, dimensions, variance, order).
    pub fn validate(&self, g: &TNGraph) -> Result<(), TensorError> {
        for v in g.vertex_ids() {
            let bad = |reason: String| TensorError::InvalidAssignment {
                vertex: g.label(v).to_string(),
                reason,
            };
            let t = self
                .tensors
                .get(&v)
                .ok_or_else(|| bad("no tensor assigned".into()))?;
            let shape = vertex_axes(g, v)?;
            if t.axes() != shape.as_slice() {
                return Err(bad(format!(
                    "axes [{}] do not match vertex space [{}]",
                    describe(t.axes()),
                    describe(&shape)
                )));
            }
        }
        if let Some(v) = self.tensors.keys().find(|v| g.check_vertex(**v).is_err()) {
            return Err(TensorError::InvalidAssignment {
                vertex: v.to_string(),
                reason: "vertex not in graph".into(),
            });
        }
        Ok(())
    }

    /// Re-expresses every tensor in the vertex spaces of `g`, which must have
    /// the same edges up to orientation (e.g. `g_old.reversed()`).
    pub fn conform_to(&self, g: &TNGraph) -> Result<Assignment, TensorError> {
        let mut out = Assignment::new();
        for (v, t) in self.iter() {
            out.insert(v, t.conform_to(&vertex_axes(g, v)?)?);
        }
        Ok(out)
    }
}

fn describe(axes: &[Axis]) -> String {
    axes.iter()
        .map(|a| format!("{}:{}{}", a.label, a.dim, if a.dual { ":dual" } else { "" }))
        .collect::<Vec<_>>()
        .join(" ")
}

pub(crate) fn vertex_axes(g: &TNGraph, v: VertexId) -> Result<Vec<Axis>, TensorError> {
    Ok(g.vertex_space_shape(v)?
        .into_iter()
        .map(|a| Axis::edge(a.edge, a.dim, a.dual))
        .collect())
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ContractOptions<'a> {
    /// Preferred order of entanglement edges; edges it omits follow in the
    /// default order.
    pub schedule: Option<&'a [EdgeId]>,
    /// Abort when an intermediate tensor exceeds this many nonzeros.
    pub max_nonzeros: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ContractStats {
    pub peak_nonzeros: usize,
    pub merges: usize,
}

/// Column sweep: edges ordered by the later of their endpoints in vertex
/// order, so a 2xN grid is absorbed one column at a time.
pub fn default_schedule(g: &TNGraph) -> Vec<EdgeId> {
    let mut edges: Vec<(usize, EdgeId)> = g
        .entanglement_edges()
        .map(|e| {
            let (t, h) = e.endpoints().unwrap();
            (t.0.max(h.0), e.id)
        })
        .collect();
    edges.sort();
    edges.into_iter().map(|(_, id)| id).collect()
}

/// Contracts every entanglement edge of `g` for the given assignment.
///
/// The result has one axis per physical edge, in the graph's canonical
/// physical-edge order, labelled by edge id.
pub fn network_contract(
    g: &TNGraph,
    asgn: &Assignment,
    schedule: Option<&[EdgeId]>,
) -> Result<SparseTensor, TensorError> {
    network_contract_with(
        g,
        asgn,
        &ContractOptions {
            schedule,
            max_nonzeros: None,
        },
    )
    .map(|(t, _)| t)
}

pub fn network_contract_with(
    g: &TNGraph,
    asgn: &Assignment,
    opts: &ContractOptions<'_>,
) -> Result<(SparseTensor, ContractStats), TensorError> {
    asgn.validate(g)?;
    let n = g.num_vertices();
    let mut order: Vec<EdgeId> = Vec::new();
    if let Some(s) = opts.schedule {
        for &id in s {
            if !g.edge(id)?.is_entanglement() {
                return Err(TensorError::ScheduleEdge(id));
            }
            order.push(id);
        }
    }
    order.extend(default_schedule(g));

    let mut stats = ContractStats::default();
    let mut blob_of: Vec<usize> = (0..n).collect();
    let mut blobs: Vec<Option<SparseTensor>> =
        g.vertex_ids().map(|v| asgn.get(v).cloned()).collect();
    for t in blobs.iter().flatten() {
        stats.peak_nonzeros = stats.peak_nonzeros.max(t.nnz());
    }

    for id in order {
        let (tail, head) = g.edge(id)?.endpoints().unwrap();
        let (bh, bt) = (blob_of[head.0], blob_of[tail.0]);
        if bh == bt {
            continue;
        }
        // every edge running between the two blobs is contracted at once, so
        // no tensor ever holds both ends of one edge
        let pairs: Vec<(Label, Label)> = g
            .entanglement_edges()
            .filter(|e| {
                let (t, h) = e.endpoints().unwrap();
                let (a, b) = (blob_of[t.0], blob_of[h.0]);
                (a == bh && b == bt) || (a == bt && b == bh)
            })
            .map(|e| (Label::Edge(e.id), Label::Edge(e.id)))
            .collect();
        let left = blobs[bh].take().expect("live blob");
        let right = blobs[bt].take().expect("live blob");
        let merged = contract_pair(&left, &right, &pairs)?;
        stats.merges += 1;
        stats.peak_nonzeros = stats.peak_nonzeros.max(merged.nnz());
        if let Some(limit) = opts.max_nonzeros {
            if merged.nnz() > limit {
                return Err(TensorError::TooLarge {
                    what: "intermediate nonzero count",
                    got: merged.nnz() as u128,
                    limit: limit as u128,
                });
            }
        }
        let (keep, gone) = (bh.min(bt), bh.max(bt));
        for b in blob_of.iter_mut() {
            if *b == gone {
                *b = keep;
            }
        }
        blobs[keep] = Some(merged);
    }

    let mut result: Option<SparseTensor> = None;
    for t in blobs.into_iter().flatten() {
        result = Some(match result {
            None => t,
            Some(acc) => acc.outer(&t)?,
        });
    }
    let result = result.unwrap_or_else(|| SparseTensor::scalar(super::int(1)));
    let order: Vec<Label> = g
        .physical_edges()
        .iter()
        .map(|e| Label::Edge(e.id))
        .collect();
    let out = result.permuted(&order)?;
    stats.peak_nonzeros = stats.peak_nonzeros.max(out.nnz());
    Ok((out, stats))
}

/// Label used for the `port` axis of a role-labelled vertex tensor.
pub fn role_label(port: Port) -> Label {
    Label::name(port.name())
}

/// Places a vertex tensor whose axes are labelled by port name (`phys`,
/// `up`, `right`, `down`, `left`) at grid vertex `v`, relabelling each axis
/// by the edge in that port and fixing the axis order and variance to the
/// vertex space.
pub fn place_roles(
    g: &TNGraph,
    v: VertexId,
    roles: &SparseTensor,
) -> Result<SparseTensor, TensorError> {
    let ports = g.ports(v)?;
    if ports.is_empty() {
        return Err(TensorError::ShapeMismatch(format!(
            "vertex {} has no port layout",
            g.label(v)
        )));
    }
    let shape = vertex_axes(g, v)?;
    if roles.order() != shape.len() {
        return Err(TensorError::ShapeMismatch(format!(
            "vertex {} has {} axes, tensor has {}",
            g.label(v),
            shape.len(),
            roles.order()
        )));
    }
    let port_of: BTreeMap<EdgeId, Port> = ports.iter().map(|(p, e)| (*e, *p)).collect();
    let mut order = Vec::with_capacity(shape.len());
    for ax in &shape {
        let Label::Edge(e) = ax.label else {
            unreachable!()
        };
        let port = port_of.get(&e).ok_or_else(|| {
            TensorError::ShapeMismatch(format!("edge {e} has no port at {}", g.label(v)))
        })?;
        let role = role_label(*port);
        let have = roles
            .axis(&role)
            .ok_or_else(|| TensorError::ShapeMismatch(format!("missing axis `{role}`")))?;
        if have.dim != ax.dim {
            return Err(TensorError::ShapeMismatch(format!(
                "axis `{role}` has dimension {} but the {} edge at {} has weight {}",
                have.dim,
                port.name(),
                g.label(v),
                ax.dim
            )));
        }
        order.push(role);
    }
    let placed = roles.permuted(&order)?.relabeled(|l| match l {
        Label::Name(n) => Port::from_name(n).map(|p| Label::Edge(ports[&p])),
        Label::Edge(_) => None,
    })?;
    placed.conform_to(&shape)
}

/// The same role-labelled tensor at every vertex of a grid.
pub fn constant_assignment(g: &TNGraph, roles: &SparseTensor) -> Result<Assignment, TensorError> {
    let mut asgn = Assignment::new();
    for v in g.vertex_ids() {
        asgn.insert(v, place_roles(g, v, roles)?);
    }
    Ok(asgn)
}

/// Bound contraction: places one shared tensor at every vertex and contracts.
/// The graph must be a grid whose vertices all have the same port weights.
pub fn bound_contract(g: &TNGraph, roles: &SparseTensor) -> Result<SparseTensor, TensorError> {
    if !g.topology().is_grid() {
        return Err(TensorError::NonRegular(
            "bound contraction needs a grid topology".into(),
        ));
    }
    let mut reference: Option<BTreeMap<Port, usize>> = None;
    for v in g.vertex_ids() {
        let dims: BTreeMap<Port, usize> = g
            .ports(v)?
            .into_iter()
            .map(|(p, e)| Ok((p, g.edge(e)?.weight)))
            .collect::<Result<_, TensorError>>()?;
        match &reference {
            None => reference = Some(dims),
            Some(r) if *r != dims => {
                return Err(TensorError::NonRegular(format!(
                    "vertex {} has port weights {:?}, expected {:?}",
                    g.label(v),
                    dims,
                    r
                )))
            }
            Some(_) => {}
        }
    }
    network_contract(g, &constant_assignment(g, roles)?, None)
}
