use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GraphError, Result};

pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Geometric slot of an edge at a grid vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Port {
    Physical,
    Up,
    Right,
    Down,
    Left,
}

impl Port {
    pub const ALL: [Port; 5] = [
        Port::Physical,
        Port::Up,
        Port::Right,
        Port::Down,
        Port::Left,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Port::Physical => "phys",
            Port::Up => "up",
            Port::Right => "right",
            Port::Down => "down",
            Port::Left => "left",
        }
    }

    pub fn from_name(s: &str) -> Option<Port> {
        Port::ALL.into_iter().find(|p| p.name() == s)
    }

    pub fn opposite(self) -> Port {
        match self {
            Port::Physical => Port::Physical,
            Port::Up => Port::Down,
            Port::Down => Port::Up,
            Port::Left => Port::Right,
            Port::Right => Port::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Entanglement {
        tail: VertexId,
        head: VertexId,
        tail_port: Option<Port>,
        head_port: Option<Port>,
    },
    Physical {
        owner: VertexId,
        external: bool,
        port: Option<Port>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub kind: EdgeKind,
    pub weight: usize,
}

impl Edge {
    pub fn is_entanglement(&self) -> bool {
        matches!(self.kind, EdgeKind::Entanglement { .. })
    }

    pub fn is_physical(&self) -> bool {
        matches!(self.kind, EdgeKind::Physical { .. })
    }

    /// Endpoints of an entanglement edge as `(tail, head)`.
    pub fn endpoints(&self) -> Option<(VertexId, VertexId)> {
        match self.kind {
            EdgeKind::Entanglement { tail, head, .. } => Some((tail, head)),
            EdgeKind::Physical { .. } => None,
        }
    }

    pub fn owner(&self) -> Option<VertexId> {
        match self.kind {
            EdgeKind::Physical { owner, .. } => Some(owner),
            EdgeKind::Entanglement { .. } => None,
        }
    }

    pub fn is_external(&self) -> bool {
        matches!(self.kind, EdgeKind::Physical { external: true, .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: VertexId,
    pub label: String,
    /// Grid coordinates `(row, col)`, zero-based.
    pub coords: Option<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Torus { m: usize, n: usize },
    Open { m: usize, n: usize },
    Custom,
}

impl Topology {
    pub fn dims(self) -> Option<(usize, usize)> {
        match self {
            Topology::Torus { m, n } | Topology::Open { m, n } => Some((m, n)),
            Topology::Custom => None,
        }
    }

    pub fn is_grid(self) -> bool {
        !matches!(self, Topology::Custom)
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Torus { m, n } => write!(f, "torus {m}x{n}"),
            Topology::Open { m, n } => write!(f, "open {m}x{n}"),
            Topology::Custom => write!(f, "custom"),
        }
    }
}

/// Entanglement weight `d`, internal physical weight `k`, and the external
/// physical weight `s` used by open grids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightProfile {
    pub d: usize,
    pub k: usize,
    pub s: Option<usize>,
}

impl WeightProfile {
    pub fn new(d: usize, k: usize) -> Self {
        WeightProfile { d, k, s: None }
    }

    pub fn with_external(d: usize, k: usize, s: usize) -> Self {
        WeightProfile { d, k, s: Some(s) }
    }

    fn check(&self) -> Result<()> {
        for w in [Some(self.d), Some(self.k), self.s].into_iter().flatten() {
            if w == 0 {
                return Err(GraphError::InvalidWeight(w));
            }
        }
        Ok(())
    }
}

/// One axis of a vertex space: the edge it comes from, its dimension and
/// whether it is a dual factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxisShape {
    pub edge: EdgeId,
    pub dim: usize,
    pub dual: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TNGraph {
    topology: Topology,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

/// Label of grid vertex `(row, col)`: the column number followed by one prime
/// per row below the top, so a 2-row grid reads `1, 1', 2, 2', ...`.
pub fn grid_label(row: usize, col: usize) -> String {
    format!("{}{}", col + 1, "'".repeat(row))
}

/// Vertices of an `m x n` grid are numbered column-major so the index order
/// matches the label order `1 < 1' < 2 < 2' < ...`.
fn grid_vertex(m: usize, row: usize, col: usize) -> VertexId {
    VertexId(col * m + row)
}

fn grid_vertices(m: usize, n: usize) -> Vec<Vertex> {
    let mut out = Vec::with_capacity(m * n);
    for col in 0..n {
        for row in 0..m {
            out.push(Vertex {
                id: grid_vertex(m, row, col),
                label: grid_label(row, col),
                coords: Some((row, col)),
            });
        }
    }
    out
}

/// Torus grid with rightward horizontal and downward vertical edges; the wrap
/// edges keep the same orientation (last column -> first, bottom row -> top).
pub fn build_torus_grid(m: usize, n: usize, profile: WeightProfile) -> Result<TNGraph> {
    if m == 0 || n == 0 {
        return Err(GraphError::ZeroDimension { m, n });
    }
    if m < 2 || n < 2 {
        return Err(GraphError::TorusSelfLoop { m, n });
    }
    profile.check()?;
    let mut b = GraphBuilder::with_vertices(Topology::Torus { m, n }, grid_vertices(m, n));
    for col in 0..n {
        for row in 0..m {
            let v = grid_vertex(m, row, col);
            b.push_physical(v, false, Some(Port::Physical), profile.k);
        }
    }
    for col in 0..n {
        for row in 0..m {
            let tail = grid_vertex(m, row, col);
            let head = grid_vertex(m, (row + 1) % m, col);
            b.push_entanglement(tail, head, Some(Port::Down), Some(Port::Up), profile.d);
        }
    }
    for col in 0..n {
        for row in 0..m {
            let tail = grid_vertex(m, row, col);
            let head = grid_vertex(m, row, (col + 1) % n);
            b.push_entanglement(tail, head, Some(Port::Right), Some(Port::Left), profile.d);
        }
    }
    Ok(b.finish_unchecked())
}

/// Open grid whose boundary sites carry external physical edges of weight `s`
/// pointing away from the grid.
pub fn build_open_grid(m: usize, n: usize, profile: WeightProfile) -> Result<TNGraph> {
    if m == 0 || n == 0 {
        return Err(GraphError::ZeroDimension { m, n });
    }
    let s = profile.s.ok_or(GraphError::MissingExternalWeight)?;
    profile.check()?;
    let mut b = GraphBuilder::with_vertices(Topology::Open { m, n }, grid_vertices(m, n));
    for col in 0..n {
        for row in 0..m {
            let v = grid_vertex(m, row, col);
            if row == 0 {
                b.push_physical(v, true, Some(Port::Up), s);
            }
            if row == m - 1 {
                b.push_physical(v, true, Some(Port::Down), s);
            }
            if col == 0 {
                b.push_physical(v, true, Some(Port::Left), s);
            }
            if col == n - 1 {
                b.push_physical(v, true, Some(Port::Right), s);
            }
            b.push_physical(v, false, Some(Port::Physical), profile.k);
        }
    }
    for col in 0..n {
        for row in 0..m.saturating_sub(1) {
            let tail = grid_vertex(m, row, col);
            let head = grid_vertex(m, row + 1, col);
            b.push_entanglement(tail, head, Some(Port::Down), Some(Port::Up), profile.d);
        }
    }
    for col in 0..n.saturating_sub(1) {
        for row in 0..m {
            let tail = grid_vertex(m, row, col);
            let head = grid_vertex(m, row, col + 1);
            b.push_entanglement(tail, head, Some(Port::Right), Some(Port::Left), profile.d);
        }
    }
    Ok(b.finish_unchecked())
}

/// Builder for user-supplied graphs. Edge ids are assigned sequentially.
#[derive(Debug)]
pub struct GraphBuilder {
    topology: Topology,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl Default for GraphBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl GraphBuilder {
    pub fn new() -> Self {
        GraphBuilder {
            topology: Topology::Custom,
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    fn with_vertices(topology: Topology, vertices: Vec<Vertex>) -> Self {
        GraphBuilder {
            topology,
            vertices,
            edges: Vec::new(),
        }
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> VertexId {
        let id = VertexId(self.vertices.len());
        self.vertices.push(Vertex {
            id,
            label: label.into(),
            coords: None,
        });
        id
    }

    pub fn add_entanglement(&mut self, tail: VertexId, head: VertexId, weight: usize) -> EdgeId {
        self.push_entanglement(tail, head, None, None, weight)
    }

    pub fn add_physical(&mut self, owner: VertexId, external: bool, weight: usize) -> EdgeId {
        self.push_physical(owner, external, None, weight)
    }

    fn push_entanglement(
        &mut self,
        tail: VertexId,
        head: VertexId,
        tail_port: Option<Port>,
        head_port: Option<Port>,
        weight: usize,
    ) -> EdgeId {
        let id = self.edges.len();
        self.edges.push(Edge {
            id,
            kind: EdgeKind::Entanglement {
                tail,
                head,
                tail_port,
                head_port,
            },
            weight,
        });
        id
    }

    fn push_physical(
        &mut self,
        owner: VertexId,
        external: bool,
        port: Option<Port>,
        weight: usize,
    ) -> EdgeId {
        let id = self.edges.len();
        self.edges.push(Edge {
            id,
            kind: EdgeKind::Physical {
                owner,
                external,
                port,
            },
            weight,
        });
        id
    }

    pub fn build(self) -> Result<TNGraph> {
        let g = self.finish_unchecked();
        g.validate()?;
        Ok(g)
    }

    fn finish_unchecked(self) -> TNGraph {
        TNGraph {
            topology: self.topology,
            vertices: self.vertices,
            edges: self.edges,
        }
    }
}

impl TNGraph {
    pub(crate) fn from_parts(
        topology: Topology,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
    ) -> Result<TNGraph> {
        let g = TNGraph {
            topology,
            vertices,
            edges,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id.0 != i {
                return Err(GraphError::Malformed(format!(
                    "vertex at position {i} has index {}",
                    v.id.0
                )));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.id != i {
                return Err(GraphError::Malformed(format!(
                    "edge at position {i} has id {}",
                    e.id
                )));
            }
            if e.weight == 0 {
                return Err(GraphError::InvalidWeight(0));
            }
            match e.kind {
                EdgeKind::Entanglement { tail, head, .. } => {
                    self.check_vertex(tail)?;
                    self.check_vertex(head)?;
                    if tail == head {
                        return Err(GraphError::SelfLoop(tail.0));
                    }
                }
                EdgeKind::Physical { owner, .. } => self.check_vertex(owner)?,
            }
        }
        Ok(())
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v.0 < self.vertices.len() {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(v.0))
        }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().map(|v| v.id)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge> {
        self.edges.get(id).ok_or(GraphError::UnknownEdge(id))
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.vertices[v.0].label
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.vertices
            .iter()
            .find(|v| v.label == label)
            .map(|v| v.id)
    }

    /// Grid vertex at zero-based `(row, col)`.
    pub fn grid_vertex(&self, row: usize, col: usize) -> Option<VertexId> {
        let (m, n) = self.topology.dims()?;
        (row < m && col < n).then(|| grid_vertex(m, row, col))
    }

    pub fn entanglement_edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(|e| e.is_entanglement())
    }

    /// Physical edges in canonical order: by owner vertex, external edges
    /// before internal ones, then by id.
    pub fn physical_edges(&self) -> Vec<&Edge> {
        let mut out: Vec<&Edge> = self.edges.iter().filter(|e| e.is_physical()).collect();
        out.sort_by_key(|e| match e.kind {
            EdgeKind::Physical {
                owner, external, ..
            } => (owner.0, !external, e.id),
            EdgeKind::Entanglement { .. } => unreachable!(),
        });
        out
    }

    pub fn physical_edges_of(&self, v: VertexId) -> Vec<&Edge> {
        self.physical_edges()
            .into_iter()
            .filter(|e| e.owner() == Some(v))
            .collect()
    }

    pub fn entanglement_degree(&self, v: VertexId) -> usize {
        self.entanglement_edges()
            .filter(|e| {
                let (t, h) = e.endpoints().unwrap();
                t == v || h == v
            })
            .count()
    }

    /// Axis layout of the space attached to `v`: physical edges (canonical
    /// order), then incoming entanglement edges, then outgoing ones as dual
    /// factors. Every tensor placed at `v` uses this axis order.
    pub fn vertex_space_shape(&self, v: VertexId) -> Result<Vec<AxisShape>> {
        self.check_vertex(v)?;
        let mut shape: Vec<AxisShape> = self
            .physical_edges_of(v)
            .into_iter()
            .map(|e| AxisShape {
                edge: e.id,
                dim: e.weight,
                dual: false,
            })
            .collect();
        let ent: Vec<&Edge> = self.entanglement_edges().collect();
        shape.extend(
            ent.iter()
                .filter(|e| e.endpoints().unwrap().1 == v)
                .map(|e| AxisShape {
                    edge: e.id,
                    dim: e.weight,
                    dual: false,
                }),
        );
        shape.extend(
            ent.iter()
                .filter(|e| e.endpoints().unwrap().0 == v)
                .map(|e| AxisShape {
                    edge: e.id,
                    dim: e.weight,
                    dual: true,
                }),
        );
        Ok(shape)
    }

    /// Which edge occupies each port of a grid vertex. Empty for vertices of
    /// custom graphs.
    pub fn ports(&self, v: VertexId) -> Result<BTreeMap<Port, EdgeId>> {
        self.check_vertex(v)?;
        let mut out = BTreeMap::new();
        for e in &self.edges {
            match e.kind {
                EdgeKind::Physical {
                    owner,
                    port: Some(p),
                    ..
                } if owner == v => {
                    out.insert(p, e.id);
                }
                EdgeKind::Entanglement {
                    tail,
                    head,
                    tail_port,
                    head_port,
                } => {
                    if let (true, Some(p)) = (tail == v, tail_port) {
                        out.insert(p, e.id);
                    }
                    if let (true, Some(p)) = (head == v, head_port) {
                        out.insert(p, e.id);
                    }
                }
                _ => {}
            }
        }
        Ok(out)
    }

    /// The same graph with every entanglement edge reversed. Ports stay with
    /// their vertices.
    pub fn reversed(&self) -> TNGraph {
        let mut g = self.clone();
        for e in &mut g.edges {
            if let EdgeKind::Entanglement {
                tail,
                head,
                tail_port,
                head_port,
            } = e.kind
            {
                e.kind = EdgeKind::Entanglement {
                    tail: head,
                    head: tail,
                    tail_port: head_port,
                    head_port: tail_port,
                };
            }
        }
        g
    }

    /// Owner vertices of the given physical edges.
    pub fn owners(&self, edges: &[EdgeId]) -> Result<Vec<VertexId>> {
        edges
            .iter()
            .map(|&id| {
                self.edge(id)?
                    .owner()
                    .ok_or_else(|| GraphError::Malformed(format!("edge {id} is not physical")))
            })
            .collect()
    }

    /// Physical edges owned by the given vertices, in canonical order.
    pub fn physical_edges_of_set(&self, vs: &[VertexId]) -> Vec<EdgeId> {
        self.physical_edges()
            .into_iter()
            .filter(|e| vs.contains(&e.owner().unwrap()))
            .map(|e| e.id)
            .collect()
    }

    /// Short human-readable description used in reports.
    pub fn descriptor(&self) -> String {
        let weights: Vec<String> = {
            let mut ws: Vec<(String, usize)> = self
                .edges
                .iter()
                .map(|e| {
                    let class = match e.kind {
                        EdgeKind::Entanglement { .. } => "d",
                        EdgeKind::Physical {
                            external: false, ..
                        } => "k",
                        EdgeKind::Physical { external: true, .. } => "s",
                    };
                    (class.to_string(), e.weight)
                })
                .collect();
            ws.sort();
            ws.dedup();
            ws.into_iter().map(|(c, w)| format!("{c}={w}")).collect()
        };
        format!(
            "{} |V|={} |E|={} [{}]",
            self.topology,
            self.vertices.len(),
            self.edges.len(),
            weights.join(",")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus(m: usize, n: usize) -> TNGraph {
        build_torus_grid(m, n, WeightProfile::new(2, 2)).unwrap()
    }

    #[test]
    fn torus_counts() {
        let g = torus(2, 2);
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(g.entanglement_edges().count(), 8);
        assert_eq!(g.physical_edges().len(), 4);

        let g = torus(2, 3);
        assert_eq!(g.num_vertices(), 6);
        assert_eq!(g.entanglement_edges().count(), 12);
        assert_eq!(g.physical_edges().len(), 6);
    }

    #[test]
    fn torus_is_four_regular() {
        for (m, n) in [(2, 2), (2, 3), (2, 5), (3, 3), (3, 4)] {
            let g = torus(m, n);
            assert_eq!(g.physical_edges().len(), m * n);
            for v in g.vertex_ids() {
                assert_eq!(g.entanglement_degree(v), 4, "{m}x{n} {v}");
                assert_eq!(g.physical_edges_of(v).len(), 1);
            }
        }
    }

    #[test]
    fn torus_rejects_loops_and_zero() {
        assert!(matches!(
            build_torus_grid(1, 4, WeightProfile::new(2, 2)),
            Err(GraphError::TorusSelfLoop { .. })
        ));
        assert!(matches!(
            build_torus_grid(2, 1, WeightProfile::new(2, 2)),
            Err(GraphError::TorusSelfLoop { .. })
        ));
        assert!(matches!(
            build_torus_grid(0, 3, WeightProfile::new(2, 2)),
            Err(GraphError::ZeroDimension { .. })
        ));
    }

    #[test]
    fn open_counts() {
        let g = build_open_grid(2, 2, WeightProfile::with_external(4, 4, 4)).unwrap();
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(g.entanglement_edges().count(), 4);
        assert_eq!(g.physical_edges().len(), 12);

        let g = build_open_grid(2, 3, WeightProfile::with_external(2, 2, 2)).unwrap();
        assert_eq!(g.entanglement_edges().count(), 7);
        assert_eq!(g.physical_edges().len(), 16);

        let g = build_open_grid(1, 1, WeightProfile::with_external(1, 1, 1)).unwrap();
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.entanglement_edges().count(), 0);
        assert_eq!(g.physical_edges().len(), 5);

        for (m, n) in [(1, 3), (2, 4), (3, 3), (4, 2)] {
            let g = build_open_grid(m, n, WeightProfile::with_external(2, 2, 3)).unwrap();
            assert_eq!(g.physical_edges().len(), m * n + 2 * m + 2 * n);
        }
    }

    #[test]
    fn open_requires_external_weight() {
        assert!(matches!(
            build_open_grid(2, 2, WeightProfile::new(2, 2)),
            Err(GraphError::MissingExternalWeight)
        ));
    }

    #[test]
    fn labels_follow_prime_convention() {
        let g = torus(2, 3);
        let labels: Vec<&str> = g.vertices().iter().map(|v| v.label.as_str()).collect();
        assert_eq!(labels, ["1", "1'", "2", "2'", "3", "3'"]);
    }

    #[test]
    fn torus_vertex_shape() {
        let g = torus(2, 4);
        let v = g.vertex_by_label("1").unwrap();
        let shape = g.vertex_space_shape(v).unwrap();
        let ports = g.ports(v).unwrap();
        let expect = [
            (ports[&Port::Physical], false),
            (ports[&Port::Up], false),
            (ports[&Port::Left], false),
            (ports[&Port::Down], true),
            (ports[&Port::Right], true),
        ];
        assert_eq!(shape.len(), 5);
        for (ax, (edge, dual)) in shape.iter().zip(expect) {
            assert_eq!(ax.edge, edge);
            assert_eq!(ax.dual, dual);
            assert_eq!(ax.dim, 2);
        }
        // upper wrap edge comes from the bottom vertex of the same column
        let up = g.edge(ports[&Port::Up]).unwrap();
        assert_eq!(up.endpoints().unwrap().0, g.vertex_by_label("1'").unwrap());
    }

    #[test]
    fn open_vertex_shapes() {
        let g = build_open_grid(2, 3, WeightProfile::with_external(2, 3, 5)).unwrap();
        let corner = g.vertex_by_label("1").unwrap();
        let shape = g.vertex_space_shape(corner).unwrap();
        assert_eq!(shape.len(), 5);
        let ext: Vec<_> = shape
            .iter()
            .filter(|a| g.edge(a.edge).unwrap().is_external())
            .collect();
        assert_eq!(ext.len(), 2);
        assert!(ext.iter().all(|a| a.dim == 5));

        let top = g.vertex_by_label("2").unwrap();
        let shape = g.vertex_space_shape(top).unwrap();
        assert_eq!(shape.len(), 5);
        let ports = g.ports(top).unwrap();
        assert_eq!(ports.len(), 5);
        assert!(g.edge(ports[&Port::Up]).unwrap().is_external());
        assert_eq!(shape[0].edge, ports[&Port::Up]);
        assert_eq!(shape[1].edge, ports[&Port::Physical]);
        assert_eq!(shape[1].dim, 3);
        assert!(shape[2..].iter().all(|a| a.dim == 2));
    }

    #[test]
    fn reversal_keeps_ports() {
        let g = torus(2, 2);
        let r = g.reversed();
        for v in g.vertex_ids() {
            assert_eq!(g.ports(v).unwrap(), r.ports(v).unwrap());
            let a = g.vertex_space_shape(v).unwrap();
            let b = r.vertex_space_shape(v).unwrap();
            assert_eq!(a.len(), b.len());
            assert_eq!(
                a.iter().filter(|x| x.dual).count(),
                b.iter().filter(|x| !x.dual).count() - 1
            );
        }
        assert_eq!(r.reversed(), g);
    }

    #[test]
    fn builder_validates() {
        let mut b = GraphBuilder::new();
        let a = b.add_vertex("a");
        b.add_entanglement(a, a, 2);
        assert!(matches!(b.build(), Err(GraphError::SelfLoop(0))));

        let mut b = GraphBuilder::new();
        let a = b.add_vertex("a");
        b.add_entanglement(a, VertexId(7), 2);
        assert!(matches!(b.build(), Err(GraphError::UnknownVertex(7))));
    }
}
