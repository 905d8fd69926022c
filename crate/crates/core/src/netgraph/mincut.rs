use std::collections::VecDeque;

use super::graph::{TNGraph, VertexId};
use super::{GraphError, Result};

pub const BRUTE_FORCE_MAX_VERTICES: usize = 16;

fn check_terminals(g: &TNGraph, sources: &[VertexId], sinks: &[VertexId]) -> Result<()> {
    if sources.is_empty() || sinks.is_empty() {
        return Err(GraphError::EmptyTerminals);
    }
    for &v in sources.iter().chain(sinks) {
        g.check_vertex(v)?;
    }
    if let Some(v) = sources.iter().find(|v| sinks.contains(v)) {
        return Err(GraphError::OverlappingTerminals(v.0));
    }
    Ok(())
}

/// Residual network for undirected max-flow. Every undirected edge becomes a
/// pair of arcs that are each other's reverse, both with full capacity.
struct FlowNetwork {
    head: Vec<usize>,
    cap: Vec<u64>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn new(n: usize) -> Self {
        FlowNetwork {
            head: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn link(&mut self, u: usize, v: usize, cap_uv: u64, cap_vu: u64) {
        let e = self.head.len();
        self.head.extend([v, u]);
        self.cap.extend([cap_uv, cap_vu]);
        self.adj[u].push(e);
        self.adj[v].push(e + 1);
    }

    /// Edmonds-Karp.
    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0u64;
        loop {
            let mut parent: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut seen = vec![false; self.adj.len()];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &e in &self.adj[u] {
                    let v = self.head[e];
                    if !seen[v] && self.cap[e] > 0 {
                        seen[v] = true;
                        parent[v] = Some(e);
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut bottleneck = u64::MAX;
            let mut v = t;
            while let Some(e) = parent[v] {
                bottleneck = bottleneck.min(self.cap[e]);
                v = self.head[e ^ 1];
            }
            let mut v = t;
            while let Some(e) = parent[v] {
                self.cap[e] -= bottleneck;
                self.cap[e ^ 1] += bottleneck;
                v = self.head[e ^ 1];
            }
            total = total.saturating_add(bottleneck);
        }
    }
}

fn flow_cut(
    g: &TNGraph,
    sources: &[VertexId],
    sinks: &[VertexId],
    capacity: impl Fn(usize) -> u64,
) -> u64 {
    let n = g.num_vertices();
    let (s, t) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2);
    for e in g.entanglement_edges() {
        let (a, b) = e.endpoints().unwrap();
        let c = capacity(e.weight);
        net.link(a.0, b.0, c, c);
    }
    for &v in sources {
        net.link(s, v.0, u64::MAX / 4, 0);
    }
    for &v in sinks {
        net.link(v.0, t, u64::MAX / 4, 0);
    }
    net.max_flow(s, t)
}

/// Smallest `b` with `b^e = w` for some `e >= 1`, together with `e`.
fn perfect_power_root(w: usize) -> (usize, u32) {
    let w = w as u128;
    for e in (2..=u128::BITS - w.leading_zeros()).rev() {
        let guess = (w as f64).powf(1.0 / e as f64).round() as u128;
        for b in guess.saturating_sub(1).max(2)..=guess + 1 {
            if b.checked_pow(e) == Some(w) {
                return (b as usize, e);
            }
        }
    }
    (w as usize, 1)
}

impl TNGraph {
    /// Number of entanglement edges in a minimum cut separating `sources`
    /// from `sinks`. Orientation is ignored and parallel edges count with
    /// multiplicity; physical edges never cross a cut.
    pub fn min_cut(&self, sources: &[VertexId], sinks: &[VertexId]) -> Result<usize> {
        check_terminals(self, sources, sinks)?;
        Ok(flow_cut(self, sources, sinks, |_| 1) as usize)
    }

    /// Minimum over separating bipartitions of the product of the weights of
    /// the crossing entanglement edges.
    ///
    /// When every weight is a power of one base `b` this runs max-flow with
    /// the exponents as capacities; mixed bases fall back to enumeration,
    /// which is limited to [`BRUTE_FORCE_MAX_VERTICES`] vertices.
    pub fn min_cut_weighted(&self, sources: &[VertexId], sinks: &[VertexId]) -> Result<u128> {
        check_terminals(self, sources, sinks)?;
        self.weighted_cut_unchecked(sources, sinks)
    }

    /// As [`TNGraph::min_cut_weighted`] but an empty side is allowed, in
    /// which case nothing needs to be cut and the value is 1.
    pub(crate) fn weighted_cut_unchecked(
        &self,
        sources: &[VertexId],
        sinks: &[VertexId],
    ) -> Result<u128> {
        if sources.is_empty() || sinks.is_empty() {
            return Ok(1);
        }
        let roots: Vec<(usize, u32)> = self
            .entanglement_edges()
            .filter(|e| e.weight > 1)
            .map(|e| perfect_power_root(e.weight))
            .collect();
        let Some(&(base, _)) = roots.first() else {
            return Ok(1);
        };
        if roots.iter().all(|&(b, _)| b == base) {
            let flow = flow_cut(self, sources, sinks, |w| {
                if w == 1 {
                    0
                } else {
                    perfect_power_root(w).1 as u64
                }
            });
            let exp = u32::try_from(flow).map_err(|_| GraphError::Overflow)?;
            return (base as u128).checked_pow(exp).ok_or(GraphError::Overflow);
        }
        brute_force_min_cut_weighted(self, sources, sinks)
    }
}

/// Visits every vertex bipartition with `sources` on one side and `sinks` on
/// the other, handing the visitor the weights of the crossing edges.
fn for_each_bipartition(
    g: &TNGraph,
    sources: &[VertexId],
    sinks: &[VertexId],
    mut visit: impl FnMut(&[usize]),
) -> Result<()> {
    let n = g.num_vertices();
    if n > BRUTE_FORCE_MAX_VERTICES {
        return Err(GraphError::TooManyVertices {
            got: n,
            max: BRUTE_FORCE_MAX_VERTICES,
        });
    }
    let free: Vec<usize> = (0..n)
        .filter(|&i| !sources.contains(&VertexId(i)) && !sinks.contains(&VertexId(i)))
        .collect();
    let edges: Vec<(usize, usize, usize)> = g
        .entanglement_edges()
        .map(|e| {
            let (a, b) = e.endpoints().unwrap();
            (a.0, b.0, e.weight)
        })
        .collect();
    let mut side = vec![false; n];
    for v in sources {
        side[v.0] = true;
    }
    let mut crossing = Vec::with_capacity(edges.len());
    for mask in 0u32..(1u32 << free.len()) {
        for (bit, &v) in free.iter().enumerate() {
            side[v] = mask >> bit & 1 == 1;
        }
        crossing.clear();
        crossing.extend(
            edges
                .iter()
                .filter(|(a, b, _)| side[*a] != side[*b])
                .map(|&(_, _, w)| w),
        );
        visit(&crossing);
    }
    Ok(())
}

/// Exhaustive minimum cut (edge count) over all separating bipartitions.
pub fn brute_force_min_cut(g: &TNGraph, sources: &[VertexId], sinks: &[VertexId]) -> Result<usize> {
    check_terminals(g, sources, sinks)?;
    let mut best = usize::MAX;
    for_each_bipartition(g, sources, sinks, |crossing| {
        best = best.min(crossing.len());
    })?;
    Ok(best)
}

/// Exhaustive multiplicative minimum cut.
pub fn brute_force_min_cut_weighted(
    g: &TNGraph,
    sources: &[VertexId],
    sinks: &[VertexId],
) -> Result<u128> {
    check_terminals(g, sources, sinks)?;
    let mut best = u128::MAX;
    for_each_bipartition(g, sources, sinks, |crossing| {
        let product = crossing
            .iter()
            .fold(1u128, |acc, &w| acc.saturating_mul(w as u128));
        best = best.min(product);
    })?;
    if best == u128::MAX {
        return Err(GraphError::Overflow);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgraph::{build_open_grid, build_torus_grid, GraphBuilder, WeightProfile};

    fn labels(g: &TNGraph, ls: &[&str]) -> Vec<VertexId> {
        ls.iter().map(|l| g.vertex_by_label(l).unwrap()).collect()
    }

    #[test]
    fn roots() {
        assert_eq!(perfect_power_root(2), (2, 1));
        assert_eq!(perfect_power_root(4), (2, 2));
        assert_eq!(perfect_power_root(8), (2, 3));
        assert_eq!(perfect_power_root(36), (6, 2));
        assert_eq!(perfect_power_root(12), (12, 1));
        assert_eq!(perfect_power_root(1 << 40), (2, 40));
    }

    #[test]
    fn torus_two_by_two_rows() {
        let g = build_torus_grid(2, 2, WeightProfile::new(2, 2)).unwrap();
        let (a, b) = (labels(&g, &["1", "2"]), labels(&g, &["1'", "2'"]));
        assert_eq!(brute_force_min_cut(&g, &a, &b).unwrap(), 4);
        assert_eq!(g.min_cut(&a, &b).unwrap(), 4);
        assert_eq!(g.min_cut_weighted(&a, &b).unwrap(), 16);
    }

    #[test]
    fn torus_two_by_four_columns() {
        let g = build_torus_grid(2, 4, WeightProfile::new(2, 2)).unwrap();
        let (a, b) = (labels(&g, &["1", "1'"]), labels(&g, &["3", "3'"]));
        assert_eq!(brute_force_min_cut(&g, &a, &b).unwrap(), 4);
        assert_eq!(g.min_cut(&a, &b).unwrap(), 4);
    }

    #[test]
    fn torus_two_by_three_rows() {
        let g = build_torus_grid(2, 3, WeightProfile::new(2, 2)).unwrap();
        let (a, b) = (
            labels(&g, &["1", "2", "3"]),
            labels(&g, &["1'", "2'", "3'"]),
        );
        assert_eq!(brute_force_min_cut(&g, &a, &b).unwrap(), 6);
        assert_eq!(g.min_cut(&a, &b).unwrap(), 6);
    }

    #[test]
    fn path_and_disconnected() {
        let mut b = GraphBuilder::new();
        let v: Vec<_> = (0..3).map(|i| b.add_vertex(format!("p{i}"))).collect();
        b.add_entanglement(v[0], v[1], 2);
        b.add_entanglement(v[1], v[2], 2);
        let g = b.build().unwrap();
        assert_eq!(brute_force_min_cut(&g, &[v[0]], &[v[2]]).unwrap(), 1);
        assert_eq!(g.min_cut(&[v[0]], &[v[2]]).unwrap(), 1);

        let mut b = GraphBuilder::new();
        let v: Vec<_> = (0..4).map(|i| b.add_vertex(format!("q{i}"))).collect();
        b.add_entanglement(v[0], v[1], 3);
        b.add_entanglement(v[2], v[3], 3);
        let g = b.build().unwrap();
        assert_eq!(g.min_cut(&[v[0], v[1]], &[v[2], v[3]]).unwrap(), 0);
        assert_eq!(g.min_cut_weighted(&[v[0], v[1]], &[v[2], v[3]]).unwrap(), 1);
    }

    #[test]
    fn unit_weights_give_one() {
        let g = build_open_grid(2, 3, WeightProfile::with_external(1, 2, 2)).unwrap();
        let (a, b) = (labels(&g, &["1"]), labels(&g, &["3'"]));
        assert_eq!(g.min_cut_weighted(&a, &b).unwrap(), 1);
        assert_eq!(g.min_cut(&a, &b).unwrap(), 2);
    }

    #[test]
    fn mixed_bases_use_enumeration() {
        let mut b = GraphBuilder::new();
        let v: Vec<_> = (0..3).map(|i| b.add_vertex(format!("m{i}"))).collect();
        b.add_entanglement(v[0], v[1], 2);
        b.add_entanglement(v[1], v[2], 3);
        b.add_entanglement(v[0], v[2], 5);
        let g = b.build().unwrap();
        // {0} | {1,2}: 2*5 = 10; {0,1} | {2}: 3*5 = 15
        assert_eq!(g.min_cut_weighted(&[v[0]], &[v[2]]).unwrap(), 10);
    }

    #[test]
    fn mixed_powers_of_one_base_use_flow() {
        let mut b = GraphBuilder::new();
        let v: Vec<_> = (0..3).map(|i| b.add_vertex(format!("m{i}"))).collect();
        b.add_entanglement(v[0], v[1], 4);
        b.add_entanglement(v[1], v[2], 8);
        b.add_entanglement(v[0], v[2], 2);
        let g = b.build().unwrap();
        assert_eq!(
            g.min_cut_weighted(&[v[0]], &[v[2]]).unwrap(),
            brute_force_min_cut_weighted(&g, &[v[0]], &[v[2]]).unwrap()
        );
    }

    #[test]
    fn terminal_errors() {
        let g = build_torus_grid(2, 2, WeightProfile::new(2, 2)).unwrap();
        let a = VertexId(0);
        assert!(matches!(
            g.min_cut(&[], &[a]),
            Err(GraphError::EmptyTerminals)
        ));
        assert!(matches!(
            g.min_cut(&[a], &[a]),
            Err(GraphError::OverlappingTerminals(0))
        ));
        assert!(matches!(
            g.min_cut(&[a], &[VertexId(99)]),
            Err(GraphError::UnknownVertex(99))
        ));
        let big = build_torus_grid(3, 6, WeightProfile::new(2, 2)).unwrap();
        assert!(matches!(
            brute_force_min_cut(&big, &[VertexId(0)], &[VertexId(1)]),
            Err(GraphError::TooManyVertices { .. })
        ));
    }
}
