//! Flattening ranks against dimension and min-cut bounds, and the drivers
//! that check each construction.

mod report;
mod search;
mod verify;

pub use report::{run_id, Report, Verdict, SCHEMA_VERSION};
pub use search::{conjecture_search, ConjectureOptions, CONJECTURE_MAX_CELLS};
pub use verify::{
    sweep_report, verify_thm16, verify_thm17, verify_vr_bound, verify_vr_unbound, VerifyOptions,
};

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::ConstructionError;
use crate::netgraph::{Edge, EdgeId, GraphError, TNGraph, Topology, VertexId};
use crate::tensor::{
    flatten, rank_with, FlatteningSpec, Label, ScalarMode, SparseTensor, TensorError,
};

/// Largest number of flattenings a single sweep will enumerate.
pub const MAX_SWEEP: u64 = 1 << 20;
/// Largest number of vertices owning physical edges on both sides of a
/// flattening that the min-cut bound will enumerate.
pub const MAX_STRADDLING: usize = 16;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("{0}")]
    Guard(String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub type Result<T> = std::result::Result<T, AnalysisError>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatteningReport {
    pub spec: FlatteningSpec,
    pub rank: usize,
    pub dim_bound: u64,
    /// Weighted min-cut bound; absent when no network is attached.
    pub qmf_bound: Option<u128>,
    pub saturated: bool,
    /// The min-cut bound had to route through a vertex owning physical
    /// edges on both sides.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub straddling: bool,
}

impl FlatteningReport {
    pub fn cap(&self) -> u128 {
        let d = u128::from(self.dim_bound);
        self.qmf_bound.map_or(d, |q| q.min(d))
    }

    /// Rank within both the dimension bound and the min-cut bound.
    pub fn within_bounds(&self) -> bool {
        self.rank as u128 <= self.cap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QmfBound {
    pub value: u128,
    pub straddling: bool,
}

fn edge_of(l: &Label) -> Result<EdgeId> {
    match l {
        Label::Edge(e) => Ok(*e),
        Label::Name(n) => Err(AnalysisError::Unsupported(format!(
            "axis `{n}` is not a physical edge"
        ))),
    }
}

/// Min-cut bound for a flattening of a state on `g`: the smallest product
/// of crossing entanglement weights over vertex bipartitions separating
/// the owners of the row axes from the owners of the column axes. A vertex
/// owning physical edges on both sides may go to either side, paying the
/// dimension of its physical edges on the other side.
pub fn qmf_bound(g: &TNGraph, spec: &FlatteningSpec) -> Result<QmfBound> {
    let physical: BTreeSet<EdgeId> = g.physical_edges().iter().map(|e| e.id).collect();
    let mut seen = BTreeSet::new();
    let mut side: BTreeMap<VertexId, [u128; 2]> = BTreeMap::new();
    for (s, labels) in [&spec.rows, &spec.cols].into_iter().enumerate() {
        for l in labels {
            let e = edge_of(l)?;
            if !physical.contains(&e) || !seen.insert(e) {
                return Err(AnalysisError::Tensor(TensorError::Flattening(format!(
                    "`{l}` is not a distinct physical edge of the graph"
                ))));
            }
            let edge = g.edge(e)?;
            let entry = side.entry(edge.owner().unwrap()).or_insert([1, 1]);
            entry[s] = entry[s].saturating_mul(edge.weight as u128);
        }
    }
    if seen.len() != physical.len() {
        return Err(AnalysisError::Tensor(TensorError::Flattening(format!(
            "{} of {} physical edges covered",
            seen.len(),
            physical.len()
        ))));
    }
    let owns = |v: &VertexId, s: usize| spec_side(g, spec, *v, s);
    let rows: Vec<VertexId> = side
        .keys()
        .filter(|v| owns(v, 0) && !owns(v, 1))
        .copied()
        .collect();
    let cols: Vec<VertexId> = side
        .keys()
        .filter(|v| owns(v, 1) && !owns(v, 0))
        .copied()
        .collect();
    let both: Vec<VertexId> = side
        .keys()
        .filter(|v| owns(v, 0) && owns(v, 1))
        .copied()
        .collect();
    if both.len() > MAX_STRADDLING {
        return Err(AnalysisError::Guard(format!(
            "{} straddling vertices exceed the limit of {MAX_STRADDLING}",
            both.len()
        )));
    }
    let mut best = u128::MAX;
    for mask in 0u64..1 << both.len() {
        let (mut src, mut snk) = (rows.clone(), cols.clone());
        let mut penalty: u128 = 1;
        for (i, v) in both.iter().enumerate() {
            let dims = side[v];
            if mask >> i & 1 == 0 {
                src.push(*v);
                penalty = penalty.saturating_mul(dims[1]);
            } else {
                snk.push(*v);
                penalty = penalty.saturating_mul(dims[0]);
            }
        }
        if penalty >= best {
            continue;
        }
        let cut = g.weighted_cut_unchecked(&src, &snk)?;
        best = best.min(cut.saturating_mul(penalty));
    }
    Ok(QmfBound {
        value: best,
        straddling: !both.is_empty(),
    })
}

fn spec_side(g: &TNGraph, spec: &FlatteningSpec, v: VertexId, s: usize) -> bool {
    let labels = if s == 0 { &spec.rows } else { &spec.cols };
    labels.iter().any(|l| match l {
        Label::Edge(e) => g.edge(*e).ok().and_then(|e| e.owner()) == Some(v),
        Label::Name(_) => false,
    })
}

/// Rank of one flattening with its dimension bound and, given a graph, its
/// min-cut bound.
pub fn flattening_report(
    g: Option<&TNGraph>,
    t: &SparseTensor,
    spec: &FlatteningSpec,
    mode: ScalarMode,
) -> Result<FlatteningReport> {
    let m = flatten(t, spec)?;
    let rank = rank_with(&m, mode)?;
    let dim_bound = m.dim_bound();
    let qmf = g.map(|g| qmf_bound(g, spec)).transpose()?;
    let cap = qmf.map_or(dim_bound as u128, |q| q.value.min(dim_bound as u128));
    Ok(FlatteningReport {
        spec: spec.clone(),
        rank,
        dim_bound,
        qmf_bound: qmf.map(|q| q.value),
        saturated: rank as u128 == cap,
        straddling: qmf.is_some_and(|q| q.straddling),
    })
}

/// Rows on the external physical edges, columns on the internal ones.
pub fn edge_vertex_spec(g: &TNGraph) -> Result<FlatteningSpec> {
    if !matches!(g.topology(), Topology::Open { .. }) {
        return Err(AnalysisError::Unsupported(
            "the edge/vertex flattening needs an open grid".into(),
        ));
    }
    let (ext, int): (Vec<&Edge>, Vec<&Edge>) = g
        .physical_edges()
        .into_iter()
        .partition(|e| e.is_external());
    Ok(FlatteningSpec::new(
        ext.iter().map(|e| Label::Edge(e.id)).collect(),
        int.iter().map(|e| Label::Edge(e.id)).collect(),
    ))
}

pub fn edge_vertex_flattening(
    g: &TNGraph,
    t: &SparseTensor,
    mode: ScalarMode,
) -> Result<FlatteningReport> {
    flattening_report(Some(g), t, &edge_vertex_spec(g)?, mode)
}

/// Rows on the physical edges of the top row, columns on the bottom row.
pub fn top_bottom_spec(g: &TNGraph) -> Result<FlatteningSpec> {
    let Some((2, n)) = g.topology().dims() else {
        return Err(AnalysisError::Unsupported("needs a 2-row grid".into()));
    };
    let row = |r: usize| -> Vec<Label> {
        (0..n)
            .flat_map(|c| g.physical_edges_of(g.grid_vertex(r, c).unwrap()))
            .filter(|e| !e.is_external())
            .map(|e| Label::Edge(e.id))
            .collect()
    };
    Ok(FlatteningSpec::new(row(0), row(1)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFamily {
    All,
    Balanced,
    Listed(Vec<FlatteningSpec>),
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Flattenings of `t` in `family`, each bipartition listed once (the side
/// holding the first axis, or the smaller side for odd balanced splits).
pub fn sweep_specs(t: &SparseTensor, family: &SweepFamily) -> Result<Vec<FlatteningSpec>> {
    let labels = t.labels();
    let n = labels.len();
    let count = match family {
        SweepFamily::Listed(v) => v.len() as u64,
        SweepFamily::All => (1u64 << n.saturating_sub(1).min(63)).saturating_sub(1),
        SweepFamily::Balanced => binomial(n as u64, (n / 2) as u64),
    };
    if count > MAX_SWEEP || n > 40 {
        return Err(AnalysisError::Guard(format!(
            "sweep of {count} flattenings exceeds the limit of {MAX_SWEEP}"
        )));
    }
    if let SweepFamily::Listed(v) = family {
        for s in v {
            s.check(t)?;
        }
        return Ok(v.clone());
    }
    let take = |mask: u64| {
        let (rows, cols): (Vec<_>, Vec<_>) = labels
            .iter()
            .enumerate()
            .partition(|(i, _)| mask >> i & 1 == 1);
        FlatteningSpec::new(
            rows.into_iter().map(|(_, l)| l.clone()).collect(),
            cols.into_iter().map(|(_, l)| l.clone()).collect(),
        )
    };
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let specs = match family {
        SweepFamily::All => (1..full).filter(|m| m & 1 == 1).map(take).collect(),
        SweepFamily::Balanced => (1..full)
            .filter(|m| m.count_ones() as usize == n / 2 && (n % 2 == 1 || m & 1 == 1))
            .map(take)
            .collect(),
        SweepFamily::Listed(_) => unreachable!(),
    };
    Ok(specs)
}

pub fn flattening_sweep(
    g: Option<&TNGraph>,
    t: &SparseTensor,
    family: &SweepFamily,
    mode: ScalarMode,
) -> Result<Vec<FlatteningReport>> {
    sweep_specs(t, family)?
        .par_iter()
        .map(|s| flattening_report(g, t, s, mode))
        .collect()
}

/// Largest flattening rank over all balanced splits and any `extra`
/// flattenings.
pub fn border_rank_lower_bound(
    t: &SparseTensor,
    extra: &[FlatteningSpec],
    mode: ScalarMode,
) -> Result<usize> {
    let mut specs = sweep_specs(t, &SweepFamily::Balanced)?;
    specs.extend(extra.iter().cloned());
    let ranks: Vec<usize> = specs
        .par_iter()
        .map(|s| Ok(rank_with(&flatten(t, s)?, mode)?))
        .collect::<Result<_>>()?;
    Ok(ranks
        .into_iter()
        .max()
        .unwrap_or(if t.is_zero() { 0 } else { 1 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{section3_closed_form, thm16_params};
    use crate::netgraph::{build_open_grid, build_torus_grid, WeightProfile};
    use crate::tensor::{int, random_tensor, Axis, RandomMode};

    fn phys(g: &TNGraph, labels: &[&str]) -> Vec<Label> {
        labels
            .iter()
            .map(|l| Label::Edge(g.physical_edges_of(g.vertex_by_label(l).unwrap())[0].id))
            .collect()
    }

    #[test]
    fn torus_rows_bound() {
        let g = build_torus_grid(2, 2, WeightProfile::new(2, 2)).unwrap();
        let spec = FlatteningSpec::new(phys(&g, &["1", "2"]), phys(&g, &["1'", "2'"]));
        let q = qmf_bound(&g, &spec).unwrap();
        assert_eq!(
            q,
            QmfBound {
                value: 16,
                straddling: false
            }
        );
    }

    #[test]
    fn empty_side_bound_is_one() {
        let g = build_torus_grid(2, 2, WeightProfile::new(2, 2)).unwrap();
        let spec = FlatteningSpec::new(vec![], phys(&g, &["1", "2", "1'", "2'"]));
        assert_eq!(qmf_bound(&g, &spec).unwrap().value, 1);
    }

    #[test]
    fn open_grid_edge_vertex_bound() {
        let g = build_open_grid(2, 2, WeightProfile::with_external(4, 4, 4)).unwrap();
        let spec = edge_vertex_spec(&g).unwrap();
        let q = qmf_bound(&g, &spec).unwrap();
        assert_eq!(q.value, 256);
        assert!(q.straddling);
        assert!(
            edge_vertex_spec(&build_torus_grid(2, 2, WeightProfile::new(2, 2)).unwrap()).is_err()
        );
    }

    #[test]
    fn qmf_rejects_partial_spec() {
        let g = build_torus_grid(2, 2, WeightProfile::new(2, 2)).unwrap();
        let spec = FlatteningSpec::new(phys(&g, &["1"]), phys(&g, &["2"]));
        assert!(qmf_bound(&g, &spec).is_err());
    }

    #[test]
    fn sweep_counts() {
        let axes: Vec<Axis> = (0..6)
            .map(|i| Axis::new(format!("a{i}").as_str(), 2))
            .collect();
        let t = SparseTensor::new(axes).unwrap();
        assert_eq!(sweep_specs(&t, &SweepFamily::All).unwrap().len(), 31);
        assert_eq!(sweep_specs(&t, &SweepFamily::Balanced).unwrap().len(), 10);
        let axes: Vec<Axis> = (0..5)
            .map(|i| Axis::new(format!("a{i}").as_str(), 2))
            .collect();
        let t = SparseTensor::new(axes).unwrap();
        assert_eq!(sweep_specs(&t, &SweepFamily::Balanced).unwrap().len(), 10);
        let axes: Vec<Axis> = (0..22)
            .map(|i| Axis::new(format!("a{i}").as_str(), 1))
            .collect();
        let t = SparseTensor::new(axes).unwrap();
        assert!(sweep_specs(&t, &SweepFamily::All).is_err());
    }

    #[test]
    fn rank_one_sweep() {
        let axes: Vec<Axis> = (0..4)
            .map(|i| Axis::new(format!("a{i}").as_str(), 3))
            .collect();
        let v = vec![int(1), int(-2), int(5)];
        let t = SparseTensor::rank_one(axes, &vec![v; 4]).unwrap();
        for r in flattening_sweep(None, &t, &SweepFamily::All, ScalarMode::Rational).unwrap() {
            assert_eq!(r.rank, 1);
            assert!(r.qmf_bound.is_none());
        }
        assert_eq!(
            border_rank_lower_bound(&t, &[], ScalarMode::Rational).unwrap(),
            1
        );
    }

    #[test]
    fn random_without_network_within_dim_bounds() {
        let axes: Vec<Axis> = (0..4)
            .map(|i| Axis::new(format!("a{i}").as_str(), 2))
            .collect();
        let t = random_tensor(axes, 5, RandomMode::DenseSmallInt).unwrap();
        for r in flattening_sweep(None, &t, &SweepFamily::All, ScalarMode::Rational).unwrap() {
            assert!(r.within_bounds());
        }
    }

    #[test]
    fn alternating_balanced_sweep() {
        let p = thm16_params(4).unwrap();
        let t = section3_closed_form(&p).unwrap();
        let g = crate::constructions::section3_graph(4).unwrap();
        let tb = top_bottom_spec(&g).unwrap();
        let reports =
            flattening_sweep(Some(&g), &t, &SweepFamily::Balanced, ScalarMode::Rational).unwrap();
        assert_eq!(reports.len(), 35);
        let same_split = |r: &&FlatteningReport| {
            let rows: BTreeSet<_> = r.spec.rows.iter().collect();
            rows == tb.rows.iter().collect() || rows == tb.cols.iter().collect()
        };
        let hit = reports.iter().find(same_split).expect("top/bottom split");
        assert_eq!(hit.rank, 16);
        assert!(hit.saturated);
        assert!(reports.iter().all(|r| r.within_bounds()));
        assert_eq!(
            border_rank_lower_bound(&t, &[], ScalarMode::Rational).unwrap(),
            16
        );
    }

    #[test]
    fn complement_has_same_rank() {
        let axes: Vec<Axis> = (0..5)
            .map(|i| Axis::new(format!("a{i}").as_str(), 2))
            .collect();
        let t = random_tensor(axes, 9, RandomMode::Sparse { density: 0.3 }).unwrap();
        for s in sweep_specs(&t, &SweepFamily::All)
            .unwrap()
            .into_iter()
            .take(8)
        {
            let a = flattening_report(None, &t, &s, ScalarMode::Rational).unwrap();
            let b = flattening_report(None, &t, &s.transposed(), ScalarMode::Rational).unwrap();
            assert_eq!(a.rank, b.rank);
        }
    }
}
