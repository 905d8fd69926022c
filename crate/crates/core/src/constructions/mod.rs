//! Explicit vertex tensors and assignments.
//!
//! Vertex tensors that are meant to be placed on grids are written with
//! role-labelled axes named after the vertex ports: `phys`, `up`, `right`,
//! `down`, `left`. [`crate::tensor::place_roles`] turns them into tensors on
//! concrete edges.

mod section3;
mod survival;
mod thm17;

pub use section3::{
    section3_assignment, section3_closed_form, section3_graph, thm16_params, Section3Params,
};
pub use survival::{
    reference_survival_table, survival_search, survival_tables, SearchOutcome, SurvivalTable,
    SURVIVAL_LETTERS,
};
pub use thm17::{
    bound_slice_coefficient, thm17_candidates, thm17_extended_candidates, thm17_flattening,
    thm17_graph, Candidate,
};

use thiserror::Error;

use crate::netgraph::{build_open_grid, GraphError, Port, TNGraph, VertexId, WeightProfile};
use crate::tensor::{int, place_roles, role_label, Assignment, Axis, SparseTensor, TensorError};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("N must be even (got {0})")]
    OddN(usize),
    #[error("parameter `{name}` must be at least {min} (got {got})")]
    TooSmall {
        name: &'static str,
        min: usize,
        got: usize,
    },
    #[error("need d >= k (got d = {d}, k = {k})")]
    KExceedsD { k: usize, d: usize },
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub type Result<T> = std::result::Result<T, ConstructionError>;

/// Port order used for role-labelled tensors.
pub const ROLE_ORDER: [Port; 5] = [
    Port::Physical,
    Port::Up,
    Port::Right,
    Port::Down,
    Port::Left,
];

/// Axes `phys, up, right, down, left` with the given dimensions.
pub fn role_axes(dims: [usize; 5]) -> Vec<Axis> {
    ROLE_ORDER
        .iter()
        .zip(dims)
        .map(|(p, d)| Axis::new(role_label(*p), d))
        .collect()
}

pub(crate) fn check_even(n: usize) -> Result<()> {
    if n == 0 {
        return Err(ConstructionError::TooSmall {
            name: "N",
            min: 2,
            got: n,
        });
    }
    if n % 2 == 1 {
        return Err(ConstructionError::OddN(n));
    }
    Ok(())
}

/// Iterated matrix multiplication tensor
/// `sum a^i_j (x) b^m_i (x) c^k_l (x) d^j_k (x) e^l_m` with `a` on the upper
/// port, `b` physical, `c` right, `d` lower and `e` left. Each factor is
/// `C^s (x) C^s`; the pair `(x, y)` sits at flat index `x*s + y`.
pub fn imm_vertex_tensor(s: usize) -> Result<SparseTensor> {
    if s == 0 {
        return Err(ConstructionError::TooSmall {
            name: "s",
            min: 1,
            got: 0,
        });
    }
    let q = s * s;
    let mut t = SparseTensor::new(role_axes([q; 5]))?;
    let at = |x: usize, y: usize| (x * s + y) as u32;
    for i in 0..s {
        for j in 0..s {
            for k in 0..s {
                for l in 0..s {
                    for m in 0..s {
                        // phys, up, right, down, left
                        t.add_entry(
                            vec![at(m, i), at(i, j), at(k, l), at(j, k), at(l, m)],
                            int(1),
                        )?;
                    }
                }
            }
        }
    }
    Ok(t)
}

/// Open 2xN grid with every weight equal to `s^2`, the setting in which
/// [`imm_vertex_tensor`] is placed at every vertex.
pub fn imm_graph(s: usize, n: usize) -> Result<TNGraph> {
    let q = s * s;
    Ok(build_open_grid(
        2,
        n,
        WeightProfile::with_external(q, q, q),
    )?)
}

/// Open 2xN grid with entanglement weight 1, internal weight `k` and
/// external weight `d`.
pub fn thm14_graph(n: usize, k: usize, d: usize) -> Result<TNGraph> {
    if k == 0 || n == 0 {
        return Err(ConstructionError::TooSmall {
            name: if k == 0 { "k" } else { "N" },
            min: 1,
            got: 0,
        });
    }
    if d < k {
        return Err(ConstructionError::KExceedsD { k, d });
    }
    Ok(build_open_grid(
        2,
        n,
        WeightProfile::with_external(1, k, d),
    )?)
}

/// Per-vertex tensors on the open 2xN grid: `sum_i e_i(up) (x) e_i(phys)`
/// on the top row and `sum_i e_i(phys) (x) e_i(down)` on the bottom row,
/// with `f = e_1` on every other port.
pub fn thm14_assignment(n: usize, k: usize, d: usize) -> Result<(TNGraph, Assignment)> {
    let g = thm14_graph(n, k, d)?;
    let mut asgn = Assignment::new();
    for v in g.vertex_ids() {
        let (row, _) = g.vertices()[v.0].coords.expect("grid vertex");
        let roles = thm14_vertex(&g, v, k, row == 0)?;
        asgn.insert(v, place_roles(&g, v, &roles)?);
    }
    Ok((g, asgn))
}

fn thm14_vertex(g: &TNGraph, v: VertexId, k: usize, top: bool) -> Result<SparseTensor> {
    let ports = g.ports(v)?;
    let mut dims = [0usize; 5];
    for (slot, p) in ROLE_ORDER.iter().enumerate() {
        dims[slot] = g.edge(ports[p])?.weight;
    }
    let mut t = SparseTensor::new(role_axes(dims))?;
    for i in 0..k as u32 {
        let idx = if top {
            vec![i, i, 0, 0, 0]
        } else {
            vec![i, 0, 0, i, 0]
        };
        t.add_entry(idx, int(1))?;
    }
    Ok(t)
}
