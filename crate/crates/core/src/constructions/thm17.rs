//! Two-term candidates for a single vertex tensor on the 2xN torus whose
//! bound state has a large `(N+1, N-1)` flattening.

use std::collections::HashSet;

use super::{check_even, role_axes, section3_graph, Result};
use crate::netgraph::{TNGraph, VertexId};
use crate::tensor::{int, FlatteningSpec, Label, Scalar, SparseTensor};

#[derive(Clone, Debug)]
pub struct Candidate {
    pub tensor: SparseTensor,
    /// `x(P) + y(Q)` with the physical basis index and the bond values in
    /// the order up, right, down, left, all 1-based.
    pub description: String,
}

fn bonds(pattern: u8) -> [u32; 4] {
    [0, 1, 2, 3].map(|b| u32::from(pattern >> (3 - b) & 1))
}

fn pattern_name(pattern: u8) -> String {
    bonds(pattern).iter().map(|b| (b + 1).to_string()).collect()
}

fn two_term(x: u32, p: u8, y: u32, q: u8) -> Result<Candidate> {
    let mut t = SparseTensor::new(role_axes([2; 5]))?;
    for (phys, pat) in [(x, p), (y, q)] {
        let [u, r, d, l] = bonds(pat);
        t.add_entry(vec![phys, u, r, d, l], int(1))?;
    }
    Ok(Candidate {
        tensor: t,
        description: format!(
            "e{}({}) + e{}({})",
            x + 1,
            pattern_name(p),
            y + 1,
            pattern_name(q)
        ),
    })
}

fn family(pairs: impl Iterator<Item = (u8, u8)>) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    for (p, q) in pairs {
        for x in 0..2 {
            for y in 0..2 {
                out.push(two_term(x, p, y, q)?);
            }
        }
    }
    Ok(out)
}

fn alternating_pairs() -> Vec<(u8, u8)> {
    // bond patterns with two 1s and two 2s, paired with their complement
    (0u8..16)
        .filter(|p| p.count_ones() == 2)
        .map(|p| (p, !p & 0xf))
        .filter(|(p, q)| p < q)
        .collect()
}

/// Candidates `x (x) P + y (x) Q` with `x, y` basis vectors and `P, Q`
/// complementary bond patterns with two 1s and two 2s.
pub fn thm17_candidates(n: usize) -> Result<Vec<Candidate>> {
    check_even(n)?;
    family(alternating_pairs().into_iter())
}

/// All remaining two-term candidates: any two distinct bond patterns.
pub fn thm17_extended_candidates(n: usize) -> Result<Vec<Candidate>> {
    check_even(n)?;
    let seen: HashSet<(u8, u8)> = alternating_pairs().into_iter().collect();
    family(
        (0u8..16)
            .flat_map(|p| (p + 1..16).map(move |q| (p, q)))
            .filter(|pq| !seen.contains(pq)),
    )
}

pub fn thm17_graph(n: usize) -> Result<TNGraph> {
    section3_graph(n)
}

fn phys_label(g: &TNGraph, v: VertexId) -> Label {
    Label::Edge(g.physical_edges_of(v)[0].id)
}

/// Rows on the physical edges of `1, 1', 2, 3, ..., N`; columns on
/// `2', ..., N'`.
pub fn thm17_flattening(g: &TNGraph) -> FlatteningSpec {
    let n = g.num_vertices() / 2;
    let mut rows = vec![phys_label(g, VertexId(0)), phys_label(g, VertexId(1))];
    rows.extend((1..n).map(|c| phys_label(g, VertexId(2 * c))));
    let cols = (1..n).map(|c| phys_label(g, VertexId(2 * c + 1))).collect();
    FlatteningSpec::new(rows, cols)
}

/// Common value of the nonzero entries of the state with `e_1` fed into the
/// physical axes of `1` and `1'`, if there is one.
pub fn bound_slice_coefficient(g: &TNGraph, state: &SparseTensor) -> Result<Option<Scalar>> {
    let fixed = [
        (phys_label(g, VertexId(0)), 0),
        (phys_label(g, VertexId(1)), 0),
    ];
    let slice = state.slice(&fixed)?;
    let mut values = slice.entries().map(|(_, v)| v);
    let Some(first) = values.next() else {
        return Ok(None);
    };
    Ok(values.all(|v| v == first).then(|| first.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::bound_contract;

    #[test]
    fn family_sizes() {
        let c = thm17_candidates(4).unwrap();
        assert_eq!(c.len(), 12);
        assert!(c.len() <= 64);
        assert_eq!(thm17_extended_candidates(4).unwrap().len(), 120 * 4 - 12);
        assert!(thm17_candidates(3).is_err());
    }

    #[test]
    fn candidates_have_two_terms() {
        for c in thm17_candidates(2)
            .unwrap()
            .into_iter()
            .chain(thm17_extended_candidates(2).unwrap())
        {
            assert_eq!(c.tensor.nnz(), 2, "{}", c.description);
        }
    }

    #[test]
    fn flattening_layout() {
        let g = thm17_graph(4).unwrap();
        let spec = thm17_flattening(&g);
        assert_eq!((spec.rows.len(), spec.cols.len()), (5, 3));
    }

    #[test]
    fn alternating_family_has_two_configurations() {
        // complementary patterns lock each row into one of two states
        let g = thm17_graph(4).unwrap();
        for c in thm17_candidates(4).unwrap() {
            let t = bound_contract(&g, &c.tensor).unwrap();
            assert!(t.nnz() <= 2, "{}", c.description);
        }
    }
}
