//! Two-term vertex family on the 2xN torus with `d = k = 2`.
//!
//! Every vertex carries two or four terms `x (x) e_up (x) e_right (x)
//! e_down (x) e_left`. The horizontal bond values alternate along each row
//! and come in two complementary branches; the vertical bonds of columns
//! `2..N` copy a free index `i` between the top and bottom vertex. Column 1
//! pins the branch and ties the two rows together.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_even, role_axes, ConstructionError, Result};
use crate::netgraph::{build_torus_grid, TNGraph, VertexId, WeightProfile};
use crate::tensor::{int, place_roles, Assignment, Axis, Label, Scalar, SparseTensor};

/// A vector in `C^2`.
pub type Vec2 = [Scalar; 2];

/// Vectors `A^n_i`, `B^n_i` for every vertex `n` of the 2xN torus, indexed by
/// vertex id (column-major: `1, 1', 2, 2', ...`) and then by `i - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Section3Params {
    pub n: usize,
    pub a: Vec<[Vec2; 2]>,
    pub b: Vec<[Vec2; 2]>,
}

fn zero2() -> Vec2 {
    [int(0), int(0)]
}

fn basis(i: usize) -> Vec2 {
    let mut v = zero2();
    v[i] = int(1);
    v
}

impl Section3Params {
    pub fn zeros(n: usize) -> Result<Self> {
        check_even(n)?;
        let blank = || [zero2(), zero2()];
        Ok(Section3Params {
            n,
            a: (0..2 * n).map(|_| blank()).collect(),
            b: (0..2 * n).map(|_| blank()).collect(),
        })
    }

    /// Integer vectors with coordinates uniform in `[-9, 9]`.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let mut p = Self::zeros(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for slot in p.a.iter_mut().chain(p.b.iter_mut()) {
            for v in slot.iter_mut() {
                for x in v.iter_mut() {
                    *x = int(rng.gen_range(-9..=9));
                }
            }
        }
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        check_even(self.n)?;
        if self.a.len() != 2 * self.n || self.b.len() != 2 * self.n {
            return Err(ConstructionError::Invalid(format!(
                "expected {} vertex entries for N = {}",
                2 * self.n,
                self.n
            )));
        }
        Ok(())
    }
}

/// Vector choices that turn the family into
/// `sum_{i_1..i_N} e_{i_1} (x) e_{i_1} (x) ... (x) e_{i_N} (x) e_{i_N}`.
pub fn thm16_params(n: usize) -> Result<Section3Params> {
    let mut p = Section3Params::zeros(n)?;
    // column 1: A^1_1 = e1, B^1_1 = e2, B^1'_1 = e1, A^1'_1 = e2
    p.a[0][0] = basis(0);
    p.b[0][0] = basis(1);
    p.b[1][0] = basis(0);
    p.a[1][0] = basis(1);
    for v in 2..2 * n {
        for i in 0..2 {
            p.a[v][i] = basis(i);
            p.b[v][i] = basis(i);
        }
    }
    Ok(p)
}

pub fn section3_graph(n: usize) -> Result<TNGraph> {
    check_even(n)?;
    Ok(build_torus_grid(2, n, WeightProfile::new(2, 2))?)
}

/// Left bond value (0-based) at column `p` (1-based) in branch `beta`.
fn left_bond(beta: usize, p: usize) -> u32 {
    ((beta + p) % 2) as u32
}

fn add_term(t: &mut SparseTensor, x: &Vec2, bonds: [u32; 4]) -> Result<()> {
    let [up, right, down, left] = bonds;
    for (c, val) in x.iter().enumerate() {
        t.add_entry(vec![c as u32, up, right, down, left], val.clone())?;
    }
    Ok(())
}

fn vertex_tensor(p: &Section3Params, col: usize, top: bool) -> Result<SparseTensor> {
    let mut t = SparseTensor::new(role_axes([2; 5]))?;
    let v = 2 * col + usize::from(!top);
    let pc = col + 1;
    if col == 0 {
        // branch 0: up/down carry (1, 2) on top and (2, 1) below
        let (l0, l1) = (left_bond(0, 1), left_bond(1, 1));
        if top {
            add_term(&mut t, &p.a[v][0], [0, 1 - l0, 1, l0])?;
            add_term(&mut t, &p.b[v][0], [1, 1 - l1, 0, l1])?;
        } else {
            add_term(&mut t, &p.b[v][0], [1, 1 - l0, 0, l0])?;
            add_term(&mut t, &p.a[v][0], [0, 1 - l1, 1, l1])?;
        }
        return Ok(t);
    }
    for beta in 0..2 {
        let l = left_bond(beta, pc);
        for i in 0..2 {
            let x = match (top, beta) {
                (true, 0) | (false, 1) => &p.b[v][i],
                _ => &p.a[v][i],
            };
            add_term(&mut t, x, [i as u32, 1 - l, i as u32, l])?;
        }
    }
    Ok(t)
}

/// Role-labelled vertex tensors, in vertex-id order.
pub fn section3_vertex_tensors(p: &Section3Params) -> Result<Vec<SparseTensor>> {
    p.check()?;
    let mut out = Vec::with_capacity(2 * p.n);
    for col in 0..p.n {
        out.push(vertex_tensor(p, col, true)?);
        out.push(vertex_tensor(p, col, false)?);
    }
    Ok(out)
}

/// The family as an assignment on the 2xN torus.
pub fn section3_assignment(p: &Section3Params) -> Result<(TNGraph, Assignment)> {
    let tensors = section3_vertex_tensors(p)?;
    let g = section3_graph(p.n)?;
    let mut asgn = Assignment::new();
    for (i, t) in tensors.iter().enumerate() {
        asgn.insert(VertexId(i), place_roles(&g, VertexId(i), t)?);
    }
    Ok((g, asgn))
}

/// Direct expansion of the contracted state as a sum of `2^N` rank-one
/// terms, on the physical axes of [`section3_graph`].
pub fn section3_closed_form(p: &Section3Params) -> Result<SparseTensor> {
    p.check()?;
    let g = section3_graph(p.n)?;
    let axes: Vec<Axis> = g
        .physical_edges()
        .iter()
        .map(|e| Axis::new(Label::Edge(e.id), 2))
        .collect();
    let mut total = SparseTensor::new(axes.clone())?;
    for gamma in 0..1usize << (p.n - 1) {
        for branch in 0..2 {
            let mut vectors: Vec<Vec<Scalar>> = Vec::with_capacity(2 * p.n);
            let (top1, bot1) = if branch == 0 {
                (&p.a[0][0], &p.b[1][0])
            } else {
                (&p.b[0][0], &p.a[1][0])
            };
            vectors.push(top1.to_vec());
            vectors.push(bot1.to_vec());
            for col in 1..p.n {
                let i = gamma >> (col - 1) & 1;
                let (top, bot) = if branch == 0 {
                    (&p.b[2 * col][i], &p.a[2 * col + 1][i])
                } else {
                    (&p.a[2 * col][i], &p.b[2 * col + 1][i])
                };
                vectors.push(top.to_vec());
                vectors.push(bot.to_vec());
            }
            total = total.add(&SparseTensor::rank_one(axes.clone(), &vectors)?)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::network_contract;

    #[test]
    fn first_vertex_matches_displayed_tensor() {
        // A (x) e1 e1 e2 e2 + B (x) e2 e2 e1 e1 in the order up, right, down, left
        let mut p = Section3Params::zeros(2).unwrap();
        p.a[0][0] = [int(3), int(5)];
        p.b[0][0] = [int(7), int(11)];
        let t = &section3_vertex_tensors(&p).unwrap()[0];
        let mut expected = SparseTensor::new(role_axes([2; 5])).unwrap();
        for c in 0..2u32 {
            expected
                .add_entry(vec![c, 0, 0, 1, 1], p.a[0][0][c as usize].clone())
                .unwrap();
            expected
                .add_entry(vec![c, 1, 1, 0, 0], p.b[0][0][c as usize].clone())
                .unwrap();
        }
        assert_eq!(*t, expected);
    }

    #[test]
    fn odd_n_rejected() {
        assert!(matches!(
            Section3Params::zeros(3),
            Err(ConstructionError::OddN(3))
        ));
        assert!(thm16_params(5).is_err());
        assert!(section3_graph(1).is_err());
    }

    #[test]
    fn alternating_closed_form_n2() {
        let t = section3_closed_form(&thm16_params(2).unwrap()).unwrap();
        assert_eq!(t.nnz(), 4);
        for i1 in 0..2u32 {
            for i2 in 0..2u32 {
                assert_eq!(t.get(&[i1, i1, i2, i2]), int(1));
            }
        }
    }

    #[test]
    fn closed_form_term_count() {
        for n in [2, 4, 6] {
            let t = section3_closed_form(&thm16_params(n).unwrap()).unwrap();
            assert_eq!(t.nnz(), 1 << n);
            assert!(t.entries().all(|(_, v)| *v == int(1)));
        }
    }

    #[test]
    fn contraction_matches_closed_form() {
        for n in [2, 4] {
            for seed in 0..3 {
                let p = Section3Params::random(n, seed).unwrap();
                let (g, asgn) = section3_assignment(&p).unwrap();
                let t = network_contract(&g, &asgn, None).unwrap();
                assert_eq!(t, section3_closed_form(&p).unwrap(), "N = {n}, seed {seed}");
            }
        }
    }

    #[test]
    fn zero_vectors_give_zero() {
        let p = Section3Params::zeros(4).unwrap();
        let (g, asgn) = section3_assignment(&p).unwrap();
        assert!(network_contract(&g, &asgn, None).unwrap().is_zero());
    }
}
