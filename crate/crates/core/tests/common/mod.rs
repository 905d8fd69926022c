//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tns_lab::netgraph::{GraphBuilder, TNGraph, VertexId};
use tns_lab::tensor::{
    random_tensor, Assignment, Axis, Label, RandomMode, SparseMatrix, SparseTensor,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_assignment(g: &TNGraph, seed: u64, mode: RandomMode) -> Assignment {
    let mut r = rng(seed);
    let mut asgn = Assignment::new();
    for v in g.vertex_ids() {
        let axes: Vec<Axis> = g
            .vertex_space_shape(v)
            .unwrap()
            .into_iter()
            .map(|a| Axis::edge(a.edge, a.dim, a.dual))
            .collect();
        asgn.insert(v, random_tensor(axes, r.next_u64(), mode).unwrap());
    }
    asgn
}

/// Random connected multigraph on `n` vertices, one physical edge each.
pub fn random_graph(r: &mut impl Rng, n: usize, weights: &[usize]) -> TNGraph {
    let mut b = GraphBuilder::new();
    let vs: Vec<VertexId> = (0..n).map(|i| b.add_vertex(format!("v{i}"))).collect();
    for i in 1..n {
        let j = r.gen_range(0..i);
        b.add_entanglement(vs[j], vs[i], weights[r.gen_range(0..weights.len())]);
    }
    for _ in 0..r.gen_range(0..=n) {
        let (i, j) = (r.gen_range(0..n), r.gen_range(0..n));
        if i != j {
            b.add_entanglement(vs[i], vs[j], weights[r.gen_range(0..weights.len())]);
        }
    }
    for &v in &vs {
        b.add_physical(v, false, 2);
    }
    b.build().unwrap()
}

/// Disjoint nonempty source and sink sets.
pub fn random_terminals(r: &mut impl Rng, n: usize) -> (Vec<VertexId>, Vec<VertexId>) {
    loop {
        let (mut s, mut t) = (Vec::new(), Vec::new());
        for i in 0..n {
            match r.gen_range(0..3) {
                0 => s.push(VertexId(i)),
                1 => t.push(VertexId(i)),
                _ => {}
            }
        }
        if !s.is_empty() && !t.is_empty() {
            return (s, t);
        }
    }
}

/// Rank by plain row reduction of the dense rational matrix.
pub fn dense_rank(m: &SparseMatrix) -> usize {
    let (nr, nc) = (m.nrows as usize, m.ncols as usize);
    let mut a = vec![vec![BigRational::zero(); nc]; nr];
    for (i, j, v) in &m.entries {
        a[*i as usize][*j as usize] = v.clone();
    }
    let mut rank = 0;
    for c in 0..nc {
        let Some(p) = (rank..nr).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][c].clone();
        for i in 0..nr {
            if i != rank && !a[i][c].is_zero() {
                let f = &a[i][c] / &pivot;
                let pivot_row = a[rank].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row).skip(c) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Dense integer copy of `t` in colex order (first axis fastest).
pub fn dense(t: &SparseTensor) -> Vec<i64> {
    let dims: Vec<usize> = t.axes().iter().map(|a| a.dim).collect();
    let mut out = vec![0i64; dims.iter().product()];
    for (idx, v) in t.entries() {
        assert!(v.is_integer());
        out[colex(idx.iter().map(|&i| i as usize), &dims)] = v.to_integer().to_i64().unwrap();
    }
    out
}

pub fn colex(idx: impl Iterator<Item = usize>, dims: &[usize]) -> usize {
    let idx: Vec<usize> = idx.collect();
    idx.iter()
        .zip(dims)
        .rev()
        .fold(0, |acc, (i, d)| acc * d + i)
}

pub fn unravel(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .map(|d| {
            let i = flat % d;
            flat /= d;
            i
        })
        .collect()
}

/// Contraction of `t` and `u` over axis position pairs by looping over every
/// cell of the output and every value of the contracted indices.
pub fn dense_contract(t: &SparseTensor, u: &SparseTensor, pairs: &[(usize, usize)]) -> Vec<i64> {
    let td: Vec<usize> = t.axes().iter().map(|a| a.dim).collect();
    let ud: Vec<usize> = u.axes().iter().map(|a| a.dim).collect();
    let (dt, du) = (dense(t), dense(u));
    let free_t: Vec<usize> = (0..td.len())
        .filter(|i| !pairs.iter().any(|p| p.0 == *i))
        .collect();
    let free_u: Vec<usize> = (0..ud.len())
        .filter(|j| !pairs.iter().any(|p| p.1 == *j))
        .collect();
    let out_dims: Vec<usize> = free_t
        .iter()
        .map(|&i| td[i])
        .chain(free_u.iter().map(|&j| ud[j]))
        .collect();
    let sum_dims: Vec<usize> = pairs.iter().map(|p| td[p.0]).collect();
    let out_len: usize = out_dims.iter().product();
    let sum_len: usize = sum_dims.iter().product();
    let mut out = vec![0i64; out_len];
    for (o, cell) in out.iter_mut().enumerate() {
        let oi = unravel(o, &out_dims);
        for s in 0..sum_len {
            let si = unravel(s, &sum_dims);
            let mut ti = vec![0; td.len()];
            let mut ui = vec![0; ud.len()];
            for (k, &i) in free_t.iter().enumerate() {
                ti[i] = oi[k];
            }
            for (k, &j) in free_u.iter().enumerate() {
                ui[j] = oi[free_t.len() + k];
            }
            for (k, p) in pairs.iter().enumerate() {
                ti[p.0] = si[k];
                ui[p.1] = si[k];
            }
            *cell += dt[colex(ti.into_iter(), &td)] * du[colex(ui.into_iter(), &ud)];
        }
    }
    out
}

/// Two random tensors of at most 2^10 cells each and a random set of
/// contractible axis pairs.
pub fn random_pair(r: &mut impl Rng) -> (SparseTensor, SparseTensor, Vec<(usize, usize)>) {
    loop {
        let nt = r.gen_range(0..=4);
        let nu = r.gen_range(0..=4);
        let td: Vec<usize> = (0..nt).map(|_| r.gen_range(1..=4)).collect();
        let mut ud: Vec<usize> = (0..nu).map(|_| r.gen_range(1..=4)).collect();
        let npairs = r.gen_range(0..=nt.min(nu));
        let mut ti: Vec<usize> = (0..nt).collect();
        let mut ui: Vec<usize> = (0..nu).collect();
        ti.shuffle(r);
        ui.shuffle(r);
        let pairs: Vec<(usize, usize)> = ti.into_iter().zip(ui).take(npairs).collect();
        for &(i, j) in &pairs {
            ud[j] = td[i];
        }
        if td.iter().product::<usize>() > 1 << 10 || ud.iter().product::<usize>() > 1 << 10 {
            continue;
        }
        let t_axes = td
            .iter()
            .enumerate()
            .map(|(i, &d)| Axis::new(Label::name(format!("t{i}")), d))
            .collect();
        let u_axes = ud
            .iter()
            .enumerate()
            .map(|(j, &d)| {
                if pairs.iter().any(|p| p.1 == j) {
                    Axis::dual(Label::name(format!("u{j}")), d)
                } else {
                    Axis::new(Label::name(format!("u{j}")), d)
                }
            })
            .collect();
        let mode = RandomMode::Sparse { density: 0.4 };
        let t = random_tensor(t_axes, r.next_u64(), mode).unwrap();
        let u = random_tensor(u_axes, r.next_u64(), mode).unwrap();
        return (t, u, pairs);
    }
}
