use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use super::{Scalar, TensorError};
use crate::netgraph::EdgeId;

/// Axis label: a graph edge or a free name such as `up` or `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Edge(EdgeId),
    Name(String),
}

impl Label {
    pub fn name(s: impl Into<String>) -> Label {
        Label::Name(s.into())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Edge(id) => write!(f, "e{id}"),
            Label::Name(s) => f.write_str(s),
        }
    }
}

impl FromStr for Label {
    type Err = TensorError;

    fn from_str(s: &str) -> Result<Label, TensorError> {
        if s.is_empty() || s.contains(|c: char| c.is_whitespace() || c == ':' || c == ',') {
            return Err(TensorError::BadLabel(s.to_string()));
        }
        if let Some(rest) = s.strip_prefix('e') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                if let Ok(id) = rest.parse() {
                    return Ok(Label::Edge(id));
                }
            }
        }
        Ok(Label::Name(s.to_string()))
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Label {
        s.parse().unwrap_or_else(|_| Label::Name(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Axis {
    pub label: Label,
    pub dim: usize,
    pub dual: bool,
}

impl Axis {
    pub fn new(label: impl Into<Label>, dim: usize) -> Axis {
        Axis {
            label: label.into(),
            dim,
            dual: false,
        }
    }

    pub fn dual(label: impl Into<Label>, dim: usize) -> Axis {
        Axis {
            label: label.into(),
            dim,
            dual: true,
        }
    }

    pub fn edge(id: EdgeId, dim: usize, dual: bool) -> Axis {
        Axis {
            label: Label::Edge(id),
            dim,
            dual,
        }
    }
}

/// Exact sparse tensor with labelled axes. Only nonzero entries are stored, so
/// two tensors are equal exactly when their axes and entry maps are equal.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseTensor {
    axes: Vec<Axis>,
    entries: HashMap<Vec<u32>, Scalar>,
}

impl SparseTensor {
    /// Zero tensor with the given axes.
    pub fn new(axes: Vec<Axis>) -> Result<SparseTensor, TensorError> {
        let mut seen = HashSet::new();
        for a in &axes {
            if a.dim == 0 || a.dim > u32::MAX as usize {
                return Err(TensorError::BadDimension(a.label.clone(), a.dim));
            }
            if !seen.insert(&a.label) {
                return Err(TensorError::DuplicateLabel(a.label.clone()));
            }
        }
        Ok(SparseTensor {
            axes,
            entries: HashMap::new(),
        })
    }

    pub fn from_entries<I>(axes: Vec<Axis>, entries: I) -> Result<SparseTensor, TensorError>
    where
        I: IntoIterator<Item = (Vec<u32>, Scalar)>,
    {
        let mut t = SparseTensor::new(axes)?;
        for (idx, v) in entries {
            t.add_entry(idx, v)?;
        }
        Ok(t)
    }

    /// `v_1 ⊗ v_2 ⊗ ... ⊗ v_n`, one vector per axis.
    pub fn rank_one(axes: Vec<Axis>, vectors: &[Vec<Scalar>]) -> Result<SparseTensor, TensorError> {
        let mut t = SparseTensor::new(axes)?;
        if vectors.len() != t.axes.len() {
            return Err(TensorError::Arity {
                expected: t.axes.len(),
                got: vectors.len(),
            });
        }
        for (a, v) in t.axes.iter().zip(vectors) {
            if v.len() != a.dim {
                return Err(TensorError::DimensionMismatch {
                    left: a.label.clone(),
                    left_dim: a.dim,
                    right: a.label.clone(),
                    right_dim: v.len(),
                });
            }
        }
        let mut partial: Vec<(Vec<u32>, Scalar)> = vec![(Vec::new(), Scalar::one())];
        for v in vectors {
            let mut next = Vec::new();
            for (idx, c) in &partial {
                for (i, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        let mut j = idx.clone();
                        j.push(i as u32);
                        next.push((j, c * x));
                    }
                }
            }
            partial = next;
        }
        for (idx, v) in partial {
            t.add_entry(idx, v)?;
        }
        Ok(t)
    }

    /// Order-zero tensor holding a single value.
    pub fn scalar(value: Scalar) -> SparseTensor {
        let mut entries = HashMap::new();
        if !value.is_zero() {
            entries.insert(Vec::new(), value);
        }
        SparseTensor {
            axes: Vec::new(),
            entries,
        }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn order(&self) -> usize {
        self.axes.len()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.axes.iter().map(|a| a.label.clone()).collect()
    }

    pub fn axis_position(&self, label: &Label) -> Option<usize> {
        self.axes.iter().position(|a| &a.label == label)
    }

    pub fn axis(&self, label: &Label) -> Option<&Axis> {
        self.axes.iter().find(|a| &a.label == label)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Product of the axis dimensions, if it fits in 128 bits.
    pub fn total_size(&self) -> Option<u128> {
        self.axes
            .iter()
            .try_fold(1u128, |acc, a| acc.checked_mul(a.dim as u128))
    }

    pub fn get(&self, index: &[u32]) -> Scalar {
        self.entries
            .get(index)
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<u32>, &Scalar)> + '_ {
        self.entries.iter()
    }

    /// Entries in lexicographic index order.
    pub fn sorted_entries(&self) -> Vec<(&Vec<u32>, &Scalar)> {
        let mut v: Vec<_> = self.entries.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    fn check_index(&self, index: &[u32]) -> Result<(), TensorError> {
        if index.len() != self.axes.len() {
            return Err(TensorError::Arity {
                expected: self.axes.len(),
                got: index.len(),
            });
        }
        for (i, a) in index.iter().zip(&self.axes) {
            if *i as usize >= a.dim {
                return Err(TensorError::IndexOutOfBounds {
                    label: a.label.clone(),
                    index: *i as usize,
                    dim: a.dim,
                });
            }
        }
        Ok(())
    }

    /// Adds `value` to the entry at `index`, dropping it if the sum vanishes.
    pub fn add_entry(&mut self, index: Vec<u32>, value: Scalar) -> Result<(), TensorError> {
        self.check_index(&index)?;
        accumulate(&mut self.entries, index, value);
        Ok(())
    }

    pub fn set(&mut self, index: Vec<u32>, value: Scalar) -> Result<(), TensorError> {
        self.check_index(&index)?;
        if value.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
        Ok(())
    }

    pub fn scale(&self, c: &Scalar) -> SparseTensor {
        if c.is_zero() {
            return SparseTensor {
                axes: self.axes.clone(),
                entries: HashMap::new(),
            };
        }
        SparseTensor {
            axes: self.axes.clone(),
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }

    /// Entrywise sum; both tensors must have identical axes.
    pub fn add(&self, other: &SparseTensor) -> Result<SparseTensor, TensorError> {
        if self.axes != other.axes {
            return Err(TensorError::AxesDiffer);
        }
        let mut out = self.clone();
        for (k, v) in &other.entries {
            accumulate(&mut out.entries, k.clone(), v.clone());
        }
        Ok(out)
    }

    /// Reorders axes to follow `order`, which must list every label once.
    pub fn permuted(&self, order: &[Label]) -> Result<SparseTensor, TensorError> {
        if order.len() != self.axes.len() {
            return Err(TensorError::Arity {
                expected: self.axes.len(),
                got: order.len(),
            });
        }
        let perm: Vec<usize> = order
            .iter()
            .map(|l| {
                self.axis_position(l)
                    .ok_or_else(|| TensorError::UnknownLabel(l.clone()))
            })
            .collect::<Result<_, _>>()?;
        let axes: Vec<Axis> = perm.iter().map(|&p| self.axes[p].clone()).collect();
        let mut out = SparseTensor::new(axes)?;
        out.entries = self
            .entries
            .iter()
            .map(|(k, v)| (perm.iter().map(|&p| k[p]).collect(), v.clone()))
            .collect();
        Ok(out)
    }

    /// Renames axes. Labels missing from the map keep their name.
    pub fn relabeled(
        &self,
        rename: impl Fn(&Label) -> Option<Label>,
    ) -> Result<SparseTensor, TensorError> {
        let axes = self
            .axes
            .iter()
            .map(|a| Axis {
                label: rename(&a.label).unwrap_or_else(|| a.label.clone()),
                ..a.clone()
            })
            .collect();
        let mut out = SparseTensor::new(axes)?;
        out.entries = self.entries.clone();
        Ok(out)
    }

    /// Reorders axes and resets their variance to match `shape`, matching by
    /// label. Dimensions must agree.
    pub fn conform_to(&self, shape: &[Axis]) -> Result<SparseTensor, TensorError> {
        let order: Vec<Label> = shape.iter().map(|a| a.label.clone()).collect();
        let mut out = self.permuted(&order)?;
        for (a, want) in out.axes.iter_mut().zip(shape) {
            if a.dim != want.dim {
                return Err(TensorError::DimensionMismatch {
                    left: a.label.clone(),
                    left_dim: a.dim,
                    right: want.label.clone(),
                    right_dim: want.dim,
                });
            }
            a.dual = want.dual;
        }
        Ok(out)
    }

    /// Tensor product `self ⊗ other`.
    pub fn outer(&self, other: &SparseTensor) -> Result<SparseTensor, TensorError> {
        contract_pair(self, other, &[])
    }

    /// Order-zero tensor when every axis has been fixed; used for inner
    /// products and for evaluating a tensor on basis vectors.
    pub fn slice(&self, fixed: &[(Label, u32)]) -> Result<SparseTensor, TensorError> {
        let mut pos = Vec::with_capacity(fixed.len());
        for (l, i) in fixed {
            let p = self
                .axis_position(l)
                .ok_or_else(|| TensorError::UnknownLabel(l.clone()))?;
            if *i as usize >= self.axes[p].dim {
                return Err(TensorError::IndexOutOfBounds {
                    label: l.clone(),
                    index: *i as usize,
                    dim: self.axes[p].dim,
                });
            }
            pos.push((p, *i));
        }
        let keep: Vec<usize> = (0..self.axes.len())
            .filter(|p| !pos.iter().any(|(q, _)| q == p))
            .collect();
        let mut out = SparseTensor::new(keep.iter().map(|&p| self.axes[p].clone()).collect())?;
        for (k, v) in &self.entries {
            if pos.iter().all(|&(p, i)| k[p] == i) {
                out.entries
                    .insert(keep.iter().map(|&p| k[p]).collect(), v.clone());
            }
        }
        Ok(out)
    }
}

fn accumulate(map: &mut HashMap<Vec<u32>, Scalar>, index: Vec<u32>, value: Scalar) {
    if value.is_zero() {
        return;
    }
    match map.entry(index) {
        Entry::Occupied(mut o) => {
            *o.get_mut() += value;
            if o.get().is_zero() {
                o.remove();
            }
        }
        Entry::Vacant(v) => {
            v.insert(value);
        }
    }
}

/// Contracts `t` with `u` over the given label pairs (label in `t`, label in
/// `u`). Each pair must join a primal axis with a dual axis of the same
/// dimension. The result carries the unmatched axes of `t` followed by those
/// of `u`.
pub fn contract_pair(
    t: &SparseTensor,
    u: &SparseTensor,
    pairs: &[(Label, Label)],
) -> Result<SparseTensor, TensorError> {
    let mut pt = Vec::with_capacity(pairs.len());
    let mut pu = Vec::with_capacity(pairs.len());
    for (lt, lu) in pairs {
        let i = t
            .axis_position(lt)
            .ok_or_else(|| TensorError::UnknownLabel(lt.clone()))?;
        let j = u
            .axis_position(lu)
            .ok_or_else(|| TensorError::UnknownLabel(lu.clone()))?;
        if pt.contains(&i) || pu.contains(&j) {
            return Err(TensorError::RepeatedPair(lt.clone(), lu.clone()));
        }
        let (a, b) = (&t.axes[i], &u.axes[j]);
        if a.dim != b.dim {
            return Err(TensorError::DimensionMismatch {
                left: a.label.clone(),
                left_dim: a.dim,
                right: b.label.clone(),
                right_dim: b.dim,
            });
        }
        if a.dual == b.dual {
            return Err(TensorError::Variance(a.label.clone(), b.label.clone()));
        }
        pt.push(i);
        pu.push(j);
    }
    let rest_t: Vec<usize> = (0..t.axes.len()).filter(|i| !pt.contains(i)).collect();
    let rest_u: Vec<usize> = (0..u.axes.len()).filter(|j| !pu.contains(j)).collect();
    let axes: Vec<Axis> = rest_t
        .iter()
        .map(|&i| t.axes[i].clone())
        .chain(rest_u.iter().map(|&j| u.axes[j].clone()))
        .collect();
    let mut out = SparseTensor::new(axes)?;

    let mut by_key: HashMap<Vec<u32>, Vec<(Vec<u32>, &Scalar)>> = HashMap::new();
    for (k, v) in &u.entries {
        let key: Vec<u32> = pu.iter().map(|&j| k[j]).collect();
        let rest: Vec<u32> = rest_u.iter().map(|&j| k[j]).collect();
        by_key.entry(key).or_default().push((rest, v));
    }
    let mut key = Vec::with_capacity(pt.len());
    for (k, v) in &t.entries {
        key.clear();
        key.extend(pt.iter().map(|&i| k[i]));
        let Some(partners) = by_key.get(&key) else {
            continue;
        };
        let head: Vec<u32> = rest_t.iter().map(|&i| k[i]).collect();
        for (rest, w) in partners {
            let mut idx = Vec::with_capacity(head.len() + rest.len());
            idx.extend_from_slice(&head);
            idx.extend_from_slice(rest);
            accumulate(&mut out.entries, idx, v * *w);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::int;

    fn vector(label: &str, dim: usize, dual: bool, values: &[i64]) -> SparseTensor {
        let axis = Axis {
            label: label.into(),
            dim,
            dual,
        };
        SparseTensor::rank_one(vec![axis], &[values.iter().map(|&x| int(x)).collect()]).unwrap()
    }

    #[test]
    fn label_parsing() {
        assert_eq!("e12".parse::<Label>().unwrap(), Label::Edge(12));
        assert_eq!("up".parse::<Label>().unwrap(), Label::name("up"));
        assert_eq!("e".parse::<Label>().unwrap(), Label::name("e"));
        assert_eq!("ex1".parse::<Label>().unwrap(), Label::name("ex1"));
        assert!("a:b".parse::<Label>().is_err());
        assert!("".parse::<Label>().is_err());
        assert_eq!(Label::Edge(3).to_string(), "e3");
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(matches!(
            SparseTensor::new(vec![Axis::new("a", 2), Axis::new("a", 3)]),
            Err(TensorError::DuplicateLabel(_))
        ));
        assert!(matches!(
            SparseTensor::new(vec![Axis::new("a", 0)]),
            Err(TensorError::BadDimension(_, 0))
        ));
        let mut t = SparseTensor::new(vec![Axis::new("a", 2)]).unwrap();
        assert!(t.add_entry(vec![2], int(1)).is_err());
        assert!(t.add_entry(vec![0, 0], int(1)).is_err());
    }

    #[test]
    fn zeros_are_dropped() {
        let mut t = SparseTensor::new(vec![Axis::new("a", 2)]).unwrap();
        t.add_entry(vec![1], int(3)).unwrap();
        t.add_entry(vec![1], int(-3)).unwrap();
        t.add_entry(vec![0], int(0)).unwrap();
        assert!(t.is_zero());
        assert_eq!(t, SparseTensor::new(vec![Axis::new("a", 2)]).unwrap());
    }

    #[test]
    fn identity_contraction() {
        let delta = SparseTensor::from_entries(
            vec![Axis::new("i", 3), Axis::dual("j", 3)],
            (0..3).map(|i| (vec![i, i], int(1))),
        )
        .unwrap();
        let e2 = vector("j", 3, false, &[0, 1, 0]);
        let out = contract_pair(&delta, &e2, &[("j".into(), "j".into())]).unwrap();
        assert_eq!(out, vector("i", 3, false, &[0, 1, 0]));
    }

    #[test]
    fn rank_one_bilinearity() {
        let u = [1, -2];
        let v = [3, 0, 5];
        let w = [7, 1];
        let left = SparseTensor::rank_one(
            vec![Axis::new("u", 2), Axis::dual("v", 3)],
            &[u.map(int).to_vec(), v.map(int).to_vec()],
        )
        .unwrap();
        let right = SparseTensor::rank_one(
            vec![Axis::new("v", 3), Axis::new("w", 2)],
            &[v.map(int).to_vec(), w.map(int).to_vec()],
        )
        .unwrap();
        let out = contract_pair(&left, &right, &[("v".into(), "v".into())]).unwrap();
        let pairing = int(3 * 3 + 5 * 5);
        let expect = SparseTensor::rank_one(
            vec![Axis::new("u", 2), Axis::new("w", 2)],
            &[u.map(int).to_vec(), w.map(int).to_vec()],
        )
        .unwrap()
        .scale(&pairing);
        assert_eq!(out, expect);
    }

    #[test]
    fn contraction_errors() {
        let a = vector("x", 2, false, &[1, 1]);
        let b = vector("x", 3, true, &[1, 1, 1]);
        let c = vector("x", 2, false, &[1, 1]);
        let pair = [("x".into(), "x".into())];
        assert!(matches!(
            contract_pair(&a, &b, &pair),
            Err(TensorError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            contract_pair(&a, &c, &pair),
            Err(TensorError::Variance(..))
        ));
        assert!(matches!(
            contract_pair(&a, &c, &[("y".into(), "x".into())]),
            Err(TensorError::UnknownLabel(_))
        ));
        // unmatched labels that collide
        assert!(matches!(
            contract_pair(&a, &c, &[]),
            Err(TensorError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn permute_and_slice() {
        let t = SparseTensor::from_entries(
            vec![Axis::new("a", 2), Axis::new("b", 3)],
            [(vec![1, 2], int(5)), (vec![0, 1], int(-1))],
        )
        .unwrap();
        let p = t.permuted(&["b".into(), "a".into()]).unwrap();
        assert_eq!(p.get(&[2, 1]), int(5));
        assert_eq!(p.permuted(&["a".into(), "b".into()]).unwrap(), t);
        let s = t.slice(&[("a".into(), 1)]).unwrap();
        assert_eq!(s.order(), 1);
        assert_eq!(s.get(&[2]), int(5));
        assert_eq!(s.nnz(), 1);
    }
}
