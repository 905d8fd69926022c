use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::sparse::{Label, SparseTensor};
use super::{Scalar, TensorError};

/// Bipartition of a tensor's axes into row and column groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlatteningSpec {
    #[serde(with = "labels_as_strings")]
    pub rows: Vec<Label>,
    #[serde(with = "labels_as_strings")]
    pub cols: Vec<Label>,
}

mod labels_as_strings {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Label;

    pub fn serialize<S: Serializer>(labels: &[Label], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(labels.iter().map(|l| l.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Label>, D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl FlatteningSpec {
    pub fn new(rows: Vec<Label>, cols: Vec<Label>) -> Self {
        FlatteningSpec { rows, cols }
    }

    /// Rows as given; columns are the remaining axes of `t` in axis order.
    pub fn from_rows(t: &SparseTensor, rows: &[Label]) -> Result<Self, TensorError> {
        for l in rows {
            if t.axis_position(l).is_none() {
                return Err(TensorError::Flattening(format!("unknown axis `{l}`")));
            }
        }
        let cols = t
            .labels()
            .into_iter()
            .filter(|l| !rows.contains(l))
            .collect();
        let spec = FlatteningSpec {
            rows: rows.to_vec(),
            cols,
        };
        spec.check(t)?;
        Ok(spec)
    }

    pub fn check(&self, t: &SparseTensor) -> Result<(), TensorError> {
        let mut seen = HashSet::new();
        for l in self.rows.iter().chain(&self.cols) {
            if t.axis_position(l).is_none() {
                return Err(TensorError::Flattening(format!("unknown axis `{l}`")));
            }
            if !seen.insert(l) {
                return Err(TensorError::Flattening(format!("axis `{l}` listed twice")));
            }
        }
        if seen.len() != t.order() {
            return Err(TensorError::Flattening(format!(
                "{} of {} axes covered",
                seen.len(),
                t.order()
            )));
        }
        Ok(())
    }

    /// The same bipartition with rows and columns exchanged.
    pub fn transposed(&self) -> Self {
        FlatteningSpec {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }
}

/// Sparse matrix in coordinate form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub nrows: u64,
    pub ncols: u64,
    pub entries: Vec<(u64, u64, Scalar)>,
}

impl SparseMatrix {
    pub fn new(nrows: u64, ncols: u64, entries: Vec<(u64, u64, Scalar)>) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            entries,
        }
    }

    pub fn from_dense(rows: &[Vec<Scalar>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len()) as u64;
        let entries = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .filter(|(_, x)| !num_traits::Zero::is_zero(*x))
                    .map(move |(j, x)| (i as u64, j as u64, x.clone()))
            })
            .collect();
        SparseMatrix {
            nrows: rows.len() as u64,
            ncols,
            entries,
        }
    }

    pub fn transpose(&self) -> Self {
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            entries: self
                .entries
                .iter()
                .map(|(i, j, x)| (*j, *i, x.clone()))
                .collect(),
        }
    }

    pub fn dim_bound(&self) -> u64 {
        self.nrows.min(self.ncols)
    }
}

fn strides(t: &SparseTensor, labels: &[Label]) -> Result<(Vec<usize>, Vec<u64>, u64), TensorError> {
    let mut pos = Vec::with_capacity(labels.len());
    let mut strides = Vec::with_capacity(labels.len());
    let mut size: u64 = 1;
    for l in labels {
        let p = t
            .axis_position(l)
            .ok_or_else(|| TensorError::Flattening(format!("unknown axis `{l}`")))?;
        pos.push(p);
        strides.push(size);
        size = size
            .checked_mul(t.axes()[p].dim as u64)
            .ok_or(TensorError::TooLarge {
                what: "flattening side dimension",
                got: u128::MAX,
                limit: u64::MAX as u128,
            })?;
    }
    Ok((pos, strides, size))
}

/// Matrix whose rows are indexed by the row axes and columns by the column
/// axes, both in colexicographic order (first listed axis fastest).
pub fn flatten(t: &SparseTensor, spec: &FlatteningSpec) -> Result<SparseMatrix, TensorError> {
    spec.check(t)?;
    let (rpos, rstr, nrows) = strides(t, &spec.rows)?;
    let (cpos, cstr, ncols) = strides(t, &spec.cols)?;
    let mut entries: Vec<(u64, u64, Scalar)> = t
        .entries()
        .map(|(k, v)| {
            let r = rpos.iter().zip(&rstr).map(|(&p, s)| k[p] as u64 * s).sum();
            let c = cpos.iter().zip(&cstr).map(|(&p, s)| k[p] as u64 * s).sum();
            (r, c, v.clone())
        })
        .collect();
    entries.sort_by_key(|a| (a.0, a.1));
    Ok(SparseMatrix {
        nrows,
        ncols,
        entries,
    })
}
