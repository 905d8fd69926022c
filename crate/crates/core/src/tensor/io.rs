//! Plain-text tensor files.
//!
//! ```text
//! axes: e0:2 e1:2 up:4:dual
//! 0 1 3 : 1/1
//! 1 0 2 : -7/3
//! ```
//!
//! Indices are zero-based; entries are written in lexicographic index order.

use std::fmt::Write;

use num_bigint::BigInt;

use super::sparse::{Axis, SparseTensor};
use super::{Scalar, TensorError};

pub fn write_tensor(t: &SparseTensor) -> String {
    let mut out = String::from("axes:");
    for a in t.axes() {
        write!(out, " {}:{}", a.label, a.dim).unwrap();
        if a.dual {
            out.push_str(":dual");
        }
    }
    out.push('\n');
    for (idx, v) in t.sorted_entries() {
        let idx: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
        writeln!(out, "{} : {}/{}", idx.join(" "), v.numer(), v.denom()).unwrap();
    }
    out
}

pub fn parse_tensor(text: &str) -> Result<SparseTensor, TensorError> {
    let err = |line: usize, msg: String| TensorError::Parse { line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hn, header) = lines
        .next()
        .ok_or_else(|| err(1, "missing `axes:` header".into()))?;
    let spec = header
        .strip_prefix("axes:")
        .ok_or_else(|| err(hn, "header must start with `axes:`".into()))?;
    let mut axes = Vec::new();
    for tok in spec.split_whitespace() {
        let parts: Vec<&str> = tok.split(':').collect();
        let (label, dim, dual) = match parts.as_slice() {
            [l, d] => (*l, *d, false),
            [l, d, "dual"] => (*l, *d, true),
            _ => return Err(err(hn, format!("bad axis `{tok}`"))),
        };
        let dim = dim
            .parse()
            .map_err(|_| err(hn, format!("bad dimension in `{tok}`")))?;
        axes.push(Axis {
            label: label.parse()?,
            dim,
            dual,
        });
    }
    let mut t = SparseTensor::new(axes)?;
    for (n, line) in lines {
        let (idx, val) = line
            .split_once(':')
            .ok_or_else(|| err(n, "expected `indices : num/den`".into()))?;
        let idx: Vec<u32> = idx
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| err(n, format!("bad index `{s}`"))))
            .collect::<Result<_, _>>()?;
        let val = val.trim();
        let (num, den) = val.split_once('/').unwrap_or((val, "1"));
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| err(n, format!("bad numerator `{num}`")))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| err(n, format!("bad denominator `{den}`")))?;
        if den == BigInt::from(0) {
            return Err(err(n, "zero denominator".into()));
        }
        t.add_entry(idx, Scalar::new(num, den))
            .map_err(|e| err(n, e.to_string()))?;
    }
    Ok(t)
}
