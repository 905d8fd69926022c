use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::SparseMatrix;
use super::{Scalar, TensorError};

/// 2^31 - 1.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

/// Field used for rank computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
#[derive(Default)]
pub enum ScalarMode {
    #[default]
    Rational,
    Prime {
        p: u64,
    },
}

impl ScalarMode {
    pub fn prime() -> Self {
        ScalarMode::Prime { p: DEFAULT_PRIME }
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for b in BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Groups the entries into lines along the longer side, so the number of
/// pivots is bounded by the shorter one, and compresses the other coordinate
/// to `0..width`.
fn lines_of(m: &SparseMatrix) -> (Vec<Vec<(u32, &Scalar)>>, usize) {
    let rows: BTreeSet<u64> = m.entries.iter().map(|e| e.0).collect();
    let cols: BTreeSet<u64> = m.entries.iter().map(|e| e.1).collect();
    let by_rows = rows.len() >= cols.len();
    let other: BTreeMap<u64, u32> = if by_rows { &cols } else { &rows }
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i as u32))
        .collect();
    let mut lines: BTreeMap<u64, Vec<(u32, &Scalar)>> = BTreeMap::new();
    for (r, c, x) in &m.entries {
        if x.is_zero() {
            continue;
        }
        let (line, pos) = if by_rows { (*r, *c) } else { (*c, *r) };
        lines.entry(line).or_default().push((other[&pos], x));
    }
    let mut out: Vec<Vec<(u32, &Scalar)>> = lines.into_values().collect();
    for l in &mut out {
        l.sort_by_key(|e| e.0);
    }
    (out, other.len())
}

/// Exact rank over the rationals.
///
/// A rank mod p never exceeds the rational rank, so when the prime-field
/// rank already reaches `min(rows, cols)` it is returned directly; otherwise
/// the matrix goes through [`rank_by_elimination`].
pub fn rank(m: &SparseMatrix) -> usize {
    if let Ok(r) = rank_mod_p(m, DEFAULT_PRIME) {
        if r as u64 == m.nrows.min(m.ncols) {
            return r;
        }
    }
    rank_by_elimination(m)
}

/// Exact rational rank with no modular shortcut.
///
/// Each line is scaled to integers and reduced by integer-preserving
/// elimination, dividing out the content after every step so that entries
/// stay small.
pub fn rank_by_elimination(m: &SparseMatrix) -> usize {
    let (lines, width) = lines_of(m);
    let mut pivots: Vec<Option<Vec<(u32, BigInt)>>> = vec![None; width];
    let mut rank = 0;
    for line in lines {
        if rank == width {
            break;
        }
        let mut v = integerize(&line);
        while let Some((c, a)) = v.first().map(|(c, a)| (*c as usize, a.clone())) {
            match &pivots[c] {
                None => {
                    pivots[c] = Some(v);
                    rank += 1;
                    break;
                }
                Some(p) => {
                    let b = &p[0].1;
                    let g = a.gcd(b);
                    v = scaled_difference(&(b / &g), &v, &(&a / &g), p);
                    remove_content(&mut v);
                }
            }
        }
    }
    rank
}

fn integerize(line: &[(u32, &Scalar)]) -> Vec<(u32, BigInt)> {
    let lcm = line
        .iter()
        .fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
    let mut v: Vec<(u32, BigInt)> = line
        .iter()
        .map(|(c, x)| (*c, x.numer() * (&lcm / x.denom())))
        .collect();
    remove_content(&mut v);
    v
}

fn remove_content(v: &mut [(u32, BigInt)]) {
    let mut g = BigInt::zero();
    for (_, x) in v.iter() {
        g = g.gcd(x);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() {
        return;
    }
    for (_, x) in v.iter_mut() {
        *x /= &g;
    }
}

/// `fx * x - fy * y` for sorted sparse vectors, zeros dropped.
fn scaled_difference(
    fx: &BigInt,
    x: &[(u32, BigInt)],
    fy: &BigInt,
    y: &[(u32, BigInt)],
) -> Vec<(u32, BigInt)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let cx = x.get(i).map(|e| e.0);
        let cy = y.get(j).map(|e| e.0);
        let (c, val) = match (cx, cy) {
            (Some(a), Some(b)) if a == b => {
                i += 1;
                j += 1;
                (a, fx * &x[i - 1].1 - fy * &y[j - 1].1)
            }
            (Some(a), Some(b)) if a < b => {
                i += 1;
                (a, fx * &x[i - 1].1)
            }
            (Some(a), None) => {
                i += 1;
                (a, fx * &x[i - 1].1)
            }
            (_, Some(b)) => {
                j += 1;
                (b, -(fy * &y[j - 1].1))
            }
            (None, None) => unreachable!(),
        };
        if !val.is_zero() {
            out.push((c, val));
        }
    }
    out
}

fn reduce_mod(x: &Scalar, p: u64) -> Result<u64, TensorError> {
    let pb = BigInt::from(p);
    let num = x.numer().mod_floor(&pb).to_u64().expect("residue fits");
    let den = x.denom().mod_floor(&pb).to_u64().expect("residue fits");
    if den == 0 {
        return Err(TensorError::PrimeDenominator(p));
    }
    Ok(mul_mod(num, pow_mod(den, p - 2, p), p))
}

/// Rank over the prime field `F_p`, `p > 2^30`. Never exceeds the rational
/// rank; equality holds unless `p` divides some maximal nonzero minor.
pub fn rank_mod_p(m: &SparseMatrix, p: u64) -> Result<usize, TensorError> {
    if p <= 1 << 30 || !is_prime(p) {
        return Err(TensorError::BadPrime(p));
    }
    let (lines, width) = lines_of(m);
    let mut pivots: Vec<Option<Vec<(u32, u64)>>> = vec![None; width];
    let mut rank = 0;
    for line in lines {
        if rank == width {
            break;
        }
        let mut v: Vec<(u32, u64)> = Vec::with_capacity(line.len());
        for (c, x) in line {
            let r = reduce_mod(x, p)?;
            if r != 0 {
                v.push((c, r));
            }
        }
        while let Some(&(c, a)) = v.first() {
            let c = c as usize;
            match &pivots[c] {
                None => {
                    let inv = pow_mod(a, p - 2, p);
                    for e in v.iter_mut() {
                        e.1 = mul_mod(e.1, inv, p);
                    }
                    pivots[c] = Some(v);
                    rank += 1;
                    break;
                }
                Some(piv) => v = axpy_mod(&v, a, piv, p),
            }
        }
    }
    Ok(rank)
}

/// `x - a * y` over `F_p`.
fn axpy_mod(x: &[(u32, u64)], a: u64, y: &[(u32, u64)], p: u64) -> Vec<(u32, u64)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let cx = x.get(i).map(|e| e.0);
        let cy = y.get(j).map(|e| e.0);
        let neg = |v: u64| (p - mul_mod(a, v, p)) % p;
        let (c, val) = match (cx, cy) {
            (Some(u), Some(w)) if u == w => {
                i += 1;
                j += 1;
                (u, (x[i - 1].1 + neg(y[j - 1].1)) % p)
            }
            (Some(u), Some(w)) if u < w => {
                i += 1;
                (u, x[i - 1].1)
            }
            (Some(u), None) => {
                i += 1;
                (u, x[i - 1].1)
            }
            (_, Some(w)) => {
                j += 1;
                (w, neg(y[j - 1].1))
            }
            (None, None) => unreachable!(),
        };
        if val != 0 {
            out.push((c, val));
        }
    }
    out
}

pub fn rank_with(m: &SparseMatrix, mode: ScalarMode) -> Result<usize, TensorError> {
    match mode {
        ScalarMode::Rational => Ok(rank(m)),
        ScalarMode::Prime { p } => rank_mod_p(m, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::int;

    fn dense(rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::from_dense(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn primes() {
        assert!(is_prime(DEFAULT_PRIME));
        assert!(is_prime(1_000_000_007));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(DEFAULT_PRIME - 2));
        assert!(!is_prime(1));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn identity_and_outer_product() {
        for n in 1..6 {
            let m = SparseMatrix::new(n, n, (0..n).map(|i| (i, i, int(1))).collect());
            assert_eq!(rank(&m), n as usize);
            assert_eq!(rank_mod_p(&m, DEFAULT_PRIME).unwrap(), n as usize);
        }
        let u = [1, -2, 3];
        let v = [4, 0, -1, 7];
        let rows: Vec<Vec<i64>> = u
            .iter()
            .map(|a| v.iter().map(|b| a * b).collect())
            .collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        assert_eq!(rank(&dense(&refs)), 1);
    }

    #[test]
    fn zero_and_empty() {
        assert_eq!(rank(&SparseMatrix::new(5, 7, vec![])), 0);
        assert_eq!(rank(&dense(&[&[0, 0], &[0, 0]])), 0);
    }

    #[test]
    fn rational_entries() {
        let half = Scalar::new(1.into(), 2.into());
        let m = SparseMatrix::new(
            2,
            2,
            vec![
                (0, 0, half.clone()),
                (0, 1, int(1)),
                (1, 0, int(1)),
                (1, 1, int(2)),
            ],
        );
        assert_eq!(rank(&m), 1);
        assert_eq!(rank_mod_p(&m, DEFAULT_PRIME).unwrap(), 1);
    }

    #[test]
    fn prime_rank_can_drop() {
        let p = DEFAULT_PRIME as i64;
        let m = dense(&[&[1, 1], &[1, 1 + p]]);
        assert_eq!(rank(&m), 2);
        assert_eq!(rank_mod_p(&m, DEFAULT_PRIME).unwrap(), 1);
    }

    #[test]
    fn prime_mode_guards() {
        let m = dense(&[&[1]]);
        assert!(matches!(rank_mod_p(&m, 7), Err(TensorError::BadPrime(7))));
        assert!(rank_mod_p(&m, (1 << 31) + 2).is_err());
        let p = DEFAULT_PRIME;
        let m = SparseMatrix::new(1, 1, vec![(0, 0, Scalar::new(1.into(), (p as i64).into()))]);
        assert!(matches!(
            rank_mod_p(&m, p),
            Err(TensorError::PrimeDenominator(_))
        ));
    }

    #[test]
    fn shortcut_matches_elimination() {
        let full =
            SparseMatrix::from_dense(&[vec![int(2), int(1), int(0)], vec![int(1), int(3), int(1)]]);
        let deficient = SparseMatrix::from_dense(&[
            vec![int(1), int(2)],
            vec![int(2), int(4)],
            vec![int(0), int(0)],
        ]);
        for m in [&full, &deficient] {
            assert_eq!(rank(m), rank_by_elimination(m));
        }
        assert_eq!(rank(&full), 2);
        assert_eq!(rank(&deficient), 1);
    }

    #[test]
    fn wide_and_tall_agree() {
        let m = dense(&[&[1, 2, 3, 4, 5], &[2, 4, 6, 8, 10], &[0, 1, 0, 1, 0]]);
        assert_eq!(rank(&m), 2);
        assert_eq!(rank(&m.transpose()), 2);
    }
}
