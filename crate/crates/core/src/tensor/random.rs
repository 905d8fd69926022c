use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sparse::{Axis, SparseTensor};
use super::{int, TensorError};

/// Largest tensor (in total cells) that random sampling will enumerate.
const MAX_RANDOM_CELLS: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RandomMode {
    /// Every cell uniform in `[-9, 9]`.
    DenseSmallInt,
    /// Each cell nonzero with the given probability, value uniform in
    /// `[-9, 9] \ {0}`.
    Sparse { density: f64 },
}

/// Deterministic random tensor; the same `(axes, seed, mode)` always gives
/// the same tensor.
pub fn random_tensor(
    axes: Vec<Axis>,
    seed: u64,
    mode: RandomMode,
) -> Result<SparseTensor, TensorError> {
    let mut t = SparseTensor::new(axes)?;
    let cells = t.total_size().unwrap_or(u128::MAX);
    if cells > MAX_RANDOM_CELLS {
        return Err(TensorError::TooLarge {
            what: "random tensor cells",
            got: cells,
            limit: MAX_RANDOM_CELLS,
        });
    }
    let dims: Vec<usize> = t.axes().iter().map(|a| a.dim).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = vec![0u32; dims.len()];
    for _ in 0..cells {
        let value = match mode {
            RandomMode::DenseSmallInt => rng.gen_range(-9..=9),
            RandomMode::Sparse { density } => {
                if rng.gen_bool(density.clamp(0.0, 1.0)) {
                    let v = rng.gen_range(1..=18);
                    if v > 9 {
                        9 - v
                    } else {
                        v
                    }
                } else {
                    0
                }
            }
        };
        t.add_entry(idx.clone(), int(value))?;
        // colexicographic increment
        for (i, d) in idx.iter_mut().zip(&dims) {
            *i += 1;
            if (*i as usize) < *d {
                break;
            }
            *i = 0;
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape() -> Vec<Axis> {
        (0..5)
            .map(|i| Axis::new(format!("a{i}").as_str(), 2))
            .collect()
    }

    #[test]
    fn deterministic() {
        let a = random_tensor(shape(), 42, RandomMode::DenseSmallInt).unwrap();
        let b = random_tensor(shape(), 42, RandomMode::DenseSmallInt).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dense_fills_nonzero_cells() {
        let t = random_tensor(shape(), 3, RandomMode::DenseSmallInt).unwrap();
        // every one of the 32 cells is drawn; only zero draws are dropped
        assert!(t.nnz() <= 32);
        assert!(t.nnz() >= 24);
        for (_, v) in t.entries() {
            assert!(*v >= int(-9) && *v <= int(9));
        }
    }

    #[test]
    fn seeds_differ() {
        for s in 0..20u64 {
            let a = random_tensor(shape(), 2 * s, RandomMode::DenseSmallInt).unwrap();
            let b = random_tensor(shape(), 2 * s + 1, RandomMode::DenseSmallInt).unwrap();
            assert_ne!(a, b, "seed pair {s}");
        }
    }

    #[test]
    fn sparse_density() {
        let axes: Vec<Axis> = (0..10)
            .map(|i| Axis::new(format!("b{i}").as_str(), 2))
            .collect();
        let t = random_tensor(axes, 7, RandomMode::Sparse { density: 0.1 }).unwrap();
        assert!(t.nnz() > 50 && t.nnz() < 160, "{}", t.nnz());
        assert!(t.entries().all(|(_, v)| *v != int(0)));
    }

    #[test]
    fn size_guard() {
        let axes: Vec<Axis> = (0..30)
            .map(|i| Axis::new(format!("c{i}").as_str(), 2))
            .collect();
        assert!(random_tensor(axes, 0, RandomMode::DenseSmallInt).is_err());
    }
}
