//! Seeded inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cechdol::{Scalar, SparseMatrix};

/// Reproducible sparse matrix with small Gaussian-integer entries.
pub fn seeded_matrix(seed: u64, rows: usize, cols: usize, fill_per_mille: u32) -> SparseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = SparseMatrix::new(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            if rng.gen_ratio(fill_per_mille, 1000) {
                m.set(
                    r,
                    c,
                    Scalar::from_parts(rng.gen_range(-4..=4), rng.gen_range(-4..=4)),
                );
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_matrices_are_reproducible() {
        assert_eq!(seeded_matrix(5, 30, 30, 250), seeded_matrix(5, 30, 30, 250));
        assert!(seeded_matrix(5, 30, 30, 250).nnz() > 0);
    }
}
