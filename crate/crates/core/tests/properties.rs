//! Property tests for the arithmetic and linear-algebra foundations:
//! field laws and text round-trips for scalars, rank/kernel laws and
//! pivot-order independence for sparse matrices.

use std::str::FromStr;

use proptest::prelude::*;

use cechdol::{PivotOrder, Scalar, SparseMatrix};

fn scalars() -> impl Strategy<Value = Scalar> {
    (-20i64..=20, 1i64..=9, -20i64..=20, 1i64..=9).prop_map(|(a, b, c, d)| {
        let i = Scalar::from_parts(0, 1);
        &Scalar::from_ratio(a, b) + &(&Scalar::from_ratio(c, d) * &i)
    })
}

fn matrices(max_side: usize) -> impl Strategy<Value = SparseMatrix> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(rows, cols)| {
        let entry = (0..rows, 0..cols, -3i64..=3, -3i64..=3);
        (
            Just(rows),
            Just(cols),
            proptest::collection::vec(entry, 0..=rows * cols),
        )
            .prop_map(|(rows, cols, entries)| {
                let mut m = SparseMatrix::new(rows, cols);
                for (r, c, re, im) in entries {
                    m.set(r, c, Scalar::from_parts(re, im));
                }
                m
            })
    })
}

/// A matrix paired with a vector from its column space.
fn matrices_with_solvable_rhs() -> impl Strategy<Value = (SparseMatrix, Vec<Scalar>)> {
    matrices(6).prop_flat_map(|m| {
        let cols = m.cols();
        (
            Just(m),
            proptest::collection::vec((-3i64..=3, -3i64..=3), cols),
        )
            .prop_map(|(m, x)| {
                let x: Vec<Scalar> = x
                    .into_iter()
                    .map(|(re, im)| Scalar::from_parts(re, im))
                    .collect();
                let b = m.mul_vec(&x).unwrap();
                (m, b)
            })
    })
}

proptest! {
    #[test]
    fn addition_commutes(a in scalars(), b in scalars()) {
        prop_assert_eq!(&a + &b, &b + &a);
    }

    #[test]
    fn multiplication_commutes_and_associates(a in scalars(), b in scalars(), c in scalars()) {
        prop_assert_eq!(&a * &b, &b * &a);
        let left = &(&a * &b) * &c;
        let right = &a * &(&b * &c);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn multiplication_distributes(a in scalars(), b in scalars(), c in scalars()) {
        let sum = &b + &c;
        let left = &a * &sum;
        let right = &(&a * &b) + &(&a * &c);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn nonzero_scalars_have_two_sided_inverses(a in scalars()) {
        match a.inv() {
            Some(inv) => {
                prop_assert_eq!(&a * &inv, Scalar::one());
                prop_assert_eq!(&inv * &a, Scalar::one());
            }
            None => prop_assert!(a.is_zero()),
        }
    }

    #[test]
    fn printing_then_parsing_is_the_identity(a in scalars()) {
        let text = a.to_string();
        let back = Scalar::from_str(&text).unwrap();
        prop_assert_eq!(back, a, "through {}", text);
    }

    #[test]
    fn rank_is_bounded_and_transpose_invariant(m in matrices(7)) {
        let rank = m.rank();
        prop_assert!(rank <= m.rows().min(m.cols()));
        prop_assert_eq!(rank, m.transpose().rank());
    }

    #[test]
    fn rank_plus_kernel_dimension_is_the_column_count(m in matrices(7)) {
        prop_assert_eq!(m.rank() + m.kernel_basis().dim(), m.cols());
        prop_assert_eq!(m.image_basis().dim(), m.rank());
    }

    #[test]
    fn kernel_basis_vectors_are_annihilated(m in matrices(7)) {
        for v in &m.kernel_basis().basis {
            let image = m.mul_vec(v).unwrap();
            prop_assert!(image.iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn product_rank_never_exceeds_either_factor(a in matrices(5), b in matrices(5)) {
        // reshape b so the product is defined
        let mut rhs = SparseMatrix::new(a.cols(), b.cols());
        for (r, c, v) in b.entries() {
            if r < a.cols() {
                rhs.set(r, c, v.clone());
            }
        }
        let product = a.mul(&rhs).unwrap();
        prop_assert!(product.rank() <= a.rank().min(rhs.rank()));
    }

    #[test]
    fn pivot_order_changes_nothing_observable(m in matrices(7)) {
        let forward = m.rref_with(PivotOrder::Forward);
        let reverse = m.rref_with(PivotOrder::Reverse);
        prop_assert_eq!(forward.pivots.len(), reverse.pivots.len());
    }

    #[test]
    fn both_pivot_orders_solve_solvable_systems((m, b) in matrices_with_solvable_rhs()) {
        for order in [PivotOrder::Forward, PivotOrder::Reverse] {
            let x = m.solve_with(&b, order).unwrap();
            prop_assert_eq!(m.mul_vec(&x).unwrap(), b.clone());
        }
    }
}
