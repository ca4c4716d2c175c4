//! Sparse exact matrices over Q(i) and the rank computations everything
//! else is built on.
//!
//! Elimination is plain Gauss-Jordan with a fixed pivot policy: sweep the
//! pivot columns in a deterministic order and take the smallest remaining
//! row with a nonzero entry. The same policy runs on a dense working array
//! for small matrices and on sparse rows for large ones, so the chosen
//! representation never changes a result, only its speed. Outputs (reduced
//! forms, kernel and image bases, particular solutions) are therefore
//! reproducible byte for byte.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Matrices at or above this entry count are eliminated on sparse rows.
const DENSE_LIMIT: usize = 64 * 64;

#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

/// Sweep direction for the pivot columns. `Forward` is the canonical
/// order used by every public basis computation; `Reverse` exists so that
/// solvers can be run with an independent pivot choice when a result must
/// be shown not to depend on the particular solution picked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotOrder {
    Forward,
    Reverse,
}

/// Result of a full Gauss-Jordan pass: the reduced matrix plus the pivot
/// positions `(row, col)` in the order they were found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    pub reduced: SparseMatrix,
    pub pivots: Vec<(usize, usize)>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SparseMatrix::new(n, n);
        for k in 0..n {
            m.entries.insert((k, k), Scalar::one());
        }
        m
    }

    pub fn from_triples(
        rows: usize,
        cols: usize,
        triples: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self> {
        let mut m = SparseMatrix::new(rows, cols);
        for (r, c, v) in triples {
            if r >= rows || c >= cols {
                return Err(Error::IndexOutOfBounds {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            if v.is_zero() {
                continue;
            }
            if m.entries.insert((r, c), v).is_some() {
                return Err(Error::DuplicateEntry { row: r, col: c });
            }
        }
        Ok(m)
    }

    /// Dense rows, mostly for tests and tiny fixtures.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        let mut m = SparseMatrix::new(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                if !v.is_zero() {
                    m.entries.insert((i, j), v);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Scalar {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn set(&mut self, row: usize, col: usize, value: Scalar) {
        assert!(row < self.rows && col < self.cols, "entry out of bounds");
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = SparseMatrix::new(self.cols, self.rows);
        for (&(r, c), v) in &self.entries {
            t.entries.insert((c, r), v.clone());
        }
        t
    }

    pub fn neg(&self) -> SparseMatrix {
        let mut m = self.clone();
        for v in m.entries.values_mut() {
            *v = -&*v;
        }
        m
    }

    pub fn scale(&self, by: &Scalar) -> SparseMatrix {
        if by.is_zero() {
            return SparseMatrix::new(self.rows, self.cols);
        }
        let mut m = self.clone();
        for v in m.entries.values_mut() {
            *v = &*v * by;
        }
        m
    }

    pub fn add(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::shape(format!(
                "add {}x{} with {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = self.clone();
        for (&(r, c), v) in &rhs.entries {
            let sum = out.get(r, c) + v;
            out.set(r, c, sum);
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::shape(format!(
                "multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = SparseMatrix::new(self.rows, rhs.cols);
        for (&(i, k), a) in &self.entries {
            for (&(_, j), b) in rhs.entries.range((k, 0)..(k + 1, 0)) {
                let acc = out.get(i, j) + a * b;
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        if x.len() != self.cols {
            return Err(Error::shape(format!(
                "apply {}x{} to a vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut y = vec![Scalar::zero(); self.rows];
        for (&(r, c), v) in &self.entries {
            if !x[c].is_zero() {
                y[r] += &(v * &x[c]);
            }
        }
        Ok(y)
    }

    /// Copy `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn insert_block(&mut self, r0: usize, c0: usize, block: &SparseMatrix) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "block out of bounds"
        );
        for (&(r, c), v) in &block.entries {
            self.entries.insert((r0 + r, c0 + c), v.clone());
        }
    }

    pub fn hstack(parts: &[&SparseMatrix]) -> Result<SparseMatrix> {
        let rows = parts.first().map(|m| m.rows).unwrap_or(0);
        if parts.iter().any(|m| m.rows != rows) {
            return Err(Error::shape("hstack with differing row counts"));
        }
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = SparseMatrix::new(rows, cols);
        let mut offset = 0;
        for m in parts {
            out.insert_block(0, offset, m);
            offset += m.cols;
        }
        Ok(out)
    }

    pub fn vstack(parts: &[&SparseMatrix]) -> Result<SparseMatrix> {
        let cols = parts.first().map(|m| m.cols).unwrap_or(0);
        if parts.iter().any(|m| m.cols != cols) {
            return Err(Error::shape("vstack with differing column counts"));
        }
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = SparseMatrix::new(rows, cols);
        let mut offset = 0;
        for m in parts {
            out.insert_block(offset, 0, m);
            offset += m.rows;
        }
        Ok(out)
    }

    pub fn column(&self, col: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.rows];
        for (&(r, c), value) in &self.entries {
            if c == col {
                v[r] = value.clone();
            }
        }
        v
    }

    /// Columns as a basis-vector list.
    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn rref(&self) -> Echelon {
        self.rref_with(PivotOrder::Forward)
    }

    pub fn rref_with(&self, order: PivotOrder) -> Echelon {
        let sweep = pivot_sweep(self.cols, order);
        if self.rows * self.cols < DENSE_LIMIT {
            self.rref_dense_impl(&sweep)
        } else {
            self.rref_sparse_impl(&sweep)
        }
    }

    #[doc(hidden)]
    pub fn rref_dense_impl(&self, sweep: &[usize]) -> Echelon {
        let mut data: Vec<Vec<Scalar>> = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c)).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut cur = 0usize;
        for &col in sweep {
            if cur >= self.rows {
                break;
            }
            let Some(pivot_row) = (cur..self.rows).find(|&r| !data[r][col].is_zero()) else {
                continue;
            };
            data.swap(cur, pivot_row);
            let inv = data[cur][col].inv().expect("pivot is nonzero");
            for v in data[cur].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
            for r in 0..self.rows {
                if r == cur || data[r][col].is_zero() {
                    continue;
                }
                let factor = data[r][col].clone();
                for c in 0..self.cols {
                    if !data[cur][c].is_zero() {
                        let delta = &data[cur][c] * &factor;
                        data[r][c] -= &delta;
                    }
                }
            }
            pivots.push((cur, col));
            cur += 1;
        }
        let reduced = SparseMatrix::from_rows(data);
        Echelon { reduced, pivots }
    }

    #[doc(hidden)]
    pub fn rref_sparse_impl(&self, sweep: &[usize]) -> Echelon {
        let mut data: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            data[r].insert(c, v.clone());
        }
        let mut pivots = Vec::new();
        let mut cur = 0usize;
        for &col in sweep {
            if cur >= self.rows {
                break;
            }
            let Some(pivot_row) = (cur..self.rows).find(|&r| data[r].contains_key(&col)) else {
                continue;
            };
            data.swap(cur, pivot_row);
            let inv = data[cur][&col].inv().expect("pivot is nonzero");
            for v in data[cur].values_mut() {
                *v = &*v * &inv;
            }
            let pivot_entries: Vec<(usize, Scalar)> =
                data[cur].iter().map(|(&c, v)| (c, v.clone())).collect();
            for r in 0..self.rows {
                if r == cur {
                    continue;
                }
                let Some(factor) = data[r].get(&col).cloned() else {
                    continue;
                };
                for (c, v) in &pivot_entries {
                    let delta = v * &factor;
                    let next = match data[r].remove(c) {
                        Some(old) => old - delta,
                        None => -delta,
                    };
                    if !next.is_zero() {
                        data[r].insert(*c, next);
                    }
                }
            }
            pivots.push((cur, col));
            cur += 1;
        }
        let mut reduced = SparseMatrix::new(self.rows, self.cols);
        for (r, row) in data.into_iter().enumerate() {
            for (c, v) in row {
                reduced.entries.insert((r, c), v);
            }
        }
        Echelon { reduced, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the kernel, read off the reduced form with free variables in
    /// increasing column order. Deterministic: each basis vector has a 1 in
    /// its own free column.
    pub fn kernel_basis(&self) -> Subspace {
        let Echelon { reduced, pivots } = self.rref();
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for &(row, col) in &pivots {
                let coeff = reduced.get(row, free);
                if !coeff.is_zero() {
                    v[col] = -coeff;
                }
            }
            basis.push(v);
        }
        Subspace {
            ambient_dim: self.cols,
            basis,
        }
    }

    /// Basis of the column space: the original columns at the pivot
    /// positions of the reduced form.
    pub fn image_basis(&self) -> Subspace {
        let pivots = self.rref().pivots;
        let basis = pivots.iter().map(|&(_, c)| self.column(c)).collect();
        Subspace {
            ambient_dim: self.rows,
            basis,
        }
    }

    /// A particular solution of `self * x = b`, or `None` when none exists.
    /// Free variables are set to zero, so the answer is deterministic.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        self.solve_with(b, PivotOrder::Forward)
    }

    /// Like [`solve`](Self::solve) but with the chosen pivot sweep; the two
    /// orders generally pick different particular solutions of an
    /// underdetermined system.
    pub fn solve_with(&self, b: &[Scalar], order: PivotOrder) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows, "right-hand side has the wrong length");
        let mut augmented = SparseMatrix::new(self.rows, self.cols + 1);
        augmented.insert_block(0, 0, self);
        for (r, v) in b.iter().enumerate() {
            if !v.is_zero() {
                augmented.entries.insert((r, self.cols), v.clone());
            }
        }
        // The right-hand column is reduced but never pivoted.
        let sweep = pivot_sweep(self.cols, order);
        let echelon = if augmented.rows * augmented.cols < DENSE_LIMIT {
            augmented.rref_dense_impl(&sweep)
        } else {
            augmented.rref_sparse_impl(&sweep)
        };
        let rank = echelon.pivots.len();
        for r in rank..self.rows {
            if !echelon.reduced.get(r, self.cols).is_zero() {
                return None;
            }
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for &(row, col) in &echelon.pivots {
            x[col] = echelon.reduced.get(row, self.cols);
        }
        Some(x)
    }
}

fn pivot_sweep(cols: usize, order: PivotOrder) -> Vec<usize> {
    match order {
        PivotOrder::Forward => (0..cols).collect(),
        PivotOrder::Reverse => (0..cols).rev().collect(),
    }
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// A subspace of a fixed coordinate space, stored as an explicit basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub ambient_dim: usize,
    pub basis: Vec<Vec<Scalar>>,
}

impl Subspace {
    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: SparseMatrix::identity(ambient_dim).columns(),
        }
    }

    pub fn trivial(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis vectors as matrix columns.
    pub fn matrix(&self) -> SparseMatrix {
        let mut m = SparseMatrix::new(self.ambient_dim, self.basis.len());
        for (j, v) in self.basis.iter().enumerate() {
            assert_eq!(v.len(), self.ambient_dim, "basis vector of wrong length");
            for (i, value) in v.iter().enumerate() {
                if !value.is_zero() {
                    m.set(i, j, value.clone());
                }
            }
        }
        m
    }

    pub fn is_independent(&self) -> bool {
        self.matrix().rank() == self.basis.len()
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ambient_dim);
        self.matrix().solve(v).is_some()
    }
}

/// Dimension of `total / sub`. Both bases are verified independent and the
/// containment `sub` inside `total` is verified by rank before subtracting.
pub fn quotient_dim(sub: &Subspace, total: &Subspace) -> Result<usize> {
    if sub.ambient_dim != total.ambient_dim {
        return Err(Error::shape(format!(
            "quotient of ambient dimension {} inside {}",
            sub.ambient_dim, total.ambient_dim
        )));
    }
    if !total.is_independent() {
        return Err(Error::DependentBasis {
            what: "total space".into(),
        });
    }
    if !sub.is_independent() {
        return Err(Error::DependentBasis {
            what: "subspace".into(),
        });
    }
    let total_m = total.matrix();
    let sub_m = sub.matrix();
    let joint = SparseMatrix::hstack(&[&total_m, &sub_m])?;
    if joint.rank() != total.dim() {
        return Err(Error::QuotientNotContained);
    }
    Ok(total.dim() - sub.dim())
}

pub fn vec_is_zero(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn vec_add(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(s: &Scalar, v: &[Scalar]) -> Vec<Scalar> {
    v.iter().map(|x| s * x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<i64>>) -> SparseMatrix {
        SparseMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(Scalar::from_int).collect())
                .collect(),
        )
    }

    fn gaussian(rows: Vec<Vec<(i64, i64)>>) -> SparseMatrix {
        SparseMatrix::from_rows(
            rows.into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|(a, b)| Scalar::from_parts(a, b))
                        .collect()
                })
                .collect(),
        )
    }

    #[test]
    fn rank_of_identity_and_degenerate_shapes() {
        assert_eq!(SparseMatrix::identity(2).rank(), 2);
        assert_eq!(SparseMatrix::new(0, 0).rank(), 0);
        assert_eq!(SparseMatrix::new(3, 0).rank(), 0);
        assert_eq!(SparseMatrix::new(0, 3).rank(), 0);
    }

    #[test]
    fn rank_sees_complex_dependence() {
        // second row is i times the first
        let a = gaussian(vec![vec![(1, 0), (0, 1)], vec![(0, 1), (-1, 0)]]);
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn kernel_of_complex_rank_one_map() {
        let a = gaussian(vec![vec![(1, 0), (0, 1)], vec![(0, 1), (-1, 0)]]);
        let k = a.kernel_basis();
        assert_eq!(k.dim(), 1);
        // spanned by (i, -1) up to scale
        let v = &k.basis[0];
        assert!(vec_is_zero(&a.mul_vec(v).unwrap()));
        let expected = vec![Scalar::i(), Scalar::from_int(-1)];
        let joint = SparseMatrix::from_rows(vec![
            vec![v[0].clone(), expected[0].clone()],
            vec![v[1].clone(), expected[1].clone()],
        ]);
        assert_eq!(
            joint.rank(),
            1,
            "kernel vector is not proportional to (i, -1)"
        );
    }

    #[test]
    fn kernel_extremes() {
        assert_eq!(SparseMatrix::identity(4).kernel_basis().dim(), 0);
        let z = SparseMatrix::new(1, 3);
        let k = z.kernel_basis();
        assert_eq!(k.dim(), 3);
        assert!(k.is_independent());
    }

    #[test]
    fn image_of_column_into_two_dims() {
        let a = gaussian(vec![vec![(1, 0)], vec![(0, 1)]]);
        let im = a.image_basis();
        assert_eq!(im.dim(), 1);
        assert_eq!(im.basis[0], vec![Scalar::one(), Scalar::i()]);
    }

    #[test]
    fn image_extremes() {
        assert_eq!(m(vec![vec![0, 0], vec![0, 0]]).image_basis().dim(), 0);
        let im = SparseMatrix::identity(3).image_basis();
        assert_eq!(im.dim(), 3);
        assert_eq!(im.matrix(), SparseMatrix::identity(3));
    }

    #[test]
    fn solve_scaling_equation() {
        let a = m(vec![vec![2]]);
        let x = a.solve(&[Scalar::one()]).unwrap();
        assert_eq!(x, vec![Scalar::from_ratio(1, 2)]);
    }

    #[test]
    fn solve_reports_inconsistency() {
        let z = SparseMatrix::new(2, 2);
        assert_eq!(z.solve(&[Scalar::one(), Scalar::zero()]), None);
    }

    #[test]
    fn solve_underdetermined_is_deterministic_per_order() {
        let a = m(vec![vec![1, 1]]);
        let b = [Scalar::from_int(2)];
        let fwd = a.solve(&b).unwrap();
        let rev = a.solve_with(&b, PivotOrder::Reverse).unwrap();
        assert_eq!(fwd, vec![Scalar::from_int(2), Scalar::zero()]);
        assert_eq!(rev, vec![Scalar::zero(), Scalar::from_int(2)]);
        assert!(vec_is_zero(&vec_sub(&a.mul_vec(&fwd).unwrap(), &b)));
        assert!(vec_is_zero(&vec_sub(&a.mul_vec(&rev).unwrap(), &b)));
    }

    #[test]
    fn quotient_dimensions() {
        let e = SparseMatrix::identity(3).columns();
        let total = Subspace {
            ambient_dim: 3,
            basis: vec![e[0].clone(), e[1].clone()],
        };
        let sub = Subspace {
            ambient_dim: 3,
            basis: vec![e[0].clone()],
        };
        assert_eq!(quotient_dim(&sub, &total).unwrap(), 1);
        assert_eq!(quotient_dim(&total, &total).unwrap(), 0);

        let outside = Subspace {
            ambient_dim: 3,
            basis: vec![e[2].clone()],
        };
        assert_eq!(
            quotient_dim(&outside, &total),
            Err(Error::QuotientNotContained)
        );
    }

    #[test]
    fn quotient_rejects_dependent_bases() {
        let e = SparseMatrix::identity(2).columns();
        let dependent = Subspace {
            ambient_dim: 2,
            basis: vec![e[0].clone(), e[0].clone()],
        };
        let total = Subspace::full(2);
        assert!(matches!(
            quotient_dim(&dependent, &total),
            Err(Error::DependentBasis { .. })
        ));
    }

    #[test]
    fn dense_and_sparse_elimination_agree() {
        let a = gaussian(vec![
            vec![(1, 0), (0, 1), (2, -1), (0, 0)],
            vec![(0, 1), (-1, 0), (0, 0), (1, 1)],
            vec![(1, 1), (-1, 1), (2, -1), (1, 1)],
        ]);
        for order in [PivotOrder::Forward, PivotOrder::Reverse] {
            let sweep = super::pivot_sweep(a.cols(), order);
            assert_eq!(a.rref_dense_impl(&sweep), a.rref_sparse_impl(&sweep));
        }
    }

    #[test]
    fn duplicate_triples_are_rejected() {
        let r =
            SparseMatrix::from_triples(2, 2, vec![(0, 0, Scalar::one()), (0, 0, Scalar::one())]);
        assert_eq!(r, Err(Error::DuplicateEntry { row: 0, col: 0 }));
        let r = SparseMatrix::from_triples(1, 1, vec![(0, 1, Scalar::one())]);
        assert!(matches!(r, Err(Error::IndexOutOfBounds { .. })));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_scalar() -> impl Strategy<Value = Scalar> {
            // biased towards zero so matrices stay sparse
            prop_oneof![
                3 => Just(Scalar::zero()),
                2 => (-4i64..5).prop_map(Scalar::from_int),
                1 => (-4i64..5, -4i64..5).prop_map(|(a, b)| Scalar::from_parts(a, b)),
                1 => (-4i64..5, 1i64..4).prop_map(|(n, d)| Scalar::from_ratio(n, d)),
            ]
        }

        fn arb_matrix(max: usize) -> impl Strategy<Value = SparseMatrix> {
            (0..=max, 0..=max).prop_flat_map(|(r, c)| {
                proptest::collection::vec(proptest::collection::vec(arb_scalar(), c), r)
                    .prop_map(SparseMatrix::from_rows)
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn rank_plus_nullity_is_column_count(a in arb_matrix(6)) {
                prop_assert_eq!(a.rank() + a.kernel_basis().dim(), a.cols());
            }

            #[test]
            fn kernel_vectors_are_annihilated(a in arb_matrix(6)) {
                for v in &a.kernel_basis().basis {
                    prop_assert!(vec_is_zero(&a.mul_vec(v).unwrap()));
                }
            }

            #[test]
            fn image_basis_is_independent_and_spanned(a in arb_matrix(6)) {
                let im = a.image_basis();
                prop_assert!(im.is_independent());
                prop_assert_eq!(im.dim(), a.rank());
                for v in &im.basis {
                    // every image basis vector is hit by the matrix
                    prop_assert!(a.solve(v).is_some());
                }
            }

            #[test]
            fn solve_succeeds_exactly_when_ranks_match(a in arb_matrix(5), xs in proptest::collection::vec(-3i64..4, 0..5)) {
                // build a right-hand side either in the image or arbitrary
                let mut x = vec![Scalar::zero(); a.cols()];
                for (i, v) in xs.iter().enumerate() {
                    if i < x.len() {
                        x[i] = Scalar::from_int(*v);
                    }
                }
                let b = a.mul_vec(&x).unwrap();
                let solved = a.solve(&b).expect("consistent system must solve");
                prop_assert_eq!(a.mul_vec(&solved).unwrap(), b);
            }

            #[test]
            fn representation_choice_never_changes_the_reduction(a in arb_matrix(7)) {
                for order in [PivotOrder::Forward, PivotOrder::Reverse] {
                    let sweep = super::super::pivot_sweep(a.cols(), order);
                    prop_assert_eq!(a.rref_dense_impl(&sweep), a.rref_sparse_impl(&sweep));
                }
            }

            #[test]
            fn transpose_preserves_rank(a in arb_matrix(6)) {
                prop_assert_eq!(a.rank(), a.transpose().rank());
            }
        }
    }
}
