//! Compressed sparse row storage and the linear solvers used by the
//! time-stepping schemes.

mod direct;
mod dirichlet;
mod iterative;
mod spd;

use std::fmt;

use num_traits::Zero;

use thiserror::Error;

use crate::scalar::{Real, Scalar};

pub use direct::{dense_lu_solve, BandedCholesky, BandedLu};
pub use dirichlet::{apply_dirichlet, DirichletReduction};
pub use iterative::{
    bicgstab_solve, cg_solve, cg_solve_with_guess, complex_solve, relative_residual,
    IterativeOptions,
};
pub use spd::{SpdMethod, SpdSolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMethod {
    Cg,
    BiCgStab,
    BandedCholesky,
    BandedLu,
    DenseLu,
}

impl fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SolverMethod::Cg => "cg",
            SolverMethod::BiCgStab => "bicgstab",
            SolverMethod::BandedCholesky => "banded-cholesky",
            SolverMethod::BandedLu => "banded-lu",
            SolverMethod::DenseLu => "dense-lu",
        };
        f.write_str(s)
    }
}

/// Outcome of a linear solve. `relative_residual` is `‖Ax − b‖ / ‖b‖`
/// recomputed from the returned iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSolveReport {
    pub iterations: usize,
    pub relative_residual: f64,
    pub method: SolverMethod,
}

#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error("{} did not reach the tolerance after {} iterations (residual {:e})", .0.method, .0.iterations, .0.relative_residual)]
    NotConverged(LinearSolveReport),
    #[error("{} broke down after {} iterations (residual {:e})", .0.method, .0.iterations, .0.relative_residual)]
    Breakdown(LinearSolveReport),
    #[error("non-finite entry in matrix or right-hand side")]
    NonFinite,
    #[error("dimension mismatch: matrix is {rows}x{cols}, vector has length {len}")]
    Dimension {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("zero pivot at row {0}")]
    Singular(usize),
    #[error("matrix is not positive definite (row {0})")]
    NotPositiveDefinite(usize),
}

/// Row-wise sorted, duplicate-free nonzero structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityPattern {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl SparsityPattern {
    /// Builds the pattern of a square matrix from per-row column lists.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for mut cols in rows {
            cols.sort_unstable();
            cols.dedup();
            col_idx.extend(cols);
            row_ptr.push(col_idx.len());
        }
        SparsityPattern {
            n,
            row_ptr,
            col_idx,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<S> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<S>,
}

impl<S: Scalar> CsrMatrix<S> {
    pub fn zeros(pattern: &SparsityPattern) -> Self {
        CsrMatrix {
            nrows: pattern.n,
            ncols: pattern.n,
            row_ptr: pattern.row_ptr.clone(),
            col_idx: pattern.col_idx.clone(),
            values: vec![S::zero(); pattern.col_idx.len()],
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![S::one(); n],
        }
    }

    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, S)]) -> Self {
        let mut sorted: Vec<(usize, usize, S)> = triplets.to_vec();
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(sorted.len());
        let mut values: Vec<S> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) out of bounds");
            if last == Some((i, j)) {
                *values.last_mut().expect("previous entry") += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn from_dense(rows: &[Vec<S>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let triplets: Vec<_> = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(move |(j, &v)| (i, j, v))
            })
            .collect();
        Self::from_triplets(nrows, ncols, &triplets)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, S)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .binary_search(&j)
            .ok()
            .map(|k| range.start + k)
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.position(i, j).map_or(S::zero(), |k| self.values[k])
    }

    /// Adds `v` to an entry that must be part of the pattern.
    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: S) {
        let k = self
            .position(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) not in sparsity pattern"));
        self.values[k] += v;
    }

    pub fn mul_vec_into(&self, x: &[S], y: &mut [S]) {
        debug_assert_eq!(x.len(), self.ncols);
        for (i, yi) in y.iter_mut().enumerate().take(self.nrows) {
            let mut acc = S::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        }
    }

    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        let mut y = vec![S::zero(); self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<S> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let triplets: Vec<_> = (0..self.nrows)
            .flat_map(|i| self.row(i).map(move |(j, v)| (j, i, v)))
            .collect();
        Self::from_triplets(self.ncols, self.nrows, &triplets)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(S) -> U) -> CsrMatrix<U> {
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, c: S) -> Self {
        self.map(|v| v * c)
    }

    /// `a·self + b·other`, merging the two patterns.
    pub fn linear_combination(&self, a: S, other: &Self, b: S) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..self.nrows {
            let mut p = self.row(i).peekable();
            let mut q = other.row(i).peekable();
            loop {
                match (p.peek().copied(), q.peek().copied()) {
                    (Some((j1, v1)), Some((j2, v2))) if j1 == j2 => {
                        col_idx.push(j1);
                        values.push(a * v1 + b * v2);
                        p.next();
                        q.next();
                    }
                    (Some((j1, v1)), Some((j2, _))) if j1 < j2 => {
                        col_idx.push(j1);
                        values.push(a * v1);
                        p.next();
                    }
                    (Some((j1, v1)), None) => {
                        col_idx.push(j1);
                        values.push(a * v1);
                        p.next();
                    }
                    (_, Some((j2, v2))) => {
                        col_idx.push(j2);
                        values.push(b * v2);
                        q.next();
                    }
                    (None, None) => break,
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Largest `|a_ij − a_ji|` over the matrix.
    pub fn max_asymmetry(&self) -> S::Real {
        let mut worst = S::Real::zero();
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                let d = (v - self.get(j, i)).modulus();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Half-bandwidth `max |i − j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.nrows)
            .flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.finite())
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        let mut d = vec![vec![S::zero(); self.ncols]; self.nrows];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }
}

impl<T: Real> CsrMatrix<num_complex::Complex<T>> {
    pub fn real_part(&self) -> CsrMatrix<T> {
        self.map(|v| v.re)
    }

    pub fn imag_part(&self) -> CsrMatrix<T> {
        self.map(|v| v.im)
    }
}

impl<S: Scalar> CsrMatrix<S> {
    /// `(self − selfᵀ) / 2`
    pub fn antisymmetric_part(&self) -> Self {
        let half = S::from_real(S::Real::lit(0.5));
        self.linear_combination(half, &self.transpose(), -half)
    }

    /// `(self + selfᵀ) / 2`
    pub fn symmetric_part(&self) -> Self {
        let half = S::from_real(S::Real::lit(0.5));
        self.linear_combination(half, &self.transpose(), half)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let a =
            CsrMatrix::from_triplets(2, 2, &[(1, 1, 1.0), (0, 1, 2.0), (1, 1, 3.0), (0, 0, 5.0)]);
        assert_eq!(a.row_ptr(), &[0, 2, 3]);
        assert_eq!(a.col_indices(), &[0, 1, 1]);
        assert_eq!(a.values(), &[5.0, 2.0, 4.0]);
    }

    #[test]
    fn linear_combination_merges_patterns() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]);
        let b = CsrMatrix::from_triplets(2, 2, &[(0, 1, 2.0), (1, 1, 3.0)]);
        let c = a.linear_combination(2.0, &b, -1.0);
        assert_eq!(c.to_dense(), vec![vec![2.0, -2.0], vec![0.0, -1.0]]);
    }

    #[test]
    fn transpose_and_asymmetry() {
        let a = CsrMatrix::from_dense(&[
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)],
            vec![Complex64::new(0.0, 2.0), Complex64::new(3.0, 0.0)],
        ]);
        assert_eq!(a.max_asymmetry(), 0.0);
        let b = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert_eq!(b.max_asymmetry(), 2.0);
        assert_eq!(b.transpose().get(1, 0), 2.0);
        assert_eq!(b.antisymmetric_part().get(0, 1), 1.0);
    }

    #[test]
    fn bandwidth_of_tridiagonal() {
        let a = CsrMatrix::from_triplets(
            3,
            3,
            &[(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (2, 2, 1.0)],
        );
        assert_eq!(a.bandwidth(), 1);
    }
}
