use num_traits::Zero;

use super::{CsrMatrix, SolveError};
use crate::scalar::{Real, Scalar};

/// Gaussian elimination with partial pivoting on a dense row-major matrix.
pub fn dense_lu_solve<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Result<Vec<S>, SolveError> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(SolveError::Dimension {
            rows: a.len(),
            cols: a.first().map_or(0, Vec::len),
            len: n,
        });
    }
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| {
                a[i][k]
                    .modulus()
                    .partial_cmp(&a[j][k].modulus())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        if a[piv][k].modulus() == S::Real::zero() || !a[piv][k].finite() {
            return Err(SolveError::Singular(k));
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let l = a[i][k] / a[k][k];
            if l == S::zero() {
                continue;
            }
            for j in k..n {
                let akj = a[k][j];
                a[i][j] -= l * akj;
            }
            let bk = b[k];
            b[i] -= l * bk;
        }
    }
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in k + 1..n {
            s -= a[k][j] * b[j];
        }
        b[k] = s / a[k][k];
    }
    Ok(b)
}

/// Cholesky factor of a symmetric positive definite band matrix.
#[derive(Debug, Clone)]
pub struct BandedCholesky<T> {
    n: usize,
    bw: usize,
    /// Row `i` holds `L[i][i-bw..=i]`; entries left of column 0 are zero.
    band: Vec<T>,
}

impl<T: Real> BandedCholesky<T> {
    /// Factors `a`, reading only its lower triangle.
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self, SolveError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(SolveError::Dimension {
                rows: n,
                cols: a.ncols(),
                len: n,
            });
        }
        if !a.all_finite() {
            return Err(SolveError::NonFinite);
        }
        let bw = a.bandwidth();
        let w = bw + 1;
        let mut band = vec![T::zero(); n * w];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    band[i * w + (j + bw - i)] = v;
                }
            }
        }
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let klo = lo.max(j.saturating_sub(bw));
                let mut s = band[i * w + (j + bw - i)];
                for k in klo..j {
                    s -= band[i * w + (k + bw - i)] * band[j * w + (k + bw - j)];
                }
                if j == i {
                    if !(s > T::zero()) {
                        return Err(SolveError::NotPositiveDefinite(i));
                    }
                    band[i * w + bw] = s.sqrt();
                } else {
                    band[i * w + (j + bw - i)] = s / band[j * w + bw];
                }
            }
        }
        Ok(BandedCholesky { n, bw, band })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.band[i * w + (k + bw - i)] * y[k];
            }
            y[i] = s / self.band[i * w + bw];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + bw + 1).min(n) {
                s -= self.band[k * w + (i + bw - k)] * y[k];
            }
            y[i] = s / self.band[i * w + bw];
        }
        y
    }
}

/// LU factor without pivoting of a band matrix with symmetric pattern.
#[derive(Debug, Clone)]
pub struct BandedLu<S> {
    n: usize,
    bw: usize,
    /// Row `i` holds columns `i-bw..=i+bw`.
    band: Vec<S>,
}

impl<S: Scalar> BandedLu<S> {
    pub fn factor(a: &CsrMatrix<S>) -> Result<Self, SolveError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(SolveError::Dimension {
                rows: n,
                cols: a.ncols(),
                len: n,
            });
        }
        if !a.all_finite() {
            return Err(SolveError::NonFinite);
        }
        let bw = a.bandwidth();
        let w = 2 * bw + 1;
        let mut band = vec![S::zero(); n * w];
        for i in 0..n {
            for (j, v) in a.row(i) {
                band[i * w + (j + bw - i)] = v;
            }
        }
        for k in 0..n {
            let pivot = band[k * w + bw];
            if pivot.modulus() == S::Real::zero() {
                return Err(SolveError::Singular(k));
            }
            let last = (k + bw).min(n - 1);
            for i in k + 1..=last {
                let l = band[i * w + (k + bw - i)] / pivot;
                band[i * w + (k + bw - i)] = l;
                if l == S::zero() {
                    continue;
                }
                for j in k + 1..=last {
                    let akj = band[k * w + (j + bw - k)];
                    band[i * w + (j + bw - i)] -= l * akj;
                }
            }
        }
        Ok(BandedLu { n, bw, band })
    }

    pub fn solve(&self, b: &[S]) -> Vec<S> {
        let (n, bw, w) = (self.n, self.bw, 2 * self.bw + 1);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.band[i * w + (k + bw - i)] * y[k];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..(i + bw + 1).min(n) {
                s -= self.band[i * w + (j + bw - i)] * y[j];
            }
            y[i] = s / self.band[i * w + bw];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::relative_residual;
    use num_complex::Complex64;

    fn laplace_2d(k: usize) -> CsrMatrix<f64> {
        let id = |i: usize, j: usize| j * k + i;
        let mut t = Vec::new();
        for j in 0..k {
            for i in 0..k {
                t.push((id(i, j), id(i, j), 4.0));
                if i > 0 {
                    t.push((id(i, j), id(i - 1, j), -1.0));
                    t.push((id(i - 1, j), id(i, j), -1.0));
                }
                if j > 0 {
                    t.push((id(i, j), id(i, j - 1), -1.0));
                    t.push((id(i, j - 1), id(i, j), -1.0));
                }
            }
        }
        CsrMatrix::from_triplets(k * k, k * k, &t)
    }

    #[test]
    fn dense_lu_matches_known_inverse() {
        let x = dense_lu_solve(vec![vec![0.0, 1.0], vec![2.0, 0.0]], vec![3.0, 4.0]).unwrap();
        assert_eq!(x, vec![2.0, 3.0]);
        assert!(matches!(
            dense_lu_solve(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 1.0]),
            Err(SolveError::Singular(1))
        ));
    }

    #[test]
    fn banded_cholesky_solves_laplacian() {
        let a = laplace_2d(7);
        let b: Vec<f64> = (0..49).map(|k| 1.0 + (k % 5) as f64).collect();
        let x = BandedCholesky::factor(&a).unwrap().solve(&b);
        assert!(relative_residual(&a, &x, &b) < 1e-13);
    }

    #[test]
    fn banded_cholesky_rejects_indefinite() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(matches!(
            BandedCholesky::factor(&a),
            Err(SolveError::NotPositiveDefinite(1))
        ));
    }

    #[test]
    fn banded_lu_matches_dense_on_nonsymmetric_complex() {
        let base = laplace_2d(5);
        let n = base.nrows();
        let mut t = Vec::new();
        for i in 0..n {
            for (j, v) in base.row(i) {
                let skew = if j > i {
                    0.3
                } else if j < i {
                    -0.3
                } else {
                    0.0
                };
                t.push((i, j, Complex64::new(v, 0.2 * v + skew)));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t);
        let b: Vec<Complex64> = (0..n).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let x = BandedLu::factor(&a).unwrap().solve(&b);
        let xd = dense_lu_solve(a.to_dense(), b.clone()).unwrap();
        for (p, q) in x.iter().zip(&xd) {
            assert!((p - q).norm() < 1e-12);
        }
    }
}
