use num_traits::{Float, Zero};

use super::{BandedLu, CsrMatrix, LinearSolveReport, SolveError, SolverMethod};
use crate::scalar::{axpy, dot, norm2, Real, Scalar};

/// Relative-residual target and iteration cap for Krylov solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterativeOptions {
    pub tol: f64,
    /// Defaults to `max(2n, 1000)` when `None`.
    pub max_iter: Option<usize>,
}

impl Default for IterativeOptions {
    fn default() -> Self {
        IterativeOptions {
            tol: 1e-10,
            max_iter: None,
        }
    }
}

impl IterativeOptions {
    pub fn with_tol(tol: f64) -> Self {
        IterativeOptions {
            tol,
            max_iter: None,
        }
    }

    fn cap(&self, n: usize) -> usize {
        self.max_iter.unwrap_or_else(|| (2 * n).max(1000))
    }
}

/// `‖Ax − b‖ / ‖b‖`, or `‖Ax‖` when `b = 0`.
pub fn relative_residual<S: Scalar>(a: &CsrMatrix<S>, x: &[S], b: &[S]) -> f64 {
    let ax = a.mul_vec(x);
    let r: Vec<S> = ax.iter().zip(b).map(|(&p, &q)| q - p).collect();
    let nb = norm2(b).to_f64_lossy();
    let nr = norm2(&r).to_f64_lossy();
    if nb == 0.0 {
        nr
    } else {
        nr / nb
    }
}

fn check_inputs<S: Scalar>(a: &CsrMatrix<S>, b: &[S]) -> Result<(), SolveError> {
    if a.nrows() != a.ncols() || a.nrows() != b.len() {
        return Err(SolveError::Dimension {
            rows: a.nrows(),
            cols: a.ncols(),
            len: b.len(),
        });
    }
    if !a.all_finite() || !b.iter().all(|v| v.finite()) {
        return Err(SolveError::NonFinite);
    }
    Ok(())
}

fn jacobi<S: Scalar>(a: &CsrMatrix<S>) -> Vec<S> {
    a.diagonal()
        .into_iter()
        .map(|d| {
            if d.modulus() > S::Real::zero() {
                S::one() / d
            } else {
                S::one()
            }
        })
        .collect()
}

/// Jacobi-preconditioned conjugate gradients for symmetric positive
/// definite systems, started from zero.
pub fn cg_solve<T: Real>(
    a: &CsrMatrix<T>,
    b: &[T],
    opts: &IterativeOptions,
) -> Result<(Vec<T>, LinearSolveReport), SolveError> {
    cg_solve_with_guess(a, b, None, opts)
}

pub fn cg_solve_with_guess<T: Real>(
    a: &CsrMatrix<T>,
    b: &[T],
    x0: Option<&[T]>,
    opts: &IterativeOptions,
) -> Result<(Vec<T>, LinearSolveReport), SolveError> {
    check_inputs(a, b)?;
    let n = b.len();
    let bnorm = norm2(b);
    let mut report = LinearSolveReport {
        iterations: 0,
        relative_residual: 0.0,
        method: SolverMethod::Cg,
    };
    if bnorm == T::zero() {
        return Ok((vec![T::zero(); n], report));
    }
    let tol = T::lit(opts.tol);
    let cap = opts.cap(n);
    let dinv = jacobi(a);
    let mut x = match x0 {
        Some(g) if g.len() == n && g.iter().all(|v| v.is_finite()) => g.to_vec(),
        _ => vec![T::zero(); n],
    };
    let mut ap = vec![T::zero(); n];

    // Outer loop restarts from the true residual so the reported residual
    // is never the drifted recursive one.
    for _restart in 0..4 {
        a.mul_vec_into(&x, &mut ap);
        let mut r: Vec<T> = b.iter().zip(&ap).map(|(&bi, &v)| bi - v).collect();
        if norm2(&r) <= tol * bnorm {
            break;
        }
        let mut z: Vec<T> = r.iter().zip(&dinv).map(|(&ri, &d)| ri * d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        while report.iterations < cap {
            a.mul_vec_into(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > T::zero()) {
                report.relative_residual = (norm2(&r) / bnorm).to_f64_lossy();
                return Err(SolveError::Breakdown(report));
            }
            let alpha = rz / pap;
            axpy(alpha, &p, &mut x);
            axpy(-alpha, &ap, &mut r);
            report.iterations += 1;
            if norm2(&r) <= tol * bnorm {
                break;
            }
            for ((zi, &ri), &d) in z.iter_mut().zip(&r).zip(&dinv) {
                *zi = ri * d;
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for (pi, &zi) in p.iter_mut().zip(&z) {
                *pi = zi + beta * *pi;
            }
        }
        if report.iterations >= cap {
            break;
        }
    }
    report.relative_residual = relative_residual(a, &x, b);
    if report.relative_residual <= opts.tol {
        Ok((x, report))
    } else {
        Err(SolveError::NotConverged(report))
    }
}

/// Jacobi-preconditioned BiCGStab for general (non-Hermitian) systems.
pub fn bicgstab_solve<S: Scalar>(
    a: &CsrMatrix<S>,
    b: &[S],
    x0: Option<&[S]>,
    opts: &IterativeOptions,
) -> Result<(Vec<S>, LinearSolveReport), SolveError> {
    check_inputs(a, b)?;
    let n = b.len();
    let bnorm = norm2(b);
    let mut report = LinearSolveReport {
        iterations: 0,
        relative_residual: 0.0,
        method: SolverMethod::BiCgStab,
    };
    if bnorm == S::Real::zero() {
        return Ok((vec![S::zero(); n], report));
    }
    let tol = S::Real::lit(opts.tol);
    let cap = opts.cap(n);
    let dinv = jacobi(a);
    let tiny = S::Real::min_positive_value().sqrt();
    let mut x = match x0 {
        Some(g) if g.len() == n && g.iter().all(|v| v.finite()) => g.to_vec(),
        _ => vec![S::zero(); n],
    };

    let mut v = vec![S::zero(); n];
    let mut t = vec![S::zero(); n];
    let mut y = vec![S::zero(); n];
    let mut zs = vec![S::zero(); n];

    'restart: for _restart in 0..4 {
        let mut r: Vec<S> = {
            a.mul_vec_into(&x, &mut v);
            b.iter().zip(&v).map(|(&bi, &vi)| bi - vi).collect()
        };
        if norm2(&r) <= tol * bnorm {
            break;
        }
        let shadow = r.clone();
        let mut p = vec![S::zero(); n];
        v.iter_mut().for_each(|e| *e = S::zero());
        let (mut rho, mut alpha, mut omega) = (S::one(), S::one(), S::one());
        while report.iterations < cap {
            let rho_new = dot(&shadow, &r);
            if rho_new.modulus() <= tiny * bnorm * bnorm {
                continue 'restart;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for k in 0..n {
                p[k] = r[k] + beta * (p[k] - omega * v[k]);
                y[k] = dinv[k] * p[k];
            }
            a.mul_vec_into(&y, &mut v);
            let sv = dot(&shadow, &v);
            if sv.modulus() <= tiny * bnorm * bnorm {
                continue 'restart;
            }
            alpha = rho / sv;
            axpy(alpha, &y, &mut x);
            axpy(-alpha, &v, &mut r);
            report.iterations += 1;
            if norm2(&r) <= tol * bnorm {
                break;
            }
            for k in 0..n {
                zs[k] = dinv[k] * r[k];
            }
            a.mul_vec_into(&zs, &mut t);
            let tt = dot(&t, &t);
            if tt.modulus() == S::Real::zero() {
                continue 'restart;
            }
            omega = dot(&t, &r) / tt;
            if omega.modulus() <= tiny {
                continue 'restart;
            }
            axpy(omega, &zs, &mut x);
            axpy(-omega, &t, &mut r);
            if norm2(&r) <= tol * bnorm {
                break;
            }
        }
        if report.iterations >= cap {
            break;
        }
    }
    report.relative_residual = relative_residual(a, &x, b);
    if report.relative_residual <= opts.tol {
        Ok((x, report))
    } else if report.iterations >= cap {
        Err(SolveError::NotConverged(report))
    } else {
        Err(SolveError::Breakdown(report))
    }
}

/// Solver for the order-parameter systems: BiCGStab first, banded LU
/// (no pivoting) if the iteration fails. The real part of these matrices is
/// positive definite whenever `τ < η`, which makes pivot-free elimination
/// well defined.
pub fn complex_solve<S: Scalar>(
    a: &CsrMatrix<S>,
    b: &[S],
    x0: Option<&[S]>,
    opts: &IterativeOptions,
) -> Result<(Vec<S>, LinearSolveReport), SolveError> {
    match bicgstab_solve(a, b, x0, opts) {
        Ok(ok) => Ok(ok),
        Err(SolveError::NonFinite) => Err(SolveError::NonFinite),
        Err(e @ SolveError::Dimension { .. }) => Err(e),
        Err(iterative) => {
            let lu = BandedLu::factor(a).map_err(|_| iterative)?;
            let x = lu.solve(b);
            let rel = relative_residual(a, &x, b);
            let report = LinearSolveReport {
                iterations: 1,
                relative_residual: rel,
                method: SolverMethod::BandedLu,
            };
            if rel <= opts.tol * 10.0 {
                Ok((x, report))
            } else {
                Err(SolveError::NotConverged(report))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn tridiag(n: usize) -> CsrMatrix<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn cg_identity() {
        let a = CsrMatrix::<f64>::identity(3);
        let (x, rep) = cg_solve(&a, &[1.0, 2.0, 3.0], &IterativeOptions::default()).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
        assert!(rep.relative_residual <= 1e-10);
    }

    #[test]
    fn cg_tridiagonal_three_by_three() {
        let (x, _) = cg_solve(&tridiag(3), &[1.0, 1.0, 1.0], &IterativeOptions::default()).unwrap();
        for (xi, ei) in x.iter().zip([1.5, 2.0, 1.5]) {
            assert!((xi - ei).abs() < 1e-12);
        }
    }

    #[test]
    fn cg_zero_rhs_takes_no_iterations() {
        let (x, rep) = cg_solve(&tridiag(5), &[0.0; 5], &IterativeOptions::default()).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
        assert_eq!(rep.iterations, 0);
    }

    #[test]
    fn cg_rejects_nonfinite_and_reports_cap() {
        let a = tridiag(3);
        assert!(matches!(
            cg_solve(&a, &[f64::NAN, 0.0, 0.0], &IterativeOptions::default()),
            Err(SolveError::NonFinite)
        ));
        let opts = IterativeOptions {
            tol: 1e-14,
            max_iter: Some(1),
        };
        assert!(matches!(
            cg_solve(&tridiag(50), &vec![1.0; 50], &opts),
            Err(SolveError::NotConverged(_))
        ));
    }

    #[test]
    fn bicgstab_two_by_two_complex_symmetric() {
        let i = Complex64::i();
        let two = Complex64::new(2.0, 0.0);
        let a = CsrMatrix::from_dense(&[vec![two, i], vec![i, two]]);
        let b = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let (x, _) = complex_solve(&a, &b, None, &IterativeOptions::default()).unwrap();
        // A⁻¹ = [[2, −i], [−i, 2]] / 5
        assert!((x[0] - Complex64::new(0.4, 0.0)).norm() < 1e-12);
        assert!((x[1] - Complex64::new(0.0, -0.2)).norm() < 1e-12);
    }

    #[test]
    fn complex_identity_returns_rhs() {
        let a = CsrMatrix::<Complex64>::identity(4);
        let b: Vec<Complex64> = (0..4)
            .map(|k| Complex64::new(k as f64, 1.0 - k as f64))
            .collect();
        let (x, _) = complex_solve(&a, &b, None, &IterativeOptions::default()).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn complex_solver_agrees_with_cg_on_real_input() {
        let a = tridiag(40);
        let b: Vec<f64> = (0..40).map(|k| (k as f64 * 0.3).sin()).collect();
        // cond(A) ≈ 660, so a 1e-14 residual pins the solutions to ~1e-11.
        let opts = IterativeOptions::with_tol(1e-14);
        let (xr, _) = cg_solve(&a, &b, &opts).unwrap();
        let ac = a.map(|v| Complex64::new(v, 0.0));
        let bc: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let (xc, _) = complex_solve(&ac, &bc, None, &opts).unwrap();
        let scale = xr.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (p, q) in xr.iter().zip(&xc) {
            assert!((p - q.re).abs() <= 1e-10 * scale && q.im.abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn complex_solve_falls_back_to_direct() {
        let a = tridiag(30).map(|v| Complex64::new(v, 0.1 * v));
        let b = vec![Complex64::new(1.0, 0.0); 30];
        let opts = IterativeOptions {
            tol: 1e-10,
            max_iter: Some(1),
        };
        let (x, rep) = complex_solve(&a, &b, None, &opts).unwrap();
        assert_eq!(rep.method, SolverMethod::BandedLu);
        assert!(relative_residual(&a, &x, &b) < 1e-12);
    }
}
