use serde::{Deserialize, Serialize};

use super::{
    cg_solve_with_guess, relative_residual, BandedCholesky, CsrMatrix, IterativeOptions,
    LinearSolveReport, SolveError, SolverMethod,
};
use crate::scalar::Real;

/// How a fixed symmetric positive definite matrix is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpdMethod {
    /// Factor once, back-substitute per right-hand side.
    #[default]
    Cholesky,
    Cg,
}

/// A symmetric positive definite matrix prepared for repeated solves.
#[derive(Debug, Clone)]
pub struct SpdSolver<T> {
    matrix: CsrMatrix<T>,
    factor: Option<BandedCholesky<T>>,
    opts: IterativeOptions,
}

impl<T: Real> SpdSolver<T> {
    pub fn new(
        matrix: CsrMatrix<T>,
        method: SpdMethod,
        opts: IterativeOptions,
    ) -> Result<Self, SolveError> {
        let factor = match method {
            SpdMethod::Cholesky => Some(BandedCholesky::factor(&matrix)?),
            SpdMethod::Cg => None,
        };
        Ok(SpdSolver {
            matrix,
            factor,
            opts,
        })
    }

    pub fn matrix(&self) -> &CsrMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Solves `Ax = b`; `guess` seeds the iterative path only.
    pub fn solve(
        &self,
        b: &[T],
        guess: Option<&[T]>,
    ) -> Result<(Vec<T>, LinearSolveReport), SolveError> {
        if b.len() != self.dim() {
            return Err(SolveError::Dimension {
                rows: self.dim(),
                cols: self.dim(),
                len: b.len(),
            });
        }
        match &self.factor {
            Some(f) => {
                if !b.iter().all(|v| v.is_finite()) {
                    return Err(SolveError::NonFinite);
                }
                let x = f.solve(b);
                let rel = relative_residual(&self.matrix, &x, b);
                let report = LinearSolveReport {
                    iterations: 1,
                    relative_residual: rel,
                    method: SolverMethod::BandedCholesky,
                };
                if rel <= self.opts.tol {
                    Ok((x, report))
                } else {
                    // roundoff on a badly conditioned factor; polish iteratively
                    cg_solve_with_guess(&self.matrix, b, Some(&x), &self.opts)
                }
            }
            None => cg_solve_with_guess(&self.matrix, b, guess, &self.opts),
        }
    }
}
