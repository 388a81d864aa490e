use super::CsrMatrix;
use crate::scalar::Scalar;

/// Symmetric elimination of prescribed unknowns.
#[derive(Debug, Clone)]
pub struct DirichletReduction {
    n: usize,
    /// Full index of each free unknown.
    free: Vec<usize>,
    /// Position in the reduced system, or `None` for fixed unknowns.
    to_free: Vec<Option<usize>>,
}

impl DirichletReduction {
    pub fn new(n: usize, fixed: &[usize]) -> Self {
        let mut is_fixed = vec![false; n];
        for &i in fixed {
            is_fixed[i] = true;
        }
        let mut to_free = vec![None; n];
        let mut free = Vec::with_capacity(n);
        for i in 0..n {
            if !is_fixed[i] {
                to_free[i] = Some(free.len());
                free.push(i);
            }
        }
        DirichletReduction { n, free, to_free }
    }

    pub fn full_dim(&self) -> usize {
        self.n
    }

    pub fn reduced_dim(&self) -> usize {
        self.free.len()
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        self.to_free[i].is_none()
    }

    pub fn reduce_matrix<S: Scalar>(&self, a: &CsrMatrix<S>) -> CsrMatrix<S> {
        let mut t = Vec::with_capacity(a.nnz());
        for (r, &i) in self.free.iter().enumerate() {
            for (j, v) in a.row(i) {
                if let Some(c) = self.to_free[j] {
                    t.push((r, c, v));
                }
            }
        }
        CsrMatrix::from_triplets(self.free.len(), self.free.len(), &t)
    }

    /// Restricts `b` to the free rows and moves the prescribed values
    /// (`fixed_values`, indexed by full unknown) to the right-hand side.
    pub fn reduce_rhs<S: Scalar>(
        &self,
        a: &CsrMatrix<S>,
        b: &[S],
        fixed_values: Option<&[S]>,
    ) -> Vec<S> {
        self.free
            .iter()
            .map(|&i| {
                let mut v = b[i];
                if let Some(g) = fixed_values {
                    for (j, aij) in a.row(i) {
                        if self.to_free[j].is_none() {
                            v -= aij * g[j];
                        }
                    }
                }
                v
            })
            .collect()
    }

    pub fn restrict<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        self.free.iter().map(|&i| x[i]).collect()
    }

    /// Scatters a reduced solution back, filling fixed unknowns from
    /// `fixed_values` (zero when `None`).
    pub fn extend<S: Scalar>(&self, x_free: &[S], fixed_values: Option<&[S]>) -> Vec<S> {
        let mut x = match fixed_values {
            Some(g) => g.to_vec(),
            None => vec![S::zero(); self.n],
        };
        for (r, &i) in self.free.iter().enumerate() {
            x[i] = x_free[r];
        }
        x
    }
}

/// Eliminates `nodes` with prescribed `values` (one per node) from
/// `A x = b`. Returns the reduction map with the reduced matrix and
/// right-hand side.
pub fn apply_dirichlet<S: Scalar>(
    a: &CsrMatrix<S>,
    b: &[S],
    nodes: &[usize],
    values: &[S],
) -> (DirichletReduction, CsrMatrix<S>, Vec<S>) {
    assert_eq!(nodes.len(), values.len());
    let red = DirichletReduction::new(a.nrows(), nodes);
    let mut g = vec![S::zero(); a.nrows()];
    for (&i, &v) in nodes.iter().zip(values) {
        g[i] = v;
    }
    let ar = red.reduce_matrix(a);
    let br = red.reduce_rhs(a, b, Some(&g));
    (red, ar, br)
}
