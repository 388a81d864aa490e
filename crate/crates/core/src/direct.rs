//! Baseline scheme: nodal P1 vector potential, linearized backward Euler on
//! the original (non-Hodge) equations. On domains with reentrant corners
//! this converges to the wrong vector potential.

use num_complex::Complex;

use crate::error::{Error, Result, Subsystem};
use crate::fem::{
    assemble_psi_system, supercurrent_samples, ElementVectorField, P1Space, QuadratureRule,
};
use crate::hodge::{solve_psi, SchemeConfig, StepDiagnostics};
use crate::manufactured::{ExactSolution, Forcing, QuadSamples};
use crate::mesh::{classify_boundary, Axis, NormalConstraint};
use crate::scalar::Real;
use crate::sparse::{CsrMatrix, DirichletReduction, LinearSolveReport, SparsityPattern, SpdSolver};

#[derive(Debug, Clone, PartialEq)]
pub struct DirectState<T> {
    pub step: usize,
    pub t: T,
    pub psi: Vec<Complex<T>>,
    /// Nodal values interleaved as `[a₀ˣ, a₀ʸ, a₁ˣ, …]`.
    pub a: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectStepReport {
    pub psi: LinearSolveReport,
    pub a: LinearSolveReport,
}

/// `∇×` and `∇·` of the vector basis function `φ_k e_c`.
#[inline]
fn curl_div<T: Real>(grad: [T; 2], c: usize) -> (T, T) {
    if c == 0 {
        (-grad[1], grad[0])
    } else {
        (grad[0], grad[1])
    }
}

#[derive(Debug, Clone)]
pub struct DirectScheme<T> {
    space: P1Space<T>,
    rule: QuadratureRule<T>,
    config: SchemeConfig<T>,
    steps: usize,
    vec_mass: CsrMatrix<T>,
    constrained: DirichletReduction,
    system: SpdSolver<T>,
}

impl<T: Real> DirectScheme<T> {
    pub fn new(space: P1Space<T>, config: SchemeConfig<T>) -> Result<Self> {
        let steps = config.validate()?;
        let n = space.dim();
        let mut rows = vec![Vec::new(); 2 * n];
        for tri in space.mesh().triangles() {
            for &a in tri {
                for &b in tri {
                    for c in 0..2 {
                        rows[2 * a + c].extend_from_slice(&[2 * b, 2 * b + 1]);
                    }
                }
            }
        }
        let pattern = SparsityPattern::from_rows(rows);
        let mut vec_mass = CsrMatrix::zeros(&pattern);
        let mut operator = CsrMatrix::zeros(&pattern);
        let twelfth = T::one() / T::lit(12.0);
        for (tri, g) in space.mesh().triangles().iter().zip(space.geometry()) {
            for j in 0..3 {
                for k in 0..3 {
                    let m = g.area * twelfth * if j == k { T::lit(2.0) } else { T::one() };
                    for c in 0..2 {
                        vec_mass.add_to(2 * tri[j] + c, 2 * tri[k] + c, m);
                        let (cj, dj) = curl_div(g.grads[j], c);
                        for d in 0..2 {
                            let (ck, dk) = curl_div(g.grads[k], d);
                            operator.add_to(
                                2 * tri[j] + c,
                                2 * tri[k] + d,
                                g.area * (cj * ck + dj * dk),
                            );
                        }
                    }
                }
            }
        }
        let fixed: Vec<usize> = classify_boundary(space.mesh())?
            .normal_constraints
            .into_iter()
            .flat_map(|(v, c)| match c {
                NormalConstraint::Component(Axis::X) => vec![2 * v],
                NormalConstraint::Component(Axis::Y) => vec![2 * v + 1],
                NormalConstraint::Both => vec![2 * v, 2 * v + 1],
            })
            .collect();
        let constrained = DirichletReduction::new(2 * n, &fixed);
        let full = vec_mass.linear_combination(T::one() / config.tau, &operator, T::one());
        let system = SpdSolver::new(
            constrained.reduce_matrix(&full),
            config.spd_method,
            config.iterative_options(),
        )
        .map_err(|source| Error::Solve {
            subsystem: Subsystem::Init,
            step: 0,
            source,
        })?;
        Ok(DirectScheme {
            space,
            rule: QuadratureRule::degree4(),
            config,
            steps,
            vec_mass,
            constrained,
            system,
        })
    }

    pub fn space(&self) -> &P1Space<T> {
        &self.space
    }

    pub fn config(&self) -> &SchemeConfig<T> {
        &self.config
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Indices of nodal dofs fixed to zero by `A·n = 0`.
    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained.is_fixed(dof)
    }

    pub fn time_at(&self, step: usize) -> T {
        T::from_usize_lossy(step) * self.config.tau
    }

    /// Elementwise average of the nodal field.
    pub fn element_average(&self, a: &[T]) -> ElementVectorField<T> {
        let third = T::one() / T::lit(3.0);
        ElementVectorField(
            self.space
                .mesh()
                .triangles()
                .iter()
                .map(|tri| {
                    let sx = a[2 * tri[0]] + a[2 * tri[1]] + a[2 * tri[2]];
                    let sy = a[2 * tri[0] + 1] + a[2 * tri[1] + 1] + a[2 * tri[2] + 1];
                    [sx * third, sy * third]
                })
                .collect(),
        )
    }

    pub fn init_from_exact(&self, exact: &dyn ExactSolution<T>) -> Result<DirectState<T>> {
        let verts = self.space.mesh().vertices();
        let psi = verts
            .iter()
            .map(|&x| exact.psi(x, T::zero()))
            .collect::<Result<Vec<_>>>()?;
        let mut a = Vec::with_capacity(2 * verts.len());
        for &x in verts {
            a.extend_from_slice(&exact.a(x, T::zero())?);
        }
        for (i, v) in a.iter_mut().enumerate() {
            if self.constrained.is_fixed(i) {
                *v = T::zero();
            }
        }
        Ok(DirectState {
            step: 0,
            t: T::zero(),
            psi,
            a,
        })
    }

    pub fn zero_state(&self) -> DirectState<T> {
        let n = self.space.dim();
        DirectState {
            step: 0,
            t: T::zero(),
            psi: vec![Complex::new(T::zero(), T::zero()); n],
            a: vec![T::zero(); 2 * n],
        }
    }

    /// Order-parameter system of the step leaving `state`.
    pub fn psi_system(
        &self,
        state: &DirectState<T>,
        forcing: &dyn Forcing<T>,
    ) -> Result<(CsrMatrix<Complex<T>>, Vec<Complex<T>>)> {
        let src = QuadSamples::sample(
            &self.space,
            &self.rule,
            forcing,
            self.time_at(state.step + 1),
        )?;
        let a = self.element_average(&state.a);
        assemble_psi_system(
            &self.space,
            &self.rule,
            &state.psi,
            &a,
            Some(&src.g),
            self.config.psi_params(),
        )
    }

    /// Constrained `(1/τ)M + curl-curl + div-div` matrix.
    pub fn vector_system(&self) -> &CsrMatrix<T> {
        self.system.matrix()
    }

    pub fn step_with(
        &self,
        state: &DirectState<T>,
        src: &QuadSamples<T>,
    ) -> Result<(DirectState<T>, DirectStepReport)> {
        let step = state.step + 1;
        let a_elem = self.element_average(&state.a);
        let opts = self.config.iterative_options();
        let (psi, rpsi) = solve_psi(
            &self.space,
            &self.rule,
            &state.psi,
            &a_elem,
            Some(&src.g),
            self.config.psi_params(),
            &opts,
        )
        .map_err(|source| Error::Solve {
            subsystem: Subsystem::Psi,
            step,
            source,
        })?;
        let current = supercurrent_samples(
            &self.space,
            &self.rule,
            &state.psi,
            &psi,
            &a_elem,
            self.config.kappa,
            Some(&src.gvec),
        );

        let inv_tau = T::one() / self.config.tau;
        let mut rhs: Vec<T> = self
            .vec_mass
            .mul_vec(&state.a)
            .into_iter()
            .map(|v| v * inv_tau)
            .collect();
        let nq = self.rule.len();
        for (t, (tri, g)) in self
            .space
            .mesh()
            .triangles()
            .iter()
            .zip(self.space.geometry())
            .enumerate()
        {
            let mut f_int = T::zero();
            for (q, (b, w)) in self.rule.points.iter().zip(&self.rule.weights).enumerate() {
                let aw = g.area * *w;
                f_int += aw * src.f[t * nq + q];
                let cur = current[t * nq + q];
                for k in 0..3 {
                    rhs[2 * tri[k]] -= aw * cur[0] * b[k];
                    rhs[2 * tri[k] + 1] -= aw * cur[1] * b[k];
                }
            }
            for k in 0..3 {
                for c in 0..2 {
                    rhs[2 * tri[k] + c] += f_int * curl_div(g.grads[k], c).0;
                }
            }
        }
        let (a, ra) = self
            .system
            .solve(&self.constrained.restrict(&rhs), None)
            .map_err(|source| Error::Solve {
                subsystem: Subsystem::A,
                step,
                source,
            })?;
        let a = self.constrained.extend(&a, None);
        Ok((
            DirectState {
                step,
                t: self.time_at(step),
                psi,
                a,
            },
            DirectStepReport { psi: rpsi, a: ra },
        ))
    }

    pub fn step(
        &self,
        state: &DirectState<T>,
        forcing: &dyn Forcing<T>,
    ) -> Result<(DirectState<T>, DirectStepReport)> {
        let src = QuadSamples::sample(
            &self.space,
            &self.rule,
            forcing,
            self.time_at(state.step + 1),
        )?;
        self.step_with(state, &src)
    }

    /// Diagnostics in the shared layout; the two potential columns carry
    /// `‖∇×A‖` and `‖∇·A‖` since this scheme has no Hodge potentials.
    pub fn diagnostics(
        &self,
        state: &DirectState<T>,
        report: Option<&DirectStepReport>,
    ) -> StepDiagnostics {
        let mut curl = T::zero();
        let mut div = T::zero();
        for (tri, g) in self
            .space
            .mesh()
            .triangles()
            .iter()
            .zip(self.space.geometry())
        {
            let (mut c, mut d) = (T::zero(), T::zero());
            for k in 0..3 {
                for comp in 0..2 {
                    let (ck, dk) = curl_div(g.grads[k], comp);
                    c += ck * state.a[2 * tri[k] + comp];
                    d += dk * state.a[2 * tri[k] + comp];
                }
            }
            curl += g.area * c * c;
            div += g.area * d * d;
        }
        StepDiagnostics {
            step: state.step,
            t: state.t.to_f64_lossy(),
            psi_l2: self.space.l2_norm(&state.psi).to_f64_lossy(),
            grad_u_l2: curl.sqrt().to_f64_lossy(),
            grad_v_l2: div.sqrt().to_f64_lossy(),
            iters: report.map_or([0; 5], |r| [r.psi.iterations, 0, 0, r.a.iterations, 0]),
        }
    }

    pub fn run(
        &self,
        mut state: DirectState<T>,
        forcing: &dyn Forcing<T>,
        mut observer: impl FnMut(&DirectState<T>, &StepDiagnostics),
    ) -> Result<(DirectState<T>, Vec<StepDiagnostics>)> {
        let mut diags = Vec::with_capacity(self.steps + 1);
        let d0 = self.diagnostics(&state, None);
        observer(&state, &d0);
        diags.push(d0);
        while state.step < self.steps {
            let (next, report) = self.step(&state, forcing)?;
            let d = self.diagnostics(&next, Some(&report));
            if !d.psi_l2.is_finite() {
                return Err(Error::NonFinite("psi after step"));
            }
            observer(&next, &d);
            diags.push(d);
            state = next;
        }
        Ok((state, diags))
    }
}
