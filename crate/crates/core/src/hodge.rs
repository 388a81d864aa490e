//! Decoupled linearized scheme in Hodge variables `(ψ, p, q, u, v)` with
//! `A = ∇×u + ∇v`. Each step is one complex solve for `ψ` followed by four
//! real solves with fixed matrices.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Subsystem};
use crate::fem::{
    assemble_psi_system, assemble_supercurrent, curl_field, gradient_field, load, load_curl,
    load_gradient, mass, stiffness, ElementVectorField, P1Space, PsiParams, QuadratureRule,
};
use crate::manufactured::{ExactSolution, Forcing, QuadSamples};
use crate::scalar::Real;
use crate::sparse::{
    complex_solve, CsrMatrix, DirichletReduction, IterativeOptions, LinearSolveReport, SolveError,
    SpdMethod, SpdSolver,
};

pub use crate::fem::chi;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig<T> {
    pub eta: T,
    pub kappa: T,
    pub tau: T,
    pub t_final: T,
    /// Permits `τ ≥ η/4`, outside the range where the scheme is known to be
    /// uniquely solvable.
    pub allow_large_tau: bool,
    pub solver_tol: f64,
    pub spd_method: SpdMethod,
}

impl<T: Real> SchemeConfig<T> {
    pub fn new(tau: T, t_final: T) -> Self {
        SchemeConfig {
            eta: T::one(),
            kappa: T::lit(10.0),
            tau,
            t_final,
            allow_large_tau: false,
            solver_tol: 1e-10,
            spd_method: SpdMethod::Cholesky,
        }
    }

    /// Checks the parameters and returns the number of steps `N = T/τ`.
    pub fn validate(&self) -> Result<usize> {
        let positive = |x: T| x.is_finite() && x > T::zero();
        if !positive(self.eta) || !positive(self.kappa) || !positive(self.tau) {
            return Err(Error::Config(
                "eta, kappa and tau must be positive and finite".into(),
            ));
        }
        if !(self.t_final.is_finite() && self.t_final >= T::zero()) {
            return Err(Error::Config("final time must be non-negative".into()));
        }
        if self.tau >= self.eta / T::lit(4.0) && !self.allow_large_tau {
            return Err(Error::Config(format!(
                "time step {} must be below eta/4 = {} (set allow_large_tau to override)",
                self.tau,
                self.eta / T::lit(4.0)
            )));
        }
        if !(self.solver_tol > 0.0) {
            return Err(Error::Config("solver tolerance must be positive".into()));
        }
        let ratio = (self.t_final / self.tau).to_f64_lossy();
        let n = ratio.round();
        if (ratio - n).abs() > 1e-6 * ratio.max(1.0) {
            return Err(Error::Config(format!(
                "final time {} is not a multiple of tau {}",
                self.t_final, self.tau
            )));
        }
        Ok(n as usize)
    }

    pub fn psi_params(&self) -> PsiParams<T> {
        PsiParams {
            eta: self.eta,
            kappa: self.kappa,
            tau: self.tau,
        }
    }

    pub fn iterative_options(&self) -> IterativeOptions {
        IterativeOptions::with_tol(self.solver_tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdglState<T> {
    pub step: usize,
    pub t: T,
    pub psi: Vec<Complex<T>>,
    pub p: Vec<T>,
    pub q: Vec<T>,
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub a: ElementVectorField<T>,
}

/// Solver outcomes of one step, in solve order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub psi: LinearSolveReport,
    pub p: LinearSolveReport,
    pub q: LinearSolveReport,
    pub u: LinearSolveReport,
    pub v: LinearSolveReport,
}

/// One row of the per-step diagnostics table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub step: usize,
    pub t: f64,
    pub psi_l2: f64,
    pub grad_u_l2: f64,
    pub grad_v_l2: f64,
    /// Iteration counts for ψ, p, q, u, v; a direct factorization counts
    /// as one. Schemes without some unknown report zero.
    pub iters: [usize; 5],
}

fn solve_err(subsystem: Subsystem, step: usize) -> impl Fn(SolveError) -> Error {
    move |source| Error::Solve {
        subsystem,
        step,
        source,
    }
}

/// Assembles and solves the order-parameter system with `ψ^n` as the
/// initial guess.
pub fn solve_psi<T: Real>(
    space: &P1Space<T>,
    rule: &QuadratureRule<T>,
    psi_n: &[Complex<T>],
    a_n: &ElementVectorField<T>,
    g: Option<&[Complex<T>]>,
    params: PsiParams<T>,
    opts: &IterativeOptions,
) -> Result<(Vec<Complex<T>>, LinearSolveReport), SolveError> {
    let (mat, rhs) = assemble_psi_system(space, rule, psi_n, a_n, g, params)
        .map_err(|_| SolveError::NonFinite)?;
    complex_solve(&mat, &rhs, Some(psi_n), opts)
}

/// Stepper with all constant matrices prepared up front.
#[derive(Debug, Clone)]
pub struct HodgeScheme<T> {
    space: P1Space<T>,
    rule: QuadratureRule<T>,
    config: SchemeConfig<T>,
    steps: usize,
    mass: CsrMatrix<T>,
    dirichlet: DirichletReduction,
    pinned: DirichletReduction,
    laplace_dirichlet: SpdSolver<T>,
    laplace_neumann: SpdSolver<T>,
    heat_dirichlet: SpdSolver<T>,
    heat_neumann: SpdSolver<T>,
}

impl<T: Real> HodgeScheme<T> {
    pub fn new(space: P1Space<T>, config: SchemeConfig<T>) -> Result<Self> {
        let steps = config.validate()?;
        let n = space.dim();
        let mass = mass(&space);
        let stiff = stiffness(&space);
        let heat = mass.linear_combination(T::one() / config.tau, &stiff, T::one());
        let dirichlet = DirichletReduction::new(n, &space.mesh().boundary_vertices());
        // any single vertex removes the constant nullspace
        let pinned = DirichletReduction::new(n, &[0]);
        let opts = config.iterative_options();
        let prep = |m: CsrMatrix<T>| {
            SpdSolver::new(m, config.spd_method, opts).map_err(solve_err(Subsystem::Init, 0))
        };
        Ok(HodgeScheme {
            laplace_dirichlet: prep(dirichlet.reduce_matrix(&stiff))?,
            laplace_neumann: prep(pinned.reduce_matrix(&stiff))?,
            heat_dirichlet: prep(dirichlet.reduce_matrix(&heat))?,
            heat_neumann: prep(heat)?,
            space,
            rule: QuadratureRule::degree4(),
            config,
            steps,
            mass,
            dirichlet,
            pinned,
        })
    }

    pub fn space(&self) -> &P1Space<T> {
        &self.space
    }

    pub fn rule(&self) -> &QuadratureRule<T> {
        &self.rule
    }

    pub fn config(&self) -> &SchemeConfig<T> {
        &self.config
    }

    /// Number of steps `N` to reach the final time.
    pub fn steps(&self) -> usize {
        self.steps
    }

    fn dirichlet_solve(
        &self,
        solver: &SpdSolver<T>,
        rhs: &[T],
        sub: Subsystem,
        step: usize,
    ) -> Result<(Vec<T>, LinearSolveReport)> {
        let (x, rep) = solver
            .solve(&self.dirichlet.restrict(rhs), None)
            .map_err(solve_err(sub, step))?;
        Ok((self.dirichlet.extend(&x, None), rep))
    }

    /// Neumann Poisson problem, returned with zero mean.
    fn neumann_solve(
        &self,
        rhs: &[T],
        sub: Subsystem,
        step: usize,
    ) -> Result<(Vec<T>, LinearSolveReport)> {
        let (x, rep) = self
            .laplace_neumann
            .solve(&self.pinned.restrict(rhs), None)
            .map_err(solve_err(sub, step))?;
        let mut x = self.pinned.extend(&x, None);
        let mean = self.space.mean(&x);
        x.iter_mut().for_each(|v| *v -= mean);
        Ok((x, rep))
    }

    fn reconstruct(&self, u: &[T], v: &[T]) -> ElementVectorField<T> {
        curl_field(&self.space, u).add(&gradient_field(&self.space, v))
    }

    /// Initial state from nodal `ψ₀` and `A₀` sampled at the quadrature points.
    pub fn init_state(&self, psi0: Vec<Complex<T>>, a0: &[[T; 2]]) -> Result<TdglState<T>> {
        if psi0.len() != self.space.dim() {
            return Err(Error::Config("initial psi has the wrong length".into()));
        }
        let (u, _) = self.dirichlet_solve(
            &self.laplace_dirichlet,
            &load_curl(&self.space, &self.rule, a0),
            Subsystem::Init,
            0,
        )?;
        let (v, _) = self.neumann_solve(
            &load_gradient(&self.space, &self.rule, a0),
            Subsystem::Init,
            0,
        )?;
        let n = self.space.dim();
        Ok(TdglState {
            step: 0,
            t: T::zero(),
            psi: psi0,
            p: vec![T::zero(); n],
            q: vec![T::zero(); n],
            a: self.reconstruct(&u, &v),
            u,
            v,
        })
    }

    /// Initial state from a closed-form solution at `t = 0`.
    pub fn init_from_exact(&self, exact: &dyn ExactSolution<T>) -> Result<TdglState<T>> {
        let psi0 = self
            .space
            .mesh()
            .vertices()
            .iter()
            .map(|&x| exact.psi(x, T::zero()))
            .collect::<Result<Vec<_>>>()?;
        let a0 = self
            .space
            .sample(&self.rule, |_, x| exact.a(x, T::zero()))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        self.init_state(psi0, &a0)
    }

    /// Zero initial data.
    pub fn zero_state(&self) -> TdglState<T> {
        let n = self.space.dim();
        TdglState {
            step: 0,
            t: T::zero(),
            psi: vec![Complex::new(T::zero(), T::zero()); n],
            p: vec![T::zero(); n],
            q: vec![T::zero(); n],
            u: vec![T::zero(); n],
            v: vec![T::zero(); n],
            a: ElementVectorField::zeros(self.space.mesh().num_triangles()),
        }
    }

    pub fn time_at(&self, step: usize) -> T {
        T::from_usize_lossy(step) * self.config.tau
    }

    /// Stage (a): `ψ^{n+1}` from `ψ^n`, `A^n` and `g^{n+1}`.
    pub fn stage_psi(
        &self,
        state: &TdglState<T>,
        g: &[Complex<T>],
    ) -> Result<(Vec<Complex<T>>, LinearSolveReport)> {
        let opts = self.config.iterative_options();
        solve_psi(
            &self.space,
            &self.rule,
            &state.psi,
            &state.a,
            Some(g),
            self.config.psi_params(),
            &opts,
        )
        .map_err(solve_err(Subsystem::Psi, state.step + 1))
    }

    /// Stages (b), (c): `p^{n+1}` and zero-mean `q^{n+1}`.
    pub fn stage_pq(
        &self,
        state: &TdglState<T>,
        psi_new: &[Complex<T>],
        gvec: &[[T; 2]],
    ) -> Result<((Vec<T>, LinearSolveReport), (Vec<T>, LinearSolveReport))> {
        let step = state.step + 1;
        let (rp, rq) = assemble_supercurrent(
            &self.space,
            &self.rule,
            &state.psi,
            psi_new,
            &state.a,
            self.config.kappa,
            Some(gvec),
        );
        let p = self.dirichlet_solve(&self.laplace_dirichlet, &rp, Subsystem::P, step)?;
        let q = self.neumann_solve(&rq, Subsystem::Q, step)?;
        Ok((p, q))
    }

    /// Stages (d), (e): `u^{n+1}`, `v^{n+1}` from `p^{n+1}`, `q^{n+1}` and `f^{n+1}`.
    pub fn stage_uv(
        &self,
        state: &TdglState<T>,
        p: &[T],
        q: &[T],
        f: &[T],
    ) -> Result<((Vec<T>, LinearSolveReport), (Vec<T>, LinearSolveReport))> {
        let step = state.step + 1;
        let inv_tau = T::one() / self.config.tau;
        let mu = self.mass.mul_vec(&state.u);
        let mp = self.mass.mul_vec(p);
        let fl = load(&self.space, &self.rule, f);
        let rhs_u: Vec<T> = (0..mu.len())
            .map(|i| inv_tau * mu[i] + fl[i] - mp[i])
            .collect();
        let u = self.dirichlet_solve(&self.heat_dirichlet, &rhs_u, Subsystem::U, step)?;
        let mv = self.mass.mul_vec(&state.v);
        let mq = self.mass.mul_vec(q);
        let rhs_v: Vec<T> = mv.iter().zip(&mq).map(|(a, b)| inv_tau * *a - *b).collect();
        let v = self
            .heat_neumann
            .solve(&rhs_v, Some(&state.v))
            .map_err(solve_err(Subsystem::V, step))?;
        Ok((u, v))
    }

    /// Order-parameter system of the step leaving `state`.
    pub fn psi_system(
        &self,
        state: &TdglState<T>,
        forcing: &dyn Forcing<T>,
    ) -> Result<(CsrMatrix<Complex<T>>, Vec<Complex<T>>)> {
        let src = QuadSamples::sample(
            &self.space,
            &self.rule,
            forcing,
            self.time_at(state.step + 1),
        )?;
        assemble_psi_system(
            &self.space,
            &self.rule,
            &state.psi,
            &state.a,
            Some(&src.g),
            self.config.psi_params(),
        )
    }

    /// The four fixed real matrices, after boundary reduction.
    pub fn spd_matrices(&self) -> [(&'static str, &CsrMatrix<T>); 4] {
        [
            ("laplace_dirichlet", self.laplace_dirichlet.matrix()),
            ("laplace_neumann_pinned", self.laplace_neumann.matrix()),
            ("heat_dirichlet", self.heat_dirichlet.matrix()),
            ("heat_neumann", self.heat_neumann.matrix()),
        ]
    }

    /// Advances one step using forcing already sampled at `t^{n+1}`.
    pub fn step_with(
        &self,
        state: &TdglState<T>,
        src: &QuadSamples<T>,
    ) -> Result<(TdglState<T>, StepReport)> {
        let (psi, rpsi) = self.stage_psi(state, &src.g)?;
        let ((p, rp), (q, rq)) = self.stage_pq(state, &psi, &src.gvec)?;
        let ((u, ru), (v, rv)) = self.stage_uv(state, &p, &q, &src.f)?;
        let a = self.reconstruct(&u, &v);
        let next = TdglState {
            step: state.step + 1,
            t: self.time_at(state.step + 1),
            psi,
            p,
            q,
            u,
            v,
            a,
        };
        Ok((
            next,
            StepReport {
                psi: rpsi,
                p: rp,
                q: rq,
                u: ru,
                v: rv,
            },
        ))
    }

    pub fn step(
        &self,
        state: &TdglState<T>,
        forcing: &dyn Forcing<T>,
    ) -> Result<(TdglState<T>, StepReport)> {
        let src = QuadSamples::sample(
            &self.space,
            &self.rule,
            forcing,
            self.time_at(state.step + 1),
        )?;
        self.step_with(state, &src)
    }

    pub fn diagnostics(
        &self,
        state: &TdglState<T>,
        report: Option<&StepReport>,
    ) -> StepDiagnostics {
        let iters = report.map_or([0; 5], |r| {
            [
                r.psi.iterations,
                r.p.iterations,
                r.q.iterations,
                r.u.iterations,
                r.v.iterations,
            ]
        });
        StepDiagnostics {
            step: state.step,
            t: state.t.to_f64_lossy(),
            psi_l2: self.space.l2_norm(&state.psi).to_f64_lossy(),
            grad_u_l2: self.space.grad_l2_norm(&state.u).to_f64_lossy(),
            grad_v_l2: self.space.grad_l2_norm(&state.v).to_f64_lossy(),
            iters,
        }
    }

    /// Runs from `state` until the configured final time, calling
    /// `observer` after the initial state and after every step.
    pub fn run(
        &self,
        mut state: TdglState<T>,
        forcing: &dyn Forcing<T>,
        mut observer: impl FnMut(&TdglState<T>, &StepDiagnostics),
    ) -> Result<(TdglState<T>, Vec<StepDiagnostics>)> {
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
