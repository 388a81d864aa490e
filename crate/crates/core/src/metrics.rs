//! Error norms against closed-form fields and observed convergence rates.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Subsystem};
use crate::fem::{
    load_curl, load_gradient, stiffness, ElementVectorField, P1Space, QuadratureRule,
};
use crate::manufactured::ExactSolution;
use crate::mesh::{barycentric, build_l_shape_mesh, PointLocator};
use crate::scalar::Real;
use crate::sparse::{DirichletReduction, IterativeOptions, SpdMethod, SpdSolver};

/// Discrete vector potential in either representation.
#[derive(Debug, Clone, Copy)]
pub enum VectorFieldRef<'a, T> {
    /// One constant per triangle.
    Element(&'a ElementVectorField<T>),
    /// P1 nodal values interleaved as `[a₀ˣ, a₀ʸ, a₁ˣ, …]`.
    Nodal(&'a [T]),
}

impl<T: Real> VectorFieldRef<'_, T> {
    pub fn eval(&self, space: &P1Space<T>, t: usize, bary: [T; 3]) -> [T; 2] {
        match self {
            VectorFieldRef::Element(f) => f.0[t],
            VectorFieldRef::Nodal(a) => {
                let tri = space.mesh().triangles()[t];
                let mut out = [T::zero(); 2];
                for k in 0..3 {
                    out[0] += bary[k] * a[2 * tri[k]];
                    out[1] += bary[k] * a[2 * tri[k] + 1];
                }
                out
            }
        }
    }
}

/// `(Σ_T |T| Σ_q w_q e(T, λ_q, x_q)²)^{1/2}` for a pointwise error magnitude `e`.
fn quad_l2<T: Real>(
    space: &P1Space<T>,
    rule: &QuadratureRule<T>,
    err: impl Fn(usize, [T; 3], [T; 2]) -> Result<T> + Sync,
) -> Result<T> {
    let nq = rule.len();
    let values = space.sample(rule, |tri, x| (tri, x));
    let mut acc = T::zero();
    for (i, (tri, x)) in values.into_iter().enumerate() {
        let q = i % nq;
        let e = err(tri, rule.points[q], x)?;
        acc += space.geometry()[tri].area * rule.weights[q] * e * e;
    }
    Ok(acc.sqrt())
}

/// `‖ψ_h − ψ(t)‖_{L²}`.
pub fn l2_error_psi<T: Real>(
    space: &P1Space<T>,
    psi_h: &[Complex<T>],
    exact: &dyn ExactSolution<T>,
    t: T,
) -> Result<T> {
    let rule = QuadratureRule::degree4();
    quad_l2(space, &rule, |tri, b, x| {
        Ok((space.eval(psi_h, tri, b) - exact.psi(x, t)?).norm())
    })
}

/// `‖|ψ_h| − |ψ(t)|‖_{L²}`.
pub fn l2_error_modulus<T: Real>(
    space: &P1Space<T>,
    psi_h: &[Complex<T>],
    exact: &dyn ExactSolution<T>,
    t: T,
) -> Result<T> {
    let rule = QuadratureRule::degree4();
    quad_l2(space, &rule, |tri, b, x| {
        Ok(space.eval(psi_h, tri, b).norm() - exact.psi(x, t)?.norm())
    })
}

/// `‖A_h − A(t)‖_{L²}`.
pub fn l2_error_vector<T: Real>(
    space: &P1Space<T>,
    a_h: VectorFieldRef<'_, T>,
    exact: &dyn ExactSolution<T>,
    t: T,
) -> Result<T> {
    let rule = QuadratureRule::degree4();
    quad_l2(space, &rule, |tri, b, x| {
        let ah = a_h.eval(space, tri, b);
        let a = exact.a(x, t)?;
        Ok((ah[0] - a[0]).hypot(ah[1] - a[1]))
    })
}

/// L² norm of a real nodal field against a scalar function, by quadrature.
pub fn l2_error_scalar<T: Real>(
    space: &P1Space<T>,
    field: &[T],
    exact: impl Fn([T; 2]) -> T + Sync,
) -> T {
    let rule = QuadratureRule::degree4();
    quad_l2(space, &rule, |tri, b, x| {
        Ok(space.eval(field, tri, b) - exact(x))
    })
    .expect("infallible")
}

/// `H¹`-seminorm errors of the Hodge potentials.
///
/// The vector error `E = A(t) − A_h` is split on the once-refined mesh as
/// `E ≈ ∇×w_u + ∇w_v` with `w_u` vanishing on the boundary, by solving
/// `(∇w_u, ∇ξ) = (E, ∇×ξ)` and `(∇w_v, ∇ζ) = (E, ∇ζ)`. Since `∇×u_h` and
/// `∇v_h` are exactly the two parts of `A_h`, `‖∇w_u‖` and `‖∇w_v‖`
/// estimate `‖∇(u − u_h)‖` and `‖∇(v − v_h)‖`.
pub fn hodge_potential_errors<T: Real>(
    space: &P1Space<T>,
    m: usize,
    a_h: VectorFieldRef<'_, T>,
    exact: &dyn ExactSolution<T>,
    t: T,
) -> Result<(T, T)> {
    let fine = P1Space::new(build_l_shape_mesh::<T>(2 * m)?);
    let rule = QuadratureRule::degree4();
    let locator = PointLocator::new(space.mesh());
    let third = T::one() / T::lit(3.0);
    // nested meshes: each fine triangle lies inside the coarse triangle
    // containing its centroid
    let parent = (0..fine.mesh().num_triangles())
        .map(|k| {
            let c = fine.mesh().point_at(k, [third; 3]);
            locator
                .locate(c)
                .map(|(p, _)| p)
                .ok_or_else(|| Error::InvalidMesh("refined mesh is not nested".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let err = fine
        .sample(&rule, |k, x| {
            let p = parent[k];
            let ah = a_h.eval(space, p, barycentric(&space.mesh().triangle_points(p), x));
            exact.a(x, t).map(|a| [a[0] - ah[0], a[1] - ah[1]])
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let stiff = stiffness(&fine);
    let opts = IterativeOptions::with_tol(1e-10);
    let to_err = |e| Error::Solve {
        subsystem: Subsystem::Init,
        step: 0,
        source: e,
    };

    let dirichlet = DirichletReduction::new(fine.dim(), &fine.mesh().boundary_vertices());
    let solver = SpdSolver::new(dirichlet.reduce_matrix(&stiff), SpdMethod::Cholesky, opts)
        .map_err(to_err)?;
    let (wu, _) = solver
        .solve(&dirichlet.restrict(&load_curl(&fine, &rule, &err)), None)
        .map_err(to_err)?;
    let wu = dirichlet.extend(&wu, None);

    let pinned = DirichletReduction::new(fine.dim(), &[0]);
    let solver =
        SpdSolver::new(pinned.reduce_matrix(&stiff), SpdMethod::Cholesky, opts).map_err(to_err)?;
    let (wv, _) = solver
        .solve(&pinned.restrict(&load_gradient(&fine, &rule, &err)), None)
        .map_err(to_err)?;
    let wv = pinned.extend(&wv, None);

    Ok((fine.grad_l2_norm(&wu), fine.grad_l2_norm(&wv)))
}

/// `log₂(e_h / e_{h/2})`; `None` unless both errors are positive and finite.
pub fn convergence_rate(e_h: f64, e_half: f64) -> Option<f64> {
    if e_h > 0.0 && e_half > 0.0 && e_h.is_finite() && e_half.is_finite() {
        Some((e_h / e_half).log2())
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub h: f64,
    pub tau: f64,
    pub scheme: String,
    #[serde(rename = "e_psi_L2")]
    pub e_psi: f64,
    #[serde(rename = "e_mod_psi_L2")]
    pub e_mod_psi: f64,
    #[serde(rename = "e_A_L2")]
    pub e_a: f64,
    #[serde(rename = "e_u_H1")]
    pub e_u: f64,
    #[serde(rename = "e_v_H1")]
    pub e_v: f64,
}
