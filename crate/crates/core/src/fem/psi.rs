use num_complex::Complex;

use super::{load, load_curl, load_gradient, ElementVectorField, P1Space, QuadratureRule};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::CsrMatrix;

/// Truncation `χ(z) = z` for `|z| ≤ 1`, `z/|z|` otherwise.
pub fn chi<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = z.norm();
    if r <= T::one() {
        z
    } else {
        z / r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiParams<T> {
    pub eta: T,
    pub kappa: T,
    pub tau: T,
}

/// Linear system for `ψ^{n+1}` with `ψ^n` and `A^n` frozen.
///
/// Entry `(j, k)` pairs trial `φ_k` with test `φ_j`:
/// `(η/τ + |A|²) M + K/κ² + S + (i/κ)∫A·(φ_j∇φ_k − φ_k∇φ_j) + iηκ∫A·∇(φ_kφ_j)`.
/// `g` is sampled at the points of `rule`.
pub fn assemble_psi_system<T: Real>(
    space: &P1Space<T>,
    rule: &QuadratureRule<T>,
    psi_n: &[Complex<T>],
    a_n: &ElementVectorField<T>,
    g: Option<&[Complex<T>]>,
    params: PsiParams<T>,
) -> Result<(CsrMatrix<Complex<T>>, Vec<Complex<T>>)> {
    if psi_n
        .iter()
        .any(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::NonFinite("psi_n"));
    }
    if a_n
        .0
        .iter()
        .any(|v| !(v[0].is_finite() && v[1].is_finite()))
    {
        return Err(Error::NonFinite("A_n"));
    }
    let PsiParams { eta, kappa, tau } = params;
    let twelfth = T::one() / T::lit(12.0);
    let third = T::one() / T::lit(3.0);
    let mut mat = CsrMatrix::zeros(space.pattern());
    let mut rhs = vec![Complex::new(T::zero(), T::zero()); space.dim()];
    for (t, (tri, geo)) in space
        .mesh()
        .triangles()
        .iter()
        .zip(space.geometry())
        .enumerate()
    {
        let a = a_n.0[t];
        let a2 = a[0] * a[0] + a[1] * a[1];
        let d: [T; 3] = std::array::from_fn(|k| a[0] * geo.grads[k][0] + a[1] * geo.grads[k][1]);
        let mut s = [[T::zero(); 3]; 3];
        for (b, w) in rule.points.iter().zip(&rule.weights) {
            let z = space.eval(psi_n, t, *b);
            let c = geo.area * *w * (z.norm_sqr() - T::one());
            for j in 0..3 {
                for k in 0..3 {
                    s[j][k] += c * b[j] * b[k];
                }
            }
        }
        for j in 0..3 {
            for k in 0..3 {
                let m = geo.area * twelfth * if j == k { T::lit(2.0) } else { T::one() };
                let grad = geo.area
                    * (geo.grads[j][0] * geo.grads[k][0] + geo.grads[j][1] * geo.grads[k][1]);
                let re = (eta / tau + a2) * m + grad / (kappa * kappa) + s[j][k];
                let im = geo.area * third * ((d[k] - d[j]) / kappa + eta * kappa * (d[k] + d[j]));
                mat.add_to(tri[j], tri[k], Complex::new(re, im));
                rhs[tri[j]] += psi_n[tri[k]] * (eta / tau * m);
            }
        }
    }
    if let Some(g) = g {
        for (r, l) in rhs.iter_mut().zip(load(space, rule, g)) {
            *r += l;
        }
    }
    if !mat.all_finite() || rhs.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("psi system"));
    }
    Ok((mat, rhs))
}

/// `G = Re[χ(ψ^n)^* (iκ⁻¹∇ψ^{n+1} + Aψ^{n+1})] − 𝐠` at every point of `rule`.
pub fn supercurrent_samples<T: Real>(
    space: &P1Space<T>,
    rule: &QuadratureRule<T>,
    psi_n: &[Complex<T>],
    psi_new: &[Complex<T>],
    a_n: &ElementVectorField<T>,
    kappa: T,
    g_vec: Option<&[[T; 2]]>,
) -> Vec<[T; 2]> {
    let nq = rule.len();
    let mut out = Vec::with_capacity(space.mesh().num_triangles() * nq);
    let i_over_k = Complex::new(T::zero(), T::one() / kappa);
    for t in 0..space.mesh().num_triangles() {
        let grad = space.grad(psi_new, t);
        let a = a_n.0[t];
        for (q, b) in rule.points.iter().enumerate() {
            let c = chi(space.eval(psi_n, t, *b)).conj();
            let w = space.eval(psi_new, t, *b);
            let mut g = [T::zero(); 2];
            for dim in 0..2 {
                g[dim] = (c * (i_over_k * grad[dim] + w * a[dim])).re;
            }
            if let Some(gv) = g_vec {
                let s = gv[t * nq + q];
                g[0] -= s[0];
                g[1] -= s[1];
            }
            out.push(g);
        }
    }
    out
}

/// Right-hand sides `(∫G·∇×φ_j, ∫G·∇φ_j)` of the `p` and `q` problems.
#[allow(clippy::too_many_arguments)]
pub fn assemble_supercurrent<T: Real>(
    space: &P1Space<T>,
    rule: &QuadratureRule<T>,
    psi_n: &[Complex<T>],
    psi_new: &[Complex<T>],
    a_n: &ElementVectorField<T>,
    kappa: T,
    g_vec: Option<&[[T; 2]]>,
) -> (Vec<T>, Vec<T>) {
    let g = supercurrent_samples(space, rule, psi_n, psi_new, a_n, kappa, g_vec);
    (load_curl(space, rule, &g), load_gradient(space, rule, &g))
}
