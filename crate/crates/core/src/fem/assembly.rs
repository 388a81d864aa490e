use super::{P1Space, QuadratureRule};
use crate::scalar::{Real, Scalar};
use crate::sparse::CsrMatrix;

/// `M_jk = ∫ φ_k φ_j`, from the closed-form element matrix
/// `|T|/12 · [2 1 1; 1 2 1; 1 1 2]`.
pub fn mass<T: Real>(space: &P1Space<T>) -> CsrMatrix<T> {
    let mut m = CsrMatrix::zeros(space.pattern());
    for (tri, g) in space.mesh().triangles().iter().zip(space.geometry()) {
        let off = g.area / T::lit(12.0);
        for j in 0..3 {
            for k in 0..3 {
                m.add_to(tri[j], tri[k], if j == k { off + off } else { off });
            }
        }
    }
    m
}

/// `K_jk = ∫ ∇φ_k · ∇φ_j`.
pub fn stiffness<T: Real>(space: &P1Space<T>) -> CsrMatrix<T> {
    let mut m = CsrMatrix::zeros(space.pattern());
    for (tri, g) in space.mesh().triangles().iter().zip(space.geometry()) {
        for j in 0..3 {
            for k in 0..3 {
                let v = g.area * (g.grads[j][0] * g.grads[k][0] + g.grads[j][1] * g.grads[k][1]);
                m.add_to(tri[j], tri[k], v);
            }
        }
    }
    m
}

/// `∫ w φ_k φ_j` for a weight sampled at the points of `rule`.
pub fn weighted_mass<T: Real>(
    space: &P1Space<T>,
    rule: &QuadratureRule<T>,
    weight: &[T],
) -> CsrMatrix<T> {
    let nq = rule.len();
    let mut m = CsrMatrix::zeros(space.pattern());
    for (t, (tri, g)) in space
        .mesh()
        .triangles()
        .iter()
        .zip(space.geometry())
        .enumerate()
    {
        let mut local = [[T::zero(); 3]; 3];
        for (q, (b, w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let c = g.area * *w * weight[t * nq + q];
            for j in 0..3 {
                for k in 0..3 {
                    local[j][k] += c * b[j] * b[k];
                }
            }
        }
        for j in 0..3 {
            for k in 0..3 {
                m.add_to(tri[j], tri[k], local[j][k]);
            }
        }
    }
    m
}

/// `b_j = ∫ f φ_j` for `f` sampled at the points of `rule`.
pub fn load<T: Real, S: Scalar<Real = T>>(
    space: &P1Space<T>,
    rule: &QuadratureRule<T>,
    samples: &[S],
) -> Vec<S> {
    let nq = rule.len();
    let mut b = vec![S::zero(); space.dim()];
    for (t, (tri, g)) in space
        .mesh()
        .triangles()
        .iter()
        .zip(space.geometry())
        .enumerate()
    {
        for (q, (p, w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let f = samples[t * nq + q] * S::from_real(g.area * *w);
            for j in 0..3 {
                b[tri[j]] += f * S::from_real(p[j]);
            }
        }
    }
    b
}

fn vector_load<T: Real>(
    space: &P1Space<T>,
    rule: &QuadratureRule<T>,
    samples: &[[T; 2]],
    test: impl Fn(&super::ElementGeometry<T>, usize) -> [T; 2],
) -> Vec<T> {
    let nq = rule.len();
    let mut b = vec![T::zero(); space.dim()];
    for (t, (tri, g)) in space
        .mesh()
        .triangles()
        .iter()
        .zip(space.geometry())
        .enumerate()
    {
        // the test functions have constant gradients, so only ∫G is needed
        let mut mean = [T::zero(); 2];
        for (q, w) in rule.weights.iter().enumerate() {
            let s = samples[t * nq + q];
            mean[0] += *w * s[0];
            mean[1] += *w * s[1];
        }
        for j in 0..3 {
            let d = test(g, j);
            b[tri[j]] += g.area * (mean[0] * d[0] + mean[1] * d[1]);
        }
    }
    b
}

/// `b_j = ∫ G · ∇φ_j`.
pub fn load_gradient<T: Real>(
    space: &P1Space<T>,
    rule: &QuadratureRule<T>,
    samples: &[[T; 2]],
) -> Vec<T> {
    vector_load(space, rule, samples, |g, j| g.grads[j])
}

/// `b_j = ∫ G · ∇×φ_j` with `∇×φ = (∂₂φ, −∂₁φ)`.
pub fn load_curl<T: Real>(
    space: &P1Space<T>,
    rule: &QuadratureRule<T>,
    samples: &[[T; 2]],
) -> Vec<T> {
    vector_load(space, rule, samples, |g, j| g.curl(j))
}
