//! Continuous piecewise-linear elements on triangles: geometry cache,
//! quadrature, and assembly of every bilinear form and load functional used
//! by the time-stepping schemes.

mod assembly;
mod psi;
mod quadrature;

use rayon::prelude::*;

use crate::mesh::Mesh;
use crate::scalar::{Real, Scalar};
use crate::sparse::SparsityPattern;

pub use assembly::{load, load_curl, load_gradient, mass, stiffness, weighted_mass};
pub use psi::{assemble_psi_system, assemble_supercurrent, chi, supercurrent_samples, PsiParams};
pub use quadrature::QuadratureRule;

/// Area and constant barycentric gradients of one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry<T> {
    pub area: T,
    pub grads: [[T; 2]; 3],
}

impl<T: Real> ElementGeometry<T> {
    pub fn new(p: [[T; 2]; 3]) -> Self {
        let det =
            (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let grads = [
            [(p[1][1] - p[2][1]) / det, (p[2][0] - p[1][0]) / det],
            [(p[2][1] - p[0][1]) / det, (p[0][0] - p[2][0]) / det],
            [(p[0][1] - p[1][1]) / det, (p[1][0] - p[0][0]) / det],
        ];
        ElementGeometry {
            area: det * T::lit(0.5),
            grads,
        }
    }

    /// Rotated gradient `(∂₂λ, −∂₁λ)` of barycentric function `k`.
    #[inline]
    pub fn curl(&self, k: usize) -> [T; 2] {
        [self.grads[k][1], -self.grads[k][0]]
    }
}

/// P1 space over an owned mesh.
#[derive(Debug, Clone)]
pub struct P1Space<T> {
    mesh: Mesh<T>,
    geometry: Vec<ElementGeometry<T>>,
    pattern: SparsityPattern,
}

impl<T: Real> P1Space<T> {
    pub fn new(mesh: Mesh<T>) -> Self {
        let geometry = (0..mesh.num_triangles())
            .map(|t| ElementGeometry::new(mesh.triangle_points(t)))
            .collect();
        let mut rows = vec![Vec::new(); mesh.num_vertices()];
        for tri in mesh.triangles() {
            for &a in tri {
                rows[a].extend_from_slice(tri);
            }
        }
        let pattern = SparsityPattern::from_rows(rows);
        P1Space {
            mesh,
            geometry,
            pattern,
        }
    }

    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    pub fn geometry(&self) -> &[ElementGeometry<T>] {
        &self.geometry
    }

    pub fn pattern(&self) -> &SparsityPattern {
        &self.pattern
    }

    pub fn dim(&self) -> usize {
        self.mesh.num_vertices()
    }

    /// Nodal (Lagrange) interpolant.
    pub fn interpolate<S: Scalar<Real = T>>(&self, f: impl Fn([T; 2]) -> S) -> Vec<S> {
        self.mesh.vertices().iter().map(|&x| f(x)).collect()
    }

    /// Evaluates `f(triangle, point)` at every quadrature point, triangle
    /// major. Evaluation runs in parallel; the result order is fixed.
    pub fn sample<V: Send>(
        &self,
        rule: &QuadratureRule<T>,
        f: impl Fn(usize, [T; 2]) -> V + Sync,
    ) -> Vec<V> {
        (0..self.mesh.num_triangles())
            .into_par_iter()
            .flat_map_iter(|t| {
                let f = &f;
                rule.points
                    .iter()
                    .map(move |&b| f(t, self.mesh.point_at(t, b)))
            })
            .collect()
    }

    /// Value of a nodal field at barycentric point `bary` of triangle `t`.
    #[inline]
    pub fn eval<S: Scalar<Real = T>>(&self, coeffs: &[S], t: usize, bary: [T; 3]) -> S {
        let tri = self.mesh.triangles()[t];
        coeffs[tri[0]] * S::from_real(bary[0])
            + coeffs[tri[1]] * S::from_real(bary[1])
            + coeffs[tri[2]] * S::from_real(bary[2])
    }

    /// Constant gradient of a nodal field on triangle `t`.
    #[inline]
    pub fn grad<S: Scalar<Real = T>>(&self, coeffs: &[S], t: usize) -> [S; 2] {
        let tri = self.mesh.triangles()[t];
        let g = &self.geometry[t].grads;
        let mut out = [S::zero(); 2];
        for k in 0..3 {
            for d in 0..2 {
                out[d] += coeffs[tri[k]] * S::from_real(g[k][d]);
            }
        }
        out
    }

    /// `‖f‖_{L²}` of a nodal field (exact for P1).
    pub fn l2_norm<S: Scalar<Real = T>>(&self, coeffs: &[S]) -> T {
        let mut acc = T::zero();
        for (t, tri) in self.mesh.triangles().iter().enumerate() {
            let area = self.geometry[t].area;
            let c = [coeffs[tri[0]], coeffs[tri[1]], coeffs[tri[2]]];
            let diag: T = c.iter().map(|v| v.modulus_sqr()).sum();
            let sum = c[0] + c[1] + c[2];
            // ∫|Σ cᵢλᵢ|² = area/12 · (Σ|cᵢ|² + |Σ cᵢ|²)
            acc += area / T::lit(12.0) * (diag + sum.modulus_sqr());
        }
        acc.sqrt()
    }

    /// `‖∇f‖_{L²}` of a nodal field.
    pub fn grad_l2_norm<S: Scalar<Real = T>>(&self, coeffs: &[S]) -> T {
        let mut acc = T::zero();
        for t in 0..self.mesh.num_triangles() {
            let g = self.grad(coeffs, t);
            acc += self.geometry[t].area * (g[0].modulus_sqr() + g[1].modulus_sqr());
        }
        acc.sqrt()
    }

    /// Mass-weighted mean `∫f / |Ω|`.
    pub fn mean<S: Scalar<Real = T>>(&self, coeffs: &[S]) -> S {
        let mut total = S::zero();
        let mut area = T::zero();
        for (t, tri) in self.mesh.triangles().iter().enumerate() {
            let a = self.geometry[t].area;
            total +=
                (coeffs[tri[0]] + coeffs[tri[1]] + coeffs[tri[2]]) * S::from_real(a / T::lit(3.0));
            area += a;
        }
        total * S::from_real(T::one() / area)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Psi,
    P,
    Q,
    U,
    V,
    Generic,
}

impl FieldKind {
    /// `p` and `u` vanish on the boundary.
    pub fn is_dirichlet(self) -> bool {
        matches!(self, FieldKind::P | FieldKind::U)
    }
}

/// Nodal coefficients of a P1 field.
#[derive(Debug, Clone, PartialEq)]
pub struct FeField<S> {
    pub kind: FieldKind,
    pub coeffs: Vec<S>,
}

impl<S: Scalar> FeField<S> {
    pub fn new(kind: FieldKind, coeffs: Vec<S>) -> Self {
        FeField { kind, coeffs }
    }

    pub fn zeros(kind: FieldKind, n: usize) -> Self {
        FeField {
            kind,
            coeffs: vec![S::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Piecewise-constant 2-vector field, one value per triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementVectorField<T>(pub Vec<[T; 2]>);

impl<T: Real> ElementVectorField<T> {
    pub fn zeros(num_triangles: usize) -> Self {
        ElementVectorField(vec![[T::zero(); 2]; num_triangles])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Elementwise sum.
    pub fn add(&self, other: &Self) -> Self {
        ElementVectorField(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| [a[0] + b[0], a[1] + b[1]])
                .collect(),
        )
    }

    pub fn l2_norm(&self, space: &P1Space<T>) -> T {
        self.0
            .iter()
            .zip(space.geometry())
            .map(|(v, g)| g.area * (v[0] * v[0] + v[1] * v[1]))
            .sum::<T>()
            .sqrt()
    }
}

/// Elementwise gradient of a real nodal field.
pub fn gradient_field<T: Real>(space: &P1Space<T>, f: &[T]) -> ElementVectorField<T> {
    ElementVectorField(
        (0..space.mesh().num_triangles())
            .map(|t| space.grad(f, t))
            .collect(),
    )
}

/// Elementwise `∇×f = (∂₂f, −∂₁f)` of a real nodal field.
pub fn curl_field<T: Real>(space: &P1Space<T>, f: &[T]) -> ElementVectorField<T> {
    ElementVectorField(
        (0..space.mesh().num_triangles())
            .map(|t| {
                let g = space.grad(f, t);
                [g[1], -g[0]]
            })
            .collect(),
    )
}
