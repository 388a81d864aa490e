//! Structured triangulations of the L-shaped domain.
//!
//! The domain is `(-1/2, 1/2)² \ [0, 1/2) × (-1/2, 0]`: three squares of
//! side 1/2 with the reentrant corner at the origin. The two arms of the
//! reentrant corner are the segment `{y = 0, 0 ≤ x ≤ 1/2}` (polar angle 0)
//! and `{x = 0, -1/2 ≤ y ≤ 0}` (polar angle 3π/2).
//!
//! Grid cells are split along the diagonal that points away from the
//! reentrant corner: `/` in the upper-right and lower-left quadrants, `\` in
//! the upper-left quadrant. The triangulation for `2M` therefore refines the
//! one for `M` triangle by triangle.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Interior,
    BoundaryEdge,
    ConvexCorner,
    ReentrantCorner,
}

impl VertexKind {
    pub fn is_boundary(self) -> bool {
        !matches!(self, VertexKind::Interior)
    }

    pub fn is_corner(self) -> bool {
        matches!(self, VertexKind::ConvexCorner | VertexKind::ReentrantCorner)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge<T> {
    /// Endpoints in the counter-clockwise order of the owning triangle.
    pub vertices: [usize; 2],
    /// Outward unit normal.
    pub normal: [T; 2],
}

/// Conforming triangulation with boundary classification.
#[derive(Debug, Clone)]
pub struct Mesh<T> {
    vertices: Vec<[T; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge<T>>,
    vertex_kinds: Vec<VertexKind>,
    edge_count: usize,
    h: T,
}

impl<T: Real> Mesh<T> {
    /// Builds a mesh from raw vertex and triangle lists, validating
    /// orientation and deriving boundary edges and vertex kinds.
    pub fn from_parts(vertices: Vec<[T; 2]>, triangles: Vec<[usize; 3]>, h: T) -> Result<Self> {
        for (k, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {k} references a missing vertex"
                )));
            }
            let area = signed_area(&vertices, tri);
            if !(area > T::zero()) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {k} is not counter-clockwise (signed area {area:e})"
                )));
            }
        }

        // Undirected edge -> (number of owners, directed copy from the last owner).
        let mut edges: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
        for tri in &triangles {
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                let entry = edges.entry((a.min(b), a.max(b))).or_insert((0, [a, b]));
                entry.0 += 1;
                entry.1 = [a, b];
            }
        }
        let mut boundary: Vec<[usize; 2]> = Vec::new();
        for (&key, &(owners, directed)) in &edges {
            match owners {
                1 => boundary.push(directed),
                2 => {}
                _ => {
                    return Err(Error::InvalidMesh(format!(
                        "edge {key:?} shared by {owners} triangles"
                    )))
                }
            }
        }
        boundary.sort_unstable();
        let boundary_edges = boundary
            .into_iter()
            .map(|[a, b]| {
                let d = sub(vertices[b], vertices[a]);
                let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
                BoundaryEdge {
                    vertices: [a, b],
                    normal: [d[1] / len, -d[0] / len],
                }
            })
            .collect::<Vec<_>>();

        let mut angle = vec![T::zero(); vertices.len()];
        for tri in &triangles {
            for k in 0..3 {
                let p = vertices[tri[k]];
                let u = sub(vertices[tri[(k + 1) % 3]], p);
                let w = sub(vertices[tri[(k + 2) % 3]], p);
                let cross = u[0] * w[1] - u[1] * w[0];
                let dotp = u[0] * w[0] + u[1] * w[1];
                angle[tri[k]] += cross.atan2(dotp);
            }
        }
        let mut on_boundary = vec![false; vertices.len()];
        for e in &boundary_edges {
            on_boundary[e.vertices[0]] = true;
            on_boundary[e.vertices[1]] = true;
        }
        let tol = T::lit(1e-6);
        let vertex_kinds = angle
            .iter()
            .zip(&on_boundary)
            .map(|(&a, &b)| {
                if !b {
                    VertexKind::Interior
                } else if (a - T::PI()).abs() < tol {
                    VertexKind::BoundaryEdge
                } else if a < T::PI() {
                    VertexKind::ConvexCorner
                } else {
                    VertexKind::ReentrantCorner
                }
            })
            .collect();

        Ok(Mesh {
            edge_count: edges.len(),
            vertices,
            triangles,
            boundary_edges,
            vertex_kinds,
            h,
        })
    }

    pub fn vertices(&self) -> &[[T; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge<T>] {
        &self.boundary_edges
    }

    pub fn vertex_kinds(&self) -> &[VertexKind] {
        &self.vertex_kinds
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.edge_count
    }

    /// Nominal mesh size `1/M`.
    pub fn h(&self) -> T {
        self.h
    }

    pub fn triangle_area(&self, t: usize) -> T {
        signed_area(&self.vertices, &self.triangles[t])
    }

    pub fn total_area(&self) -> T {
        (0..self.num_triangles())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    pub fn triangle_points(&self, t: usize) -> [[T; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Maps barycentric coordinates on triangle `t` to a physical point.
    pub fn point_at(&self, t: usize, bary: [T; 3]) -> [T; 2] {
        let p = self.triangle_points(t);
        [
            bary[0] * p[0][0] + bary[1] * p[1][0] + bary[2] * p[2][0],
            bary[0] * p[0][1] + bary[1] * p[1][1] + bary[2] * p[2][1],
        ]
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.num_vertices())
            .filter(|&v| self.vertex_kinds[v].is_boundary())
            .collect()
    }
}

fn sub<T: Real>(a: [T; 2], b: [T; 2]) -> [T; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn signed_area<T: Real>(v: &[[T; 2]], tri: &[usize; 3]) -> T {
    let u = sub(v[tri[1]], v[tri[0]]);
    let w = sub(v[tri[2]], v[tri[0]]);
    (u[0] * w[1] - u[1] * w[0]) * T::lit(0.5)
}

#[derive(Clone, Copy)]
enum Diagonal {
    /// Lower-left to upper-right.
    Rising,
    /// Lower-right to upper-left.
    Falling,
}

fn split_cell(ll: usize, lr: usize, ur: usize, ul: usize, diag: Diagonal) -> [[usize; 3]; 2] {
    match diag {
        Diagonal::Rising => [[ll, lr, ur], [ll, ur, ul]],
        Diagonal::Falling => [[ll, lr, ul], [lr, ur, ul]],
    }
}

/// Structured triangulation of the L-shaped domain with `M` grid cells per
/// unit length (`h = 1/M`). `M` must be even so the grid hits the corner.
pub fn build_l_shape_mesh<T: Real>(m: usize) -> Result<Mesh<T>> {
    if m < 2 {
        return Err(Error::MeshParameter {
            m,
            reason: "need at least two cells per unit length",
        });
    }
    if m % 2 != 0 {
        return Err(Error::MeshParameter {
            m,
            reason: "must be even so grid lines pass through the reentrant corner",
        });
    }
    let half = m / 2;
    let removed_vertex = |i: usize, j: usize| i > half && j < half;
    let removed_cell = |i: usize, j: usize| i >= half && j < half;
    let coord = |i: usize| {
        (T::from_usize_lossy(2 * i) - T::from_usize_lossy(m)) / T::from_usize_lossy(2 * m)
    };

    let mut index = vec![usize::MAX; (m + 1) * (m + 1)];
    let mut vertices = Vec::new();
    for j in 0..=m {
        for i in 0..=m {
            if !removed_vertex(i, j) {
                index[j * (m + 1) + i] = vertices.len();
                vertices.push([coord(i), coord(j)]);
            }
        }
    }
    let id = |i: usize, j: usize| index[j * (m + 1) + i];

    let mut triangles = Vec::with_capacity(6 * half * half);
    for j in 0..m {
        for i in 0..m {
            if removed_cell(i, j) {
                continue;
            }
            let diag = if (i >= half) == (j >= half) {
                Diagonal::Rising
            } else {
                Diagonal::Falling
            };
            triangles.extend(split_cell(
                id(i, j),
                id(i + 1, j),
                id(i + 1, j + 1),
                id(i, j + 1),
                diag,
            ));
        }
    }
    Mesh::from_parts(vertices, triangles, T::one() / T::from_usize_lossy(m))
}

/// Structured triangulation of the unit square `[0, 1]²` with `/` diagonals.
pub fn build_unit_square_mesh<T: Real>(m: usize) -> Result<Mesh<T>> {
    if m == 0 {
        return Err(Error::MeshParameter {
            m,
            reason: "need at least one cell",
        });
    }
    let coord = |i: usize| T::from_usize_lossy(i) / T::from_usize_lossy(m);
    let mut vertices = Vec::with_capacity((m + 1) * (m + 1));
    for j in 0..=m {
        for i in 0..=m {
            vertices.push([coord(i), coord(j)]);
        }
    }
    let id = |i: usize, j: usize| j * (m + 1) + i;
    let mut triangles = Vec::with_capacity(2 * m * m);
    for j in 0..m {
        for i in 0..m {
            triangles.extend(split_cell(
                id(i, j),
                id(i + 1, j),
                id(i + 1, j + 1),
                id(i, j + 1),
                Diagonal::Rising,
            ));
        }
    }
    Mesh::from_parts(vertices, triangles, T::one() / T::from_usize_lossy(m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Which Cartesian components of a nodal vector field are fixed to zero by
/// the condition `A·n = 0` at a boundary vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalConstraint {
    Component(Axis),
    Both,
}

#[derive(Debug, Clone)]
pub struct BoundaryTables {
    /// All boundary vertices, ascending.
    pub dirichlet: Vec<usize>,
    /// Normal-component constraints, ascending by vertex.
    pub normal_constraints: Vec<(usize, NormalConstraint)>,
}

/// Derives the Dirichlet vertex set and the `A·n = 0` constraint table.
/// Only axis-aligned boundaries are supported for the normal constraints.
pub fn classify_boundary<T: Real>(mesh: &Mesh<T>) -> Result<BoundaryTables> {
    let mut normals: Vec<Vec<[T; 2]>> = vec![Vec::new(); mesh.num_vertices()];
    for e in mesh.boundary_edges() {
        for &v in &e.vertices {
            normals[v].push(e.normal);
        }
    }
    let dirichlet = mesh.boundary_vertices();
    let tol = T::lit(1e-12);
    let mut normal_constraints = Vec::with_capacity(dirichlet.len());
    for &v in &dirichlet {
        let c = if mesh.vertex_kinds()[v].is_corner() {
            NormalConstraint::Both
        } else {
            let n = normals[v][0];
            if n[1].abs() < tol {
                NormalConstraint::Component(Axis::X)
            } else if n[0].abs() < tol {
                NormalConstraint::Component(Axis::Y)
            } else {
                return Err(Error::InvalidMesh(format!(
                    "boundary normal at vertex {v} is not axis aligned"
                )));
            }
        };
        normal_constraints.push((v, c));
    }
    Ok(BoundaryTables {
        dirichlet,
        normal_constraints,
    })
}

/// Bucket grid for locating the triangle that contains a point.
pub struct PointLocator<'a, T> {
    mesh: &'a Mesh<T>,
    origin: [T; 2],
    cell: T,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl<'a, T: Real> PointLocator<'a, T> {
    pub fn new(mesh: &'a Mesh<T>) -> Self {
        let mut lo = [T::infinity(); 2];
        let mut hi = [T::neg_infinity(); 2];
        for p in mesh.vertices() {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let cell = mesh.h();
        let count = |k: usize| {
            ((hi[k] - lo[k]) / cell)
                .ceil()
                .to_usize()
                .unwrap_or(0)
                .max(1)
        };
        let (nx, ny) = (count(0), count(1));
        let mut locator = PointLocator {
            mesh,
            origin: lo,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        let pad = cell * T::lit(1e-9);
        for t in 0..mesh.num_triangles() {
            let pts = mesh.triangle_points(t);
            let mut blo = [T::infinity(); 2];
            let mut bhi = [T::neg_infinity(); 2];
            for p in &pts {
                for k in 0..2 {
                    blo[k] = blo[k].min(p[k] - pad);
                    bhi[k] = bhi[k].max(p[k] + pad);
                }
            }
            let (i0, j0) = locator.bucket_of(blo);
            let (i1, j1) = locator.bucket_of(bhi);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    locator.buckets[j * nx + i].push(t);
                }
            }
        }
        locator
    }

    fn bucket_of(&self, p: [T; 2]) -> (usize, usize) {
        let idx = |k: usize, n: usize| {
            let s = ((p[k] - self.origin[k]) / self.cell).floor();
            if s <= T::zero() {
                0
            } else {
                s.to_usize().unwrap_or(0).min(n - 1)
            }
        };
        (idx(0, self.nx), idx(1, self.ny))
    }

    /// Returns the containing triangle and the barycentric coordinates of
    /// `p`, or `None` when `p` is outside the mesh.
    pub fn locate(&self, p: [T; 2]) -> Option<(usize, [T; 3])> {
        let (i, j) = self.bucket_of(p);
        let mut best: Option<(usize, [T; 3], T)> = None;
        for &t in &self.buckets[j * self.nx + i] {
            let b = barycentric(&self.mesh.triangle_points(t), p);
            let worst = b[0].min(b[1]).min(b[2]);
            if best.map_or(true, |(_, _, w)| worst > w) {
                best = Some((t, b, worst));
            }
        }
        match best {
            Some((t, b, w)) if w >= T::lit(-1e-10) => Some((t, b)),
            _ => None,
        }
    }
}

pub fn barycentric<T: Real>(tri: &[[T; 2]; 3], p: [T; 2]) -> [T; 3] {
    let [a, b, c] = *tri;
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
    let l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
    [T::one() - l1 - l2, l1, l2]
}
