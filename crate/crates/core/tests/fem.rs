use proptest::prelude::*;
use tdgl_core::fem::{
    curl_field, gradient_field, load, load_gradient, stiffness, P1Space, QuadratureRule,
};
use tdgl_core::mesh::{build_l_shape_mesh, build_unit_square_mesh};
use tdgl_core::metrics::{convergence_rate, l2_error_scalar};
use tdgl_core::sparse::{apply_dirichlet, cg_solve, IterativeOptions};

fn poisson_error(m: usize) -> f64 {
    use std::f64::consts::PI;
    let exact = |x: [f64; 2]| (PI * x[0]).sin() * (PI * x[1]).sin();
    let s = P1Space::new(build_unit_square_mesh(m).unwrap());
    let rule = QuadratureRule::degree4();
    let f = s.sample(&rule, |_, x| 2.0 * PI * PI * exact(x));
    let b = load(&s, &rule, &f);
    let k = stiffness(&s);
    let nodes = s.mesh().boundary_vertices();
    let zeros = vec![0.0; nodes.len()];
    let (red, a, rhs) = apply_dirichlet(&k, &b, &nodes, &zeros);
    let (x, _) = cg_solve(&a, &rhs, &IterativeOptions::with_tol(1e-12)).unwrap();
    let u = red.extend(&x, Some(&vec![0.0; s.dim()]));
    l2_error_scalar(&s, &u, exact)
}

#[test]
fn poisson_on_unit_square_converges_at_second_order() {
    let r1 = convergence_rate(poisson_error(8), poisson_error(16)).unwrap();
    let r2 = convergence_rate(poisson_error(16), poisson_error(32)).unwrap();
    assert!(
        (r1 - 2.0).abs() <= 0.1 && (r2 - 2.0).abs() <= 0.1,
        "{r1} {r2}"
    );
}

#[test]
fn constant_current_gradient_load_matches_dense_oracle() {
    let s = P1Space::new(build_l_shape_mesh::<f64>(8).unwrap());
    let rule = QuadratureRule::degree4();
    let g = [0.4, -0.9];
    let b = load_gradient(&s, &rule, &vec![g; s.mesh().num_triangles() * rule.len()]);
    // per-element closed form: |T| G·∇λ_j with λ_j from a dense 3x3 inverse
    let mut oracle = vec![0.0; s.dim()];
    for (t, tri) in s.mesh().triangles().iter().enumerate() {
        let p = s.mesh().triangle_points(t);
        let m = nalgebra::Matrix3::new(
            1.0, p[0][0], p[0][1], 1.0, p[1][0], p[1][1], 1.0, p[2][0], p[2][1],
        );
        let inv = m.try_inverse().unwrap();
        let area = 0.5 * m.determinant().abs();
        for j in 0..3 {
            oracle[tri[j]] += area * (g[0] * inv[(1, j)] + g[1] * inv[(2, j)]);
        }
    }
    for (x, y) in b.iter().zip(&oracle) {
        assert!((x - y).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn curl_of_dirichlet_field_is_orthogonal_to_gradients(
        seed in 0u64..10_000,
        m in prop::sample::select(vec![4usize, 8, 12]),
    ) {
        let s = P1Space::new(build_l_shape_mesh::<f64>(m).unwrap());
        let boundary = s.mesh().boundary_vertices();
        let mut u: Vec<f64> = (0..s.dim()).map(|i| (((i as u64 + seed) * 2654435761) % 1000) as f64 / 500.0 - 1.0).collect();
        for b in boundary {
            u[b] = 0.0;
        }
        let z: Vec<f64> = (0..s.dim()).map(|i| (((i as u64 * 7 + seed) * 40503) % 997) as f64 / 498.5 - 1.0).collect();
        let cu = curl_field(&s, &u);
        let gz = gradient_field(&s, &z);
        let total: f64 = cu.0.iter().zip(&gz.0).zip(s.geometry()).map(|((a, b), e)| e.area * (a[0] * b[0] + a[1] * b[1])).sum();
        prop_assert!(total.abs() <= 1e-12);
    }
}
