mod common;

use common::*;
use tdgl_core::manufactured::{polar, ExactSolution, Forcing, ManufacturedCase};

fn case() -> ManufacturedCase<f64> {
    ManufacturedCase::new().unwrap()
}

#[test]
fn upsilon_hermite_conditions() {
    let c = case();
    let a = c.upsilon(0.1);
    let b = c.upsilon(0.4);
    assert!((a[0] - 0.1).abs() < 1e-11);
    for k in 1..4 {
        assert!(a[k].abs() < 1e-11, "Υ^({k})(0.1) = {:e}", a[k]);
    }
    for k in 0..4 {
        assert!(b[k].abs() < 1e-11, "Υ^({k})(0.4) = {:e}", b[k]);
    }
}

#[test]
fn upsilon_midpoint_matches_independent_solve() {
    // monomial basis in r itself, solved by a separate dense LU
    let mut m = nalgebra::DMatrix::<f64>::zeros(8, 8);
    let mut rhs = nalgebra::DVector::<f64>::zeros(8);
    for (block, (r0, v)) in [(0.1f64, 0.1), (0.4, 0.0)].into_iter().enumerate() {
        for k in 0..4 {
            for i in k..8 {
                let falling: f64 = (0..k).map(|j| (i - j) as f64).product();
                m[(4 * block + k, i)] = falling * r0.powi((i - k) as i32);
            }
            if k == 0 {
                rhs[4 * block] = v;
            }
        }
    }
    let coeffs = m.lu().solve(&rhs).unwrap();
    let oracle: f64 = (0..8).map(|i| coeffs[i] * 0.25f64.powi(i as i32)).sum();
    let c = case();
    assert!(
        (c.phi(0.25) - oracle).abs() < 1e-9,
        "{} vs {}",
        c.phi(0.25),
        oracle
    );
    // symmetric Hermite data put the midpoint at half the plateau height
    assert!((c.phi(0.25) - 0.05).abs() < 1e-14);
}

#[test]
fn cutoff_derivatives_match_differences() {
    let c = case();
    for r in [0.13, 0.2, 0.27, 0.33, 0.39] {
        let d = c.phi_derivs(r);
        let h = 1e-4;
        for k in 1..4 {
            let fd = (-c.phi_derivs(r + 2.0 * h)[k - 1] + 8.0 * c.phi_derivs(r + h)[k - 1]
                - 8.0 * c.phi_derivs(r - h)[k - 1]
                + c.phi_derivs(r - 2.0 * h)[k - 1])
                / (12.0 * h);
            assert!(
                (fd - d[k]).abs() <= 1e-6 * (d[k].abs() + 1.0),
                "k={k} r={r}"
            );
        }
    }
}

#[test]
fn closed_form_derivatives_match_differences() {
    let c = case();
    for (x, t) in sample_points(200, 17) {
        let h = 1e-3 * x[0].hypot(x[1]);
        let grad = c.exact_grad_psi(x, t).unwrap();
        let psi = |y: [f64; 2]| c.psi(y, t).unwrap().re;
        let div = c.exact_div_a(x, t).unwrap();
        let fd_div =
            d1(&|y| c.a(y, t).unwrap()[0], x, 0, h) + d1(&|y| c.a(y, t).unwrap()[1], x, 1, h);
        let f = c.exact_f(x, t).unwrap();
        let fd_f =
            d1(&|y| c.a(y, t).unwrap()[1], x, 0, h) - d1(&|y| c.a(y, t).unwrap()[0], x, 1, h);
        for d in 0..2 {
            let fd = d1(&psi, x, d, h);
            assert!((fd - grad[d]).abs() <= 1e-6 * (grad[d].abs() + 1e-3));
        }
        assert!((fd_div - div).abs() <= 1e-6 * (div.abs() + 1e-3));
        assert!((fd_f - f).abs() <= 1e-6 * (f.abs() + 1e-3));
    }
}

#[test]
fn forcing_matches_difference_oracle() {
    let c = case();
    for (x, t) in sample_points(200, 29) {
        let s = c.sources(x, t).unwrap();
        let g = g_by_differences(&c, x, t);
        assert!(
            (s.g - g).norm() <= 1e-6 * (g.norm() + 1e-3),
            "g at {x:?}: {} vs {}",
            s.g,
            g
        );
        let gv = gvec_by_differences(&c, x, t);
        let err = (s.gvec[0] - gv[0]).hypot(s.gvec[1] - gv[1]);
        assert!(err <= 1e-6 * (gv[0].hypot(gv[1]) + 1e-3), "gvec at {x:?}");
    }
}

#[test]
fn curl_of_curl_matches_curl_of_f() {
    let c = case();
    for (x, t) in sample_points(50, 41) {
        let cc = curl_curl_a(&c, x, t);
        let cf = curl_f(&c, x, t);
        // second derivatives of A are naturally of size |A|/r²
        let a = c.a(x, t).unwrap();
        let r2 = x[0] * x[0] + x[1] * x[1];
        let scale = cf[0].hypot(cf[1]) + a[0].hypot(a[1]) / r2;
        assert!(
            (cc[0] - cf[0]).hypot(cc[1] - cf[1]) <= 1e-8 * scale,
            "at {x:?}"
        );
    }
}

#[test]
fn boundary_compatibility() {
    let c = case();
    for k in 1..=50 {
        let s = 0.5 * k as f64 / 51.0;
        // lower arm (θ = 0): outward normal (0, −1)
        let x = [s, 0.0];
        assert!(c.exact_grad_psi(x, 1.0).unwrap()[1].abs() < 1e-10);
        assert!(c.a(x, 1.0).unwrap()[1].abs() < 1e-10);
        // left arm (θ = 3π/2): outward normal (1, 0)
        let x = [0.0, -s];
        assert!(c.exact_grad_psi(x, 1.0).unwrap()[0].abs() < 1e-10);
        assert!(c.a(x, 1.0).unwrap()[0].abs() < 1e-10);
        assert!((polar(x).unwrap().1 - 1.5 * std::f64::consts::PI).abs() < 1e-15);
    }
}
