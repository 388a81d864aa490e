#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdgl_core::manufactured::{ExactSolution, ManufacturedCase};

/// Fourth-order central first derivative along `dir`.
pub fn d1<V: Fn([f64; 2]) -> f64>(f: &V, x: [f64; 2], dir: usize, h: f64) -> f64 {
    let at = |k: f64| {
        let mut y = x;
        y[dir] += k * h;
        f(y)
    };
    (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * h)
}

/// Fourth-order central second derivative along `dir`.
pub fn d2<V: Fn([f64; 2]) -> f64>(f: &V, x: [f64; 2], dir: usize, h: f64) -> f64 {
    let at = |k: f64| {
        let mut y = x;
        y[dir] += k * h;
        f(y)
    };
    (-at(2.0) + 16.0 * at(1.0) - 30.0 * at(0.0) + 16.0 * at(-1.0) - at(-2.0)) / (12.0 * h * h)
}

pub fn dt<V: Fn(f64) -> f64>(f: &V, t: f64, h: f64) -> f64 {
    (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
}

/// Random interior points away from the cut-off junctions and the two arms,
/// with times in `[0.1, 1]`.
pub fn sample_points(n: usize, seed: u64) -> Vec<([f64; 2], f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let r: f64 = rng.gen_range(0.02..0.4);
        if (r - 0.1).abs() < 1e-3 || 0.4 - r < 1e-3 {
            continue;
        }
        let theta: f64 = rng.gen_range(0.05..1.5 * std::f64::consts::PI - 0.05);
        let t: f64 = rng.gen_range(0.1..1.0);
        out.push(([r * theta.cos(), r * theta.sin()], t));
    }
    out
}

/// Finite-difference evaluation of the left side of the order-parameter
/// equation applied to the exact solution.
pub fn g_by_differences(c: &ManufacturedCase<f64>, x: [f64; 2], t: f64) -> C {
    let h = 1e-3 * x[0].hypot(x[1]);
    let (eta, kappa) = (c.eta, c.kappa);
    let re_psi = |y: [f64; 2]| c.psi(y, t).unwrap().re;
    let im_psi = |y: [f64; 2]| c.psi(y, t).unwrap().im;
    let psi = c.psi(x, t).unwrap();
    let dt_psi = C::new(
        dt(&|s| c.psi(x, s).unwrap().re, t, 1e-3),
        dt(&|s| c.psi(x, s).unwrap().im, t, 1e-3),
    );
    let grad: [C; 2] = std::array::from_fn(|d| C::new(d1(&re_psi, x, d, h), d1(&im_psi, x, d, h)));
    let lap = C::new(
        d2(&re_psi, x, 0, h) + d2(&re_psi, x, 1, h),
        d2(&im_psi, x, 0, h) + d2(&im_psi, x, 1, h),
    );
    let a = c.a(x, t).unwrap();
    let div_a = d1(&|y| c.a(y, t).unwrap()[0], x, 0, h) + d1(&|y| c.a(y, t).unwrap()[1], x, 1, h);
    let i = C::i();
    let a_grad = grad[0] * a[0] + grad[1] * a[1];
    let a2 = a[0] * a[0] + a[1] * a[1];
    // (iκ⁻¹∇ + A)²ψ = −Δψ/κ² + (i/κ)(ψ∇·A + 2A·∇ψ) + |A|²ψ
    let cov = -lap / (kappa * kappa) + i / kappa * (psi * div_a + 2.0 * a_grad) + psi * a2;
    eta * dt_psi + cov + (psi.norm_sqr() - 1.0) * psi - i * eta * kappa * psi * div_a
}

fn curl_a(c: &ManufacturedCase<f64>, y: [f64; 2], t: f64, h: f64) -> f64 {
    d1(&|z| c.a(z, t).unwrap()[1], y, 0, h) - d1(&|z| c.a(z, t).unwrap()[0], y, 1, h)
}

fn div_a(c: &ManufacturedCase<f64>, y: [f64; 2], t: f64, h: f64) -> f64 {
    d1(&|z| c.a(z, t).unwrap()[0], y, 0, h) + d1(&|z| c.a(z, t).unwrap()[1], y, 1, h)
}

/// `∇×(∇×A)` with both curls taken by differences.
pub fn curl_curl_a(c: &ManufacturedCase<f64>, x: [f64; 2], t: f64) -> [f64; 2] {
    let h = 1e-3 * x[0].hypot(x[1]);
    let w = |y: [f64; 2]| curl_a(c, y, t, h);
    [d1(&w, x, 1, h), -d1(&w, x, 0, h)]
}

/// `∇×f` by differences of the closed-form `f`.
pub fn curl_f(c: &ManufacturedCase<f64>, x: [f64; 2], t: f64) -> [f64; 2] {
    let h = 1e-3 * x[0].hypot(x[1]);
    let f = |y: [f64; 2]| c.exact_f(y, t).unwrap();
    [d1(&f, x, 1, h), -d1(&f, x, 0, h)]
}

/// Finite-difference evaluation of
/// `∂ₜA + ∇×∇×A − ∇(∇·A) + Re[ψ*(iκ⁻¹∇ + A)ψ] − ∇×f`.
pub fn gvec_by_differences(c: &ManufacturedCase<f64>, x: [f64; 2], t: f64) -> [f64; 2] {
    let h = 1e-3 * x[0].hypot(x[1]);
    let kappa = c.kappa;
    let dt_a: [f64; 2] = std::array::from_fn(|d| dt(&|s| c.a(x, s).unwrap()[d], t, 1e-3));
    let cc = curl_curl_a(c, x, t);
    let div = |y: [f64; 2]| div_a(c, y, t, h);
    let grad_div = [d1(&div, x, 0, h), d1(&div, x, 1, h)];
    let psi = c.psi(x, t).unwrap();
    let re_psi = |y: [f64; 2]| c.psi(y, t).unwrap().re;
    let im_psi = |y: [f64; 2]| c.psi(y, t).unwrap().im;
    let a = c.a(x, t).unwrap();
    let cf = curl_f(c, x, t);
    std::array::from_fn(|d| {
        let grad = C::new(d1(&re_psi, x, d, h), d1(&im_psi, x, d, h));
        let j = (psi.conj() * (C::i() / kappa * grad + a[d] * psi)).re;
        dt_a[d] + cc[d] - grad_div[d] + j - cf[d]
    })
}
