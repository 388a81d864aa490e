//! Exact solution on the L-shaped domain and the forcing it induces.
//!
//! With `s = t²`, `Φ` the radial cut-off and `c = cos(2θ/3)`, `σ = sin(2θ/3)`:
//!
//! * `ψ = s R c` with `R = Φ r^{2/3}`,
//! * `A = s F (cos(θ/3), sin(θ/3))` with `F = (4/3)Φ r^{-1/3} + Φ' r^{2/3}`,
//!   so that in the polar frame `A = s F (c, −σ)`,
//! * `∇·A = s W c` and `f = ∇×A = −s W σ` with `W = Φ'' r^{2/3} + (7/3)Φ' r^{-1/3}`.
//!
//! `Φ` is constant on `r < 0.1`, so `W` vanishes near the corner and every
//! forcing term is bounded.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fem::{P1Space, QuadratureRule};
use crate::scalar::Real;
use crate::sparse::dense_lu_solve;

const R_INNER: f64 = 0.1;
const R_OUTER: f64 = 0.4;
const PHI_CORE: f64 = 0.1;

/// Polar coordinates with `θ ∈ [0, 3π/2]`, measured from the positive
/// `x`-axis through the upper half plane to the negative `y`-axis.
/// Points inside the removed quadrant are rejected.
pub fn polar<T: Real>(x: [T; 2]) -> Result<(T, T)> {
    let r = x[0].hypot(x[1]);
    let mut theta = x[1].atan2(x[0]);
    let two_pi = T::TAU();
    if theta < T::zero() {
        theta += two_pi;
    }
    let max = T::lit(1.5) * T::PI();
    if theta > max {
        // within rounding of the lower arm y = 0, x > 0
        let slack = T::epsilon() * T::lit(64.0);
        if two_pi - theta <= slack {
            theta = T::zero();
        } else if theta - max <= slack {
            theta = max;
        } else {
            return Err(Error::OutsideDomain {
                x: x[0].to_f64_lossy(),
                y: x[1].to_f64_lossy(),
            });
        }
    }
    Ok((r, theta))
}

/// Forcing values at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sources<T> {
    pub g: Complex<T>,
    pub gvec: [T; 2],
    pub f: T,
}

/// Right-hand sides of the two evolution equations.
pub trait Forcing<T: Real>: Sync {
    fn sources(&self, x: [T; 2], t: T) -> Result<Sources<T>>;
}

/// Closed-form solution used for error measurement.
pub trait ExactSolution<T: Real>: Sync {
    fn psi(&self, x: [T; 2], t: T) -> Result<Complex<T>>;
    fn a(&self, x: [T; 2], t: T) -> Result<[T; 2]>;
}

/// Homogeneous problem.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroForcing;

impl<T: Real> Forcing<T> for ZeroForcing {
    fn sources(&self, _: [T; 2], _: T) -> Result<Sources<T>> {
        Ok(Sources {
            g: Complex::new(T::zero(), T::zero()),
            gvec: [T::zero(); 2],
            f: T::zero(),
        })
    }
}

/// Forcing sampled at every quadrature point of a mesh, triangle major.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadSamples<T> {
    pub g: Vec<Complex<T>>,
    pub gvec: Vec<[T; 2]>,
    pub f: Vec<T>,
}

impl<T: Real> QuadSamples<T> {
    pub fn sample(
        space: &P1Space<T>,
        rule: &QuadratureRule<T>,
        forcing: &dyn Forcing<T>,
        t: T,
    ) -> Result<Self> {
        let values = space.sample(rule, |_, x| forcing.sources(x, t));
        let n = values.len();
        let mut out = QuadSamples {
            g: Vec::with_capacity(n),
            gvec: Vec::with_capacity(n),
            f: Vec::with_capacity(n),
        };
        for v in values {
            let v = v?;
            out.g.push(v.g);
            out.gvec.push(v.gvec);
            out.f.push(v.f);
        }
        Ok(out)
    }
}

/// Radial profile data at one radius.
#[derive(Debug, Clone, Copy)]
struct Radial<T> {
    /// `R, R', R''`
    rr: [T; 3],
    f: T,
    /// `W, W'`
    w: [T; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedCase<T> {
    pub eta: T,
    pub kappa: T,
    upsilon: [T; 8],
}

impl<T: Real> ManufacturedCase<T> {
    pub fn new() -> Result<Self> {
        Ok(ManufacturedCase {
            eta: T::one(),
            kappa: T::lit(10.0),
            upsilon: upsilon_coeffs()?,
        })
    }

    /// Coefficients of `Υ` in the scaled variable `s = (r − 0.1)/0.3`,
    /// lowest degree first.
    pub fn upsilon_coeffs(&self) -> [T; 8] {
        self.upsilon
    }

    /// `[Υ, Υ', Υ'', Υ''']` at `r` (derivatives with respect to `r`).
    pub fn upsilon(&self, r: T) -> [T; 4] {
        let width = T::lit(R_OUTER - R_INNER);
        let s = (r - T::lit(R_INNER)) / width;
        let mut d = [T::zero(); 4];
        for (k, dk) in d.iter_mut().enumerate() {
            // Horner on the k-th derivative polynomial
            let mut acc = T::zero();
            for i in (k..8).rev() {
                let falling: f64 = (0..k).map(|j| (i - j) as f64).product();
                acc = acc * s + self.upsilon[i] * T::lit(falling);
            }
            *dk = acc / width.powi(k as i32);
        }
        d
    }

    /// `[Φ, Φ', Φ'', Φ''']` at `r ≥ 0`.
    pub fn phi_derivs(&self, r: T) -> [T; 4] {
        if r < T::lit(R_INNER) {
            [T::lit(PHI_CORE), T::zero(), T::zero(), T::zero()]
        } else if r <= T::lit(R_OUTER) {
            self.upsilon(r)
        } else {
            [T::zero(); 4]
        }
    }

    pub fn phi(&self, r: T) -> T {
        self.phi_derivs(r)[0]
    }

    pub fn dphi(&self, r: T) -> T {
        self.phi_derivs(r)[1]
    }

    pub fn d2phi(&self, r: T) -> T {
        self.phi_derivs(r)[2]
    }

    fn radial(&self, r: T) -> Radial<T> {
        let [p0, p1, p2, p3] = self.phi_derivs(r);
        let third = T::one() / T::lit(3.0);
        let r23 = r.powf(T::lit(2.0) * third);
        let rm13 = r23 / r;
        let rm43 = rm13 / r;
        let rr = [
            p0 * r23,
            p1 * r23 + T::lit(2.0) * third * p0 * rm13,
            p2 * r23 + T::lit(4.0) * third * p1 * rm13 - T::lit(2.0 / 9.0) * p0 * rm43,
        ];
        let f = T::lit(4.0) * third * p0 * rm13 + p1 * r23;
        let w = [
            p2 * r23 + T::lit(7.0) * third * p1 * rm13,
            p3 * r23 + T::lit(3.0) * p2 * rm13 - T::lit(7.0 / 9.0) * p1 * rm43,
        ];
        Radial { rr, f, w }
    }

    /// Curl `f = ∇×A` of the exact vector potential.
    pub fn exact_f(&self, x: [T; 2], t: T) -> Result<T> {
        let (r, theta) = polar(x)?;
        let rad = self.radial(r);
        Ok(-t * t * rad.w[0] * (T::lit(2.0) * theta / T::lit(3.0)).sin())
    }

    /// Divergence `∇·A` of the exact vector potential.
    pub fn exact_div_a(&self, x: [T; 2], t: T) -> Result<T> {
        let (r, theta) = polar(x)?;
        let rad = self.radial(r);
        Ok(t * t * rad.w[0] * (T::lit(2.0) * theta / T::lit(3.0)).cos())
    }

    /// `∇ψ` of the exact order parameter (real valued).
    pub fn exact_grad_psi(&self, x: [T; 2], t: T) -> Result<[T; 2]> {
        let (r, theta) = polar(x)?;
        let rad = self.radial(r);
        let (sn, cs) = (T::lit(2.0) * theta / T::lit(3.0)).sin_cos();
        let s = t * t;
        let er = s * rad.rr[1] * cs;
        let et = -T::lit(2.0 / 3.0) * s * rad.rr[0] / r * sn;
        Ok(to_cartesian(er, et, theta))
    }
}

impl<T: Real> ExactSolution<T> for ManufacturedCase<T> {
    fn psi(&self, x: [T; 2], t: T) -> Result<Complex<T>> {
        let (r, theta) = polar(x)?;
        let rad = self.radial(r);
        Ok(Complex::new(
            t * t * rad.rr[0] * (T::lit(2.0) * theta / T::lit(3.0)).cos(),
            T::zero(),
        ))
    }

    fn a(&self, x: [T; 2], t: T) -> Result<[T; 2]> {
        let (r, theta) = polar(x)?;
        let rad = self.radial(r);
        let (sn, cs) = (theta / T::lit(3.0)).sin_cos();
        let m = t * t * rad.f;
        Ok([m * cs, m * sn])
    }
}

impl<T: Real> Forcing<T> for ManufacturedCase<T> {
    fn sources(&self, x: [T; 2], t: T) -> Result<Sources<T>> {
        let (r, theta) = polar(x)?;
        let Radial {
            rr: [r0, r1, r2],
            f,
            w: [w0, w1],
        } = self.radial(r);
        let two = T::lit(2.0);
        let two_thirds = T::lit(2.0 / 3.0);
        let (sn, cs) = (two * theta / T::lit(3.0)).sin_cos();
        let (sn3, cs3) = (theta / T::lit(3.0)).sin_cos();
        let s = t * t;
        let (eta, kappa) = (self.eta, self.kappa);

        let psi = s * r0 * cs;
        let dt_psi = two * t * r0 * cs;
        let lap_psi = s * cs * (r2 + r1 / r - T::lit(4.0 / 9.0) * r0 / (r * r));
        let div_a = s * w0 * cs;
        let a_dot_grad = s * s * f * (r1 * cs * cs + two_thirds * r0 / r * sn * sn);
        let a2 = s * s * f * f;

        let re = eta * dt_psi - lap_psi / (kappa * kappa) + a2 * psi + (psi * psi - T::one()) * psi;
        let im = (psi * div_a + two * a_dot_grad) / kappa - eta * kappa * psi * div_a;

        // 𝐠 = ∂ₜA − ∇(∇·A) + ψ²A
        let grad_div = to_cartesian(s * w1 * cs, -two_thirds * s * w0 / r * sn, theta);
        let amp = two * t * f + psi * psi * s * f;
        let gvec = [amp * cs3 - grad_div[0], amp * sn3 - grad_div[1]];

        Ok(Sources {
            g: Complex::new(re, im),
            gvec,
            f: -s * w0 * sn,
        })
    }
}

fn to_cartesian<T: Real>(vr: T, vt: T, theta: T) -> [T; 2] {
    let (s, c) = theta.sin_cos();
    [vr * c - vt * s, vr * s + vt * c]
}

/// Solves the Hermite system `p⁽ᵏ⁾(0) = 0.1·[k = 0]`, `p⁽ᵏ⁾(1) = 0`,
/// `k = 0..3`, for the degree-7 polynomial in `s = (r − 0.1)/0.3`.
fn upsilon_coeffs<T: Real>() -> Result<[T; 8]> {
    let mut rows = Vec::with_capacity(8);
    let mut rhs = Vec::with_capacity(8);
    for (point, value) in [(0.0f64, PHI_CORE), (1.0, 0.0)] {
        for k in 0..4usize {
            let row: Vec<f64> = (0..8usize)
                .map(|i| {
                    if i < k {
                        0.0
                    } else {
                        let falling: f64 = (0..k).map(|j| (i - j) as f64).product();
                        falling * point.powi((i - k) as i32)
                    }
                })
                .collect();
            rows.push(row);
            rhs.push(if k == 0 { value } else { 0.0 });
        }
    }
    let c = dense_lu_solve(rows, rhs)?;
    Ok(std::array::from_fn(|i| T::lit(c[i])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case() -> ManufacturedCase<f64> {
        ManufacturedCase::new().unwrap()
    }

    #[test]
    fn polar_angle_convention() {
        let (r, t) = polar([0.3f64, 0.0]).unwrap();
        assert_eq!((r, t), (0.3, 0.0));
        let (_, t) = polar([0.0f64, -0.3]).unwrap();
        assert!((t - 1.5 * std::f64::consts::PI).abs() < 1e-15);
        let (_, t) = polar([-0.2f64, 0.0]).unwrap();
        assert!((t - std::f64::consts::PI).abs() < 1e-15);
        assert!(matches!(
            polar([0.2f64, -0.2]),
            Err(Error::OutsideDomain { .. })
        ));
        assert_eq!(polar([0.3f64, -1e-18]).unwrap().1, 0.0);
    }

    #[test]
    fn cutoff_values() {
        let c = case();
        assert_eq!(c.phi(0.05), 0.1);
        assert_eq!(c.dphi(0.05), 0.0);
        assert_eq!(c.phi(0.5), 0.0);
        assert_eq!(c.dphi(0.5), 0.0);
        assert!((c.phi(0.1) - 0.1).abs() < 1e-15);
        assert!(c.dphi(0.1).abs() < 1e-13);
    }

    #[test]
    fn vanishes_at_initial_time_and_outside_support() {
        let c = case();
        for x in [[0.2, 0.1], [-0.3, -0.3], [0.0, 0.45]] {
            assert_eq!(c.psi(x, 0.0).unwrap().norm(), 0.0);
            assert_eq!(c.a(x, 0.0).unwrap(), [0.0, 0.0]);
            assert_eq!(c.exact_f(x, 0.0).unwrap(), 0.0);
            let s = c.sources(x, 0.0).unwrap();
            assert_eq!(s.g.norm(), 0.0);
            assert_eq!(s.gvec, [0.0, 0.0]);
        }
        for x in [[0.45, 0.3], [-0.45, -0.45], [-0.5, 0.0]] {
            assert_eq!(c.psi(x, 1.0).unwrap().norm(), 0.0);
            assert_eq!(c.a(x, 1.0).unwrap(), [0.0, 0.0]);
            let s = c.sources(x, 1.0).unwrap();
            assert_eq!(s.g.norm(), 0.0);
            assert_eq!(s.gvec, [0.0, 0.0]);
        }
    }

    #[test]
    fn plug_in_inside_core() {
        let c = case();
        let r: f64 = 0.05;
        let psi = c.psi([r, 0.0], 1.0).unwrap();
        assert!((psi.re - 0.1 * r.powf(2.0 / 3.0)).abs() < 1e-15);
        let a = c.a([r, 0.0], 1.0).unwrap();
        assert!((a[0] - 0.1 * 4.0 / 3.0 * r.powf(-1.0 / 3.0)).abs() < 1e-14);
        assert_eq!(a[1], 0.0);
    }

    #[test]
    fn outside_points_are_rejected() {
        let c = case();
        assert!(c.psi([0.1, -0.1], 1.0).is_err());
        assert!(c.sources([0.1, -0.1], 1.0).is_err());
    }

    #[test]
    fn f32_evaluation_is_close_to_f64() {
        let c32 = ManufacturedCase::<f32>::new().unwrap();
        let c64 = case();
        let s32 = c32.sources([-0.15, 0.2], 0.8).unwrap();
        let s64 = c64.sources([-0.15, 0.2], 0.8).unwrap();
        assert!(((s32.g.re as f64) - s64.g.re).abs() < 1e-4 * s64.g.norm().max(1.0));
    }
}
