use crate::scalar::Real;

/// Symmetric quadrature rule on a triangle in barycentric coordinates.
/// Weights are normalized to sum to one; integrate with
/// `area · Σ wᵢ f(xᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    pub points: Vec<[T; 3]>,
    pub weights: Vec<T>,
    pub degree: usize,
}

impl<T: Real> QuadratureRule<T> {
    pub fn centroid() -> Self {
        let third = T::one() / T::lit(3.0);
        QuadratureRule {
            points: vec![[third; 3]],
            weights: vec![T::one()],
            degree: 1,
        }
    }

    /// Three interior points, exact for quadratics.
    pub fn degree2() -> Self {
        let a = T::lit(2.0) / T::lit(3.0);
        let b = T::one() / T::lit(6.0);
        let w = T::one() / T::lit(3.0);
        QuadratureRule {
            points: vec![[a, b, b], [b, a, b], [b, b, a]],
            weights: vec![w; 3],
            degree: 2,
        }
    }

    /// Six-point rule (Strang–Fix / Dunavant), exact for quartics.
    pub fn degree4() -> Self {
        let a = T::lit(0.445_948_490_915_964_886_32);
        let wa = T::lit(0.223_381_589_678_011_465_70);
        let b = T::lit(0.091_576_213_509_770_743_46);
        let wb = T::lit(0.109_951_743_655_321_867_64);
        let ca = T::one() - a - a;
        let cb = T::one() - b - b;
        QuadratureRule {
            points: vec![
                [ca, a, a],
                [a, ca, a],
                [a, a, ca],
                [cb, b, b],
                [b, cb, b],
                [b, b, cb],
            ],
            weights: vec![wa, wa, wa, wb, wb, wb],
            degree: 4,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// ∫ over the reference triangle {x, y ≥ 0, x + y ≤ 1} of xᵃyᵇ,
    /// divided by its area 1/2.
    fn exact_mean(a: u32, b: u32) -> f64 {
        2.0 * factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    fn check(rule: &QuadratureRule<f64>) {
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
        for a in 0..=rule.degree as u32 {
            for b in 0..=(rule.degree as u32 - a) {
                let q: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(p, w)| w * p[1].powi(a as i32) * p[2].powi(b as i32))
                    .sum();
                assert!(
                    (q - exact_mean(a, b)).abs() < 1e-14,
                    "degree {} monomial x^{a} y^{b}",
                    rule.degree
                );
            }
        }
    }

    #[test]
    fn rules_are_exact_to_stated_degree() {
        check(&QuadratureRule::centroid());
        check(&QuadratureRule::degree2());
        check(&QuadratureRule::degree4());
    }

    #[test]
    fn degree4_rule_is_not_exact_for_degree6() {
        let rule = QuadratureRule::<f64>::degree4();
        let q: f64 = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(p, w)| w * p[1].powi(6))
            .sum();
        assert!((q - exact_mean(6, 0)).abs() > 1e-6);
    }
}
