//! Univariate and standard bivariate normal distribution functions.

use super::incomplete_gamma::{reg_lower_incomplete_gamma, reg_upper_incomplete_gamma};
use crate::error::{domain, Result};
use crate::quadrature::adaptive_integrate;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal CDF `Φ(z)`, from `Φ(z) = ½ Q(½, z²/2)` for `z < 0`.
pub fn std_normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    if z == f64::INFINITY {
        return 1.0;
    }
    let half_sq = 0.5 * z * z;
    // Both calls are in-domain for finite z.
    if z < 0.0 {
        0.5 * reg_upper_incomplete_gamma(0.5, half_sq).unwrap_or(0.0)
    } else {
        0.5 + 0.5 * reg_lower_incomplete_gamma(0.5, half_sq).unwrap_or(1.0)
    }
}

/// `P(X <= a, Y <= b)` for a standard bivariate normal pair with correlation
/// `r`, `|r| < 1`.
///
/// Computed as `∫_{−∞}^{a} φ(x) Φ((b − r x)/√(1 − r²)) dx` by adaptive
/// Gauss-Legendre quadrature; arguments are ordered so that the result is
/// exactly symmetric in `(a, b)`.
pub fn std_bivariate_normal_cdf(a: f64, b: f64, r: f64) -> Result<f64> {
    if !(r.abs() < 1.0) {
        return domain(format!(
            "bivariate normal correlation must satisfy |r| < 1, got {r}"
        ));
    }
    if a.is_nan() || b.is_nan() {
        return domain("bivariate normal limits must not be NaN");
    }
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    if a == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if a == f64::INFINITY {
        return Ok(1.0);
    }
    if b == f64::INFINITY {
        return Ok(std_normal_cdf(a));
    }
    if r == 0.0 {
        return Ok(std_normal_cdf(a) * std_normal_cdf(b));
    }
    let scale = (1.0 - r * r).sqrt();
    let integrand = |x: f64| std_normal_pdf(x) * std_normal_cdf((b - r * x) / scale);
    // φ is below 1e-31 past −12, and past a − 10 relative to φ(a)
    let lower = (-12.0f64).min(a - 10.0);
    let value = adaptive_integrate(integrand, lower, a, 1e-14)?;
    Ok(value.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_reference_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!((std_normal_cdf(-2.0) - 0.022_750_131_948_179_21).abs() < 1e-16);
        assert!((std_normal_cdf(-8.0) / 6.220_960_574_271_785e-16 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn independent_halves() {
        assert_eq!(std_bivariate_normal_cdf(0.0, 0.0, 0.0).unwrap(), 0.25);
    }

    #[test]
    fn sheppard_formula_at_origin() {
        for &r in &[-0.95, -0.5, -0.1, 0.1, 0.5, 0.9, 0.999] {
            let expected = 0.25 + f64::asin(r) / (2.0 * std::f64::consts::PI);
            let got = std_bivariate_normal_cdf(0.0, 0.0, r).unwrap();
            assert!(
                (got - expected).abs() < 1e-12,
                "r = {r}: {got} vs {expected}"
            );
        }
        let third = std_bivariate_normal_cdf(0.0, 0.0, 0.5).unwrap();
        assert!((third - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn marginalizes_with_large_limit() {
        for &(b, r) in &[(-1.3, 0.4), (0.2, -0.7), (2.5, 0.95)] {
            let got = std_bivariate_normal_cdf(40.0, b, r).unwrap();
            assert!((got - std_normal_cdf(b)).abs() < 1e-10);
            assert_eq!(
                std_bivariate_normal_cdf(f64::INFINITY, b, r).unwrap(),
                std_normal_cdf(b)
            );
        }
    }

    #[test]
    fn zero_correlation_factorizes() {
        for &(a, b) in &[(-1.0, 0.5), (2.0, -0.3), (0.7, 0.7)] {
            let got = std_bivariate_normal_cdf(a, b, 0.0).unwrap();
            assert!((got - std_normal_cdf(a) * std_normal_cdf(b)).abs() < 1e-10);
        }
    }

    #[test]
    fn quadrature_path_near_zero_correlation_is_continuous() {
        let (a, b) = (0.3, -1.1);
        let product = std_normal_cdf(a) * std_normal_cdf(b);
        let got = std_bivariate_normal_cdf(a, b, 1e-9).unwrap();
        assert!((got - product).abs() < 1e-10);
    }

    #[test]
    fn rejects_degenerate_correlation() {
        assert!(std_bivariate_normal_cdf(0.0, 0.0, 1.0).is_err());
        assert!(std_bivariate_normal_cdf(0.0, 0.0, -1.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn symmetric_and_bounded(a in -6.0f64..6.0, b in -6.0f64..6.0, r in -0.99f64..0.99) {
            let ab = std_bivariate_normal_cdf(a, b, r).unwrap();
            let ba = std_bivariate_normal_cdf(b, a, r).unwrap();
            proptest::prop_assert_eq!(ab, ba);
            // Fréchet bounds
            let (pa, pb) = (std_normal_cdf(a), std_normal_cdf(b));
            proptest::prop_assert!(ab <= pa.min(pb) + 1e-12);
            proptest::prop_assert!(ab >= (pa + pb - 1.0).max(0.0) - 1e-12);
        }
    }
}
