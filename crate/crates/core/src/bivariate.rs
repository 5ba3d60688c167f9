//! Kibble bivariate gamma law of a pair of projection errors `(Vᵢ, Vᵢ′)`.
//!
//! Both marginals are `Γ(k/2, 2)`; the pair is parameterized by `ρ²`, the
//! squared cosine between the two unit difference vectors. The density is
//!
//! ```text
//! h(v₁, v₂) = (v₁v₂ / 4ρ²)^{ν/2} exp(−(v₁ + v₂) / 2(1 − ρ²)) I_ν(ρ√(v₁v₂) / (1 − ρ²))
//!             / (4 Γ(k/2) (1 − ρ²)),            ν = k/2 − 1.
//! ```

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::marginal::{check_k_epsilon, success_probability, Method, Probability};
use crate::quadrature::{adaptive_integrate_2d, Rect};
use crate::special::{
    ln_bessel_i_scaled, ln_gamma, reg_lower_incomplete_gamma, std_bivariate_normal_cdf,
    std_normal_cdf,
};

/// Largest `k` handled by quadrature; above it the Gaussian approximation is
/// used.
pub const QUADRATURE_MAX_K: u64 = 300;

/// Absolute tolerance handed to the 2-D integrator.
const QUADRATURE_TOL: f64 = 1e-10;
const QUADRATURE_MIN_DEPTH: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateGammaParams {
    pub k: u64,
    pub rho_sq: f64,
}

impl BivariateGammaParams {
    pub fn new(k: u64, rho_sq: f64) -> Result<Self> {
        if k == 0 {
            return domain("embedding dimension k must be >= 1");
        }
        if !(0.0..=1.0).contains(&rho_sq) {
            return domain(format!("rho_sq must lie in [0, 1], got {rho_sq}"));
        }
        Ok(Self { k, rho_sq })
    }

    /// Mean of each marginal.
    pub fn marginal_mean(&self) -> f64 {
        self.k as f64
    }

    /// Variance of each marginal.
    pub fn marginal_variance(&self) -> f64 {
        2.0 * self.k as f64
    }

    /// `cov(Vᵢ, Vᵢ′) = 2kρ²`.
    pub fn covariance(&self) -> f64 {
        2.0 * self.k as f64 * self.rho_sq
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JointMethod {
    #[default]
    Auto,
    Quadrature,
    GaussianApprox,
}

impl JointMethod {
    /// `Auto` becomes quadrature for `k <= 300` and the Gaussian
    /// approximation above.
    pub fn resolve(self, k: u64) -> JointMethod {
        match self {
            JointMethod::Auto if k <= QUADRATURE_MAX_K => JointMethod::Quadrature,
            JointMethod::Auto => JointMethod::GaussianApprox,
            other => other,
        }
    }
}

/// Precomputed constants of `ln h` for one `(k, ρ²)`, `0 < ρ² < 1`.
struct Kibble {
    order: f64,
    rho: f64,
    one_minus: f64,
    one_plus_rho: f64,
    ln_const: f64,
}

impl Kibble {
    fn new(params: BivariateGammaParams) -> Self {
        let half_k = 0.5 * params.k as f64;
        let rho_sq = params.rho_sq;
        let one_minus = 1.0 - rho_sq;
        let order = half_k - 1.0;
        let ln_const =
            -(4.0f64).ln() - ln_gamma(half_k) - one_minus.ln() - 0.5 * order * (4.0 * rho_sq).ln();
        Self {
            order,
            rho: rho_sq.sqrt(),
            one_minus,
            one_plus_rho: 1.0 + rho_sq.sqrt(),
            ln_const,
        }
    }

    /// `ln(e⁻ᶻ I_ν(z))`, with the `ν = −½` case (k = 1) in closed form.
    fn ln_scaled_bessel(&self, z: f64) -> f64 {
        if self.order < 0.0 {
            // I_{−1/2}(z) = √(2/(πz)) cosh z
            return -0.5 * (2.0 * std::f64::consts::PI * z).ln() + (-2.0 * z).exp().ln_1p();
        }
        ln_bessel_i_scaled(self.order, z).unwrap_or(f64::NAN)
    }

    fn ln_density(&self, v1: f64, v2: f64) -> f64 {
        let product = v1 * v2;
        if product == 0.0 {
            return if self.order > 0.0 {
                f64::NEG_INFINITY
            } else if self.order == 0.0 {
                // I₀(0) = 1, Γ(1) = 1
                -(4.0f64).ln() - self.one_minus.ln() - (v1 + v2) / (2.0 * self.one_minus)
            } else {
                f64::INFINITY
            };
        }
        let (s, t) = (v1.sqrt(), v2.sqrt());
        let root = s * t;
        let z = self.rho * root / self.one_minus;
        // z − (v₁ + v₂)/(2(1 − ρ²)) = −(s − t)²/(2(1 − ρ²)) − st/(1 + ρ)
        let exponent = -(s - t).powi(2) / (2.0 * self.one_minus) - root / self.one_plus_rho;
        self.ln_const + 0.5 * self.order * product.ln() + self.ln_scaled_bessel(z) + exponent
    }

    /// Integrand after `v = t²` on both axes; removes the `v^{−1/2}`
    /// singularity at `k = 1`.
    fn substituted(&self, t1: f64, t2: f64) -> f64 {
        if t1 == 0.0 || t2 == 0.0 {
            return 0.0;
        }
        4.0 * t1 * t2 * self.ln_density(t1 * t1, t2 * t2).exp()
    }

    fn integrate(&self, t_rect: Rect) -> Result<f64> {
        adaptive_integrate_2d(
            |a, b| self.substituted(a, b),
            t_rect,
            QUADRATURE_TOL,
            QUADRATURE_MIN_DEPTH,
        )
    }
}

fn check_open_rho(params: BivariateGammaParams) -> Result<()> {
    if params.rho_sq <= 0.0 || params.rho_sq >= 1.0 {
        return domain(format!(
            "the Kibble density needs 0 < rho_sq < 1, got {}; use the independent or degenerate form",
            params.rho_sq
        ));
    }
    Ok(())
}

/// `ln h(v₁, v₂)` for `0 < ρ² < 1`.
pub fn kibble_log_density(v1: f64, v2: f64, params: BivariateGammaParams) -> Result<f64> {
    check_open_rho(params)?;
    if !(v1 >= 0.0 && v2 >= 0.0) {
        return domain(format!("density arguments must be >= 0, got ({v1}, {v2})"));
    }
    Ok(Kibble::new(params).ln_density(v1, v2))
}

/// Beyond this value a `Γ(k/2, 2)` variable has negligible mass; CDF limits
/// are clipped to it so the integration domain stays compact.
fn effective_upper(k: u64) -> f64 {
    let kf = k as f64;
    kf + 80.0 * (2.0 * kf).sqrt() + 200.0
}

/// `H(v₁, v₂) = P(Vᵢ <= v₁, Vᵢ′ <= v₂)`, by quadrature; `k <= 300`.
pub fn joint_cdf(v1: f64, v2: f64, params: BivariateGammaParams) -> Result<Probability> {
    if params.k > QUADRATURE_MAX_K {
        return domain(format!(
            "joint_cdf is quadrature-only and limited to k <= {QUADRATURE_MAX_K}, got {}",
            params.k
        ));
    }
    if !(v1 >= 0.0 && v2 >= 0.0) {
        return domain(format!("CDF arguments must be >= 0, got ({v1}, {v2})"));
    }
    let half_k = 0.5 * params.k as f64;
    let cap = effective_upper(params.k);
    let (v1, v2) = (v1.min(cap), v2.min(cap));
    if params.rho_sq == 0.0 {
        let p = reg_lower_incomplete_gamma(half_k, 0.5 * v1)?
            * reg_lower_incomplete_gamma(half_k, 0.5 * v2)?;
        return Ok(Probability::clamped(p, Method::ClosedForm));
    }
    if params.rho_sq == 1.0 {
        let p = reg_lower_incomplete_gamma(half_k, 0.5 * v1.min(v2))?;
        return Ok(Probability::clamped(p, Method::ClosedForm));
    }
    // symmetric in the arguments: integrate with the smaller one first
    let (a, b) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
    let value = Kibble::new(params).integrate(Rect::new(0.0, a.sqrt(), 0.0, b.sqrt()))?;
    Ok(Probability::clamped(value, Method::Quadrature))
}

/// `p(Sᵢ ∩ Sᵢ′)`, the probability that both errors of a pair land in
/// `[k(1 − ε), k(1 + ε)]`.
///
/// `ρ² = 0` returns `μ²` and `ρ² = 1` returns `μ` exactly. Otherwise the
/// density is integrated over the success square, or the CLT approximation
/// is used, according to `method`.
pub fn joint_success_probability(
    k: u64,
    epsilon: f64,
    rho_sq: f64,
    method: JointMethod,
) -> Result<Probability> {
    check_k_epsilon(k, epsilon)?;
    let params = BivariateGammaParams::new(k, rho_sq)?;
    if rho_sq == 0.0 {
        let mu = success_probability(k, epsilon)?.value;
        return Ok(Probability::clamped(mu * mu, Method::ClosedForm));
    }
    if rho_sq == 1.0 {
        return success_probability(k, epsilon);
    }
    match method.resolve(k) {
        JointMethod::GaussianApprox => {
            gaussian_approx_joint_success_probability(k, epsilon, rho_sq)
        }
        _ => {
            if k > QUADRATURE_MAX_K {
                return domain(format!(
                    "quadrature is limited to k <= {QUADRATURE_MAX_K}, got {k}; use the Gaussian approximation"
                ));
            }
            let kf = k as f64;
            let lo = (kf * (1.0 - epsilon)).sqrt();
            let hi = (kf * (1.0 + epsilon)).sqrt();
            let value = Kibble::new(params).integrate(Rect::square(lo, hi))?;
            Ok(Probability::clamped(value, Method::Quadrature))
        }
    }
}

/// `p(Sᵢ ∩ Sᵢ′)` under the bivariate normal with mean `(k, k)` and covariance
/// `k [[2, 2ρ²], [2ρ², 2]]`.
pub fn gaussian_approx_joint_success_probability(
    k: u64,
    epsilon: f64,
    rho_sq: f64,
) -> Result<Probability> {
    check_k_epsilon(k, epsilon)?;
    if k < 2 {
        return domain("the Gaussian approximation needs k >= 2");
    }
    if !(0.0..1.0).contains(&rho_sq) {
        return domain(format!(
            "the Gaussian approximation needs 0 <= rho_sq < 1, got {rho_sq}"
        ));
    }
    let z = epsilon * (0.5 * k as f64).sqrt();
    let value = if rho_sq == 0.0 {
        let single = std_normal_cdf(z) - std_normal_cdf(-z);
        single * single
    } else {
        std_bivariate_normal_cdf(z, z, rho_sq)? - 2.0 * std_bivariate_normal_cdf(-z, z, rho_sq)?
            + std_bivariate_normal_cdf(-z, -z, rho_sq)?
    };
    Ok(Probability::clamped(value, Method::GaussianApprox))
}

/// `E[exp(i(t₁Vᵢ + t₂Vᵢ′))] = ((1 − 2it₁)(1 − 2it₂) + 4t₁t₂ρ²)^{−k/2}`.
///
/// The base has positive real part whenever its imaginary part vanishes, so
/// the principal power is continuous in `(t₁, t₂)`.
pub fn joint_characteristic_function(t1: f64, t2: f64, params: BivariateGammaParams) -> Complex64 {
    let base = Complex64::new(1.0, -2.0 * t1) * Complex64::new(1.0, -2.0 * t2)
        + Complex64::new(4.0 * t1 * t2 * params.rho_sq, 0.0);
    (-0.5 * params.k as f64 * base.ln()).exp()
}
