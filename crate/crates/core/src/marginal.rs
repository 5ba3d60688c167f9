//! Marginal law of one projection error, `V ~ Γ(k/2, 2)` (chi-square with
//! `k` degrees of freedom), and the success event `k(1 − ε) <= V <= k(1 + ε)`.

use crate::error::{domain, Result};
use crate::special::{ln_reg_lower_incomplete_gamma, ln_reg_upper_incomplete_gamma};

/// How a probability was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Quadrature,
    GaussianApprox,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::GaussianApprox => "gaussian_approx",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// A probability together with the method that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probability {
    pub value: f64,
    pub method: Method,
}

impl Probability {
    pub fn new(value: f64, method: Method) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return domain(format!("probability out of [0, 1]: {value}"));
        }
        Ok(Self { value, method })
    }

    /// Clamps tiny rounding excursions outside `[0, 1]`.
    pub(crate) fn clamped(value: f64, method: Method) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            method,
        }
    }
}

/// Point count, embedding dimension and tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingSpec {
    pub n: u64,
    pub k: u64,
    pub epsilon: f64,
}

impl EmbeddingSpec {
    pub fn new(n: u64, k: u64, epsilon: f64) -> Result<Self> {
        if n < 2 {
            return domain(format!("need at least two points, got n = {n}"));
        }
        check_k_epsilon(k, epsilon)?;
        Ok(Self { n, k, epsilon })
    }

    /// `C(n, 2)`, exact.
    pub fn pair_count(&self) -> u128 {
        pair_count(self.n)
    }
}

/// `C(n, 2) = n (n − 1) / 2` in 128-bit arithmetic.
pub fn pair_count(n: u64) -> u128 {
    let n = n as u128;
    n * n.saturating_sub(1) / 2
}

pub(crate) fn check_k_epsilon(k: u64, epsilon: f64) -> Result<()> {
    if k == 0 {
        return domain("embedding dimension k must be >= 1");
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("tolerance must lie in (0, 1), got {epsilon}"));
    }
    Ok(())
}

/// Success-interval endpoints on the gamma scale used by `P(k/2, ·)`.
fn half_limits(k: u64, epsilon: f64) -> (f64, f64, f64) {
    let kf = k as f64;
    (
        0.5 * kf,
        0.5 * kf * (1.0 - epsilon),
        0.5 * kf * (1.0 + epsilon),
    )
}

/// `μ = P(k(1 − ε) <= V <= k(1 + ε))`.
pub fn success_probability(k: u64, epsilon: f64) -> Result<Probability> {
    check_k_epsilon(k, epsilon)?;
    let (s, lo, hi) = half_limits(k, epsilon);
    let upper = ln_reg_lower_incomplete_gamma(s, hi)?.exp();
    let lower = ln_reg_lower_incomplete_gamma(s, lo)?.exp();
    Ok(Probability::clamped(upper - lower, Method::ClosedForm))
}

/// `1 − μ`, as the sum of the two tail masses so that it keeps full relative
/// precision when `μ` is close to one.
pub fn failure_probability(k: u64, epsilon: f64) -> Result<Probability> {
    Ok(Probability::clamped(
        ln_failure_probability(k, epsilon)?.exp(),
        Method::ClosedForm,
    ))
}

/// `ln(1 − μ)`.
pub fn ln_failure_probability(k: u64, epsilon: f64) -> Result<f64> {
    check_k_epsilon(k, epsilon)?;
    let (s, lo, hi) = half_limits(k, epsilon);
    let ln_below = ln_reg_lower_incomplete_gamma(s, lo)?;
    let ln_above = ln_reg_upper_incomplete_gamma(s, hi)?;
    let (big, small) = if ln_below >= ln_above {
        (ln_below, ln_above)
    } else {
        (ln_above, ln_below)
    };
    if big == f64::NEG_INFINITY {
        return Ok(big);
    }
    Ok(big + (small - big).exp().ln_1p())
}

/// `μ` and `1 − μ` carried side by side, so that bound formulas can use
/// whichever is accurate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessRate {
    pub mu: f64,
    pub failure: f64,
}

impl SuccessRate {
    /// # Panics
    /// If `mu` is outside `[0, 1]`.
    pub fn from_mu(mu: f64) -> Self {
        assert!(
            (0.0..=1.0).contains(&mu),
            "success probability {mu} outside [0, 1]"
        );
        Self {
            mu,
            failure: 1.0 - mu,
        }
    }

    /// # Panics
    /// If `failure` is outside `[0, 1]`.
    pub fn from_failure(failure: f64) -> Self {
        assert!(
            (0.0..=1.0).contains(&failure),
            "failure probability {failure} outside [0, 1]"
        );
        Self {
            mu: 1.0 - failure,
            failure,
        }
    }

    /// Both quantities from the incomplete gamma tails.
    pub fn for_spec(k: u64, epsilon: f64) -> Result<Self> {
        let mu = success_probability(k, epsilon)?.value;
        let failure = failure_probability(k, epsilon)?.value;
        Ok(Self { mu, failure })
    }
}

impl From<f64> for SuccessRate {
    fn from(mu: f64) -> Self {
        Self::from_mu(mu)
    }
}
