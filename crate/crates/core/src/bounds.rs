//! Bonferroni-type lower bounds on the no-failure probability
//! `p(S₁ ∩ … ∩ S_C)`, `C = C(n, 2)`.
//!
//! Every formula is written in terms of the failure probability `f = 1 − μ`
//! (`1 − μ² = f(2 − f)`, `1 − μ³ = f(3 − 3f + f²)`), so the bounds keep their
//! precision when `μ` is within `1e-12` of one. Bounds are raw reals and may
//! be negative.

use rayon::prelude::*;

use crate::bivariate::{joint_success_probability, JointMethod};
use crate::error::{domain, Error, Result};
use crate::marginal::{pair_count, EmbeddingSpec, Probability, SuccessRate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairCountParity {
    Even,
    Odd,
}

impl PairCountParity {
    pub fn of(n: u64) -> Self {
        if pair_count(n).is_multiple_of(2) {
            PairCountParity::Even
        } else {
            PairCountParity::Odd
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PairCountParity::Even => "even",
            PairCountParity::Odd => "odd",
        }
    }
}

/// A value that is only a valid lower bound under a stated condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalBound {
    pub value: f64,
    pub condition: &'static str,
}

pub const TRIVARIATE_CONDITION: &str =
    "valid only if p(S1 ∩ S2 ∩ S3) >= μ³ for every triple, which is unproven";
pub const GEOMETRY_CONDITION: &str =
    "not a general bound; a lower bound only when every paired ρ² equals 1";

/// `(⌊C/2⌋, C mod 2)` as floats.
fn pairs_and_leftover(n: u64) -> (f64, f64) {
    let c = pair_count(n);
    ((c / 2) as f64, (c % 2) as f64)
}

/// `1 − C(n, 2)(1 − μ)`.
pub fn marginal_lower_bound(n: u64, rate: impl Into<SuccessRate>) -> f64 {
    let f = rate.into().failure;
    1.0 - pair_count(n) as f64 * f
}

/// `1 − ⌊C/2⌋(1 − μ²) − (C mod 2)(1 − μ)`: failures paired off, an odd one
/// out bounded on its own.
pub fn bivariate_lower_bound(n: u64, rate: impl Into<SuccessRate>) -> f64 {
    let f = rate.into().failure;
    let (pairs, leftover) = pairs_and_leftover(n);
    1.0 - (pairs * f * (2.0 - f) + leftover * f)
}

/// `Δ = bivariate − marginal = ⌊C/2⌋(1 − μ)²`.
pub fn bound_delta(n: u64, rate: impl Into<SuccessRate>) -> f64 {
    let f = rate.into().failure;
    pairs_and_leftover(n).0 * f * f
}

/// `1 − ⌊C/3⌋(1 − μ³) − r`, where the remainder `r` covers one leftover
/// failure by `1 − μ` or two by `1 − μ²`.
pub fn trivariate_lower_bound(n: u64, rate: impl Into<SuccessRate>) -> ConditionalBound {
    let f = rate.into().failure;
    let c = pair_count(n);
    let triples = (c / 3) as f64;
    let remainder = match c % 3 {
        0 => 0.0,
        1 => f,
        _ => f * (2.0 - f),
    };
    ConditionalBound {
        value: 1.0 - (triples * f * (3.0 - 3.0 * f + f * f) + remainder),
        condition: TRIVARIATE_CONDITION,
    }
}

/// `C(n, 2)(μ³/3 − μ²/2 + 1/6) = C f²(½ − f/3)`, the gain of the
/// trivariate over the bivariate bound before remainder handling.
pub fn trivariate_improvement(n: u64, rate: impl Into<SuccessRate>) -> f64 {
    let f = rate.into().failure;
    pair_count(n) as f64 * f * f * (0.5 - f / 3.0)
}

/// `1 − ⌊C/2⌋(1 − μ) − (C mod 2)(1 − μ)`, what the data-dependent bound
/// becomes when every pair is perfectly correlated.
pub fn geometry_comparison_value(n: u64, rate: impl Into<SuccessRate>) -> ConditionalBound {
    let f = rate.into().failure;
    let (pairs, leftover) = pairs_and_leftover(n);
    ConditionalBound {
        value: 1.0 - (pairs * f + leftover * f),
        condition: GEOMETRY_CONDITION,
    }
}

/// `ρ²` of each paired failure event `{F₂ᵢ₋₁, F₂ᵢ}`; an odd event out is
/// implied by `C(n, 2)` being odd.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingAssignment {
    rho_sq: Vec<f64>,
}

impl PairingAssignment {
    pub fn new(rho_sq: Vec<f64>) -> Result<Self> {
        if let Some(bad) = rho_sq.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return domain(format!("pairing rho_sq must lie in [0, 1], got {bad}"));
        }
        Ok(Self { rho_sq })
    }

    pub fn uniform(len: usize, rho_sq: f64) -> Result<Self> {
        Self::new(vec![rho_sq; len])
    }

    pub fn rho_sq(&self) -> &[f64] {
        &self.rho_sq
    }

    pub fn len(&self) -> usize {
        self.rho_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho_sq.is_empty()
    }
}

/// `1 − Σᵢ (1 − p(S₂ᵢ₋₁ ∩ S₂ᵢ)) − (C mod 2)(1 − μ)`, each joint probability
/// from [`joint_success_probability`] at the pair's `ρ²`.
///
/// Pairs with `ρ² = 0` and `ρ² = 1` use `f(2 − f)` and `f` directly, so an
/// all-zero pairing reproduces [`bivariate_lower_bound`] and an all-one
/// pairing [`geometry_comparison_value`] bit for bit.
pub fn data_dependent_lower_bound(
    spec: &EmbeddingSpec,
    pairing: &PairingAssignment,
) -> Result<f64> {
    let c = spec.pair_count();
    let expected = c / 2;
    if pairing.len() as u128 != expected {
        return Err(Error::PairingLength {
            expected: u64::try_from(expected).unwrap_or(u64::MAX),
            got: pairing.len(),
        });
    }
    let rate = SuccessRate::for_spec(spec.k, spec.epsilon)?;
    let f = rate.failure;
    let interior: Vec<f64> = pairing
        .rho_sq
        .par_iter()
        .filter(|&&r| r > 0.0 && r < 1.0)
        .map(|&r| {
            Ok(1.0 - joint_success_probability(spec.k, spec.epsilon, r, JointMethod::Auto)?.value)
        })
        .collect::<Result<_>>()?;
    let zeros = pairing.rho_sq.iter().filter(|&&r| r == 0.0).count() as f64;
    let ones = pairing.rho_sq.iter().filter(|&&r| r == 1.0).count() as f64;
    let others: f64 = interior.iter().sum();
    let leftover = (c % 2) as f64;
    Ok(1.0 - (zeros * f * (2.0 - f) + ones * f + others + leftover * f))
}

/// All bounds for one `(n, k, ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub spec: EmbeddingSpec,
    pub mu: Probability,
    pub failure: Probability,
    pub marginal_lb: f64,
    pub bivariate_lb: f64,
    pub delta: f64,
    pub trivariate_lb: ConditionalBound,
    pub geometry_value: ConditionalBound,
    pub pair_count_parity: PairCountParity,
}

impl BoundReport {
    pub fn build(spec: EmbeddingSpec) -> Result<Self> {
        let mu = crate::marginal::success_probability(spec.k, spec.epsilon)?;
        let failure = crate::marginal::failure_probability(spec.k, spec.epsilon)?;
        let rate = SuccessRate {
            mu: mu.value,
            failure: failure.value,
        };
        Ok(Self {
            spec,
            mu,
            failure,
            marginal_lb: marginal_lower_bound(spec.n, rate),
            bivariate_lb: bivariate_lower_bound(spec.n, rate),
            delta: bound_delta(spec.n, rate),
            trivariate_lb: trivariate_lower_bound(spec.n, rate),
            geometry_value: geometry_comparison_value(spec.n, rate),
            pair_count_parity: PairCountParity::of(spec.n),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn hand_arithmetic_examples() {
        assert!(close(marginal_lower_bound(3, 0.9), 0.7));
        assert!(close(bivariate_lower_bound(3, 0.9), 0.71));
        assert!(close(bivariate_lower_bound(4, 0.9), 0.43));
        assert!(close(bound_delta(3, 0.9), 0.01));
        assert!(close(trivariate_lower_bound(4, 0.9).value, 0.458));
        assert!(close(geometry_comparison_value(4, 0.9).value, 0.7));
    }

    #[test]
    fn certain_success_gives_unit_bounds() {
        for n in [2u64, 3, 17, 100_000] {
            assert_eq!(marginal_lower_bound(n, 1.0), 1.0);
            assert_eq!(bivariate_lower_bound(n, 1.0), 1.0);
            assert_eq!(bound_delta(n, 1.0), 0.0);
            assert_eq!(trivariate_lower_bound(n, 1.0).value, 1.0);
            assert_eq!(geometry_comparison_value(n, 1.0).value, 1.0);
            assert_eq!(trivariate_improvement(n, 1.0), 0.0);
        }
    }

    #[test]
    fn single_pair_is_exact() {
        for mu in [0.0, 0.3, 0.77, 1.0] {
            assert!(close(marginal_lower_bound(2, mu), mu));
            assert!(close(bivariate_lower_bound(2, mu), mu));
        }
    }

    #[test]
    fn improvement_at_zero_success() {
        assert!(close(trivariate_improvement(4, 0.0), 1.0));
        assert!(close(trivariate_improvement(10, 0.0), 45.0 / 6.0));
    }

    #[test]
    fn parity() {
        assert_eq!(PairCountParity::of(3), PairCountParity::Odd);
        assert_eq!(PairCountParity::of(4), PairCountParity::Even);
        assert_eq!(PairCountParity::of(2), PairCountParity::Odd);
    }

    #[test]
    fn delta_at_large_scale() {
        let rate = SuccessRate::for_spec(10_000, 0.1).unwrap();
        let delta = bound_delta(100_000, rate);
        assert!(delta > 1e-15 && delta < 1e-13, "{delta:e}");
    }

    #[test]
    fn report_fields_are_consistent() {
        let report = BoundReport::build(EmbeddingSpec::new(100, 80, 0.3).unwrap()).unwrap();
        assert!((report.mu.value + report.failure.value - 1.0).abs() < 1e-12);
        assert!(report.bivariate_lb >= report.marginal_lb);
        let gap = report.bivariate_lb - report.marginal_lb;
        assert!((gap - report.delta).abs() <= 1e-12 * report.marginal_lb.abs().max(1.0));
        assert!(report.trivariate_lb.value >= report.bivariate_lb);
        assert_eq!(report.pair_count_parity, PairCountParity::Even);
    }

    #[test]
    fn data_dependent_reduces_to_closed_forms() {
        let spec = EmbeddingSpec::new(7, 50, 0.15).unwrap();
        let len = (spec.pair_count() / 2) as usize;
        let rate = SuccessRate::for_spec(50, 0.15).unwrap();
        let zeros = PairingAssignment::uniform(len, 0.0).unwrap();
        assert_eq!(
            data_dependent_lower_bound(&spec, &zeros).unwrap(),
            bivariate_lower_bound(7, rate)
        );
        let ones = PairingAssignment::uniform(len, 1.0).unwrap();
        assert_eq!(
            data_dependent_lower_bound(&spec, &ones).unwrap(),
            geometry_comparison_value(7, rate).value
        );
    }

    #[test]
    fn data_dependent_mixed_pairing() {
        let spec = EmbeddingSpec::new(4, 50, 0.15).unwrap();
        let rhos = [0.3, 0.6, 0.9];
        let pairing = PairingAssignment::new(rhos.to_vec()).unwrap();
        let got = data_dependent_lower_bound(&spec, &pairing).unwrap();
        let expected = 1.0
            - rhos
                .iter()
                .map(|&r| {
                    1.0 - joint_success_probability(50, 0.15, r, JointMethod::Quadrature)
                        .unwrap()
                        .value
                })
                .sum::<f64>();
        assert!(close(got, expected));
        assert!(got >= bivariate_lower_bound(4, SuccessRate::for_spec(50, 0.15).unwrap()) - 1e-9);
    }

    #[test]
    fn data_dependent_grows_with_any_single_correlation() {
        let spec = EmbeddingSpec::new(5, 30, 0.25).unwrap();
        let mut previous = f64::NEG_INFINITY;
        for i in 0..=10 {
            let pairing =
                PairingAssignment::new(vec![0.4, 0.2, i as f64 / 10.0, 0.7, 0.0]).unwrap();
            let value = data_dependent_lower_bound(&spec, &pairing).unwrap();
            assert!(value >= previous - 1e-9);
            previous = value;
        }
    }

    #[test]
    fn data_dependent_rejects_wrong_length() {
        let spec = EmbeddingSpec::new(4, 50, 0.15).unwrap();
        let pairing = PairingAssignment::new(vec![0.1, 0.2]).unwrap();
        assert_eq!(
            data_dependent_lower_bound(&spec, &pairing),
            Err(Error::PairingLength {
                expected: 3,
                got: 2
            })
        );
        assert!(PairingAssignment::new(vec![1.5]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn ordering_of_bounds(n in 2u64..1_000_000_000, mu in 0.0f64..=1.0) {
            let marginal = marginal_lower_bound(n, mu);
            let bivariate = bivariate_lower_bound(n, mu);
            let trivariate = trivariate_lower_bound(n, mu).value;
            let geometry = geometry_comparison_value(n, mu).value;
            let scale = pair_count(n) as f64 * 1e-15;
            proptest::prop_assert!(bivariate >= marginal - scale);
            if mu < 1.0 && pair_count(n) >= 2 {
                proptest::prop_assert!(bivariate > marginal);
            }
            proptest::prop_assert!(trivariate >= bivariate - scale);
            proptest::prop_assert!(geometry >= bivariate - scale);
            proptest::prop_assert!(bivariate <= 1.0 && trivariate <= 1.0);
        }

        #[test]
        fn delta_equals_gap(n in 2u64..100_000, f in 0.0f64..1.0) {
            let rate = SuccessRate::from_failure(f);
            let gap = bivariate_lower_bound(n, rate) - marginal_lower_bound(n, rate);
            let delta = bound_delta(n, rate);
            let scale = pair_count(n) as f64 * f64::EPSILON * 4.0;
            proptest::prop_assert!((gap - delta).abs() <= scale);
            proptest::prop_assert!(delta >= 0.0);
        }

        #[test]
        fn improvement_is_nonnegative_and_decreasing(n in 2u64..10_000, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let at_lo = trivariate_improvement(n, lo);
            let at_hi = trivariate_improvement(n, hi);
            proptest::prop_assert!(at_hi >= 0.0);
            proptest::prop_assert!(at_lo >= at_hi - 1e-12 * at_lo.abs());
        }
    }
}
