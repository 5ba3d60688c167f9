//! Smallest embedding dimension `k` at which a no-failure lower bound turns
//! positive, and the comparison with the Markov-inequality dimension
//! `24 ln n / (3ε² − 2ε³)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::marginal::{check_k_epsilon, ln_failure_probability, pair_count};

/// Bracket growth stops here.
pub const SEARCH_LIMIT: u64 = 1 << 32;

/// Half-width of the scan around the bisection answer.
const LOCAL_SCAN: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Marginal,
    Bivariate,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Marginal => "marginal",
            BoundKind::Bivariate => "bivariate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionSearchResult {
    pub k_min: u64,
    pub bound_kind: BoundKind,
    /// Number of bound evaluations spent on bracketing and bisection.
    pub iterations: u32,
    /// Last bracket: the bound is nonpositive at `.0` (or `.0 = 0`) and
    /// positive at `.1`.
    pub bracket: (u64, u64),
    /// False when the local scan found the bound not monotone around the
    /// bisection answer and the exhaustive scan was used instead.
    pub monotonicity_verified: bool,
}

/// Whether the chosen bound is positive at `k`, decided in log space:
/// marginal `ln f + ln C < 0`, bivariate `ln f + ln(⌊C/2⌋(2 − f) + C mod 2) < 0`.
pub fn bound_is_positive(n: u64, k: u64, epsilon: f64, kind: BoundKind) -> Result<bool> {
    check_k_epsilon(k, epsilon)?;
    let ln_f = ln_failure_probability(k, epsilon)?;
    let c = pair_count(n);
    let ln_weight = match kind {
        BoundKind::Marginal => (c as f64).ln(),
        BoundKind::Bivariate => {
            let f = ln_f.exp();
            ((c / 2) as f64 * (2.0 - f) + (c % 2) as f64).ln()
        }
    };
    Ok(ln_f + ln_weight < 0.0)
}

/// Bracket doubling from `k = 1`, integer bisection, then a scan of
/// `k_min ± 5`. If the scan disagrees with the bisection the answer is
/// replaced by an exhaustive scan from `k = 1`.
pub fn min_dimension(n: u64, epsilon: f64, kind: BoundKind) -> Result<DimensionSearchResult> {
    if n < 2 {
        return crate::error::domain(format!("need at least two points, got n = {n}"));
    }
    check_k_epsilon(1, epsilon)?;
    let positive = |k: u64| bound_is_positive(n, k, epsilon, kind);
    let mut iterations = 1u32;
    let (mut low, mut high) = (0u64, 1u64);
    while !positive(high)? {
        low = high;
        high *= 2;
        iterations += 1;
        if high > SEARCH_LIMIT {
            return Err(Error::SearchExhausted {
                bound: kind.as_str(),
                limit: SEARCH_LIMIT,
            });
        }
    }
    while high - low > 1 {
        let mid = low + (high - low) / 2;
        if positive(mid)? {
            high = mid;
        } else {
            low = mid;
        }
        iterations += 1;
    }
    let k_min = high;
    let scan_lo = k_min.saturating_sub(LOCAL_SCAN).max(1);
    let mut consistent = true;
    for k in scan_lo..=k_min + LOCAL_SCAN {
        if positive(k)? != (k >= k_min) {
            consistent = false;
            break;
        }
    }
    if consistent {
        return Ok(DimensionSearchResult {
            k_min,
            bound_kind: kind,
            iterations,
            bracket: (low, high),
            monotonicity_verified: true,
        });
    }
    let mut k = 1;
    while !positive(k)? {
        k += 1;
    }
    Ok(DimensionSearchResult {
        k_min: k,
        bound_kind: kind,
        iterations,
        bracket: (k - 1, k),
        monotonicity_verified: false,
    })
}

/// `⌈24 ln n / (3ε² − 2ε³)⌉`.
pub fn dasgupta_dimension(n: f64, epsilon: f64) -> Result<u64> {
    check_k_epsilon(1, epsilon)?;
    if !(n > 1.0) || !n.is_finite() {
        return crate::error::domain(format!("point count must be finite and > 1, got {n}"));
    }
    let denom = epsilon * epsilon * (3.0 - 2.0 * epsilon);
    Ok((24.0 * n.ln() / denom).ceil() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionRatioRow {
    pub n: u64,
    pub epsilon: f64,
    pub k_marginal: u64,
    pub k_bivariate: u64,
    pub k_dasgupta: u64,
    /// `k_bivariate / k_dasgupta`.
    pub ratio: f64,
}

impl DimensionRatioRow {
    pub fn bounds_agree(&self) -> bool {
        self.k_marginal == self.k_bivariate
    }
}

/// One row per `(n, ε)`, `n` outer and `ε` inner; cells run in parallel.
pub fn dimension_ratio_sweep(
    n_grid: &[u64],
    epsilon_grid: &[f64],
) -> Result<Vec<DimensionRatioRow>> {
    if n_grid.is_empty() || epsilon_grid.is_empty() {
        return crate::error::domain("sweep grids must be nonempty");
    }
    let cells: Vec<(u64, f64)> = n_grid
        .iter()
        .flat_map(|&n| epsilon_grid.iter().map(move |&e| (n, e)))
        .collect();
    cells
        .par_iter()
        .map(|&(n, epsilon)| {
            let k_marginal = min_dimension(n, epsilon, BoundKind::Marginal)?.k_min;
            let k_bivariate = min_dimension(n, epsilon, BoundKind::Bivariate)?.k_min;
            let k_dasgupta = dasgupta_dimension(n as f64, epsilon)?;
            Ok(DimensionRatioRow {
                n,
                epsilon,
                k_marginal,
                k_bivariate,
                k_dasgupta,
                ratio: k_bivariate as f64 / k_dasgupta as f64,
            })
        })
        .collect()
}

/// Twenty log-spaced `n` in `[10⁴, 10⁸]` (rounded) and five evenly spaced
/// `ε` in `[0.01, 0.2]`.
pub fn reference_grid() -> (Vec<u64>, Vec<f64>) {
    let n = (0..20)
        .map(|i| 10f64.powf(4.0 + 4.0 * i as f64 / 19.0).round() as u64)
        .collect();
    let eps = (0..5).map(|i| 0.01 + 0.19 * i as f64 / 4.0).collect();
    (n, eps)
}
