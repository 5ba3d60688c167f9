//! Monte Carlo probe of `p(S₁ ∩ S₂ ∩ S₃) >= μ³` for three correlated
//! projection errors. No proof is known, so the probe reports evidence and
//! never treats a candidate violation as an error.

use super::sampler::{for_each_tuple, run_chunks, success_interval, McEstimate, SimulationConfig};
use super::structure::{random_structure, CorrelationStructure};
use crate::error::{domain, Result};
use crate::marginal::{check_k_epsilon, success_probability};

/// Standard errors below `μ³` an estimate must fall to be flagged.
pub const VIOLATION_THRESHOLD_SE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    ViolationCandidate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::ViolationCandidate => "violation_candidate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureReport {
    pub structure: CorrelationStructure,
    pub estimate: McEstimate,
    pub mu: f64,
    pub mu_cubed: f64,
    /// `(estimate − μ³) / SE`.
    pub margin_in_se: f64,
    pub verdict: Verdict,
}

fn check_triple(structure: &CorrelationStructure) -> Result<()> {
    if structure.dim() != 3 {
        return domain(format!(
            "expected a 3×3 structure, got {0}×{0}",
            structure.dim()
        ));
    }
    Ok(())
}

/// Counts of `S₃`, `S₁∩S₃`, `S₂∩S₃`, `S₁∩S₂∩S₃` over one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TripleCounts {
    pub samples: u64,
    pub s3: u64,
    pub s13: u64,
    pub s23: u64,
    pub s123: u64,
}

impl TripleCounts {
    fn add(self, other: TripleCounts) -> TripleCounts {
        TripleCounts {
            samples: self.samples + other.samples,
            s3: self.s3 + other.s3,
            s13: self.s13 + other.s13,
            s23: self.s23 + other.s23,
            s123: self.s123 + other.s123,
        }
    }
}

fn count_triple_events(
    k: u64,
    epsilon: f64,
    structure: &CorrelationStructure,
    config: SimulationConfig,
) -> Result<TripleCounts> {
    check_k_epsilon(k, epsilon)?;
    check_triple(structure)?;
    let (lo, hi) = success_interval(k, epsilon);
    let inside = |x: f64| lo <= x && x <= hi;
    Ok(run_chunks(&config, |rng, len| {
        let mut c = TripleCounts {
            samples: len,
            ..TripleCounts::default()
        };
        for_each_tuple(k, structure, rng, len, |v| {
            let (a, b, s3) = (inside(v[0]), inside(v[1]), inside(v[2]));
            if s3 {
                c.s3 += 1;
                c.s13 += a as u64;
                c.s23 += b as u64;
                c.s123 += (a && b) as u64;
            }
        });
        c
    })
    .into_iter()
    .fold(TripleCounts::default(), TripleCounts::add))
}

/// Estimates `p(S₁ ∩ S₂ ∩ S₃)` and compares it with `μ³`.
pub fn test_three_success_conjecture(
    k: u64,
    epsilon: f64,
    structure: &CorrelationStructure,
    config: SimulationConfig,
) -> Result<ConjectureReport> {
    let counts = count_triple_events(k, epsilon, structure, config)?;
    let mu = success_probability(k, epsilon)?.value;
    Ok(report_from_counts(
        structure.clone(),
        &counts,
        mu,
        config.seed,
    ))
}

fn report_from_counts(
    structure: CorrelationStructure,
    counts: &TripleCounts,
    mu: f64,
    seed: u64,
) -> ConjectureReport {
    let estimate = McEstimate::from_count(counts.s123, counts.samples, seed);
    let mu_cubed = mu * mu * mu;
    let margin_in_se = estimate.z_score(mu_cubed);
    let verdict = if margin_in_se < -VIOLATION_THRESHOLD_SE {
        Verdict::ViolationCandidate
    } else {
        Verdict::Consistent
    };
    ConjectureReport {
        structure,
        estimate,
        mu,
        mu_cubed,
        margin_in_se,
        verdict,
    }
}

/// Within-`S₃` comparison of `p(S₁ ∩ S₂ | S₃)` with
/// `p(S₁ | S₃) p(S₂ | S₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalFactorization {
    pub counts: TripleCounts,
    pub joint: f64,
    pub product: f64,
    /// Standard error of `joint − product`, the within-`S₃` sample
    /// covariance of the two indicators.
    pub std_error: f64,
}

impl ConditionalFactorization {
    /// `(joint − product) / SE`.
    pub fn z_score(&self) -> f64 {
        let diff = self.joint - self.product;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else {
            0.0
        }
    }
}

pub fn conditional_factorization(
    k: u64,
    epsilon: f64,
    structure: &CorrelationStructure,
    config: SimulationConfig,
) -> Result<ConditionalFactorization> {
    let counts = count_triple_events(k, epsilon, structure, config)?;
    if counts.s3 < 2 {
        return domain("too few samples in S3 to condition on it");
    }
    let n = counts.s3 as f64;
    let a = counts.s13 as f64 / n;
    let b = counts.s23 as f64 / n;
    let joint = counts.s123 as f64 / n;
    // the four cells of (1{S₁}, 1{S₂}) inside S₃
    let n11 = counts.s123 as f64;
    let n10 = (counts.s13 - counts.s123) as f64;
    let n01 = (counts.s23 - counts.s123) as f64;
    let n00 = n - n11 - n10 - n01;
    let cells = [
        (1.0, 1.0, n11),
        (1.0, 0.0, n10),
        (0.0, 1.0, n01),
        (0.0, 0.0, n00),
    ];
    let centered = |x: f64, y: f64| (x - a) * (y - b);
    let mean: f64 = cells
        .iter()
        .map(|&(x, y, c)| c * centered(x, y))
        .sum::<f64>()
        / n;
    let variance = cells
        .iter()
        .map(|&(x, y, c)| c * (centered(x, y) - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    Ok(ConditionalFactorization {
        counts,
        joint,
        product: a * b,
        std_error: (variance / n).sqrt(),
    })
}

/// One draw of the random-structure probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeDraw {
    pub structure_seed: u64,
    pub simulation_seed: u64,
    pub report: ConjectureReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub k: u64,
    pub epsilon: f64,
    pub draws: Vec<ProbeDraw>,
}

impl ProbeReport {
    pub fn violation_candidates(&self) -> impl Iterator<Item = &ProbeDraw> {
        self.draws
            .iter()
            .filter(|d| d.report.verdict == Verdict::ViolationCandidate)
    }
}

/// Seed of the `index`-th draw, from SplitMix64 so that neighbouring master
/// seeds do not share draws.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Ambient dimension of the random unit vectors behind each structure.
pub const PROBE_AMBIENT_DIM: usize = 3;

/// Tests the conjecture on `draws` random realizable 3×3 structures. Every
/// draw records the seeds needed to reproduce it.
pub fn probe_conjecture(
    k: u64,
    epsilon: f64,
    draws: usize,
    samples: u64,
    seed: u64,
) -> Result<ProbeReport> {
    check_k_epsilon(k, epsilon)?;
    let mu = success_probability(k, epsilon)?.value;
    let draws = (0..draws as u64)
        .map(|i| {
            let structure_seed = derive_seed(seed, 2 * i);
            let simulation_seed = derive_seed(seed, 2 * i + 1);
            let structure = random_structure(3, structure_seed, PROBE_AMBIENT_DIM)?;
            let config = SimulationConfig::new(samples, simulation_seed)?;
            let counts = count_triple_events(k, epsilon, &structure, config)?;
            Ok(ProbeDraw {
                structure_seed,
                simulation_seed,
                report: report_from_counts(structure, &counts, mu, simulation_seed),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeReport { k, epsilon, draws })
}
