use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::structure::CorrelationStructure;
use crate::error::{domain, Result};
use crate::marginal::check_k_epsilon;

pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 14;

/// Sample count, master seed and chunking. Chunk `i` draws from stream `i`
/// of the ChaCha8 generator keyed by `seed`, and chunk results are merged in
/// index order, so results depend only on these three numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub samples: u64,
    pub seed: u64,
    pub chunk_size: u64,
}

impl SimulationConfig {
    pub fn new(samples: u64, seed: u64) -> Result<Self> {
        Self::with_chunk_size(samples, seed, DEFAULT_CHUNK_SIZE)
    }

    pub fn with_chunk_size(samples: u64, seed: u64, chunk_size: u64) -> Result<Self> {
        if samples == 0 || chunk_size == 0 {
            return domain("samples and chunk_size must be positive");
        }
        Ok(Self {
            samples,
            seed,
            chunk_size,
        })
    }

    pub fn chunk_count(&self) -> u64 {
        self.samples.div_ceil(self.chunk_size)
    }

    fn chunk_len(&self, index: u64) -> u64 {
        let start = index * self.chunk_size;
        self.chunk_size.min(self.samples - start)
    }
}

pub(crate) fn chunk_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `work(rng, len)` on every chunk in parallel and returns the results
/// in chunk order.
pub(crate) fn run_chunks<T, F>(config: &SimulationConfig, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    (0..config.chunk_count())
        .into_par_iter()
        .map(|index| work(&mut chunk_rng(config.seed, index), config.chunk_len(index)))
        .collect()
}

/// Sample mean with its standard error and the run that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√samples`.
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// From a success count; the sample variance of a 0/1 variable is
    /// `h (N − h) / (N (N − 1))`.
    pub fn from_count(hits: u64, samples: u64, seed: u64) -> Self {
        let n = samples as f64;
        let h = hits as f64;
        let variance = if samples > 1 {
            h * (n - h) / (n * (n - 1.0))
        } else {
            0.0
        };
        Self {
            mean: h / n,
            std_error: (variance / n).sqrt(),
            samples,
            seed,
        }
    }

    /// `(mean − target) / std_error`; infinite with the sign of the
    /// difference when the standard error is zero.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = self.mean - target;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }

    /// `|mean − target| <= width · std_error`.
    pub fn within(&self, target: f64, width: f64) -> bool {
        (self.mean - target).abs() <= width * self.std_error
    }
}

/// Streaming mean and sum of squared deviations, mergeable (Chan et al.).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub(crate) fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub(crate) fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let (a, b, n) = (self.count as f64, other.count as f64, count as f64);
        Moments {
            count,
            mean: self.mean + delta * b / n,
            m2: self.m2 + other.m2 + delta * delta * a * b / n,
        }
    }

    pub(crate) fn estimate(&self, seed: u64) -> McEstimate {
        let n = self.count as f64;
        let variance = if self.count > 1 {
            self.m2 / (n - 1.0)
        } else {
            0.0
        };
        McEstimate {
            mean: self.mean,
            std_error: (variance / n).sqrt(),
            samples: self.count,
            seed,
        }
    }
}

/// Draws one tuple `Vᵢ = Σ_ℓ Yᵢℓ²`, `Y·ℓ = L Z·ℓ`, into `out`.
fn draw_tuple(
    k: u64,
    structure: &CorrelationStructure,
    rng: &mut ChaCha8Rng,
    z: &mut [f64],
    y: &mut [f64],
    out: &mut [f64],
) {
    out.fill(0.0);
    for _ in 0..k {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(rng);
        }
        structure.correlate(z, y);
        for (o, yi) in out.iter_mut().zip(y.iter()) {
            *o += yi * yi;
        }
    }
}

/// Calls `visit` on every tuple of one chunk.
pub(crate) fn for_each_tuple(
    k: u64,
    structure: &CorrelationStructure,
    rng: &mut ChaCha8Rng,
    len: u64,
    mut visit: impl FnMut(&[f64]),
) {
    let m = structure.dim();
    let (mut z, mut y, mut out) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    for _ in 0..len {
        draw_tuple(k, structure, rng, &mut z, &mut y, &mut out);
        visit(&out);
    }
}

/// Sequential stream of projection-error tuples `(V₁, …, V_m)`; yields the
/// same tuples, in the same order, that the parallel estimators consume.
pub struct ErrorTuples {
    k: u64,
    structure: CorrelationStructure,
    config: SimulationConfig,
    chunk: u64,
    left_in_chunk: u64,
    rng: ChaCha8Rng,
    buffers: (Vec<f64>, Vec<f64>),
}

impl Iterator for ErrorTuples {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        if self.left_in_chunk == 0 {
            self.chunk += 1;
            if self.chunk >= self.config.chunk_count() {
                return None;
            }
            self.rng = chunk_rng(self.config.seed, self.chunk);
            self.left_in_chunk = self.config.chunk_len(self.chunk);
        }
        self.left_in_chunk -= 1;
        let mut out = vec![0.0; self.structure.dim()];
        let (z, y) = &mut self.buffers;
        draw_tuple(self.k, &self.structure, &mut self.rng, z, y, &mut out);
        Some(out)
    }
}

pub fn sample_error_tuples(
    k: u64,
    structure: &CorrelationStructure,
    config: SimulationConfig,
) -> Result<ErrorTuples> {
    if k == 0 {
        return domain("embedding dimension k must be >= 1");
    }
    let m = structure.dim();
    Ok(ErrorTuples {
        k,
        structure: structure.clone(),
        config,
        chunk: 0,
        left_in_chunk: config.chunk_len(0),
        rng: chunk_rng(config.seed, 0),
        buffers: (vec![0.0; m], vec![0.0; m]),
    })
}

/// Frequency with which all `m` errors fall in `[k(1 − ε), k(1 + ε)]`.
pub fn estimate_joint_success(
    k: u64,
    epsilon: f64,
    structure: &CorrelationStructure,
    config: SimulationConfig,
) -> Result<McEstimate> {
    check_k_epsilon(k, epsilon)?;
    let (lo, hi) = success_interval(k, epsilon);
    let hits: u64 = run_chunks(&config, |rng, len| {
        let mut hits = 0u64;
        for_each_tuple(k, structure, rng, len, |v| {
            if v.iter().all(|&x| lo <= x && x <= hi) {
                hits += 1;
            }
        });
        hits
    })
    .into_iter()
    .sum();
    Ok(McEstimate::from_count(hits, config.samples, config.seed))
}

pub(crate) fn success_interval(k: u64, epsilon: f64) -> (f64, f64) {
    let kf = k as f64;
    (kf * (1.0 - epsilon), kf * (1.0 + epsilon))
}

/// Mean of `Vᵢ`.
pub fn estimate_error_mean(
    k: u64,
    structure: &CorrelationStructure,
    i: usize,
    config: SimulationConfig,
) -> Result<McEstimate> {
    moment_estimate(k, structure, config, i, |v| v[i])
}

/// `cov(Vᵢ, Vⱼ)`, estimated as the sample mean of `(Vᵢ − k)(Vⱼ − k)` with
/// the known marginal mean `k`.
pub fn estimate_error_covariance(
    k: u64,
    structure: &CorrelationStructure,
    i: usize,
    j: usize,
    config: SimulationConfig,
) -> Result<McEstimate> {
    let kf = k as f64;
    moment_estimate(k, structure, config, i.max(j), |v| {
        (v[i] - kf) * (v[j] - kf)
    })
}

fn moment_estimate(
    k: u64,
    structure: &CorrelationStructure,
    config: SimulationConfig,
    max_index: usize,
    statistic: impl Fn(&[f64]) -> f64 + Sync,
) -> Result<McEstimate> {
    if k == 0 {
        return domain("embedding dimension k must be >= 1");
    }
    if max_index >= structure.dim() {
        return domain(format!(
            "index {max_index} out of range for a {}-dimensional structure",
            structure.dim()
        ));
    }
    let moments = run_chunks(&config, |rng, len| {
        let mut acc = Moments::default();
        for_each_tuple(k, structure, rng, len, |v| acc.push(statistic(v)));
        acc
    })
    .into_iter()
    .fold(Moments::default(), Moments::merge);
    Ok(moments.estimate(config.seed))
}
