use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Error, Result};

/// Smallest pivot treated as nonzero in the semidefinite Cholesky factor.
pub const PIVOT_TOL: f64 = 1e-12;

/// Off-diagonal residual allowed below a zero pivot; rounding in a rank
/// deficient matrix leaves residuals of order `√PIVOT_TOL`.
const RESIDUAL_TOL: f64 = 1e-6;

/// Signed correlations `ρᵢⱼ = w̃ᵢ · w̃ⱼ` between the unit difference vectors
/// of `m` point pairs, with its lower-triangular square-root factor.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationStructure {
    dim: usize,
    rho: Vec<f64>,
    factor: Vec<f64>,
}

impl CorrelationStructure {
    /// From a row-major `m × m` matrix. Fails unless the matrix is symmetric
    /// with unit diagonal, entries in `[−1, 1]`, and positive semidefinite.
    pub fn new(dim: usize, rho: Vec<f64>) -> Result<Self> {
        if dim == 0 || rho.len() != dim * dim {
            return domain(format!(
                "expected a {dim}×{dim} matrix, got {} entries",
                rho.len()
            ));
        }
        for i in 0..dim {
            if rho[i * dim + i] != 1.0 {
                return domain(format!(
                    "diagonal entry {i} is {}, expected 1",
                    rho[i * dim + i]
                ));
            }
            for j in 0..i {
                let (a, b) = (rho[i * dim + j], rho[j * dim + i]);
                if a != b {
                    return domain(format!("matrix is not symmetric at ({i}, {j})"));
                }
                if !(a.abs() <= 1.0) {
                    return domain(format!("correlation ({i}, {j}) = {a} is outside [-1, 1]"));
                }
            }
        }
        let factor = semidefinite_cholesky(dim, &rho)?;
        Ok(Self { dim, rho, factor })
    }

    pub fn identity(dim: usize) -> Self {
        let mut rho = vec![0.0; dim * dim];
        for i in 0..dim {
            rho[i * dim + i] = 1.0;
        }
        Self::new(dim, rho).expect("identity is positive definite")
    }

    pub fn pair(rho: f64) -> Result<Self> {
        Self::new(2, vec![1.0, rho, rho, 1.0])
    }

    pub fn triple(rho12: f64, rho13: f64, rho23: f64) -> Result<Self> {
        Self::new(
            3,
            vec![1.0, rho12, rho13, rho12, 1.0, rho23, rho13, rho23, 1.0],
        )
    }

    /// Gram matrix of the normalized `vectors`, which is realizable by
    /// construction.
    pub fn from_vectors(vectors: &[Vec<f64>]) -> Result<Self> {
        let units = vectors
            .iter()
            .map(|v| normalized(v))
            .collect::<Result<Vec<_>>>()?;
        let dim = units.len();
        let mut rho = vec![0.0; dim * dim];
        for i in 0..dim {
            rho[i * dim + i] = 1.0;
            for j in 0..i {
                if units[i].len() != units[j].len() {
                    return domain("vectors have different lengths");
                }
                let dot: f64 = units[i].iter().zip(&units[j]).map(|(a, b)| a * b).sum();
                let dot = dot.clamp(-1.0, 1.0);
                rho[i * dim + j] = dot;
                rho[j * dim + i] = dot;
            }
        }
        Self::new(dim, rho)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.dim + j]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.rho
    }

    /// Row-major lower-triangular `L` with `L Lᵀ` equal to the matrix.
    pub fn factor(&self) -> &[f64] {
        &self.factor
    }

    /// `y = L z`.
    pub(crate) fn correlate(&self, z: &[f64], y: &mut [f64]) {
        let m = self.dim;
        for i in 0..m {
            let row = &self.factor[i * m..i * m + i + 1];
            y[i] = row.iter().zip(z).map(|(l, z)| l * z).sum();
        }
    }
}

pub(crate) fn normalized(v: &[f64]) -> Result<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return domain("direction vector must be nonzero and finite");
    }
    Ok(v.iter().map(|x| x / norm).collect())
}

/// Cholesky factorization that tolerates zero pivots: a pivot within
/// `PIVOT_TOL` of zero gives a zero column, provided the entries below it
/// also vanish.
fn semidefinite_cholesky(dim: usize, a: &[f64]) -> Result<Vec<f64>> {
    let mut l = vec![0.0f64; dim * dim];
    for j in 0..dim {
        let diag = a[j * dim + j] - (0..j).map(|p| l[j * dim + p].powi(2)).sum::<f64>();
        if diag < -PIVOT_TOL {
            return Err(Error::NotPositiveSemidefinite {
                pivot: j,
                value: diag,
            });
        }
        let pivot = if diag > PIVOT_TOL { diag.sqrt() } else { 0.0 };
        l[j * dim + j] = pivot;
        for i in j + 1..dim {
            let residual =
                a[i * dim + j] - (0..j).map(|p| l[i * dim + p] * l[j * dim + p]).sum::<f64>();
            if pivot == 0.0 {
                if residual.abs() > RESIDUAL_TOL {
                    return Err(Error::NotPositiveSemidefinite {
                        pivot: j,
                        value: diag,
                    });
                }
            } else {
                l[i * dim + j] = residual / pivot;
            }
        }
    }
    Ok(l)
}

/// `m` independent uniformly random unit vectors in `R^d` and their Gram
/// matrix.
pub fn random_structure(m: usize, seed: u64, ambient_dim: usize) -> Result<CorrelationStructure> {
    if m == 0 || m > ambient_dim {
        return domain(format!("need 1 <= m <= d, got m = {m}, d = {ambient_dim}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vectors: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            (0..ambient_dim)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect()
        })
        .collect();
    CorrelationStructure::from_vectors(&vectors)
}

/// `ρ₁₂·₃ = (ρ₁₂ − ρ₁₃ρ₂₃) / √((1 − ρ₁₃²)(1 − ρ₂₃²))`.
pub fn partial_correlation(rho12: f64, rho13: f64, rho23: f64) -> Result<f64> {
    if !(rho13.abs() < 1.0 && rho23.abs() < 1.0) {
        return domain(format!(
            "partial correlation needs |ρ13| < 1 and |ρ23| < 1, got {rho13}, {rho23}"
        ));
    }
    Ok((rho12 - rho13 * rho23) / ((1.0 - rho13 * rho13) * (1.0 - rho23 * rho23)).sqrt())
}
