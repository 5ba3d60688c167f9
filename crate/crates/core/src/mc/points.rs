//! Point sets and the full projection experiment: draw `R ∈ R^{d×k}` with
//! i.i.d. `N(0, 1)` entries, project every point, and check all `C(n, 2)`
//! pairwise distances at once.

use rand_distr::{Distribution, StandardNormal};

use super::sampler::{run_chunks, success_interval, McEstimate, SimulationConfig};
use super::structure::normalized;
use crate::bounds::{data_dependent_lower_bound, BoundReport, PairingAssignment};
use crate::error::{domain, Error, Result};
use crate::marginal::EmbeddingSpec;

/// `n` points in `R^d`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 {
            return domain("a point set needs at least one point with at least one coordinate");
        }
        if let Some(i) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::Dataset {
                line: i + 1,
                message: format!("expected {dim} coordinates, got {}", rows[i].len()),
            });
        }
        Ok(Self {
            dim,
            coords: rows.concat(),
        })
    }

    /// One point per line, coordinates separated by whitespace. Blank lines
    /// and lines starting with `#` are skipped; the first point fixes the
    /// dimension.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dim = None;
        let mut coords = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| Error::Dataset {
                            line: index + 1,
                            message: format!("not a finite number: {t:?}"),
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(Error::Dataset {
                        line: index + 1,
                        message: format!("expected {d} coordinates, got {}", row.len()),
                    })
                }
                _ => {}
            }
            coords.extend(row);
        }
        match dim {
            Some(dim) => Ok(Self { dim, coords }),
            None => Err(Error::Dataset {
                line: 0,
                message: "no points found".into(),
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Index pairs `(i, j)`, `i < j`, in lexicographic order; this is the
    /// order of the failure events `F₁, F₂, …`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect()
    }

    /// Unit difference vectors `w̃` of every pair, in [`Self::pairs`] order.
    pub fn pair_directions(&self) -> Result<Vec<Vec<f64>>> {
        self.pairs()
            .into_iter()
            .map(|(i, j)| {
                let diff: Vec<f64> = self
                    .point(j)
                    .iter()
                    .zip(self.point(i))
                    .map(|(a, b)| a - b)
                    .collect();
                normalized(&diff).map_err(|_| Error::Dataset {
                    line: j + 1,
                    message: format!("points {} and {} coincide", i + 1, j + 1),
                })
            })
            .collect()
    }

    /// Pairs failure events `(F₁, F₂), (F₃, F₄), …` in [`Self::pairs`] order
    /// and records `ρ² = (w̃ · w̃′)²` for each.
    pub fn identity_pairing(&self) -> Result<PairingAssignment> {
        let dirs = self.pair_directions()?;
        let rho_sq = dirs
            .chunks_exact(2)
            .map(|p| {
                let dot: f64 = p[0].iter().zip(&p[1]).map(|(a, b)| a * b).sum();
                (dot * dot).min(1.0)
            })
            .collect();
        PairingAssignment::new(rho_sq)
    }
}

/// `0`, `e₁`, `e₂` in `R^10`: two orthogonal pairs and one diagonal pair.
pub fn right_angle_triangle() -> PointSet {
    let mut e1 = vec![0.0; 10];
    e1[0] = 1.0;
    let mut e2 = vec![0.0; 10];
    e2[1] = 1.0;
    PointSet::from_rows(&[vec![0.0; 10], e1, e2]).expect("fixture is well formed")
}

/// `0`, `e₁`, `3e₁` in `R^10`: every pair has the same direction.
pub fn collinear_triple() -> PointSet {
    let mut e1 = vec![0.0; 10];
    e1[0] = 1.0;
    let far: Vec<f64> = e1.iter().map(|x| 3.0 * x).collect();
    PointSet::from_rows(&[vec![0.0; 10], e1, far]).expect("fixture is well formed")
}

/// Pair counts above this skip the data-dependent bound, which needs one
/// quadrature per pair.
pub const DATA_DEPENDENT_MAX_PAIRS: u128 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub no_failure: McEstimate,
    pub bounds: BoundReport,
    pub data_dependent_lb: Option<f64>,
    /// Failure frequency of each pair, in [`PointSet::pairs`] order.
    pub per_pair_failures: Vec<McEstimate>,
}

/// Monte Carlo frequency of the event that no pairwise distance is
/// distorted by more than `ε`, next to every analytic bound.
pub fn end_to_end_experiment(
    points: &PointSet,
    k: u64,
    epsilon: f64,
    config: SimulationConfig,
) -> Result<ExperimentReport> {
    let n = points.len();
    let spec = EmbeddingSpec::new(n as u64, k, epsilon)?;
    let pairs = points.pairs();
    let inverse_norms: Vec<f64> = points
        .pair_directions()?
        .iter()
        .zip(&pairs)
        .map(|(_, &(i, j))| {
            let sq: f64 = points
                .point(j)
                .iter()
                .zip(points.point(i))
                .map(|(a, b)| (a - b).powi(2))
                .sum();
            1.0 / sq
        })
        .collect();
    let (lo, hi) = success_interval(k, epsilon);
    let d = points.dim();
    let k_us = k as usize;

    let chunks = run_chunks(&config, |rng, len| {
        let mut matrix = vec![0.0; d * k_us];
        let mut projected = vec![0.0; n * k_us];
        let mut failures = vec![0u64; pairs.len()];
        let mut clean = 0u64;
        for _ in 0..len {
            for x in matrix.iter_mut() {
                *x = StandardNormal.sample(rng);
            }
            // projected[p] = Rᵀ x_p
            for p in 0..n {
                let out = &mut projected[p * k_us..(p + 1) * k_us];
                out.fill(0.0);
                for (a, &xa) in points.point(p).iter().enumerate() {
                    if xa != 0.0 {
                        let row = &matrix[a * k_us..(a + 1) * k_us];
                        for (o, r) in out.iter_mut().zip(row) {
                            *o += xa * r;
                        }
                    }
                }
            }
            let mut any = false;
            for (idx, &(i, j)) in pairs.iter().enumerate() {
                let (pi, pj) = (
                    &projected[i * k_us..(i + 1) * k_us],
                    &projected[j * k_us..(j + 1) * k_us],
                );
                let v = pi.iter().zip(pj).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
                    * inverse_norms[idx];
                if !(lo <= v && v <= hi) {
                    failures[idx] += 1;
                    any = true;
                }
            }
            if !any {
                clean += 1;
            }
        }
        (clean, failures)
    });

    let mut clean = 0u64;
    let mut failures = vec![0u64; pairs.len()];
    for (c, f) in chunks {
        clean += c;
        for (total, part) in failures.iter_mut().zip(f) {
            *total += part;
        }
    }
    let bounds = BoundReport::build(spec)?;
    let data_dependent_lb = if spec.pair_count() <= DATA_DEPENDENT_MAX_PAIRS {
        Some(data_dependent_lower_bound(
            &spec,
            &points.identity_pairing()?,
        )?)
    } else {
        None
    };
    Ok(ExperimentReport {
        no_failure: McEstimate::from_count(clean, config.samples, config.seed),
        bounds,
        data_dependent_lb,
        per_pair_failures: failures
            .into_iter()
            .map(|f| McEstimate::from_count(f, config.samples, config.seed))
            .collect(),
    })
}
