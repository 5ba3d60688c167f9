//! Seeded Monte Carlo oracle: correlated projection errors, joint success
//! frequencies, the three-success probe, and full projection experiments on
//! point sets.
//!
//! All estimators split the run into fixed-size chunks; chunk `i` uses
//! stream `i` of a ChaCha8 generator keyed by the master seed, and results
//! are merged in chunk order. The thread count never changes an answer.

mod conjecture;
mod points;
mod sampler;
mod structure;

pub use conjecture::{
    conditional_factorization, derive_seed, probe_conjecture, test_three_success_conjecture,
    ConditionalFactorization, ConjectureReport, ProbeDraw, ProbeReport, TripleCounts, Verdict,
    PROBE_AMBIENT_DIM, VIOLATION_THRESHOLD_SE,
};
pub use points::{
    collinear_triple, end_to_end_experiment, right_angle_triangle, ExperimentReport, PointSet,
    DATA_DEPENDENT_MAX_PAIRS,
};
pub use sampler::{
    estimate_error_covariance, estimate_error_mean, estimate_joint_success, sample_error_tuples,
    ErrorTuples, McEstimate, SimulationConfig, DEFAULT_CHUNK_SIZE,
};
pub use structure::{partial_correlation, random_structure, CorrelationStructure, PIVOT_TOL};
