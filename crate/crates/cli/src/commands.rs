//! Command implementations. Each returns its full stdout text so that the
//! binary stays a thin shell and the commands can be tested directly.

use std::fmt::{self, Write as _};

use jlbound::bivariate::{joint_success_probability, JointMethod};
use jlbound::bounds::{BoundReport, TRIVARIATE_CONDITION};
use jlbound::embedding::{
    dasgupta_dimension, dimension_ratio_sweep, min_dimension, reference_grid, BoundKind,
};
use jlbound::marginal::{success_probability, EmbeddingSpec, SuccessRate};
use jlbound::mc::{
    end_to_end_experiment, probe_conjecture, PointSet, SimulationConfig, VIOLATION_THRESHOLD_SE,
};
use jlbound::Error;

use crate::grid::{GridError, SweepGrid};
use crate::table::{format_real, Table, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum CommandError {
    Usage(String),
    Numerical(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Usage(_) => EXIT_USAGE,
            CommandError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommandError::Usage(m) | CommandError::Numerical(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CommandError {}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Dataset { .. } | Error::PairingLength { .. } => {
                CommandError::Usage(e.to_string())
            }
            Error::NonConvergence { .. }
            | Error::NotPositiveSemidefinite { .. }
            | Error::SearchExhausted { .. } => CommandError::Numerical(e.to_string()),
        }
    }
}

impl From<GridError> for CommandError {
    fn from(e: GridError) -> Self {
        CommandError::Usage(e.0)
    }
}

pub type CommandResult<T> = Result<T, CommandError>;

/// Text written to stdout and the exit code to finish with.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub exit_code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Self {
            text,
            exit_code: EXIT_OK,
        }
    }
}

fn r(x: f64) -> String {
    format_real(x)
}

fn pair_count_value(c: u128) -> Value {
    match u64::try_from(c) {
        Ok(v) => Value::Int(v),
        Err(_) => Value::Text(c.to_string()),
    }
}

pub fn bounds_table(reports: &[BoundReport]) -> Table {
    let mut t = Table::new(&[
        "n",
        "k",
        "epsilon",
        "pair_count",
        "parity",
        "mu",
        "failure",
        "marginal_lb",
        "bivariate_lb",
        "delta",
        "trivariate_lb_conditional",
        "geometry_value",
    ]);
    for rep in reports {
        t.push(vec![
            rep.spec.n.into(),
            rep.spec.k.into(),
            rep.spec.epsilon.into(),
            pair_count_value(rep.spec.pair_count()),
            rep.pair_count_parity.as_str().into(),
            rep.mu.value.into(),
            rep.failure.value.into(),
            rep.marginal_lb.into(),
            rep.bivariate_lb.into(),
            rep.delta.into(),
            rep.trivariate_lb.value.into(),
            rep.geometry_value.value.into(),
        ]);
    }
    t
}

/// `bounds`: every bound for one `(n, k, ε)`.
pub fn cmd_bounds(n: u64, k: u64, epsilon: f64, csv: bool) -> CommandResult<Output> {
    let report = BoundReport::build(EmbeddingSpec::new(n, k, epsilon)?)?;
    if csv {
        return Ok(Output::ok(bounds_table(&[report]).to_csv_string()));
    }
    let mut s = String::new();
    let _ = writeln!(s, "n = {n}");
    let _ = writeln!(s, "k = {k}");
    let _ = writeln!(s, "epsilon = {}", r(epsilon));
    let _ = writeln!(
        s,
        "pairs C(n,2) = {} ({})",
        report.spec.pair_count(),
        report.pair_count_parity.as_str()
    );
    let _ = writeln!(s, "mu = {}", r(report.mu.value));
    let _ = writeln!(s, "1 - mu = {}", r(report.failure.value));
    let _ = writeln!(s, "marginal lower bound = {}", r(report.marginal_lb));
    let _ = writeln!(s, "bivariate lower bound = {}", r(report.bivariate_lb));
    let _ = writeln!(s, "delta = {}", r(report.delta));
    let _ = writeln!(
        s,
        "trivariate lower bound (conditional) = {}",
        r(report.trivariate_lb.value)
    );
    let _ = writeln!(s, "  {TRIVARIATE_CONDITION}");
    let _ = writeln!(
        s,
        "geometry value (not a general bound) = {}",
        r(report.geometry_value.value)
    );
    let _ = writeln!(s, "  {}", report.geometry_value.condition);
    Ok(Output::ok(s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    SuccessProb,
    JointProb,
    EmbeddingDim,
    BoundDelta,
}

/// Grid overrides for `sweep`; `None` keeps the figure's default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOverrides {
    pub n: Option<String>,
    pub k: Option<String>,
    pub eps: Option<String>,
    pub rho_sq: Option<String>,
}

pub const DEFAULT_SUCCESS_K: &str = "10,20,50,100,200,500,1000,2000,5000,10000";
pub const DEFAULT_SUCCESS_EPS: &str = "0.01,0.025,0.05,0.1,0.2";
pub const DEFAULT_JOINT_K: &str = "1000";
pub const DEFAULT_JOINT_EPS: &str = "0.025";
pub const DEFAULT_JOINT_RHO_SQ: &str = "linspace:0:1:11";
pub const DEFAULT_DIM_N: &str = "logspace:1e4:1e8:20";
pub const DEFAULT_DIM_EPS: &str = "linspace:0.01:0.2:5";
pub const DEFAULT_DELTA_N: &str = "100000";
pub const DEFAULT_DELTA_K: &str = "2000,4000,6000,8000,10000";
pub const DEFAULT_DELTA_EPS: &str = "0.1";

fn axis(name: &str, given: &Option<String>, default: &str) -> CommandResult<SweepGrid> {
    Ok(SweepGrid::parse(name, given.as_deref().unwrap_or(default))?)
}

fn k_axis(given: &Option<String>, default: &str) -> CommandResult<Vec<u64>> {
    Ok(axis("k", given, default)?.integers(1)?)
}

fn n_axis(given: &Option<String>, default: &str) -> CommandResult<Vec<u64>> {
    Ok(axis("n", given, default)?.integers(2)?)
}

fn eps_axis(given: &Option<String>, default: &str) -> CommandResult<Vec<f64>> {
    Ok(axis("eps", given, default)?
        .require("in (0, 1)", |e| e > 0.0 && e < 1.0)?
        .values)
}

fn rho_axis(given: &Option<String>, default: &str) -> CommandResult<Vec<f64>> {
    Ok(axis("rho-sq", given, default)?
        .require("in [0, 1]", |r| (0.0..=1.0).contains(&r))?
        .values)
}

/// `sweep`: one CSV row per grid cell, row-major in the order of the
/// columns.
pub fn cmd_sweep(figure: Figure, o: &SweepOverrides) -> CommandResult<Table> {
    match figure {
        Figure::SuccessProb => {
            let ks = k_axis(&o.k, DEFAULT_SUCCESS_K)?;
            let eps = eps_axis(&o.eps, DEFAULT_SUCCESS_EPS)?;
            let mut t = Table::new(&["k", "epsilon", "mu"]);
            for &k in &ks {
                for &e in &eps {
                    t.push(vec![
                        k.into(),
                        e.into(),
                        success_probability(k, e)?.value.into(),
                    ]);
                }
            }
            Ok(t)
        }
        Figure::JointProb => {
            let ks = k_axis(&o.k, DEFAULT_JOINT_K)?;
            let eps = eps_axis(&o.eps, DEFAULT_JOINT_EPS)?;
            let rhos = rho_axis(&o.rho_sq, DEFAULT_JOINT_RHO_SQ)?;
            let mut t = Table::new(&["k", "epsilon", "rho_sq", "p_joint", "method"]);
            for &k in &ks {
                for &e in &eps {
                    for &rho in &rhos {
                        let p = joint_success_probability(k, e, rho, JointMethod::Auto)?;
                        t.push(vec![
                            k.into(),
                            e.into(),
                            rho.into(),
                            p.value.into(),
                            p.method.as_str().into(),
                        ]);
                    }
                }
            }
            Ok(t)
        }
        Figure::EmbeddingDim => {
            let (ns, eps) = if o.n.is_none() && o.eps.is_none() {
                reference_grid()
            } else {
                (
                    n_axis(&o.n, DEFAULT_DIM_N)?,
                    eps_axis(&o.eps, DEFAULT_DIM_EPS)?,
                )
            };
            let rows = dimension_ratio_sweep(&ns, &eps)?;
            let mut t = Table::new(&[
                "n",
                "epsilon",
                "k_marginal",
                "k_bivariate",
                "k_dasgupta",
                "ratio",
            ]);
            for row in rows {
                t.push(vec![
                    row.n.into(),
                    row.epsilon.into(),
                    row.k_marginal.into(),
                    row.k_bivariate.into(),
                    row.k_dasgupta.into(),
                    row.ratio.into(),
                ]);
            }
            Ok(t)
        }
        Figure::BoundDelta => {
            let ns = n_axis(&o.n, DEFAULT_DELTA_N)?;
            let ks = k_axis(&o.k, DEFAULT_DELTA_K)?;
            let eps = eps_axis(&o.eps, DEFAULT_DELTA_EPS)?;
            let mut reports = Vec::new();
            for &n in &ns {
                for &k in &ks {
                    for &e in &eps {
                        reports.push(BoundReport::build(EmbeddingSpec::new(n, k, e)?)?);
                    }
                }
            }
            Ok(bounds_table(&reports))
        }
    }
}

/// `min-dim`: smallest `k` with a positive bound.
pub fn cmd_min_dim(n: u64, epsilon: f64, kind: BoundKind) -> CommandResult<Output> {
    let result = min_dimension(n, epsilon, kind)?;
    let dasgupta = dasgupta_dimension(n as f64, epsilon)?;
    let mut s = String::new();
    let _ = writeln!(s, "n = {n}");
    let _ = writeln!(s, "epsilon = {}", r(epsilon));
    let _ = writeln!(s, "bound = {}", kind.as_str());
    let _ = writeln!(s, "k_min = {}", result.k_min);
    let _ = writeln!(s, "bracket = [{}, {}]", result.bracket.0, result.bracket.1);
    let _ = writeln!(s, "iterations = {}", result.iterations);
    let _ = writeln!(
        s,
        "monotonicity_verified = {}",
        result.monotonicity_verified
    );
    let _ = writeln!(s, "dasgupta_dimension = {dasgupta}");
    let _ = writeln!(s, "ratio = {}", r(result.k_min as f64 / dasgupta as f64));
    Ok(Output::ok(s))
}

/// Uses `seed` if given, otherwise draws one from the OS.
pub fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn seed_line(seed: u64, given: bool) -> String {
    if given {
        format!("seed = {seed}\n")
    } else {
        format!("seed = {seed} (generated; pass --seed {seed} to reproduce)\n")
    }
}

/// `simulate`: projection experiment on a point set.
pub fn cmd_simulate(
    points: &PointSet,
    k: u64,
    epsilon: f64,
    samples: u64,
    seed: Option<u64>,
    chunk_size: u64,
) -> CommandResult<Output> {
    let resolved = resolve_seed(seed);
    let config = SimulationConfig::with_chunk_size(samples, resolved, chunk_size)?;
    let rep = end_to_end_experiment(points, k, epsilon, config)?;
    let b = &rep.bounds;
    let freq = rep.no_failure;
    let mut s = seed_line(resolved, seed.is_some());
    let _ = writeln!(
        s,
        "points = {}, dimension = {}, pairs = {}",
        points.len(),
        points.dim(),
        b.spec.pair_count()
    );
    let _ = writeln!(s, "k = {k}, epsilon = {}, samples = {samples}", r(epsilon));
    let _ = writeln!(
        s,
        "no-failure frequency = {} (se {})",
        r(freq.mean),
        r(freq.std_error)
    );
    let _ = writeln!(s, "mu = {}", r(b.mu.value));
    let mut line = |name: &str, value: f64| {
        let z = freq.z_score(value);
        let _ = writeln!(s, "{name} = {} (frequency - bound = {} se)", r(value), r(z));
    };
    line("marginal lower bound", b.marginal_lb);
    line("bivariate lower bound", b.bivariate_lb);
    line(
        "trivariate lower bound (conditional)",
        b.trivariate_lb.value,
    );
    if let Some(dd) = rep.data_dependent_lb {
        line("data-dependent lower bound (identity pairing)", dd);
    }
    line(
        "geometry value (not a general bound)",
        b.geometry_value.value,
    );
    let _ = writeln!(s, "per-pair failure frequencies:");
    for ((i, j), est) in points.pairs().into_iter().zip(&rep.per_pair_failures) {
        let _ = writeln!(
            s,
            "  ({}, {}) {} (se {})",
            i + 1,
            j + 1,
            r(est.mean),
            r(est.std_error)
        );
    }
    Ok(Output::ok(s))
}

/// `conjecture`: random-structure probe of the three-success inequality.
/// Exits with [`EXIT_VIOLATION`] if any draw is a violation candidate.
pub fn cmd_conjecture(
    k: u64,
    epsilon: f64,
    draws: usize,
    samples: u64,
    seed: Option<u64>,
) -> CommandResult<Output> {
    let resolved = resolve_seed(seed);
    let report = probe_conjecture(k, epsilon, draws, samples, resolved)?;
    let mu = SuccessRate::for_spec(k, epsilon)?.mu;
    let mut s = seed_line(resolved, seed.is_some());
    let _ = writeln!(
        s,
        "k = {k}, epsilon = {}, samples per draw = {samples}",
        r(epsilon)
    );
    let _ = writeln!(s, "mu^3 = {}", r(mu * mu * mu));
    let _ = writeln!(
        s,
        "draw,rho12,rho13,rho23,estimate,se,margin_se,verdict,structure_seed,simulation_seed"
    );
    for (i, d) in report.draws.iter().enumerate() {
        let st = &d.report.structure;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            i + 1,
            r(st.rho(0, 1)),
            r(st.rho(0, 2)),
            r(st.rho(1, 2)),
            r(d.report.estimate.mean),
            r(d.report.estimate.std_error),
            r(d.report.margin_in_se),
            d.report.verdict.as_str(),
            d.structure_seed,
            d.simulation_seed
        );
    }
    let hits = report.violation_candidates().count();
    let _ = writeln!(
        s,
        "violation candidates (estimate < mu^3 - {VIOLATION_THRESHOLD_SE} se): {hits} of {}",
        report.draws.len()
    );
    let _ = writeln!(
        s,
        "note: p(S1 ∩ S2 ∩ S3) >= mu^3 is unproven; these draws are evidence, not a proof"
    );
    Ok(Output {
        text: s,
        exit_code: if hits > 0 { EXIT_VIOLATION } else { EXIT_OK },
    })
}
