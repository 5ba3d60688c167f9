//! Acceptance suite. Every criterion prints one `[PASS]` or `[FAIL]` line
//! (visible with `--nocapture`, or in the failure report) before asserting.

use std::process::Command;

use jlbound::bivariate::{
    gaussian_approx_joint_success_probability, joint_success_probability, JointMethod,
};
use jlbound::bounds::{
    bivariate_lower_bound, bound_delta, geometry_comparison_value, marginal_lower_bound,
};
use jlbound::embedding::{dimension_ratio_sweep, reference_grid};
use jlbound::marginal::{success_probability, SuccessRate};
use jlbound::mc::{
    collinear_triple, conditional_factorization, end_to_end_experiment, estimate_error_covariance,
    partial_correlation, probe_conjecture, right_angle_triangle, test_three_success_conjecture,
    CorrelationStructure, SimulationConfig, VIOLATION_THRESHOLD_SE,
};

const SE: f64 = VIOLATION_THRESHOLD_SE;

fn verdict(id: &str, what: &str, ok: bool, detail: String) {
    println!(
        "[{}] {id}: {what} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{id} failed: {what} ({detail})");
}

fn config(samples: u64, seed: u64) -> SimulationConfig {
    SimulationConfig::new(samples, seed).unwrap()
}

/// `P(m, x)` for integer `m`, as `1 − e^{−x} Σ_{j<m} x^j / j!`.
fn even_k_cdf(m: u64, x: f64) -> f64 {
    let mut term = (-x).exp();
    let mut sum = 0.0;
    for j in 0..m {
        if j > 0 {
            term *= x / j as f64;
        }
        sum += term;
    }
    1.0 - sum
}

#[test]
fn ac01_mu_matches_even_k_finite_sum() {
    let mut worst = 0.0f64;
    for k in [2u64, 4, 10, 100] {
        for eps in [0.1, 0.3, 0.5] {
            let m = k / 2;
            let half = k as f64 / 2.0;
            let oracle = even_k_cdf(m, half * (1.0 + eps)) - even_k_cdf(m, half * (1.0 - eps));
            let mu = success_probability(k, eps).unwrap().value;
            worst = worst.max((mu - oracle).abs());
        }
    }
    verdict(
        "AC-1",
        "mu within 1e-12 of the finite-sum chi-square CDF",
        worst <= 1e-12,
        format!("max error {worst:e}"),
    );
}

#[test]
fn ac02_joint_probability_endpoints() {
    let cases = [
        (1_000u64, 0.0, 0.18),
        (1_000, 1.0, 0.42),
        (10_000, 0.0, 0.85),
        (10_000, 1.0, 0.92),
    ];
    let mut detail = Vec::new();
    let mut ok = true;
    for (k, rho_sq, expected) in cases {
        let p = joint_success_probability(k, 0.025, rho_sq, JointMethod::Auto)
            .unwrap()
            .value;
        ok &= (p - expected).abs() <= 0.01;
        detail.push(format!("k={k} rho^2={rho_sq}: {p:.4}"));
    }
    verdict(
        "AC-2",
        "joint probability endpoints within 0.01",
        ok,
        detail.join(", "),
    );
}

#[test]
fn ac03_delta_magnitude() {
    let rate = SuccessRate::for_spec(10_000, 0.1).unwrap();
    let delta = bound_delta(100_000, rate);
    verdict(
        "AC-3",
        "delta(n=1e5, k=1e4, eps=0.1) in (1e-15, 1e-13)",
        delta > 1e-15 && delta < 1e-13,
        format!("delta = {delta:e}"),
    );
}

#[test]
fn ac04_clt_agreement_at_k300() {
    let mut worst = 0.0f64;
    for eps in [0.01, 0.025, 0.05] {
        for i in 1..=9 {
            let rho_sq = i as f64 / 10.0;
            let q = joint_success_probability(300, eps, rho_sq, JointMethod::Quadrature)
                .unwrap()
                .value;
            let g = gaussian_approx_joint_success_probability(300, eps, rho_sq)
                .unwrap()
                .value;
            worst = worst.max((q - g).abs());
        }
    }
    verdict(
        "AC-4",
        "quadrature vs Gaussian approximation at k=300",
        worst <= 1e-4,
        format!("max gap {worst:e}"),
    );
}

#[test]
fn ac05_jensen_sandwich() {
    const TOL: f64 = 1e-8;
    let mut violations = Vec::new();
    let mut cells = 0;
    for k in [10u64, 50, 150, 300] {
        for eps in [0.05, 0.1, 0.2] {
            let mu = success_probability(k, eps).unwrap().value;
            for i in 1..=9 {
                let rho_sq = i as f64 / 10.0;
                let p = joint_success_probability(k, eps, rho_sq, JointMethod::Quadrature)
                    .unwrap()
                    .value;
                cells += 1;
                if p < mu * mu - TOL || p > mu + TOL {
                    violations.push(format!(
                        "k={k} eps={eps} rho^2={rho_sq}: {p} vs [{}, {mu}]",
                        mu * mu
                    ));
                }
            }
        }
    }
    verdict(
        "AC-5",
        "mu^2 <= p(Si and Sj) <= mu over the quadrature grid",
        violations.is_empty(),
        format!("{cells} cells, violations: {violations:?}"),
    );
}

#[test]
fn ac06_covariance_identity() {
    let mut detail = Vec::new();
    let mut ok = true;
    for (i, (k, rho)) in [(10u64, 0.5), (40, 0.8), (100, 0.3)]
        .into_iter()
        .enumerate()
    {
        let s = CorrelationStructure::pair(rho).unwrap();
        let est =
            estimate_error_covariance(k, &s, 0, 1, config(1_000_000, 600 + i as u64)).unwrap();
        let target = 2.0 * k as f64 * rho * rho;
        ok &= est.within(target, SE);
        detail.push(format!(
            "k={k} rho={rho}: {:.4} vs {target} ({:+.2} se)",
            est.mean,
            est.z_score(target)
        ));
    }
    verdict(
        "AC-6",
        "sample covariance within 4 se of 2k rho^2",
        ok,
        detail.join(", "),
    );
}

#[test]
fn ac07_dimension_equality_and_ratio() {
    let (ns, eps) = reference_grid();
    let rows = dimension_ratio_sweep(&ns, &eps).unwrap();
    let unequal: Vec<_> = rows
        .iter()
        .filter(|r| !r.bounds_agree())
        .map(|r| (r.n, r.epsilon))
        .collect();
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.ratio), hi.max(r.ratio))
        });
    verdict(
        "AC-7",
        "k_min equal for both bounds and ratio in [0.78, 0.94]",
        rows.len() == 100 && unequal.is_empty() && lo >= 0.78 && hi <= 0.94,
        format!(
            "{} cells, ratio range [{lo:.4}, {hi:.4}], unequal cells {unequal:?}",
            rows.len()
        ),
    );
}

#[test]
fn ac08_bivariate_dominates_marginal() {
    let mut failures = Vec::new();
    for n in [3u64, 4, 5, 10, 1_000, 100_000, 100_000_000, 4_000_000_000] {
        for mu in [0.0, 0.3, 0.5, 0.9, 0.99, 0.999_999, 1.0 - 1e-12, 1.0] {
            let rate = SuccessRate::from_mu(mu);
            let (m, b, d) = (
                marginal_lower_bound(n, rate),
                bivariate_lower_bound(n, rate),
                bound_delta(n, rate),
            );
            if b < m {
                failures.push(format!("n={n} mu={mu}: {b} < {m}"));
            }
            // strictness holds exactly in delta; in the bound values only
            // when delta is resolvable next to them
            let resolvable = d > 4.0 * f64::EPSILON * m.abs().max(1.0);
            if mu < 1.0 && (d <= 0.0 || (resolvable && b <= m)) {
                failures.push(format!("n={n} mu={mu}: not strict (delta {d:e})"));
            }
        }
    }
    // one pair: no pair of failures to exclude, so the bounds coincide
    let rate = SuccessRate::from_mu(0.7);
    if bound_delta(2, rate) != 0.0
        || bivariate_lower_bound(2, rate) != marginal_lower_bound(2, rate)
    {
        failures.push("n=2 bounds differ".into());
    }
    verdict(
        "AC-8",
        "bivariate >= marginal, strict for mu < 1",
        failures.is_empty(),
        format!("{failures:?}"),
    );
}

#[test]
fn ac09a_right_angle_fixture_respects_bivariate_bound() {
    let (k, eps) = (30u64, 0.4);
    let report =
        end_to_end_experiment(&right_angle_triangle(), k, eps, config(1_000_000, 900)).unwrap();
    let freq = report.no_failure;
    let bound = bivariate_lower_bound(3, SuccessRate::for_spec(k, eps).unwrap());
    verdict(
        "AC-9a",
        "3-point fixture frequency >= bivariate bound - 4 se",
        freq.mean >= bound - SE * freq.std_error,
        format!(
            "frequency {} (se {:.2e}), bound {bound}",
            freq.mean, freq.std_error
        ),
    );
}

#[test]
fn ac09b_collinear_fixture_matches_geometry_value() {
    // Expected to fail: on a line all three pair errors are equal, so the
    // no-failure probability is mu, not the geometry value 1 - 2(1 - mu).
    let (k, eps) = (30u64, 0.4);
    let report =
        end_to_end_experiment(&collinear_triple(), k, eps, config(1_000_000, 901)).unwrap();
    let freq = report.no_failure;
    let rate = SuccessRate::for_spec(k, eps).unwrap();
    let geometry = geometry_comparison_value(3, rate).value;
    verdict(
        "AC-9b",
        "collinear fixture frequency within 4 se of the geometry value",
        freq.within(geometry, SE),
        format!(
            "frequency {} (se {:.2e}), geometry value {geometry}, mu {} ({:+.1} se from geometry, {:+.2} se from mu)",
            freq.mean,
            freq.std_error,
            rate.mu,
            freq.z_score(geometry),
            freq.z_score(rate.mu)
        ),
    );
}

#[test]
fn ac10a_random_structures_have_no_violation_candidates() {
    let report = probe_conjecture(40, 0.2, 50, 100_000, 1010).unwrap();
    let hits: Vec<_> = report
        .violation_candidates()
        .map(|d| d.structure_seed)
        .collect();
    let worst = report
        .draws
        .iter()
        .map(|d| d.report.margin_in_se)
        .fold(f64::INFINITY, f64::min);
    verdict(
        "AC-10a",
        "50 random structures, zero violation candidates",
        report.draws.len() == 50 && hits.is_empty(),
        format!("lowest margin {worst:+.2} se, candidates {hits:?}"),
    );
}

#[test]
fn ac10b_independent_structure_gives_mu_cubed() {
    let r = test_three_success_conjecture(
        40,
        0.2,
        &CorrelationStructure::identity(3),
        config(100_000, 1020),
    )
    .unwrap();
    verdict(
        "AC-10b",
        "independent triple: p(S1 S2 S3) = mu^3 within 4 se",
        r.estimate.within(r.mu_cubed, SE),
        format!(
            "{} vs {} ({:+.2} se)",
            r.estimate.mean, r.mu_cubed, r.margin_in_se
        ),
    );
}

#[test]
fn ac10c_fully_correlated_structure_gives_mu() {
    let s = CorrelationStructure::triple(1.0, -1.0, -1.0).unwrap();
    let r = test_three_success_conjecture(40, 0.2, &s, config(100_000, 1030)).unwrap();
    verdict(
        "AC-10c",
        "all |rho| = 1: p(S1 S2 S3) = mu within 4 se",
        r.estimate.within(r.mu, SE),
        format!(
            "{} vs {} ({:+.2} se)",
            r.estimate.mean,
            r.mu,
            r.estimate.z_score(r.mu)
        ),
    );
}

#[test]
fn ac10d_zero_partial_correlation_factorizes_given_s3() {
    // Expected to fail: a zero partial correlation makes S1 and S2
    // independent given V3's underlying normals, not given the event S3.
    let (rho13, rho23) = (0.9, 0.9);
    let rho12 = rho13 * rho23;
    assert!(partial_correlation(rho12, rho13, rho23).unwrap().abs() < 1e-12);
    let s = CorrelationStructure::triple(rho12, rho13, rho23).unwrap();
    let f = conditional_factorization(40, 0.2, &s, config(1_000_000, 1040)).unwrap();
    verdict(
        "AC-10d",
        "rho_12.3 = 0: p(S1 S2 | S3) = p(S1 | S3) p(S2 | S3) within 4 se",
        f.z_score().abs() <= SE,
        format!("{} vs {} ({:+.1} se)", f.joint, f.product, f.z_score()),
    );
}

#[test]
fn ac10e_zero_partial_correlation_meets_mu_cubed() {
    let s = CorrelationStructure::triple(0.81, 0.9, 0.9).unwrap();
    let r = test_three_success_conjecture(40, 0.2, &s, config(100_000, 1050)).unwrap();
    verdict(
        "AC-10e",
        "rho_12.3 = 0: p(S1 S2 S3) >= mu^3 - 4 se",
        r.margin_in_se >= -SE,
        format!(
            "{} vs {} ({:+.1} se)",
            r.estimate.mean, r.mu_cubed, r.margin_in_se
        ),
    );
}

#[test]
fn ac11_seeded_commands_are_byte_identical() {
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/right_angle3.txt");
    let runs: [&[&str]; 2] = [
        &[
            "simulate",
            "--dataset",
            fixture,
            "--k",
            "10",
            "--eps",
            "0.3",
            "--samples",
            "50000",
            "--seed",
            "11",
        ],
        &[
            "conjecture",
            "--k",
            "20",
            "--eps",
            "0.2",
            "--draws",
            "5",
            "--samples",
            "5000",
            "--seed",
            "12",
        ],
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for args in runs {
        let run = |threads: &str| {
            Command::new(env!("CARGO_BIN_EXE_jlbound"))
                .args(args)
                .env("JLBOUND_THREADS", threads)
                .output()
                .unwrap()
        };
        let (a, b, c) = (run("1"), run("1"), run("3"));
        let same = a.status.success() && a.stdout == b.stdout && a.stdout == c.stdout;
        ok &= same;
        detail.push(format!(
            "{}: {}",
            args[0],
            if same { "identical" } else { "differs" }
        ));
    }
    verdict(
        "AC-11",
        "repeated seeded runs are byte-identical",
        ok,
        detail.join(", "),
    );
}
