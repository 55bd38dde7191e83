//! Built-in diagnostic battery for the estimator and its sampling primitives.
//!
//! [`run_selftest`] checks the structural identities the estimator relies on
//! (weight-matrix row sums, nonnegativity, scale invariance, componentwise
//! shrinkage, univariate exactness), the quality of the samplers
//! (orthogonality, entry and trace moments, order statistics), and one
//! closed-form risk identity. Statistical checks use a three-standard-error
//! band at a fixed seed, so the outcome is deterministic; the whole battery
//! runs in seconds.

use crate::estimator::{compute_tau, phi_star, psi_star, McConfig};
use crate::linalg::Spectrum;
use crate::risk::{analytic_phi_star_risk_identity, simulate_risk, EstimatorKind, Scenario};
use crate::rng::RngStream;
use crate::sample::{sample_haar_orthogonal, sample_ordered_unit, sample_wishart_eigs};

/// Result of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Observed quantity and the bound it was held against.
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CheckOutcome { name, passed, detail }
    }
}

/// Runs every check and reports each outcome; never panics on failure so a
/// caller can print the full battery before deciding the exit status.
pub fn run_selftest(seed: u64) -> Vec<CheckOutcome> {
    let root = RngStream::new(seed);
    vec![
        check_tau_row_sums(root.derive(0)),
        check_tau_nonnegative(root.derive(1)),
        check_tau_scale_invariance(root.derive(2)),
        check_psi_shrinkage(root.derive(3)),
        check_psi_univariate_exact(root.derive(4)),
        check_haar_orthogonality(root.derive(5)),
        check_haar_entry_moment(root.derive(6)),
        check_wishart_trace_moment(root.derive(7)),
        check_ordered_unit_moments(root.derive(8)),
        check_phi_star_risk_identity(root.derive(9)),
    ]
}

const TAU_NUS: [f64; 3] = [5.0, 20.0, 50.0];

fn check_tau_row_sums(stream: RngStream) -> CheckOutcome {
    let l = Spectrum::sample(vec![5.0, 2.0, 1.0]).unwrap();
    let mc = McConfig::with_points(1000);
    let mut worst = 0.0_f64;
    for (k, nu) in TAU_NUS.iter().enumerate() {
        let tau = compute_tau(&l, *nu, &mc, stream.derive(k as u64)).unwrap();
        for i in 0..l.len() {
            worst = worst.max((tau.row_sum(i) - 1.0 / (nu + 2.0)).abs());
        }
    }
    CheckOutcome::new(
        "tau-row-sums",
        worst <= 1e-12,
        format!("max |row sum - 1/(nu+2)| = {worst:.3e}, bound 1e-12"),
    )
}

fn check_tau_nonnegative(stream: RngStream) -> CheckOutcome {
    let l = Spectrum::sample(vec![10.0, 1.0, 0.1]).unwrap();
    let mc = McConfig::with_points(1000);
    let mut min_entry = f64::INFINITY;
    for (k, nu) in TAU_NUS.iter().enumerate() {
        let tau = compute_tau(&l, *nu, &mc, stream.derive(k as u64)).unwrap();
        for i in 0..l.len() {
            for j in 0..l.len() {
                min_entry = min_entry.min(tau.get(i, j));
            }
        }
    }
    CheckOutcome::new(
        "tau-nonnegative",
        min_entry >= 0.0,
        format!("min entry = {min_entry:.3e}, bound >= 0"),
    )
}

fn check_tau_scale_invariance(stream: RngStream) -> CheckOutcome {
    let base = [4.0, 1.5, 0.5];
    let mc = McConfig::with_points(500);
    let reference = compute_tau(
        &Spectrum::sample(base.to_vec()).unwrap(),
        5.0,
        &mc,
        stream,
    )
    .unwrap();
    let mut worst = 0.0_f64;
    for c in [1e-6, 1.0, 1e6] {
        let scaled = Spectrum::sample(base.iter().map(|v| v * c).collect()).unwrap();
        let tau = compute_tau(&scaled, 5.0, &mc, stream).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((tau.get(i, j) - reference.get(i, j)).abs());
            }
        }
    }
    CheckOutcome::new(
        "tau-scale-invariance",
        worst <= 1e-12,
        format!("max drift across scales 1e-6..1e6 = {worst:.3e}, bound 1e-12"),
    )
}

fn check_psi_shrinkage(stream: RngStream) -> CheckOutcome {
    let mc = McConfig::with_points(1000);
    let mut worst_ratio = 0.0_f64;
    for (k, values) in [vec![10.0, 2.0, 0.5], vec![3.0, 1.0], vec![5.0, 4.0, 1.0, 0.2]]
        .into_iter()
        .enumerate()
    {
        let l = Spectrum::sample(values).unwrap();
        let bound = l.get(0) / 7.0;
        let tau = compute_tau(&l, 5.0, &mc, stream.derive(k as u64)).unwrap();
        let est = psi_star(&l, tau).unwrap();
        for v in &est.psi {
            worst_ratio = worst_ratio.max(v / bound);
        }
    }
    CheckOutcome::new(
        "psi-shrinkage",
        worst_ratio <= 1.0 + 1e-12,
        format!("max psi_i / (l_1/(nu+2)) = {worst_ratio:.12}, bound 1"),
    )
}

fn check_psi_univariate_exact(stream: RngStream) -> CheckOutcome {
    let l = Spectrum::sample(vec![5.0]).unwrap();
    let tau = compute_tau(&l, 5.0, &McConfig::with_points(64), stream).unwrap();
    let est = psi_star(&l, tau).unwrap();
    let phi = phi_star(&l, 5.0).unwrap();
    let err = (est.psi[0] - phi[0]).abs();
    CheckOutcome::new(
        "psi-univariate-exact",
        err <= 1e-15,
        format!("|psi - l/(nu+2)| = {err:.3e} at p = 1, bound 1e-15"),
    )
}

fn check_haar_orthogonality(stream: RngStream) -> CheckOutcome {
    let mut worst = 0.0_f64;
    for k in 0..200 {
        let h = sample_haar_orthogonal(stream.derive(k), 4).unwrap();
        worst = worst.max(h.orthogonality_defect());
    }
    CheckOutcome::new(
        "haar-orthogonality",
        worst <= 1e-10,
        format!("max |H^T H - I| over 200 draws = {worst:.3e}, bound 1e-10"),
    )
}

fn check_haar_entry_moment(stream: RngStream) -> CheckOutcome {
    // E[h_ij^2] = 1/p for every entry of a Haar rotation.
    let p = 3;
    let n = 20_000;
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for k in 0..n {
        let h = sample_haar_orthogonal(stream.derive(k), p).unwrap();
        let v = h.get(0, 0) * h.get(0, 0);
        sum += v;
        sum2 += v * v;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let se = ((sum2 / nf - mean * mean) / nf).sqrt();
    let err = (mean - 1.0 / p as f64).abs();
    CheckOutcome::new(
        "haar-entry-moment",
        err <= 3.0 * se,
        format!("|mean h11^2 - 1/3| = {err:.3e}, 3 SE = {:.3e}", 3.0 * se),
    )
}

fn check_wishart_trace_moment(stream: RngStream) -> CheckOutcome {
    // E[tr S] = nu * tr(lambda).
    let lambda = Spectrum::population(vec![2.0, 1.0]).unwrap();
    let nu = 5.0;
    let n = 20_000;
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for k in 0..n {
        let l = sample_wishart_eigs(stream.derive(k), nu, &lambda).unwrap();
        let t = l.trace();
        sum += t;
        sum2 += t * t;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let se = ((sum2 / nf - mean * mean) / nf).sqrt();
    let err = (mean - nu * lambda.trace()).abs();
    CheckOutcome::new(
        "wishart-trace-moment",
        err <= 3.0 * se,
        format!("|mean tr S - nu tr lambda| = {err:.3e}, 3 SE = {:.3e}", 3.0 * se),
    )
}

fn check_ordered_unit_moments(stream: RngStream) -> CheckOutcome {
    // The k-th of n ascending uniforms has mean k/(n+1).
    let n_draws = 20_000;
    let n = 3;
    let mut sums = [0.0_f64; 3];
    let mut sums2 = [0.0_f64; 3];
    for k in 0..n_draws {
        let r = sample_ordered_unit(stream.derive(k), n);
        for (i, v) in r.iter().enumerate() {
            sums[i] += v;
            sums2[i] += v * v;
        }
    }
    let nf = n_draws as f64;
    let mut passed = true;
    let mut worst = 0.0_f64;
    for i in 0..n {
        let mean = sums[i] / nf;
        let se = ((sums2[i] / nf - mean * mean) / nf).sqrt();
        let err = (mean - (i + 1) as f64 / (n + 1) as f64).abs();
        worst = worst.max(err / (3.0 * se));
        passed &= err <= 3.0 * se;
    }
    CheckOutcome::new(
        "ordered-unit-moments",
        passed,
        format!("max |mean - k/(n+1)| / 3SE = {worst:.3}, bound 1"),
    )
}

fn check_phi_star_risk_identity(stream: RngStream) -> CheckOutcome {
    // Risk of l/(nu+2) at lambda = I: 2p/(nu+2) + p(p-1) nu/(nu+2)^2.
    let mut scenario = Scenario::new(
        Spectrum::population(vec![1.0, 1.0]).unwrap(),
        5.0,
        EstimatorKind::PhiStar,
        stream.seed().wrapping_add(stream.stream_id()),
    );
    scenario.n_rep = 20_000;
    let est = simulate_risk(&scenario).unwrap();
    let expect = analytic_phi_star_risk_identity(2, 5.0);
    let err = (est.mean_loss - expect).abs();
    CheckOutcome::new(
        "phi-star-risk-identity",
        err <= 3.0 * est.std_error,
        format!(
            "|risk - {expect:.6}| = {err:.3e} at (p, nu) = (2, 5), 3 SE = {:.3e}",
            3.0 * est.std_error
        ),
    )
}
