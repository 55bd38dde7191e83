//! The eigenvalue estimator psi and its mixing matrix tau, plus the two
//! reference estimators and the scale-invariant loss.
//!
//! tau_ij(l) is a ratio of two integrals over the orthogonal group and an
//! ordered simplex, estimated here by self-normalized Monte Carlo: one
//! shared set of (H, r) sample pairs feeds every numerator and denominator,
//! which makes the row-sum identity sum_j tau_ij = 1/(nu+2) and scale
//! invariance in l hold pointwise rather than only in expectation. All
//! weights are handled in the log domain because the integrand factor
//! A^-(p*nu/2+2) underflows in linear space for moderate nu.

use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::linalg::{OrthogonalMatrix, Spectrum};
use crate::rng::RngStream;
use crate::sample::{haar_from_rng, ordered_unit_from_rng};

/// Monte Carlo integration settings for [`compute_tau`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    /// Number of (H, r) sample pairs.
    pub n_points: usize,
    /// Also evaluate the mirrored pair (-H, r) for each draw. The integrand
    /// depends on H only through squared entries, so this leaves the
    /// estimate unchanged; the knob exists to demonstrate exactly that.
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_points: 1000,
            antithetic: false,
        }
    }
}

impl McConfig {
    pub fn with_points(n_points: usize) -> Self {
        McConfig {
            n_points,
            ..Default::default()
        }
    }
}

/// The mixing matrix tau_ij(l), each row summing to 1/(nu+2), together with
/// the effective sample size of the self-normalized weights per row.
#[derive(Debug, Clone, PartialEq)]
pub struct TauMatrix {
    p: usize,
    nu: f64,
    entries: Vec<f64>,
    row_ess: Vec<f64>,
}

impl TauMatrix {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.p + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.p..(i + 1) * self.p]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    /// Effective sample size (sum w)^2 / sum w^2 of row i's weights. Values
    /// far below n_points flag weight degeneracy: the integrand mass
    /// concentrated on a few sample points.
    pub fn row_ess(&self) -> &[f64] {
        &self.row_ess
    }
}

/// Estimates of the population eigenvalues with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    /// psi_i = sum_j tau_ij l_j, in the order of the input eigenvalues.
    /// Descending order is not enforced: the estimator is reported as
    /// computed, and whether it preserves order is an empirical question.
    pub psi: Vec<f64>,
    /// Per-row effective sample sizes, copied from the mixing matrix.
    pub ess: Vec<f64>,
    pub tau: TauMatrix,
}

struct PointEval {
    /// Log weight shared by all rows: -(p*nu/2+2) log A + (nu/2-1) sum log r_s.
    w_base: f64,
    /// log r_s for s < p; the fixed coordinate r_p = 1 contributes 0.
    log_r: Vec<f64>,
    /// Squared entries of H, row-major.
    h2: Vec<f64>,
}

fn evaluate_point(
    h: &OrthogonalMatrix,
    r: &[f64],
    lnorm: &[f64],
    exponent: f64,
    shape: f64,
) -> PointEval {
    let p = lnorm.len();
    let mut h2 = vec![0.0; p * p];
    for i in 0..p {
        let row = h.row(i);
        for j in 0..p {
            h2[i * p + j] = row[j] * row[j];
        }
    }
    let mut a = 0.0;
    let mut log_r = vec![0.0; p];
    let mut log_r_sum = 0.0;
    for s in 0..p {
        let mut y = 0.0;
        for k in 0..p {
            y += lnorm[k] * h2[s * p + k];
        }
        if s < p - 1 {
            a += r[s] * y;
            let lr = r[s].ln();
            log_r[s] = lr;
            log_r_sum += lr;
        } else {
            a += y;
        }
    }
    a *= 0.5;
    PointEval {
        w_base: exponent * a.ln() + shape * log_r_sum,
        log_r,
        h2,
    }
}

/// Monte Carlo estimate of the mixing matrix tau(l).
///
/// Draws `mc.n_points` pairs (H_k, r_k), H_k Haar-orthogonal and r_k ordered
/// uniforms with the last coordinate fixed at 1, one derived stream per
/// point. For each row i the weight of point k is
///
/// ```text
/// log w = -(p*nu/2 + 2) log A_k + (nu/2 - 1) sum_{s<p} log r_ks + 2 log r_ki
/// A_k   = (1/2) sum_s r_ks y_ks,   y_ks = sum_j l_j h_k,sj^2
/// ```
///
/// and tau_ij = (1/(nu+2)) * sum_k w_k h_k,ij^2 / sum_k w_k, exponentiated
/// after subtracting the row's maximum log weight. The input is normalized
/// by its first component before integration; the result is unchanged
/// because tau is scale-invariant in l.
///
/// Point evaluation may run in parallel; the reduction is a fixed-order sum
/// over the point index, so results do not depend on thread count.
pub fn compute_tau(l: &Spectrum, nu: f64, mc: &McConfig, stream: RngStream) -> Result<TauMatrix> {
    let p = l.len();
    if !nu.is_finite() || nu < p as f64 {
        return Err(Error::InvalidParameter(format!(
            "degrees of freedom must satisfy nu >= p, got nu={nu}, p={p}"
        )));
    }
    if mc.n_points == 0 {
        return Err(Error::InvalidConfig("n_points must be >= 1".into()));
    }

    let l1 = l.get(0);
    let lnorm: Vec<f64> = l.values().iter().map(|v| v / l1).collect();
    let exponent = -(0.5 * p as f64 * nu + 2.0);
    let shape = 0.5 * nu - 1.0;

    // With the mirror flag each point index evaluates (H, r) then (-H, r);
    // both land adjacently in the fixed-order reduction.
    let per = if mc.antithetic { 2 } else { 1 };
    let evals: Vec<PointEval> = map_indexed(mc.n_points * per, 32, |k| {
        let point = (k / per) as u64;
        let mut rng = stream.derive(point).rng();
        let mut h = haar_from_rng(&mut rng, p);
        if k % per == 1 {
            h = h.negated();
        }
        let r = ordered_unit_from_rng(&mut rng, p - 1);
        evaluate_point(&h, &r, &lnorm, exponent, shape)
    });

    let scale = 1.0 / (nu + 2.0);
    let mut entries = vec![0.0; p * p];
    let mut row_ess = vec![0.0; p];
    let mut num = vec![0.0; p];
    for i in 0..p {
        let mut gmax = f64::NEG_INFINITY;
        for e in &evals {
            let g = e.w_base + 2.0 * e.log_r[i];
            if g > gmax {
                gmax = g;
            }
        }
        num.fill(0.0);
        let mut den = 0.0;
        let mut den2 = 0.0;
        for e in &evals {
            let u = (e.w_base + 2.0 * e.log_r[i] - gmax).exp();
            den += u;
            den2 += u * u;
            for (n, h) in num.iter_mut().zip(&e.h2[i * p..(i + 1) * p]) {
                *n += u * h;
            }
        }
        for j in 0..p {
            // num/den first: when all weights coincide (p=1) the ratio is
            // exactly 1 and the entry is exactly `scale`.
            entries[i * p + j] = scale * (num[j] / den);
        }
        row_ess[i] = den * den / den2;
    }

    Ok(TauMatrix {
        p,
        nu,
        entries,
        row_ess,
    })
}

/// Assemble the estimate psi_i = sum_j tau_ij l_j.
///
/// Every component lies in (0, l_1/(nu+2)]: the estimator shrinks, spending
/// bias to cut the variance of the extreme sample eigenvalues.
pub fn psi_star(l: &Spectrum, tau: TauMatrix) -> Result<EstimateResult> {
    if tau.p != l.len() {
        return Err(Error::DimensionMismatch(format!(
            "mixing matrix is {}x{} but spectrum has length {}",
            tau.p,
            tau.p,
            l.len()
        )));
    }
    let p = tau.p;
    let mut psi = vec![0.0; p];
    for (i, out) in psi.iter_mut().enumerate() {
        let mut s = 0.0;
        for j in 0..p {
            s += tau.get(i, j) * l.get(j);
        }
        *out = s;
    }
    Ok(EstimateResult {
        psi,
        ess: tau.row_ess.clone(),
        tau,
    })
}

/// The fixed-shrinkage reference estimator l/(nu+2).
pub fn phi_star(l: &Spectrum, nu: f64) -> Result<Vec<f64>> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "degrees of freedom must be positive and finite, got {nu}"
        )));
    }
    Ok(l.values().iter().map(|v| v / (nu + 2.0)).collect())
}

/// The maximum likelihood reference estimator l/nu.
pub fn mle(l: &Spectrum, nu: f64) -> Result<Vec<f64>> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "degrees of freedom must be positive and finite, got {nu}"
        )));
    }
    Ok(l.values().iter().map(|v| v / nu).collect())
}

/// The rescaled mixing matrix tilde_tau_ij = tau_ij l_j / l_i, row-major.
///
/// Satisfies psi_i = (sum_j tilde_tau_ij) l_i, and for i <= j (so l_j <= l_i)
/// each entry is bounded by 1/(nu+2).
pub fn tilde_tau(tau: &TauMatrix, l: &Spectrum) -> Result<Vec<f64>> {
    if tau.p != l.len() {
        return Err(Error::DimensionMismatch(format!(
            "mixing matrix is {}x{} but spectrum has length {}",
            tau.p,
            tau.p,
            l.len()
        )));
    }
    let p = tau.p;
    let mut out = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            out[i * p + j] = tau.get(i, j) * l.get(j) / l.get(i);
        }
    }
    Ok(out)
}

/// Scale-invariant squared error sum_i (psi_i / lambda_i - 1)^2, pairing the
/// i-th estimate with the i-th ordered population eigenvalue.
pub fn loss(psi: &[f64], lambda: &Spectrum) -> Result<f64> {
    if psi.len() != lambda.len() {
        return Err(Error::DimensionMismatch(format!(
            "estimate has length {} but population spectrum has length {}",
            psi.len(),
            lambda.len()
        )));
    }
    Ok(psi
        .iter()
        .enumerate()
        .map(|(i, &v)| (v / lambda.get(i) - 1.0).powi(2))
        .sum())
}
