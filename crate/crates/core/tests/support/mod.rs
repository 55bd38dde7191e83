//! Shared test support: Gauss-Legendre quadrature and an independent
//! dense-grid evaluation of the p=2 mixing matrix, used as an oracle for the
//! Monte Carlo implementation.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [a, b], nodes ascending.
/// Roots of the Legendre polynomial found by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let mid = 0.5 * (b + a);
    let half = 0.5 * (b - a);
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess for the i-th largest root.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-15 {
                break;
            }
        }
        let w = 2.0 * half / ((1.0 - z * z) * dp * dp);
        xs[i] = mid - half * z;
        xs[n - 1 - i] = mid + half * z;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// P_n(x) and P_n'(x) via the recurrence
/// k P_k = (2k-1) x P_{k-1} - (k-1) P_{k-2}.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

/// Dense tensor-grid evaluation of the p=2 mixing matrix.
///
/// For p=2 the Haar expectation of any function of the squared entries
/// reduces to an average over a single angle: both rotations and
/// reflections have squared entries (cos^2 t, sin^2 t; sin^2 t, cos^2 t),
/// so integrating t over [0, pi/2] suffices. The radial coordinate uses the
/// substitution r1 = u^2, which turns the r1^(nu/2-1) dr1 factor into
/// 2 u^(nu-1) du and leaves the integrand analytic for odd nu, restoring
/// spectral quadrature convergence.
///
/// Entry (i, j) is the ratio of two integrals sharing the weight
/// A^-(nu+2) * u^(nu-1) * row_factor_i, where A = (r1 y1 + y2)/2,
/// y_s = l1 h_s1^2 + l2 h_s2^2, and row_factor is r1^2 for row 1 and 1 for
/// row 2; the numerator carries an extra h_ij^2. The final scale is
/// 1/(nu+2).
pub fn tau_quadrature_p2(l: [f64; 2], nu: f64, n_theta: usize, n_r: usize) -> [[f64; 2]; 2] {
    assert!(l[0] > 0.0 && l[1] > 0.0 && l[0] >= l[1]);
    assert!(nu >= 2.0);
    let l1 = 1.0;
    let l2 = l[1] / l[0];

    let (ts, wt) = gauss_legendre(n_theta, 0.0, 0.5 * PI);
    let (us, wu) = gauss_legendre(n_r, 0.0, 1.0);

    // Pass 1: log of the shared weight at every node, and its maximum.
    let mut logs = vec![0.0; n_theta * n_r];
    let mut gmax = f64::NEG_INFINITY;
    for (it, t) in ts.iter().enumerate() {
        let c2 = t.cos().powi(2);
        let s2 = 1.0 - c2;
        let y1 = l1 * c2 + l2 * s2;
        let y2 = l1 * s2 + l2 * c2;
        for (iu, u) in us.iter().enumerate() {
            let r1 = u * u;
            let a = 0.5 * (r1 * y1 + y2);
            let g = -(nu + 2.0) * a.ln() + (nu - 1.0) * u.ln();
            logs[it * n_r + iu] = g;
            if g > gmax {
                gmax = g;
            }
        }
    }

    // Pass 2: accumulate numerators and denominators with the max log
    // factored out; it cancels in every ratio.
    let mut num = [[0.0f64; 2]; 2];
    let mut den = [0.0f64; 2];
    for (it, t) in ts.iter().enumerate() {
        let c2 = t.cos().powi(2);
        let s2 = 1.0 - c2;
        let h2 = [[c2, s2], [s2, c2]];
        for (iu, u) in us.iter().enumerate() {
            let w = wt[it] * wu[iu] * (logs[it * n_r + iu] - gmax).exp();
            let r1 = u * u;
            let rowfac = [r1 * r1, 1.0];
            for i in 0..2 {
                let wi = w * rowfac[i];
                den[i] += wi;
                for j in 0..2 {
                    num[i][j] += wi * h2[i][j];
                }
            }
        }
    }

    let mut tau = [[0.0f64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            tau[i][j] = num[i][j] / (den[i] * (nu + 2.0));
        }
    }
    tau
}

/// Mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
