//! Random sampling: Haar-orthogonal matrices, ordered uniforms, chi-square
//! draws, and Wishart eigenvalue spectra.
//!
//! Every public sampler is a pure function of its `RngStream` argument:
//! calling it twice with the same stream returns the same value. Callers
//! that need several dependent draws use the `*_from_rng` kernels on a
//! generator they own.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{eig_sym_desc, OrthogonalMatrix, Spectrum, SpectrumRole, SymmetricMatrix};
use crate::rng::RngStream;

/// Haar-distributed orthogonal matrix: Gaussian matrix, Householder QR, then
/// each column of Q multiplied by the sign of the matching R diagonal entry.
/// Without the sign correction QR output is not Haar (the factorization
/// convention biases the diagonal signs).
pub fn sample_haar_orthogonal(stream: RngStream, p: usize) -> Result<OrthogonalMatrix> {
    if p == 0 {
        return Err(Error::InvalidDimension(
            "orthogonal matrix dimension must be >= 1".into(),
        ));
    }
    Ok(haar_from_rng(&mut stream.rng(), p))
}

pub(crate) fn haar_from_rng<R: Rng + ?Sized>(rng: &mut R, p: usize) -> OrthogonalMatrix {
    if p == 1 {
        // Haar on O(1) is a uniform sign. The QR route would return the
        // same sign but with rounding residue in the single entry; exact
        // +-1 keeps h11^2 = 1 exact downstream.
        let z: f64 = rng.sample(StandardNormal);
        let sign = if z >= 0.0 { 1.0 } else { -1.0 };
        return OrthogonalMatrix::from_raw(1, vec![sign]);
    }
    let mut r = vec![0.0f64; p * p];
    for v in r.iter_mut() {
        *v = rng.sample(StandardNormal);
    }

    let mut q = vec![0.0f64; p * p];
    for i in 0..p {
        q[i * p + i] = 1.0;
    }

    // Householder QR; q accumulates the product of reflectors.
    let mut v = vec![0.0f64; p];
    for k in 0..p {
        let mut norm2 = 0.0;
        for i in k..p {
            let x = r[i * p + k];
            norm2 += x * x;
        }
        if norm2 == 0.0 {
            continue;
        }
        let norm = norm2.sqrt();
        let x0 = r[k * p + k];
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        let mut vnorm2 = 0.0;
        for i in k..p {
            let mut vi = r[i * p + k];
            if i == k {
                vi -= alpha;
            }
            v[i] = vi;
            vnorm2 += vi * vi;
        }
        if vnorm2 == 0.0 {
            continue;
        }
        let inv = 1.0 / vnorm2.sqrt();
        for x in &mut v[k..p] {
            *x *= inv;
        }
        for j in k..p {
            let mut dot = 0.0;
            for i in k..p {
                dot += v[i] * r[i * p + j];
            }
            let twice = 2.0 * dot;
            for i in k..p {
                r[i * p + j] -= twice * v[i];
            }
        }
        for i in 0..p {
            let mut dot = 0.0;
            for j in k..p {
                dot += q[i * p + j] * v[j];
            }
            let twice = 2.0 * dot;
            for j in k..p {
                q[i * p + j] -= twice * v[j];
            }
        }
    }

    for j in 0..p {
        if r[j * p + j] < 0.0 {
            for i in 0..p {
                q[i * p + j] = -q[i * p + j];
            }
        }
    }
    OrthogonalMatrix::from_raw(p, q)
}

/// n i.i.d. uniforms on (0, 1), sorted ascending. Draws of exactly 0.0 are
/// rejected (they would send log r to -inf in downstream integrands) and
/// tied vectors are redrawn, so the output is strictly ascending.
pub fn sample_ordered_unit(stream: RngStream, n: usize) -> Vec<f64> {
    ordered_unit_from_rng(&mut stream.rng(), n)
}

pub(crate) fn ordered_unit_from_rng<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    loop {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            let u = loop {
                let u: f64 = rng.random();
                if u > 0.0 {
                    break u;
                }
            };
            v.push(u);
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if v.windows(2).all(|w| w[0] < w[1]) {
            return v;
        }
    }
}

/// One chi-square draw with `df` degrees of freedom, via the gamma
/// distribution with shape df/2 and scale 2.
pub fn sample_chi_square(stream: RngStream, df: f64) -> Result<f64> {
    let mut rng = stream.rng();
    chi_square_from_rng(&mut rng, df)
}

pub(crate) fn chi_square_from_rng<R: Rng + ?Sized>(rng: &mut R, df: f64) -> Result<f64> {
    if !(df.is_finite() && df > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "chi-square degrees of freedom must be positive and finite, got {df}"
        )));
    }
    let gamma = Gamma::new(0.5 * df, 2.0).map_err(|e| {
        Error::InvalidParameter(format!("invalid chi-square parameters (df={df}): {e}"))
    })?;
    Ok(gamma.sample(rng))
}

/// Eigenvalues of one Wishart draw S ~ W_p(nu, diag(lambda)), descending.
///
/// Uses the Bartlett decomposition: lower-triangular A with sqrt(chi-square)
/// diagonal (df nu, nu-1, ..., nu-p+1) and standard normal subdiagonal,
/// then S = L A A^T L^T with L = diag(sqrt(lambda_i)).
pub fn sample_wishart_eigs(stream: RngStream, nu: f64, lambda: &Spectrum) -> Result<Spectrum> {
    let mut rng = stream.rng();
    wishart_eigs_from_rng(&mut rng, nu, lambda)
}

pub(crate) fn wishart_eigs_from_rng<R: Rng + ?Sized>(
    rng: &mut R,
    nu: f64,
    lambda: &Spectrum,
) -> Result<Spectrum> {
    if lambda.role() != SpectrumRole::Population {
        return Err(Error::InvalidInput(
            "wishart sampling requires a population spectrum".into(),
        ));
    }
    let p = lambda.len();
    if !nu.is_finite() || nu < p as f64 {
        return Err(Error::InvalidParameter(format!(
            "wishart degrees of freedom must satisfy nu >= p, got nu={nu}, p={p}"
        )));
    }

    // b = L * A, built row by row; row i scales by sqrt(lambda_i).
    let mut b = vec![0.0f64; p * p];
    for i in 0..p {
        let scale = lambda.get(i).sqrt();
        for j in 0..=i {
            let draw = if i == j {
                chi_square_from_rng(rng, nu - i as f64)?.sqrt()
            } else {
                rng.sample(StandardNormal)
            };
            b[i * p + j] = scale * draw;
        }
    }

    let mut s = SymmetricMatrix::zeros(p)?;
    for i in 0..p {
        for j in 0..=i {
            let mut v = 0.0;
            for k in 0..=j {
                v += b[i * p + k] * b[j * p + k];
            }
            s.set(i, j, v);
        }
    }
    eig_sym_desc(&s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn haar_rejects_zero_dimension() {
        assert!(sample_haar_orthogonal(RngStream::new(1), 0).is_err());
    }

    #[test]
    fn haar_is_orthogonal() {
        for k in 0..50 {
            let h = sample_haar_orthogonal(RngStream::new(7).derive(k), 3).unwrap();
            assert!(h.orthogonality_defect() <= 1e-10);
        }
    }

    #[test]
    fn haar_is_deterministic() {
        let s = RngStream::new(11);
        let a = sample_haar_orthogonal(s, 4).unwrap();
        let b = sample_haar_orthogonal(s, 4).unwrap();
        assert_eq!(a, b);
        let c = sample_haar_orthogonal(s.derive(1), 4).unwrap();
        assert_ne!(a, c);
    }

    // Haar on O(1) is a uniform sign.
    #[test]
    fn haar_one_dim_sign_frequency() {
        let root = RngStream::new(3);
        let n = 10_000;
        let mut plus = 0usize;
        for k in 0..n {
            let h = sample_haar_orthogonal(root.derive(k as u64), 1).unwrap();
            let v = h.get(0, 0);
            assert!((v.abs() - 1.0).abs() < 1e-14);
            if v > 0.0 {
                plus += 1;
            }
        }
        let freq = plus as f64 / n as f64;
        assert!((freq - 0.5).abs() <= 0.01, "sign frequency {freq}");
    }

    // Haar symmetry forces E[h_ij^2] = 1/p.
    #[test]
    fn haar_squared_entry_mean() {
        let root = RngStream::new(5);
        let n = 100_000;
        let mut sum = 0.0;
        for k in 0..n {
            let h = sample_haar_orthogonal(root.derive(k as u64), 4).unwrap();
            sum += h.get(0, 0) * h.get(0, 0);
        }
        let mean = sum / n as f64;
        assert!((mean - 0.25).abs() <= 0.01, "mean h11^2 = {mean}");
    }

    // Left invariance: (PH)_11^2 and H_11^2 have the same distribution for
    // any fixed orthogonal P. Compared through means at 3 combined SE.
    #[test]
    fn haar_left_invariance_proxy() {
        let p = 3usize;
        let (c, s) = (0.7f64.cos(), 0.7f64.sin());
        let rot = OrthogonalMatrix::from_raw(
            p,
            vec![c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0],
        );
        let n = 100_000;
        let mut plain = Vec::with_capacity(n);
        let mut rotated = Vec::with_capacity(n);
        let root_a = RngStream::new(17);
        let root_b = RngStream::new(19);
        for k in 0..n {
            let h = sample_haar_orthogonal(root_a.derive(k as u64), p).unwrap();
            plain.push(h.get(0, 0) * h.get(0, 0));
            let h2 = sample_haar_orthogonal(root_b.derive(k as u64), p).unwrap();
            let ph = h2.left_mul(&rot);
            rotated.push(ph.get(0, 0) * ph.get(0, 0));
        }
        let (m1, se1) = mean_and_se(&plain);
        let (m2, se2) = mean_and_se(&rotated);
        let combined = (se1 * se1 + se2 * se2).sqrt();
        assert!(
            (m1 - m2).abs() <= 3.0 * combined,
            "means {m1} vs {m2}, combined se {combined}"
        );
    }

    #[test]
    fn ordered_unit_empty_and_sorted() {
        assert!(sample_ordered_unit(RngStream::new(1), 0).is_empty());
        let v = sample_ordered_unit(RngStream::new(1), 3);
        assert_eq!(v.len(), 3);
        assert!(v[0] > 0.0 && v[2] < 1.0);
        assert!(v[0] < v[1] && v[1] < v[2]);
    }

    // k-th order statistic of n uniforms has mean k/(n+1).
    #[test]
    fn ordered_unit_minimum_mean() {
        let root = RngStream::new(23);
        let n = 100_000;
        let mut sum = 0.0;
        for k in 0..n {
            sum += sample_ordered_unit(root.derive(k as u64), 2)[0];
        }
        let mean = sum / n as f64;
        assert!((mean - 1.0 / 3.0).abs() <= 0.005, "mean r1 = {mean}");
    }

    #[test]
    fn ordered_unit_order_statistic_means() {
        let root = RngStream::new(29);
        let n = 50_000;
        let mut cols = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
        for k in 0..n {
            let v = sample_ordered_unit(root.derive(k as u64), 3);
            for (col, &x) in cols.iter_mut().zip(&v) {
                col.push(x);
            }
        }
        for (k, col) in cols.iter().enumerate() {
            let (mean, se) = mean_and_se(col);
            let expect = (k + 1) as f64 / 4.0;
            assert!(
                (mean - expect).abs() <= 3.0 * se,
                "order stat {k}: mean {mean}, expect {expect}, se {se}"
            );
        }
    }

    #[test]
    fn chi_square_rejects_bad_df() {
        assert!(sample_chi_square(RngStream::new(1), 0.0).is_err());
        assert!(sample_chi_square(RngStream::new(1), -1.0).is_err());
        assert!(sample_chi_square(RngStream::new(1), f64::NAN).is_err());
    }

    #[test]
    fn chi_square_moments() {
        let root = RngStream::new(31);
        let n = 100_000;
        let mut draws = Vec::with_capacity(n);
        for k in 0..n {
            let x = sample_chi_square(root.derive(k as u64), 5.0).unwrap();
            assert!(x >= 0.0);
            draws.push(x);
        }
        let (mean, _) = mean_and_se(&draws);
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        assert!((mean - 5.0).abs() <= 0.05, "mean {mean}");
        assert!((var - 10.0).abs() <= 0.3, "variance {var}");
    }

    #[test]
    fn wishart_rejects_bad_input() {
        let lam = Spectrum::population(vec![1.0, 1.0]).unwrap();
        assert!(sample_wishart_eigs(RngStream::new(1), 1.0, &lam).is_err());
        let sam = Spectrum::sample(vec![1.0, 1.0]).unwrap();
        assert!(sample_wishart_eigs(RngStream::new(1), 5.0, &sam).is_err());
    }

    #[test]
    fn wishart_output_sorted_positive() {
        let lam = Spectrum::population(vec![2.0, 1.0, 0.5]).unwrap();
        for k in 0..200 {
            let l = sample_wishart_eigs(RngStream::new(37).derive(k), 5.0, &lam).unwrap();
            assert_eq!(l.len(), 3);
            for i in 0..3 {
                assert!(l.get(i) > 0.0);
                if i > 0 {
                    assert!(l.get(i - 1) >= l.get(i));
                }
            }
        }
    }

    // E[tr S] = nu * sum(lambda).
    #[test]
    fn wishart_trace_mean() {
        let lam = Spectrum::population(vec![1.0, 1.0]).unwrap();
        let root = RngStream::new(41);
        let n = 100_000;
        let mut traces = Vec::with_capacity(n);
        for k in 0..n {
            let l = sample_wishart_eigs(root.derive(k as u64), 5.0, &lam).unwrap();
            traces.push(l.trace());
        }
        let (mean, se) = mean_and_se(&traces);
        assert!((mean - 10.0).abs() <= 0.1, "mean trace {mean}");
        assert!((mean - 10.0).abs() <= 3.0 * se, "mean trace {mean}, se {se}");
    }

    // W_1(nu, lambda) is lambda * chi-square(nu); with a shared stream the
    // two samplers consume the same single gamma draw.
    #[test]
    fn wishart_one_dim_is_scaled_chi_square() {
        let lam = Spectrum::population(vec![2.0]).unwrap();
        let root = RngStream::new(43);
        for k in 0..100 {
            let s = root.derive(k);
            let eig = sample_wishart_eigs(s, 5.0, &lam).unwrap().get(0);
            let chi = sample_chi_square(s, 5.0).unwrap();
            assert!((eig - 2.0 * chi).abs() <= 1e-12 * eig.abs().max(1.0));
        }
    }

    #[test]
    fn wishart_one_dim_mean() {
        let lam = Spectrum::population(vec![1.0]).unwrap();
        let root = RngStream::new(47);
        let n = 100_000;
        let mut sum = 0.0;
        for k in 0..n {
            sum += sample_wishart_eigs(root.derive(k as u64), 5.0, &lam)
                .unwrap()
                .get(0);
        }
        let mean = sum / n as f64;
        assert!((mean - 5.0).abs() <= 0.05, "mean {mean}");
    }

    #[test]
    fn wishart_is_deterministic() {
        let lam = Spectrum::population(vec![3.0, 1.0]).unwrap();
        let s = RngStream::new(53);
        let a = sample_wishart_eigs(s, 6.0, &lam).unwrap();
        let b = sample_wishart_eigs(s, 6.0, &lam).unwrap();
        assert_eq!(a.values(), b.values());
    }
}
