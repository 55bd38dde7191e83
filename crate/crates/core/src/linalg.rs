//! Small dense symmetric linear algebra: spectra, symmetric and orthogonal
//! matrices, and a cyclic Jacobi eigensolver.
//!
//! Dimensions here are tiny (p <= ~10), so everything is stored as a flat
//! row-major `Vec<f64>` and the eigensolver favors simplicity and
//! portability over asymptotic speed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether a spectrum holds sample eigenvalues (of a scatter matrix draw) or
/// population eigenvalues (of the underlying covariance).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumRole {
    Sample,
    Population,
}

/// An ordered positive eigenvalue vector: strictly positive, non-increasing.
///
/// Ties are accepted; they arise from user input even though they occur with
/// probability zero in sampled spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    role: SpectrumRole,
}

impl Spectrum {
    pub fn new(values: Vec<f64>, role: SpectrumRole) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("spectrum must be non-empty".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "spectrum entry {i} is not finite"
                )));
            }
            if v <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "spectrum entry {i} is not strictly positive: {v}"
                )));
            }
            if i > 0 && values[i - 1] < v {
                return Err(Error::InvalidInput(format!(
                    "spectrum is not descending at index {i}: {} < {v}",
                    values[i - 1]
                )));
            }
        }
        Ok(Spectrum { values, role })
    }

    pub fn sample(values: Vec<f64>) -> Result<Self> {
        Spectrum::new(values, SpectrumRole::Sample)
    }

    pub fn population(values: Vec<f64>) -> Result<Self> {
        Spectrum::new(values, SpectrumRole::Population)
    }

    pub fn role(&self) -> SpectrumRole {
        self.role
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Sum of the eigenvalues (the trace of the underlying matrix).
    pub fn trace(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// A p x p real symmetric matrix. Symmetry holds by construction: writes
/// mirror across the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    p: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidDimension("matrix dimension must be >= 1".into()));
        }
        Ok(SymmetricMatrix {
            p,
            data: vec![0.0; p * p],
        })
    }

    /// Build from full rows, rejecting non-square or non-symmetric input.
    /// Symmetry is checked exactly: callers feeding measured data that is
    /// only symmetric up to rounding must symmetrize first.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.len();
        if p == 0 {
            return Err(Error::InvalidDimension("matrix dimension must be >= 1".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::InvalidInput(format!(
                    "row {i} has length {} in a {p}x{p} matrix",
                    row.len()
                )));
            }
        }
        let mut m = SymmetricMatrix::zeros(p)?;
        for (i, row) in rows.iter().enumerate() {
            for (j, &val) in row.iter().enumerate() {
                if val != rows[j][i] {
                    return Err(Error::InvalidInput(format!(
                        "matrix is not symmetric: entry ({i},{j}) = {val} but ({j},{i}) = {}",
                        rows[j][i]
                    )));
                }
                m.data[i * p + j] = val;
            }
        }
        Ok(m)
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = SymmetricMatrix::zeros(diag.len())?;
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = v;
        }
        Ok(m)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.p + j]
    }

    /// Set entry (i, j) and its mirror (j, i).
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.p + j] = v;
        self.data[j * self.p + i] = v;
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.p {
            for j in 0..self.p {
                if i != j {
                    let v = self.get(i, j);
                    s += v * v;
                }
            }
        }
        s.sqrt()
    }

    fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// A p x p orthogonal matrix H, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMatrix {
    p: usize,
    data: Vec<f64>,
}

impl OrthogonalMatrix {
    pub(crate) fn from_raw(p: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), p * p);
        OrthogonalMatrix { p, data }
    }

    pub fn identity(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidDimension("matrix dimension must be >= 1".into()));
        }
        let mut data = vec![0.0; p * p];
        for i in 0..p {
            data[i * p + i] = 1.0;
        }
        Ok(OrthogonalMatrix { p, data })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.p + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    /// max |(H^T H - I)_{ij}|.
    pub fn orthogonality_defect(&self) -> f64 {
        let p = self.p;
        let mut worst: f64 = 0.0;
        for i in 0..p {
            for j in 0..p {
                let mut dot = 0.0;
                for k in 0..p {
                    dot += self.data[k * p + i] * self.data[k * p + j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// H -> P H (left multiplication by another orthogonal matrix).
    pub fn left_mul(&self, p_mat: &OrthogonalMatrix) -> OrthogonalMatrix {
        let p = self.p;
        assert_eq!(p, p_mat.p, "dimension mismatch in left_mul");
        let mut out = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                let mut s = 0.0;
                for k in 0..p {
                    s += p_mat.get(i, k) * self.get(k, j);
                }
                out[i * p + j] = s;
            }
        }
        OrthogonalMatrix { p, data: out }
    }

    /// H -> -H. Still orthogonal; used for antithetic pairing.
    pub fn negated(&self) -> OrthogonalMatrix {
        OrthogonalMatrix {
            p: self.p,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}

/// Convergence threshold for the Jacobi sweep: off-diagonal Frobenius norm
/// relative to the full Frobenius norm.
const JACOBI_REL_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns the eigenvalues (unsorted) and the accumulated rotation matrix Q
/// with Q^T M Q = diag(eigenvalues). Convergence: off-diagonal Frobenius
/// norm below `1e-12 *` the matrix Frobenius norm, hard cap 100 sweeps.
pub(crate) fn jacobi_eigen(m: &SymmetricMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    if !m.is_finite() {
        return Err(Error::InvalidInput(
            "matrix has non-finite entries".into(),
        ));
    }
    let p = m.p;
    let mut a = m.clone();
    let mut q = vec![0.0; p * p];
    for i in 0..p {
        q[i * p + i] = 1.0;
    }
    if p == 1 {
        return Ok((vec![a.get(0, 0)], q));
    }

    let total_norm = a.frobenius_norm();
    let threshold = JACOBI_REL_TOL * total_norm;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if a.off_diagonal_norm() <= threshold {
            break;
        }
        for i in 0..p - 1 {
            for j in i + 1..p {
                let apq = a.get(i, j);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(i, i);
                let aqq = a.get(j, j);
                // Rotation angle chosen to annihilate a_ij.
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    // Degenerate angle: 1/(2 theta) avoids overflow in
                    // theta^2.
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // Congruence update J^T A J. Writes mirror across the
                // diagonal, so each off-block pair is touched exactly once.
                for k in 0..p {
                    if k == i || k == j {
                        continue;
                    }
                    let aki = a.get(k, i);
                    let akj = a.get(k, j);
                    a.set(k, i, c * aki - s * akj);
                    a.set(k, j, s * aki + c * akj);
                }
                // The rotation zeroes a_ij only up to rounding; write the
                // exact zero the update targets.
                a.set(i, j, 0.0);
                a.set(i, i, app - t * apq);
                a.set(j, j, aqq + t * apq);

                for k in 0..p {
                    let qki = q[k * p + i];
                    let qkj = q[k * p + j];
                    q[k * p + i] = c * qki - s * qkj;
                    q[k * p + j] = s * qki + c * qkj;
                }
            }
        }
    }

    let eigs = (0..p).map(|i| a.get(i, i)).collect();
    Ok((eigs, q))
}

/// Eigenvalues of a symmetric matrix, sorted descending, as a sample
/// spectrum.
///
/// Fails on non-finite entries and on matrices whose eigenvalues are not all
/// strictly positive (the spectrum type requires positivity).
pub fn eig_sym_desc(m: &SymmetricMatrix) -> Result<Spectrum> {
    let (mut eigs, _q) = jacobi_eigen(m)?;
    eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Spectrum::sample(eigs)
}
