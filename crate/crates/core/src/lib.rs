//! Admissible estimation of multivariate normal covariance eigenvalues.
//!
//! Given the ordered eigenvalues l of a Wishart-distributed scatter matrix
//! S ~ W_p(nu, diag(lambda)), the estimator computed here shrinks l through
//! a data-dependent mixing matrix tau:
//!
//! ```text
//! psi_i = sum_j tau_ij(l) * l_j,      sum_j tau_ij = 1/(nu + 2)
//! ```
//!
//! with tau obtained by self-normalized Monte Carlo integration over the
//! orthogonal group and an ordered simplex. The crate also ships the two
//! reference estimators l/(nu+2) and l/nu, a risk-simulation harness that
//! measures E[sum_i (psi_i/lambda_i - 1)^2] over repeated Wishart draws,
//! and deterministic splittable RNG streams so every result is reproducible
//! bit for bit at any thread count.
//!
//! The `parallel` feature (on by default) runs the integration point set and
//! the risk replicates on the rayon pool; disabling it yields a fully
//! sequential build with identical outputs.

mod error;
pub mod estimator;
mod exec;
pub mod linalg;
pub mod report;
pub mod rng;
pub mod risk;
pub mod sample;
pub mod selftest;
pub mod tables;

pub use error::{Error, Result};
pub use estimator::{
    compute_tau, loss, mle, phi_star, psi_star, tilde_tau, EstimateResult, McConfig, TauMatrix,
};
pub use linalg::{eig_sym_desc, OrthogonalMatrix, Spectrum, SpectrumRole, SymmetricMatrix};
pub use report::{read_report_json, render_csv, render_json, write_report, ReportFormat};
pub use risk::{
    analytic_mle_risk_identity, analytic_phi_star_risk_identity, heavy_tail_flag,
    reproduce_tables, simulate_risk, simulate_risk_with_losses, EstimatorKind, HeavyTailFlag,
    ReportMetadata, ReportRow, RiskEstimate, RiskReport, Scenario, TauPointMode,
};
pub use rng::RngStream;
pub use sample::{
    sample_chi_square, sample_haar_orthogonal, sample_ordered_unit, sample_wishart_eigs,
};
pub use selftest::{run_selftest, CheckOutcome};
