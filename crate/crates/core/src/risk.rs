//! Monte Carlo risk evaluation: expected loss of an estimator over repeated
//! Wishart draws, closed-form moment oracles for the identity-covariance
//! column, and reproduction of the two built-in tables.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{compute_tau, loss, mle, phi_star, psi_star, McConfig};
use crate::exec::map_indexed;
use crate::linalg::{Spectrum, SpectrumRole};
use crate::rng::{derive_seed, RngStream};
use crate::sample::sample_wishart_eigs;
use crate::tables::table_spec;

/// Stream index reserved for the frozen tau point set; replicate indices
/// are far below it.
const FROZEN_TAU_INDEX: u64 = u64::MAX;
/// Child index under a replicate stream that feeds fresh tau points.
const TAU_SUBSTREAM: u64 = 1;
/// A cell is flagged heavy-tailed when the losses above the 99.9th
/// percentile carry more than this share of the total loss mass.
const HEAVY_TAIL_SHARE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// psi_i = sum_j tau_ij l_j.
    PsiStar,
    /// l/(nu+2).
    PhiStar,
    /// l/nu.
    Mle,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::PsiStar => "psi_star",
            EstimatorKind::PhiStar => "phi_star",
            EstimatorKind::Mle => "mle",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psi_star" => Ok(EstimatorKind::PsiStar),
            "phi_star" => Ok(EstimatorKind::PhiStar),
            "mle" => Ok(EstimatorKind::Mle),
            other => Err(Error::InvalidParameter(format!(
                "unknown estimator {other:?}; expected psi_star, phi_star or mle"
            ))),
        }
    }
}

/// Whether each replicate draws its own tau integration points or all
/// replicates share one fixed point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TauPointMode {
    #[default]
    Fresh,
    Frozen,
}

/// One risk-simulation cell: which estimator, at which parameter point,
/// with how much Monte Carlo effort.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub p: usize,
    pub nu: f64,
    pub lambda: Spectrum,
    pub n_rep: usize,
    pub mc: McConfig,
    pub seed: u64,
    pub estimator: EstimatorKind,
    pub tau_points: TauPointMode,
}

impl Scenario {
    pub fn new(lambda: Spectrum, nu: f64, estimator: EstimatorKind, seed: u64) -> Self {
        Scenario {
            p: lambda.len(),
            nu,
            lambda,
            n_rep: 10_000,
            mc: McConfig::default(),
            seed,
            estimator,
            tau_points: TauPointMode::Fresh,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda.role() != SpectrumRole::Population {
            return Err(Error::InvalidInput(
                "scenario lambda must be a population spectrum".into(),
            ));
        }
        if self.p != self.lambda.len() {
            return Err(Error::DimensionMismatch(format!(
                "scenario p = {} but lambda has length {}",
                self.p,
                self.lambda.len()
            )));
        }
        if !self.nu.is_finite() || self.nu < self.p as f64 {
            return Err(Error::InvalidParameter(format!(
                "degrees of freedom must satisfy nu >= p, got nu={}, p={}",
                self.nu, self.p
            )));
        }
        if self.n_rep == 0 {
            return Err(Error::InvalidConfig("n_rep must be >= 1".into()));
        }
        if self.mc.n_points == 0 {
            return Err(Error::InvalidConfig("n_points must be >= 1".into()));
        }
        Ok(())
    }
}

/// Simulated risk with its Monte Carlo uncertainty.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskEstimate {
    /// Mean loss over replicates.
    pub mean_loss: f64,
    /// Sample standard deviation of per-replicate losses / sqrt(n_rep);
    /// 0 when n_rep = 1.
    pub std_error: f64,
    pub n_rep: usize,
    /// Smallest per-row effective sample size seen across replicates; only
    /// the mixing-matrix estimator carries one.
    pub ess_min: Option<f64>,
}

/// Risk plus the raw per-replicate losses, for tail diagnostics.
pub fn simulate_risk_with_losses(s: &Scenario) -> Result<(RiskEstimate, Vec<f64>)> {
    s.validate()?;
    let root = RngStream::new(s.seed);
    let frozen = root.derive(FROZEN_TAU_INDEX);

    // The mixing-matrix estimator does real work per replicate; the
    // reference estimators are a single Wishart draw each.
    let chunk = match s.estimator {
        EstimatorKind::PsiStar => 4,
        _ => 256,
    };
    let outcomes: Vec<Result<(f64, Option<f64>)>> = map_indexed(s.n_rep, chunk, |k| {
        let rep = root.derive(k as u64);
        let l = sample_wishart_eigs(rep, s.nu, &s.lambda)?;
        match s.estimator {
            EstimatorKind::PhiStar => Ok((loss(&phi_star(&l, s.nu)?, &s.lambda)?, None)),
            EstimatorKind::Mle => Ok((loss(&mle(&l, s.nu)?, &s.lambda)?, None)),
            EstimatorKind::PsiStar => {
                let tau_stream = match s.tau_points {
                    TauPointMode::Fresh => rep.derive(TAU_SUBSTREAM),
                    TauPointMode::Frozen => frozen,
                };
                let tau = compute_tau(&l, s.nu, &s.mc, tau_stream)?;
                let est = psi_star(&l, tau)?;
                let ess = est.ess.iter().copied().fold(f64::INFINITY, f64::min);
                Ok((loss(&est.psi, &s.lambda)?, Some(ess)))
            }
        }
    });

    // Replicate-ordered reduction: identical at any thread count.
    let mut losses = Vec::with_capacity(s.n_rep);
    let mut ess_min: Option<f64> = None;
    for outcome in outcomes {
        let (lv, ess) = outcome?;
        losses.push(lv);
        if let Some(e) = ess {
            ess_min = Some(match ess_min {
                Some(cur) => cur.min(e),
                None => e,
            });
        }
    }

    let n = losses.len() as f64;
    let mean = losses.iter().sum::<f64>() / n;
    let std_error = if losses.len() > 1 {
        let var = losses.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };

    Ok((
        RiskEstimate {
            mean_loss: mean,
            std_error,
            n_rep: losses.len(),
            ess_min,
        },
        losses,
    ))
}

/// Mean loss of `s.estimator` over `s.n_rep` Wishart replicates. Replicate
/// k draws from stream `derive(seed_root, k)`, so the result is a pure
/// function of the scenario.
pub fn simulate_risk(s: &Scenario) -> Result<RiskEstimate> {
    Ok(simulate_risk_with_losses(s)?.0)
}

/// Closed-form risk of l/(nu+2) at lambda = (1,...,1):
/// 2p/(nu+2) + p(p-1)nu/(nu+2)^2.
///
/// Follows from expanding the loss in tr S and tr S^2 and the Wishart
/// moments E[tr S] = p nu, E[tr S^2] = p nu (nu + p + 1) at identity
/// covariance. Assumes nu >= p >= 1.
pub fn analytic_phi_star_risk_identity(p: usize, nu: f64) -> f64 {
    let pf = p as f64;
    2.0 * pf / (nu + 2.0) + pf * (pf - 1.0) * nu / ((nu + 2.0) * (nu + 2.0))
}

/// Closed-form risk of l/nu at lambda = (1,...,1): p(p+1)/nu, by the same
/// moment expansion. Assumes nu >= p >= 1.
pub fn analytic_mle_risk_identity(p: usize, nu: f64) -> f64 {
    let pf = p as f64;
    pf * (pf + 1.0) / nu
}

/// Run metadata attached to every persisted report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub seed: u64,
    pub n_points: usize,
    pub n_rep: usize,
    pub version: String,
    /// Wall time of the producing run. `None` in deterministic contexts so
    /// that identical inputs serialize to identical bytes.
    pub wall_ms: Option<u64>,
    /// Cells whose loss mass concentrates in the top 0.1% of replicates.
    #[serde(default)]
    pub heavy_tail: Vec<HeavyTailFlag>,
}

/// One (lambda, nu, estimator) result row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub lambda: Vec<f64>,
    pub nu: f64,
    pub estimator: EstimatorKind,
    pub risk: f64,
    pub std_error: f64,
}

/// Tail diagnostics for a heavy-tailed cell: the 99.9th-percentile loss,
/// the share of total loss mass above it, and the largest single loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeavyTailFlag {
    pub lambda: Vec<f64>,
    pub nu: f64,
    pub estimator: EstimatorKind,
    pub p999_loss: f64,
    pub tail_share: f64,
    pub max_loss: f64,
}

/// A grid of simulated risks with provenance metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<ReportRow>,
}

/// Flag a cell whose top-0.1% losses dominate the total. Returns `None`
/// when n_rep is too small to resolve the 99.9th percentile or the tail
/// share stays moderate.
pub fn heavy_tail_flag(
    lambda: &[f64],
    nu: f64,
    estimator: EstimatorKind,
    losses: &[f64],
) -> Option<HeavyTailFlag> {
    let n = losses.len();
    let cut = (n as f64 * 0.999).ceil() as usize;
    if cut >= n {
        return None;
    }
    let mut sorted = losses.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let total: f64 = sorted.iter().sum();
    let tail: f64 = sorted[cut..].iter().sum();
    let share = tail / total;
    if share.is_nan() || share <= HEAVY_TAIL_SHARE {
        return None;
    }
    Some(HeavyTailFlag {
        lambda: lambda.to_vec(),
        nu,
        estimator,
        p999_loss: sorted[cut - 1],
        tail_share: share,
        max_loss: sorted[n - 1],
    })
}

/// Simulate a full built-in table: every (pattern, nu) cell for both the
/// mixing-matrix estimator and l/(nu+2), with fresh tau points.
///
/// Rows are ordered pattern-major, then nu in (5, 20, 50), then estimator
/// (psi_star, phi_star). The two estimators of a cell share one derived
/// seed, so they see identical Wishart draws and their risk difference is
/// not blurred by independent sampling noise. `wall_ms` is left unset:
/// equal arguments must produce byte-identical reports.
pub fn reproduce_tables(table: u8, seed: u64, n_rep: usize, mc: &McConfig) -> Result<RiskReport> {
    let spec = table_spec(table)?;
    let mut rows = Vec::with_capacity(spec.cell_count() * 2);
    let mut flags = Vec::new();
    for (pi, pattern) in spec.patterns.iter().enumerate() {
        let lambda = Spectrum::population(pattern.to_vec())?;
        for (ni, &nu) in spec.nus.iter().enumerate() {
            let cell = (pi * spec.nus.len() + ni) as u64;
            let cell_seed = derive_seed(seed, (table as u64) * 1_000 + cell);
            for estimator in [EstimatorKind::PsiStar, EstimatorKind::PhiStar] {
                let scenario = Scenario {
                    p: spec.p,
                    nu,
                    lambda: lambda.clone(),
                    n_rep,
                    mc: *mc,
                    seed: cell_seed,
                    estimator,
                    tau_points: TauPointMode::Fresh,
                };
                let (risk, losses) = simulate_risk_with_losses(&scenario)?;
                rows.push(ReportRow {
                    lambda: pattern.to_vec(),
                    nu,
                    estimator,
                    risk: risk.mean_loss,
                    std_error: risk.std_error,
                });
                if let Some(flag) = heavy_tail_flag(pattern, nu, estimator, &losses) {
                    flags.push(flag);
                }
            }
        }
    }
    Ok(RiskReport {
        metadata: ReportMetadata {
            seed,
            n_points: mc.n_points,
            n_rep,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_ms: None,
            heavy_tail: flags,
        },
        rows,
    })
}
