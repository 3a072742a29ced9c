//! Monte Carlo verification of scaling regimes for perturbed partial sums.
//!
//! For a transform `G` of Hermite rank `k` applied to a long-memory Gaussian
//! sequence with Hurst index `H`, the partial sums
//! `S_N = sum_{n<=N} [G(Y(n) + x_N) - E G(Y(n) + x_N)]` change their scaling
//! law as the shift `x_N = c N^{-beta}` races against the sample size. The
//! regime map is piecewise in `beta`:
//!
//! * short-memory case `H < 1 - 1/(2k)`: diffusive `N^{1/2}` scaling above
//!   the critical rate `beta* = (H - 1/2)/(k - 1)`, a mixture at it, and
//!   `N^H x_N^{k-1}` fractional-Brownian scaling below;
//! * long-memory case `H > 1 - 1/(2k)`: `N^{(H-1)k+1}` Hermite-process
//!   scaling above `beta* = 1 - H`, a mixture at it, and `N^H x_N^{k-1}`
//!   below;
//! * without centering a deterministic drift of order `N x_N^k` additionally
//!   competes, taking over below `beta* = 1/(2k)` (short memory) or
//!   `beta* = 1 - H` (long memory);
//! * replacing the shift by the negated sample mean keeps the fluctuation
//!   order of the unperturbed sums but mixes the limit families.
//!
//! An experiment samples replicated paths over a dyadic grid of `N`, records
//! the replicate spread of the `t = 1` sums, and estimates the fluctuation
//! exponent `alpha` in `scale(S_N) ~ N^alpha` by least squares on the dyadic
//! logs, together with the moment shape of the normalized samples at the
//! largest `N`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fgn::{FgnModel, FgnPath, FgnSampler};
use crate::function::FunctionSpec;
use crate::hermite::{rank_report, weierstrass, Rank, DEFAULT_RANK_TOL, DEFAULT_TRUNCATION};
use crate::quadrature::QuadratureRule;
use crate::stats::{fit_line, jarque_bera, moments, JB_CRITICAL_1PCT};

/// Tolerance for deciding that `beta` sits exactly on a regime boundary.
const BETA_EQ_TOL: f64 = 1e-12;

/// Tolerance for deciding that `H` sits on the excluded boundary `1 - 1/(2k)`.
const BOUNDARY_TOL: f64 = 1e-9;

/// Deterministic shift applied to the argument at sample size `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShiftSchedule {
    /// No perturbation: the classical setting.
    Zero,
    /// `x_N = c N^{-beta}` with `beta > 0`, vanishing as `N` grows.
    PowerLaw { c: f64, beta: f64 },
    /// Replace the shift by the negated sample mean of the path.
    SampleMean,
}

impl ShiftSchedule {
    pub fn validate(&self) -> Result<()> {
        if let ShiftSchedule::PowerLaw { c, beta } = self {
            if !(c.is_finite() && *c != 0.0) {
                return Err(Error::Domain(format!(
                    "power-law shift needs a finite nonzero amplitude, got {c}"
                )));
            }
            if !(beta.is_finite() && *beta > 0.0) {
                return Err(Error::Domain(format!(
                    "power-law shift needs beta > 0 so the shift vanishes, got {beta}"
                )));
            }
        }
        Ok(())
    }

    /// Shift value at sample size `n` (zero for the sample-mean schedule,
    /// where the argument is path-dependent).
    pub fn shift_at(&self, n: usize) -> f64 {
        match self {
            ShiftSchedule::Zero | ShiftSchedule::SampleMean => 0.0,
            ShiftSchedule::PowerLaw { c, beta } => c * (n as f64).powf(-beta),
        }
    }
}

/// Limit family of the normalized sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitFamily {
    BrownianMotion,
    FractionalBm,
    HermiteProcess(usize),
    Mixture,
    DeterministicDrift,
}

/// Regime case labels: central (diffusive), non-central (Hermite-process),
/// drift-dominated, and the sample-mean-centered variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseLabel {
    #[serde(rename = "CLT-a")]
    CltA,
    #[serde(rename = "CLT-b")]
    CltB,
    #[serde(rename = "CLT-c")]
    CltC,
    #[serde(rename = "NCLT-a")]
    NcltA,
    #[serde(rename = "NCLT-b")]
    NcltB,
    #[serde(rename = "NCLT-c")]
    NcltC,
    #[serde(rename = "Drift")]
    Drift,
    #[serde(rename = "MeanCentered-CLT")]
    MeanCenteredClt,
    #[serde(rename = "MeanCentered-NCLT")]
    MeanCenteredNclt,
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseLabel::CltA => "CLT-a",
            CaseLabel::CltB => "CLT-b",
            CaseLabel::CltC => "CLT-c",
            CaseLabel::NcltA => "NCLT-a",
            CaseLabel::NcltB => "NCLT-b",
            CaseLabel::NcltC => "NCLT-c",
            CaseLabel::Drift => "Drift",
            CaseLabel::MeanCenteredClt => "MeanCentered-CLT",
            CaseLabel::MeanCenteredNclt => "MeanCentered-NCLT",
        };
        f.write_str(s)
    }
}

/// Predicted scaling regime for one experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegimePrediction {
    pub case_label: CaseLabel,
    /// `alpha` in `scale(S_N) ~ N^alpha`, always in `[1/2, 1]`.
    pub fluctuation_exponent: f64,
    /// Human-readable form of the normalizer.
    pub normalization: String,
    pub limit_family: LimitFamily,
    /// Regime boundary in `beta`; absent for schedules without a rate.
    pub critical_beta: Option<f64>,
}

/// Scaling exponent of `sum_{n<=N} H_m(Y(n))`: the sums grow like `N^{H[m]}`
/// with `H[m] = max((H-1)m + 1, 1/2)`.
pub fn hermite_sum_exponent(hurst: f64, order: usize) -> f64 {
    ((hurst - 1.0) * order as f64 + 1.0).max(0.5)
}

/// Largest Hermite order whose partial sums keep long memory at this Hurst
/// index: the supremum of `m` with `H > 1 - 1/(2m)`. Orders above it obey the
/// diffusive `N^{1/2}` law.
pub fn long_memory_order_bound(hurst: f64) -> usize {
    let mut m = 0usize;
    while hurst > 1.0 - 1.0 / (2.0 * (m + 1) as f64) {
        m += 1;
    }
    m
}

fn hermite_family(k: usize) -> LimitFamily {
    if k == 1 {
        LimitFamily::FractionalBm
    } else {
        LimitFamily::HermiteProcess(k)
    }
}

fn mixture_family(k: usize) -> LimitFamily {
    if k == 1 {
        LimitFamily::FractionalBm
    } else {
        LimitFamily::Mixture
    }
}

/// Case analysis for the scaling regime of `(H, k, schedule, centered)`.
///
/// `k` is the Hermite rank of the unperturbed transform. Fails on the
/// excluded boundary `H = 1 - 1/(2k)` where neither case applies.
pub fn predict_regime(
    hurst: f64,
    k: usize,
    schedule: &ShiftSchedule,
    centered: bool,
) -> Result<RegimePrediction> {
    if !(hurst > 0.5 && hurst < 1.0) {
        return Err(Error::Domain(format!(
            "Hurst index must lie strictly inside (1/2, 1), got {hurst}"
        )));
    }
    if k < 1 {
        return Err(Error::Domain("rank must be at least 1".into()));
    }
    schedule.validate()?;
    let boundary = 1.0 - 1.0 / (2.0 * k as f64);
    if (hurst - boundary).abs() < BOUNDARY_TOL {
        return Err(Error::BoundaryExcluded { hurst, rank: k });
    }
    let central = hurst < boundary;
    let hg = (hurst - 1.0) * k as f64 + 1.0;

    let prediction = match (schedule, centered) {
        (ShiftSchedule::Zero, _) => {
            if central {
                RegimePrediction {
                    case_label: CaseLabel::CltA,
                    fluctuation_exponent: 0.5,
                    normalization: "N^0.5000".into(),
                    limit_family: LimitFamily::BrownianMotion,
                    critical_beta: None,
                }
            } else {
                RegimePrediction {
                    case_label: CaseLabel::NcltA,
                    fluctuation_exponent: hg,
                    normalization: format!("N^{hg:.4} (= N^((H-1)k+1))"),
                    limit_family: hermite_family(k),
                    critical_beta: None,
                }
            }
        }
        (ShiftSchedule::SampleMean, _) => {
            if central {
                RegimePrediction {
                    case_label: CaseLabel::MeanCenteredClt,
                    fluctuation_exponent: 0.5,
                    normalization: "N^0.5000".into(),
                    limit_family: LimitFamily::BrownianMotion,
                    critical_beta: None,
                }
            } else {
                RegimePrediction {
                    case_label: CaseLabel::MeanCenteredNclt,
                    fluctuation_exponent: hg,
                    normalization: format!("N^{hg:.4} (= N^((H-1)k+1))"),
                    limit_family: mixture_family(k),
                    critical_beta: None,
                }
            }
        }
        (ShiftSchedule::PowerLaw { beta, .. }, true) => {
            let beta = *beta;
            if central {
                // central implies k >= 2, since H > 1/2 >= 1 - 1/(2k) for k = 1
                let beta_star = (hurst - 0.5) / (k - 1) as f64;
                if beta > beta_star + BETA_EQ_TOL {
                    RegimePrediction {
                        case_label: CaseLabel::CltA,
                        fluctuation_exponent: 0.5,
                        normalization: "N^0.5000".into(),
                        limit_family: LimitFamily::BrownianMotion,
                        critical_beta: Some(beta_star),
                    }
                } else if beta >= beta_star - BETA_EQ_TOL {
                    RegimePrediction {
                        case_label: CaseLabel::CltB,
                        fluctuation_exponent: 0.5,
                        normalization: "N^0.5000".into(),
                        limit_family: LimitFamily::Mixture,
                        critical_beta: Some(beta_star),
                    }
                } else {
                    let e = hurst - beta * (k - 1) as f64;
                    RegimePrediction {
                        case_label: CaseLabel::CltC,
                        fluctuation_exponent: e,
                        normalization: format!("N^{e:.4} (= N^H x_N^(k-1))"),
                        limit_family: LimitFamily::FractionalBm,
                        critical_beta: Some(beta_star),
                    }
                }
            } else {
                let beta_star = 1.0 - hurst;
                if beta > beta_star + BETA_EQ_TOL {
                    RegimePrediction {
                        case_label: CaseLabel::NcltA,
                        fluctuation_exponent: hg,
                        normalization: format!("N^{hg:.4} (= N^((H-1)k+1))"),
                        limit_family: hermite_family(k),
                        critical_beta: Some(beta_star),
                    }
                } else if beta >= beta_star - BETA_EQ_TOL {
                    RegimePrediction {
                        case_label: CaseLabel::NcltB,
                        fluctuation_exponent: hg,
                        normalization: format!("N^{hg:.4} (= N^((H-1)k+1))"),
                        limit_family: mixture_family(k),
                        critical_beta: Some(beta_star),
                    }
                } else {
                    let e = hurst - beta * (k - 1) as f64;
                    RegimePrediction {
                        case_label: CaseLabel::NcltC,
                        fluctuation_exponent: e,
                        normalization: format!("N^{e:.4} (= N^H x_N^(k-1))"),
                        limit_family: LimitFamily::FractionalBm,
                        critical_beta: Some(beta_star),
                    }
                }
            }
        }
        (ShiftSchedule::PowerLaw { beta, .. }, false) => {
            let beta = *beta;
            // The drift N x_N^k competes with the centered fluctuations.
            let beta_star = if central {
                1.0 / (2.0 * k as f64)
            } else {
                1.0 - hurst
            };
            if beta > beta_star + BETA_EQ_TOL {
                if central {
                    RegimePrediction {
                        case_label: CaseLabel::CltA,
                        fluctuation_exponent: 0.5,
                        normalization: "N^0.5000".into(),
                        limit_family: LimitFamily::BrownianMotion,
                        critical_beta: Some(beta_star),
                    }
                } else {
                    RegimePrediction {
                        case_label: CaseLabel::NcltA,
                        fluctuation_exponent: hg,
                        normalization: format!("N^{hg:.4} (= N^((H-1)k+1))"),
                        limit_family: hermite_family(k),
                        critical_beta: Some(beta_star),
                    }
                }
            } else if beta >= beta_star - BETA_EQ_TOL {
                let (label, e) = if central {
                    (CaseLabel::CltB, 0.5)
                } else {
                    (CaseLabel::NcltB, hg)
                };
                RegimePrediction {
                    case_label: label,
                    fluctuation_exponent: e,
                    normalization: format!("N^{e:.4} (drift + fluctuation mixture)"),
                    limit_family: LimitFamily::Mixture,
                    critical_beta: Some(beta_star),
                }
            } else {
                let e = 1.0 - beta * k as f64;
                RegimePrediction {
                    case_label: CaseLabel::Drift,
                    fluctuation_exponent: e,
                    normalization: format!("N^{e:.4} (= N x_N^k)"),
                    limit_family: LimitFamily::DeterministicDrift,
                    critical_beta: Some(beta_star),
                }
            }
        }
    };
    debug_assert!(
        prediction.fluctuation_exponent >= 0.5 - 1e-12
            && prediction.fluctuation_exponent <= 1.0 + 1e-12,
        "exponent {} outside [1/2, 1]",
        prediction.fluctuation_exponent
    );
    Ok(prediction)
}

fn check_t_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::Domain("t grid must not be empty".into()));
    }
    for &t in t_grid {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Domain(format!("t values must lie in (0, 1], got {t}")));
        }
    }
    Ok(())
}

/// Accumulate `sum_{n <= floor(N t)} (f(Y(n)) - centering)` for each `t`.
fn accumulate_sums(
    values: &[f64],
    t_grid: &[f64],
    centering: f64,
    f: impl Fn(f64) -> f64,
) -> Vec<f64> {
    let n = values.len();
    let mut cuts: Vec<(usize, usize)> = t_grid
        .iter()
        .enumerate()
        .map(|(i, &t)| (i, (n as f64 * t).floor() as usize))
        .collect();
    cuts.sort_by_key(|&(_, cut)| cut);
    let mut out = vec![0.0; t_grid.len()];
    let mut next = 0;
    while next < cuts.len() && cuts[next].1 == 0 {
        next += 1;
    }
    let mut acc = 0.0;
    for (i, &y) in values.iter().enumerate() {
        acc += f(y) - centering;
        while next < cuts.len() && cuts[next].1 == i + 1 {
            out[cuts[next].0] = acc;
            next += 1;
        }
    }
    out
}

/// Partial sums of the shifted transform along the path at the given time
/// fractions. With `centered` the exact mean `E G(Z + x)` is removed from
/// every summand; the mean comes from quadrature, never from sample averages,
/// so no rank-one residual leaks into higher-rank signals.
pub fn partial_sum_path(
    path: &FgnPath,
    spec: &FunctionSpec,
    x: f64,
    centered: bool,
    t_grid: &[f64],
    rule: &QuadratureRule,
) -> Result<Vec<f64>> {
    check_t_grid(t_grid)?;
    if !x.is_finite() {
        return Err(Error::Domain(format!("shift must be finite, got {x}")));
    }
    let centering = if centered {
        weierstrass(spec, x, rule)?
    } else {
        0.0
    };
    let sums = accumulate_sums(path.values(), t_grid, centering, |y| spec.eval(y + x));
    if let Some(bad) = sums.iter().find(|v| !v.is_finite()) {
        return Err(Error::Evaluation(format!("partial sum overflowed: {bad}")));
    }
    Ok(sums)
}

/// Partial sums with the argument centered by the full-sample mean:
/// `sum_{n <= floor(N t)} G0(Y(n) - mean(Y))` where `G0 = G - E G(Z)`.
/// Only defined for polynomial transforms.
pub fn sample_mean_centered_sum(
    path: &FgnPath,
    spec: &FunctionSpec,
    t_grid: &[f64],
    rule: &QuadratureRule,
) -> Result<Vec<f64>> {
    check_t_grid(t_grid)?;
    if !spec.is_polynomial() {
        return Err(Error::NonPolynomialSpec);
    }
    let c0 = weierstrass(spec, 0.0, rule)?;
    let n = path.len() as f64;
    let mean = path.values().iter().sum::<f64>() / n;
    Ok(accumulate_sums(path.values(), t_grid, c0, |y| {
        spec.eval(y - mean)
    }))
}

/// Configuration of one scaling experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeExperiment {
    pub spec: FunctionSpec,
    pub hurst: f64,
    pub schedule: ShiftSchedule,
    /// Subtract the exact mean `E G(Y + x_N)` from each summand.
    pub centered: bool,
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub base_seed: u64,
}

impl RegimeExperiment {
    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if self.replicates < 200 {
            return Err(Error::Domain(format!(
                "at least 200 replicates are required, got {}",
                self.replicates
            )));
        }
        if self.n_grid.len() < 4 {
            return Err(Error::Domain(format!(
                "the N grid needs at least 4 points, got {}",
                self.n_grid.len()
            )));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("the N grid must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// Replicate statistics at one sample size.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScaleRow {
    pub n: usize,
    /// Shift applied at this sample size.
    pub shift: f64,
    pub mean: f64,
    pub sd: f64,
    /// Standard error of the sd estimate, `sd / sqrt(2(R-1))`.
    pub sd_stderr: f64,
    /// Root mean square of the sums; includes any deterministic drift.
    pub rms: f64,
    pub skewness: f64,
}

/// Moment shape of the normalized samples at the largest grid size, compared
/// against what the predicted limit family allows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitShapeReport {
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub jarque_bera: f64,
    pub jb_p_value: f64,
    pub normality_rejected_1pct: bool,
    /// Whether the shape is consistent with the predicted family; absent for
    /// families without a sharp marginal expectation.
    pub consistent: Option<bool>,
    pub note: String,
}

/// Skewness, kurtosis and a Jarque–Bera normality verdict for at least 200
/// replicate samples, checked against the predicted limit family: Gaussian
/// families expect small skewness, the rank-2 Hermite family expects
/// skewness bounded away from zero (positive when the leading coefficient of
/// the transform is positive).
pub fn classify_limit(samples: &[f64], prediction: &RegimePrediction) -> Result<LimitShapeReport> {
    if samples.len() < 200 {
        return Err(Error::Domain(format!(
            "shape classification needs at least 200 samples, got {}",
            samples.len()
        )));
    }
    let m = moments(samples);
    let (jb, p) = jarque_bera(samples);
    let rejected = jb > JB_CRITICAL_1PCT;
    let (consistent, note) = match prediction.limit_family {
        LimitFamily::BrownianMotion | LimitFamily::FractionalBm => (
            Some(m.skewness.abs() <= 0.5),
            "Gaussian-family limit: skewness should be small".to_string(),
        ),
        LimitFamily::HermiteProcess(2) => (
            Some(m.skewness.abs() >= 0.5),
            "rank-2 Hermite limit: skewness stays bounded away from zero, \
             positive for a positive leading coefficient"
                .to_string(),
        ),
        _ => (
            None,
            "no sharp marginal-shape expectation for this family".to_string(),
        ),
    };
    Ok(LimitShapeReport {
        skewness: m.skewness,
        excess_kurtosis: m.excess_kurtosis,
        jarque_bera: jb,
        jb_p_value: p,
        normality_rejected_1pct: rejected,
        consistent,
        note,
    })
}

/// Full outcome of one experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: RegimeExperiment,
    /// Hermite rank of the unperturbed transform.
    pub rank: usize,
    pub rows: Vec<ScaleRow>,
    pub estimated_exponent: f64,
    pub exponent_stderr: f64,
    pub skewness_at_largest_n: f64,
    pub prediction: RegimePrediction,
    pub shape: LimitShapeReport,
    /// Raw replicate sums at the largest grid size; not serialized.
    #[serde(skip)]
    pub largest_n_samples: Vec<f64>,
}

impl ExperimentReport {
    /// Scale measure used for the exponent regression at each grid size:
    /// the replicate sd for centerings that remove the mean, the rms when a
    /// deterministic drift is part of the signal.
    pub fn scale_measure(&self, row: &ScaleRow) -> f64 {
        if self.uses_rms() {
            row.rms
        } else {
            row.sd
        }
    }

    fn uses_rms(&self) -> bool {
        !self.experiment.centered && self.experiment.schedule != ShiftSchedule::SampleMean
    }
}

/// Run the experiment: replicated paths per grid size with work-item seeds
/// `base_seed + grid_index * replicates + replicate`, replicate spread of the
/// `t = 1` sums, and the dyadic log-log exponent fit. Results are identical
/// for any thread count because every work item is keyed by its seed and
/// reduced in seed order.
pub fn run_experiment(
    experiment: &RegimeExperiment,
    rule: &QuadratureRule,
) -> Result<ExperimentReport> {
    experiment.validate()?;
    let spec = &experiment.spec;
    let report = rank_report(spec, DEFAULT_RANK_TOL, DEFAULT_TRUNCATION, rule)?;
    let rank = match report.hermite_rank {
        Rank::Constant => return Err(Error::ConstantFunction),
        Rank::Order(k) => k,
    };
    let prediction = predict_regime(experiment.hurst, rank, &experiment.schedule, experiment.centered)?;

    let uses_drift = !experiment.centered && experiment.schedule != ShiftSchedule::SampleMean;
    if uses_drift {
        // The drift regimes assume a mean-zero transform; a nonzero mean adds
        // an N-linear trend that belongs to no regime.
        let c0 = weierstrass(spec, 0.0, rule)?;
        let l2 = crate::hermite::expand(spec, 2, rule)?.l2_norm_sq();
        if c0.abs() > 1e-6 * l2.sqrt().max(1.0) {
            return Err(Error::Domain(format!(
                "non-centered experiments need a mean-zero transform; \
                 E G(Z) = {c0:.6e}. Subtract the mean from the spec first"
            )));
        }
    }

    // Construct every sampler before any sampling starts, so an embedding
    // failure aborts the experiment up front instead of mid-run.
    let samplers = experiment
        .n_grid
        .iter()
        .map(|&n| FgnSampler::new(FgnModel::new(experiment.hurst, n)?))
        .collect::<Result<Vec<_>>>()?;

    let replicates = experiment.replicates;
    let mut rows = Vec::with_capacity(experiment.n_grid.len());
    let mut largest_samples = Vec::new();
    for (grid_index, &n) in experiment.n_grid.iter().enumerate() {
        let sampler = &samplers[grid_index];
        let x = experiment.schedule.shift_at(n);
        let sums: Vec<f64> = (0..replicates)
            .into_par_iter()
            .map(|r| -> Result<f64> {
                let seed = experiment
                    .base_seed
                    .wrapping_add((grid_index * replicates + r) as u64);
                let path = sampler.sample(seed);
                let value = match experiment.schedule {
                    ShiftSchedule::SampleMean => {
                        sample_mean_centered_sum(&path, spec, &[1.0], rule)?[0]
                    }
                    _ => partial_sum_path(&path, spec, x, experiment.centered, &[1.0], rule)?[0],
                };
                Ok(value)
            })
            .collect::<Result<_>>()?;
        let m = moments(&sums);
        rows.push(ScaleRow {
            n,
            shift: x,
            mean: m.mean,
            sd: m.sd,
            sd_stderr: m.sd / (2.0 * (replicates as f64 - 1.0)).sqrt(),
            rms: m.rms,
            skewness: m.skewness,
        });
        if grid_index + 1 == experiment.n_grid.len() {
            largest_samples = sums;
        }
    }

    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).log2()).collect();
    let ys: Vec<f64> = rows
        .iter()
        .map(|r| {
            let scale = if uses_drift { r.rms } else { r.sd };
            scale.max(f64::MIN_POSITIVE).log2()
        })
        .collect();
    let fit = fit_line(&xs, &ys).ok_or_else(|| {
        Error::NumericalFailure("exponent regression is degenerate".into())
    })?;

    let shape = classify_limit(&largest_samples, &prediction)?;
    let skewness_at_largest_n = shape.skewness;
    Ok(ExperimentReport {
        experiment: experiment.clone(),
        rank,
        rows,
        estimated_exponent: fit.slope,
        exponent_stderr: fit.slope_stderr,
        skewness_at_largest_n,
        prediction,
        shape,
        largest_n_samples: largest_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgn::sample_fgn;

    fn rule() -> QuadratureRule {
        QuadratureRule::gauss_hermite(200).unwrap()
    }

    #[test]
    fn predictions_for_reference_configurations() {
        // Unperturbed rank-2 transform in the long-memory case.
        let p = predict_regime(0.8, 2, &ShiftSchedule::Zero, true).unwrap();
        assert_eq!(p.case_label, CaseLabel::NcltA);
        assert!((p.fluctuation_exponent - 0.6).abs() < 1e-12);
        assert_eq!(p.limit_family, LimitFamily::HermiteProcess(2));

        // Slow shift in the short-memory case drops to fractional scaling.
        let p = predict_regime(
            0.6,
            3,
            &ShiftSchedule::PowerLaw { c: 1.0, beta: 0.02 },
            true,
        )
        .unwrap();
        assert_eq!(p.case_label, CaseLabel::CltC);
        assert!((p.fluctuation_exponent - 0.56).abs() < 1e-12);
        assert_eq!(p.limit_family, LimitFamily::FractionalBm);

        // Fast shift without centering keeps the Hermite-process regime.
        let p = predict_regime(
            0.8,
            2,
            &ShiftSchedule::PowerLaw { c: 1.0, beta: 0.3 },
            false,
        )
        .unwrap();
        assert_eq!(p.case_label, CaseLabel::NcltA);
        assert!((p.fluctuation_exponent - 0.6).abs() < 1e-12);

        // Slow shift without centering hands over to the drift.
        let p = predict_regime(
            0.8,
            2,
            &ShiftSchedule::PowerLaw { c: 1.0, beta: 0.1 },
            false,
        )
        .unwrap();
        assert_eq!(p.case_label, CaseLabel::Drift);
        assert!((p.fluctuation_exponent - 0.8).abs() < 1e-12);
        assert_eq!(p.limit_family, LimitFamily::DeterministicDrift);
    }

    #[test]
    fn proof_layer_quantities() {
        // H[m] kinks at the diffusive floor.
        assert!((hermite_sum_exponent(0.8, 1) - 0.8).abs() < 1e-15);
        assert!((hermite_sum_exponent(0.8, 2) - 0.6).abs() < 1e-15);
        assert!((hermite_sum_exponent(0.8, 3) - 0.5).abs() < 1e-15);
        assert!((hermite_sum_exponent(0.6, 2) - 0.5).abs() < 1e-15);

        // Largest long-memory order: H > 1 - 1/(2m).
        assert_eq!(long_memory_order_bound(0.6), 1);
        assert_eq!(long_memory_order_bound(0.8), 2);
        assert_eq!(long_memory_order_bound(0.9), 4);
        assert_eq!(long_memory_order_bound(0.75), 1); // boundary not included

        // Consistency with the central/non-central split used by the
        // predictor, away from the excluded boundary.
        for k in 1..=6usize {
            for i in 0..40 {
                let hurst = 0.505 + 0.012 * i as f64;
                let boundary = 1.0 - 1.0 / (2.0 * k as f64);
                if (hurst - boundary).abs() < 1e-9 {
                    continue;
                }
                assert_eq!(
                    hurst < boundary,
                    k > long_memory_order_bound(hurst),
                    "H = {hurst}, k = {k}"
                );
            }
        }
    }

    #[test]
    fn prediction_rejects_the_boundary() {
        match predict_regime(0.75, 2, &ShiftSchedule::Zero, true) {
            Err(Error::BoundaryExcluded { rank: 2, .. }) => {}
            other => panic!("expected boundary rejection, got {other:?}"),
        }
    }

    #[test]
    fn centered_exponent_is_piecewise_linear_with_kink_at_critical_beta() {
        let hurst = 0.8;
        let k = 2;
        let beta_star = 1.0 - hurst;
        let exponent = |beta: f64| {
            predict_regime(hurst, k, &ShiftSchedule::PowerLaw { c: 1.0, beta }, true)
                .unwrap()
                .fluctuation_exponent
        };
        // Linear with slope -(k-1) below the kink, flat above.
        let mut prev = exponent(0.01);
        for i in 2..60 {
            let beta = 0.01 * i as f64;
            let e = exponent(beta);
            assert!(e <= prev + 1e-12, "exponent must not increase in beta");
            if beta < beta_star - 0.015 {
                let slope = (e - prev) / 0.01;
                assert!((slope + (k - 1) as f64).abs() < 1e-9);
            }
            if beta > beta_star + 0.015 {
                assert!((e - 0.6).abs() < 1e-12);
            }
            prev = e;
        }
        // Continuity at the kink.
        assert!((exponent(beta_star) - 0.6).abs() < 1e-12);
        assert!((exponent(beta_star - 1e-9) - 0.6).abs() < 1e-6);
    }

    #[test]
    fn partial_sums_match_direct_accumulation() {
        let rule = rule();
        let path = sample_fgn(FgnModel::new(0.7, 64).unwrap(), 99).unwrap();
        // Identity transform: the sum is just the path sum.
        let id = FunctionSpec::polynomial(&[0.0, 1.0]).unwrap();
        let s = partial_sum_path(&path, &id, 0.0, true, &[1.0], &rule).unwrap()[0];
        let direct: f64 = path.values().iter().sum();
        assert!((s - direct).abs() < 1e-9);

        // Square with exact centering: sum of (y^2 - 1).
        let sq = FunctionSpec::polynomial(&[0.0, 0.0, 1.0]).unwrap();
        let s = partial_sum_path(&path, &sq, 0.0, true, &[1.0], &rule).unwrap()[0];
        let direct: f64 = path.values().iter().map(|&y| y * y - 1.0).sum();
        assert!((s - direct).abs() < 1e-8);

        // Shifted square centers by E (Z + 1/2)^2 = 5/4.
        let s = partial_sum_path(&path, &sq, 0.5, true, &[1.0], &rule).unwrap()[0];
        let direct: f64 = path
            .values()
            .iter()
            .map(|&y| (y + 0.5) * (y + 0.5) - 1.25)
            .sum();
        assert!((s - direct).abs() < 1e-8);

        // Fractional times truncate the sums.
        let s = partial_sum_path(&path, &id, 0.0, true, &[0.5, 1.0], &rule).unwrap();
        let half: f64 = path.values()[..32].iter().sum();
        assert!((s[0] - half).abs() < 1e-9);

        // Times outside (0, 1] are rejected, as are non-finite shifts.
        assert!(partial_sum_path(&path, &id, 0.0, true, &[0.0], &rule).is_err());
        assert!(partial_sum_path(&path, &id, 0.0, true, &[1.2], &rule).is_err());
        assert!(partial_sum_path(&path, &id, f64::NAN, true, &[1.0], &rule).is_err());
    }

    #[test]
    fn sample_mean_centering_identities() {
        let rule = rule();
        let path = sample_fgn(FgnModel::new(0.8, 128).unwrap(), 7).unwrap();

        // Identity transform: centering kills the full sum exactly.
        let id = FunctionSpec::polynomial(&[0.0, 1.0]).unwrap();
        let s = sample_mean_centered_sum(&path, &id, &[1.0], &rule).unwrap()[0];
        assert!(s.abs() < 1e-9, "sum should vanish, got {s}");

        // Centered square: algebraic identity sum (y - ybar)^2 - N =
        // sum (y^2 - 1) - N ybar^2.
        let sq = FunctionSpec::polynomial(&[-1.0, 0.0, 1.0]).unwrap();
        let s = sample_mean_centered_sum(&path, &sq, &[1.0], &rule).unwrap()[0];
        let n = path.len() as f64;
        let ybar = path.values().iter().sum::<f64>() / n;
        let direct: f64 =
            path.values().iter().map(|&y| y * y - 1.0).sum::<f64>() - n * ybar * ybar;
        assert!((s - direct).abs() < 1e-7);

        // Non-polynomial transforms are rejected.
        let abs = FunctionSpec::from_base(crate::function::BaseFunction::Abs).unwrap();
        match sample_mean_centered_sum(&path, &abs, &[1.0], &rule) {
            Err(Error::NonPolynomialSpec) => {}
            other => panic!("expected polynomial rejection, got {other:?}"),
        }
    }

    #[test]
    fn experiment_is_deterministic_and_scale_equivariant() {
        let rule = rule();
        let experiment = RegimeExperiment {
            spec: FunctionSpec::polynomial(&[-1.0, 0.0, 1.0]).unwrap(),
            hurst: 0.8,
            schedule: ShiftSchedule::Zero,
            centered: true,
            n_grid: vec![64, 128, 256, 512],
            replicates: 200,
            base_seed: 11,
        };
        let a = run_experiment(&experiment, &rule).unwrap();
        let b = run_experiment(&experiment, &rule).unwrap();
        assert_eq!(a.estimated_exponent, b.estimated_exponent);
        assert_eq!(a.largest_n_samples, b.largest_n_samples);

        // Tripling the transform triples every sum and leaves the exponent.
        let scaled = RegimeExperiment {
            spec: FunctionSpec::polynomial(&[-3.0, 0.0, 3.0]).unwrap(),
            ..experiment.clone()
        };
        let c = run_experiment(&scaled, &rule).unwrap();
        assert!((c.estimated_exponent - a.estimated_exponent).abs() < 1e-9);
        for (sa, sc) in a.largest_n_samples.iter().zip(&c.largest_n_samples) {
            assert!((3.0 * sa - sc).abs() < 1e-7 * sc.abs().max(1.0));
        }
    }

    #[test]
    fn experiment_rejects_bad_configs() {
        let rule = rule();
        let base = RegimeExperiment {
            spec: FunctionSpec::polynomial(&[-1.0, 0.0, 1.0]).unwrap(),
            hurst: 0.8,
            schedule: ShiftSchedule::Zero,
            centered: true,
            n_grid: vec![64, 128, 256, 512],
            replicates: 200,
            base_seed: 0,
        };
        let few = RegimeExperiment {
            replicates: 100,
            ..base.clone()
        };
        assert!(run_experiment(&few, &rule).is_err());
        let short_grid = RegimeExperiment {
            n_grid: vec![64, 128, 256],
            ..base.clone()
        };
        assert!(run_experiment(&short_grid, &rule).is_err());
        let constant = RegimeExperiment {
            spec: FunctionSpec::polynomial(&[2.0]).unwrap(),
            ..base.clone()
        };
        match run_experiment(&constant, &rule) {
            Err(Error::ConstantFunction) => {}
            other => panic!("expected constant rejection, got {other:?}"),
        }
        // Non-centered with a nonzero mean is rejected.
        let drifty = RegimeExperiment {
            spec: FunctionSpec::polynomial(&[0.0, 0.0, 1.0]).unwrap(),
            centered: false,
            schedule: ShiftSchedule::PowerLaw { c: 1.0, beta: 0.1 },
            ..base
        };
        assert!(run_experiment(&drifty, &rule).is_err());
    }

    #[test]
    fn classify_limit_flags_gaussian_and_skewed_samples() {
        // Deterministic Gaussian-like sample via a symmetric quantile spread.
        let gaussian: Vec<f64> = (1..=500)
            .map(|i| {
                let u = i as f64 / 501.0;
                (u / (1.0 - u)).ln() * 0.607
            })
            .collect();
        let brownian = predict_regime(0.6, 2, &ShiftSchedule::Zero, true).unwrap();
        let report = classify_limit(&gaussian, &brownian).unwrap();
        assert!(!report.normality_rejected_1pct, "jb = {}", report.jarque_bera);
        assert_eq!(report.consistent, Some(true));

        // Chi-squared-mixture-like positive skew for the rank-2 family.
        let skewed: Vec<f64> = (0..500)
            .map(|i| {
                let z = gaussian[(i * 7) % 500];
                z * z - 1.0 + 0.3 * z
            })
            .collect();
        let rosenblatt = predict_regime(0.8, 2, &ShiftSchedule::Zero, true).unwrap();
        let report = classify_limit(&skewed, &rosenblatt).unwrap();
        assert_eq!(report.consistent, Some(true));
        assert!(report.skewness > 0.5);

        assert!(classify_limit(&gaussian[..100], &brownian).is_err());
    }

    #[test]
    fn schedule_shift_values() {
        assert_eq!(ShiftSchedule::Zero.shift_at(1024), 0.0);
        let pl = ShiftSchedule::PowerLaw { c: 2.0, beta: 0.5 };
        assert!((pl.shift_at(1024) - 2.0 / 32.0).abs() < 1e-15);
        assert!(ShiftSchedule::PowerLaw { c: 0.0, beta: 0.5 }.validate().is_err());
        assert!(ShiftSchedule::PowerLaw { c: 1.0, beta: 0.0 }.validate().is_err());
    }
}
