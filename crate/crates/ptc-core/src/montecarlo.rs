//! Monte Carlo experiment harness: accuracy curves over a swept design
//! variable with batch-means confidence intervals, paired classifier
//! comparisons, and CSV / JSON emission.
//!
//! Every realization runs on its own RNG stream derived from
//! `(master_seed, grid index, run index, realization index)`, so curves are
//! bit-identical for any degree of parallelism and any execution order.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::classify::{self, Decision, MsprtConfig};
use crate::real::{uniform01, Real};
use crate::seed;
use crate::stats;
use crate::traffic::{
    GammaParams, HypothesisModel, HypothesisSet, NoisyPeriods, PeriodKind, PeriodSample, RateSpec,
};
use crate::{Error, Result};

/// Classifier variant run by the harness; names match the CLI method flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ClassifierKind {
    /// Fixed-sample maximum likelihood on exact periods.
    #[serde(rename = "mlc")]
    Mlc,
    /// Sequential posterior-threshold test on exact periods.
    #[serde(rename = "msprt")]
    Msprt,
    /// Fixed-sample maximum likelihood on sampled (noisy) periods.
    #[serde(rename = "mlc-noisy")]
    MlcNoisy,
    /// Sequential test on sampled (noisy) periods.
    #[serde(rename = "msprt-noisy")]
    MsprtNoisy,
    /// Estimate-then-classify maximum likelihood (rates re-estimated).
    #[serde(rename = "etc-mlc")]
    EtcMlc,
    /// Estimate-then-classify sequential test.
    #[serde(rename = "etc-msprt")]
    EtcMsprt,
    /// Averaged-likelihood maximum likelihood (uniform rate priors).
    #[serde(rename = "alf-mlc")]
    AlfMlc,
    /// Averaged-likelihood sequential test.
    #[serde(rename = "alf-msprt")]
    AlfMsprt,
}

impl ClassifierKind {
    /// Every variant, in CLI declaration order.
    pub const ALL: [ClassifierKind; 8] = [
        ClassifierKind::Mlc,
        ClassifierKind::Msprt,
        ClassifierKind::MlcNoisy,
        ClassifierKind::MsprtNoisy,
        ClassifierKind::EtcMlc,
        ClassifierKind::EtcMsprt,
        ClassifierKind::AlfMlc,
        ClassifierKind::AlfMsprt,
    ];

    /// Stable flag-style name (`mlc-noisy`, `etc-msprt`, …).
    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Mlc => "mlc",
            ClassifierKind::Msprt => "msprt",
            ClassifierKind::MlcNoisy => "mlc-noisy",
            ClassifierKind::MsprtNoisy => "msprt-noisy",
            ClassifierKind::EtcMlc => "etc-mlc",
            ClassifierKind::EtcMsprt => "etc-msprt",
            ClassifierKind::AlfMlc => "alf-mlc",
            ClassifierKind::AlfMsprt => "alf-msprt",
        }
    }

    /// Sweep variables this classifier can respond to. Fixed-sample exact
    /// classifiers only see the period count; sequential ones only their
    /// threshold; the noisy variants additionally react to the sampling
    /// period, whether given directly or through a sensing budget.
    pub fn allowed_sweeps(self) -> &'static [SweepVariable] {
        match self {
            ClassifierKind::Mlc | ClassifierKind::EtcMlc | ClassifierKind::AlfMlc => {
                &[SweepVariable::NPeriods]
            }
            ClassifierKind::Msprt | ClassifierKind::EtcMsprt | ClassifierKind::AlfMsprt => {
                &[SweepVariable::Gamma]
            }
            ClassifierKind::MlcNoisy => &[
                SweepVariable::NPeriods,
                SweepVariable::Ts,
                SweepVariable::NSamples,
                SweepVariable::TTime,
            ],
            ClassifierKind::MsprtNoisy => &[
                SweepVariable::Gamma,
                SweepVariable::Ts,
                SweepVariable::NSamples,
                SweepVariable::TTime,
            ],
        }
    }

}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|kind| kind.name() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown classifier {s:?}; expected one of mlc, msprt, mlc-noisy, \
                     msprt-noisy, etc-mlc, etc-msprt, alf-mlc, alf-msprt"
                ))
            })
    }
}

/// Design variable swept along the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SweepVariable {
    /// Number of traffic periods per classification (fixed-sample variants).
    #[serde(rename = "n_periods")]
    NPeriods,
    /// Sampling period `T_s` (noisy variants).
    #[serde(rename = "t_s")]
    Ts,
    /// Samples per sensing window; resolves to `T_s = T/(N−1)` with the
    /// configured window length.
    #[serde(rename = "n_samples")]
    NSamples,
    /// Sensing window length; resolves to `T_s = T/(N−1)` with the configured
    /// sample count.
    #[serde(rename = "t_time")]
    TTime,
    /// Sequential stopping threshold γ.
    #[serde(rename = "gamma")]
    Gamma,
}

impl SweepVariable {
    /// Stable flag-style name (`n_periods`, `t_s`, …).
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::NPeriods => "n_periods",
            SweepVariable::Ts => "t_s",
            SweepVariable::NSamples => "n_samples",
            SweepVariable::TTime => "t_time",
            SweepVariable::Gamma => "gamma",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SweepVariable::NPeriods,
            SweepVariable::Ts,
            SweepVariable::NSamples,
            SweepVariable::TTime,
            SweepVariable::Gamma,
        ]
        .into_iter()
        .find(|v| v.name() == s)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "unknown sweep variable {s:?}; expected one of n_periods, t_s, n_samples, \
                 t_time, gamma"
            ))
        })
    }
}

/// Full description of one Monte Carlo experiment.
///
/// The grid sweeps exactly one design variable; every other knob is held at
/// its `base_*` value. Defaults: 10 periods, `T_s = 1`, `γ = 0.1`, a 60 s
/// window sampled 50 times, and one rate draw per realization for
/// fluctuating hypotheses.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ExperimentConfig<R> {
    /// Hypotheses and priors classified against.
    pub scenario: HypothesisSet<R>,
    /// Classifier variant under test.
    pub classifier: ClassifierKind,
    /// The swept design variable.
    pub sweep_variable: SweepVariable,
    /// Grid of sweep values; one curve point per entry.
    pub sweep_grid: Vec<R>,
    /// Independent batches for the batch-means confidence interval.
    pub runs: usize,
    /// Classification problems per batch.
    pub realizations_per_run: usize,
    /// Root of every derived RNG stream.
    pub master_seed: u64,
    /// Periods per classification when `n_periods` is not swept.
    pub base_n_periods: usize,
    /// Sampling period for noisy classifiers when `t_s` is neither swept nor
    /// derived from a sensing budget.
    pub base_t_s: R,
    /// Threshold for sequential classifiers when `gamma` is not swept.
    pub base_gamma: R,
    /// Sensing window length backing an `n_samples` sweep.
    pub base_t_time: R,
    /// Samples per window backing a `t_time` sweep.
    pub base_n_samples: usize,
    /// Redraw a fluctuating rate before every period instead of once per
    /// realization. Off by default; fixed-rate scenarios are unaffected.
    pub redraw_rate_per_period: bool,
}

impl<R: Real> ExperimentConfig<R> {
    /// Experiment with default base values, validated for internal
    /// consistency.
    ///
    /// # Errors
    /// Invalid-parameter error for empty counts/grids or out-of-domain grid
    /// values; mismatch error when the classifier cannot sweep the variable
    /// or cannot run on the scenario's rate specifications.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        scenario: HypothesisSet<R>,
        classifier: ClassifierKind,
        sweep_variable: SweepVariable,
        sweep_grid: Vec<R>,
        runs: usize,
        realizations_per_run: usize,
        master_seed: u64,
    ) -> Result<Self> {
        let cfg = Self {
            scenario,
            classifier,
            sweep_variable,
            sweep_grid,
            runs,
            realizations_per_run,
            master_seed,
            base_n_periods: 10,
            base_t_s: R::one(),
            base_gamma: R::of(0.1),
            base_t_time: R::of(60.0),
            base_n_samples: 50,
            redraw_rate_per_period: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Re-checks all invariants; called by the runners, so direct field edits
    /// cannot smuggle an inconsistent configuration past construction.
    ///
    /// # Errors
    /// As [`ExperimentConfig::new`].
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidParameter(
                "experiment requires at least one run".into(),
            ));
        }
        if self.realizations_per_run == 0 {
            return Err(Error::InvalidParameter(
                "experiment requires at least one realization per run".into(),
            ));
        }
        if self.sweep_grid.is_empty() {
            return Err(Error::InvalidParameter("sweep grid must be nonempty".into()));
        }
        if !self.classifier.allowed_sweeps().contains(&self.sweep_variable) {
            return Err(Error::Mismatch(format!(
                "classifier {} cannot sweep {}; supported: {}",
                self.classifier,
                self.sweep_variable,
                self.classifier
                    .allowed_sweeps()
                    .iter()
                    .map(|v| v.name())
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        match self.classifier {
            ClassifierKind::Mlc
            | ClassifierKind::Msprt
            | ClassifierKind::MlcNoisy
            | ClassifierKind::MsprtNoisy => {
                self.scenario.require_fixed()?;
            }
            ClassifierKind::AlfMlc | ClassifierKind::AlfMsprt => {
                for (j, model) in self.scenario.models().iter().enumerate() {
                    if matches!(model.rate_spec(), RateSpec::Fixed(_)) {
                        return Err(Error::Mismatch(format!(
                            "hypothesis {} has a fixed rate; averaged-likelihood classifiers \
                             need a rate prior on every hypothesis",
                            j + 1
                        )));
                    }
                }
            }
            // Estimate-then-classify ignores the rate specifications.
            ClassifierKind::EtcMlc | ClassifierKind::EtcMsprt => {}
        }
        for &x in &self.sweep_grid {
            if !x.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "sweep grid values must be finite, got {x}"
                )));
            }
            match self.sweep_variable {
                SweepVariable::NPeriods => {
                    if !(x >= R::one()) || x.fract() != R::zero() {
                        return Err(Error::InvalidParameter(format!(
                            "n_periods grid values must be integers >= 1, got {x}"
                        )));
                    }
                }
                SweepVariable::Ts | SweepVariable::TTime => {
                    if !(x > R::zero()) {
                        return Err(Error::InvalidParameter(format!(
                            "{} grid values must be positive, got {x}",
                            self.sweep_variable
                        )));
                    }
                }
                SweepVariable::NSamples => {
                    if !(x >= R::of(2.0)) || x.fract() != R::zero() {
                        return Err(Error::InvalidParameter(format!(
                            "n_samples grid values must be integers >= 2, got {x}"
                        )));
                    }
                }
                SweepVariable::Gamma => {
                    if !(x >= R::zero()) {
                        return Err(Error::InvalidParameter(format!(
                            "gamma grid values must be nonnegative, got {x}"
                        )));
                    }
                }
            }
        }
        // Base values may back any grid point, so they are always held valid.
        if self.base_n_periods == 0 {
            return Err(Error::InvalidParameter(
                "base_n_periods must be at least 1".into(),
            ));
        }
        if !(self.base_t_s > R::zero()) || !self.base_t_s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "base_t_s must be positive and finite, got {}",
                self.base_t_s
            )));
        }
        if !(self.base_gamma >= R::zero()) || !self.base_gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "base_gamma must be nonnegative and finite, got {}",
                self.base_gamma
            )));
        }
        if !(self.base_t_time > R::zero()) || !self.base_t_time.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "base_t_time must be positive and finite, got {}",
                self.base_t_time
            )));
        }
        if self.base_n_samples < 2 {
            return Err(Error::InvalidParameter(
                "base_n_samples must be at least 2".into(),
            ));
        }
        Ok(())
    }

    /// Design knobs at one grid point: periods per classification, sampling
    /// period, and sequential threshold.
    fn point_knobs(&self, x: R) -> (usize, R, R) {
        match self.sweep_variable {
            SweepVariable::NPeriods => {
                (x.as_f64().round() as usize, self.base_t_s, self.base_gamma)
            }
            SweepVariable::Ts => (self.base_n_periods, x, self.base_gamma),
            SweepVariable::NSamples => (
                self.base_n_periods,
                self.base_t_time / (x - R::one()),
                self.base_gamma,
            ),
            SweepVariable::TTime => (
                self.base_n_periods,
                x / R::of(self.base_n_samples as f64 - 1.0),
                self.base_gamma,
            ),
            SweepVariable::Gamma => (self.base_n_periods, self.base_t_s, x),
        }
    }
}

/// One point of an accuracy curve.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CurvePoint<R> {
    /// Swept design value.
    pub x: R,
    /// Batch-means estimate of the fraction of correct decisions.
    pub mean: R,
    /// 95% Student-t half-width over the run means.
    pub ci_halfwidth: R,
    /// Total realizations behind the estimate.
    pub n_effective: usize,
}

/// One grid point with both tracked responses: accuracy and consumed periods.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DetailedPoint<R> {
    /// Swept design value.
    pub x: R,
    /// Batch-means accuracy estimate.
    pub accuracy_mean: R,
    /// 95% half-width of the accuracy estimate.
    pub accuracy_ci: R,
    /// Mean periods consumed per classification (the stopping time for
    /// sequential classifiers, the fixed count otherwise).
    pub periods_mean: R,
    /// 95% half-width of the consumed-periods estimate.
    pub periods_ci: R,
    /// Total realizations behind the estimates.
    pub n_effective: usize,
}

impl<R: Real> DetailedPoint<R> {
    /// Projects onto the accuracy curve.
    pub fn accuracy_point(&self) -> CurvePoint<R> {
        CurvePoint {
            x: self.x,
            mean: self.accuracy_mean,
            ci_halfwidth: self.accuracy_ci,
            n_effective: self.n_effective,
        }
    }
}

/// One row of a paired comparison between two experiments.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ComparePoint<R> {
    /// Shared sweep value.
    pub x: R,
    /// Accuracy of the first experiment.
    pub mean_a: R,
    /// Accuracy of the second experiment.
    pub mean_b: R,
    /// `mean_a − mean_b`.
    pub difference: R,
    /// Pooled half-width `√(ci_a² + ci_b²)` for the difference.
    pub ci_halfwidth: R,
}

/// Runs the experiment and returns the accuracy curve.
///
/// Per grid point, `runs × realizations_per_run` classification problems are
/// simulated (hypothesis drawn from the priors, a fluctuating rate drawn per
/// realization, periods drawn from the resolved parameters, noise injected
/// for the noisy variants) and summarized by batch means over the runs.
///
/// # Errors
/// Configuration errors as [`ExperimentConfig::new`]; classification errors
/// are propagated (they indicate a bug, not a sampling fluke, since generated
/// data always lies in the classifiers' domain).
pub fn run_experiment<R: Real>(cfg: &ExperimentConfig<R>) -> Result<Vec<CurvePoint<R>>> {
    Ok(run_experiment_detailed(cfg)?
        .iter()
        .map(DetailedPoint::accuracy_point)
        .collect())
}

/// As [`run_experiment`], additionally reporting mean consumed periods per
/// point — the response of interest when sweeping a sequential threshold.
///
/// # Errors
/// As [`run_experiment`].
pub fn run_experiment_detailed<R: Real>(
    cfg: &ExperimentConfig<R>,
) -> Result<Vec<DetailedPoint<R>>> {
    cfg.validate()?;
    let n_effective = cfg.runs * cfg.realizations_per_run;
    cfg.sweep_grid
        .iter()
        .enumerate()
        .map(|(g, &x)| {
            let (n_periods, t_s, gamma) = cfg.point_knobs(x);
            let msprt_cfg = MsprtConfig {
                gamma_threshold: gamma,
                ..MsprtConfig::default()
            };
            let per_run: Vec<(R, R)> = (0..cfg.runs)
                .into_par_iter()
                .map(|run| {
                    let mut correct = 0usize;
                    let mut periods = 0usize;
                    for realization in 0..cfg.realizations_per_run {
                        let mut rng = seed::rng_for(
                            cfg.master_seed,
                            &[g as u64, run as u64, realization as u64],
                        );
                        let decision =
                            classify_realization(cfg, n_periods, t_s, &msprt_cfg, &mut rng)?;
                        correct += usize::from(decision.correct);
                        periods += decision.periods_used;
                    }
                    let m = R::of(cfg.realizations_per_run as f64);
                    Ok((
                        R::of(correct as f64) / m,
                        R::of(periods as f64) / m,
                    ))
                })
                .collect::<Result<_>>()?;
            let accuracy: Vec<R> = per_run.iter().map(|&(a, _)| a).collect();
            let consumed: Vec<R> = per_run.iter().map(|&(_, p)| p).collect();
            let accuracy_ci = stats::batch_means_ci(&accuracy)?;
            let periods_ci = stats::batch_means_ci(&consumed)?;
            Ok(DetailedPoint {
                x,
                accuracy_mean: accuracy_ci.mean,
                accuracy_ci: accuracy_ci.ci_halfwidth,
                periods_mean: periods_ci.mean,
                periods_ci: periods_ci.ci_halfwidth,
                n_effective,
            })
        })
        .collect()
}

/// Runs both experiments and aligns their accuracy curves row by row.
///
/// # Errors
/// Mismatch error when the sweep grids differ; otherwise as
/// [`run_experiment`].
pub fn compare<R: Real>(
    cfg_a: &ExperimentConfig<R>,
    cfg_b: &ExperimentConfig<R>,
) -> Result<Vec<ComparePoint<R>>> {
    if cfg_a.sweep_grid != cfg_b.sweep_grid {
        return Err(Error::Mismatch(format!(
            "sweep grids differ ({} vs {} points); comparisons need identical grids",
            cfg_a.sweep_grid.len(),
            cfg_b.sweep_grid.len()
        )));
    }
    let curve_a = run_experiment(cfg_a)?;
    let curve_b = run_experiment(cfg_b)?;
    Ok(curve_a
        .iter()
        .zip(&curve_b)
        .map(|(a, b)| ComparePoint {
            x: a.x,
            mean_a: a.mean,
            mean_b: b.mean,
            difference: a.mean - b.mean,
            ci_halfwidth: (a.ci_halfwidth * a.ci_halfwidth + b.ci_halfwidth * b.ci_halfwidth)
                .sqrt(),
        })
        .collect())
}

/// Outcome of one simulated classification problem.
struct RealizationOutcome {
    correct: bool,
    periods_used: usize,
}

/// Draws one period, resolving the rate per period when no pre-resolved
/// parameters are supplied (the redraw-per-period mode; a no-op draw for
/// fixed-rate hypotheses).
fn draw_period<R: Real, G: Rng + ?Sized>(
    model: &HypothesisModel<R>,
    resolved: Option<GammaParams<R>>,
    rng: &mut G,
) -> R {
    match resolved {
        Some(params) => params.sample(rng),
        None => model.resolve(rng).sample(rng),
    }
}

/// As [`draw_period`], plus the triangular sampling error `φ_a − φ_b` of a
/// grid-sampled period estimate.
fn draw_noisy_period<R: Real, G: Rng + ?Sized>(
    model: &HypothesisModel<R>,
    resolved: Option<GammaParams<R>>,
    t_s: R,
    rng: &mut G,
) -> R {
    let x = draw_period(model, resolved, rng);
    let lead: R = uniform01::<R, G>(rng) * t_s;
    let lag: R = uniform01::<R, G>(rng) * t_s;
    x + lead - lag
}

/// Simulates one classification problem: draw the truth, resolve its rate,
/// generate data in the classifier's input form, and classify.
fn classify_realization<R: Real, G: Rng + ?Sized>(
    cfg: &ExperimentConfig<R>,
    n_periods: usize,
    t_s: R,
    msprt_cfg: &MsprtConfig<R>,
    rng: &mut G,
) -> Result<RealizationOutcome> {
    let set = &cfg.scenario;
    let truth = classify::draw_hypothesis(set.priors(), rng);
    let model = set.model(truth);
    let resolved = if cfg.redraw_rate_per_period {
        None
    } else {
        Some(model.resolve(rng))
    };
    let decision: Decision<R> = match cfg.classifier {
        ClassifierKind::Mlc | ClassifierKind::EtcMlc | ClassifierKind::AlfMlc => {
            let values = (0..n_periods)
                .map(|_| draw_period(model, resolved, rng))
                .collect();
            let sample = PeriodSample::new(values, PeriodKind::On)?;
            match cfg.classifier {
                ClassifierKind::Mlc => classify::mlc(&sample, set)?,
                ClassifierKind::EtcMlc => classify::etc_mlc(&sample, set)?,
                _ => classify::alf_mlc(&sample, set)?,
            }
        }
        ClassifierKind::MlcNoisy => {
            let values = (0..n_periods)
                .map(|_| draw_noisy_period(model, resolved, t_s, rng))
                .collect();
            let sample = NoisyPeriods::new(values, t_s)?;
            classify::mlc_noisy(&sample, set)?
        }
        ClassifierKind::Msprt | ClassifierKind::EtcMsprt | ClassifierKind::AlfMsprt => {
            let stream = std::iter::from_fn(|| Some(draw_period(model, resolved, rng)));
            match cfg.classifier {
                ClassifierKind::Msprt => classify::msprt(stream, set, msprt_cfg)?,
                ClassifierKind::EtcMsprt => classify::etc_msprt(stream, set, msprt_cfg)?,
                _ => classify::alf_msprt(stream, set, msprt_cfg)?,
            }
        }
        ClassifierKind::MsprtNoisy => {
            let stream =
                std::iter::from_fn(|| Some(draw_noisy_period(model, resolved, t_s, rng)));
            classify::msprt_noisy(stream, t_s, set, msprt_cfg)?
        }
    };
    Ok(RealizationOutcome {
        correct: decision.chosen == truth + 1,
        periods_used: decision.periods_used,
    })
}

/// Renders an accuracy curve as CSV with the stable header
/// `sweep_x,mean,ci_halfwidth,n_effective`.
pub fn curve_csv<R: Real>(points: &[CurvePoint<R>]) -> String {
    use fmt::Write;
    let mut out = String::from("sweep_x,mean,ci_halfwidth,n_effective\n");
    for p in points {
        let _ = writeln!(out, "{},{},{},{}", p.x, p.mean, p.ci_halfwidth, p.n_effective);
    }
    out
}

/// Renders a paired comparison as CSV with the stable header
/// `sweep_x,mean_a,mean_b,difference,ci_halfwidth`.
pub fn compare_csv<R: Real>(points: &[ComparePoint<R>]) -> String {
    use fmt::Write;
    let mut out = String::from("sweep_x,mean_a,mean_b,difference,ci_halfwidth\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            p.x, p.mean_a, p.mean_b, p.difference, p.ci_halfwidth
        );
    }
    out
}

/// Serializes the full configuration (scenario, classifier, grid, seed, and
/// base values) as a pretty-printed JSON provenance manifest.
///
/// # Errors
/// Scenario error when serialization fails (not expected for finite values).
pub fn manifest_json<R: Real + serde::Serialize>(cfg: &ExperimentConfig<R>) -> Result<String> {
    serde_json::to_string_pretty(cfg)
        .map_err(|e| Error::Scenario(format!("could not serialize run manifest: {e}")))
}
