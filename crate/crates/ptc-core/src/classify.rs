//! Classifier variants over period observations: fixed-sample-size maximum
//! likelihood (MLC) and sequential posterior-threshold (MSPRT) decisions,
//! each available with exact likelihoods, sampled-period (noisy) likelihoods,
//! on-the-fly rate estimation (ETC), and rate-averaged likelihoods (ALF).
//!
//! All likelihood accumulation happens in log domain; posteriors are formed
//! by max-shifted exponentiation, so scores stay finite for any realistic
//! number of periods (tested to 10⁴).

use rand::Rng;

use crate::distances::alf_pdf_unchecked;
use crate::real::Real;
use crate::seed;
use crate::specfun::ln_gamma_unchecked;
use crate::traffic::{
    noisy_gamma_pdf, GammaParams, HypothesisSet, NoisyPeriods, PeriodSample, RatePrior, RateSpec,
};
use crate::{Error, Result};
use rayon::prelude::*;

/// Log-density floor standing in for `ln 0`; one unsupported observation
/// must not poison score arithmetic with infinities.
const LN_FLOOR: f64 = -745.0;

/// Outcome of a classification: the chosen hypothesis and the evidence state
/// at the moment of decision.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Decision<R> {
    /// 1-based index of the selected hypothesis.
    pub chosen: usize,
    /// Periods consumed: `n` for fixed-sample classifiers, the stopping time
    /// for sequential ones.
    pub periods_used: usize,
    /// Per-hypothesis evidence at decision time: final log-likelihoods for
    /// fixed-sample classifiers, posterior probabilities (summing to 1) for
    /// sequential ones.
    pub scores: Vec<R>,
    /// Sequential classifiers only: whether the posterior threshold was
    /// crossed (`false` means the period cap forced the decision).
    pub stopped: Option<bool>,
}

/// Configuration of the sequential classifiers: stop as soon as some
/// posterior exceeds `1/(1 + gamma_threshold)`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MsprtConfig<R> {
    /// Threshold parameter γ ≥ 0; smaller values demand more posterior mass
    /// before stopping (γ = 0 can never stop and always runs to the cap).
    pub gamma_threshold: R,
    /// Hard cap on consumed periods; reaching it forces a decision with
    /// `stopped = false`.
    pub max_periods: usize,
    /// Relative step of the threshold sweep: successive γ values shrink by
    /// the factor `1/(1 + sweep_step)`.
    pub sweep_step: R,
}

impl<R: Real> MsprtConfig<R> {
    /// Configuration with the given threshold and default cap/sweep step.
    ///
    /// # Errors
    /// Invalid-parameter error for γ < 0 or a non-finite value.
    pub fn new(gamma_threshold: R) -> Result<Self> {
        if !(gamma_threshold >= R::zero()) || !gamma_threshold.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma threshold must be finite and nonnegative, got {gamma_threshold}"
            )));
        }
        Ok(Self { gamma_threshold, ..Self::default() })
    }
}

impl<R: Real> Default for MsprtConfig<R> {
    fn default() -> Self {
        Self {
            gamma_threshold: R::of(0.1),
            max_periods: 10_000,
            sweep_step: R::of(0.25),
        }
    }
}

/// Operating point found by [`sweep_gamma`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SweepOutcome<R> {
    /// The first (largest) threshold parameter meeting the target accuracy.
    pub gamma: R,
    /// Monte Carlo accuracy estimate at that γ.
    pub achieved_pc: R,
    /// Mean number of periods consumed per classification at that γ.
    pub mean_stopping_time: R,
}

/// Posterior probabilities from unnormalized log scores via max-shifted
/// exponentiation.
pub fn posteriors_from_scores<R: Real>(scores: &[R]) -> Vec<R> {
    let shift = scores.iter().cloned().fold(R::neg_infinity(), R::max);
    if !shift.is_finite() {
        // All hypotheses at the floor: fall back to a uniform posterior.
        return vec![R::of(1.0 / scores.len() as f64); scores.len()];
    }
    let exps: Vec<R> = scores.iter().map(|&s| (s - shift).exp()).collect();
    let total: R = exps.iter().cloned().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Index of the largest score, ties broken toward the lowest index.
fn argmax<R: Real>(scores: &[R]) -> usize {
    let mut best = 0;
    for (j, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = j;
        }
    }
    best
}

/// Natural log clamped to the [`LN_FLOOR`] band, mapping zero densities to a
/// large-but-finite penalty.
fn ln_clamped<R: Real>(density: R) -> R {
    if density > R::zero() {
        density.ln().max(R::of(LN_FLOOR))
    } else {
        R::of(LN_FLOOR)
    }
}

/// Fixed-sample decision from prior log-weights and a per-hypothesis,
/// per-observation log-density.
fn fixed_sample_decision<R: Real>(
    values: &[R],
    set: &HypothesisSet<R>,
    log_density: impl Fn(usize, R) -> R,
) -> Result<Decision<R>> {
    if values.is_empty() {
        return Err(Error::InvalidParameter(
            "classification requires at least one period".into(),
        ));
    }
    let mut scores: Vec<R> = set.priors().iter().map(|&p| p.ln()).collect();
    for &x in values {
        for (j, score) in scores.iter_mut().enumerate() {
            *score += log_density(j, x);
        }
    }
    Ok(Decision {
        chosen: argmax(&scores) + 1,
        periods_used: values.len(),
        scores,
        stopped: None,
    })
}

/// Sequential decision loop shared by every MSPRT variant whose evidence is
/// additive per observation. `validate` rejects out-of-support stream values.
fn sequential_decision<R: Real>(
    stream: impl IntoIterator<Item = R>,
    set: &HypothesisSet<R>,
    cfg: &MsprtConfig<R>,
    validate: impl Fn(R) -> Result<()>,
    log_density: impl Fn(usize, R) -> R,
) -> Result<Decision<R>> {
    if cfg.max_periods == 0 {
        return Err(Error::InvalidParameter(
            "sequential classification requires max_periods >= 1".into(),
        ));
    }
    let threshold = R::one() / (R::one() + cfg.gamma_threshold);
    let mut scores: Vec<R> = set.priors().iter().map(|&p| p.ln()).collect();
    let mut used = 0usize;
    for x in stream {
        validate(x)?;
        used += 1;
        for (j, score) in scores.iter_mut().enumerate() {
            *score += log_density(j, x);
        }
        let posterior = posteriors_from_scores(&scores);
        let best = argmax(&posterior);
        if posterior[best] > threshold {
            return Ok(Decision {
                chosen: best + 1,
                periods_used: used,
                scores: posterior,
                stopped: Some(true),
            });
        }
        if used >= cfg.max_periods {
            return Ok(Decision {
                chosen: best + 1,
                periods_used: used,
                scores: posterior,
                stopped: Some(false),
            });
        }
    }
    Err(Error::StreamExhausted { yielded: used })
}

/// Per-sample gamma log-densities for a fixed-rate hypothesis set, with the
/// period-count-independent prior folded in by the caller.
fn gamma_log_density<R: Real>(params: &[GammaParams<R>]) -> impl Fn(usize, R) -> R + '_ {
    move |j, x| params[j].ln_pdf(x).max(R::of(LN_FLOOR))
}

/// Maximum-likelihood classification of a fixed batch of periods.
///
/// Chooses the hypothesis maximizing
/// `log π_j + n(α_j log β_j − log Γ(α_j)) + Σ[(α_j−1) log x_i − β_j x_i]`.
///
/// # Errors
/// Mismatch error when any hypothesis has a fluctuating rate;
/// invalid-parameter error on an empty sample.
pub fn mlc<R: Real>(x: &PeriodSample<R>, set: &HypothesisSet<R>) -> Result<Decision<R>> {
    let params = set.require_fixed()?;
    fixed_sample_decision(x.values(), set, gamma_log_density(&params))
}

/// Sequential classification: consume periods one at a time and stop at the
/// first `n ≥ 1` where some posterior `p_n^j` exceeds `1/(1+γ)`.
///
/// Reaching `cfg.max_periods` forces the current maximum-posterior decision
/// with `stopped = Some(false)` (the γ = 0 threshold is unreachable for a
/// proper posterior, so the cap guarantees termination).
///
/// # Errors
/// Mismatch error for fluctuating-rate hypotheses; invalid-parameter error
/// for nonpositive stream values; stream-exhausted error if the source dries
/// up before a decision and before the cap.
pub fn msprt<R: Real>(
    stream: impl IntoIterator<Item = R>,
    set: &HypothesisSet<R>,
    cfg: &MsprtConfig<R>,
) -> Result<Decision<R>> {
    let params = set.require_fixed()?;
    sequential_decision(
        stream,
        set,
        cfg,
        |x| {
            if x > R::zero() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "period stream values must be positive, got {x}"
                )))
            }
        },
        gamma_log_density(&params),
    )
}

/// Sweeps the sequential threshold γ downward until Monte Carlo accuracy on
/// the given hypothesis set reaches `target_pc`, and reports the operating
/// point.
///
/// The sweep starts at γ = 1 and shrinks by `1/(1 + cfg.sweep_step)` per
/// step; every γ is evaluated on the same `trials` simulated classification
/// problems (hypothesis drawn from the priors, periods drawn from the true
/// hypothesis), so accuracy is monotone along the sweep path.
///
/// # Errors
/// Sweep-exhausted error when γ reaches its floor (1e-6) without meeting the
/// target; mismatch/invalid-parameter errors as in [`msprt`].
pub fn sweep_gamma<R: Real>(
    set: &HypothesisSet<R>,
    target_pc: R,
    cfg: &MsprtConfig<R>,
    trials: usize,
    master_seed: u64,
) -> Result<SweepOutcome<R>> {
    if !(target_pc > R::zero() && target_pc < R::one()) {
        return Err(Error::InvalidParameter(format!(
            "target accuracy must lie in (0, 1), got {target_pc}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("sweep requires at least one trial".into()));
    }
    set.require_fixed()?;
    const GAMMA_FLOOR: f64 = 1e-6;
    let shrink = R::one() / (R::one() + cfg.sweep_step);
    let mut gamma = R::one();
    loop {
        let (correct, periods) = simulate_msprt_accuracy(set, gamma, cfg, trials, master_seed)?;
        let achieved = R::of(correct as f64 / trials as f64);
        if achieved >= target_pc {
            return Ok(SweepOutcome {
                gamma,
                achieved_pc: achieved,
                mean_stopping_time: R::of(periods as f64 / trials as f64),
            });
        }
        gamma = gamma * shrink;
        if gamma.as_f64() < GAMMA_FLOOR {
            return Err(Error::SweepExhausted { target: target_pc.as_f64() });
        }
    }
}

/// Counts correct decisions and total consumed periods of `msprt` at one γ
/// over seeded trials; trial seeds do not depend on γ, giving common random
/// numbers across the sweep.
fn simulate_msprt_accuracy<R: Real>(
    set: &HypothesisSet<R>,
    gamma: R,
    cfg: &MsprtConfig<R>,
    trials: usize,
    master_seed: u64,
) -> Result<(usize, usize)> {
    let point_cfg = MsprtConfig { gamma_threshold: gamma, ..cfg.clone() };
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = seed::rng_for(master_seed, &[trial as u64]);
            let truth = draw_hypothesis(set.priors(), &mut rng);
            let params = set.model(truth).fixed_params().expect("checked fixed above");
            let stream = std::iter::from_fn(|| Some(params.sample(&mut rng)));
            let decision = msprt(stream, set, &point_cfg)?;
            Ok((
                usize::from(decision.chosen == truth + 1),
                decision.periods_used,
            ))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))
}

/// Draws a 0-based hypothesis index from prior weights.
pub(crate) fn draw_hypothesis<R: Real, G: Rng + ?Sized>(priors: &[R], rng: &mut G) -> usize {
    let u = crate::real::uniform01::<R, G>(rng);
    let mut acc = R::zero();
    for (j, &p) in priors.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    priors.len() - 1
}

/// Maximum-likelihood classification of sampled periods: the gamma density is
/// replaced by the sampling-noise-convolved density of
/// [`noisy_gamma_pdf`](crate::traffic::noisy_gamma_pdf).
///
/// # Errors
/// As [`mlc`]; values at or below `−T_s` are rejected by the
/// [`NoisyPeriods`] constructor.
pub fn mlc_noisy<R: Real>(x: &NoisyPeriods<R>, set: &HypothesisSet<R>) -> Result<Decision<R>> {
    let params = set.require_fixed()?;
    let t_s = x.sampling_period();
    fixed_sample_decision(x.values(), set, |j, v| {
        ln_clamped(noisy_gamma_pdf(v, &params[j], t_s))
    })
}

/// Sequential classification over sampled periods with the noise-convolved
/// density as likelihood.
///
/// # Errors
/// As [`msprt`]; domain error for stream values at or below `−T_s` (outside
/// the noisy-density support).
pub fn msprt_noisy<R: Real>(
    stream: impl IntoIterator<Item = R>,
    t_s: R,
    set: &HypothesisSet<R>,
    cfg: &MsprtConfig<R>,
) -> Result<Decision<R>> {
    if !(t_s > R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "sampling period must be positive, got {t_s}"
        )));
    }
    let params = set.require_fixed()?;
    sequential_decision(
        stream,
        set,
        cfg,
        |v| {
            if v > -t_s {
                Ok(())
            } else {
                Err(Error::Domain(format!(
                    "noisy period {v} lies outside the support (> {})",
                    -t_s
                )))
            }
        },
        |j, v| ln_clamped(noisy_gamma_pdf(v, &params[j], t_s)),
    )
}

/// Maximum-likelihood estimate of a gamma rate with known shape:
/// `β̂ = α n / Σ x_i`.
///
/// # Errors
/// Invalid-parameter error on an empty sample or nonpositive shape.
pub fn mle_rate<R: Real>(x: &PeriodSample<R>, shape: R) -> Result<R> {
    if x.values().is_empty() {
        return Err(Error::InvalidParameter(
            "rate estimation requires at least one period".into(),
        ));
    }
    if !(shape > R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "shape must be positive, got {shape}"
        )));
    }
    let n = R::of(x.values().len() as f64);
    let total: R = x.values().iter().cloned().sum();
    Ok(shape * n / total)
}

/// Per-hypothesis log-likelihoods of the estimate-then-classify scheme from
/// sufficient statistics `(n, Σx, Σlog x)`: each rate is replaced by its ML
/// estimate `β̂_j = α_j n / Σx`, which makes `β̂_j Σx = α_j n` exact.
fn etc_scores<R: Real>(set: &HypothesisSet<R>, n: usize, sum_x: R, sum_ln_x: R) -> Vec<R> {
    let n_r = R::of(n as f64);
    set.models()
        .iter()
        .zip(set.priors())
        .map(|(model, &prior)| {
            let a = model.shape();
            let rate_hat = a * n_r / sum_x;
            prior.ln() + n_r * (a * rate_hat.ln() - ln_gamma_unchecked(a)) + (a - R::one()) * sum_ln_x
                - a * n_r
        })
        .collect()
}

/// Estimate-then-classify MLC: every hypothesis rate is ML-estimated from the
/// sample itself (shapes assumed known), then the usual maximum-likelihood
/// decision is taken. Rate specifications in the set are ignored.
///
/// # Errors
/// Invalid-parameter error on an empty sample.
pub fn etc_mlc<R: Real>(x: &PeriodSample<R>, set: &HypothesisSet<R>) -> Result<Decision<R>> {
    let values = x.values();
    if values.is_empty() {
        return Err(Error::InvalidParameter(
            "classification requires at least one period".into(),
        ));
    }
    let sum_x: R = values.iter().cloned().sum();
    let sum_ln_x: R = values.iter().map(|&v| v.ln()).sum();
    let scores = etc_scores(set, values.len(), sum_x, sum_ln_x);
    Ok(Decision {
        chosen: argmax(&scores) + 1,
        periods_used: values.len(),
        scores,
        stopped: None,
    })
}

/// Estimate-then-classify MSPRT: after each new period all rate estimates and
/// estimated posteriors are recomputed from scratch (estimation is not
/// additive), stopping at the usual posterior threshold.
///
/// # Errors
/// As [`msprt`].
pub fn etc_msprt<R: Real>(
    stream: impl IntoIterator<Item = R>,
    set: &HypothesisSet<R>,
    cfg: &MsprtConfig<R>,
) -> Result<Decision<R>> {
    if cfg.max_periods == 0 {
        return Err(Error::InvalidParameter(
            "sequential classification requires max_periods >= 1".into(),
        ));
    }
    let threshold = R::one() / (R::one() + cfg.gamma_threshold);
    let mut n = 0usize;
    let mut sum_x = R::zero();
    let mut sum_ln_x = R::zero();
    for x in stream {
        if !(x > R::zero()) {
            return Err(Error::InvalidParameter(format!(
                "period stream values must be positive, got {x}"
            )));
        }
        n += 1;
        sum_x += x;
        sum_ln_x += x.ln();
        let posterior = posteriors_from_scores(&etc_scores(set, n, sum_x, sum_ln_x));
        let best = argmax(&posterior);
        if posterior[best] > threshold {
            return Ok(Decision {
                chosen: best + 1,
                periods_used: n,
                scores: posterior,
                stopped: Some(true),
            });
        }
        if n >= cfg.max_periods {
            return Ok(Decision {
                chosen: best + 1,
                periods_used: n,
                scores: posterior,
                stopped: Some(false),
            });
        }
    }
    Err(Error::StreamExhausted { yielded: n })
}

/// Shape / rate-prior pairs of a fully fluctuating set, or a mismatch error.
fn require_priors<R: Real>(set: &HypothesisSet<R>) -> Result<Vec<(R, RatePrior<R>)>> {
    set.models()
        .iter()
        .enumerate()
        .map(|(j, model)| match model.rate_spec() {
            RateSpec::Uniform(prior) => Ok((model.shape(), *prior)),
            RateSpec::Fixed(_) => Err(Error::Mismatch(format!(
                "hypothesis {} has a fixed rate; the averaged-likelihood classifier needs a rate prior",
                j + 1
            ))),
        })
        .collect()
}

/// Averaged-likelihood MLC for hypotheses with uniform rate priors: the
/// per-sample likelihood is the rate-averaged density of
/// [`alf_pdf`](crate::distances::alf_pdf).
///
/// # Errors
/// Mismatch error when any hypothesis has a fixed rate; invalid-parameter
/// error on an empty sample.
pub fn alf_mlc<R: Real>(x: &PeriodSample<R>, set: &HypothesisSet<R>) -> Result<Decision<R>> {
    let hyps = require_priors(set)?;
    fixed_sample_decision(x.values(), set, |j, v| {
        let (shape, ref prior) = hyps[j];
        ln_clamped(alf_pdf_unchecked(v, shape, prior))
    })
}

/// Averaged-likelihood MSPRT: sequential decisions with the rate-averaged
/// density as per-sample likelihood.
///
/// # Errors
/// As [`alf_mlc`] plus the stream errors of [`msprt`].
pub fn alf_msprt<R: Real>(
    stream: impl IntoIterator<Item = R>,
    set: &HypothesisSet<R>,
    cfg: &MsprtConfig<R>,
) -> Result<Decision<R>> {
    let hyps = require_priors(set)?;
    sequential_decision(
        stream,
        set,
        cfg,
        |x| {
            if x > R::zero() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "period stream values must be positive, got {x}"
                )))
            }
        },
        |j, v| {
            let (shape, ref prior) = hyps[j];
            ln_clamped(alf_pdf_unchecked(v, shape, prior))
        },
    )
}
