//! Traffic data model: gamma-distributed ON/OFF period hypotheses, period
//! generation, the grid-sampling noise model, the minimum-variance period
//! estimator, and the density of a gamma period observed through sampling.

use rand::Rng;

use crate::real::{uniform01, Real};
use crate::specfun::{ln_gamma_unchecked, reg_lower_gamma, reg_upper_gamma};
use crate::{Error, Result};

/// Parameters of a gamma period-length distribution: shape `α` and rate `β`
/// (in 1/seconds), with density `f(x) = β^α x^{α−1} e^{−βx} / Γ(α)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GammaParams<R> {
    shape: R,
    rate: R,
}

impl<R: Real> GammaParams<R> {
    /// Validates `shape > 0` and `rate > 0`.
    pub fn new(shape: R, rate: R) -> Result<Self> {
        if !(shape > R::zero() && shape.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma shape must be positive and finite, got {shape}"
            )));
        }
        if !(rate > R::zero() && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma rate must be positive and finite, got {rate}"
            )));
        }
        Ok(Self { shape, rate })
    }

    /// Shape parameter `α`.
    pub fn shape(&self) -> R {
        self.shape
    }

    /// Rate parameter `β` (1/seconds).
    pub fn rate(&self) -> R {
        self.rate
    }

    /// Distribution mean `α/β` (seconds).
    pub fn mean(&self) -> R {
        self.shape / self.rate
    }

    /// Distribution variance `α/β²` (seconds²).
    pub fn variance(&self) -> R {
        self.shape / (self.rate * self.rate)
    }

    /// Density at `x`; zero for `x ≤ 0`.
    pub fn pdf(&self, x: R) -> R {
        if x <= R::zero() {
            return R::zero();
        }
        self.ln_pdf(x).exp()
    }

    /// Log-density at `x`; `−∞` for `x ≤ 0`.
    pub fn ln_pdf(&self, x: R) -> R {
        if x <= R::zero() {
            return R::neg_infinity();
        }
        self.shape * self.rate.ln() - ln_gamma_unchecked(self.shape)
            + (self.shape - R::one()) * x.ln()
            - self.rate * x
    }

    /// Draws one gamma variate.
    ///
    /// Uses Marsaglia–Tsang rejection for `α ≥ 1`; for `α < 1` a draw with
    /// shape `α + 1` is boosted by `U^{1/α}`.
    pub fn sample<G: Rng + ?Sized>(&self, rng: &mut G) -> R {
        let alpha = self.shape;
        let boosted = alpha < R::one();
        let a = if boosted { alpha + R::one() } else { alpha };

        let d = a - R::of(1.0 / 3.0);
        let c = (R::of(9.0) * d).sqrt().recip();
        let unit = loop {
            let x: R = crate::real::std_normal(rng);
            let t = R::one() + c * x;
            if t <= R::zero() {
                continue;
            }
            let v = t * t * t;
            let u: R = uniform01(rng);
            let x2 = x * x;
            if u < R::one() - R::of(0.0331) * x2 * x2 {
                break d * v;
            }
            if u.ln() < R::of(0.5) * x2 + d * (R::one() - v + v.ln()) {
                break d * v;
            }
        };

        let unit = if boosted {
            // U ∈ (0, 1] keeps the boosted draw strictly positive.
            let u: R = R::one() - uniform01(rng);
            unit * u.powf(alpha.recip())
        } else {
            unit
        };
        // Guard against a denormal-range underflow breaking positivity.
        (unit / self.rate).max(R::min_positive_value())
    }
}

/// Uniform prior interval `U(L, U)` for a fluctuating rate parameter.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RatePrior<R> {
    low: R,
    high: R,
}

impl<R: Real> RatePrior<R> {
    /// Validates `0 < low < high`.
    pub fn new(low: R, high: R) -> Result<Self> {
        if !(low > R::zero() && low < high && high.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rate prior requires 0 < low < high, got [{low}, {high}]"
            )));
        }
        Ok(Self { low, high })
    }

    /// Lower interval endpoint `L` (1/seconds).
    pub fn low(&self) -> R {
        self.low
    }

    /// Upper interval endpoint `U` (1/seconds).
    pub fn high(&self) -> R {
        self.high
    }
}

/// Draws a rate uniformly from the prior interval.
pub fn draw_rate<R: Real, G: Rng + ?Sized>(prior: &RatePrior<R>, rng: &mut G) -> R {
    let u: R = uniform01(rng);
    prior.low + (prior.high - prior.low) * u
}

/// Rate specification of one hypothesis: a known constant or a uniform prior.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum RateSpec<R> {
    /// Rate known exactly.
    Fixed(R),
    /// Rate drawn from a uniform interval (fluctuating traffic).
    Uniform(RatePrior<R>),
}

/// One traffic hypothesis: gamma shape plus a rate specification.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct HypothesisModel<R> {
    shape: R,
    rate_spec: RateSpec<R>,
}

impl<R: Real> HypothesisModel<R> {
    /// Hypothesis with a known rate.
    pub fn fixed(shape: R, rate: R) -> Result<Self> {
        let params = GammaParams::new(shape, rate)?;
        Ok(Self {
            shape: params.shape(),
            rate_spec: RateSpec::Fixed(rate),
        })
    }

    /// Hypothesis whose rate fluctuates over a uniform interval.
    pub fn fluctuating(shape: R, prior: RatePrior<R>) -> Result<Self> {
        // Reuse the shape validation; the placeholder rate is discarded.
        GammaParams::new(shape, prior.low())?;
        Ok(Self {
            shape,
            rate_spec: RateSpec::Uniform(prior),
        })
    }

    /// Shape parameter `α`.
    pub fn shape(&self) -> R {
        self.shape
    }

    /// Rate specification.
    pub fn rate_spec(&self) -> &RateSpec<R> {
        &self.rate_spec
    }

    /// Gamma parameters when the rate is fixed, `None` when fluctuating.
    pub fn fixed_params(&self) -> Option<GammaParams<R>> {
        match self.rate_spec {
            RateSpec::Fixed(rate) => Some(GammaParams {
                shape: self.shape,
                rate,
            }),
            RateSpec::Uniform(_) => None,
        }
    }

    /// Resolves the hypothesis to concrete gamma parameters, drawing the rate
    /// from its prior when fluctuating.
    pub fn resolve<G: Rng + ?Sized>(&self, rng: &mut G) -> GammaParams<R> {
        match self.rate_spec {
            RateSpec::Fixed(rate) => GammaParams {
                shape: self.shape,
                rate,
            },
            RateSpec::Uniform(prior) => GammaParams {
                shape: self.shape,
                rate: draw_rate(&prior, rng),
            },
        }
    }
}

/// A prior-weighted, ordered set of traffic hypotheses.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HypothesisSet<R> {
    models: Vec<HypothesisModel<R>>,
    priors: Vec<R>,
}

impl<R: Real> HypothesisSet<R> {
    /// Validates a nonempty model list with strictly positive priors summing
    /// to 1 within 1e-12.
    pub fn new(models: Vec<HypothesisModel<R>>, priors: Vec<R>) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::InvalidParameter(
                "hypothesis set must contain at least one model".into(),
            ));
        }
        if models.len() != priors.len() {
            return Err(Error::InvalidParameter(format!(
                "{} models but {} priors",
                models.len(),
                priors.len()
            )));
        }
        if priors.iter().any(|p| !(*p > R::zero())) {
            return Err(Error::InvalidParameter(
                "every prior must be strictly positive".into(),
            ));
        }
        let sum: R = priors.iter().copied().sum();
        if (sum - R::one()).abs() > R::of(1e-12) {
            return Err(Error::InvalidParameter(format!(
                "priors must sum to 1 within 1e-12, got {sum}"
            )));
        }
        Ok(Self { models, priors })
    }

    /// Builds a set with equal priors `1/M`.
    pub fn with_equal_priors(models: Vec<HypothesisModel<R>>) -> Result<Self> {
        let m = models.len();
        if m == 0 {
            return Err(Error::InvalidParameter(
                "hypothesis set must contain at least one model".into(),
            ));
        }
        let p = R::of(1.0 / m as f64);
        // Assign the residual to the last prior so the sum is exactly 1.
        let mut priors = vec![p; m];
        let partial: R = priors.iter().take(m - 1).copied().sum();
        priors[m - 1] = R::one() - partial;
        Self::new(models, priors)
    }

    /// Number of hypotheses `M`.
    pub fn len(&self) -> usize {
        self.models.len()
    }

    /// True when the set is empty (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Model of hypothesis `j` (0-based).
    pub fn model(&self, j: usize) -> &HypothesisModel<R> {
        &self.models[j]
    }

    /// All models, in hypothesis order.
    pub fn models(&self) -> &[HypothesisModel<R>] {
        &self.models
    }

    /// Prior `π_j` (0-based).
    pub fn prior(&self, j: usize) -> R {
        self.priors[j]
    }

    /// All priors, in hypothesis order.
    pub fn priors(&self) -> &[R] {
        &self.priors
    }

    /// Gamma parameters of every hypothesis; errors when any rate fluctuates.
    pub fn require_fixed(&self) -> Result<Vec<GammaParams<R>>> {
        self.models
            .iter()
            .enumerate()
            .map(|(j, m)| {
                m.fixed_params().ok_or_else(|| {
                    Error::Mismatch(format!(
                        "hypothesis {} has a fluctuating rate; this operation requires fixed rates",
                        j + 1
                    ))
                })
            })
            .collect()
    }
}

/// Which half of the ON/OFF alternation a period sample represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodKind {
    /// Channel busy (`s = 1`).
    On,
    /// Channel idle (`s = 0`).
    Off,
}

/// An ordered vector of exact (noise-free) period lengths in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSample<R> {
    values: Vec<R>,
    kind: PeriodKind,
}

impl<R: Real> PeriodSample<R> {
    /// Validates that every period length is strictly positive.
    pub fn new(values: Vec<R>, kind: PeriodKind) -> Result<Self> {
        if values.iter().any(|v| !(*v > R::zero())) {
            return Err(Error::InvalidParameter(
                "period lengths must be strictly positive".into(),
            ));
        }
        Ok(Self { values, kind })
    }

    /// Period lengths in generation order.
    pub fn values(&self) -> &[R] {
        &self.values
    }

    /// Number of periods.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when no periods are present.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// ON/OFF label.
    pub fn kind(&self) -> PeriodKind {
        self.kind
    }
}

/// Period observations produced by grid sampling; values may be negative
/// (down to `−T_s`), and classifiers must consume them through the noisy PDF.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyPeriods<R> {
    values: Vec<R>,
    sampling_period: R,
}

impl<R: Real> NoisyPeriods<R> {
    /// Validates `sampling_period > 0` and every value `> −sampling_period`.
    pub fn new(values: Vec<R>, sampling_period: R) -> Result<Self> {
        if !(sampling_period > R::zero()) {
            return Err(Error::InvalidParameter(format!(
                "sampling period must be positive, got {sampling_period}"
            )));
        }
        if values.iter().any(|v| !(*v > -sampling_period)) {
            return Err(Error::InvalidParameter(
                "noisy period values must exceed -sampling_period".into(),
            ));
        }
        Ok(Self {
            values,
            sampling_period,
        })
    }

    /// Observed period values in order.
    pub fn values(&self) -> &[R] {
        &self.values
    }

    /// Number of observations.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when no observations are present.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sampling interval `T_s` (seconds).
    pub fn sampling_period(&self) -> R {
        self.sampling_period
    }
}

/// Generates `n` i.i.d. gamma periods under a fixed-rate hypothesis.
///
/// # Errors
/// [`Error::Mismatch`] when the model's rate fluctuates; resolve it first
/// (e.g. via [`HypothesisModel::resolve`]) to generate from a drawn rate.
pub fn generate_periods<R: Real, G: Rng + ?Sized>(
    model: &HypothesisModel<R>,
    n: usize,
    kind: PeriodKind,
    rng: &mut G,
) -> Result<PeriodSample<R>> {
    let params = model.fixed_params().ok_or_else(|| {
        Error::Mismatch("generate_periods requires a fixed-rate hypothesis".into())
    })?;
    let values = (0..n).map(|_| params.sample(rng)).collect();
    Ok(PeriodSample {
        values,
        kind,
    })
}

/// Adds grid-sampling noise to exact periods: `x̃ = x + φ_a − φ_b` with
/// `φ_a, φ_b` i.i.d. `U(0, T_s)`, i.e. triangular noise on `(−T_s, T_s)`.
///
/// This is the error left by the minimum-variance estimator, so classifying
/// these values models classification after period estimation.
pub fn inject_sampling_noise<R: Real, G: Rng + ?Sized>(
    x: &PeriodSample<R>,
    t_s: R,
    rng: &mut G,
) -> Result<NoisyPeriods<R>> {
    if !(t_s > R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "sampling period must be positive, got {t_s}"
        )));
    }
    let values = x
        .values()
        .iter()
        .map(|&v| {
            let a: R = uniform01::<R, _>(rng) * t_s;
            let b: R = uniform01::<R, _>(rng) * t_s;
            v + a - b
        })
        .collect();
    Ok(NoisyPeriods {
        values,
        sampling_period: t_s,
    })
}

/// Minimum-variance period estimate: the equally weighted average of the
/// outer interval `T1` (between the bracketing idle samples) and the inner
/// interval `T2` (between the first and last busy samples). The weight 1/2
/// minimizes the estimator variance and makes it unbiased.
pub fn mve_estimate<R: Real>(t1: R, t2: R) -> R {
    R::of(0.5) * (t1 + t2)
}

/// One detected ON period from a sampled binary trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePair<R> {
    /// Outer interval `ζ₄ − ζ₁` (last idle sample before the period to first
    /// idle sample after it).
    pub t1: R,
    /// Inner interval `ζ₃ − ζ₂` (first to last busy sample inside the period).
    pub t2: R,
    /// True when a bracketing sample fell outside the adjacent OFF period,
    /// i.e. the channel changed state between two samplings and the pair is
    /// distorted. Pairs are reported uncorrected.
    pub distorted: bool,
}

/// Result of sampling an alternating ON/OFF trace at a fixed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryTraceSamples<R> {
    /// `(T1, T2)` interval pairs, one per detected ON period, in trace order.
    pub pairs: Vec<TracePair<R>>,
    /// Total number of ON periods in the trace.
    pub total_on: usize,
    /// ON periods long enough (≥ `T_s`) to be detected.
    pub detected_on: usize,
}

/// Samples an alternating OFF/ON/OFF/… binary trace on a regular grid of
/// period `T_s` and extracts the `(T1, T2)` interval pair of every detected
/// ON period.
///
/// The trace starts with `off_periods[0]`, alternates with the ON periods,
/// and is followed by an unbounded idle tail; `off_periods` must therefore be
/// at least as long as `on_periods`. The grid phase is drawn uniformly on
/// `[0, T_s)`. ON periods shorter than `T_s` are dropped (mis-detected) and
/// only counted; this matches the mis-detection probability
/// `R(T_s|H_j) = Pr{T_on < T_s}`.
pub fn sample_binary_trace<R: Real, G: Rng + ?Sized>(
    on_periods: &PeriodSample<R>,
    off_periods: &PeriodSample<R>,
    t_s: R,
    rng: &mut G,
) -> Result<BinaryTraceSamples<R>> {
    if !(t_s > R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "sampling period must be positive, got {t_s}"
        )));
    }
    if off_periods.len() < on_periods.len() {
        return Err(Error::InvalidParameter(format!(
            "need at least as many OFF periods as ON periods ({} < {})",
            off_periods.len(),
            on_periods.len()
        )));
    }

    // Grid points are phase + k·T_s for integer k (k may be negative; the
    // trace conceptually extends idle in both directions).
    let phase: R = uniform01::<R, _>(rng) * t_s;
    let grid_before = |t: R| -> R {
        // Largest grid point strictly below t.
        let mut k = ((t - phase) / t_s).floor();
        if phase + k * t_s >= t {
            k -= R::one();
        }
        phase + k * t_s
    };
    let grid_at_or_after = |t: R| -> R {
        let mut k = ((t - phase) / t_s).ceil();
        if phase + k * t_s < t {
            k += R::one();
        }
        phase + k * t_s
    };

    let mut pairs = Vec::new();
    let mut detected_on = 0usize;
    let mut t = R::zero();
    for (i, &on) in on_periods.values().iter().enumerate() {
        let off_before = off_periods.values()[i];
        let start = t + off_before;
        let end = start + on;
        t = end;

        if on < t_s {
            continue; // mis-detected: no guarantee of a busy sample
        }
        detected_on += 1;

        let zeta1 = grid_before(start);
        let zeta2 = grid_at_or_after(start);
        let zeta3 = grid_before(end);
        let zeta4 = grid_at_or_after(end);
        // A state change between two samplings distorts the pair: the sample
        // before the period belongs to an earlier period than the adjacent
        // OFF, or the one after it overruns the following OFF.
        let off_after = off_periods
            .values()
            .get(i + 1)
            .copied()
            .unwrap_or(R::infinity());
        let distorted = zeta1 < start - off_before || zeta4 > end + off_after;
        pairs.push(TracePair {
            t1: zeta4 - zeta1,
            t2: zeta3 - zeta2,
            distorted,
        });
    }

    Ok(BinaryTraceSamples {
        pairs,
        total_on: on_periods.len(),
        detected_on,
    })
}

/// Density of the triangular sampling-noise distribution `Λ(−T_s, T_s)`:
/// `f(φ) = (T_s − |φ|)/T_s²` on `[−T_s, T_s]`, zero outside.
pub fn triangular_noise_pdf<R: Real>(phi: R, t_s: R) -> R {
    let a = phi.abs();
    if a >= t_s {
        return R::zero();
    }
    (t_s - a) / (t_s * t_s)
}

/// Density of a gamma period observed through grid sampling: the convolution
/// of the gamma density with triangular noise `Λ(−T_s, T_s)`, in the closed
/// four-branch form (supported on `[−T_s, ∞)`).
///
/// The closed form is a second difference, which cancels catastrophically
/// when `T_s` is small relative to the other scales. Two equivalent
/// evaluations keep the result accurate everywhere: away from the origin
/// under fine sampling (`β·T_s < 1e-4`, `x̃ > 8·T_s`) the smoothing expansion
/// `g(x̃) + T_s²/12 · g''(x̃)` applies; near the origin (`β(x̃+T_s) < 1/2`)
/// the difference is taken over lower incomplete gammas, whose O(1) parts
/// cancel in algebra rather than in floating point.
pub fn noisy_gamma_pdf<R: Real>(x_tilde: R, params: &GammaParams<R>, t_s: R) -> R {
    if !(t_s > R::zero()) {
        return R::nan();
    }
    if x_tilde < -t_s {
        return R::zero();
    }
    let alpha = params.shape();
    let beta = params.rate();

    if beta * t_s < R::of(1e-4) && x_tilde > R::of(8.0) * t_s {
        // g + T_s²/12 g'' with g''/g = ((α−1)/x − β)² − (α−1)/x²; the next
        // term is down by another factor (T_s·max(β, 1/x̃))² ≤ ~1e-5.
        let g = params.pdf(x_tilde);
        let am1 = alpha - R::one();
        let r = am1 / x_tilde - beta;
        let curs = r * r - am1 / (x_tilde * x_tilde);
        return (g * (R::one() + t_s * t_s / R::of(12.0) * curs)).max(R::zero());
    }

    let zp = beta * (x_tilde + t_s);
    let z0 = beta * x_tilde;
    let zm = beta * (x_tilde - t_s);
    let a1 = alpha + R::one();

    if zp < R::of(0.5) {
        // P(a, z) with the argument clamped at zero; clamping reproduces the
        // boundary branches of the four-piece formula exactly. With small
        // arguments the P values are tiny, so the difference carries no
        // cancellation of O(1) quantities.
        let p = |a: R, z: R| -> R {
            if z > R::zero() {
                reg_lower_gamma(a, z).expect("arguments are in-domain")
            } else {
                R::zero()
            }
        };
        let x_term = (x_tilde + t_s) * p(alpha, zp) - R::of(2.0) * x_tilde * p(alpha, z0)
            + (x_tilde - t_s) * p(alpha, zm);
        let shape_term =
            alpha / beta * (p(a1, zp) - R::of(2.0) * p(a1, z0) + p(a1, zm));
        return ((x_term - shape_term) / (t_s * t_s)).max(R::zero());
    }

    // Q(a, z) with the argument clamped at zero, as above.
    let q = |a: R, z: R| -> R {
        reg_upper_gamma(a, z.max(R::zero())).expect("arguments are in-domain")
    };
    let shape_term =
        alpha / beta * (q(a1, zp) - R::of(2.0) * q(a1, z0) + q(a1, zm));
    let x_term = -(x_tilde + t_s) * q(alpha, zp) + R::of(2.0) * x_tilde * q(alpha, z0)
        - (x_tilde - t_s) * q(alpha, zm);
    ((shape_term + x_term) / (t_s * t_s)).max(R::zero())
}
