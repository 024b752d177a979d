//! Closed-form and semi-analytical performance results: the distribution and
//! moments of pairwise log-likelihood-ratio terms, Gaussian-approximation
//! classification accuracy (clean, under sampling noise, and under rate
//! estimation), expected sample and period counts, and a solver for the
//! sensing design guideline (pick the sampling interval under a time or
//! sample budget).

use rayon::prelude::*;

use crate::classify;
use crate::quad::{integrate, integrate_power_sub, integrate_to_inf};
use crate::real::{uniform01, Real};
use crate::seed;
use crate::specfun::{
    digamma, exp_arg_limit, gamma_cdf, lambert_w, lambert_w_ln, ln_gamma_unchecked, q_function,
    reg_upper_gamma, BranchIndex,
};
use crate::traffic::{noisy_gamma_pdf, GammaParams, HypothesisSet, NoisyPeriods};
use crate::{Error, Result};

/// How the moments of a log-likelihood-ratio term were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum MomentMethod {
    /// Numerical integration of `y·f(y)` and `y²·f(y)` over the term's
    /// domain (exact linear special cases are evaluated in closed form).
    Quadrature,
    /// Sample statistics over at least 10⁶ simulated draws.
    MonteCarlo,
}

/// Mean and variance of one pairwise log-likelihood-ratio term
/// `y^{(j,k)} = (α_j−α_k) log x − (β_j−β_k) x` with `x` drawn from
/// hypothesis `j`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LlrTermMoments<R> {
    /// `μ_{j,k}`.
    pub mean: R,
    /// `σ²_{j,k}`; strictly positive for distinct hypotheses.
    pub variance: R,
    /// Provenance of the values.
    pub method: MomentMethod,
}

/// Fixed draw count of the Monte Carlo moment estimator.
const MOMENT_MC_DRAWS: usize = 1_000_000;
/// Seed of the (deterministic) Monte Carlo moment estimator.
const MOMENT_MC_SEED: u64 = 0x6c6c_725f_6d63;
/// Absolute tolerance requested from each moment quadrature piece.
const MOMENT_TOL: f64 = 5e-11;
/// Absolute tolerance of the noisy-moment pieces: the integrands steepen on
/// the scale of `T_s`, so they are integrated to a looser (still far more
/// than sufficient) target than the clean moments.
const NOISY_TOL: f64 = 1e-8;

/// Support of a `y = a log x − b x` transform of a positive variable.
enum YDomain<R> {
    /// The whole real line.
    All,
    /// `(−∞, edge]`, with an integrable `1/√` singularity at the edge.
    UpTo(R),
    /// `[edge, ∞)`, with an integrable `1/√` singularity at the edge.
    From(R),
}

/// The random variable `y = a log x − b x` for `x ~ gamma(base)`: density
/// via Lambert-W inversion of the transform, moments by quadrature or
/// simulation. At least one of `a`, `b` must be nonzero.
pub(crate) struct LinearLogTerm<R> {
    a: R,
    b: R,
    base: GammaParams<R>,
}

impl<R: Real> LinearLogTerm<R> {
    pub(crate) fn new(a: R, b: R, base: GammaParams<R>) -> Self {
        debug_assert!(
            a != R::zero() || b != R::zero(),
            "degenerate transform must be rejected by the caller"
        );
        Self { a, b, base }
    }

    /// Branch-point ordinate `η = a log(a/b) − a` of the same-sign case: the
    /// transform `a log x − b x` attains this extremum at `x = a/b`.
    fn eta(&self) -> R {
        self.a * ((self.a / self.b).ln() - R::one())
    }

    fn domain(&self) -> YDomain<R> {
        let (a, b) = (self.a, self.b);
        if a == R::zero() {
            // y = −b x with x > 0.
            return if b > R::zero() {
                YDomain::UpTo(R::zero())
            } else {
                YDomain::From(R::zero())
            };
        }
        if b == R::zero() || a * b < R::zero() {
            // y = a log x alone is unbounded both ways; with opposite signs
            // the two pieces pull y across the whole line as well.
            return YDomain::All;
        }
        if a > R::zero() {
            YDomain::UpTo(self.eta())
        } else {
            YDomain::From(self.eta())
        }
    }

    /// Density of `y`. Zero outside the domain; the value grows without
    /// bound approaching a same-sign branch point (integrable singularity).
    pub(crate) fn pdf(&self, y: R) -> R {
        let (a, b) = (self.a, self.b);
        if a == R::zero() {
            let x = -y / b;
            return if x > R::zero() {
                self.base.pdf(x) / b.abs()
            } else {
                R::zero()
            };
        }
        if b == R::zero() {
            let x = (y / a).exp();
            // Deep-tail over/underflow of the inverse map: the true density
            // (∝ x^α e^{−βx}) has vanished there.
            if x == R::zero() || !x.is_finite() {
                return R::zero();
            }
            let g = self.base.pdf(x);
            return if g.is_finite() { g * x / a.abs() } else { R::zero() };
        }
        // The Lambert argument s = (−b/a) e^{y/a} under- or overflows once
        // |y/a| passes the exponent range, yet the linear-arm preimage
        // x ≈ y/|b| can still sit in the body of the base density (nearly
        // equal shapes make |a|, and with it the over/underflow onset, tiny).
        // Extreme arguments therefore go through the log-space evaluation.
        let ratio = -b / a;
        let arg = y / a;
        let ln_s = ratio.abs().ln() + arg;
        let limit = exp_arg_limit::<R>();
        let extreme = arg.abs() > limit || ln_s.abs() > limit;
        if ratio > R::zero() {
            // Opposite signs: a single solution on the principal branch.
            if ln_s < -limit {
                // Only the x → 0 preimage exists and the density ∝ x^α has
                // genuinely vanished there.
                return R::zero();
            }
            let w = if extreme {
                lambert_w_ln(BranchIndex::Principal, ln_s)
            } else {
                lambert_w(BranchIndex::Principal, ratio * arg.exp())
            }
            .expect("positive argument in-domain");
            return self.preimage_term(w);
        }
        // Same signs: y beyond the branch point has no preimage.
        match self.domain() {
            YDomain::UpTo(edge) if y > edge => return R::zero(),
            YDomain::From(edge) if y < edge => return R::zero(),
            _ => {}
        }
        if extreme {
            // The principal-branch preimage x = e^{y/a}(1 + o(1)) has left
            // the representable range (vanished density); the lower-branch
            // root keeps tracking x ≈ y/|b| and keeps its contribution.
            let w = lambert_w_ln(BranchIndex::Lower, ln_s)
                .expect("in-domain y implies ln|s| <= -1");
            return self.preimage_term(w);
        }
        let s = ratio * arg.exp();
        match (
            lambert_w(BranchIndex::Principal, s),
            lambert_w(BranchIndex::Lower, s),
        ) {
            (Ok(w0), Ok(wm1)) => self.preimage_term(w0) + self.preimage_term(wm1),
            // Inside the domain but within rounding of the branch point:
            // both solutions collapse onto W = −1 where the density blows up.
            _ => R::infinity(),
        }
    }

    /// Density contribution of the preimage `x = −(a/b)W`. Factors that
    /// over- or underflow in the far tails (where the true product vanishes)
    /// resolve to zero instead of NaN.
    fn preimage_term(&self, w: R) -> R {
        let x = -(self.a / self.b) * w;
        if !(x > R::zero()) || !x.is_finite() {
            return R::zero();
        }
        let g = self.base.pdf(x);
        if g == R::zero() || !g.is_finite() {
            return R::zero();
        }
        branch_weight(w, self.b) * g
    }

    /// Closed-form mean `a(ψ(α) − log β) − b α/β`.
    fn closed_mean(&self) -> R {
        let alpha = self.base.shape();
        let beta = self.base.rate();
        self.a * (digamma(alpha).expect("shape is positive") - beta.ln())
            - self.b * alpha / beta
    }

    /// Mean and variance by integrating `y^p f(y)` over the domain.
    pub(crate) fn moments_quadrature(&self) -> Result<(R, R)> {
        let scale = llr_magnitude_scale(self.a, self.b, &self.base);
        if self.a == R::zero() {
            // y = −b x: plain linear transform of the gamma moments.
            let alpha = self.base.shape();
            let beta = self.base.rate();
            let mean = -self.b * alpha / beta;
            let var = self.b * self.b * alpha / (beta * beta);
            return Ok((mean, var));
        }
        // Achievable absolute accuracy on a fixed panel budget degrades with
        // the integration extent (~ the magnitude scale) and with integrand
        // stiffness: the density turns over a y-window of width ~|a| around
        // the branch point, so nearly equal shapes squeeze all structure into
        // a needle the adaptive panels must resolve.  (a == 0 never reaches
        // quadrature — it returns through the closed form above.)
        let difficulty = (scale * R::one().max(R::one() / self.a.abs())).as_f64();
        let raw = |p: u32| -> Result<R> {
            // The p-th raw moment grows like scale^p; widening the tolerance
            // accordingly keeps the relative demand fixed however wide the
            // hypothesis pair is.
            let tol = MOMENT_TOL * difficulty * scale.as_f64().powi(p as i32);
            let f = |y: R| {
                let mut v = self.pdf(y);
                for _ in 0..p {
                    v = v * y;
                }
                v
            };
            match self.domain() {
                YDomain::All => {
                    // Split at the closed-form mean and map both half-lines.
                    let c = self.closed_mean();
                    let up = integrate_to_inf(|t: R| f(c + t), R::zero(), tol)?;
                    let down = integrate_to_inf(|t: R| f(c - t), R::zero(), tol)?;
                    Ok(up.value + down.value)
                }
                YDomain::UpTo(edge) => {
                    // y = edge − t² absorbs the 1/√ branch-point singularity.
                    let g = |t: R| R::of(2.0) * t * f(edge - t * t);
                    Ok(integrate_to_inf(g, R::zero(), tol)?.value)
                }
                YDomain::From(edge) => {
                    let g = |t: R| R::of(2.0) * t * f(edge + t * t);
                    Ok(integrate_to_inf(g, R::zero(), tol)?.value)
                }
            }
        };
        let mass = raw(0)?;
        let mean = raw(1)? / mass;
        let variance = raw(2)? / mass - mean * mean;
        if !(variance > R::zero()) {
            return Err(Error::NonConvergence(format!(
                "log-likelihood-ratio term variance came out nonpositive ({variance})"
            )));
        }
        Ok((mean, variance))
    }

    /// Mean and variance from sample statistics of simulated draws.
    pub(crate) fn moments_monte_carlo(&self, draws: usize, master_seed: u64) -> (R, R) {
        let mut rng = seed::rng_for(master_seed, &[]);
        let mut mean = R::zero();
        let mut m2 = R::zero();
        for i in 0..draws {
            let x = self.base.sample(&mut rng);
            let y = self.a * x.ln() - self.b * x;
            let delta = y - mean;
            mean += delta / R::of((i + 1) as f64);
            m2 += delta * (y - mean);
        }
        (mean, m2 / R::of((draws - 1) as f64))
    }
}

/// Natural magnitude of `y = a log x − b x` under the base hypothesis: the
/// component magnitudes of its mean, `|a|(|ψ(α)| + |log β|) + |b| α/β`, plus
/// an extra `|b| √α/β` so the standard deviation is covered as well.
/// Quadrature tolerances for the p-th raw moment are scaled by the p-th
/// power of this, turning the absolute tolerance into a fixed relative
/// demand however wide the hypothesis pair is.
fn llr_magnitude_scale<R: Real>(a: R, b: R, base: &GammaParams<R>) -> R {
    let alpha = base.shape();
    let beta = base.rate();
    let psi = digamma(alpha).expect("shape is positive");
    R::one()
        + a.abs() * (psi.abs() + beta.ln().abs())
        + b.abs() * (alpha + alpha.sqrt()) / beta
}

/// `|W/(b(1+W))|`, the inverse-transform Jacobian of one Lambert-W branch.
fn branch_weight<R: Real>(w: R, b: R) -> R {
    let denom = b * (R::one() + w);
    if denom == R::zero() {
        return R::infinity();
    }
    (w / denom).abs()
}

/// Density of the pairwise log-likelihood-ratio term
/// `y^{(j,k)} = (α_j−α_k) log x − (β_j−β_k) x` under hypothesis `j`.
///
/// Outside the support (beyond the branch point of the same-sign case) the
/// density is zero; at the branch point itself it has an integrable `1/√`
/// singularity.
///
/// # Errors
/// Degenerate-pair error when both parameter differences vanish.
pub fn llr_term_pdf<R: Real>(y: R, j: &GammaParams<R>, k: &GammaParams<R>) -> Result<R> {
    let term = llr_term(j, k)?;
    Ok(term.pdf(y))
}

/// Mean and variance of the pairwise log-likelihood-ratio term, by numerical
/// integration over its domain or by ≥10⁶ simulated draws.
///
/// # Errors
/// Degenerate-pair error for identical parameters; quadrature failures are
/// propagated.
pub fn llr_term_moments<R: Real>(
    j: &GammaParams<R>,
    k: &GammaParams<R>,
    method: MomentMethod,
) -> Result<LlrTermMoments<R>> {
    let term = llr_term(j, k)?;
    let (mean, variance) = match method {
        MomentMethod::Quadrature => term.moments_quadrature()?,
        MomentMethod::MonteCarlo => term.moments_monte_carlo(MOMENT_MC_DRAWS, MOMENT_MC_SEED),
    };
    Ok(LlrTermMoments { mean, variance, method })
}

/// Builds the transform for an ordered hypothesis pair, rejecting identical
/// parameters (positional indices 1 and 2 in the error).
fn llr_term<R: Real>(j: &GammaParams<R>, k: &GammaParams<R>) -> Result<LinearLogTerm<R>> {
    let a = j.shape() - k.shape();
    let b = j.rate() - k.rate();
    if a == R::zero() && b == R::zero() {
        return Err(Error::DegeneratePair {
            j: 1,
            k: 2,
            reason: "identical gamma parameters leave no likelihood ratio to analyze".into(),
        });
    }
    Ok(LinearLogTerm::new(a, b, *j))
}

/// One ordered hypothesis pair inside a classification-accuracy curve:
/// `τ(n) = −(log prior ratio + n·slope) / (√n · sd)`.
struct PairTerm<R> {
    ln_prior_ratio: R,
    slope: R,
    sd: R,
}

/// Gaussian-approximation accuracy curve: `P_c(n) = Σ_j π_j Π_{k≠j} Q(τ_{j,k}(n))`.
struct PcCurve<R> {
    priors: Vec<R>,
    terms: Vec<Vec<PairTerm<R>>>,
}

impl<R: Real> PcCurve<R> {
    fn pc(&self, n: R) -> R {
        let sqrt_n = n.sqrt();
        let mut total = R::zero();
        for (j, row) in self.terms.iter().enumerate() {
            let mut product = R::one();
            for term in row {
                let tau = -(term.ln_prior_ratio + n * term.slope) / (sqrt_n * term.sd);
                product = product * q_function(tau);
            }
            total += self.priors[j] * product;
        }
        total
    }
}

/// Assembles a [`PcCurve`] from per-ordered-pair `(drift, mean, variance)`.
fn build_curve<R: Real>(
    set: &HypothesisSet<R>,
    params: &[GammaParams<R>],
    pair_stats: impl Fn(usize, usize) -> Result<(R, R, R)>,
) -> Result<PcCurve<R>> {
    let m = params.len();
    let priors = set.priors().to_vec();
    let mut terms = Vec::with_capacity(m);
    for j in 0..m {
        let mut row = Vec::with_capacity(m - 1);
        for k in 0..m {
            if k == j {
                continue;
            }
            let (drift, mean, variance) = pair_stats(j, k)?;
            row.push(PairTerm {
                ln_prior_ratio: (priors[j] / priors[k]).ln(),
                slope: drift + mean,
                sd: variance.sqrt(),
            });
        }
        terms.push(row);
    }
    Ok(PcCurve { priors, terms })
}

/// Rejects a hypothesis pair whose parameters coincide.
fn reject_identical<R: Real>(
    j: usize,
    k: usize,
    pj: &GammaParams<R>,
    pk: &GammaParams<R>,
) -> Result<()> {
    if pj.shape() == pk.shape() && pj.rate() == pk.rate() {
        return Err(Error::DegeneratePair {
            j: j + 1,
            k: k + 1,
            reason: "identical gamma parameters".into(),
        });
    }
    Ok(())
}

/// Drift constant of the exact-likelihood comparison:
/// `α_j log β_j − α_k log β_k + log Γ(α_k) − log Γ(α_j)`.
fn mlc_drift<R: Real>(pj: &GammaParams<R>, pk: &GammaParams<R>) -> R {
    pj.shape() * pj.rate().ln() - pk.shape() * pk.rate().ln() + ln_gamma_unchecked(pk.shape())
        - ln_gamma_unchecked(pj.shape())
}

fn build_mlc_curve<R: Real>(set: &HypothesisSet<R>, params: &[GammaParams<R>]) -> Result<PcCurve<R>> {
    build_curve(set, params, |j, k| {
        let (pj, pk) = (&params[j], &params[k]);
        reject_identical(j, k, pj, pk)?;
        let term = LinearLogTerm::new(pj.shape() - pk.shape(), pj.rate() - pk.rate(), *pj);
        let (mean, variance) = term.moments_quadrature()?;
        Ok((mlc_drift(pj, pk), mean, variance))
    })
}

fn build_noisy_curve<R: Real>(
    set: &HypothesisSet<R>,
    params: &[GammaParams<R>],
    t_s: R,
) -> Result<PcCurve<R>> {
    build_curve(set, params, |j, k| {
        let (pj, pk) = (&params[j], &params[k]);
        reject_identical(j, k, pj, pk)?;
        // The mean is kept at its clean value; only the variance picks up
        // the sampling noise.
        let term = LinearLogTerm::new(pj.shape() - pk.shape(), pj.rate() - pk.rate(), *pj);
        let (mean, _) = term.moments_quadrature()?;
        let variance = noisy_llr_variance(pj, pk, t_s)?;
        Ok((mlc_drift(pj, pk), mean, variance))
    })
}

fn build_etc_curve<R: Real>(set: &HypothesisSet<R>, params: &[GammaParams<R>]) -> Result<PcCurve<R>> {
    build_curve(set, params, |j, k| {
        let (pj, pk) = (&params[j], &params[k]);
        let (aj, ak) = (pj.shape(), pk.shape());
        if aj == ak {
            return Err(Error::DegeneratePair {
                j: j + 1,
                k: k + 1,
                reason: "equal shapes collapse the rate-estimated likelihood ratio".into(),
            });
        }
        let a = aj - ak;
        // Under rate estimation the comparison term is
        // ŷ = a log x − (a β_j / α_j) x.
        let term = LinearLogTerm::new(a, a * pj.rate() / aj, *pj);
        let (mean, variance) = term.moments_quadrature()?;
        let drift = a * pj.rate().ln() + ak * (aj.ln() - ak.ln()) + ln_gamma_unchecked(ak)
            - ln_gamma_unchecked(aj);
        Ok((drift, mean, variance))
    })
}

/// Validates the shared preconditions of the accuracy predictions.
fn checked_params<R: Real>(set: &HypothesisSet<R>, n: usize) -> Result<Vec<GammaParams<R>>> {
    if set.len() < 2 {
        return Err(Error::InvalidParameter(
            "accuracy prediction needs at least two hypotheses".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidParameter(
            "accuracy prediction needs at least one period".into(),
        ));
    }
    set.require_fixed()
}

/// Gaussian-approximation probability of correct classification of the
/// maximum-likelihood classifier after `n` periods:
/// `P_c = Σ_j π_j Π_{k≠j} Q(τ_{j,k})` with
/// `τ_{j,k} = −(log(π_j/π_k) + n·c_{j,k} + n·μ_{j,k}) / √(n σ²_{j,k})`,
/// everything evaluated in log domain.
///
/// # Errors
/// Mismatch for fluctuating rates, degenerate-pair error for duplicated
/// hypotheses, invalid-parameter error for `M < 2` or `n = 0`.
pub fn analytical_pc_mlc<R: Real>(set: &HypothesisSet<R>, n: usize) -> Result<R> {
    let params = checked_params(set, n)?;
    Ok(build_mlc_curve(set, &params)?.pc(R::of(n as f64)))
}

/// Accuracy prediction for classification from sampled periods: the clean
/// per-pair mean with the noise-inflated variance of [`noisy_llr_variance`].
///
/// This inherits the approximation quality of the underlying Gaussian and
/// moment substitutions, which degrade as `T_s` grows; treat large-`T_s`
/// values as qualitative.
///
/// # Errors
/// As [`analytical_pc_mlc`], plus invalid-parameter for `T_s ≤ 0`.
pub fn analytical_pc_mlc_noisy<R: Real>(set: &HypothesisSet<R>, n: usize, t_s: R) -> Result<R> {
    if !(t_s > R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "sampling period must be positive, got {t_s}"
        )));
    }
    let params = checked_params(set, n)?;
    Ok(build_noisy_curve(set, &params, t_s)?.pc(R::of(n as f64)))
}

/// Accuracy prediction for the estimate-then-classify MLC, where each rate
/// is replaced by its ML estimate before deciding.
///
/// # Errors
/// As [`analytical_pc_mlc`]; degenerate-pair error when two hypotheses share
/// a shape (the comparison term collapses).
pub fn analytical_pc_etc<R: Real>(set: &HypothesisSet<R>, n: usize) -> Result<R> {
    let params = checked_params(set, n)?;
    Ok(build_etc_curve(set, &params)?.pc(R::of(n as f64)))
}

/// Probability that a noise-distorted period estimate is negative,
/// `Pr{x̃ < 0} = ∫_{−T_s}^0 f̃`.
///
/// # Errors
/// Invalid-parameter error for `T_s ≤ 0`; quadrature failures propagate.
pub fn noisy_negative_mass<R: Real>(params: &GammaParams<R>, t_s: R) -> Result<R> {
    if !(t_s > R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "sampling period must be positive, got {t_s}"
        )));
    }
    let mass = integrate(|x: R| noisy_gamma_pdf(x, params, t_s), -t_s, R::zero(), 1e-11)?.value;
    Ok(mass.max(R::zero()).min(R::one()))
}

/// Variance of the pairwise log-likelihood-ratio term evaluated on
/// noise-distorted periods `x̃`: the sum of the variances of its real part
/// (moments of `a log|x̃| − b x̃` against the noisy density) and imaginary
/// part (`π² a² p(1−p)` with `p = Pr{x̃ < 0}`, from the complex logarithm of
/// negative estimates).
///
/// # Errors
/// Degenerate-pair error for identical parameters, invalid-parameter error
/// for `T_s ≤ 0`; quadrature failures propagate.
pub fn noisy_llr_variance<R: Real>(
    j: &GammaParams<R>,
    k: &GammaParams<R>,
    t_s: R,
) -> Result<R> {
    if !(t_s > R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "sampling period must be positive, got {t_s}"
        )));
    }
    let a = j.shape() - k.shape();
    let b = j.rate() - k.rate();
    if a == R::zero() && b == R::zero() {
        return Err(Error::DegeneratePair {
            j: 1,
            k: 2,
            reason: "identical gamma parameters leave no likelihood ratio to analyze".into(),
        });
    }
    let real_part = |x: R| a * x.abs().ln() - b * x;
    // ∫ h over (−T_s, ∞) in four pieces: the power substitutions absorb the
    // log² singularity at the origin from both sides and resolve the steep
    // post-origin region when T_s is much smaller than the period scale.
    let split = (j.shape() / j.rate()).max(R::one()) + t_s;
    let scale = llr_magnitude_scale(a, b, j) + b.abs() * t_s;
    let pieces = |p: u32| -> Result<R> {
        // One power of the magnitude scale per moment order plus one for the
        // integration extent, as in the clean moment quadrature.
        let tol = NOISY_TOL * scale.as_f64().powi(p as i32 + 1);
        let h = |x: R| {
            let mut v = noisy_gamma_pdf(x, j, t_s);
            for _ in 0..p {
                v = v * real_part(x);
            }
            v
        };
        let neg = integrate_power_sub(|u: R| h(-u), R::zero(), t_s, 4, tol)?.value;
        let mid = integrate_power_sub(h, R::zero(), t_s, 4, tol)?.value;
        let steep = integrate_power_sub(h, t_s, split, 4, tol)?.value;
        let tail = integrate_to_inf(h, split, tol)?.value;
        Ok(neg + mid + steep + tail)
    };
    let mass = pieces(0)?;
    let mean_r = pieces(1)? / mass;
    let var_r = pieces(2)? / mass - mean_r * mean_r;
    let p_neg = noisy_negative_mass(j, t_s)?;
    let pi = R::of(std::f64::consts::PI);
    let var_i = pi * pi * a * a * p_neg * (R::one() - p_neg);
    let total = var_r + var_i;
    if !(total > R::zero()) {
        return Err(Error::NonConvergence(format!(
            "noisy log-likelihood-ratio variance came out nonpositive ({total})"
        )));
    }
    Ok(total)
}

/// Expected number of channel samples spent on one period under a single
/// hypothesis: `E{N|H} = Σ_{k≥1} Q(α, k β T_s) + 1`, truncated once the
/// integral-test tail bound `[α Q(α+1, z) − z Q(α, z)]/(β T_s)` at `z = k β
/// T_s` certifies a remainder below 1e-9.
///
/// # Errors
/// Invalid-parameter error for `T_s ≤ 0`.
pub fn expected_samples_single<R: Real>(params: &GammaParams<R>, t_s: R) -> Result<R> {
    if !(t_s > R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "sampling period must be positive, got {t_s}"
        )));
    }
    let alpha = params.shape();
    let c = params.rate() * t_s;
    let mut sum = R::one();
    let mut k = 1u64;
    loop {
        let z = R::of(k as f64) * c;
        let q = reg_upper_gamma(alpha, z)?;
        sum += q;
        if q < R::of(1e-10) {
            let tail = (alpha * reg_upper_gamma(alpha + R::one(), z)? - z * q) / c;
            if tail < R::of(1e-9) {
                return Ok(sum);
            }
        }
        k += 1;
        if k > 200_000_000 {
            return Err(Error::NonConvergence(format!(
                "expected-samples series did not certify its tail (α={alpha}, βT_s={c})"
            )));
        }
    }
}

/// Expected number of channel samples spent on one period, averaged over the
/// hypothesis priors (Theorem-1 series per hypothesis).
///
/// # Errors
/// Mismatch for fluctuating rates; invalid-parameter error for `T_s ≤ 0`.
pub fn expected_samples_per_period<R: Real>(set: &HypothesisSet<R>, t_s: R) -> Result<R> {
    let params = set.require_fixed()?;
    let mut total = R::zero();
    for (p, prior) in params.iter().zip(set.priors()) {
        total += *prior * expected_samples_single(p, t_s)?;
    }
    Ok(total)
}

/// Closed form of the expected samples per period for exponential periods
/// (`α = 1`, rate `λ`): `1/(1 − e^{−λ T_s})`.
///
/// # Errors
/// Invalid-parameter error for nonpositive `λ` or `T_s`.
pub fn expected_samples_exponential<R: Real>(lambda: R, t_s: R) -> Result<R> {
    if !(lambda > R::zero() && t_s > R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "exponential sample count needs λ > 0 and T_s > 0, got λ={lambda}, T_s={t_s}"
        )));
    }
    Ok(-(-lambda * t_s).exp_m1().recip())
}

/// Closed form of the expected samples per period for Erlang-2 periods
/// (`α = 2`, rate `λ`):
/// `(1 − e^{−λT_s} + λT_s e^{−λT_s}) / (1 − e^{−λT_s})²`.
///
/// # Errors
/// Invalid-parameter error for nonpositive `λ` or `T_s`.
pub fn expected_samples_erlang2<R: Real>(lambda: R, t_s: R) -> Result<R> {
    if !(lambda > R::zero() && t_s > R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "Erlang-2 sample count needs λ > 0 and T_s > 0, got λ={lambda}, T_s={t_s}"
        )));
    }
    let c = lambda * t_s;
    let one_minus = -(-c).exp_m1();
    Ok((one_minus + c * (-c).exp()) / (one_minus * one_minus))
}

/// Probability of missing a period entirely because it is shorter than the
/// sampling interval: `R = Pr{T_on < T_s} = G(T_s | Θ)`. Zero for `T_s ≤ 0`.
pub fn misdetection_rate<R: Real>(params: &GammaParams<R>, t_s: R) -> R {
    if t_s <= R::zero() {
        return R::zero();
    }
    gamma_cdf(t_s, params).expect("positive argument is in-domain")
}

/// Expected number of periods detected in an observation window of `t`
/// seconds: `E{K} = Σ_j π_j (t / E{T_on|H_j}) (1 − R(T_s|H_j))` with
/// `E{T_on|H_j} = α_j/β_j`.
///
/// # Errors
/// Mismatch for fluctuating rates; invalid-parameter error for `t ≤ 0` or
/// negative `T_s`.
pub fn expected_periods<R: Real>(set: &HypothesisSet<R>, t: R, t_s: R) -> Result<R> {
    if !(t > R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "observation window must be positive, got {t}"
        )));
    }
    if t_s < R::zero() {
        return Err(Error::InvalidParameter(format!(
            "sampling period must be nonnegative, got {t_s}"
        )));
    }
    let params = set.require_fixed()?;
    let mut total = R::zero();
    for (p, prior) in params.iter().zip(set.priors()) {
        let detected = R::one() - misdetection_rate(p, t_s);
        total += *prior * (t * p.rate() / p.shape()) * detected;
    }
    Ok(total)
}

/// Which resource the sensing design holds fixed while minimizing the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum GuidelineMode {
    /// Observation time fixed; find the fewest samples meeting the target.
    FixTimeMinSamples,
    /// Sample count fixed; find the observation time with the best (and
    /// target-meeting) accuracy.
    FixSamplesMinTime,
}

/// Sensing design constraint: the fixed resource and the accuracy target.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GuidelineConstraint<R> {
    /// Which resource is held fixed.
    pub mode: GuidelineMode,
    /// Observation time in seconds (fix-time mode) or sample count
    /// (fix-samples mode).
    pub fixed_value: R,
    /// Required probability of correct classification, in `[0, 1)`.
    pub epsilon: R,
}

impl<R: Real> GuidelineConstraint<R> {
    /// Fixes the observation window at `t` seconds.
    ///
    /// # Errors
    /// Invalid-parameter error for `t ≤ 0` or `epsilon ∉ [0, 1)`.
    pub fn fix_time(t: R, epsilon: R) -> Result<Self> {
        if !(t > R::zero()) {
            return Err(Error::InvalidParameter(format!(
                "observation window must be positive, got {t}"
            )));
        }
        Self::checked(GuidelineMode::FixTimeMinSamples, t, epsilon)
    }

    /// Fixes the sample budget at `n` samples (`n ≥ 2` so the sampling
    /// interval `T_s = T/(n−1)` exists).
    ///
    /// # Errors
    /// Invalid-parameter error for `n < 2` or `epsilon ∉ [0, 1)`.
    pub fn fix_samples(n: u64, epsilon: R) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "sample budget must be at least 2, got {n}"
            )));
        }
        Self::checked(GuidelineMode::FixSamplesMinTime, R::of(n as f64), epsilon)
    }

    fn checked(mode: GuidelineMode, fixed_value: R, epsilon: R) -> Result<Self> {
        if !(epsilon >= R::zero() && epsilon < R::one()) {
            return Err(Error::InvalidParameter(format!(
                "target accuracy must lie in [0, 1), got {epsilon}"
            )));
        }
        Ok(Self { mode, fixed_value, epsilon })
    }
}

/// How the guideline solver predicts accuracy at a candidate design point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuidelineEvaluator {
    /// Gaussian-approximation prediction with the expected period count.
    Analytic,
    /// Monte Carlo classification of simulated noisy periods (10 runs of
    /// 2000 realizations, common random numbers across design points).
    Simulated {
        /// Root of the per-realization seed derivation.
        master_seed: u64,
    },
}

/// Solved sensing operating point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GuidelineSolution<R> {
    /// Observation window, seconds.
    pub t: R,
    /// Number of channel samples.
    pub n: u64,
    /// Resulting sampling interval `t/(n−1)`.
    pub t_s: R,
    /// Predicted accuracy at the operating point.
    pub achieved_pc: R,
}

/// Simulation protocol of the Monte Carlo design evaluator.
const DESIGN_RUNS: u64 = 10;
const DESIGN_REALIZATIONS: u64 = 2000;
/// Cap of the fix-time sample search.
const DESIGN_N_CAP: u64 = 1 << 20;
/// Fix-samples time scan: grid size and span in units of the largest mean
/// period.
const DESIGN_T_GRID: usize = 64;
const DESIGN_T_SPAN: (f64, f64) = (0.1, 100.0);

/// Solves the sensing design problem: fixing either the observation time or
/// the sample count, find the other resource meeting the accuracy target
/// with `T_s = T/(N−1)`.
///
/// Fix-time mode returns the smallest `N` whose predicted accuracy reaches
/// `ε` (doubling then bisection). Fix-samples mode scans a geometric grid of
/// observation times, refines the concave profile by golden-section search,
/// and returns the best point found — the time of maximal accuracy — provided
/// it meets `ε`.
///
/// # Errors
/// Infeasibility is reported with the best achievable point; mismatch and
/// numerical errors propagate from the evaluator.
pub fn guideline_solve<R: Real>(
    set: &HypothesisSet<R>,
    constraint: &GuidelineConstraint<R>,
    evaluator: &GuidelineEvaluator,
) -> Result<GuidelineSolution<R>> {
    set.require_fixed()?;
    match constraint.mode {
        GuidelineMode::FixTimeMinSamples => {
            solve_fix_time(set, constraint.fixed_value, constraint.epsilon, evaluator)
        }
        GuidelineMode::FixSamplesMinTime => solve_fix_samples(
            set,
            constraint.fixed_value.as_f64().round() as u64,
            constraint.epsilon,
            evaluator,
        ),
    }
}

/// Predicted accuracy of the design point `(t, n)`.
fn design_pc<R: Real>(
    set: &HypothesisSet<R>,
    t: R,
    n: u64,
    evaluator: &GuidelineEvaluator,
) -> Result<R> {
    let t_s = t / R::of((n - 1) as f64);
    match evaluator {
        GuidelineEvaluator::Analytic => {
            let periods = expected_periods(set, t, t_s)?.max(R::of(1e-9));
            let params = set.require_fixed()?;
            Ok(build_noisy_curve(set, &params, t_s)?.pc(periods))
        }
        GuidelineEvaluator::Simulated { master_seed } => {
            simulate_design_accuracy(set, t, t_s, *master_seed)
        }
    }
}

/// Monte Carlo accuracy of noisy-likelihood classification at one design
/// point: the period count is the rounded expected count, periods are drawn
/// from the prior-selected hypothesis, and estimates carry `± U(0, T_s)`
/// noise. Seeds depend only on (run, realization), giving common random
/// numbers across design points.
fn simulate_design_accuracy<R: Real>(
    set: &HypothesisSet<R>,
    t: R,
    t_s: R,
    master_seed: u64,
) -> Result<R> {
    let n_periods = expected_periods(set, t, t_s)?.as_f64().round().max(1.0) as usize;
    let params = set.require_fixed()?;
    let run_means: Vec<R> = (0..DESIGN_RUNS)
        .into_par_iter()
        .map(|run| {
            let mut correct = 0usize;
            for realization in 0..DESIGN_REALIZATIONS {
                let mut rng = seed::rng_for(master_seed, &[run, realization]);
                let truth = classify::draw_hypothesis(set.priors(), &mut rng);
                let mut values = Vec::with_capacity(n_periods);
                for _ in 0..n_periods {
                    let x = params[truth].sample(&mut rng);
                    let lead: R = uniform01::<R, _>(&mut rng) * t_s;
                    let lag: R = uniform01::<R, _>(&mut rng) * t_s;
                    values.push(x + lead - lag);
                }
                let sample = NoisyPeriods::new(values, t_s)?;
                let decision = classify::mlc_noisy(&sample, set)?;
                if decision.chosen == truth + 1 {
                    correct += 1;
                }
            }
            Ok(R::of(correct as f64 / DESIGN_REALIZATIONS as f64))
        })
        .collect::<Result<_>>()?;
    let total: R = run_means.iter().cloned().sum();
    Ok(total / R::of(DESIGN_RUNS as f64))
}

fn solve_fix_time<R: Real>(
    set: &HypothesisSet<R>,
    t: R,
    epsilon: R,
    evaluator: &GuidelineEvaluator,
) -> Result<GuidelineSolution<R>> {
    let solution = |n: u64, pc: R| GuidelineSolution {
        t,
        n,
        t_s: t / R::of((n - 1) as f64),
        achieved_pc: pc,
    };
    let pc2 = design_pc(set, t, 2, evaluator)?;
    if pc2 >= epsilon {
        return Ok(solution(2, pc2));
    }
    let mut best = (2u64, pc2);
    let mut lo = 2u64;
    let mut hi = 4u64;
    let pc_hi = loop {
        let pc = design_pc(set, t, hi, evaluator)?;
        if pc > best.1 {
            best = (hi, pc);
        }
        if pc >= epsilon {
            break pc;
        }
        if hi >= DESIGN_N_CAP {
            return Err(Error::Infeasible {
                t: t.as_f64(),
                n: best.0,
                best_pc: best.1.as_f64(),
            });
        }
        lo = hi;
        hi *= 2;
    };
    let mut hi_pc = pc_hi;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let pc = design_pc(set, t, mid, evaluator)?;
        if pc >= epsilon {
            hi = mid;
            hi_pc = pc;
        } else {
            lo = mid;
        }
    }
    Ok(solution(hi, hi_pc))
}

fn solve_fix_samples<R: Real>(
    set: &HypothesisSet<R>,
    n: u64,
    epsilon: R,
    evaluator: &GuidelineEvaluator,
) -> Result<GuidelineSolution<R>> {
    let params = set.require_fixed()?;
    let scale = params
        .iter()
        .map(|p| p.shape() / p.rate())
        .fold(R::zero(), R::max);
    let t_lo = scale * R::of(DESIGN_T_SPAN.0);
    let t_hi = scale * R::of(DESIGN_T_SPAN.1);
    let ratio = (t_hi / t_lo).powf(R::of(1.0 / (DESIGN_T_GRID - 1) as f64));

    let mut best = (t_lo, R::neg_infinity());
    let mut grid = Vec::with_capacity(DESIGN_T_GRID);
    let mut t = t_lo;
    for _ in 0..DESIGN_T_GRID {
        let pc = design_pc(set, t, n, evaluator)?;
        grid.push((t, pc));
        if pc > best.1 {
            best = (t, pc);
        }
        t = t * ratio;
    }
    let peak_idx = grid
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).expect("accuracies are finite"))
        .map(|(i, _)| i)
        .expect("grid is nonempty");

    // Golden-section refinement of the concave profile around the grid peak.
    let golden = R::of(0.618_033_988_749_894_8);
    let mut a = grid[peak_idx.saturating_sub(1)].0;
    let mut b = grid[(peak_idx + 1).min(DESIGN_T_GRID - 1)].0;
    let mut x1 = b - golden * (b - a);
    let mut x2 = a + golden * (b - a);
    let mut f1 = design_pc(set, x1, n, evaluator)?;
    let mut f2 = design_pc(set, x2, n, evaluator)?;
    for _ in 0..10 {
        if f1 > best.1 {
            best = (x1, f1);
        }
        if f2 > best.1 {
            best = (x2, f2);
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - golden * (b - a);
            f1 = design_pc(set, x1, n, evaluator)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + golden * (b - a);
            f2 = design_pc(set, x2, n, evaluator)?;
        }
    }

    if best.1 < epsilon {
        return Err(Error::Infeasible {
            t: best.0.as_f64(),
            n,
            best_pc: best.1.as_f64(),
        });
    }
    Ok(GuidelineSolution {
        t: best.0,
        n,
        t_s: best.0 / R::of((n - 1) as f64),
        achieved_pc: best.1,
    })
}

/// Normalized performance loss `L = (P_c − P̃_c)/P_c` of a noisy accuracy
/// relative to a clean one.
///
/// # Errors
/// Invalid-parameter error when the clean accuracy is not positive.
pub fn normalized_loss<R: Real>(pc_clean: R, pc_noisy: R) -> Result<R> {
    if !(pc_clean > R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "normalized loss needs a positive clean accuracy, got {pc_clean}"
        )));
    }
    Ok((pc_clean - pc_noisy) / pc_clean)
}
