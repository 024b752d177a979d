//! Classification of primary-user (PU) ON/OFF traffic whose period lengths follow
//! gamma distributions with hypothesis-dependent parameters.
//!
//! The crate provides:
//!
//! * fixed-sample-size maximum-likelihood classification (MLC) and sequential
//!   classification (MSPRT) over exact period observations, plus variants that
//!   work from sampled (noisy) periods, from traffic with per-realization rate
//!   fluctuation (averaged-likelihood, ALF), and with unknown rates estimated
//!   on the fly (estimate-then-classify, ETC) — see [`classify`];
//! * analytic predictions of classification accuracy, expected sample counts,
//!   and a sensing design guideline that picks the sampling interval under a
//!   time or energy budget — see [`analysis`];
//! * distribution distances used to reason about hypothesis separability — see
//!   [`distances`];
//! * reproducible Monte Carlo experiment drivers — see [`montecarlo`];
//! * a TOML scenario format with bundled example sets — see [`scenario`].
//!
//! All numeric code is generic over the scalar type through the [`Real`] trait
//! (implemented for `f32` and `f64`). The crate root re-exports `f64` aliases
//! of the main types, which is what the CLI and most users want.

pub mod analysis;
pub mod classify;
pub mod distances;
pub mod montecarlo;
pub mod quad;
pub mod real;
pub mod scenario;
pub mod seed;
pub mod specfun;
pub mod stats;
pub mod traffic;

pub use real::Real;

use thiserror::Error;

/// Error type shared by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received a parameter outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A special function was evaluated outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative numerical scheme failed to converge.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature tolerance not met: requested {requested:e}, achieved {achieved:e}")]
    QuadratureTolerance { requested: f64, achieved: f64 },

    /// A classifier was configured with a scenario it cannot operate on.
    #[error("classifier/scenario mismatch: {0}")]
    Mismatch(String),

    /// A sequential classifier ran out of observations before deciding.
    #[error("period stream exhausted after {yielded} periods with no decision")]
    StreamExhausted { yielded: usize },

    /// A pairwise computation is undefined for the given hypothesis pair.
    #[error("degenerate hypothesis pair ({j}, {k}): {reason}")]
    DegeneratePair { j: usize, k: usize, reason: String },

    /// A threshold sweep hit its floor without reaching the target accuracy.
    #[error("threshold sweep exhausted without reaching target accuracy {target}")]
    SweepExhausted { target: f64 },

    /// A design constraint cannot be met; carries the best achievable point.
    #[error("design constraint infeasible: best accuracy {best_pc:.4} at T={t:.3}, N={n}")]
    Infeasible { t: f64, n: u64, best_pc: f64 },

    /// A scenario file could not be parsed or validated.
    #[error("scenario error: {0}")]
    Scenario(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Gamma period-length parameters over `f64`.
pub type GammaParams = traffic::GammaParams<f64>;
/// Uniform rate-fluctuation interval over `f64`.
pub type RatePrior = traffic::RatePrior<f64>;
/// One traffic hypothesis over `f64`.
pub type HypothesisModel = traffic::HypothesisModel<f64>;
/// A prior-weighted set of traffic hypotheses over `f64`.
pub type HypothesisSet = traffic::HypothesisSet<f64>;
/// A vector of simulated period lengths over `f64`.
pub type PeriodSample = traffic::PeriodSample<f64>;
/// Sampled (noise-injected) period observations over `f64`.
pub type NoisyPeriods = traffic::NoisyPeriods<f64>;
/// Classifier output over `f64`.
pub type Decision = classify::Decision<f64>;
/// Sequential-classifier configuration over `f64`.
pub type MsprtConfig = classify::MsprtConfig<f64>;
/// Mean/variance summary of a pairwise log-likelihood-ratio term over `f64`.
pub type LlrTermMoments = analysis::LlrTermMoments<f64>;
/// Solved sensing operating point over `f64`.
pub type GuidelineSolution = analysis::GuidelineSolution<f64>;
/// Monte Carlo experiment description over `f64`.
pub type ExperimentConfig = montecarlo::ExperimentConfig<f64>;
/// One point of an empirical accuracy curve over `f64`.
pub type CurvePoint = montecarlo::CurvePoint<f64>;
/// Parsed scenario file over `f64`.
pub type Scenario = scenario::Scenario<f64>;
