//! Scenario files: a small TOML schema describing a hypothesis set, plus the
//! bundled three-hypothesis scenarios (fixed-rate and fluctuating) shared by
//! the test suite and the CLI.
//!
//! One `[[hypothesis]]` table per hypothesis:
//!
//! ```toml
//! name = "example"          # optional display name
//!
//! [experiment]              # optional defaults; command-line flags override
//! runs = 50
//! realizations_per_run = 2000
//! master_seed = 7
//!
//! [[hypothesis]]
//! shape = 1.0
//! rate = 0.4                # fixed rate …
//! prior = 0.5               # optional; give for every hypothesis or none
//!
//! [[hypothesis]]
//! shape = 2.0
//! rate_low = 0.1            # … or a uniform rate interval
//! rate_high = 0.3
//! prior = 0.5
//! ```
//!
//! Omitted priors mean the maximum-entropy choice `π_j = 1/M`.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::real::Real;
use crate::traffic::{HypothesisModel, HypothesisSet, RatePrior};
use crate::{Error, Result};

/// A parsed scenario: the validated hypothesis set plus any experiment
/// defaults the file declares.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<R> {
    /// The file's `name` entry, else the bundled name or path it loaded from.
    pub name: String,
    /// Hypotheses and priors.
    pub set: HypothesisSet<R>,
    /// Optional experiment defaults.
    pub defaults: ExperimentDefaults,
}

/// Experiment defaults a scenario file may declare; every field is optional
/// and command-line flags take precedence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentDefaults {
    /// Batch count for batch-means confidence intervals.
    pub runs: Option<usize>,
    /// Classification problems per batch.
    pub realizations_per_run: Option<usize>,
    /// Root seed of all derived RNG streams.
    pub master_seed: Option<u64>,
}

/// Verbatim deserialization target; semantic checks happen in [`parse`].
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    experiment: Option<ExperimentDefaults>,
    #[serde(default, rename = "hypothesis")]
    hypotheses: Vec<RawHypothesis>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHypothesis {
    shape: f64,
    rate: Option<f64>,
    rate_low: Option<f64>,
    rate_high: Option<f64>,
    prior: Option<f64>,
}

/// Names of the scenarios shipped with the crate, loadable by bare name.
pub const BUNDLED: [&str; 4] = ["test1", "test2", "test1_fluct", "test2_fluct"];

/// Raw TOML text of a bundled scenario, or `None` for unknown names.
pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        "test1" => Some(include_str!("../scenarios/test1.toml")),
        "test2" => Some(include_str!("../scenarios/test2.toml")),
        "test1_fluct" => Some(include_str!("../scenarios/test1_fluct.toml")),
        "test2_fluct" => Some(include_str!("../scenarios/test2_fluct.toml")),
        _ => None,
    }
}

/// Parses scenario TOML into a validated hypothesis set.
///
/// # Errors
/// Scenario error with a line-anchored message for malformed TOML and with a
/// hypothesis-numbered message for semantic problems: no hypotheses, a rate
/// given neither as `rate` nor as a `rate_low`/`rate_high` pair (or as
/// both), priors on some but not all hypotheses, or priors that fail
/// [`HypothesisSet`] validation.
pub fn parse<R: Real>(text: &str) -> Result<Scenario<R>> {
    let raw: RawScenario =
        toml::from_str(text).map_err(|e| Error::Scenario(format!("scenario parse failed: {e}")))?;
    if raw.hypotheses.is_empty() {
        return Err(Error::Scenario(
            "scenario declares no [[hypothesis]] tables".into(),
        ));
    }
    let models = raw
        .hypotheses
        .iter()
        .enumerate()
        .map(|(i, h)| model_from(i, h))
        .collect::<Result<Vec<HypothesisModel<R>>>>()?;
    let given_priors = raw.hypotheses.iter().filter(|h| h.prior.is_some()).count();
    let set = if given_priors == 0 {
        HypothesisSet::with_equal_priors(models)
    } else if given_priors == raw.hypotheses.len() {
        let priors = raw
            .hypotheses
            .iter()
            .map(|h| R::of(h.prior.expect("all priors present")))
            .collect();
        HypothesisSet::new(models, priors)
    } else {
        return Err(Error::Scenario(format!(
            "priors must be given for every hypothesis or for none ({given_priors} of {} set)",
            raw.hypotheses.len()
        )));
    }
    .map_err(|e| Error::Scenario(format!("invalid hypothesis set: {e}")))?;
    Ok(Scenario {
        name: raw.name.unwrap_or_default(),
        set,
        defaults: raw.experiment.unwrap_or_default(),
    })
}

/// Validates one raw hypothesis into a model, numbering errors 1-based.
fn model_from<R: Real>(index: usize, h: &RawHypothesis) -> Result<HypothesisModel<R>> {
    let context = |e: Error| Error::Scenario(format!("hypothesis {}: {e}", index + 1));
    match (h.rate, h.rate_low, h.rate_high) {
        (Some(rate), None, None) => {
            HypothesisModel::fixed(R::of(h.shape), R::of(rate)).map_err(context)
        }
        (None, Some(lo), Some(hi)) => {
            let prior = RatePrior::new(R::of(lo), R::of(hi)).map_err(context)?;
            HypothesisModel::fluctuating(R::of(h.shape), prior).map_err(context)
        }
        _ => Err(Error::Scenario(format!(
            "hypothesis {}: give either `rate` or both `rate_low` and `rate_high`",
            index + 1
        ))),
    }
}

/// Loads a scenario by bundled name or filesystem path. Bundled names take
/// precedence; they contain no path separator, so a real file can always be
/// reached via `./test1` or an absolute path.
///
/// # Errors
/// Scenario error naming the source on read or parse failure.
pub fn load<R: Real>(name_or_path: &str) -> Result<Scenario<R>> {
    let text = match bundled(name_or_path) {
        Some(text) => text.to_string(),
        None => fs::read_to_string(Path::new(name_or_path)).map_err(|e| {
            Error::Scenario(format!("could not read scenario {name_or_path}: {e}"))
        })?,
    };
    let mut scenario = parse(&text).map_err(|e| match e {
        Error::Scenario(msg) => Error::Scenario(format!("{name_or_path}: {msg}")),
        other => other,
    })?;
    if scenario.name.is_empty() {
        scenario.name = name_or_path.to_string();
    }
    Ok(scenario)
}
