//! Batch-means summaries for Monte Carlo estimates.

use crate::real::Real;
use crate::{Error, Result};

/// Mean with a symmetric 95% confidence half-width over independent runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiSummary<R> {
    /// Grand mean over runs.
    pub mean: R,
    /// 95% two-sided Student-t half-width; zero for a single run.
    pub ci_halfwidth: R,
    /// Number of runs the summary is based on.
    pub runs: usize,
}

/// Two-sided 95% Student-t quantiles (`t_{0.975, df}`) for small df.
const T_975: [f64; 30] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160,
    2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056,
    2.052, 2.048, 2.045, 2.042,
];

/// `t_{0.975, df}`, linearly interpolated in 1/df above the table range.
fn t_quantile_975(df: usize) -> f64 {
    debug_assert!(df >= 1);
    if df <= 30 {
        return T_975[df - 1];
    }
    // Anchors for large df; the quantile is nearly linear in 1/df.
    const ANCHORS: [(f64, f64); 5] = [
        (30.0, 2.042),
        (40.0, 2.021),
        (60.0, 2.000),
        (120.0, 1.980),
        (1e9, 1.960),
    ];
    let x = 1.0 / df as f64;
    for w in ANCHORS.windows(2) {
        let (d0, t0) = w[0];
        let (d1, t1) = w[1];
        let (x0, x1) = (1.0 / d0, 1.0 / d1);
        if x <= x0 && x >= x1 {
            return t1 + (t0 - t1) * (x - x1) / (x0 - x1);
        }
    }
    1.960
}

/// Summarizes per-run means into a grand mean and a 95% batch-means
/// confidence half-width.
///
/// # Errors
/// [`Error::InvalidParameter`] when `run_means` is empty.
pub fn batch_means_ci<R: Real>(run_means: &[R]) -> Result<CiSummary<R>> {
    if run_means.is_empty() {
        return Err(Error::InvalidParameter(
            "batch-means summary requires at least one run".into(),
        ));
    }
    let n = run_means.len();
    let n_r = R::of(n as f64);
    let mean: R = run_means.iter().copied().sum::<R>() / n_r;
    if n == 1 {
        return Ok(CiSummary {
            mean,
            ci_halfwidth: R::zero(),
            runs: 1,
        });
    }
    let ss: R = run_means
        .iter()
        .map(|&m| {
            let d = m - mean;
            d * d
        })
        .sum();
    let sd = (ss / R::of((n - 1) as f64)).sqrt();
    let t = R::of(t_quantile_975(n - 1));
    Ok(CiSummary {
        mean,
        ci_halfwidth: t * sd / n_r.sqrt(),
        runs: n,
    })
}
