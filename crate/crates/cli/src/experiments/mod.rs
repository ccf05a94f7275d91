//! Experiment drivers. Every driver returns a [`Report`] whose content depends
//! only on the configuration, never on the worker count.

use ffdioph_core::contfrac::{digit_degrees, CfStatus};
use ffdioph_core::measure::QMeasure;
use ffdioph_core::{Error, SeriesSource};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Config, ExperimentKind};
use crate::error::CliResult;
use crate::report::Report;

pub mod counting;
pub mod digits;
pub mod exact;
pub mod khintchine;
pub mod loglaw;

pub fn run(cfg: &Config) -> CliResult<Report> {
    match cfg.kind {
        ExperimentKind::Khintchine => khintchine::run(cfg),
        ExperimentKind::Loglaw => loglaw::run(cfg),
        ExperimentKind::DigitStats => digits::run(cfg),
        ExperimentKind::Counting => counting::run(cfg),
        ExperimentKind::Shadow => exact::run_shadow(cfg),
        ExperimentKind::QuasiIndependence => exact::run_quasi_independence(cfg),
        ExperimentKind::BorelCantelli => exact::run_borel_cantelli(cfg),
    }
}

/// Runs `trial(i)` for `i < n` on the worker pool; results come back in index
/// order and the first error by index wins.
pub fn par_trials<T: Send>(
    workers: Option<usize>,
    n: u64,
    trial: impl Fn(u64) -> ffdioph_core::Result<T> + Sync + Send,
) -> CliResult<Vec<T>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.unwrap_or(0)).build()?;
    let results: Vec<ffdioph_core::Result<T>> = pool.install(|| (0..n).into_par_iter().map(&trial).collect());
    Ok(results.into_iter().collect::<ffdioph_core::Result<Vec<T>>>()?)
}

/// Exact measure as `{"exact": "num/q^k", "decimal": x}`.
pub fn measure_json(m: &QMeasure) -> Value {
    json!({ "exact": m.to_string(), "decimal": m.to_f64() })
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation.
pub fn sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// `(x - mean) / σ`, with `0` when both agree and `σ = 0`.
pub fn z_score(x: f64, expected: f64, sigma: f64) -> f64 {
    if sigma > 0.0 {
        (x - expected) / sigma
    } else if (x - expected).abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Outcome of expanding a series far enough to read `n` digit degrees.
pub enum Digits {
    Degrees(Vec<u32>),
    /// The source is rational and its expansion ended after these digits.
    Terminated(Vec<u32>),
}

/// `deg a_1, …, deg a_n`, growing the precision from `prec` (in proportion to
/// the shortfall, at most eight rounds) until `n` digits are certified.
pub fn read_digit_degrees(source: &mut SeriesSource, n: usize, prec: i64) -> ffdioph_core::Result<Digits> {
    let mut prec = prec;
    for _ in 0..8 {
        if source.as_rational().is_none() {
            source.ensure(prec)?;
        }
        let d = digit_degrees(source, n);
        match d.status {
            CfStatus::TerminatedRational => return Ok(Digits::Terminated(d.degrees)),
            _ if d.degrees.len() >= n => return Ok(Digits::Degrees(d.degrees[..n].to_vec())),
            _ => {
                let scaled = prec as f64 * n as f64 / d.degrees.len().max(1) as f64 * 1.05;
                prec = (prec + prec / 4 + 1).max(scaled.ceil() as i64);
            }
        }
    }
    Err(Error::PrecisionExhausted { prec })
}

/// Precision expected to certify `n` digits: `deg Q_n ≈ n q/(q-1)`, doubled,
/// plus a margin for fluctuations.
pub fn default_digit_prec(n: usize, q: u32) -> i64 {
    let mean_deg = q as f64 / (q as f64 - 1.0);
    (2.0 * n as f64 * mean_deg + 64.0 * (n as f64).sqrt() + 64.0).ceil() as i64
}
