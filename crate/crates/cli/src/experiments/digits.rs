//! Histogram of digit degrees against the exact law
//! `P(deg a_n = k) = (q-1) q^{-k}`, the measure of the corresponding cylinder.

use ffdioph_core::contfrac::DigitHistogram;
use ffdioph_core::measure::QMeasure;
use ffdioph_core::SeriesSource;
use num_bigint::BigUint;
use serde_json::json;

use super::{default_digit_prec, par_trials, read_digit_degrees, z_score, Digits};
use crate::config::Config;
use crate::error::CliResult;
use crate::report::{Report, Table};

/// Degrees compared at 3σ.
pub const CHECKED_DEGREES: u32 = 5;
/// Monotonicity is only asserted where the expected count is at least this.
pub const MONOTONE_MIN_EXPECTED: f64 = 10.0;

pub fn digit_law(q: u32, k: u32) -> QMeasure {
    QMeasure::new(BigUint::from(q - 1), q, k)
}

pub fn run(cfg: &Config) -> CliResult<Report> {
    let q = cfg.field.q();
    let n = cfg.digits;
    let prec = cfg.prec.unwrap_or_else(|| default_digit_prec(n, q));
    let per_trial = par_trials(cfg.workers, cfg.trials, |i| {
        let mut source = SeriesSource::random(&cfg.field, cfg.seed, i);
        Ok(match read_digit_degrees(&mut source, n, prec)? {
            Digits::Degrees(d) | Digits::Terminated(d) => d,
        })
    })?;
    let mut hist = DigitHistogram::default();
    for d in &per_trial {
        hist.add(d);
    }
    let total = hist.total() as f64;
    let top = hist.counts.keys().copied().max().unwrap_or(0).max(CHECKED_DEGREES);

    let mut table = Table::new("degrees", &["k", "count", "freq", "law", "law_decimal", "se", "z", "within_3sigma"]);
    let mut bad = Vec::new();
    let mut rows = Vec::new();
    for k in 1..=top {
        let law = digit_law(q, k);
        let p = law.to_f64();
        let count = hist.count(k);
        let freq = count as f64 / total;
        let se = (p * (1.0 - p) / total).sqrt();
        let z = z_score(freq, p, se);
        let ok = z.abs() <= 3.0;
        if k <= CHECKED_DEGREES && !ok {
            bad.push(k);
        }
        rows.push((k, freq, p));
        table.push(vec![json!(k), json!(count), json!(freq), json!(law.to_string()), json!(p), json!(se), json!(z), json!(ok)]);
    }
    let monotone_range: Vec<_> = rows.iter().filter(|r| r.2 * total >= MONOTONE_MIN_EXPECTED).collect();
    let monotone = monotone_range.windows(2).all(|w| w[1].1 <= w[0].1);

    let mut report = Report::new("digit-stats", cfg.echo());
    report.set("digits_total", hist.total());
    report.set("max_degree", hist.counts.keys().copied().max().unwrap_or(0));
    report.tables.push(table);
    report.check(
        "freq(k) within 3 se of (q-1)q^-k for k <= 5",
        bad.is_empty(),
        if bad.is_empty() { "k = 1..5".to_string() } else { format!("outside at k = {bad:?}") },
    );
    report.check(
        "freq(k) nonincreasing where the expected count is at least 10",
        monotone,
        format!("k = 1..{}", monotone_range.len()),
    );
    Ok(report)
}
