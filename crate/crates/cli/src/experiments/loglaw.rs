//! Excursions of the geodesic ray toward `f` into the cusp, read off the
//! continued fraction: `M_N = max_{n ≤ N} deg a_n` and
//! `L_N = max peak_n / ln t_enter_n` over the first `N` tents.

use ffdioph_core::tree::log_ratio_max;
use ffdioph_core::SeriesSource;
use serde_json::json;

use super::{default_digit_prec, mean, median, par_trials, read_digit_degrees, Digits};
use crate::config::Config;
use crate::error::CliResult;
use crate::report::{Report, Table};

/// Band for the mean of `M_N` around `log_q N`.
pub const M_BAND: f64 = 2.0;
/// Band for the last median of `L_N`, as multiples of `1/ln q`.
pub const L_BAND: (f64, f64) = (0.8, 1.6);

enum Trial {
    /// `(M_N, L_N)` per ladder rung.
    Rungs(Vec<(u32, f64)>),
    Terminated { digits: usize },
}

pub fn run(cfg: &Config) -> CliResult<Report> {
    run_with(cfg, |i| SeriesSource::random(&cfg.field, cfg.seed, i))
}

/// Runs the experiment on the sources produced by `make(trial)`.
pub fn run_with(cfg: &Config, make: impl Fn(u64) -> SeriesSource + Sync + Send) -> CliResult<Report> {
    let q = cfg.field.q();
    let n_max = *cfg.ladder.last().expect("nonempty ladder");
    let prec = cfg.prec.unwrap_or_else(|| default_digit_prec(n_max, q));
    let trials = par_trials(cfg.workers, cfg.trials, |i| {
        let mut source = make(i);
        Ok(match read_digit_degrees(&mut source, n_max, prec)? {
            Digits::Terminated(d) => Trial::Terminated { digits: d.len() },
            Digits::Degrees(d) => Trial::Rungs(
                cfg.ladder
                    .iter()
                    .map(|&n| {
                        let m = d[..n].iter().copied().max().unwrap_or(0);
                        (m, log_ratio_max(&d, n).unwrap_or(0.0))
                    })
                    .collect(),
            ),
        })
    })?;

    let mut report = Report::new("loglaw", cfg.echo());
    let terminated: Vec<(u64, usize)> = trials
        .iter()
        .enumerate()
        .filter_map(|(i, t)| match t {
            Trial::Terminated { digits } => Some((i as u64, *digits)),
            Trial::Rungs(_) => None,
        })
        .collect();
    for (i, digits) in &terminated {
        report.note(format!("trial {i}: rational, expansion terminated after {digits} digits; excluded"));
    }
    let rungs: Vec<&Vec<(u32, f64)>> = trials
        .iter()
        .filter_map(|t| match t {
            Trial::Rungs(r) => Some(r),
            Trial::Terminated { .. } => None,
        })
        .collect();
    let lnq = (q as f64).ln();
    let limit = 1.0 / lnq;
    report.set("trials_used", rungs.len());
    report.set("trials_terminated", terminated.len());
    report.set("limit_one_over_delta", limit);
    report.note(
        "proxy: M_N and L_N over finite digit ladders stand in for the limsup of h(t)/log t; \
         the acceptance bands are engineering choices, no rate of convergence is known",
    );

    let mut table = Table::new(
        "ladder",
        &["N", "log_q_N", "mean_M", "median_M", "M_within_band", "median_L", "mean_L", "median_L_times_ln_q"],
    );
    let mut medians = Vec::new();
    let mut m_bad = Vec::new();
    if !rungs.is_empty() {
        for (j, &n) in cfg.ladder.iter().enumerate() {
            let ms: Vec<f64> = rungs.iter().map(|r| r[j].0 as f64).collect();
            let ls: Vec<f64> = rungs.iter().map(|r| r[j].1).collect();
            let log_n = (n as f64).ln() / lnq;
            let mean_m = mean(&ms);
            let ok = (mean_m - log_n).abs() <= M_BAND;
            if !ok {
                m_bad.push(n);
            }
            let med_l = median(&ls);
            medians.push(med_l);
            table.push(vec![
                json!(n),
                json!(log_n),
                json!(mean_m),
                json!(median(&ms)),
                json!(ok),
                json!(med_l),
                json!(mean(&ls)),
                json!(med_l * lnq),
            ]);
        }
    }
    report.tables.push(table);
    if medians.is_empty() {
        report.check("trials available", false, "every trial terminated");
        return Ok(report);
    }
    report.check(
        "mean M_N within log_q N +- 2",
        m_bad.is_empty(),
        if m_bad.is_empty() { "all rungs".to_string() } else { format!("outside band at N = {m_bad:?}") },
    );
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    report.check("median L_N decreasing along the ladder", decreasing, format!("medians {medians:?}"));
    let last = *medians.last().expect("nonempty");
    let (lo, hi) = (L_BAND.0 * limit, L_BAND.1 * limit);
    report.check(
        "last median L_N within [0.8, 1.6]/ln q",
        (lo..=hi).contains(&last),
        format!("{last} against [{lo}, {hi}]"),
    );
    Ok(report)
}
