//! Orbit counts by depth window, ball counts in the group and in its upper
//! triangular subgroup, and fitted exponential growth rates.

use ffdioph_core::orbit::{
    group_ball_count, log_slope, orbit_count_window, orbit_count_window_enumerated, parabolic_ball_count,
    parabolic_ball_count_enumerated, to_f64,
};
use ffdioph_core::Error;
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::config::Config;
use crate::error::CliResult;
use crate::report::{Report, Table};

/// Tolerance on the fitted group growth rate around `δ = ln q`.
pub const GROUP_SLOPE_TOL: f64 = 0.5;
/// Tolerance on the fitted parabolic growth rate around `δ/2`.
pub const PARABOLIC_SLOPE_TOL: f64 = 0.2;

pub fn run(cfg: &Config) -> CliResult<Report> {
    let q = cfg.field.q();
    let delta = (q as f64).ln();
    let mut report = Report::new("counting", cfg.echo());
    let full_group = cfg.spec.q0().is_one();

    // windows [2d, 2d + 2)
    let mut windows = Table::new("windows", &["d", "depth_lo", "count", "enumerated", "q_pow_2d_times_1_minus_1_over_q", "ratio_to_q_pow_2d"]);
    let (mut mismatches, mut formula_bad) = (Vec::new(), Vec::new());
    let mut c3: f64 = 1.0;
    for d in 1..=cfg.dmax as u64 {
        let count = orbit_count_window(&cfg.spec, 2 * d, 2)?;
        let enumerated = match orbit_count_window_enumerated(&cfg.spec, 2 * d, 2, cfg.budget) {
            Ok(n) => {
                if n != count {
                    mismatches.push(d);
                }
                json!(n.to_string())
            }
            Err(Error::BudgetExceeded { .. }) => Value::Null,
            Err(e) => return Err(e.into()),
        };
        let formula = if full_group {
            let qb = BigUint::from(q);
            let f = qb.pow(2 * d as u32 - 1) * (q - 1);
            if f != count {
                formula_bad.push(d);
            }
            json!(f.to_string())
        } else {
            Value::Null
        };
        let ratio = to_f64(&count) / (q as f64).powi(2 * d as i32);
        if ratio > 0.0 {
            c3 = c3.max(ratio).max(1.0 / ratio);
        }
        windows.push(vec![json!(d), json!(2 * d), json!(count.to_string()), enumerated, formula, json!(ratio)]);
    }
    report.tables.push(windows);
    report.set("c3", c3);
    report.check(
        "window counts equal enumeration",
        mismatches.is_empty(),
        if mismatches.is_empty() { "all enumerated windows agree".into() } else { format!("mismatch at d = {mismatches:?}") },
    );
    if full_group {
        report.check(
            "window counts equal q^(2d)(1-1/q)",
            formula_bad.is_empty(),
            if formula_bad.is_empty() { "all windows".into() } else { format!("mismatch at d = {formula_bad:?}") },
        );
    }
    report.check("c3 finite over the range", c3.is_finite(), format!("c3 = {c3}"));

    // group balls, even radii only: odd radii repeat the previous count
    let mut group = Table::new("group_balls", &["n", "count", "ratio_to_exp_n_delta"]);
    let mut points = Vec::new();
    let mut ratios = Vec::new();
    for n in (0..=cfg.nmax).step_by(2) {
        let count = group_ball_count(&cfg.field, n, cfg.budget)?;
        let c = to_f64(&count);
        let ratio = c / (n as f64 * delta).exp();
        ratios.push(ratio);
        points.push((n as f64, c));
        group.push(vec![json!(n), json!(count.to_string()), json!(ratio)]);
    }
    report.tables.push(group);
    let slope = log_slope(&points);
    report.set("group_slope", slope);
    report.set("delta", delta);
    report.set("c1", ratios.iter().copied().fold(f64::INFINITY, f64::min));
    report.set("c2", ratios.iter().copied().fold(0.0, f64::max));
    match slope {
        Some(s) => report.check(
            "group growth rate within delta +- 0.5",
            (s - delta).abs() <= GROUP_SLOPE_TOL,
            format!("slope {s} against delta {delta}"),
        ),
        None => report.note("group growth rate needs at least two radii"),
    }

    let mut parabolic = Table::new("parabolic_balls", &["n", "count", "enumerated", "ratio_to_exp_n_delta_over_2"]);
    let mut points = Vec::new();
    let mut bad = Vec::new();
    for n in 0..=cfg.pmax {
        let count = parabolic_ball_count(&cfg.field, n);
        let enumerated = match parabolic_ball_count_enumerated(&cfg.field, n, cfg.budget) {
            Ok(e) => {
                if e != count {
                    bad.push(n);
                }
                json!(e.to_string())
            }
            Err(Error::BudgetExceeded { .. }) => Value::Null,
            Err(e) => return Err(e.into()),
        };
        let c = to_f64(&count);
        points.push((n as f64, c));
        parabolic.push(vec![json!(n), json!(count.to_string()), enumerated, json!(c / (n as f64 * delta / 2.0).exp())]);
    }
    report.tables.push(parabolic);
    report.check(
        "parabolic counts equal (q-1)q^(n/2+1)",
        bad.is_empty(),
        if bad.is_empty() { "all radii".into() } else { format!("mismatch at n = {bad:?}") },
    );
    let slope = log_slope(&points);
    report.set("parabolic_slope", slope);
    if let Some(s) = slope {
        report.check(
            "parabolic growth rate within delta/2 +- 0.2",
            (s - delta / 2.0).abs() <= PARABOLIC_SLOPE_TOL,
            format!("slope {s} against delta/2 {}", delta / 2.0),
        );
    }
    Ok(report)
}
