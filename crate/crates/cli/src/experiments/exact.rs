//! Exact measure computations: shadow measures, quasi-independence ratios and
//! Borel–Cantelli partial sums.

use ffdioph_core::lab::{borel_cantelli_sums, quasi_independence_report, ratio_f64, shadow_measure_check};
use ffdioph_core::testfn::IntegralClass;
use serde_json::json;

use super::measure_json;
use crate::config::Config;
use crate::error::CliResult;
use crate::report::{Report, Table};

/// Sanity ceiling for the largest quasi-independence ratio.
pub const QI_CEILING: f64 = 10.0;
/// Band for the ratio of the partial sum to the partial integral.
pub const BC_BAND: (f64, f64) = (0.2, 5.0);

pub fn run_shadow(cfg: &Config) -> CliResult<Report> {
    let res = shadow_measure_check(&cfg.field, cfg.dmax, cfg.tmax, cfg.budget)?;
    let mut report = Report::new("shadow", cfg.echo());
    report.set("checked", res.checked);
    report.set("violations", res.violations.len());
    let mut table = Table::new("violations", &["p", "q", "t", "measure", "expected"]);
    for v in &res.violations {
        table.push(vec![
            json!(v.p.to_string()),
            json!(v.q.to_string()),
            json!(v.t),
            json!(v.measure.to_string()),
            json!(v.expected.to_string()),
        ]);
    }
    report.tables.push(table);
    report.check(
        "shadow measures equal q^-(2 deg Q + t)",
        res.violations.is_empty(),
        format!("{} shadows, {} violations", res.checked, res.violations.len()),
    );
    Ok(report)
}

pub fn run_quasi_independence(cfg: &Config) -> CliResult<Report> {
    let psi = cfg.phi.psi_from_phi()?;
    let res = quasi_independence_report(&cfg.spec, &psi, cfg.nmin, cfg.nmax, cfg.width, cfg.budget)?;
    let mut report = Report::new("quasi-independence", cfg.echo());
    let mut measures = Table::new("measures", &["n", "measure", "measure_decimal"]);
    for (n, m) in &res.measures {
        measures.push(vec![json!(n), json!(m.to_string()), json!(m.to_f64())]);
    }
    let mut pairs = Table::new("pairs", &["n", "m", "joint", "ratio", "ratio_decimal"]);
    for p in &res.pairs {
        pairs.push(vec![json!(p.n), json!(p.m), json!(p.joint.to_string()), json!(p.ratio.to_string()), json!(ratio_f64(&p.ratio))]);
    }
    report.tables.push(measures);
    report.tables.push(pairs);
    for n in &res.empty {
        report.note(format!("EmptyWindow({n}): mu(A_{n}) = 0, left out of the ratio table"));
    }
    report.set("empty_windows", res.empty.clone());
    match res.max() {
        Some(max) => {
            let v = ratio_f64(&max.ratio);
            report.set("max_ratio", max.ratio.to_string());
            report.set("max_ratio_decimal", v);
            report.set("max_pair", vec![max.n, max.m]);
            report.check(
                "max quasi-independence ratio below 10",
                v < QI_CEILING,
                format!("max {} at ({}, {})", max.ratio, max.n, max.m),
            );
        }
        None => report.note("no pair of nonempty windows in range"),
    }
    Ok(report)
}

pub fn run_borel_cantelli(cfg: &Config) -> CliResult<Report> {
    let psi = cfg.phi.psi_from_phi()?;
    let rows = borel_cantelli_sums(&cfg.spec, &psi, cfg.nmax, cfg.width, cfg.budget)?;
    let mut report = Report::new("borel-cantelli", cfg.echo());
    let mut table = Table::new("sums", &["n", "measure", "cumulative", "cumulative_decimal", "integral_to", "integral", "ratio"]);
    for r in &rows {
        table.push(vec![
            json!(r.n),
            json!(r.measure.to_string()),
            json!(r.cumulative.to_string()),
            json!(r.cumulative.to_f64()),
            json!((r.n + 1) * cfg.width),
            json!(r.integral),
            json!(r.ratio()),
        ]);
    }
    report.tables.push(table);
    let verdict = match psi.classify()? {
        IntegralClass::Diverges => "diverges",
        IntegralClass::Converges => "converges",
    };
    report.set("integral_psi_delta", verdict);
    let last = rows.last().expect("n_max >= 0");
    report.set("sum", measure_json(&last.cumulative));
    report.set("integral", last.integral);
    report.set("ratio", last.ratio());
    report.check(
        "sum over integral within [1/5, 5]",
        (BC_BAND.0..=BC_BAND.1).contains(&last.ratio()),
        format!("ratio {} at n = {}", last.ratio(), last.n),
    );
    Ok(report)
}
