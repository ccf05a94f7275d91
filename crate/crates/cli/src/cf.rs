//! The `cf` subcommand.

use ffdioph_core::contfrac::{cf_expand, CfStatus};
use ffdioph_core::{Poly, SeriesSource};
use serde_json::json;

use crate::config::{CfArgs, CfFormat};
use crate::error::{CliError, CliResult};

/// Splits `P/Q` at the last `/` and parses both sides.
pub fn parse_rational(field: &ffdioph_core::Field, text: &str) -> CliResult<(Poly, Poly)> {
    let (p, q) = text
        .rsplit_once('/')
        .ok_or_else(|| CliError::Usage(format!("expected P/Q, got {text:?}")))?;
    Ok((Poly::parse(field, p)?, Poly::parse(field, q)?))
}

pub fn run(args: &CfArgs) -> CliResult<String> {
    let field = args.field.field()?;
    let mut source = match (&args.rational, args.seed) {
        (Some(text), _) => {
            let (p, q) = parse_rational(&field, text)?;
            SeriesSource::rational(&p, &q)?
        }
        (None, Some(seed)) => {
            let mut s = SeriesSource::random(&field, seed, 0);
            s.ensure(args.prec)?;
            s
        }
        (None, None) => return Err(CliError::Usage("cf needs --rational or --seed".into())),
    };
    let exp = cf_expand(&mut source, args.digits);
    let digits: Vec<String> = exp.digits.iter().map(|d| d.to_string()).collect();
    let listing = match digits.split_first() {
        Some((a0, rest)) if !rest.is_empty() => format!("[{a0}; {}]", rest.join(", ")),
        Some((a0, _)) => format!("[{a0}]"),
        None => "[]".to_string(),
    };
    let status = match exp.status {
        CfStatus::TerminatedRational => "terminated",
        CfStatus::PrecisionExhausted => "precision-exhausted",
        CfStatus::MaxDigitsReached => "max-digits",
    };
    Ok(match args.format {
        CfFormat::Text => format!("{listing}\n"),
        CfFormat::Json => {
            let convergents: Vec<_> = exp.convergents.iter().map(|(p, q)| json!([p.to_string(), q.to_string()])).collect();
            let v = json!({
                "q": field.q(),
                "digits": digits,
                "convergents": convergents,
                "status": status,
                "prec": exp.prec,
            });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
        }
    })
}
