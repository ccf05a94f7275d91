//! Command-line grammar and the resolved experiment configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ffdioph_core::field::prime_power;
use ffdioph_core::orbit::{OrbitSpec, DEFAULT_BUDGET};
use ffdioph_core::testfn::{Side, TestFunction};
use ffdioph_core::Field;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "ffdioph", version, about = "Diophantine approximation experiments in F_q((1/X))")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment and emit its report.
    Experiment(ExperimentArgs),
    /// Continued fraction of a rational function or of a random series.
    Cf(CfArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentKind {
    Khintchine,
    Loglaw,
    DigitStats,
    Counting,
    Shadow,
    QuasiIndependence,
    BorelCantelli,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Khintchine => "khintchine",
            ExperimentKind::Loglaw => "loglaw",
            ExperimentKind::DigitStats => "digit-stats",
            ExperimentKind::Counting => "counting",
            ExperimentKind::Shadow => "shadow",
            ExperimentKind::QuasiIndependence => "quasi-independence",
            ExperimentKind::BorelCantelli => "borel-cantelli",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    /// Field order, a prime power up to 65536 (default 2).
    #[arg(long)]
    pub q: Option<u32>,
    /// Characteristic; use with --e.
    #[arg(long)]
    pub p: Option<u32>,
    /// Extension degree over F_p.
    #[arg(long)]
    pub e: Option<u32>,
    /// Modulus coefficients, constant term first, e.g. `1,1,1` for X^2+X+1.
    #[arg(long)]
    pub modulus: Option<String>,
}

impl FieldArgs {
    pub fn field(&self) -> CliResult<Field> {
        let modulus = self
            .modulus
            .as_deref()
            .map(|m| {
                m.split(',')
                    .map(|c| c.trim().parse::<u32>().map_err(|_| CliError::Usage(format!("bad modulus coefficient {c:?}"))))
                    .collect::<CliResult<Vec<u32>>>()
            })
            .transpose()?;
        let (p, e) = match (self.q, self.p, self.e) {
            (q, Some(p), e) => {
                let e = e.unwrap_or(1);
                if let Some(q) = q {
                    if (p as u64).checked_pow(e) != Some(q as u64) {
                        return Err(CliError::Usage(format!("--q {q} does not match --p {p} --e {e}")));
                    }
                }
                (p, e)
            }
            (_, None, Some(_)) => return Err(CliError::Usage("--e needs --p".into())),
            (q, None, None) => {
                let q = q.unwrap_or(2);
                prime_power(q).ok_or_else(|| CliError::Usage(format!("{q} is not a prime power")))?
            }
        };
        Ok(Field::new(p, e, modulus.as_deref())?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub kind: ExperimentKind,
    #[command(flatten)]
    pub field: FieldArgs,
    /// Congruence modulus Q0 of the subgroup, e.g. `1`, `X`, `X^2+1`.
    #[arg(long, default_value = "1")]
    pub q0: String,
    /// Test function: `preset:NAME` (divlog, convlog2, power, const-half) or
    /// `custom:C=..,a=..,b=..[,lambda=..][,t0=..][,cap=0|1]`.
    #[arg(long, default_value = "preset:divlog")]
    pub phi: String,
    /// Number of Monte-Carlo trials.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Largest denominator degree.
    #[arg(long)]
    pub dmax: Option<usize>,
    /// Digits per trial.
    #[arg(long)]
    pub digits: Option<usize>,
    /// Digit counts N at which the log-law statistics are read.
    #[arg(long, value_delimiter = ',')]
    pub ladder: Option<Vec<usize>>,
    /// Initial series precision (coefficients).
    #[arg(long)]
    pub prec: Option<i64>,
    /// Master seed; trial i uses stream i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// First window index.
    #[arg(long)]
    pub nmin: Option<u64>,
    /// Last window index, or the largest distance for growth counts.
    #[arg(long)]
    pub nmax: Option<u64>,
    /// Largest distance for parabolic growth counts.
    #[arg(long, default_value_t = 12)]
    pub pmax: u64,
    /// Largest shadow shrink parameter.
    #[arg(long, default_value_t = 4)]
    pub tmax: u32,
    /// Window width N in depth units.
    #[arg(long, default_value_t = 2)]
    pub width: u64,
    /// Cap on enumerated items.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads (0 or unset: one per core). Does not affect the report.
    #[arg(long, env = "FFDIOPH_WORKERS")]
    pub workers: Option<usize>,
    /// Exit with status 3 if any report check fails.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CfFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CfArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// `P/Q` with each side in list form (`1,1,1/0,1`) or as text (`X^2+X+1/X`).
    #[arg(long, conflicts_with = "seed")]
    pub rational: Option<String>,
    /// Expand the random series with this seed instead.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Digit cap.
    #[arg(long, default_value_t = 64)]
    pub digits: usize,
    /// Precision for random series.
    #[arg(long, default_value_t = 256)]
    pub prec: i64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: CfFormat,
}

/// Parses `preset:NAME`, a bare preset name, or `custom:key=value,...`.
pub fn parse_phi(text: &str, q: u32) -> CliResult<TestFunction> {
    if let Some(body) = text.strip_prefix("custom:") {
        let (mut c, mut lambda, mut a, mut b, mut t0, mut cap) = (1.0, 0.0, 0.0, 0.0, q as f64, true);
        for item in body.split(',').filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("expected key=value, got {item:?}")))?;
            let num = || value.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad number {value:?} for {key}")));
            match key.trim() {
                "C" | "c" => c = num()?,
                "lambda" => lambda = num()?,
                "a" => a = num()?,
                "b" => b = num()?,
                "t0" => t0 = num()?,
                "cap" => cap = num()? != 0.0,
                other => return Err(CliError::Usage(format!("unknown test-function parameter {other:?}"))),
            }
        }
        return Ok(TestFunction::new(Side::Phi, q, c, lambda, a, b, t0, cap)?);
    }
    let name = text.strip_prefix("preset:").unwrap_or(text);
    Ok(TestFunction::preset(name, q)?)
}

/// A fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub kind: ExperimentKind,
    pub field: Field,
    pub spec: OrbitSpec,
    pub phi_text: String,
    pub phi: TestFunction,
    pub seed: u64,
    pub trials: u64,
    pub dmax: usize,
    pub digits: usize,
    pub ladder: Vec<usize>,
    pub prec: Option<i64>,
    pub nmin: u64,
    pub nmax: u64,
    pub pmax: u64,
    pub tmax: u32,
    pub width: u64,
    pub budget: u128,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    pub check: bool,
}

impl Config {
    pub fn from_args(args: &ExperimentArgs) -> CliResult<Config> {
        use ExperimentKind::*;
        let field = args.field.field()?;
        let spec = OrbitSpec::parse(&field, &args.q0)?;
        let phi = parse_phi(&args.phi, field.q())?;
        let kind = args.kind;
        let trials = args.trials.unwrap_or(match kind {
            DigitStats => 100,
            _ => 1000,
        });
        if trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        let dmax = args.dmax.unwrap_or(match kind {
            Khintchine => 200,
            Counting => 5,
            _ => 4,
        });
        let (nmin, nmax) = match kind {
            Counting => (0, args.nmax.unwrap_or(4)),
            BorelCantelli => (0, args.nmax.unwrap_or(8)),
            _ => (args.nmin.unwrap_or(2), args.nmax.unwrap_or(8)),
        };
        if nmin > nmax {
            return Err(CliError::Usage(format!("--nmin {nmin} exceeds --nmax {nmax}")));
        }
        if args.width < 2 {
            return Err(CliError::Usage("--width must be at least 2".into()));
        }
        let ladder = args.ladder.clone().unwrap_or_else(|| vec![1 << 8, 1 << 10, 1 << 11, 1 << 14]);
        if ladder.is_empty() || ladder.windows(2).any(|w| w[0] >= w[1]) || ladder[0] < 2 {
            return Err(CliError::Usage("--ladder must be increasing and start at 2 or more".into()));
        }
        if let Some(p) = args.prec {
            let floor = 2 * dmax as i64 + 3;
            if kind == Khintchine && p < floor {
                return Err(CliError::Usage(format!("--prec {p} is below 2*dmax+3 = {floor}")));
            }
        }
        Ok(Config {
            kind,
            field,
            spec,
            phi_text: args.phi.clone(),
            phi,
            seed: args.seed,
            trials,
            dmax,
            digits: args.digits.unwrap_or(1000),
            ladder,
            prec: args.prec,
            nmin,
            nmax,
            pmax: args.pmax,
            tmax: args.tmax,
            width: args.width,
            budget: args.budget,
            format: args.format,
            output: args.output.clone(),
            workers: args.workers,
            check: args.check,
        })
    }

    /// The configuration as echoed in reports; worker count and output path
    /// are left out so that reports do not depend on them.
    pub fn echo(&self) -> Value {
        json!({
            "experiment": self.kind.name(),
            "q": self.field.q(),
            "p": self.field.p(),
            "e": self.field.e(),
            "modulus": self.field.modulus(),
            "q0": self.spec.q0().to_string(),
            "phi": self.phi_text,
            "phi_params": self.phi.describe(),
            "seed": self.seed,
            "trials": self.trials,
            "dmax": self.dmax,
            "digits": self.digits,
            "ladder": self.ladder,
            "prec": self.prec,
            "nmin": self.nmin,
            "nmax": self.nmax,
            "pmax": self.pmax,
            "tmax": self.tmax,
            "width": self.width,
            "budget": self.budget.to_string(),
        })
    }
}
