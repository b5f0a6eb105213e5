//! `chebmark` command line: CSV for sampled curves, JSON (sorted keys) for
//! reports.
//!
//! Exit codes: 0 success, 1 a check failed, 2 invalid input,
//! 3 quantization failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::Error;
use crate::extremal_fraction::{
    build_extremal, markov_constant, PoleConfiguration, DEFAULT_QUANTIZATION_TOL,
};
use crate::harmonic_measure::{band_measures, combined_density, parse_pole_list, pole_density, PolePoint};
use crate::interval_system::IntervalSystem;
use crate::rational_class::DEFAULT_SAMPLING_BUDGET;
use crate::verify::{
    batch_verify, default_fixtures, reproduce_corollary, reproduce_remark_m4, reproduce_rusak_remark,
    BatchConfig, Fixture, DEFAULT_GRID, POINTWISE_TOL,
};

pub const TOL_ENV: &str = "CHEBMARK_DEFAULT_TOL";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_QUANTIZATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "chebmark",
    version,
    about = "Sharp Markov-type bounds for rational fractions on several intervals"
)]
struct Cli {
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SystemArgs {
    /// Increasing band endpoints, e.g. "-1,-0.5,0.5,1".
    #[arg(long, allow_hyphen_values = true)]
    intervals: String,
}

#[derive(Debug, Args)]
struct PoleArgs {
    /// Pole literals: "inf", reals, "a+bi"; complex poles in conjugate pairs.
    #[arg(long, alias = "pole", allow_hyphen_values = true)]
    poles: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Harmonic-measure density on band grids (CSV x,density).
    Density {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        poles: PoleArgs,
        /// Total number of interior sample points, split across bands.
        #[arg(long, default_value_t = 201)]
        grid: usize,
    },
    /// Band measures of every pole and the quantization residuals.
    Measure {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        poles: PoleArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Construct m_n and report its structure (JSON).
    Extremal {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        poles: PoleArgs,
        #[arg(long, default_value_t = DEFAULT_QUANTIZATION_TOL)]
        quantization_tol: f64,
    },
    /// Sharp pointwise bound profile on E (CSV x,bound).
    Bound {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        poles: PoleArgs,
        /// Total number of sample points, split across bands.
        #[arg(long, default_value_t = 201)]
        grid: usize,
    },
    /// Check the bounds on sampled star-class fractions (JSON reports).
    Verify(VerifyArgs),
    /// Reproduce a closed-form example (JSON).
    Reproduce {
        #[command(subcommand)]
        which: Reproduction,
    },
    /// Parameter sweep (CSV).
    Scan {
        #[arg(long, value_enum)]
        param: ScanParam,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        /// Number of points, endpoints included.
        #[arg(long)]
        steps: usize,
    },
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    /// Defaults to $CHEBMARK_DEFAULT_TOL, else 1e-7.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLING_BUDGET)]
    budget: usize,
    /// Replace the built-in fixtures by a single one (needs --poles).
    #[arg(long, allow_hyphen_values = true, requires = "poles")]
    intervals: Option<String>,
    #[arg(long, alias = "pole", allow_hyphen_values = true, requires = "intervals")]
    poles: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Reproduction {
    /// |T_3'(a)| against |m_4'(a)| on [-1,-a] ∪ [a,1].
    M4 {
        #[arg(long, default_value = "0.05,0.1,0.15,0.2,0.3,0.5")]
        a: String,
    },
    /// Endpoint bound failure for poles inside the unit disk.
    Rusak,
    /// Markov constant on [-b,-a] ∪ [a,b].
    Corollary {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScanParam {
    /// Inner endpoint a of [-1,-a] ∪ [a,1].
    A,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_INVALID,
            Failure::Lib(e) => exit_code(e),
        }
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::QuantizationViolated { .. } => EXIT_QUANTIZATION,
        Error::NoConvergence { .. }
        | Error::NoSignChange { .. }
        | Error::SingularPeriodSystem
        | Error::ZeroCountMismatch { .. }
        | Error::ConvexityCheckFailed { .. }
        | Error::NumeratorResidualTooLarge(_)
        | Error::SamplingExhausted { .. } => EXIT_VIOLATION,
        _ => EXIT_INVALID,
    }
}

struct Output {
    text: String,
    code: i32,
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit status. Diagnostics go to standard error as one line.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let result = dispatch(cli.command).and_then(|out| {
        match &cli.out {
            Some(path) => std::fs::write(path, &out.text)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?,
            None => print!("{}", out.text),
        }
        Ok(out.code)
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            match &f {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Lib(e) => eprintln!("error: {e}"),
            }
            f.code()
        }
    }
}

fn dispatch(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Density { system, poles, grid } => density(&system, &poles, grid),
        Command::Measure {
            system,
            poles,
            format,
        } => measure(&system, &poles, format),
        Command::Extremal {
            system,
            poles,
            quantization_tol,
        } => extremal(&system, &poles, quantization_tol),
        Command::Bound { system, poles, grid } => bound(&system, &poles, grid),
        Command::Verify(args) => verify(&args),
        Command::Reproduce { which } => reproduce(which),
        Command::Scan {
            param,
            from,
            to,
            steps,
        } => scan(param, from, to, steps),
    }
}

fn ok(text: String) -> Result<Output, Failure> {
    Ok(Output { text, code: EXIT_OK })
}

fn checked(text: String, pass: bool) -> Result<Output, Failure> {
    Ok(Output {
        text,
        code: if pass { EXIT_OK } else { EXIT_VIOLATION },
    })
}

fn parse_system(args: &SystemArgs) -> Result<IntervalSystem, Failure> {
    Ok(args.intervals.parse::<IntervalSystem>()?)
}

fn parse_configuration(args: &PoleArgs) -> Result<PoleConfiguration, Failure> {
    Ok(args.poles.parse::<PoleConfiguration>()?)
}

fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable JSON value");
    s.push('\n');
    s
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(float).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

/// Splits `total` points across bands, earlier bands taking the remainder.
fn split(system: &IntervalSystem, total: usize) -> Vec<usize> {
    let l = system.band_count();
    (0..l).map(|k| total / l + usize::from(k < total % l)).collect()
}

fn interior_grid(system: &IntervalSystem, total: usize) -> Vec<f64> {
    system
        .bands()
        .zip(split(system, total))
        .flat_map(|((lo, hi), count)| {
            (0..count).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / count as f64)
        })
        .collect()
}

fn closed_grid(system: &IntervalSystem, total: usize) -> Vec<f64> {
    system
        .bands()
        .zip(split(system, total))
        .flat_map(|((lo, hi), count)| {
            (0..count).map(move |i| match (i, count) {
                (_, 1) => 0.5 * (lo + hi),
                (i, c) if i + 1 == c => hi,
                (i, c) => lo + (hi - lo) * i as f64 / (c - 1) as f64,
            })
        })
        .collect()
}

fn density(system: &SystemArgs, poles: &PoleArgs, grid: usize) -> Result<Output, Failure> {
    let system = parse_system(system)?;
    let poles = parse_pole_list(&poles.poles)?;
    let evaluator = match poles.as_slice() {
        [] => return Err(Failure::Usage("at least one pole is required".into())),
        [p] => pole_density(&system, p)?,
        many => combined_density(&system, many)?,
    };
    let xs = interior_grid(&system, grid);
    ok(csv(
        &["x", "density"],
        xs.into_iter().map(|x| vec![x, evaluator.density(x)]),
    ))
}

fn measure(system: &SystemArgs, poles: &PoleArgs, format: Format) -> Result<Output, Failure> {
    let system = parse_system(system)?;
    let poles: Vec<PolePoint> = parse_pole_list(&poles.poles)?;
    let per_pole = poles
        .iter()
        .map(|p| band_measures(&system, p).map(|m| m.values))
        .collect::<crate::Result<Vec<_>>>()?;
    let l = system.band_count();
    let sums: Vec<f64> = (0..l).map(|k| per_pole.iter().map(|m| m[k]).sum()).collect();
    if format == Format::Csv {
        let mut s = String::from("band_index,omega\n");
        for (k, omega) in sums.iter().enumerate() {
            let _ = writeln!(s, "{k},{}", float(*omega));
        }
        return ok(s);
    }
    let q: Vec<f64> = sums.iter().map(|s| (s / 2.0).round()).collect();
    let residuals: Vec<f64> = sums.iter().zip(&q).map(|(s, q)| s - 2.0 * q).collect();
    let quantized =
        residuals.iter().all(|r| r.abs() <= DEFAULT_QUANTIZATION_TOL) && q.iter().all(|&q| q >= 1.0);
    ok(to_json(&json!({
        "bands": system.bands().map(|(lo, hi)| [lo, hi]).collect::<Vec<_>>(),
        "poles": poles.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "measures": per_pole,
        "sums": sums,
        "total": sums.iter().sum::<f64>(),
        "q": q.iter().map(|&q| q as i64).collect::<Vec<_>>(),
        "residuals": residuals,
        "quantized": quantized,
    })))
}

fn extremal(system: &SystemArgs, poles: &PoleArgs, tol: f64) -> Result<Output, Failure> {
    let system = parse_system(system)?;
    let poles = parse_configuration(poles)?;
    let ef = crate::extremal_fraction::build_extremal_with_tol(&system, &poles, tol)?;
    let markov = markov_constant(&ef);
    if let Some(warning) = &markov.convexity_warning {
        eprintln!("warning: {warning}");
    }
    ok(to_json(&json!({
        "q": ef.signature().q,
        "zeros": ef.zeros(),
        "e_tilde": ef.e_tilde().iter().map(|&(lo, hi)| [lo, hi]).collect::<Vec<_>>(),
        "markov_constant": markov.value,
        "numerator_coeffs": ef.numerator(),
    })))
}

fn bound(system: &SystemArgs, poles: &PoleArgs, grid: usize) -> Result<Output, Failure> {
    let system = parse_system(system)?;
    let poles = parse_configuration(poles)?;
    let ef = build_extremal(&system, &poles)?;
    let rows = closed_grid(&system, grid)
        .into_iter()
        .map(|x| ef.bound_profile(x).map(|b| vec![x, b]))
        .collect::<crate::Result<Vec<_>>>()?;
    ok(csv(&["x", "bound"], rows.into_iter()))
}

fn default_tol() -> Result<f64, Failure> {
    match std::env::var(TOL_ENV) {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t >= 0.0)
            .ok_or_else(|| Failure::Usage(format!("{TOL_ENV}={s:?} is not a nonnegative number"))),
        Err(_) => Ok(POINTWISE_TOL),
    }
}

fn verify(args: &VerifyArgs) -> Result<Output, Failure> {
    let tol = match args.tol {
        Some(t) => t,
        None => default_tol()?,
    };
    let fixtures = match (&args.intervals, &args.poles) {
        (Some(intervals), Some(poles)) => vec![Fixture {
            name: "custom".to_string(),
            system: intervals.parse()?,
            poles: poles.parse()?,
        }],
        _ => default_fixtures(),
    };
    let config = BatchConfig {
        fixtures,
        samples: args.samples,
        seed: args.seed,
        epsilon: args.epsilon,
        grid: args.grid,
        tol,
        budget: args.budget,
    };
    let reports = batch_verify(&config)?;
    let pass = reports.iter().all(|r| r.pass || r.exploratory);
    let json: Vec<Value> = reports.iter().map(|r| r.to_json()).collect();
    checked(to_json(&Value::Array(json)), pass)
}

fn parse_floats(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("not a number: {t:?}")))
        })
        .collect()
}

fn reproduce(which: Reproduction) -> Result<Output, Failure> {
    match which {
        Reproduction::M4 { a } => {
            let report = reproduce_remark_m4(&parse_floats(&a)?)?;
            checked(to_json(&report.to_json()), report.pass)
        }
        Reproduction::Rusak => {
            let report = reproduce_rusak_remark();
            checked(to_json(&report.to_json()), report.pass)
        }
        Reproduction::Corollary { a, b, n } => {
            let report = reproduce_corollary(a, b, n)?;
            checked(to_json(&report.to_json()), report.pass)
        }
    }
}

fn scan(param: ScanParam, from: f64, to: f64, steps: usize) -> Result<Output, Failure> {
    if steps == 0 {
        return Err(Failure::Usage("--steps must be positive".into()));
    }
    let values: Vec<f64> = (0..steps)
        .map(|i| match i {
            0 => from,
            i if i + 1 == steps => to,
            i => from + (to - from) * i as f64 / (steps - 1) as f64,
        })
        .collect();
    match param {
        ScanParam::A => {
            let report = reproduce_remark_m4(&values)?;
            ok(csv(
                &["a", "t3_prime", "m4_prime", "m4_prime_numeric", "margin"],
                report
                    .rows
                    .iter()
                    .map(|r| vec![r.a, r.t3_prime, r.m4_prime, r.m4_prime_numeric, r.margin]),
            ))
        }
    }
}
