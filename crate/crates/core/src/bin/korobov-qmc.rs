//! `korobov-qmc`: build composite Korobov rules, verify exponential-sum
//! bounds, estimate worst-case errors and run convergence experiments.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
//! 3 capacity error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use korobov_qmc::config::{parse_density_constant, Defaults};
use korobov_qmc::exposums::{BoundMode, BoxRadius, VerifyRequest};
use korobov_qmc::primes::{is_prime, sieve_primes};
use korobov_qmc::{
    calibrate_density, composite_point_set, convergence_experiment, info_complexity_bound,
    verify_bounds, wce_truncated, wce_upper, Error, IntegrandSpec, KorobovFamily, ScanOptions,
    WceSweepRow,
};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAPACITY: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "korobov-qmc",
    version,
    about = "Composite Korobov p-set QMC rules"
)]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Density constant c_P (default 1/5, or $KOROBOV_QMC_CP).
    #[arg(long = "cp", global = true, value_parser = parse_cp)]
    c_p: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Export a composite point set as text.
    Pointset(PointsetArgs),
    /// Check exponential-sum bounds over a frequency box.
    Verify(VerifyArgs),
    /// Two-sided worst-case error estimate with the upper bounds.
    Wce(WceArgs),
    /// Upper bound on the information complexity N(eps, d).
    Complexity(ComplexityArgs),
    /// QMC errors of a test integrand against the error bound.
    Converge(ConvergeArgs),
    /// Scan the prime band density up to a limit.
    Calibrate(CalibrateArgs),
}

#[derive(Args, Debug, Serialize)]
struct PointsetArgs {
    #[arg(long, value_parser = parse_family)]
    family: KorobovFamily,
    #[arg(long = "M")]
    #[serde(rename = "M")]
    m: u64,
    #[arg(long)]
    d: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
enum ModeArg {
    #[value(name = "lemma")]
    Lemma,
    #[value(name = "corollary_cP", alias = "corollary_cp")]
    CorollaryCp,
    #[value(name = "corollary_exact")]
    CorollaryExact,
}

impl From<ModeArg> for BoundMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Lemma => BoundMode::Lemma,
            ModeArg::CorollaryCp => BoundMode::CorollaryDensity,
            ModeArg::CorollaryExact => BoundMode::CorollaryExact,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, value_parser = parse_family)]
    family: KorobovFamily,
    /// Primes for lemma mode: a range `a..b` (primes in [a, b]) or a list.
    #[arg(long)]
    p: Option<String>,
    /// Band parameters for the composite modes, comma separated.
    #[arg(long = "M", value_delimiter = ',')]
    #[serde(rename = "M")]
    m: Vec<u64>,
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<usize>,
    /// Box radius, or `exhaustive` for K = p (lemma) or K = M.
    #[arg(long = "K")]
    #[serde(rename = "K")]
    k: Option<String>,
    /// Sample size used when the box is larger.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
struct WceArgs {
    #[arg(long, value_parser = parse_family)]
    family: KorobovFamily,
    #[arg(long = "M", value_delimiter = ',', required = true)]
    #[serde(rename = "M")]
    m: Vec<u64>,
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<usize>,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    k: Option<u64>,
    /// Sample this many frequencies when the box exceeds the scan budget.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct ComplexityArgs {
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    d: usize,
}

#[derive(Args, Debug, Serialize)]
struct ConvergeArgs {
    #[arg(long, value_parser = parse_family)]
    family: KorobovFamily,
    #[arg(long)]
    d: usize,
    #[arg(long = "M", value_delimiter = ',', required = true)]
    #[serde(rename = "M")]
    m: Vec<u64>,
    /// JSON integrand description.
    #[arg(long)]
    integrand: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct CalibrateArgs {
    #[arg(long = "m-max")]
    m_max: Option<u64>,
}

fn parse_family(s: &str) -> Result<KorobovFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_cp(s: &str) -> Result<f64, String> {
    parse_density_constant(s).map_err(|e| e.to_string())
}

/// Everything a report depends on.
#[derive(Serialize)]
struct RunConfig<'a, A: Serialize> {
    subcommand: &'a str,
    settings: Defaults,
    args: &'a A,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Lib(Error::Json(e))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Lib(Error::Csv(e))
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Capacity(_) => ExitCode::from(EXIT_CAPACITY),
                _ => ExitCode::from(EXIT_USAGE),
            }
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    let mut defaults = Defaults::from_env()?;
    if let Some(c) = cli.c_p {
        defaults.c_p = c;
    }
    let out = cli.output.as_deref();
    match &cli.command {
        Command::Pointset(a) => cmd_pointset(a, defaults, out),
        Command::Verify(a) => cmd_verify(a, defaults, out),
        Command::Wce(a) => cmd_wce(a, defaults, out),
        Command::Complexity(a) => cmd_complexity(a, defaults, out),
        Command::Converge(a) => cmd_converge(a, defaults, out),
        Command::Calibrate(a) => cmd_calibrate(a, defaults, out),
    }
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), Failure> {
    let mut w = open_output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Non-JSON outputs carry their configuration in `<output>.meta.json`.
fn write_sidecar<A: Serialize>(path: Option<&Path>, config: &RunConfig<A>) -> Result<(), Failure> {
    if let Some(p) = path {
        let mut name = p.as_os_str().to_owned();
        name.push(".meta.json");
        write_json(Some(Path::new(&name)), config)?;
    }
    Ok(())
}

fn cmd_pointset(a: &PointsetArgs, defaults: Defaults, out: Option<&Path>) -> CmdResult {
    let cps = composite_point_set(a.family, a.m, a.d)?;
    let mut w = open_output(out)?;
    cps.write_text(&mut w)?;
    w.flush()?;
    write_sidecar(
        out,
        &RunConfig {
            subcommand: "pointset",
            settings: defaults,
            args: a,
        },
    )?;
    Ok(0)
}

fn parse_prime_list(spec: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::Usage(format!("cannot parse prime list {spec:?}"));
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        if hi < 2 || lo > hi {
            return Err(Failure::Usage(format!("empty prime range {spec:?}")));
        }
        return Ok(sieve_primes(hi)?.into_iter().filter(|&p| p >= lo).collect());
    }
    let mut out = Vec::new();
    for part in spec.split(',') {
        let p: u64 = part.trim().parse().map_err(|_| bad())?;
        if !is_prime(p) {
            return Err(Failure::Usage(format!("{p} is not prime")));
        }
        out.push(p);
    }
    Ok(out)
}

#[derive(Serialize)]
struct Report<'a, A: Serialize, R: Serialize> {
    config: RunConfig<'a, A>,
    #[serde(flatten)]
    result: R,
}

fn cmd_verify(a: &VerifyArgs, defaults: Defaults, out: Option<&Path>) -> CmdResult {
    let mode = BoundMode::from(a.mode);
    let parameters = match mode {
        BoundMode::Lemma => {
            if !a.m.is_empty() {
                return Err(Failure::Usage("lemma mode takes --p, not --M".into()));
            }
            let spec =
                a.p.as_deref()
                    .ok_or_else(|| Failure::Usage("lemma mode needs --p".into()))?;
            parse_prime_list(spec)?
        }
        _ => {
            if a.p.is_some() {
                return Err(Failure::Usage("composite modes take --M, not --p".into()));
            }
            if a.m.is_empty() {
                return Err(Failure::Usage("composite modes need --M".into()));
            }
            a.m.clone()
        }
    };
    let radius = match a.k.as_deref() {
        None => BoxRadius::Fixed(defaults.box_radius),
        Some("exhaustive") => BoxRadius::Parameter,
        Some(s) => BoxRadius::Fixed(s.parse().map_err(|_| {
            Failure::Usage(format!("--K expects an integer or `exhaustive`, got {s:?}"))
        })?),
    };
    let req = VerifyRequest {
        family: a.family,
        mode,
        parameters,
        dims: a.d.clone(),
        radius,
        sample: a.sample,
        seed: a.seed,
        c_p: defaults.c_p,
    };
    let report = verify_bounds(&req)?;
    let passed = report.passed;
    write_json(
        out,
        &Report {
            config: RunConfig {
                subcommand: "verify",
                settings: defaults,
                args: a,
            },
            result: report,
        },
    )?;
    Ok(if passed { 0 } else { EXIT_VERIFY_FAILED })
}

#[derive(Serialize)]
struct WceResult {
    estimate: korobov_qmc::WceEstimate,
    bounds: korobov_qmc::WceBounds,
}

fn cmd_wce(a: &WceArgs, defaults: Defaults, out: Option<&Path>) -> CmdResult {
    let radius = a.k.unwrap_or(defaults.box_radius);
    let opts = ScanOptions {
        sample: a.sample.map(|n| (n, a.seed)),
        ..ScanOptions::default()
    };
    let mut results = Vec::new();
    for &m in &a.m {
        for &d in &a.d {
            let cps = composite_point_set(a.family, m, d)?;
            let estimate = wce_truncated(&cps, radius, opts)?;
            let bounds = wce_upper(a.family, m, d, defaults.c_p)?;
            results.push(WceResult { estimate, bounds });
        }
    }
    let config = RunConfig {
        subcommand: "wce",
        settings: defaults,
        args: a,
    };
    match a.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Results {
                results: Vec<WceResult>,
            }
            write_json(
                out,
                &Report {
                    config,
                    result: Results { results },
                },
            )?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(open_output(out)?);
            for r in &results {
                w.serialize(WceSweepRow::new(&r.estimate, &r.bounds))?;
            }
            w.flush()?;
            write_sidecar(out, &config)?;
        }
    }
    Ok(0)
}

fn cmd_complexity(a: &ComplexityArgs, defaults: Defaults, out: Option<&Path>) -> CmdResult {
    let n = info_complexity_bound(a.eps, a.d, defaults.c_p)?;
    match out {
        None => println!("{n}"),
        Some(_) => {
            #[derive(Serialize)]
            struct Complexity {
                #[serde(rename = "N")]
                n: u64,
            }
            write_json(
                out,
                &Report {
                    config: RunConfig {
                        subcommand: "complexity",
                        settings: defaults,
                        args: a,
                    },
                    result: Complexity { n },
                },
            )?;
        }
    }
    Ok(0)
}

fn cmd_converge(a: &ConvergeArgs, defaults: Defaults, out: Option<&Path>) -> CmdResult {
    let spec = IntegrandSpec::from_path(&a.integrand)?;
    let f = spec.build()?;
    if korobov_qmc::Integrand::dim(&f) != a.d {
        return Err(Failure::Usage(format!(
            "integrand has dimension {}, --d is {}",
            korobov_qmc::Integrand::dim(&f),
            a.d
        )));
    }
    let norm = f.norm()?;
    let rows = convergence_experiment(a.family, a.d, &a.m, &f, f.integral(), norm, defaults.c_p)?;
    let mut w = csv::Writer::from_writer(open_output(out)?);
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    #[derive(Serialize)]
    struct ConvergeConfig<'a> {
        #[serde(flatten)]
        args: &'a ConvergeArgs,
        integrand_spec: &'a IntegrandSpec,
    }
    let args = ConvergeConfig {
        args: a,
        integrand_spec: &spec,
    };
    write_sidecar(
        out,
        &RunConfig {
            subcommand: "converge",
            settings: defaults,
            args: &args,
        },
    )?;
    Ok(0)
}

fn cmd_calibrate(a: &CalibrateArgs, defaults: Defaults, out: Option<&Path>) -> CmdResult {
    let report = calibrate_density(a.m_max.unwrap_or(defaults.m_max))?;
    write_json(
        out,
        &Report {
            config: RunConfig {
                subcommand: "calibrate",
                settings: defaults,
                args: a,
            },
            result: report,
        },
    )?;
    Ok(0)
}
