//! Command-line front end for the `geocycle` binary.
//!
//! Every command prints JSON (or CSV for `sample`) and maps its outcome to an
//! exit code: 0 success, 1 checked-false, 2 input error, 3 numerical failure.

use crate::beautify::{self, Target};
use crate::curve::{enclosed_area, Curve};
use crate::design::{verify_design, wce_double_integral, wce_moments, DESIGN_TOLERANCE};
use crate::error::Error;
use crate::families::{FamilyCurve, FamilyDocument, FamilySpec};
use crate::mz::{build_mz_cycle, mz_test, LpNorm, DEFAULT_CN};
use crate::optimizer::{minimize, OptimizerConfig};
use crate::quadrature::QuadratureSpec;
use crate::sphere::{CycleDocument, GeodesicCycle};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "geocycle", version, about = "Spherical t-design curves and Marcinkiewicz-Zygmund cycles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the t-design identity on all monomials of degree <= t.
    Verify {
        /// Cycle JSON, family JSON, or a family string such as "geo-tetra:a=0.47367".
        #[arg(long)]
        curve: String,
        #[arg(long)]
        t: u32,
        #[arg(long, default_value_t = DESIGN_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Worst-case quadrature error ||L||_t on S^2.
    Wce {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value_t = WceMethod::Moments)]
        method: WceMethod,
    },
    /// Minimize ||L||_t^2 over the control points of a geodesic cycle.
    Optimize {
        /// Initial cycle: a geodesic family, "platonic:<solid>", or cycle JSON.
        #[arg(long)]
        init: String,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Standard deviation of a tangential perturbation of the start.
        #[arg(long, default_value_t = 0.0)]
        perturbation: f64,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Final cycle JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV trace "iter,objective".
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Solve a beautification equation and print the certified root.
    Beautify {
        #[arg(long)]
        target: String,
    },
    /// Marcinkiewicz-Zygmund cycle construction and testing.
    Mz {
        #[command(subcommand)]
        command: MzCommand,
    },
    /// Export points and speed at uniform parameters as CSV "s,x0,...,speed".
    Sample {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalized area enclosed by a closed curve on S^2.
    Area {
        #[arg(long)]
        curve: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum MzCommand {
    /// Build the cycle for degree t from an equal-area partition.
    Build {
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = DEFAULT_CN)]
        cn: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical L^p norm ratios of random polynomials along a cycle.
    Test {
        #[arg(long)]
        cycle: PathBuf,
        #[arg(long)]
        t: usize,
        /// 1, 2, any p > 1, or inf.
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WceMethod {
    Moments,
    DoubleIntegral,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch { .. }
            | Error::DimensionTooSmall(_)
            | Error::Degenerate
            | Error::Antipodal
            | Error::TooFewPoints(_)
            | Error::ParameterOutOfRange(_)
            | Error::MissingAcceleration
            | Error::Parse(_) => EXIT_INPUT,
            Error::ZeroLength
            | Error::QuadratureNonConvergence { .. }
            | Error::NotADesign { .. }
            | Error::NoBracket(_)
            | Error::SolverFailure(_)
            | Error::Graph(_) => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = std::result::Result<i32, CliError>;

/// A curve given on the command line.
#[derive(Debug, Clone)]
pub enum LoadedCurve {
    Cycle(GeodesicCycle),
    Family(FamilySpec, FamilyCurve),
}

impl LoadedCurve {
    pub fn as_curve(&self) -> Curve<'_> {
        match self {
            LoadedCurve::Cycle(c) => Curve::Geodesic(c),
            LoadedCurve::Family(_, f) => f.as_curve(),
        }
    }

    pub fn geodesic(&self) -> Option<&GeodesicCycle> {
        match self {
            LoadedCurve::Cycle(c) => Some(c),
            LoadedCurve::Family(_, f) => f.geodesic(),
        }
    }
}

/// Parses a curve argument: a path to cycle or family JSON, or a family string.
pub fn load_curve(arg: &str) -> std::result::Result<LoadedCurve, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{arg}: {e}")))?;
        return parse_curve_json(&text).map_err(|e| CliError {
            code: e.code,
            message: format!("{arg}: {}", e.message),
        });
    }
    if arg.trim_start().starts_with('{') {
        return parse_curve_json(arg);
    }
    let spec: FamilySpec = arg.parse()?;
    let curve = spec.build()?;
    Ok(LoadedCurve::Family(spec, curve))
}

fn parse_curve_json(text: &str) -> std::result::Result<LoadedCurve, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::input(format!("invalid JSON: {e}")))?;
    if value.get("control_points").is_some() {
        let doc: CycleDocument =
            serde_json::from_value(value).map_err(|e| CliError::input(format!("invalid cycle document: {e}")))?;
        Ok(LoadedCurve::Cycle(GeodesicCycle::try_from(doc)?))
    } else if value.get("family").is_some() {
        let doc: FamilyDocument =
            serde_json::from_value(value).map_err(|e| CliError::input(format!("invalid family document: {e}")))?;
        let spec = FamilySpec::try_from(doc)?;
        let curve = spec.build()?;
        Ok(LoadedCurve::Family(spec, curve))
    } else {
        Err(CliError::input("JSON must contain either \"control_points\" or \"family\""))
    }
}

fn write_file(path: &Path, contents: &str) -> std::result::Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable report")
}

/// Prints JSON to stdout and, when requested, also writes it to `out`.
fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> std::result::Result<(), CliError> {
    let text = to_json(value);
    if let Some(path) = out {
        write_file(path, &(text.clone() + "\n"))?;
    }
    print_stdout(&(text + "\n"))
}

/// Writes to stdout, treating a closed pipe as success.
fn print_stdout(text: &str) -> std::result::Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::input(e.to_string())),
        _ => Ok(()),
    }
}

fn quadrature() -> std::result::Result<QuadratureSpec, CliError> {
    Ok(QuadratureSpec::from_env()?)
}

pub fn execute(cli: Cli) -> CliResult {
    match cli.command {
        Command::Verify { curve, t, tol, out } => {
            let quad = quadrature()?;
            let loaded = load_curve(&curve)?;
            let report = verify_design(loaded.as_curve(), t, tol, &quad)?;
            emit(&report, out.as_deref())?;
            Ok(if report.is_design { EXIT_OK } else { EXIT_FALSE })
        }
        Command::Wce { curve, t, method } => {
            let quad = quadrature()?;
            let loaded = load_curve(&curve)?;
            let wce = match method {
                WceMethod::Moments => wce_moments(loaded.as_curve(), t, &quad)?,
                WceMethod::DoubleIntegral => {
                    let cycle = loaded
                        .geodesic()
                        .ok_or_else(|| CliError::input("the double-integral oracle needs a geodesic cycle"))?;
                    wce_double_integral(cycle, t)?
                }
            };
            let method = match method {
                WceMethod::Moments => "moments",
                WceMethod::DoubleIntegral => "double-integral",
            };
            emit(&json!({"t": t, "method": method, "wce": wce, "wce_squared": wce * wce}), None)?;
            Ok(EXIT_OK)
        }
        Command::Optimize {
            init,
            t,
            seed,
            perturbation,
            max_iters,
            out,
            trace,
        } => {
            let loaded = load_curve(&init)?;
            let cycle = loaded
                .geodesic()
                .ok_or_else(|| CliError::input("optimize needs a geodesic starting cycle"))?;
            let mut config = OptimizerConfig {
                seed,
                perturbation,
                ..OptimizerConfig::default()
            };
            if let Some(m) = max_iters {
                config.max_iters = m;
            }
            let result = minimize(cycle.control_points(), t, &config)?;
            let final_cycle = result.final_cycle()?;
            if let Some(path) = &out {
                write_file(path, &(to_json(&final_cycle) + "\n"))?;
            }
            if let Some(path) = &trace {
                let mut buf = Vec::new();
                result.write_csv(&mut buf).expect("writing to memory");
                write_file(path, &String::from_utf8(buf).expect("ascii csv"))?;
            }
            emit(
                &json!({
                    "t": t,
                    "seed": seed,
                    "converged": result.converged,
                    "stop_reason": result.stop_reason,
                    "iterations": result.iterations,
                    "final_objective": result.final_objective,
                    "final_grad_norm": result.final_grad_norm,
                    "cycle": final_cycle,
                }),
                None,
            )?;
            Ok(if result.converged { EXIT_OK } else { EXIT_FALSE })
        }
        Command::Beautify { target } => {
            let target: Target = target.parse()?;
            let root = beautify::solve(target)?;
            emit(&root, None)?;
            Ok(EXIT_OK)
        }
        Command::Mz { command } => match command {
            MzCommand::Build { t, cn, out } => {
                let built = build_mz_cycle(t, cn)?;
                if let Some(path) = &out {
                    write_file(path, &(to_json(&built.cycle) + "\n"))?;
                }
                emit(&built, None)?;
                Ok(EXIT_OK)
            }
            MzCommand::Test {
                cycle,
                t,
                p,
                samples,
                seed,
                out,
            } => {
                let p: LpNorm = p.parse()?;
                let text = fs::read_to_string(&cycle).map_err(|e| CliError::input(format!("{}: {e}", cycle.display())))?;
                let cycle = match parse_curve_json(&text)? {
                    LoadedCurve::Cycle(c) => c,
                    LoadedCurve::Family(_, f) => f
                        .geodesic()
                        .cloned()
                        .ok_or_else(|| CliError::input("mz test needs a geodesic cycle"))?,
                };
                let report = mz_test(&cycle, t, p, samples, seed)?;
                emit(&report, out.as_deref())?;
                Ok(EXIT_OK)
            }
        },
        Command::Sample { curve, count, out } => {
            if count < 2 {
                return Err(CliError::input("count must be at least 2"));
            }
            let loaded = load_curve(&curve)?;
            let view = loaded.as_curve();
            let dim = view.ambient_dim();
            let mut csv = String::from("s");
            for i in 0..dim {
                csv.push_str(&format!(",x{i}"));
            }
            csv.push_str(",speed\n");
            for k in 0..count {
                let s = k as f64 / (count - 1) as f64;
                let (p, speed) = view.sample(s);
                csv.push_str(&format!("{s}"));
                for x in p {
                    csv.push_str(&format!(",{x}"));
                }
                csv.push_str(&format!(",{speed}\n"));
            }
            match out {
                Some(path) => write_file(&path, &csv)?,
                None => print_stdout(&csv)?,
            }
            Ok(EXIT_OK)
        }
        Command::Area { curve } => {
            let quad = quadrature()?;
            let loaded = load_curve(&curve)?;
            let area = enclosed_area(loaded.as_curve(), &quad)?;
            emit(&json!({"area": area}), None)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
