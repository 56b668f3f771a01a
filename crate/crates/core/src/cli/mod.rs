//! Command-line front end. Exit codes: 0 success, 2 usage or parse error,
//! 3 physics-domain error, 4 inconsistency between a violation and its
//! entanglement witnesses.

mod spec;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cfrd::{cfrd_evaluate, mode_transform, verify_implication, CfrdReport, QuadratureSettings, Verification};
use crate::error::Error;
use crate::fock::{partial_transpose_min_eig, PartialTransposeResult};
use crate::modeset::ModeSet;
use crate::moments::{build_moment_matrix, find_negative_minor, MinorReport, DEFAULT_MAX_MINOR, DEFAULT_ORDER};
use crate::search::{
    default_alpha_grid, geometric_grid, optimize_settings, scan_cat_family, scan_number_cat, ScanRow,
    SettingsSearchSpec,
};

pub use spec::{SpecError, State, StateSpecDocument};

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "CVBELL_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PHYSICS: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "cvbell", version, about = "CFRD Bell tests, moment matrices and partial transposes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the CFRD functional at fixed settings.
    Eval {
        state: PathBuf,
        #[command(flatten)]
        settings: SettingsArgs,
    },
    /// Evaluate and check that a violation comes with the expected negativity.
    Verify {
        state: PathBuf,
        #[command(flatten)]
        settings: SettingsArgs,
        #[arg(long, value_enum, default_value = "on")]
        pt_oracle: Switch,
    },
    /// Search the moment matrix for a negative principal minor.
    Minors {
        state: PathBuf,
        /// Bit k selects mode k.
        #[arg(long)]
        bipartition: u64,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_MINOR)]
        max_size: usize,
        /// Frame angles; the default is the plain mode operators.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        theta: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        delta: Option<Vec<f64>>,
    },
    /// Smallest eigenvalue of the partial transpose of a dense state.
    PartialTranspose {
        state: PathBuf,
        #[arg(long)]
        bipartition: u64,
    },
    /// Best ratio per mode count over a state family, as CSV.
    Scan {
        #[arg(long, value_enum, default_value = "cat")]
        family: Family,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// `LO:HI:POINTS`, geometric in |α|.
        #[arg(long, value_parser = parse_grid)]
        alpha_grid: Option<Grid>,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sign: i8,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximize the violation over settings.
    Optimize {
        state: PathBuf,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluation cap per simplex run.
        #[arg(long, default_value_t = 2000)]
        max_evals: usize,
        /// Include the all-equal sign patterns.
        #[arg(long)]
        diagnostics: bool,
    },
}

#[derive(Debug, Args)]
pub struct SettingsArgs {
    /// Comma-separated; zeros when absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Option<Vec<f64>>,
    /// Comma-separated; zeros when absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub delta: Option<Vec<f64>>,
    /// Comma-separated signs, each 1 or -1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub s: Vec<i8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Cat,
    NumberCat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    lo: f64,
    hi: f64,
    points: usize,
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, points] = parts[..] else {
        return Err("expected LO:HI:POINTS".into());
    };
    let lo: f64 = lo.parse().map_err(|e| format!("LO: {e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("HI: {e}"))?;
    let points: usize = points.parse().map_err(|e| format!("POINTS: {e}"))?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || points == 0 {
        return Err("need 0 < LO <= HI and POINTS >= 1".into());
    }
    Ok(Grid { lo, hi, points })
}

/// Envelope of every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument<T> {
    pub schema_version: u32,
    pub command: String,
    pub result: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinorsResult {
    pub bipartition: ModeSet,
    pub order: usize,
    pub dimension: usize,
    pub max_size: usize,
    pub notice: Option<String>,
    pub negative_minor: Option<MinorReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub report: CfrdReport,
    pub evaluations: usize,
    pub truncated: bool,
    pub restarts: usize,
    pub seed: u64,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Physics(Error),
    /// Carries the report so it can still be printed.
    Inconsistent { message: String, document: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Physics(_) => EXIT_PHYSICS,
            CliError::Inconsistent { .. } => EXIT_INCONSISTENT,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Physics(e) => write!(f, "{e}"),
            CliError::Inconsistent { message, .. } => write!(f, "inconsistent result: {message}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Physics(e)
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        match e {
            SpecError::Malformed(m) => CliError::Usage(m),
            SpecError::Physics(e) => CliError::Physics(e),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn load_state(path: &Path) -> Result<State, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(StateSpecDocument::parse(&text)?.build()?)
}

fn list_or_zeros(name: &str, v: &Option<Vec<f64>>, n: usize) -> Result<Vec<f64>, CliError> {
    match v {
        None => Ok(vec![0.0; n]),
        Some(v) if v.len() == n => Ok(v.clone()),
        Some(v) => Err(usage(format!("--{name} has {} entries for {n} modes", v.len()))),
    }
}

fn settings_for(args: &SettingsArgs, n: usize) -> Result<QuadratureSettings, CliError> {
    if args.s.len() != n {
        return Err(usage(format!("--s has {} entries for {n} modes", args.s.len())));
    }
    if let Some(x) = args.s.iter().find(|x| x.abs() != 1) {
        return Err(usage(format!("--s entries must be 1 or -1, got {x}")));
    }
    let theta = list_or_zeros("theta", &args.theta, n)?;
    let delta = list_or_zeros("delta", &args.delta, n)?;
    Ok(QuadratureSettings::new(theta, delta, args.s.clone())?)
}

fn json<T: Serialize>(command: &str, result: T) -> Result<String, CliError> {
    let doc = ReportDocument {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        result,
    };
    serde_json::to_string_pretty(&doc).map_err(|e| usage(format!("serialization failed: {e}")))
}

pub fn scan_csv(rows: &[ScanRow], family: Family) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| usage(format!("csv: {e}"));
    match family {
        Family::Cat => {
            w.write_record(["n", "alpha_re", "alpha_im", "lhs", "rhs", "ratio", "beta"]).map_err(io)?;
            for r in rows {
                let a = r.alpha.unwrap_or_default();
                w.serialize((r.n, a.re, a.im, r.lhs, r.rhs, r.ratio, r.beta)).map_err(io)?;
            }
        }
        Family::NumberCat => {
            w.write_record(["n", "split", "lhs", "rhs", "ratio", "beta"]).map_err(io)?;
            for r in rows {
                w.serialize((r.n, r.split, r.lhs, r.rhs, r.ratio, r.beta)).map_err(io)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| usage(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| usage(e.to_string()))
}

/// Runs one command and returns what it prints on standard output.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Eval { state, settings } => {
            let st = load_state(state)?;
            let s = settings_for(settings, st.n_modes())?;
            json("eval", cfrd_evaluate(st.source(), &s)?)
        }
        Command::Verify {
            state,
            settings,
            pt_oracle,
        } => {
            let st = load_state(state)?;
            let s = settings_for(settings, st.n_modes())?;
            let v: Verification = verify_implication(st.source(), &s, *pt_oracle == Switch::On)?;
            let out = json("verify", &v)?;
            if !v.consistent {
                return Err(CliError::Inconsistent {
                    message: format!(
                        "beta = {} with minor_d = {} and pt_min_eig = {:?}",
                        v.report.beta, v.report.minor_d, v.pt_min_eig
                    ),
                    document: out,
                });
            }
            Ok(out)
        }
        Command::Minors {
            state,
            bipartition,
            order,
            max_size,
            theta,
            delta,
        } => {
            let st = load_state(state)?;
            let n = st.n_modes();
            let part = ModeSet::from_mask(*bipartition);
            if !part.fits(n) {
                return Err(usage(format!("bipartition mask {bipartition:#b} names modes beyond {n}")));
            }
            if *max_size == 0 {
                return Err(usage("--max-size must be at least 1"));
            }
            let notice = part
                .is_trivial(n)
                .then(|| "trivial bipartition: this is the state-positivity matrix, never expected to have a negative minor".to_string());
            if let Some(msg) = &notice {
                eprintln!("notice: {msg}");
            }
            let s: Vec<i8> = (0..n).map(|k| if part.contains(k) { -1 } else { 1 }).collect();
            let frame = QuadratureSettings::new(list_or_zeros("theta", theta, n)?, list_or_zeros("delta", delta, n)?, s)?;
            let matrix = build_moment_matrix(st.source(), part, &mode_transform(&frame), *order)?;
            let found = find_negative_minor(&matrix, *max_size)?;
            json(
                "minors",
                MinorsResult {
                    bipartition: part,
                    order: *order,
                    dimension: matrix.dim(),
                    max_size: *max_size,
                    notice,
                    negative_minor: found,
                },
            )
        }
        Command::PartialTranspose { state, bipartition } => {
            let st = load_state(state)?;
            let State::Dense(dense) = &st else {
                return Err(usage("partial transposes need a dense state (give \"cutoff\")"));
            };
            let part = ModeSet::from_mask(*bipartition);
            let r: PartialTransposeResult = partial_transpose_min_eig(dense, part)?;
            json("partial-transpose", r)
        }
        Command::Scan {
            family,
            n_min,
            n_max,
            alpha_grid,
            sign,
            format,
            out,
        } => {
            if *n_min == 0 || n_min > n_max {
                return Err(usage(format!("bad mode range {n_min}..={n_max}")));
            }
            let rows = match family {
                Family::Cat => {
                    if sign.abs() != 1 {
                        return Err(usage(format!("--sign must be 1 or -1, got {sign}")));
                    }
                    let alphas: Vec<C64> = match alpha_grid {
                        Some(g) => geometric_grid(g.lo, g.hi, g.points),
                        None => default_alpha_grid(),
                    };
                    scan_cat_family(*n_min..=*n_max, &alphas, *sign)?
                }
                Family::NumberCat => {
                    if alpha_grid.is_some() {
                        return Err(usage("the number-cat family has no alpha grid"));
                    }
                    scan_number_cat(*n_min..=*n_max)?
                }
            };
            let text = match format {
                Format::Csv => scan_csv(&rows, *family)?,
                Format::Json => json("scan", &rows)?,
            };
            match out {
                Some(path) => {
                    std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Command::Optimize {
            state,
            restarts,
            seed,
            max_evals,
            diagnostics,
        } => {
            if *max_evals == 0 {
                return Err(usage("--max-evals must be positive"));
            }
            if *restarts == 0 {
                return Err(usage("--restarts must be at least 1"));
            }
            let st = load_state(state)?;
            let mut spec = SettingsSearchSpec::new(st.n_modes());
            spec.restarts = *restarts;
            spec.seed = *seed;
            spec.max_evals = *max_evals;
            spec.diagnostics = *diagnostics;
            let outcome = optimize_settings(st.source(), &spec)?;
            json(
                "optimize",
                OptimizeResult {
                    report: outcome.best,
                    evaluations: outcome.evaluations,
                    truncated: outcome.truncated,
                    restarts: *restarts,
                    seed: *seed,
                },
            )
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(format!("thread pool: {e}")))
}

/// Entry point of the binary; returns the process exit code.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match configure_threads().and_then(|()| execute(&cli)) {
        Ok(out) => {
            emit(&out);
            EXIT_OK
        }
        Err(e) => {
            if let CliError::Inconsistent { document, .. } = &e {
                emit(document);
            }
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: &str) {
    if out.is_empty() {
        return;
    }
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    if !out.ends_with('\n') {
        let _ = stdout.write_all(b"\n");
    }
}
