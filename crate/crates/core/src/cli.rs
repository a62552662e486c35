//! Command-line front end.
//!
//! Subcommands:
//!
//! * `list` prints the benchmark ids with their domains and parameter
//!   defaults.
//! * `solve` writes an error table (`x,t,approx,exact,abs_error`).
//! * `convergence` writes the maximum absolute error per time level and
//!   the rate between consecutive levels (`t,mae,rate`).
//! * `plotdata` writes one CSV per time level on a dense grid for external
//!   plotting.
//!
//! Grids are given either as a comma-separated list or as an inclusive
//! `start:stop:step` range. Flags override values read with `--config`,
//! a flat file of `key = value` lines.
//!
//! Exit status: 0 on success, 2 for usage or configuration errors, 3 when
//! the solver fails, 4 for I/O errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::error::OafmError;
use crate::evaluation::{self, CoefficientSchedule, ConvergenceRow, ErrorTableRow};
use crate::pde_core::{ProblemSpec, SolveConfig};
use crate::problems::{self, round_grid, ProblemParams, PROBLEM_IDS};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_IO: u8 = 4;

const DEFAULT_PLOT_POINTS: usize = 201;
const DEFAULT_PLOT_DIR: &str = "plotdata";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("solver failed: {0}")]
    Solver(#[source] OafmError),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Md,
}

#[derive(Parser, Debug)]
#[command(name = "oafm", version, about = "Galerkin OAFM benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List benchmark problems
    List,
    /// Error table at the requested time levels
    Solve(RunArgs),
    /// Maximum absolute error and convergence rate per time level
    Convergence(RunArgs),
    /// Dense-grid CSVs for plotting, one file per time level
    Plotdata(PlotArgs),
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Problem id (see `list`)
    #[arg(long)]
    problem: Option<String>,
    /// Time levels: `a,b,c` or `start:stop:step`
    #[arg(long)]
    t: Option<String>,
    /// Spatial points: `a,b,c` or `start:stop:step`
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Gauss–Legendre points [default: 32]
    #[arg(long)]
    quad_order: Option<usize>,
    /// Newton tolerance on the Galerkin residual [default: 1e-12]
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (a directory for `plotdata`); standard output if absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reynolds number (shock)
    #[arg(long)]
    re: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    /// Solve the coefficients once at this time level and reuse them
    #[arg(long)]
    fit_t: Option<f64>,
    /// Burgers–Fisher with the sign of the linearized advection coupling
    /// flipped
    #[arg(long)]
    flip_coupling: bool,
    /// Flat `key = value` file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Grid points across the domain [default: 201]
    #[arg(long)]
    points: Option<usize>,
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub ts: Vec<f64>,
    /// `None` selects the problem's default grid.
    pub xs: Option<Vec<f64>>,
    pub quad_order: usize,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub params: ProblemParams,
    pub fit_t: Option<f64>,
    pub points: usize,
}

impl RunConfig {
    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            quad_order: self.quad_order,
            newton_tol: self.tol,
            ..SolveConfig::default()
        }
    }

    pub fn schedule(&self) -> CoefficientSchedule {
        match self.fit_t {
            Some(t) => CoefficientSchedule::Frozen(t),
            None => CoefficientSchedule::PerTime,
        }
    }
}

/// Entry point shared by the binary and the tests. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::List => emit(&cmd_list(), None, out),
        Command::Solve(args) => {
            let cfg = resolve(args, None)?;
            let text = cmd_solve(&cfg)?;
            emit(&text, cfg.out.as_deref(), out)
        }
        Command::Convergence(args) => {
            let cfg = resolve(args, None)?;
            let text = cmd_convergence(&cfg)?;
            emit(&text, cfg.out.as_deref(), out)
        }
        Command::Plotdata(args) => {
            let cfg = resolve(args.run, args.points)?;
            let dir = cfg
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(DEFAULT_PLOT_DIR));
            for path in cmd_plotdata(&cfg, &dir)? {
                writeln!(out, "{}", path.display()).map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?;
            }
            Ok(())
        }
    }
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => out
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

/// One line per problem, alphabetical.
pub fn cmd_list() -> String {
    let mut text = String::new();
    for id in PROBLEM_IDS {
        let problem = problems::by_id(id, &ProblemParams::default()).expect("default parameters");
        let params: Vec<String> = problem
            .params()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        let params = if params.is_empty() {
            "-".to_string()
        } else {
            params.join(" ")
        };
        let _ = writeln!(
            text,
            "{id:<16}x in {:<10} {params}",
            problem.domain().to_string()
        );
    }
    text
}

fn build_problem(cfg: &RunConfig) -> Result<ProblemSpec, CliError> {
    let problem = problems::by_id(&cfg.problem, &cfg.params).map_err(|e| usage(e.to_string()))?;
    if problem.exact().is_none() {
        return Err(usage(
            OafmError::MissingExactSolution(cfg.problem.clone()).to_string(),
        ));
    }
    Ok(problem)
}

fn x_grid(cfg: &RunConfig, problem: &ProblemSpec) -> Result<Vec<f64>, CliError> {
    let xs = cfg
        .xs
        .clone()
        .unwrap_or_else(|| problems::default_x_grid(&cfg.problem));
    for &x in &xs {
        problem
            .domain()
            .check(x)
            .map_err(|e| usage(e.to_string()))?;
    }
    Ok(xs)
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<String, CliError> {
    let problem = build_problem(cfg)?;
    let xs = x_grid(cfg, &problem)?;
    let rows =
        evaluation::error_table_with(&problem, &cfg.ts, &xs, &cfg.solve_config(), cfg.schedule())
            .map_err(CliError::Solver)?;
    Ok(match cfg.format {
        Format::Csv => error_table_csv(&rows),
        Format::Md => error_table_md(&rows, &cfg.ts, &xs),
    })
}

pub fn cmd_convergence(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.ts.len() < 2 {
        return Err(usage("convergence needs at least two time levels"));
    }
    let problem = build_problem(cfg)?;
    let xs = x_grid(cfg, &problem)?;
    let rows =
        evaluation::convergence_table(&problem, &cfg.ts, &xs, &cfg.solve_config(), cfg.schedule())
            .map_err(CliError::Solver)?;
    Ok(match cfg.format {
        Format::Csv => convergence_csv(&rows),
        Format::Md => convergence_md(&rows),
    })
}

/// Writes `{problem}_t{t}.csv` into `dir` for every time level and returns
/// the paths in order.
pub fn cmd_plotdata(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if cfg.format == Format::Md {
        return Err(usage("plotdata only writes csv"));
    }
    if cfg.points < 2 && cfg.xs.is_none() {
        return Err(usage("plotdata needs at least two grid points"));
    }
    let problem = build_problem(cfg)?;
    let xs = match &cfg.xs {
        Some(_) => x_grid(cfg, &problem)?,
        None => problem.domain().linspace(cfg.points),
    };
    let rows =
        evaluation::error_table_with(&problem, &cfg.ts, &xs, &cfg.solve_config(), cfg.schedule())
            .map_err(CliError::Solver)?;

    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths = Vec::with_capacity(cfg.ts.len());
    for (t, chunk) in cfg.ts.iter().zip(rows.chunks(xs.len())) {
        let path = dir.join(format!("{}_t{t}.csv", cfg.problem));
        let text = csv_text(
            &["x", "exact", "approx", "abs_error"],
            chunk.iter().map(|r| {
                vec![
                    fmt_num(r.x),
                    fmt_num(r.exact),
                    fmt_num(r.approx),
                    fmt_num(r.abs_error),
                ]
            }),
        );
        fs::write(&path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        paths.push(path);
    }
    Ok(paths)
}

/// Shortest representation that parses back to the same `f64`.
fn fmt_num(v: f64) -> String {
    format!("{v:e}")
}

/// Eight significant digits.
fn fmt_sig8(v: f64) -> String {
    format!("{v:.7e}")
}

fn csv_text(header: &[&str], records: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    // Writing into a Vec cannot fail.
    w.write_record(header).expect("in-memory write");
    for rec in records {
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn error_table_csv(rows: &[ErrorTableRow]) -> String {
    csv_text(
        &["x", "t", "approx", "exact", "abs_error"],
        rows.iter().map(|r| {
            vec![
                fmt_num(r.x),
                fmt_num(r.t),
                fmt_num(r.approx),
                fmt_num(r.exact),
                fmt_num(r.abs_error),
            ]
        }),
    )
}

/// Rows are x values; each time level contributes an approximation and an
/// absolute-error column.
pub fn error_table_md(rows: &[ErrorTableRow], ts: &[f64], xs: &[f64]) -> String {
    let mut text = String::from("| x |");
    for t in ts {
        let _ = write!(text, " approx (t={t}) | AE (t={t}) |");
    }
    text.push_str("\n|---|");
    text.push_str(&"---|---|".repeat(ts.len()));
    text.push('\n');
    for (i, x) in xs.iter().enumerate() {
        let _ = write!(text, "| {x} |");
        for k in 0..ts.len() {
            let r = &rows[k * xs.len() + i];
            let _ = write!(
                text,
                " {} | {} |",
                fmt_sig8(r.approx),
                fmt_sig8(r.abs_error)
            );
        }
        text.push('\n');
    }
    text
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    csv_text(
        &["t", "mae", "rate"],
        rows.iter().map(|r| {
            vec![
                fmt_num(r.t),
                fmt_num(r.mae),
                r.rate.map(fmt_num).unwrap_or_default(),
            ]
        }),
    )
}

pub fn convergence_md(rows: &[ConvergenceRow]) -> String {
    let mut text = String::from("| t | MAE | rate |\n|---|---|---|\n");
    for r in rows {
        let rate = r
            .rate
            .map(|v| format!("{v:.4}"))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(text, "| {} | {} | {rate} |", r.t, fmt_sig8(r.mae));
    }
    text
}

/// Parses `a,b,c` or the inclusive range `start:stop:step`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(usage("empty grid"));
    }
    let num = |s: &str| -> Result<f64, CliError> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| usage(format!("not a number: `{}`", s.trim())))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(usage(format!("not a finite number: `{}`", s.trim())))
        }
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(usage(format!("range `{spec}` must be start:stop:step")));
        };
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if step <= 0.0 {
            return Err(usage(format!("range `{spec}`: step must be positive")));
        }
        if start > stop {
            return Err(usage(format!("range `{spec}`: start exceeds stop")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        if count > 1_000_000 {
            return Err(usage(format!("range `{spec}` has too many points")));
        }
        Ok((0..=count)
            .map(|i| round_grid(start + i as f64 * step))
            .collect())
    } else {
        spec.split(',').map(num).collect()
    }
}

fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_text(&text)
}

/// `key = value` per line; `#` starts a comment. Keys accept `-` or `_`.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    const KEYS: [&str; 14] = [
        "problem",
        "t",
        "x",
        "quad-order",
        "tol",
        "format",
        "out",
        "re",
        "alpha",
        "beta",
        "omega",
        "fit-t",
        "flip-coupling",
        "points",
    ];
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(usage(format!(
                "config line {}: expected `key = value`",
                lineno + 1
            )));
        };
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(usage(format!(
                "config line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn resolve(args: RunArgs, points: Option<usize>) -> Result<RunConfig, CliError> {
    let file = match &args.config {
        Some(path) => parse_config_file(path)?,
        None => BTreeMap::new(),
    };
    let from_file = |key: &str| file.get(key).map(String::as_str);
    fn parsed<V: std::str::FromStr>(key: &str, raw: Option<&str>) -> Result<Option<V>, CliError> {
        raw.map(|s| {
            s.parse()
                .map_err(|_| usage(format!("config: invalid value `{s}` for `{key}`")))
        })
        .transpose()
    }

    let problem = args
        .problem
        .or_else(|| from_file("problem").map(String::from))
        .ok_or_else(|| usage("missing --problem"))?;
    if !PROBLEM_IDS.contains(&problem.as_str()) {
        return Err(usage(format!(
            "unknown problem `{problem}` (expected one of {})",
            PROBLEM_IDS.join(", ")
        )));
    }

    let t_spec = args
        .t
        .or_else(|| from_file("t").map(String::from))
        .ok_or_else(|| usage("missing --t"))?;
    let ts = parse_grid(&t_spec)?;
    if let Some(t) = ts.iter().find(|t| **t < 0.0) {
        return Err(usage(format!("time levels must be non-negative, got {t}")));
    }
    let xs = match args.x.or_else(|| from_file("x").map(String::from)) {
        Some(spec) => Some(parse_grid(&spec)?),
        None => None,
    };

    let format = match args.format {
        Some(f) => f,
        None => match from_file("format") {
            Some(s) => Format::from_str(s, true)
                .map_err(|_| usage(format!("config: invalid format `{s}`")))?,
            None => Format::Csv,
        },
    };

    let defaults = ProblemParams::default();
    let flip_coupling = args.flip_coupling
        || parsed::<bool>("flip-coupling", from_file("flip-coupling"))?.unwrap_or(false);
    let params = ProblemParams {
        re: args
            .re
            .or(parsed("re", from_file("re"))?)
            .unwrap_or(defaults.re),
        alpha: args
            .alpha
            .or(parsed("alpha", from_file("alpha"))?)
            .unwrap_or(defaults.alpha),
        beta: args
            .beta
            .or(parsed("beta", from_file("beta"))?)
            .unwrap_or(defaults.beta),
        omega: args
            .omega
            .or(parsed("omega", from_file("omega"))?)
            .unwrap_or(defaults.omega),
        flip_coupling,
    };

    let solve_defaults = SolveConfig::default();
    let cfg = RunConfig {
        problem,
        ts,
        xs,
        quad_order: args
            .quad_order
            .or(parsed("quad-order", from_file("quad-order"))?)
            .unwrap_or(solve_defaults.quad_order),
        tol: args
            .tol
            .or(parsed("tol", from_file("tol"))?)
            .unwrap_or(solve_defaults.newton_tol),
        format,
        out: args.out.or_else(|| from_file("out").map(PathBuf::from)),
        params,
        fit_t: args.fit_t.or(parsed("fit-t", from_file("fit-t"))?),
        points: points
            .or(parsed("points", from_file("points"))?)
            .unwrap_or(DEFAULT_PLOT_POINTS),
    };
    cfg.solve_config()
        .validate()
        .map_err(|e| usage(e.to_string()))?;
    if let Some(t) = cfg.fit_t {
        if !(t.is_finite() && t >= 0.0) {
            return Err(usage(format!("--fit-t must be non-negative, got {t}")));
        }
    }
    Ok(cfg)
}
