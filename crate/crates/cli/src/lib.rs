//! Command implementations behind the `rtsbst` binary.
//!
//! Each `cmd_*` function writes human-readable output to the given writer and
//! returns the process exit code. Errors map to codes through
//! [`CliError::exit_code`].

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rtsbst_core::search::{self, ParamSpec};
use rtsbst_core::table::{parse_table_unchecked, validate};
use rtsbst_core::{
    builtin, presets, Algorithm, Degree, MonitorAutomaton, MonitorError, ParameterizedInput,
    Problem, RequirementsTable, SaConfig, SearchConfig, SearchError, SignalShape, SimError,
    TableError, Trace, Verdict,
};
use serde::Serialize;
use thiserror::Error;

pub const EXIT_TC: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;
pub const EXIT_NFF: i32 = 10;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: String, source: TableError },
    #[error("{path}: invalid table ({} diagnostics)", .diagnostics.len())]
    Invalid {
        path: String,
        diagnostics: Vec<rtsbst_core::Diagnostic>,
    },
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Invalid { .. } => EXIT_INVALID,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Search(SearchError::InvalidConfig(_)) => EXIT_USAGE,
            _ => EXIT_RUNTIME,
        }
    }

    /// Writes the error, with one line per diagnostic for invalid tables.
    pub fn report(&self, err: &mut dyn Write) {
        let _ = writeln!(err, "error: {self}");
        if let CliError::Invalid { path, diagnostics } = self {
            for d in diagnostics {
                let _ = writeln!(err, "{path}: {d}");
            }
        }
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Parser)]
#[command(
    name = "rtsbst",
    version,
    about = "Requirements-table driven falsification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a requirements table.
    Check {
        /// Table file, or the name of a bundled table.
        file: String,
    },
    /// Monitor a recorded trace and report its fitness.
    Monitor {
        table: String,
        trace: PathBuf,
        /// Where to write the per-step degree CSV.
        #[arg(long, default_value = "degree_trace.csv")]
        degrees: PathBuf,
    },
    /// Search a built-in model for a requirement violation.
    Falsify(FalsifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    /// Uniform random sampling.
    Ur,
    /// Simulated annealing.
    Sa,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Ur => Algorithm::UniformRandom,
            AlgoArg::Sa => Algorithm::SimulatedAnnealing,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FalsifyArgs {
    /// Built-in model name.
    #[arg(long)]
    pub model: String,
    /// Table file, or the name of a bundled table.
    #[arg(long)]
    pub table: String,
    #[arg(long, value_enum, default_value = "ur")]
    pub algo: AlgoArg,
    #[arg(long, default_value_t = 1500)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Repeat with seeds `seed`, `seed + 1`, ...
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Input box as `name:lo:hi[:k]`, k discontinuities (default 1).
    #[arg(long = "input", value_name = "SPEC")]
    pub inputs: Vec<String>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Initial annealing temperature.
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Annealing cooling factor per iteration.
    #[arg(long)]
    pub cooling: Option<f64>,
    /// Annealing proposal std as a fraction of each range.
    #[arg(long)]
    pub scale: Option<f64>,
}

impl FalsifyArgs {
    pub fn new(model: &str, table: &str, out: impl Into<PathBuf>) -> Self {
        FalsifyArgs {
            model: model.into(),
            table: table.into(),
            algo: AlgoArg::Ur,
            budget: 1500,
            seed: 0,
            runs: 1,
            out: out.into(),
            inputs: Vec::new(),
            horizon: None,
            dt: None,
            temperature: None,
            cooling: None,
            scale: None,
        }
    }
}

/// Runs a parsed command line. Returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let res = match cli.command {
        Command::Check { file } => cmd_check(&file, out),
        Command::Monitor {
            table,
            trace,
            degrees,
        } => cmd_monitor(&table, &trace, &degrees, out),
        Command::Falsify(args) => cmd_falsify(&args, out),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            e.report(err);
            e.exit_code()
        }
    }
}

/// Reads a table from disk, falling back to the bundled table of that name.
pub fn read_table_text(arg: &str) -> Result<String> {
    let path = Path::new(arg);
    match fs::read_to_string(path) {
        Ok(text) => Ok(text),
        Err(e) if e.kind() == io::ErrorKind::NotFound => presets::table_text(arg)
            .map(str::to_owned)
            .ok_or(CliError::Io {
                path: path.to_owned(),
                source: e,
            }),
        Err(e) => Err(CliError::Io {
            path: path.to_owned(),
            source: e,
        }),
    }
}

/// Parses and validates a table.
pub fn load_table(arg: &str) -> Result<RequirementsTable> {
    let text = read_table_text(arg)?;
    let table = parse_table_unchecked(&text).map_err(|source| CliError::Parse {
        path: arg.into(),
        source,
    })?;
    let diagnostics = validate(&table);
    if diagnostics.is_empty() {
        Ok(table)
    } else {
        Err(CliError::Invalid {
            path: arg.into(),
            diagnostics,
        })
    }
}

/// Exit 0 for a valid table, 1 with diagnostics, 2 on a syntax error.
pub fn cmd_check(file: &str, out: &mut dyn Write) -> Result<i32> {
    match load_table(file) {
        Ok(t) => {
            writeln!(out, "{file}: ok ({} requirements)", t.requirements.len())
                .map_err(stdout_err)?;
            Ok(0)
        }
        Err(CliError::Invalid { path, diagnostics }) => {
            for d in &diagnostics {
                writeln!(out, "{path}: {d}").map_err(stdout_err)?;
            }
            Ok(EXIT_INVALID)
        }
        Err(e @ CliError::Parse { .. }) => {
            writeln!(out, "{e}").map_err(stdout_err)?;
            Ok(EXIT_PARSE)
        }
        Err(e) => Err(e),
    }
}

fn stdout_err(source: io::Error) -> CliError {
    CliError::Io {
        path: "<stdout>".into(),
        source,
    }
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Monitors a CSV trace, prints the fitness and writes the degree CSV.
pub fn cmd_monitor(table: &str, trace: &Path, degrees: &Path, out: &mut dyn Write) -> Result<i32> {
    let automaton = MonitorAutomaton::compile(&load_table(table)?)?;
    let file = fs::File::open(trace).map_err(|source| CliError::Io {
        path: trace.to_owned(),
        source,
    })?;
    let trace = Trace::read_csv(io::BufReader::new(file), None)?;
    let run = automaton.run(&trace)?;
    run.write_degree_csv(io::BufWriter::new(create(degrees)?))?;
    writeln!(out, "fitness: {}", run.fitness).map_err(stdout_err)?;
    if run.fitness.is_violation() {
        writeln!(out, "violated: {:?}", run.violated_requirements()).map_err(stdout_err)?;
    }
    Ok(0)
}

/// Everything needed to reproduce a falsification run.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub model: String,
    pub table: String,
    pub algorithm: Algorithm,
    pub budget: usize,
    pub seed: u64,
    pub sa: SaConfig,
    pub horizon: f64,
    pub dt: f64,
    pub inputs: Vec<SignalShape>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultFile {
    pub verdict: Verdict,
    pub seed: u64,
    pub config: ConfigEcho,
    pub parameters: Vec<String>,
    pub best_params: Vec<f64>,
    pub best_fitness: Degree,
    pub iterations: usize,
    pub violated_requirements: Vec<u32>,
    pub history: Vec<Degree>,
}

#[derive(Debug, Clone, Serialize)]
struct RunSummary {
    seed: u64,
    verdict: Verdict,
    iterations: usize,
    best_fitness: Degree,
    result: String,
}

#[derive(Debug, Clone, Serialize)]
struct Summary {
    runs: usize,
    falsified: usize,
    results: Vec<RunSummary>,
}

/// Parses `name:lo:hi[:k]`.
pub fn parse_input_spec(spec: &str) -> Result<SignalShape> {
    let bad = || CliError::Usage(format!("bad --input `{spec}`, expected name:lo:hi[:k]"));
    let parts: Vec<&str> = spec.split(':').collect();
    if !(3..=4).contains(&parts.len()) || parts[0].is_empty() {
        return Err(bad());
    }
    let lo: f64 = parts[1].parse().map_err(|_| bad())?;
    let hi: f64 = parts[2].parse().map_err(|_| bad())?;
    let k: usize = match parts.get(3) {
        Some(k) => k.parse().map_err(|_| bad())?,
        None => 1,
    };
    Ok(SignalShape::new(parts[0], lo, hi, k))
}

/// Resolves the search configuration and input parameterization.
pub fn resolve(args: &FalsifyArgs) -> Result<(ConfigEcho, rtsbst_core::Builtin)> {
    if args.budget < 1 {
        return Err(CliError::Usage("--budget must be at least 1".into()));
    }
    if args.runs < 1 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    let model = builtin(&args.model).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown model `{}` (available: {})",
            args.model,
            rtsbst_core::sim::BUILTIN_MODELS.join(", ")
        ))
    })?;
    let mut shapes: Vec<SignalShape> = model
        .input_ranges
        .iter()
        .map(|(n, lo, hi)| SignalShape::new(n.clone(), *lo, *hi, 1))
        .collect();
    for spec in &args.inputs {
        let s = parse_input_spec(spec)?;
        let slot = shapes
            .iter_mut()
            .find(|x| x.name == s.name)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "`{}` is not an input of model `{}`",
                    s.name, args.model
                ))
            })?;
        *slot = s;
    }
    let defaults = SaConfig::default();
    let echo = ConfigEcho {
        model: args.model.clone(),
        table: args.table.clone(),
        algorithm: args.algo.into(),
        budget: args.budget,
        seed: args.seed,
        sa: SaConfig {
            initial_temperature: args.temperature.unwrap_or(defaults.initial_temperature),
            cooling: args.cooling.unwrap_or(defaults.cooling),
            proposal_scale: args.scale.unwrap_or(defaults.proposal_scale),
        },
        horizon: args.horizon.unwrap_or(model.horizon),
        dt: args.dt.unwrap_or(model.dt),
        inputs: shapes,
    };
    Ok((echo, model))
}

/// Runs falsification and writes `result.json`, `best_trace.csv` and
/// `best_degrees.csv` into the output directory. With `--runs N > 1` every
/// file gets a `-<i>` suffix and a `summary.json` is added.
///
/// Exit 0 if any run found a test case, 10 otherwise.
pub fn cmd_falsify(args: &FalsifyArgs, out: &mut dyn Write) -> Result<i32> {
    let (echo, model) = resolve(args)?;
    let table = load_table(&args.table)?;
    let automaton = MonitorAutomaton::compile(&table)?;
    let input = ParameterizedInput::new(echo.horizon, echo.dt, echo.inputs.clone())?;
    let problem = Problem::new(model.model.as_ref(), &automaton, &input)?;
    let names: Vec<String> = input
        .parameters()
        .into_iter()
        .map(|p: ParamSpec| p.name)
        .collect();
    fs::create_dir_all(&args.out).map_err(|source| CliError::Io {
        path: args.out.clone(),
        source,
    })?;

    let mut summary = Summary {
        runs: args.runs,
        falsified: 0,
        results: Vec::new(),
    };
    for i in 0..args.runs {
        let seed = args.seed.wrapping_add(i as u64);
        let cfg = SearchConfig {
            algorithm: echo.algorithm,
            budget: echo.budget,
            seed,
            sa: echo.sa.clone(),
        };
        let res = search::falsify(&problem, &cfg)?;
        let suffix = if args.runs > 1 {
            format!("-{}", i + 1)
        } else {
            String::new()
        };
        let file = ResultFile {
            verdict: res.verdict,
            seed,
            config: ConfigEcho {
                seed,
                ..echo.clone()
            },
            parameters: names.clone(),
            best_params: res.best_params.clone(),
            best_fitness: res.best_fitness,
            iterations: res.iterations,
            violated_requirements: res.violated_requirements.clone(),
            history: res.history.clone(),
        };
        let result_name = format!("result{suffix}.json");
        write_json(&args.out.join(&result_name), &file)?;
        let best = problem.evaluate(&res.best_params)?;
        best.trace.write_csv(io::BufWriter::new(create(
            &args.out.join(format!("best_trace{suffix}.csv")),
        )?))?;
        best.run.write_degree_csv(io::BufWriter::new(create(
            &args.out.join(format!("best_degrees{suffix}.csv")),
        )?))?;

        let verdict = match res.verdict {
            Verdict::TestCase => "TC",
            Verdict::NoFailureFound => "NFF",
        };
        writeln!(
            out,
            "seed {seed}: {verdict} after {} iterations, best fitness {}{}",
            res.iterations,
            res.best_fitness,
            if res.violated_requirements.is_empty() {
                String::new()
            } else {
                format!(", violated {:?}", res.violated_requirements)
            }
        )
        .map_err(stdout_err)?;
        if res.verdict == Verdict::TestCase {
            summary.falsified += 1;
        }
        summary.results.push(RunSummary {
            seed,
            verdict: res.verdict,
            iterations: res.iterations,
            best_fitness: res.best_fitness,
            result: result_name,
        });
    }
    if args.runs > 1 {
        write_json(&args.out.join("summary.json"), &summary)?;
        writeln!(out, "{}/{} runs falsified", summary.falsified, summary.runs)
            .map_err(stdout_err)?;
    }
    Ok(if summary.falsified > 0 {
        EXIT_TC
    } else {
        EXIT_NFF
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = io::BufWriter::new(create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })
}
