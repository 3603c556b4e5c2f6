//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use l2boost_core::expand::{expand_design, CorrelationScope, ExpansionConfig};
use l2boost_core::simlab::{DgpSpec, Estimator, DEFAULT_ALPHA0};
use l2boost_core::{
    destandardize, double_select, fit_iv, fit_learner, BoostConfig, DSConfig, DesignMatrix,
    ErrorCategory, IVConfig, Learner,
};

use crate::io::{load_table, read_table, write_columns, ColumnRoleMap, IoError, Table};
use crate::montecarlo::run_parallel;
use crate::report::{
    to_json, write_estimates, write_grid, BoostRecord, BoostStep, DroppedRecord, ExpandRecord,
    IvRecord, SimulationRecord, TreatRecord,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_ESTIMATION: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] l2boost_core::Error),
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) | CliError::Write { .. } => EXIT_DATA,
            CliError::Core(e) => match e.category() {
                ErrorCategory::Data => EXIT_DATA,
                ErrorCategory::Estimation => EXIT_ESTIMATION,
            },
        }
    }

    fn category(&self) -> &'static str {
        match self.exit_code() {
            EXIT_USAGE => "usage",
            EXIT_ESTIMATION => "estimation",
            _ => "data",
        }
    }

    fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "bad_arguments",
            CliError::Io(e) => e.code(),
            CliError::Core(e) => e.code(),
            CliError::Write { .. } => "write_failed",
        }
    }

    /// `error: <category>: <code>: <message>` on a single line.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("error: {}: {}: {}", self.category(), self.code(), msg.trim())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Post,
    Orthogonal,
    Classic,
}

impl VariantArg {
    pub fn learner(self) -> Learner {
        match self {
            VariantArg::Post => Learner::PostBoost,
            VariantArg::Orthogonal => Learner::Orthogonal,
            VariantArg::Classic => Learner::Classic,
        }
    }

    pub fn estimator(self) -> Estimator {
        match self {
            VariantArg::Post => Estimator::PostBa,
            VariantArg::Orthogonal => Estimator::OBa,
            VariantArg::Classic => Estimator::ClassicBa,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "l2boost", version, about = "L2-Boosting selection, double selection and boosted IV")]
pub struct Cli {
    /// Boosting variant.
    #[arg(long, global = true, value_enum, default_value_t = VariantArg::Post)]
    pub variant: VariantArg,
    /// Relative-improvement stopping threshold; 0 disables early stopping.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub stop_threshold: f64,
    /// Iteration cap (default min(n, p, 200)).
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Master seed for simulations.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Structured output file (JSON; `.csv` for a simulation grid).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for simulations (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Double-selection treatment effect on a data file.
    Treat(TreatArgs),
    /// IV estimate with a boosted first stage.
    Iv(IvArgs),
    /// Boosting fit of one column on others; prints the path.
    Boost(BoostArgs),
    /// Main effects, interactions and column filters.
    Expand(ExpandArgs),
    /// Monte Carlo replication of a simulation design.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Delimited text file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Field delimiter (detected among ',', ';' and tab if omitted).
    #[arg(long)]
    pub delimiter: Option<char>,
}

#[derive(Debug, Args)]
pub struct TreatArgs {
    #[command(flatten)]
    pub input: DataArgs,
    #[arg(long)]
    pub outcome: String,
    #[arg(long)]
    pub treatment: String,
    /// Candidate controls (default: every other column).
    #[arg(long, value_delimiter = ',')]
    pub controls: Option<Vec<String>>,
    /// Controls forced into the final regression.
    #[arg(long, value_delimiter = ',')]
    pub amend: Vec<String>,
    #[arg(long, default_value_t = 0.95)]
    pub ci_level: f64,
}

#[derive(Debug, Args)]
pub struct IvArgs {
    #[command(flatten)]
    pub input: DataArgs,
    #[arg(long)]
    pub outcome: String,
    #[arg(long)]
    pub endogenous: String,
    /// Candidate instruments (default: every column not otherwise used).
    #[arg(long, value_delimiter = ',')]
    pub instruments: Option<Vec<String>>,
    /// Exogenous controls, partialled out.
    #[arg(long, value_delimiter = ',')]
    pub controls: Vec<String>,
    #[arg(long, default_value_t = 0.95)]
    pub ci_level: f64,
}

#[derive(Debug, Args)]
pub struct BoostArgs {
    #[command(flatten)]
    pub input: DataArgs,
    #[arg(long)]
    pub outcome: String,
    /// Regressors (default: every other column).
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub input: DataArgs,
    /// Covariates to expand (default: all columns).
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
    /// Main effects only.
    #[arg(long)]
    pub no_interactions: bool,
    #[arg(long, default_value_t = 0.95)]
    pub corr_cutoff: f64,
    #[arg(long, default_value_t = 20)]
    pub min_ones: usize,
    /// Compare interactions only against kept interactions.
    #[arg(long)]
    pub interactions_only_corr: bool,
    /// Write the expanded design as delimited text.
    #[arg(long)]
    pub write_design: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableArg {
    ControlsSparse,
    ControlsApprox,
    IvSparse,
    NaiveDemo,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub table: TableArg,
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub p: usize,
    /// Sparsity index (ignored by controls-approx and naive-demo).
    #[arg(long, default_value_t = 10)]
    pub s: usize,
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    /// Estimators to run (default: the one matching --variant).
    #[arg(long, value_delimiter = ',')]
    pub estimator: Option<Vec<String>>,
    /// Treatment effect in the controls designs.
    #[arg(long, default_value_t = DEFAULT_ALPHA0)]
    pub alpha0: f64,
    /// Concentration parameter of the IV design.
    #[arg(long, default_value_t = 180.0)]
    pub mu: f64,
    /// corr(e, v) in the IV design.
    #[arg(long, default_value_t = 0.6)]
    pub rho_ev: f64,
    /// Treatment effect in the naive demo.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Covariate coefficient in the naive demo.
    #[arg(long, default_value_t = 0.2)]
    pub beta: f64,
    /// corr(d, x) in the naive demo.
    #[arg(long, default_value_t = 0.8)]
    pub rho_dx: f64,
    /// Write per-replication estimates as CSV.
    #[arg(long)]
    pub dump_estimates: Option<PathBuf>,
}

impl SimulateArgs {
    pub fn spec(&self) -> DgpSpec {
        match self.table {
            TableArg::ControlsSparse => DgpSpec::ControlsSparse {
                n: self.n,
                p: self.p,
                s: self.s,
                alpha0: self.alpha0,
            },
            TableArg::ControlsApprox => DgpSpec::ControlsApprox {
                n: self.n,
                p: self.p,
                alpha0: self.alpha0,
            },
            TableArg::IvSparse => DgpSpec::IvSparse {
                n: self.n,
                p: self.p,
                s: self.s,
                mu: self.mu,
                rho_ev: self.rho_ev,
            },
            TableArg::NaiveDemo => DgpSpec::NaiveDemo {
                n: self.n,
                alpha: self.alpha,
                beta: self.beta,
                rho_dx: self.rho_dx,
            },
        }
    }
}

impl Cli {
    pub fn boost_config(&self) -> Result<BoostConfig, CliError> {
        if self.max_iter == Some(0) {
            return Err(CliError::Usage("--max-iter must be at least 1".into()));
        }
        if !(self.stop_threshold >= 0.0 && self.stop_threshold.is_finite()) {
            return Err(CliError::Usage("--stop-threshold must be a finite value >= 0".into()));
        }
        Ok(BoostConfig {
            variant: self.variant.learner().variant(),
            max_iter: self.max_iter,
            stop_threshold: self.stop_threshold,
            ..BoostConfig::default()
        })
    }
}

fn delimiter(c: Option<char>) -> Result<Option<u8>, CliError> {
    match c {
        None => Ok(None),
        Some(c) if c.is_ascii() => Ok(Some(c as u8)),
        Some(c) => Err(CliError::Usage(format!("delimiter '{c}' is not a single byte"))),
    }
}

fn load(input: &DataArgs) -> Result<Table, CliError> {
    Ok(read_table(&input.data, delimiter(input.delimiter)?)?)
}

fn design(raw: l2boost_core::RealMatrix, n: usize) -> Result<DesignMatrix, CliError> {
    if raw.ncols() == 0 {
        return Ok(DesignMatrix::empty(n));
    }
    Ok(DesignMatrix::new(raw)?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Write {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::Write {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn names(v: &[String]) -> String {
    if v.is_empty() {
        "(none)".to_string()
    } else {
        v.join(",")
    }
}

/// Treatment-effect analysis of a file, as printed by `treat`.
pub fn treat(cli: &Cli, args: &TreatArgs) -> Result<TreatRecord, CliError> {
    let table = load(&args.input)?;
    let controls = args.controls.clone().unwrap_or_else(|| {
        table.other_columns(&[args.outcome.as_str(), args.treatment.as_str()])
    });
    let roles = ColumnRoleMap {
        outcome: args.outcome.clone(),
        treatment: Some(args.treatment.clone()),
        controls: controls.clone(),
        ..ColumnRoleMap::default()
    };
    let data = load_table(&table, &roles)?;
    let x = design(data.controls, data.y.len())?;
    let amend = args
        .amend
        .iter()
        .map(|a| {
            controls
                .iter()
                .position(|c| c == a)
                .ok_or_else(|| CliError::Usage(format!("amended column '{a}' is not a control")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let learner = cli.variant.learner();
    let cfg = DSConfig {
        learner,
        boost_cfg: cli.boost_config()?,
        treatment_cfg: None,
        amend,
        ci_level: args.ci_level,
    };
    let r = double_select(&data.y, &data.d, &x, &cfg)?;
    Ok(TreatRecord::new(&r, &controls, learner.label(), data.rows_dropped))
}

pub fn iv(cli: &Cli, args: &IvArgs) -> Result<IvRecord, CliError> {
    let table = load(&args.input)?;
    let instruments = args.instruments.clone().unwrap_or_else(|| {
        let mut exclude = vec![args.outcome.as_str(), args.endogenous.as_str()];
        exclude.extend(args.controls.iter().map(String::as_str));
        table.other_columns(&exclude)
    });
    let roles = ColumnRoleMap {
        outcome: args.outcome.clone(),
        endogenous: Some(args.endogenous.clone()),
        instruments: instruments.clone(),
        controls: args.controls.clone(),
        ..ColumnRoleMap::default()
    };
    let data = load_table(&table, &roles)?;
    let z = design(data.instruments, data.y.len())?;
    let learner = cli.variant.learner();
    let cfg = IVConfig {
        learner,
        boost_cfg: cli.boost_config()?,
        exog_controls: (data.controls.ncols() > 0).then_some(data.controls),
        ci_level: args.ci_level,
    };
    let r = fit_iv(&data.y, &data.d, &z, &cfg)?;
    Ok(IvRecord::new(&r, &instruments, learner.label(), data.rows_dropped))
}

pub fn boost(cli: &Cli, args: &BoostArgs) -> Result<BoostRecord, CliError> {
    let table = load(&args.input)?;
    let columns = args
        .columns
        .clone()
        .unwrap_or_else(|| table.other_columns(&[args.outcome.as_str()]));
    let roles = ColumnRoleMap {
        outcome: args.outcome.clone(),
        controls: columns.clone(),
        ..ColumnRoleMap::default()
    };
    let data = load_table(&table, &roles)?;
    let x = DesignMatrix::new(data.controls)?;
    let learner = cli.variant.learner();
    let fit = fit_learner(&x, &data.y, learner, &cli.boost_config()?)?;
    let (coef, intercept) = destandardize(&fit.coef, &x, fit.path.y_mean);
    let steps = fit
        .path
        .selected
        .iter()
        .zip(&fit.path.steps)
        .zip(&fit.path.rss[1..])
        .map(|((&j, &step), &rss)| BoostStep {
            column: columns[j].clone(),
            step,
            rss,
        })
        .collect();
    Ok(BoostRecord {
        n: data.y.len(),
        rows_dropped: data.rows_dropped,
        learner: learner.label().to_string(),
        stopped: format!("{:?}", fit.path.stopped_reason).to_lowercase(),
        initial_rss: fit.path.rss[0],
        steps,
        intercept,
        coefficients: fit
            .path
            .support
            .iter()
            .map(|&j| (columns[j].clone(), coef[j]))
            .collect(),
    })
}

pub fn expand(args: &ExpandArgs) -> Result<ExpandRecord, CliError> {
    let table = load(&args.input)?;
    let columns = args.columns.clone().unwrap_or_else(|| table.headers.clone());
    let (raw, rows_dropped) = table.raw_table(&columns)?;
    let cfg = ExpansionConfig {
        include_interactions: !args.no_interactions,
        corr_cutoff: args.corr_cutoff,
        min_ones: args.min_ones,
        corr_scope: if args.interactions_only_corr {
            CorrelationScope::InteractionsOnly
        } else {
            CorrelationScope::AllKept
        },
    };
    let e = expand_design(&raw, &cfg)?;
    if let Some(path) = &args.write_design {
        let names: Vec<&str> = e.names.iter().map(String::as_str).collect();
        let cols: Vec<&[f64]> = e.design.raw().columns().collect();
        write_columns(path, &names, &cols)?;
    }
    Ok(ExpandRecord {
        rows: raw.rows(),
        rows_dropped,
        kept: e.names,
        dropped: e
            .dropped
            .into_iter()
            .map(|d| DroppedRecord {
                column: d.name,
                reason: d.reason.to_string(),
            })
            .collect(),
    })
}

pub fn simulate(cli: &Cli, args: &SimulateArgs) -> Result<Vec<SimulationRecord>, CliError> {
    let spec = args.spec();
    let estimators = match &args.estimator {
        None => vec![cli.variant.estimator()],
        Some(list) => list
            .iter()
            .map(|s| s.parse::<Estimator>())
            .collect::<Result<Vec<_>, _>>()?,
    };
    let cfg = cli.boost_config()?;
    let mut records = Vec::new();
    let mut dumps = Vec::new();
    for est in estimators {
        let run = run_parallel(&spec, est, args.reps, cli.seed, &cfg, cli.threads)?;
        records.push(SimulationRecord::from(&run.report));
        dumps.push((est.label().to_string(), run.replications));
    }
    if let Some(path) = &args.dump_estimates {
        let runs: Vec<(String, &[_])> = dumps.iter().map(|(l, r)| (l.clone(), r.as_slice())).collect();
        write_estimates(create(path)?, &runs).map_err(|e| CliError::Write {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(records)
}

fn print_inference(out: &mut impl Write, i: &crate::report::Inference) -> io::Result<()> {
    writeln!(out, "estimate   {}", i.estimate)?;
    writeln!(out, "se         {}", i.se)?;
    writeln!(out, "ci         [{}, {}]", i.ci_lower, i.ci_upper)?;
    writeln!(out, "p_value    {}", i.p_value)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), |x| x.to_string())
}

fn execute(cli: &Cli, out: &mut impl Write) -> Result<(), CliError> {
    let stdout_err = |e: io::Error| CliError::Write {
        path: "<stdout>".into(),
        message: e.to_string(),
    };
    let json = match &cli.command {
        Command::Treat(args) => {
            let r = treat(cli, args)?;
            (|| {
                writeln!(out, "learner    {}", r.learner)?;
                writeln!(out, "n          {} ({} rows dropped)", r.n, r.rows_dropped)?;
                print_inference(out, &r.inference)?;
                writeln!(out, "selected_d {}", names(&r.selected_treatment))?;
                writeln!(out, "selected_y {}", names(&r.selected_outcome))
            })()
            .map_err(stdout_err)?;
            to_json(&r)
        }
        Command::Iv(args) => {
            let r = iv(cli, args)?;
            (|| {
                writeln!(out, "learner    {}", r.learner)?;
                writeln!(out, "n          {} ({} rows dropped)", r.n, r.rows_dropped)?;
                print_inference(out, &r.inference)?;
                writeln!(out, "first_stage {}", names(&r.first_stage))
            })()
            .map_err(stdout_err)?;
            to_json(&r)
        }
        Command::Boost(args) => {
            let r = boost(cli, args)?;
            (|| {
                writeln!(out, "learner    {}", r.learner)?;
                writeln!(out, "n          {} ({} rows dropped)", r.n, r.rows_dropped)?;
                writeln!(out, "rss[0]     {}", r.initial_rss)?;
                for (m, s) in r.steps.iter().enumerate() {
                    writeln!(out, "step {:<5} {:<16} gamma {} rss {}", m + 1, s.column, s.step, s.rss)?;
                }
                writeln!(out, "stopped    {}", r.stopped)?;
                writeln!(out, "intercept  {}", r.intercept)?;
                for (name, c) in &r.coefficients {
                    writeln!(out, "coef       {name} {c}")?;
                }
                Ok(())
            })()
            .map_err(stdout_err)?;
            to_json(&r)
        }
        Command::Expand(args) => {
            let r = expand(args)?;
            (|| {
                writeln!(out, "rows       {} ({} dropped)", r.rows, r.rows_dropped)?;
                writeln!(out, "kept       {}", r.kept.len())?;
                for k in &r.kept {
                    writeln!(out, "  {k}")?;
                }
                writeln!(out, "dropped    {}", r.dropped.len())?;
                for d in &r.dropped {
                    writeln!(out, "  {}: {}", d.column, d.reason)?;
                }
                Ok(())
            })()
            .map_err(stdout_err)?;
            to_json(&r)
        }
        Command::Simulate(args) => {
            let records = simulate(cli, args)?;
            (|| {
                writeln!(
                    out,
                    "{:<16} {:>5} {:>5} {:>4} {:<11} {:>22} {:>22} {:>22} {:>6}",
                    "table", "n", "p", "s", "estimator", "bias", "rejection_rate", "coverage", "fail"
                )?;
                for r in &records {
                    writeln!(
                        out,
                        "{:<16} {:>5} {:>5} {:>4} {:<11} {:>22} {:>22} {:>22} {:>6}",
                        r.design.table,
                        r.design.n,
                        r.design.p,
                        r.design.s.map_or_else(|| "-".to_string(), |s| s.to_string()),
                        r.estimator,
                        fmt_opt(r.mean_bias),
                        fmt_opt(r.rejection_rate),
                        fmt_opt(r.coverage),
                        r.failures
                    )?;
                }
                Ok(())
            })()
            .map_err(stdout_err)?;
            if let Some(path) = &cli.output {
                if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
                    return write_grid(create(path)?, &records).map_err(|e| CliError::Write {
                        path: path.display().to_string(),
                        message: e.to_string(),
                    });
                }
            }
            to_json(&records)
        }
    };
    if let Some(path) = &cli.output {
        write_file(path, &json)?;
    }
    Ok(())
}

/// Parses `argv` and runs the command, writing the human-readable report to
/// `out` and errors to `err`. Returns the process exit status.
pub fn run<I, T>(argv: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let msg = e.to_string();
                    let first = msg.lines().next().unwrap_or("invalid arguments");
                    let first = first.trim_start_matches("error: ");
                    let _ = writeln!(err, "error: usage: bad_arguments: {first}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "{}", e.line());
            e.exit_code()
        }
    }
}
