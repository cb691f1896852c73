use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use overlap_cli::experiments::{
    self as exp, FigureSeries, RunOptions, TABLE1_METHODS, TABLE1_ROWS, TABLE2_METHODS, TABLE2_TAUS,
};
use overlap_cli::output::{write_atomic, write_with};
use overlap_cli::report::{Cell, Report};
use overlap_core::sim::DEFAULT_REPLICATIONS;
use overlap_core::{Method, ModelConfig, OverlapError, QueueModel};

#[derive(Parser, Debug)]
#[command(
    name = "overlap",
    version,
    about = "Expected overlapping time in time-varying queues"
)]
struct Cli {
    /// Model configuration file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for all random streams.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Simulation replications.
    #[arg(long, global = true)]
    reps: Option<u64>,
    /// ODE step size.
    #[arg(long, global = true, default_value_t = overlap_core::fluid::DEFAULT_STEP)]
    step: f64,
    /// Arrival times of the tagged customer, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    tau: Vec<f64>,
    /// Output directory; reports go to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Count the tagged customer in her own overlap.
    #[arg(long, global = true)]
    count_self: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Methods to run, comma separated (fluid, adjusted, simulation, closed-form, numeric-ode).
    #[arg(long, global = true, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Solver and simulation horizon; defaults to tau + 20/mu.
    #[arg(long, global = true)]
    horizon: Option<f64>,
    /// Histogram bin count; Freedman-Diaconis when omitted.
    #[arg(long, global = true)]
    bins: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expected overlap of a configured model at the given tau values.
    Overlap,
    /// Fluid, adjusted and simulated overlaps for the M_t/M/30 presets.
    Table1,
    /// Closed-form, numeric and simulated overlaps for the M_t/M/inf preset.
    Table2,
    /// Data behind a figure (1-4).
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        id: u8,
    },
    /// Uniform-acceleration sweep.
    Converge {
        #[arg(long, value_delimiter = ',', default_values_t = exp::DEFAULT_ETAS)]
        eta: Vec<u64>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Format {
    Csv,
    Text,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Model(OverlapError),
    Io(io::Error),
}

impl From<OverlapError> for Failure {
    fn from(e: OverlapError) -> Self {
        Failure::Model(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Model(OverlapError::Config(_) | OverlapError::Parse(_)) => 2,
            Failure::Model(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Model(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let methods = parse_methods(cli.methods.as_deref())?;
    match &cli.command {
        Command::Overlap => overlap(cli, methods),
        Command::Table1 => table1(cli, methods),
        Command::Table2 => table2(cli, methods),
        Command::Figure { id } => figure(cli, *id),
        Command::Converge { eta } => converge(cli, eta),
    }
}

fn parse_methods(raw: Option<&[String]>) -> Result<Option<Vec<Method>>, Failure> {
    let Some(raw) = raw else { return Ok(None) };
    let list: Vec<&str> = raw
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .collect();
    if list.is_empty() {
        return Err(Failure::Usage("--methods needs at least one method".into()));
    }
    list.iter()
        .map(|s| Method::parse(s).ok_or_else(|| Failure::Usage(format!("unknown method `{s}`"))))
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn options(cli: &Cli, default_reps: u64) -> RunOptions {
    RunOptions {
        seed: cli.seed,
        replications: cli.reps.unwrap_or(default_reps),
        step: cli.step,
        count_self: cli.count_self,
        horizon: cli.horizon,
        bins: cli.bins,
    }
}

fn render(cli: &Cli, report: &Report) -> String {
    match cli.format {
        Format::Csv => report.to_csv(),
        Format::Text => report.to_text(),
    }
}

fn extension(cli: &Cli) -> &'static str {
    match cli.format {
        Format::Csv => "csv",
        Format::Text => "txt",
    }
}

/// Writes `text` to `<out>/<stem>.<ext>`, or to stdout when no directory was given.
fn emit(cli: &Cli, stem: &str, text: &str) -> Outcome {
    match &cli.out {
        Some(dir) => write_atomic(
            &dir.join(format!("{stem}.{}", extension(cli))),
            text.as_bytes(),
        )?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn load_model(path: Option<&Path>) -> Result<QueueModel, Failure> {
    let path = path.ok_or_else(|| Failure::Usage("overlap requires --config <path>".into()))?;
    Ok(QueueModel::from_config(&ModelConfig::load(path)?)?)
}

fn reject_config(cli: &Cli, experiment: &str) -> Outcome {
    match cli.config {
        Some(_) => Err(Failure::Usage(format!(
            "{experiment} uses a fixed preset model; --config is only accepted by `overlap`"
        ))),
        None => Ok(()),
    }
}

fn overlap(cli: &Cli, methods: Option<Vec<Method>>) -> Outcome {
    let model = load_model(cli.config.as_deref())?;
    let methods = methods.unwrap_or_else(|| {
        if model.servers.is_finite() {
            vec![Method::Fluid, Method::Adjusted]
        } else {
            vec![Method::NumericOde]
        }
    });
    if cli.tau.is_empty() {
        return Err(Failure::Usage("overlap requires --tau".into()));
    }
    let opts = options(cli, DEFAULT_REPLICATIONS);
    let results = exp::run_overlap(&model, &cli.tau, &methods, &opts)?;
    emit(
        cli,
        "overlap",
        &render(cli, &exp::overlap_report(&methods, &results)),
    )
}

fn table1(cli: &Cli, methods: Option<Vec<Method>>) -> Outcome {
    reject_config(cli, "table1")?;
    let rows: Vec<_> = TABLE1_ROWS
        .iter()
        .filter(|r| cli.tau.is_empty() || cli.tau.contains(&r.tau))
        .copied()
        .collect();
    if rows.is_empty() {
        return Err(Failure::Usage(
            "no table1 row matches the requested --tau".into(),
        ));
    }
    let methods = methods.unwrap_or_else(|| TABLE1_METHODS.to_vec());
    let out = exp::run_table1_rows(&rows, &methods, &options(cli, DEFAULT_REPLICATIONS))?;
    emit(cli, "table1", &render(cli, &exp::table1_report(&out)))
}

fn table2(cli: &Cli, methods: Option<Vec<Method>>) -> Outcome {
    reject_config(cli, "table2")?;
    let taus = if cli.tau.is_empty() {
        TABLE2_TAUS.to_vec()
    } else {
        cli.tau.clone()
    };
    let methods = methods.unwrap_or_else(|| TABLE2_METHODS.to_vec());
    let out = exp::run_table2_rows(&taus, &methods, &options(cli, DEFAULT_REPLICATIONS))?;
    emit(cli, "table2", &render(cli, &exp::table2_report(&out)))
}

fn figure(cli: &Cli, id: u8) -> Outcome {
    reject_config(cli, "figure")?;
    let opts = options(cli, DEFAULT_REPLICATIONS);
    let series = |s: FigureSeries, title: &str| render(cli, &s.to_report(title));
    match id {
        1 => emit(
            cli,
            "figure1",
            &series(
                exp::run_fluid_figure(false, &opts)?,
                "Fluid limit vs simulation",
            ),
        ),
        2 => emit(
            cli,
            "figure2",
            &series(
                exp::run_fluid_figure(true, &opts)?,
                "Adjusted fluid limit vs simulation",
            ),
        ),
        3 => figure3(cli, &opts),
        4 => emit(
            cli,
            "figure4",
            &series(exp::run_figure4(&opts)?, "Mean dynamics, M_t/M/inf"),
        ),
        _ => unreachable!("clap restricts the figure id"),
    }
}

fn figure3(cli: &Cli, opts: &RunOptions) -> Outcome {
    let hists = exp::run_figure3(opts)?;
    let mut summary = Report::new(
        "Simulated overlapping times (alpha = 0.5, beta = 0.5, rho = 0.8)",
        &["tau", "mean", "variance", "skewness", "bins"],
    );
    for h in &hists {
        summary.push(vec![
            Cell::Param(h.tau),
            Cell::Value(h.aggregate.mean),
            Cell::Value(h.aggregate.variance),
            Cell::Value(h.skewness),
            Cell::Count(h.histogram.counts.len() as u64),
        ]);
        match &cli.out {
            Some(dir) => {
                let path = dir.join(format!("figure3_tau{}.csv", h.tau));
                write_with(&path, |buf| h.histogram.write_csv(buf))?;
            }
            None => {
                let mut buf = format!("# tau = {}\n", h.tau).into_bytes();
                h.histogram.write_csv(&mut buf)?;
                io::stdout().lock().write_all(&buf)?;
            }
        }
    }
    emit(cli, "figure3_summary", &render(cli, &summary))
}

fn converge(cli: &Cli, etas: &[u64]) -> Outcome {
    reject_config(cli, "converge")?;
    let tau = match cli.tau.as_slice() {
        [] => 3.0,
        [t] => *t,
        _ => return Err(Failure::Usage("converge takes a single --tau".into())),
    };
    let opts = options(cli, exp::CONVERGE_REPLICATIONS);
    let reports = exp::run_converge(etas, tau, &opts)?;
    let t0 = exp::figure_fluid_t0(tau, &opts)?;
    emit(
        cli,
        "converge",
        &render(cli, &exp::converge_report(&reports, t0)),
    )
}
