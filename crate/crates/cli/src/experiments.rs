//! Named experiments: the two comparison tables, figure data, single-point
//! overlap queries and the uniform-acceleration sweep.

use overlap_core::fluid::{overlap_adjusted, overlap_fluid, solve_adjusted, solve_fluid};
use overlap_core::infinite::{
    closed_form_overlap, closed_form_x, numeric_overlap_inf, numeric_solution, SinusoidalInfModel,
};
use overlap_core::model::RateProfile;
use overlap_core::sim::{
    histogram, mean_path, run_replications, simulate_accelerated, skewness, AccelReport, Histogram,
    SimAggregate, SimConfig,
};
use overlap_core::{
    Method, OverlapError, OverlapResult, QueueModel, RateFunction, Result, Servers,
};

use crate::report::{relative_error_pct, Cell, Report};

/// Settings shared by every experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub replications: u64,
    pub step: f64,
    pub count_self: bool,
    /// Overrides the default horizon of the experiment.
    pub horizon: Option<f64>,
    pub bins: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            replications: overlap_core::sim::DEFAULT_REPLICATIONS,
            step: overlap_core::fluid::DEFAULT_STEP,
            count_self: false,
            horizon: None,
            bins: None,
        }
    }
}

/// Horizon for a table row: generous margin beyond the arrival time.
pub fn table_horizon(tau: f64, mu: f64, opts: &RunOptions) -> f64 {
    opts.horizon.unwrap_or(tau + 20.0 / mu)
}

fn sim_config(opts: &RunOptions, tau: f64, horizon: f64) -> SimConfig {
    SimConfig {
        replications: opts.replications,
        count_self: opts.count_self,
        ..SimConfig::new(opts.seed, tau, horizon)
    }
}

fn check_methods(methods: &[Method], allowed: &[Method], experiment: &str) -> Result<()> {
    if methods.is_empty() {
        return Err(OverlapError::Config("method list is empty".into()));
    }
    if let Some(m) = methods.iter().find(|m| !allowed.contains(m)) {
        return Err(OverlapError::Config(format!(
            "method {m} is not available for {experiment}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Table 1: M_t/M/30 with sinusoidal arrivals

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub tau: f64,
}

const fn row(alpha: f64, beta: f64, tau: f64) -> Table1Row {
    Table1Row {
        alpha,
        beta,
        rho: 0.8,
        tau,
    }
}

pub const TABLE1_ROWS: [Table1Row; 8] = [
    row(0.5, 0.3, 3.0),
    row(0.5, 0.3, 6.0),
    row(0.5, 0.5, 3.0),
    row(0.5, 0.5, 6.0),
    row(0.5, 0.5, 9.0),
    row(1.0, 0.3, 9.0),
    row(1.0, 0.5, 3.0),
    row(1.0, 0.5, 9.0),
];

pub const TABLE1_SERVERS: u64 = 30;
pub const TABLE1_MU: f64 = 1.0;
pub const TABLE1_BASELINE: f64 = 1.0;

/// `(beta sin(alpha t) + 1) * 30 * rho` arrivals, 30 servers, `mu = 1`, empty start.
pub fn table1_model(alpha: f64, beta: f64, rho: f64) -> Result<QueueModel> {
    QueueModel::new(
        Servers::Finite(TABLE1_SERVERS),
        TABLE1_MU,
        RateFunction::sinusoidal(alpha, beta, TABLE1_BASELINE, TABLE1_SERVERS as f64, rho)?,
        0.0,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Outcome {
    pub row: Table1Row,
    pub fluid: Option<OverlapResult>,
    pub adjusted: Option<OverlapResult>,
    pub simulation: Option<SimAggregate>,
}

pub const TABLE1_METHODS: [Method; 3] = [Method::Fluid, Method::Adjusted, Method::Simulation];

pub fn run_table1_rows(
    rows: &[Table1Row],
    methods: &[Method],
    opts: &RunOptions,
) -> Result<Vec<Table1Outcome>> {
    check_methods(methods, &TABLE1_METHODS, "table1")?;
    rows.iter()
        .map(|r| {
            let model = table1_model(r.alpha, r.beta, r.rho)?;
            let horizon = table_horizon(r.tau, model.service_rate, opts);
            let fluid = methods
                .contains(&Method::Fluid)
                .then(|| overlap_fluid(&model, r.tau, horizon, opts.step))
                .transpose()?;
            let adjusted = methods
                .contains(&Method::Adjusted)
                .then(|| overlap_adjusted(&model, r.tau, horizon, opts.step))
                .transpose()?;
            let simulation = methods
                .contains(&Method::Simulation)
                .then(|| run_replications(&model, &sim_config(opts, r.tau, horizon)))
                .transpose()?
                .map(|run| run.aggregate);
            Ok(Table1Outcome {
                row: *r,
                fluid,
                adjusted,
                simulation,
            })
        })
        .collect()
}

pub fn table1_report(outcomes: &[Table1Outcome]) -> Report {
    let first = outcomes.first();
    let has = |f: fn(&Table1Outcome) -> bool| first.is_some_and(f);
    let (has_fluid, has_adj, has_sim) = (
        has(|o| o.fluid.is_some()),
        has(|o| o.adjusted.is_some()),
        has(|o| o.simulation.is_some()),
    );
    let mut headers = vec!["alpha", "beta", "rho", "tau"];
    if has_fluid {
        headers.push("fluid");
        if has_sim {
            headers.push("fluid_err_pct");
        }
    }
    if has_adj {
        headers.push("adjusted");
        if has_sim {
            headers.push("adjusted_err_pct");
        }
    }
    if has_sim {
        headers.extend(["simulation", "sim_variance", "sim_stddev", "sim_stderr"]);
    }
    let mut report = Report::new(
        "Overlapping times: fluid vs adjusted vs simulation (n = 30, mu = 1, lambda = 1)",
        &headers,
    );
    for o in outcomes {
        let r = o.row;
        let mut cells = vec![
            Cell::Param(r.alpha),
            Cell::Param(r.beta),
            Cell::Param(r.rho),
            Cell::Param(r.tau),
        ];
        let sim = o.simulation.as_ref().map(|s| s.mean);
        for e in [&o.fluid, &o.adjusted].into_iter().flatten() {
            cells.push(Cell::Value(e.expected_overlap));
            if let Some(s) = sim {
                cells.push(Cell::Percent(relative_error_pct(e.expected_overlap, s)));
            }
        }
        if let Some(s) = &o.simulation {
            cells.extend([
                Cell::Value(s.mean),
                Cell::Value(s.variance),
                Cell::Value(s.variance.sqrt()),
                Cell::Value(s.stderr),
            ]);
        }
        report.push(cells);
    }
    report
}

// ---------------------------------------------------------------------------
// Table 2: M_t/M/inf with `2 sin(0.5 t) + 10` arrivals

pub const TABLE2_TAUS: [f64; 4] = [3.0, 5.0, 7.0, 9.0];

pub fn table2_model() -> SinusoidalInfModel {
    SinusoidalInfModel {
        alpha: 0.5,
        beta: 2.0,
        lambda: 10.0,
        mu: 1.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table2Outcome {
    pub tau: f64,
    pub analytical: Option<f64>,
    pub numerical: Option<f64>,
    pub simulation: Option<SimAggregate>,
}

pub const TABLE2_METHODS: [Method; 3] =
    [Method::ClosedForm, Method::NumericOde, Method::Simulation];

pub fn run_table2_rows(
    taus: &[f64],
    methods: &[Method],
    opts: &RunOptions,
) -> Result<Vec<Table2Outcome>> {
    check_methods(methods, &TABLE2_METHODS, "table2")?;
    let m = table2_model();
    let queue = m.to_queue_model()?;
    taus.iter()
        .map(|&tau| {
            let horizon = table_horizon(tau, m.mu, opts);
            Ok(Table2Outcome {
                tau,
                analytical: methods
                    .contains(&Method::ClosedForm)
                    .then(|| closed_form_overlap(&m, tau)),
                numerical: methods
                    .contains(&Method::NumericOde)
                    .then(|| numeric_overlap_inf(&m, tau, opts.step))
                    .transpose()?,
                simulation: methods
                    .contains(&Method::Simulation)
                    .then(|| run_replications(&queue, &sim_config(opts, tau, horizon)))
                    .transpose()?
                    .map(|r| r.aggregate),
            })
        })
        .collect()
}

pub fn table2_report(outcomes: &[Table2Outcome]) -> Report {
    let first = outcomes.first();
    let mut headers = vec!["tau"];
    let cols = [
        ("analytical", first.is_some_and(|o| o.analytical.is_some())),
        ("numerical", first.is_some_and(|o| o.numerical.is_some())),
        ("simulation", first.is_some_and(|o| o.simulation.is_some())),
    ];
    headers.extend(cols.iter().filter(|c| c.1).map(|c| c.0));
    if cols[2].1 {
        headers.push("sim_stderr");
    }
    let mut report = Report::new(
        "Overlapping times, M_t/M/inf: analytical vs numerical vs simulation",
        &headers,
    );
    for o in outcomes {
        let mut cells = vec![Cell::Param(o.tau)];
        cells.extend(o.analytical.map(Cell::Value));
        cells.extend(o.numerical.map(Cell::Value));
        if let Some(s) = &o.simulation {
            cells.push(Cell::Value(s.mean));
            cells.push(Cell::Value(s.stderr));
        }
        report.push(cells);
    }
    report
}

// ---------------------------------------------------------------------------
// Figures

/// Figures 1 and 2: `30 (0.5 sin(0.5 t) + 1)` arrivals, 30 servers, `mu = 1`.
pub fn figure_model() -> Result<QueueModel> {
    table1_model(0.5, 0.5, 1.0)
}

pub const FIGURE_HORIZON: f64 = 10.0;
/// Spacing of the emitted figure rows.
pub const FIGURE_SPACING: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSeries {
    pub headers: Vec<String>,
    pub times: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
}

impl FigureSeries {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        let j = self.headers.iter().position(|h| h == name)?;
        Some(&self.columns[j - 1])
    }

    pub fn to_report(&self, title: &str) -> Report {
        let headers: Vec<&str> = self.headers.iter().map(String::as_str).collect();
        let mut r = Report::new(title, &headers);
        for (i, &t) in self.times.iter().enumerate() {
            let mut row = vec![Cell::Value(t)];
            row.extend(self.columns.iter().map(|c| Cell::Value(c[i])));
            r.push(row);
        }
        r
    }
}

fn figure_times(horizon: f64) -> Vec<f64> {
    let n = (horizon / FIGURE_SPACING).round() as usize;
    (0..=n).map(|i| i as f64 * FIGURE_SPACING).collect()
}

/// `t,sim_mean,fluid[,adjusted]` for the figure model.
pub fn run_fluid_figure(with_adjusted: bool, opts: &RunOptions) -> Result<FigureSeries> {
    let model = figure_model()?;
    let horizon = opts.horizon.unwrap_or(FIGURE_HORIZON);
    let times = figure_times(horizon);
    let sim = mean_path(&model, &times, opts.replications, opts.seed);
    let fluid = solve_fluid(&model, horizon, opts.step)?;
    let mut headers = vec!["t".to_string(), "sim_mean".into(), "fluid".into()];
    let mut columns = vec![
        sim,
        times
            .iter()
            .map(|&t| fluid.value_at("x", t))
            .collect::<Result<_>>()?,
    ];
    if with_adjusted {
        let adj = solve_adjusted(&model, horizon, opts.step)?;
        headers.push("adjusted".into());
        columns.push(
            times
                .iter()
                .map(|&t| adj.value_at("x", t))
                .collect::<Result<_>>()?,
        );
    }
    Ok(FigureSeries {
        headers,
        times,
        columns,
    })
}

/// `t,analytical,numerical,sim_mean` for the infinite-server model.
pub fn run_figure4(opts: &RunOptions) -> Result<FigureSeries> {
    let m = table2_model();
    let horizon = opts.horizon.unwrap_or(FIGURE_HORIZON);
    let times = figure_times(horizon);
    let states = numeric_solution(&m, horizon, opts.step)?;
    let numeric: Vec<f64> = times
        .iter()
        .map(|&t| {
            let pos = t / opts.step;
            let i = (pos.floor() as usize).min(states.len() - 2);
            let w = pos - i as f64;
            states[i][0] + w * (states[i + 1][0] - states[i][0])
        })
        .collect();
    Ok(FigureSeries {
        headers: ["t", "analytical", "numerical", "sim_mean"]
            .map(String::from)
            .to_vec(),
        columns: vec![
            times.iter().map(|&t| closed_form_x(&m, t)).collect(),
            numeric,
            mean_path(&m.to_queue_model()?, &times, opts.replications, opts.seed),
        ],
        times,
    })
}

pub const FIGURE3_TAUS: [f64; 4] = [3.0, 5.0, 7.0, 9.0];

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapHistogram {
    pub tau: f64,
    pub histogram: Histogram,
    pub skewness: f64,
    pub aggregate: SimAggregate,
}

/// Histograms of simulated overlaps for `alpha = beta = 0.5`, `rho = 0.8`.
pub fn run_figure3(opts: &RunOptions) -> Result<Vec<OverlapHistogram>> {
    let model = table1_model(0.5, 0.5, 0.8)?;
    FIGURE3_TAUS
        .iter()
        .map(|&tau| {
            let horizon = table_horizon(tau, model.service_rate, opts);
            let run = run_replications(&model, &sim_config(opts, tau, horizon))?;
            let values = run.overlaps();
            Ok(OverlapHistogram {
                tau,
                histogram: histogram(&values, opts.bins)?,
                skewness: skewness(&values),
                aggregate: run.aggregate,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Single-point queries on a configured model

pub const ALL_METHODS: [Method; 5] = Method::ALL;

/// The closed-form parameters of an infinite-server sinusoidal model, if it has that shape.
pub fn as_sinusoidal_inf(model: &QueueModel) -> Option<SinusoidalInfModel> {
    if model.servers != Servers::Infinite || model.initial_count != 0.0 {
        return None;
    }
    match model.arrival.profile() {
        RateProfile::Sinusoidal {
            alpha,
            beta,
            baseline,
            servers_scale,
            rho,
        } => {
            let k = servers_scale * rho;
            Some(SinusoidalInfModel {
                alpha: *alpha,
                beta: beta * k,
                lambda: baseline * k,
                mu: model.service_rate,
            })
        }
        RateProfile::Tabulated { .. } => None,
    }
}

pub fn validate_methods_for(model: &QueueModel, methods: &[Method]) -> Result<()> {
    check_methods(methods, &ALL_METHODS, "overlap")?;
    if methods.contains(&Method::ClosedForm) && as_sinusoidal_inf(model).is_none() {
        return Err(OverlapError::Config(
            "closed-form requires infinite servers, a sinusoidal rate and an empty start".into(),
        ));
    }
    if methods.contains(&Method::NumericOde) && model.servers.is_finite() {
        return Err(OverlapError::Config(
            "numeric-ode requires infinite servers".into(),
        ));
    }
    Ok(())
}

pub fn run_overlap(
    model: &QueueModel,
    taus: &[f64],
    methods: &[Method],
    opts: &RunOptions,
) -> Result<Vec<Vec<OverlapResult>>> {
    validate_methods_for(model, methods)?;
    if taus.is_empty() {
        return Err(OverlapError::Config("no tau values given".into()));
    }
    taus.iter()
        .map(|&tau| {
            let horizon = table_horizon(tau, model.service_rate, opts);
            methods
                .iter()
                .map(|&m| match m {
                    Method::Fluid => overlap_fluid(model, tau, horizon, opts.step),
                    Method::Adjusted => overlap_adjusted(model, tau, horizon, opts.step),
                    Method::Simulation => run_replications(model, &sim_config(opts, tau, horizon))
                        .map(|r| r.aggregate.to_result(tau)),
                    Method::ClosedForm => {
                        let inf = as_sinusoidal_inf(model).expect("validated above");
                        Ok(point(
                            Method::ClosedForm,
                            tau,
                            closed_form_overlap(&inf, tau),
                        ))
                    }
                    Method::NumericOde => match as_sinusoidal_inf(model) {
                        Some(inf) => numeric_overlap_inf(&inf, tau, opts.step)
                            .map(|v| point(Method::NumericOde, tau, v)),
                        None => {
                            overlap_fluid(model, tau, horizon, opts.step).map(|r| OverlapResult {
                                method: Method::NumericOde,
                                ..r
                            })
                        }
                    },
                })
                .collect()
        })
        .collect()
}

fn point(method: Method, tau: f64, value: f64) -> OverlapResult {
    OverlapResult {
        method,
        tau,
        first_passage: None,
        expected_overlap: value,
        stats: None,
    }
}

pub fn overlap_report(methods: &[Method], results: &[Vec<OverlapResult>]) -> Report {
    let mut headers = vec!["tau".to_string()];
    for m in methods {
        headers.push(m.name().to_string());
        if matches!(m, Method::Fluid | Method::Adjusted) {
            headers.push(format!("{}_wait", m.name()));
        }
        if *m == Method::Simulation {
            headers.push("sim_variance".into());
            headers.push("sim_stderr".into());
        }
    }
    let refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    let mut report = Report::new("Expected overlapping time", &refs);
    for row in results {
        let mut cells = vec![Cell::Param(row[0].tau)];
        for r in row {
            cells.push(Cell::Value(r.expected_overlap));
            if matches!(r.method, Method::Fluid | Method::Adjusted) {
                cells.push(
                    r.first_passage
                        .and_then(|f| f.elapsed())
                        .map_or(Cell::Empty, Cell::Value),
                );
            }
            if let Some(s) = &r.stats {
                cells.push(Cell::Value(s.variance));
                cells.push(Cell::Value(s.stderr));
            }
        }
        report.push(cells);
    }
    report
}

// ---------------------------------------------------------------------------
// Uniform acceleration

pub const DEFAULT_ETAS: [u64; 3] = [1, 4, 16];
pub const CONVERGE_REPLICATIONS: u64 = 100;

/// `sup |X^eta / eta - x|` for each `eta` on the figure model over `[0, 10]`.
pub fn run_converge(etas: &[u64], tau: f64, opts: &RunOptions) -> Result<Vec<AccelReport>> {
    if etas.is_empty() {
        return Err(OverlapError::Config("no eta values given".into()));
    }
    let model = figure_model()?;
    let horizon = opts.horizon.unwrap_or(FIGURE_HORIZON);
    let fluid = solve_fluid(&model, horizon, opts.step)?;
    etas.iter()
        .map(|&eta| {
            let cfg = SimConfig {
                replications: opts.replications,
                eta,
                ..SimConfig::new(opts.seed, tau, horizon)
            };
            simulate_accelerated(&model, &cfg, &fluid)
        })
        .collect()
}

pub fn converge_report(reports: &[AccelReport], fluid_t0: Option<f64>) -> Report {
    let mut r = Report::new(
        "Uniform acceleration: sup |X^eta/eta - x|",
        &["eta", "mean_sup_error", "mean_t0_eta", "fluid_t0"],
    );
    for a in reports {
        r.push(vec![
            Cell::Count(a.eta),
            Cell::Value(a.mean_sup_error),
            a.mean_passage_time.map_or(Cell::Empty, Cell::Value),
            fluid_t0.map_or(Cell::Empty, Cell::Value),
        ]);
    }
    r
}

/// `t0` of the plain fluid model for the figure model at `tau`.
pub fn figure_fluid_t0(tau: f64, opts: &RunOptions) -> Result<Option<f64>> {
    let model = figure_model()?;
    let horizon = table_horizon(tau, model.service_rate, opts).max(tau + 20.0);
    Ok(overlap_fluid(&model, tau, horizon, opts.step)?
        .first_passage
        .and_then(|f| f.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> RunOptions {
        RunOptions {
            replications: 200,
            step: 1e-2,
            ..RunOptions::default()
        }
    }

    #[test]
    fn empty_method_list_is_config_error() {
        assert!(matches!(
            run_table1_rows(&TABLE1_ROWS[..1], &[], &quick()),
            Err(OverlapError::Config(_))
        ));
        assert!(run_table2_rows(&TABLE2_TAUS, &[Method::Fluid], &quick()).is_err());
    }

    #[test]
    fn closed_form_needs_infinite_sinusoid() {
        let finite = table1_model(0.5, 0.3, 0.8).unwrap();
        assert!(validate_methods_for(&finite, &[Method::ClosedForm]).is_err());
        assert!(validate_methods_for(&finite, &[Method::NumericOde]).is_err());
        let inf = table2_model().to_queue_model().unwrap();
        assert!(validate_methods_for(&inf, &[Method::ClosedForm, Method::NumericOde]).is_ok());
        let got = as_sinusoidal_inf(&inf).unwrap();
        assert_eq!(got, table2_model());
    }

    #[test]
    fn single_row_matches_full_run() {
        let opts = quick();
        let full = run_table1_rows(&TABLE1_ROWS, &TABLE1_METHODS, &opts).unwrap();
        let one = run_table1_rows(&TABLE1_ROWS[3..4], &TABLE1_METHODS, &opts).unwrap();
        assert_eq!(one[0], full[3]);
    }

    #[test]
    fn report_errors_recompute_from_columns() {
        let out = run_table1_rows(&TABLE1_ROWS[..2], &TABLE1_METHODS, &quick()).unwrap();
        let report = table1_report(&out);
        let csv = report.to_csv();
        let mut lines = csv.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let idx = |n: &str| header.iter().position(|h| *h == n).unwrap();
        for line in lines {
            let f: Vec<&str> = line.split(',').collect();
            let sim: f64 = f[idx("simulation")].parse().unwrap();
            for m in ["fluid", "adjusted"] {
                let v: f64 = f[idx(m)].parse().unwrap();
                let printed = f[idx(&format!("{m}_err_pct"))];
                assert_eq!(format!("{:.1}", (v - sim).abs() / sim * 100.0), printed);
            }
        }
    }

    #[test]
    fn overlap_query_on_infinite_model() {
        let model = table2_model().to_queue_model().unwrap();
        let methods = [Method::ClosedForm, Method::NumericOde, Method::Fluid];
        let res = run_overlap(&model, &[3.0], &methods, &quick()).unwrap();
        let cf = res[0][0].expected_overlap;
        assert!((cf - 11.41).abs() < 0.005);
        assert!((res[0][1].expected_overlap - cf).abs() < 1e-6);
        assert!((res[0][2].expected_overlap - cf).abs() < 1e-6);
        let report = overlap_report(&methods, &res);
        assert_eq!(report.headers[..3], ["tau", "closed-form", "numeric-ode"]);
    }
}
