//! `twin-gap`: evaluate the large-gap expansions, run the determinant oracles,
//! compare the two, and validate the underlying identities.

mod render;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use twin_gap::asymptotics::{
    expansion_for_regime, expansion_one_gap, select_regime, RegimeThresholds,
};
use twin_gap::identities::{self, GridDensity, ResidualReport, Suite};
use twin_gap::oracle::{fredholm_logdet_with, toeplitz_logdet_intervals, NystromOptions};
use twin_gap::{Error, ExpansionBreakdown, GapPair, OracleResult, Regime};

use render::{Format, Table};

#[derive(Parser)]
#[command(name = "twin-gap", version, about = "Two-interval sine-kernel determinant asymptotics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Term-by-term large-s expansion of log det(I - K_s)
    #[command(allow_negative_numbers = true)]
    Asymp(AsympArgs),
    /// Numerical log det(I - K_s) by Nystrom or Toeplitz
    #[command(allow_negative_numbers = true)]
    Oracle(OracleArgs),
    /// Expansion against the Nystrom oracle over a set of s values
    #[command(allow_negative_numbers = true)]
    Compare(CompareArgs),
    /// Expansion breakdown over a set of s values
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Residuals of the theta and elliptic identities over a grid
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
struct GeometryArgs {
    /// Right end of the left gap (-1, v1)
    #[arg(long)]
    v1: Option<f64>,
    /// Left end of the right gap (v2, 1)
    #[arg(long)]
    v2: Option<f64>,
    /// Single gap (-1, 1)
    #[arg(long, conflicts_with_all = ["v1", "v2"])]
    onegap: bool,
}

#[derive(Clone, Copy)]
enum Geometry {
    OneGap,
    TwoGap(GapPair),
}

impl Geometry {
    fn intervals(&self) -> Vec<(f64, f64)> {
        match self {
            Geometry::OneGap => vec![(-1.0, 1.0)],
            Geometry::TwoGap(g) => g.intervals().to_vec(),
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Shorthand for --format json
    #[arg(long, conflicts_with_all = ["format", "csv"])]
    json: bool,
    /// Shorthand for --format csv
    #[arg(long, conflicts_with = "format")]
    csv: bool,
    /// Write to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            self.format
        }
    }
}

#[derive(Args)]
struct ThresholdArgs {
    /// Merging when s nu log(1/nu) is below this
    #[arg(long, default_value_t = 0.1)]
    merging_threshold: f64,
    /// Merging limit when s nu is below this
    #[arg(long, default_value_t = 0.1)]
    merging_limit_threshold: f64,
    /// Separating when min((1 - v2) s, (1 + v1) s) is below this
    #[arg(long, default_value_t = 10.0)]
    separating_threshold: f64,
}

impl ThresholdArgs {
    fn thresholds(&self) -> RegimeThresholds {
        RegimeThresholds {
            merging: self.merging_threshold,
            merging_limit: self.merging_limit_threshold,
            separating: self.separating_threshold,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeChoice {
    Auto,
    FixedTwoGap,
    OneGap,
    Merging,
    MergingLimit,
    Separating,
}

#[derive(Args)]
struct AsympArgs {
    #[arg(long)]
    s: f64,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Force a regime instead of selecting one from (s, v1, v2)
    #[arg(long, value_enum, default_value_t = RegimeChoice::Auto)]
    regime: RegimeChoice,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Nystrom,
    Toeplitz,
}

#[derive(Args)]
struct NodeArgs {
    /// Starting Gauss-Legendre nodes per interval
    #[arg(long, default_value_t = 24)]
    initial_nodes: usize,
    /// Cap on nodes per interval
    #[arg(long, default_value_t = 600)]
    max_nodes: usize,
    /// Stop doubling once successive values agree to this
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

impl NodeArgs {
    fn options(&self) -> NystromOptions {
        NystromOptions {
            initial_nodes: self.initial_nodes,
            max_nodes: self.max_nodes,
            tolerance: self.tol,
        }
    }
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    s: f64,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Explicit interval `a,b`; repeat for a union (replaces --v1/--v2/--onegap)
    #[arg(long = "interval", allow_hyphen_values = true, conflicts_with_all = ["v1", "v2", "onegap"])]
    intervals: Vec<String>,
    #[arg(long, value_enum, default_value_t = Method::Nystrom)]
    method: Method,
    /// Toeplitz matrix size (default: max(800, 8s))
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    nodes: NodeArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SValues {
    /// Comma-separated s values
    #[arg(long = "s", value_delimiter = ',')]
    s_list: Vec<f64>,
    /// Range `start:stop:step`, stop included
    #[arg(long)]
    s_range: Option<String>,
}

impl SValues {
    fn values(&self) -> anyhow::Result<Vec<f64>> {
        let mut out = self.s_list.clone();
        if let Some(range) = &self.s_range {
            out.extend(parse_range(range)?);
        }
        if out.is_empty() {
            return Err(usage("no s values given (use --s or --s-range)"));
        }
        if let Some(bad) = out.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(usage(format!("s must be positive and finite, got {bad}")));
        }
        Ok(out)
    }
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    s: SValues,
    #[command(flatten)]
    geometry: GeometryArgs,
    #[command(flatten)]
    nodes: NodeArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    s: SValues,
    #[command(flatten)]
    geometry: GeometryArgs,
    #[arg(long, value_enum, default_value_t = RegimeChoice::Auto)]
    regime: RegimeChoice,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteChoice {
    Theta,
    Geometry,
    Derivatives,
    Integrals,
    G1hat,
    All,
}

impl From<SuiteChoice> for Suite {
    fn from(s: SuiteChoice) -> Suite {
        match s {
            SuiteChoice::Theta => Suite::Theta,
            SuiteChoice::Geometry => Suite::Geometry,
            SuiteChoice::Derivatives => Suite::Derivatives,
            SuiteChoice::Integrals => Suite::Integrals,
            SuiteChoice::G1hat => Suite::G1hat,
            SuiteChoice::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GridChoice {
    Coarse,
    Fine,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = SuiteChoice::All)]
    suite: SuiteChoice,
    #[arg(long, value_enum, default_value_t = GridChoice::Coarse)]
    grid: GridChoice,
    /// Judge every residual against this tolerance instead of its own
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

/// Bad input: reported with exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

/// Library errors caused by the arguments become usage errors.
fn lib(e: Error) -> anyhow::Error {
    match e {
        Error::Domain(_) | Error::InvalidModulus(_) | Error::IllConditioned(_) | Error::AmbiguousRegime(_) => {
            usage(e.to_string())
        }
        other => anyhow::Error::new(other),
    }
}

fn parse_range(text: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(usage(format!("--s-range expects start:stop:step, got '{text}'")));
    };
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("'{x}' in --s-range is not a number")))
    };
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if !(step > 0.0) {
        return Err(usage("--s-range step must be positive"));
    }
    // index-based so the grid does not drift
    let count = ((stop - start) / step + 1e-9).floor();
    if count < 0.0 {
        return Ok(Vec::new());
    }
    Ok((0..=count as usize).map(|k| start + k as f64 * step).collect())
}

fn parse_interval(text: &str) -> anyhow::Result<(f64, f64)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| usage(format!("--interval expects a,b, got '{text}'")))?;
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("'{x}' in --interval is not a number")))
    };
    Ok((num(a)?, num(b)?))
}

fn resolve_geometry(args: &GeometryArgs) -> anyhow::Result<Geometry> {
    if args.onegap {
        return Ok(Geometry::OneGap);
    }
    match (args.v1, args.v2) {
        (Some(v1), Some(v2)) => {
            if !(v1 < v2) {
                return Err(usage(format!("v1 must be < v2 (got v1 = {v1}, v2 = {v2})")));
            }
            Ok(Geometry::TwoGap(GapPair::new(v1, v2).map_err(lib)?))
        }
        _ => Err(usage("give both --v1 and --v2, or --onegap")),
    }
}

fn check_s(s: f64) -> anyhow::Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("s must be positive and finite, got {s}")))
    }
}

#[derive(Serialize)]
struct AsympReport {
    s: f64,
    v1: Option<f64>,
    v2: Option<f64>,
    regime_rationale: String,
    #[serde(flatten)]
    breakdown: ExpansionBreakdown,
}

fn forced_regime(choice: RegimeChoice) -> Option<Regime> {
    match choice {
        RegimeChoice::Auto => None,
        RegimeChoice::FixedTwoGap => Some(Regime::FixedTwoGap),
        RegimeChoice::OneGap => Some(Regime::OneGap),
        RegimeChoice::Merging => Some(Regime::Merging),
        RegimeChoice::MergingLimit => Some(Regime::MergingLimit),
        RegimeChoice::Separating => Some(Regime::Separating),
    }
}

fn asymp_report(
    s: f64,
    geometry: Geometry,
    choice: RegimeChoice,
    thresholds: &RegimeThresholds,
) -> anyhow::Result<AsympReport> {
    check_s(s)?;
    let (breakdown, rationale) = match geometry {
        Geometry::OneGap => {
            if !matches!(choice, RegimeChoice::Auto | RegimeChoice::OneGap) {
                return Err(usage("--onegap only supports the one_gap regime"));
            }
            (expansion_one_gap(s).map_err(lib)?, "single gap (-1, 1)".to_string())
        }
        Geometry::TwoGap(g) => {
            let (regime, rationale) = match forced_regime(choice) {
                Some(r) => (r, "set on the command line".to_string()),
                None => select_regime(s, g.v1(), g.v2(), thresholds).map_err(lib)?,
            };
            if regime == Regime::OneGap {
                (expansion_one_gap(s).map_err(lib)?, rationale)
            } else {
                (expansion_for_regime(s, g.v1(), g.v2(), regime).map_err(lib)?, rationale)
            }
        }
    };
    let (v1, v2) = match geometry {
        Geometry::OneGap => (None, None),
        Geometry::TwoGap(g) => (Some(g.v1()), Some(g.v2())),
    };
    Ok(AsympReport {
        s,
        v1,
        v2,
        regime_rationale: rationale,
        breakdown,
    })
}

const BREAKDOWN_COLUMNS: [&str; 9] = [
    "s",
    "v1",
    "v2",
    "regime",
    "leading_s2",
    "log_s_term",
    "theta_term",
    "constant_term",
    "total",
];

fn breakdown_row(r: &AsympReport) -> Vec<String> {
    let b = &r.breakdown;
    vec![
        render::float(r.s),
        r.v1.map(render::float).unwrap_or_default(),
        r.v2.map(render::float).unwrap_or_default(),
        b.regime.to_string(),
        render::float(b.leading_s2),
        render::float(b.log_s_term),
        render::float(b.theta_term),
        render::float(b.constant_term),
        render::float(b.total),
    ]
}

fn cmd_asymp(args: &AsympArgs) -> anyhow::Result<ExitCode> {
    let geometry = resolve_geometry(&args.geometry)?;
    let report = asymp_report(args.s, geometry, args.regime, &args.thresholds.thresholds())?;
    let text = || {
        let b = &report.breakdown;
        let mut out = format!(
            "regime         {} ({})\nleading_s2     {}\nlog_s_term     {}\ntheta_term     {}\nconstant_term  {}\ntotal          {}\nerror          {}\n",
            b.regime,
            report.regime_rationale,
            b.leading_s2,
            b.log_s_term,
            b.theta_term,
            b.constant_term,
            b.total,
            b.error_order
        );
        for w in &b.warnings {
            out.push_str(&format!("warning        {w}\n"));
        }
        out
    };
    let table = || Table::new(&BREAKDOWN_COLUMNS, vec![breakdown_row(&report)]);
    render::emit(&args.output, "asymp", &report, table, text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct OracleReport {
    s: f64,
    method: &'static str,
    intervals: Vec<(f64, f64)>,
    #[serde(flatten)]
    result: OracleResult,
}

fn cmd_oracle(args: &OracleArgs) -> anyhow::Result<ExitCode> {
    check_s(args.s)?;
    let intervals = if args.intervals.is_empty() {
        resolve_geometry(&args.geometry)?.intervals()
    } else {
        args.intervals.iter().map(|t| parse_interval(t)).collect::<anyhow::Result<_>>()?
    };
    let (method, result) = match args.method {
        Method::Nystrom => (
            "nystrom",
            fredholm_logdet_with(args.s, &intervals, &args.nodes.options()).map_err(lib)?,
        ),
        Method::Toeplitz => {
            let n = args.n.unwrap_or_else(|| 800.max((8.0 * args.s).ceil() as usize));
            ("toeplitz", toeplitz_logdet_intervals(args.s, &intervals, n).map_err(lib)?)
        }
    };
    let report = OracleReport {
        s: args.s,
        method,
        intervals,
        result,
    };
    let r = &report.result;
    let text = || {
        format!(
            "log_det        {}\nnodes          {}\nconditioning   {:e}\nerror_estimate {:e}\nunreliable     {}\n",
            r.log_det, r.nodes_per_interval, r.smallest_one_minus_lambda, r.error_estimate, r.unreliable
        )
    };
    let table = || {
        Table::new(
            &["s", "method", "log_det", "nodes", "smallest_one_minus_lambda", "error_estimate", "unreliable"],
            vec![vec![
                render::float(report.s),
                method.to_string(),
                render::float(r.log_det),
                r.nodes_per_interval.to_string(),
                render::float(r.smallest_one_minus_lambda),
                render::float(r.error_estimate),
                r.unreliable.to_string(),
            ]],
        )
    };
    render::emit(&args.output, "oracle", &report, table, text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CompareRow {
    s: f64,
    asym_total: f64,
    oracle_logdet: f64,
    difference: f64,
    oracle_error_estimate: f64,
    unreliable: bool,
    regime: Regime,
}

#[derive(Serialize)]
struct CompareReport {
    v1: Option<f64>,
    v2: Option<f64>,
    rows: Vec<CompareRow>,
}

fn cmd_compare(args: &CompareArgs) -> anyhow::Result<ExitCode> {
    let values = args.s.values()?;
    let geometry = resolve_geometry(&args.geometry)?;
    let opts = args.nodes.options();
    let intervals = geometry.intervals();
    let rows: Vec<CompareRow> = values
        .par_iter()
        .map(|&s| -> anyhow::Result<CompareRow> {
            let asym = match geometry {
                Geometry::OneGap => expansion_one_gap(s).map_err(lib)?,
                Geometry::TwoGap(g) => twin_gap::asymptotics::expansion_two_gap(s, g).map_err(lib)?,
            };
            let oracle = fredholm_logdet_with(s, &intervals, &opts).map_err(lib)?;
            Ok(CompareRow {
                s,
                asym_total: asym.total,
                oracle_logdet: oracle.log_det,
                difference: oracle.log_det - asym.total,
                oracle_error_estimate: oracle.error_estimate,
                unreliable: oracle.unreliable,
                regime: asym.regime,
            })
        })
        .collect::<anyhow::Result<_>>()?;
    let (v1, v2) = match geometry {
        Geometry::OneGap => (None, None),
        Geometry::TwoGap(g) => (Some(g.v1()), Some(g.v2())),
    };
    let report = CompareReport { v1, v2, rows };
    let columns = [
        "s",
        "asym_total",
        "oracle_logdet",
        "difference",
        "oracle_error_estimate",
        "unreliable",
    ];
    let body = || -> Vec<Vec<String>> {
        report
            .rows
            .iter()
            .map(|r| {
                vec![
                    render::float(r.s),
                    render::float(r.asym_total),
                    render::float(r.oracle_logdet),
                    render::float(r.difference),
                    render::float(r.oracle_error_estimate),
                    r.unreliable.to_string(),
                ]
            })
            .collect()
    };
    let text = || render::aligned(&columns, &body());
    render::emit(&args.output, "compare", &report, || Table::new(&columns, body()), text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<ExitCode> {
    let values = args.s.values()?;
    let geometry = resolve_geometry(&args.geometry)?;
    let thresholds = args.thresholds.thresholds();
    let reports: Vec<AsympReport> = values
        .par_iter()
        .map(|&s| asymp_report(s, geometry, args.regime, &thresholds))
        .collect::<anyhow::Result<_>>()?;
    let body = || reports.iter().map(breakdown_row).collect::<Vec<_>>();
    let text = || render::aligned(&BREAKDOWN_COLUMNS, &body());
    #[derive(Serialize)]
    struct SweepReport<'a> {
        rows: &'a [AsympReport],
    }
    render::emit(
        &args.output,
        "sweep",
        &SweepReport { rows: &reports },
        || Table::new(&BREAKDOWN_COLUMNS, body()),
        text,
    )?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct IdentitySummary {
    identity_id: String,
    worst_residual: f64,
    tolerance: f64,
    checks: usize,
    failures: usize,
    pass: bool,
    worst_inputs: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct ValidateReport {
    suite: String,
    grid: String,
    pass: bool,
    checks: usize,
    failures: usize,
    identities: Vec<IdentitySummary>,
}

fn summarize(reports: &[ResidualReport]) -> Vec<IdentitySummary> {
    let mut by_id: BTreeMap<&str, IdentitySummary> = BTreeMap::new();
    for r in reports {
        let entry = by_id.entry(&r.identity_id).or_insert_with(|| IdentitySummary {
            identity_id: r.identity_id.clone(),
            worst_residual: f64::NEG_INFINITY,
            tolerance: r.tolerance,
            checks: 0,
            failures: 0,
            pass: true,
            worst_inputs: BTreeMap::new(),
        });
        entry.checks += 1;
        if !r.pass {
            entry.failures += 1;
            entry.pass = false;
        }
        if r.residual > entry.worst_residual {
            entry.worst_residual = r.residual;
            entry.tolerance = r.tolerance;
            entry.worst_inputs = r.inputs.clone();
        }
    }
    by_id.into_values().collect()
}

fn cmd_validate(args: &ValidateArgs) -> anyhow::Result<ExitCode> {
    if let Some(tol) = args.tol {
        if !(tol > 0.0) {
            return Err(usage(format!("--tol must be positive, got {tol}")));
        }
    }
    let suite: Suite = args.suite.into();
    let grid = match args.grid {
        GridChoice::Coarse => GridDensity::Coarse,
        GridChoice::Fine => GridDensity::Fine,
    };
    let per_point: Vec<Vec<ResidualReport>> = identities::grid_points(grid)
        .par_iter()
        .map(|&(v1, v2)| identities::run_suite_at(suite, v1, v2))
        .collect::<Result<_, _>>()
        .map_err(lib)?;
    let mut reports: Vec<ResidualReport> = per_point.into_iter().flatten().collect();
    if matches!(suite, Suite::Integrals | Suite::All) {
        reports.extend(identities::integral_suite().map_err(lib)?);
    }
    if let Some(tol) = args.tol {
        reports = reports.into_iter().map(|r| r.with_tolerance(tol)).collect();
    }
    let summary = summarize(&reports);
    let failures: usize = summary.iter().map(|s| s.failures).sum();
    let report = ValidateReport {
        suite: format!("{:?}", suite).to_lowercase(),
        grid: format!("{:?}", grid).to_lowercase(),
        pass: failures == 0,
        checks: reports.len(),
        failures,
        identities: summary,
    };
    let columns = ["identity_id", "worst_residual", "tolerance", "checks", "failures", "pass"];
    let body = || -> Vec<Vec<String>> {
        report
            .identities
            .iter()
            .map(|s| {
                vec![
                    s.identity_id.clone(),
                    render::float(s.worst_residual),
                    render::float(s.tolerance),
                    s.checks.to_string(),
                    s.failures.to_string(),
                    s.pass.to_string(),
                ]
            })
            .collect()
    };
    let text = || {
        let mut out = render::aligned(&columns, &body());
        out.push_str(&format!(
            "{}: {} checks, {} failed\n",
            if report.pass { "PASS" } else { "FAIL" },
            report.checks,
            report.failures
        ));
        out
    };
    render::emit(&args.output, "validate", &report, || Table::new(&columns, body()), text)?;
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("TWIN_GAP_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("TWIN_GAP_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    configure_threads()?;
    match &cli.command {
        Command::Asymp(a) => cmd_asymp(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
