//! Command-line front end.
//!
//! Four subcommands cover the library surface: `analyze` optimizes every
//! transmit scheme at a single operating point, `simulate` runs a
//! finite-size Monte Carlo for one scheme, `sweep` walks a parameter grid,
//! and `compare` puts analog and quantized feedback side by side under a
//! common uplink budget. Results are written as CSV or JSON to a file or
//! to standard output; diagnostics and per-point failures go to standard
//! error.
//!
//! Scenario parameters resolve in three layers: built-in defaults, then an
//! optional JSON config file (`--config`), then explicit flags. Unknown
//! config keys are rejected by name. The worker thread count comes from
//! `--threads`, falling back to the `TWINCELL_THREADS` environment
//! variable, falling back to one thread per core; results are identical
//! for every thread count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::analog;
use crate::digital;
use crate::error::{Error, Result};
use crate::experiments::{
    run_compare, run_sweep, BudgetConversion, CompareSpec, CompareTable, ConversionMode,
    FeedbackKind, McSettings, SchemePoint, SweepSpec, SweepTable, SweepVariable, SystemParams,
};
use crate::sim::{self, Feedback, RvqMode, Scheme, SimConfig, SimSummary};

/// Top-level argument parser.
#[derive(Debug, Parser)]
#[command(
    name = "twincell",
    version,
    about = "Two-cell downlink cooperation: asymptotic analysis and Monte Carlo simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize all three transmit schemes at one operating point.
    Analyze(AnalyzeArgs),
    /// Monte Carlo simulation of one scheme at finite system size.
    Simulate(SimulateArgs),
    /// Sweep one parameter, optimizing every scheme at each grid point.
    Sweep(SweepArgs),
    /// Compare analog and quantized feedback under a shared uplink budget.
    Compare(CompareArgs),
}

/// Scenario flags shared by every subcommand. Each one overrides the
/// config file, which overrides the built-in default.
#[derive(Debug, Clone, Copy, Default, Args)]
struct ParamFlags {
    /// Users per antenna (default 0.6).
    #[arg(long)]
    beta: Option<f64>,

    /// Cross-channel gain (default 0.5).
    #[arg(long)]
    epsilon: Option<f64>,

    /// Downlink SNR in dB (default 10).
    #[arg(long)]
    gamma_d_db: Option<f64>,

    /// Uplink SNR in dB (default 0).
    #[arg(long)]
    gamma_u_db: Option<f64>,

    /// Uplink symbols per channel coefficient (default 1).
    #[arg(long)]
    kappa: Option<f64>,

    /// Total feedback bits per antenna (default 4).
    #[arg(long)]
    bt_bar: Option<f64>,
}

/// Output destination and format flags.
#[derive(Debug, Clone, Default, Args)]
struct OutputFlags {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Worker threads; defaults to TWINCELL_THREADS, then all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Mcp,
    Cbf,
    Scp,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Mcp => Scheme::Mcp,
            SchemeArg::Cbf => Scheme::Cbf,
            SchemeArg::Scp => Scheme::Scp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FeedbackArg {
    Analog,
    Rvq,
}

impl From<FeedbackArg> for FeedbackKind {
    fn from(f: FeedbackArg) -> FeedbackKind {
        match f {
            FeedbackArg::Analog => FeedbackKind::Analog,
            FeedbackArg::Rvq => FeedbackKind::Rvq,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VarArg {
    Epsilon,
    #[value(name = "n", alias = "n-antennas")]
    NAntennas,
    BtBar,
    Kappa,
}

impl From<VarArg> for SweepVariable {
    fn from(v: VarArg) -> SweepVariable {
        match v {
            VarArg::Epsilon => SweepVariable::Epsilon,
            VarArg::NAntennas => SweepVariable::NAntennas,
            VarArg::BtBar => SweepVariable::BtBar,
            VarArg::Kappa => SweepVariable::Kappa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    UplinkRate,
    Modulation,
}

impl From<ModeArg> for ConversionMode {
    fn from(m: ModeArg) -> ConversionMode {
        match m {
            ModeArg::UplinkRate => ConversionMode::UplinkRate,
            ModeArg::Modulation => ConversionMode::Modulation,
        }
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// JSON config file with scenario parameters.
    #[arg(long)]
    config: Option<PathBuf>,

    #[command(flatten)]
    params: ParamFlags,

    /// Feedback model to optimize.
    #[arg(long, value_enum, default_value_t = FeedbackArg::Analog)]
    feedback: FeedbackArg,

    /// Antennas per station for the Monte Carlo cross-check.
    #[arg(long, default_value_t = 30)]
    n: usize,

    /// Monte Carlo realizations; 0 disables the cross-check.
    #[arg(long, default_value_t = 0)]
    realizations: usize,

    /// Monte Carlo RNG seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// JSON config file with scenario parameters.
    #[arg(long)]
    config: Option<PathBuf>,

    #[command(flatten)]
    params: ParamFlags,

    /// Transmit scheme to simulate.
    #[arg(long, value_enum, default_value_t = SchemeArg::Mcp)]
    scheme: SchemeArg,

    /// Feedback model.
    #[arg(long, value_enum, default_value_t = FeedbackArg::Analog)]
    feedback: FeedbackArg,

    /// Antennas per station.
    #[arg(long, default_value_t = 30)]
    n: usize,

    /// Channel realizations.
    #[arg(long, default_value_t = 500)]
    realizations: usize,

    /// RNG seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Uplink power split toward the direct channel; analog feedback only.
    /// Defaults to the optimized split.
    #[arg(long)]
    nu: Option<f64>,

    /// Direct-channel bits per antenna; quantized feedback only. Defaults
    /// to the optimized split.
    #[arg(long)]
    bd_bar: Option<f64>,

    /// Rescaled regularization; defaults to the optimized value.
    #[arg(long)]
    rho: Option<f64>,

    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON config file with scenario parameters.
    #[arg(long)]
    config: Option<PathBuf>,

    #[command(flatten)]
    params: ParamFlags,

    /// Swept variable.
    #[arg(long, value_enum)]
    var: VarArg,

    /// First grid point.
    #[arg(long)]
    start: f64,

    /// Last grid point (inclusive).
    #[arg(long)]
    stop: f64,

    /// Grid spacing.
    #[arg(long)]
    step: f64,

    /// Feedback model to optimize.
    #[arg(long, value_enum, default_value_t = FeedbackArg::Analog)]
    feedback: FeedbackArg,

    /// Antennas per station for the Monte Carlo columns.
    #[arg(long, default_value_t = 30)]
    n: usize,

    /// Monte Carlo realizations per point; 0 disables the columns.
    #[arg(long, default_value_t = 0)]
    realizations: usize,

    /// Monte Carlo RNG seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// JSON config file with scenario parameters.
    #[arg(long)]
    config: Option<PathBuf>,

    #[command(flatten)]
    params: ParamFlags,

    /// First cross-channel gain.
    #[arg(long, default_value_t = 0.05)]
    start: f64,

    /// Last cross-channel gain (inclusive).
    #[arg(long, default_value_t = 0.95)]
    stop: f64,

    /// Grid spacing.
    #[arg(long, default_value_t = 0.05)]
    step: f64,

    /// Rule converting the analog feedback window into bits.
    #[arg(long, value_enum, default_value_t = ModeArg::Modulation)]
    mode: ModeArg,

    /// Bits per uplink symbol for the modulation rule.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,

    #[command(flatten)]
    output: OutputFlags,
}

/// Scenario fields accepted in a JSON config file. Field names match the
/// command-line flags; unknown keys are rejected by name.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileConfig {
    beta: Option<f64>,
    epsilon: Option<f64>,
    gamma_d_db: Option<f64>,
    gamma_u_db: Option<f64>,
    kappa: Option<f64>,
    bt_bar: Option<f64>,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn resolve_params(config: Option<&Path>, flags: &ParamFlags) -> Result<SystemParams> {
    let mut p = SystemParams::default();
    if let Some(path) = config {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let file: FileConfig = serde_json::from_str(&text)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        apply(&mut p.beta, file.beta);
        apply(&mut p.epsilon, file.epsilon);
        apply(&mut p.gamma_d_db, file.gamma_d_db);
        apply(&mut p.gamma_u_db, file.gamma_u_db);
        apply(&mut p.kappa, file.kappa);
        apply(&mut p.bt_bar, file.bt_bar);
    }
    apply(&mut p.beta, flags.beta);
    apply(&mut p.epsilon, flags.epsilon);
    apply(&mut p.gamma_d_db, flags.gamma_d_db);
    apply(&mut p.gamma_u_db, flags.gamma_u_db);
    apply(&mut p.kappa, flags.kappa);
    apply(&mut p.bt_bar, flags.bt_bar);
    Ok(p)
}

fn apply(slot: &mut f64, value: Option<f64>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let n = threads.or_else(|| {
        std::env::var("TWINCELL_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = n {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))
}

/// Parses the process arguments, runs the requested command, and maps the
/// outcome to an exit code: 0 on full success, 1 when any computation
/// failed. Argument parsing errors exit through clap with code 2.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Sweep(args) => run_sweep_cmd(args),
        Command::Compare(args) => run_compare_cmd(args),
    }
}

fn mc_settings(n: usize, realizations: usize, seed: u64) -> Option<McSettings> {
    (realizations > 0).then_some(McSettings {
        n_antennas: n,
        n_realizations: realizations,
        seed,
    })
}

fn run_analyze(args: AnalyzeArgs) -> Result<bool> {
    let fixed = resolve_params(args.config.as_deref(), &args.params)?;
    let spec = SweepSpec {
        variable: SweepVariable::Epsilon,
        start: fixed.epsilon,
        stop: fixed.epsilon,
        step: 1.0,
        fixed,
        feedback: args.feedback.into(),
        mc: mc_settings(args.n, args.realizations, args.seed),
    };
    let pool = thread_pool(args.output.threads)?;
    let table = pool.install(|| run_sweep(&spec))?;
    emit_sweep(&table, &args.output)
}

fn run_sweep_cmd(args: SweepArgs) -> Result<bool> {
    let fixed = resolve_params(args.config.as_deref(), &args.params)?;
    let spec = SweepSpec {
        variable: args.var.into(),
        start: args.start,
        stop: args.stop,
        step: args.step,
        fixed,
        feedback: args.feedback.into(),
        mc: mc_settings(args.n, args.realizations, args.seed),
    };
    let pool = thread_pool(args.output.threads)?;
    let table = pool.install(|| run_sweep(&spec))?;
    emit_sweep(&table, &args.output)
}

fn run_compare_cmd(args: CompareArgs) -> Result<bool> {
    let fixed = resolve_params(args.config.as_deref(), &args.params)?;
    let spec = CompareSpec {
        start: args.start,
        stop: args.stop,
        step: args.step,
        fixed,
        conversion: BudgetConversion {
            mode: args.mode.into(),
            kappa: fixed.kappa,
            eta: args.eta,
        },
    };
    let pool = thread_pool(args.output.threads)?;
    let table = pool.install(|| run_compare(&spec))?;
    emit_compare(&table, &args.output)
}

/// Picks the simulated operating point: the analytically optimized
/// allocation and regularization for the chosen scheme, with any explicit
/// `--nu`, `--bd-bar`, or `--rho` override applied on top.
fn operating_point(
    sys: &SystemParams,
    scheme: Scheme,
    feedback: FeedbackKind,
    args: &SimulateArgs,
) -> Result<(Feedback, f64)> {
    match feedback {
        FeedbackKind::Analog => {
            if args.bd_bar.is_some() {
                return Err(Error::config("--bd-bar applies to quantized feedback"));
            }
            let p = analog_params(sys);
            let opt = match scheme {
                Scheme::Mcp => analog::mcp_optimize(&p)?,
                Scheme::Cbf => analog::cbf_optimize(&p)?,
                Scheme::Scp => analog::scp_optimize(&p)?,
            };
            let feedback = Feedback::Analog {
                nu: args.nu.unwrap_or(opt.nu_star),
                gamma_u: sys.gamma_u(),
                kappa: sys.kappa,
            };
            Ok((feedback, args.rho.unwrap_or(opt.rho_star)))
        }
        FeedbackKind::Rvq => {
            if args.nu.is_some() {
                return Err(Error::config("--nu applies to analog feedback"));
            }
            let p = digital_params(sys);
            let (bd_star, rho_star) = match scheme {
                Scheme::Mcp => {
                    let opt = digital::mcp_optimize_q(&p)?;
                    (opt.bits.bd_bar, opt.rho_star)
                }
                Scheme::Cbf => {
                    let opt = digital::cbf_joint_opt(&p)?;
                    (opt.bits.bd_bar, opt.rho_star)
                }
                Scheme::Scp => {
                    let opt = digital::scp_limiting_sinr_q(&p)?;
                    (sys.bt_bar, opt.rho_star)
                }
            };
            let bd_bar = args.bd_bar.unwrap_or(bd_star);
            if !(0.0..=sys.bt_bar).contains(&bd_bar) {
                return Err(Error::config(format!(
                    "--bd-bar must lie in [0, {}]",
                    sys.bt_bar
                )));
            }
            let feedback = Feedback::Rvq {
                bd_bar,
                bc_bar: sys.bt_bar - bd_bar,
                mode: RvqMode::Statistical,
            };
            Ok((feedback, args.rho.unwrap_or(rho_star)))
        }
    }
}

fn analog_params(sys: &SystemParams) -> analog::AnalogParams {
    analog::AnalogParams {
        beta: sys.beta,
        epsilon: sys.epsilon,
        gamma_d: sys.gamma_d(),
        gamma_u: sys.gamma_u(),
        kappa: sys.kappa,
    }
}

fn digital_params(sys: &SystemParams) -> digital::DigitalParams {
    digital::DigitalParams {
        beta: sys.beta,
        epsilon: sys.epsilon,
        gamma_d: sys.gamma_d(),
        bt_bar: sys.bt_bar,
    }
}

fn run_simulate(args: SimulateArgs) -> Result<bool> {
    let sys = resolve_params(args.config.as_deref(), &args.params)?;
    let scheme: Scheme = args.scheme.into();
    let (feedback, rho) = operating_point(&sys, scheme, args.feedback.into(), &args)?;
    let k = (sys.beta * args.n as f64).round() as usize;
    let mut cfg = SimConfig {
        n_antennas: args.n,
        n_users_per_cell: k.max(1),
        epsilon: sys.epsilon,
        gamma_d: sys.gamma_d(),
        scheme,
        feedback,
        alpha: 1.0,
        n_realizations: args.realizations,
        seed: args.seed,
    };
    cfg.alpha = sim::alpha_from_rho(&cfg, rho)?;
    let pool = thread_pool(args.output.threads)?;
    let summary = pool.install(|| sim::run_simulation(&cfg))?;
    eprintln!(
        "simulate: scheme={} n={} k={} realizations={} mean_sinr={:.6} limit_sinr={:.6} normalized_diff={:.6}",
        scheme,
        cfg.n_antennas,
        cfg.n_users_per_cell,
        cfg.n_realizations,
        summary.mean_sinr,
        summary.limit_sinr,
        summary.normalized_diff
    );
    emit_simulation(&summary, &args.output)
}

// ---------------------------------------------------------------------------
// Output emission.
//
// Both emitters are deliberately hand-rolled so CSV and JSON print floats
// identically (12 significant digits) and stay byte-stable across runs and
// thread counts.

#[derive(Debug, Clone)]
enum Cell {
    Int(u64),
    Num(f64),
    OptNum(Option<f64>),
    Text(String),
}

fn float_repr(v: f64) -> String {
    format!("{:.11e}", v)
}

fn csv_cell(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) => float_repr(*v),
        Cell::OptNum(Some(v)) => float_repr(*v),
        Cell::OptNum(None) => String::new(),
        Cell::Text(s) => s.clone(),
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn json_cell(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) if v.is_finite() => float_repr(*v),
        Cell::Num(_) => "null".to_string(),
        Cell::OptNum(Some(v)) if v.is_finite() => float_repr(*v),
        Cell::OptNum(_) => "null".to_string(),
        Cell::Text(s) => json_string(s),
    }
}

fn csv_table(header: &[String], rows: &[Vec<Cell>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(csv_cell).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn json_object(header: &[String], row: &[Cell]) -> String {
    let fields: Vec<String> = header
        .iter()
        .zip(row.iter())
        .map(|(name, cell)| format!("{}:{}", json_string(name), json_cell(cell)))
        .collect();
    format!("{{{}}}", fields.join(","))
}

fn json_rows(header: &[String], rows: &[Vec<Cell>]) -> String {
    let objects: Vec<String> = rows.iter().map(|row| json_object(header, row)).collect();
    format!("[{}]", objects.join(","))
}

const SCHEME_FIELDS: [&str; 12] = [
    "sinr",
    "allocation",
    "rho",
    "regime",
    "gamma_e",
    "gamma",
    "delta_d",
    "delta_c",
    "omega_d",
    "omega_c",
    "mc_sinr",
    "mc_diff",
];

fn sweep_header() -> Vec<String> {
    let mut header = vec!["x".to_string()];
    for scheme in ["mcp", "cbf", "scp"] {
        for field in SCHEME_FIELDS {
            header.push(format!("{scheme}_{field}"));
        }
    }
    header
}

fn push_point(row: &mut Vec<Cell>, p: &SchemePoint) {
    row.push(Cell::Num(p.sinr));
    row.push(Cell::Num(p.allocation));
    row.push(Cell::Num(p.rho));
    row.push(Cell::Text(p.regime.clone()));
    row.push(Cell::OptNum(p.gamma_e));
    row.push(Cell::OptNum(p.gamma));
    row.push(Cell::Num(p.delta_d));
    row.push(Cell::Num(p.delta_c));
    row.push(Cell::Num(p.omega_d));
    row.push(Cell::Num(p.omega_c));
    row.push(Cell::OptNum(p.mc_sinr));
    row.push(Cell::OptNum(p.mc_diff));
}

fn sweep_cells(table: &SweepTable) -> Vec<Vec<Cell>> {
    table
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![Cell::Num(r.x)];
            push_point(&mut row, &r.mcp);
            push_point(&mut row, &r.cbf);
            push_point(&mut row, &r.scp);
            row
        })
        .collect()
}

fn failures_json(failures: &[crate::experiments::SweepFailure]) -> String {
    let items: Vec<String> = failures
        .iter()
        .map(|f| {
            format!(
                "{{\"x\":{},\"message\":{}}}",
                float_repr(f.x),
                json_string(&f.message)
            )
        })
        .collect();
    format!("[{}]", items.join(","))
}

fn emit_sweep(table: &SweepTable, output: &OutputFlags) -> Result<bool> {
    for f in &table.failures {
        eprintln!("warning: point x={} failed: {}", f.x, f.message);
    }
    if table.rows.is_empty() {
        return Err(Error::EmptyResults);
    }
    let header = sweep_header();
    let cells = sweep_cells(table);
    let text = match output.format {
        Format::Csv => csv_table(&header, &cells),
        Format::Json => format!(
            "{{\"rows\":{},\"failures\":{}}}\n",
            json_rows(&header, &cells),
            failures_json(&table.failures)
        ),
    };
    write_output(output.out.as_deref(), &text)?;
    Ok(table.failures.is_empty())
}

fn compare_header() -> Vec<String> {
    [
        "x",
        "bt_bar",
        "mcp_analog",
        "mcp_rvq",
        "cbf_analog",
        "cbf_rvq",
        "scp_analog",
        "scp_rvq",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn emit_compare(table: &CompareTable, output: &OutputFlags) -> Result<bool> {
    for f in &table.failures {
        eprintln!("warning: point x={} failed: {}", f.x, f.message);
    }
    if table.rows.is_empty() {
        return Err(Error::EmptyResults);
    }
    let header = compare_header();
    let cells: Vec<Vec<Cell>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                Cell::Num(r.x),
                Cell::Num(r.bt_bar),
                Cell::Num(r.mcp_analog),
                Cell::Num(r.mcp_rvq),
                Cell::Num(r.cbf_analog),
                Cell::Num(r.cbf_rvq),
                Cell::Num(r.scp_analog),
                Cell::Num(r.scp_rvq),
            ]
        })
        .collect();
    let text = match output.format {
        Format::Csv => csv_table(&header, &cells),
        Format::Json => format!(
            "{{\"rows\":{},\"failures\":{}}}\n",
            json_rows(&header, &cells),
            failures_json(&table.failures)
        ),
    };
    write_output(output.out.as_deref(), &text)?;
    Ok(table.failures.is_empty())
}

fn emit_simulation(summary: &SimSummary, output: &OutputFlags) -> Result<bool> {
    if summary.reports.is_empty() {
        return Err(Error::EmptyResults);
    }
    let header: Vec<String> = ["realization", "mean_sinr", "sum_rate", "normalized_diff"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let cells: Vec<Vec<Cell>> = summary
        .reports
        .iter()
        .enumerate()
        .map(|(i, rep)| {
            let users = (rep.per_user_sinr[0].len() + rep.per_user_sinr[1].len()) as f64;
            let mean: f64 = rep.per_user_sinr.iter().flatten().sum::<f64>() / users;
            vec![
                Cell::Int(i as u64),
                Cell::Num(mean),
                Cell::Num(rep.sum_rate),
                Cell::Num(rep.normalized_diff),
            ]
        })
        .collect();
    let text = match output.format {
        Format::Csv => csv_table(&header, &cells),
        Format::Json => {
            let summary_fields: Vec<String> = [
                ("mean_sinr", summary.mean_sinr),
                ("mean_sum_rate", summary.mean_sum_rate),
                ("limit_sinr", summary.limit_sinr),
                ("normalized_diff", summary.normalized_diff),
            ]
            .iter()
            .map(|(name, v)| format!("{}:{}", json_string(name), json_cell(&Cell::Num(*v))))
            .collect();
            format!(
                "{{\"summary\":{{{}}},\"realizations\":{}}}\n",
                summary_fields.join(","),
                json_rows(&header, &cells)
            )
        }
    };
    write_output(output.out.as_deref(), &text)?;
    Ok(true)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => fs::write(path, text).map_err(|e| io_err(path, e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn defaults_then_file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        fs::write(&path, r#"{"beta": 0.9, "kappa": 4.0}"#).unwrap();
        let flags = ParamFlags {
            kappa: Some(2.0),
            ..ParamFlags::default()
        };
        let p = resolve_params(Some(&path), &flags).unwrap();
        assert_eq!(p.beta, 0.9);
        assert_eq!(p.kappa, 2.0);
        assert_eq!(p.epsilon, 0.5);
        assert_eq!(p.gamma_d_db, 10.0);
    }

    #[test]
    fn unknown_config_keys_are_rejected_by_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        fs::write(&path, r#"{"beta": 0.9, "gamma_db": 5.0}"#).unwrap();
        let err = resolve_params(Some(&path), &ParamFlags::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gamma_db"), "{msg}");
    }

    #[test]
    fn float_cells_print_twelve_significant_digits() {
        assert_eq!(float_repr(1.0), "1.00000000000e0");
        assert_eq!(float_repr(0.062_5), "6.25000000000e-2");
        let cell = Cell::OptNum(None);
        assert_eq!(csv_cell(&cell), "");
        assert_eq!(json_cell(&cell), "null");
        assert_eq!(json_cell(&Cell::Num(f64::NAN)), "null");
    }

    #[test]
    fn json_strings_escape_specials() {
        assert_eq!(json_string("plain"), "\"plain\"");
        assert_eq!(json_string("a\"b\\c"), "\"a\\\"b\\\\c\"");
        assert_eq!(json_string("x\ny"), "\"x\\u000ay\"");
    }

    #[test]
    fn csv_and_json_emitters_agree_on_a_small_table() {
        let header = vec!["x".to_string(), "value".to_string(), "tag".to_string()];
        let rows = vec![
            vec![
                Cell::Num(0.5),
                Cell::OptNum(Some(2.0)),
                Cell::Text("on".to_string()),
            ],
            vec![Cell::Num(1.0), Cell::OptNum(None), Cell::Text("off".to_string())],
        ];
        let csv = csv_table(&header, &rows);
        assert_eq!(
            csv,
            "x,value,tag\n5.00000000000e-1,2.00000000000e0,on\n1.00000000000e0,,off\n"
        );
        let json = json_rows(&header, &rows);
        assert_eq!(
            json,
            "[{\"x\":5.00000000000e-1,\"value\":2.00000000000e0,\"tag\":\"on\"},\
             {\"x\":1.00000000000e0,\"value\":null,\"tag\":\"off\"}]"
        );
    }

    #[test]
    fn sweep_header_covers_every_scheme_field() {
        let header = sweep_header();
        assert_eq!(header.len(), 1 + 3 * SCHEME_FIELDS.len());
        assert_eq!(header[0], "x");
        assert!(header.contains(&"mcp_sinr".to_string()));
        assert!(header.contains(&"cbf_gamma".to_string()));
        assert!(header.contains(&"scp_mc_diff".to_string()));
    }

    #[test]
    fn operating_point_rejects_mismatched_overrides() {
        let sys = SystemParams::default();
        let args = SimulateArgs {
            config: None,
            params: ParamFlags::default(),
            scheme: SchemeArg::Mcp,
            feedback: FeedbackArg::Analog,
            n: 10,
            realizations: 10,
            seed: 1,
            nu: None,
            bd_bar: Some(2.0),
            rho: None,
            output: OutputFlags::default(),
        };
        assert!(operating_point(&sys, Scheme::Mcp, FeedbackKind::Analog, &args).is_err());

        let args = SimulateArgs {
            nu: Some(0.5),
            bd_bar: None,
            ..args
        };
        assert!(operating_point(&sys, Scheme::Mcp, FeedbackKind::Rvq, &args).is_err());
    }

    #[test]
    fn operating_point_defaults_to_the_optimum() {
        let sys = SystemParams::default();
        let args = SimulateArgs {
            config: None,
            params: ParamFlags::default(),
            scheme: SchemeArg::Mcp,
            feedback: FeedbackArg::Analog,
            n: 10,
            realizations: 10,
            seed: 1,
            nu: None,
            bd_bar: None,
            rho: None,
            output: OutputFlags::default(),
        };
        let (feedback, rho) =
            operating_point(&sys, Scheme::Mcp, FeedbackKind::Analog, &args).unwrap();
        let opt = analog::mcp_optimize(&analog_params(&sys)).unwrap();
        assert_eq!(rho, opt.rho_star);
        match feedback {
            Feedback::Analog { nu, .. } => assert_eq!(nu, opt.nu_star),
            _ => panic!("expected analog feedback"),
        }
    }
}
