//! Command-line front end: acceleration sweeps, verification bundles,
//! oracle comparisons, and the prior-map anomaly table.
//!
//! Exit codes: 0 success, 1 usage error, 2 assertable-property failure,
//! 3 resource-budget exceeded.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use unruh_core::channel::{
    CHOI_SIDE_BUDGET, CUTOFF_BUDGET, DEFAULT_OP_BUDGET, EPSILON_RANGE, MAX_R,
};
use unruh_core::error::Error;
use unruh_core::measures::QUANTIFIER_NAMES;
use unruh_core::states::PRESET_NAMES;
use unruh_core::sweep::{
    ahn_csv, resolve_output, run_ahn, run_oracle, run_sweep, run_verify, sweep_csv,
    to_json_string, AhnConfig, FaultInjection, OracleConfig, OutputFormat, SweepConfig,
    VerifyConfig, OUTPUT_DIR_ENV,
};

#[derive(Parser)]
#[command(
    name = "unruh",
    version,
    about = "Noninertial bosonic channel: sweeps, verification, and anomaly tables",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep acceleration over a grid and tabulate resource measures.
    Sweep(SweepArgs),
    /// Run every property suite against one channel configuration.
    Verify(VerifyArgs),
    /// Compare the Kraus pipeline against the dilation oracle.
    Oracle(OracleArgs),
    /// Reproduce the prior-map trace anomaly side by side with the
    /// trace-preserving channel.
    Ahn(AhnArgs),
    /// Print presets, measure names, and budget limits.
    Info,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON config file; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset name or path to a density-matrix JSON file.
    #[arg(long)]
    state: Option<String>,
    /// Comma-separated accelerated party indices (default: last party).
    #[arg(long, value_delimiter = ',')]
    accelerated: Option<Vec<usize>>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    r_count: Option<usize>,
    /// Comma-separated Rindler frequencies; replaces the r grid.
    #[arg(long, value_delimiter = ',')]
    omega_grid: Option<Vec<f64>>,
    /// Comma-separated measure names.
    #[arg(long, value_delimiter = ',')]
    measures: Option<Vec<String>>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<OutputFormat>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated local dimensions.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Comma-separated accelerated party indices.
    #[arg(long, value_delimiter = ',')]
    accelerated: Option<Vec<usize>>,
    /// Shared acceleration parameter.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Samples per property suite.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Deliberately break the channel first: none, drop-kraus, rotate-output.
    #[arg(long)]
    inject_fault: Option<FaultInjection>,
    /// Where to write the JSON report bundle.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    accelerated: Option<Vec<usize>>,
    /// Comma-separated r values, one per accelerated party.
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<f64>>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AhnArgs {
    /// Comma-separated acceleration grid.
    #[arg(long, value_delimiter = ',')]
    r_grid: Option<Vec<f64>>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<OutputFormat>,
}

/// Write to stdout, treating a hung-up consumer (`unruh ahn | head`) as a
/// normal early finish instead of a panic.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {e}");
        std::process::exit(1);
    }
}

fn emitln(text: &str) {
    emit(text);
    emit("\n");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive here as "errors" but exit cleanly
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::BudgetExceeded { .. } => 3,
                Error::PropertyFailed(_) => 2,
                _ => 1,
            })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Ahn(args) => cmd_ahn(args),
        Command::Info => cmd_info(),
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let mut cfg = match &args.config {
        Some(path) => SweepConfig::from_file(path)?,
        None => SweepConfig::default(),
    };
    if let Some(v) = args.state {
        cfg.state = v;
    }
    if args.accelerated.is_some() {
        cfg.accelerated = args.accelerated;
    }
    if let Some(v) = args.r_min {
        cfg.r_min = v;
    }
    if let Some(v) = args.r_max {
        cfg.r_max = v;
    }
    if let Some(v) = args.r_count {
        cfg.r_count = v;
    }
    if args.omega_grid.is_some() {
        cfg.omega_grid = args.omega_grid;
    }
    if let Some(v) = args.measures {
        cfg.measures = v;
    }
    if let Some(v) = args.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if args.output.is_some() {
        cfg.output = args.output;
    }
    if let Some(v) = args.format {
        cfg.format = v;
    }

    let out = run_sweep(&cfg)?;
    let (text, default_name) = match cfg.format {
        OutputFormat::Csv => (sweep_csv(&out), "sweep.csv"),
        OutputFormat::Json => (to_json_string(&out)?, "sweep.json"),
    };
    let path = resolve_output(cfg.output.as_deref(), default_name)?;
    fs::write(&path, &text)?;
    emitln(&format!(
        "wrote {} rows to {}",
        out.rows.len(),
        path.display()
    ));
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let mut cfg = VerifyConfig::default();
    if let Some(v) = args.dims {
        cfg.dims = v;
    }
    if let Some(v) = args.accelerated {
        cfg.accelerated = v;
    }
    if let Some(v) = args.r {
        cfg.r = v;
    }
    if let Some(v) = args.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = args.samples {
        cfg.samples = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.inject_fault {
        cfg.fault = v;
    }

    let bundle = run_verify(&cfg)?;
    let path = resolve_output(args.output.as_deref(), "verify.json")?;
    fs::write(&path, to_json_string(&bundle)?)?;
    for report in &bundle.reports {
        emitln(&report.summary_line());
    }
    emitln(&format!("report bundle written to {}", path.display()));

    if bundle.pass {
        emitln(&format!("verify: PASS ({} properties)", bundle.reports.len()));
        Ok(ExitCode::SUCCESS)
    } else {
        let failed: Vec<&str> = bundle
            .reports
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.property.as_str())
            .collect();
        eprintln!("verify: FAIL ({})", failed.join("; "));
        Ok(ExitCode::from(2))
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode, Error> {
    let mut cfg = OracleConfig::default();
    if let Some(v) = args.dims {
        cfg.dims = v;
    }
    if let Some(v) = args.accelerated {
        cfg.accelerated = v;
    }
    if let Some(v) = args.r {
        cfg.r = v;
    }
    if let Some(v) = args.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = args.samples {
        cfg.samples = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }

    let bundle = run_oracle(&cfg)?;
    let path = resolve_output(args.output.as_deref(), "oracle.json")?;
    fs::write(&path, to_json_string(&bundle)?)?;
    for report in &bundle.reports {
        emitln(&report.summary_line());
    }
    emitln(&format!("report written to {}", path.display()));
    if bundle.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}

fn cmd_ahn(args: AhnArgs) -> Result<ExitCode, Error> {
    let mut cfg = AhnConfig::default();
    if let Some(v) = args.r_grid {
        cfg.r_grid = v;
    }
    if args.output.is_some() {
        cfg.output = args.output;
    }
    if let Some(v) = args.format {
        cfg.format = v;
    }

    let out = run_ahn(&cfg)?;
    let (text, default_name) = match cfg.format {
        OutputFormat::Csv => (ahn_csv(&out), "ahn.csv"),
        OutputFormat::Json => (to_json_string(&out)?, "ahn.json"),
    };
    let path = resolve_output(cfg.output.as_deref(), default_name)?;
    fs::write(&path, &text)?;
    // the table is small; show it as well as writing it
    emit(&ahn_csv(&out));
    emitln(&format!("table written to {}", path.display()));
    Ok(ExitCode::SUCCESS)
}

fn cmd_info() -> Result<ExitCode, Error> {
    emitln(&format!("state presets:    {}", PRESET_NAMES.join(", ")));
    emitln(&format!("measures:         {}", QUANTIFIER_NAMES.join(", ")));
    emitln("output formats:   csv, json");
    emitln("fault injections: none, drop-kraus, rotate-output");
    emitln(&format!(
        "limits:           max r {MAX_R}; epsilon in [{:.0e}, {:.0e}]",
        EPSILON_RANGE.0, EPSILON_RANGE.1
    ));
    emitln(&format!(
        "budgets:          {DEFAULT_OP_BUDGET} operators; Choi side {CHOI_SIDE_BUDGET}; cutoff {CUTOFF_BUDGET}"
    ));
    emitln(&format!("output dir env:   {OUTPUT_DIR_ENV}"));
    Ok(ExitCode::SUCCESS)
}
