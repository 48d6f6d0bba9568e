use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wmmse_ic::complexity::{complexity_curves, ComplexityParams};
use wmmse_ic::experiment::{self, ExperimentSpec};
use wmmse_ic::validate;

#[derive(Parser)]
#[command(name = "wmmse", version, about = "Weighted-MMSE interference-channel simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep over SNR; writes a CSV table.
    Run(RunArgs),
    /// Operation-count and feedback curves over K; writes a CSV table.
    Complexity(ComplexityArgs),
    /// Runs the numerical self-checks and prints one line per check.
    Validate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` experiment file; flags given here take precedence.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output CSV (stdout if neither this nor `out` in the spec is set).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated SNR points in dB.
    #[arg(long)]
    snr: Option<String>,
    /// `sum`, `pernode` or a comma list of both.
    #[arg(long)]
    constraint: Option<String>,
    #[arg(long)]
    robust: bool,
    #[arg(long)]
    sigma_delta_frac: Option<f64>,
    #[arg(long)]
    sigma_eps_frac: Option<f64>,
    /// Comma list of `wmmse`, `simple_mmse`, `gradient`.
    #[arg(long)]
    methods: Option<String>,
    /// `equal`, `unequal` or a comma list of K weights.
    #[arg(long)]
    mu: Option<String>,
    /// Print a summary table to stderr.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct ComplexityArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    k_min: usize,
    #[arg(long, default_value_t = 10)]
    k_max: usize,
    #[arg(short = 'M', long = "tx-antennas", default_value_t = 5)]
    m: usize,
    #[arg(short = 'N', long = "rx-antennas", default_value_t = 5)]
    n: usize,
    #[arg(short = 'd', long = "streams", default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 10)]
    i1: usize,
    #[arg(long, default_value_t = 10)]
    i2: usize,
    #[arg(long, default_value_t = 10)]
    i3: usize,
}

fn build_spec(args: &RunArgs) -> Result<ExperimentSpec, String> {
    let mut spec = match &args.spec {
        Some(path) => ExperimentSpec::from_file(path).map_err(|e| e.to_string())?,
        None => ExperimentSpec::default(),
    };
    let mut overrides: Vec<(&str, String)> = Vec::new();
    if let Some(v) = args.trials {
        overrides.push(("trials", v.to_string()));
    }
    if let Some(v) = args.seed {
        overrides.push(("seed", v.to_string()));
    }
    if let Some(v) = &args.snr {
        overrides.push(("snr_db", v.clone()));
    }
    if let Some(v) = &args.constraint {
        overrides.push(("constraint", v.clone()));
    }
    if args.robust {
        overrides.push(("robust", "on".into()));
    }
    if let Some(v) = args.sigma_delta_frac {
        overrides.push(("sigma_delta_frac", v.to_string()));
    }
    if let Some(v) = args.sigma_eps_frac {
        overrides.push(("sigma_eps_frac", v.to_string()));
    }
    if let Some(v) = &args.methods {
        overrides.push(("methods", v.clone()));
    }
    if let Some(v) = &args.mu {
        overrides.push(("mu", v.clone()));
    }
    for (key, value) in overrides {
        spec.set(key, &value).map_err(|e| format!("--{}: {e}", key.replace('_', "-")))?;
    }
    if let Some(out) = &args.out {
        spec.output = Some(out.clone());
    }
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn run(args: RunArgs) -> Result<(), String> {
    let spec = build_spec(&args)?;
    let table = experiment::run_experiment(&spec).map_err(|e| e.to_string())?;
    if args.summary {
        eprint!("{}", experiment::summary(&table));
    }
    match &spec.output {
        Some(path) => experiment::emit_csv(&table, path).map_err(|e| e.to_string())?,
        None => print!("{}", experiment::result_csv(&table)),
    }
    let failed: usize = table.rows.iter().map(|r| r.failed).sum();
    if failed > 0 {
        return Err(format!("{failed} trial evaluations failed"));
    }
    Ok(())
}

fn complexity(args: ComplexityArgs) -> Result<(), String> {
    if args.k_min == 0 || args.k_min > args.k_max {
        return Err(format!("invalid K range {}..={}", args.k_min, args.k_max));
    }
    let base = ComplexityParams { k: args.k_min, m: args.m, n: args.n, d: args.d, i1: args.i1, i2: args.i2, i3: args.i3 };
    let rows = complexity_curves(&base, args.k_min..=args.k_max).map_err(|e| e.to_string())?;
    match &args.out {
        Some(path) => experiment::emit_complexity_curves(&rows, path).map_err(|e| e.to_string()),
        None => {
            print!("{}", experiment::complexity_csv(&rows));
            Ok(())
        }
    }
}

fn validate(seed: u64) -> Result<(), String> {
    let outcomes = validate::run_suite(seed);
    let mut failed = 0;
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        return Err(format!("{failed} of {} checks failed", outcomes.len()));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Complexity(args) => complexity(args),
        Command::Validate { seed } => validate(seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
