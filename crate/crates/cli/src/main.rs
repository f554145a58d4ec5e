use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

mod commands;
mod config;
mod output;
mod sweep;

use sweep::Scale;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "QTHERMO_THREADS";

#[derive(Parser, Debug)]
#[command(name = "qthermo", version, about = "Dephasing-qubit thermometry in Ohmic-family baths")]
struct Cli {
    /// `key = value` file supplying default flags
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decoherence factor and its temperature derivative over a time sweep
    Gamma(GammaArgs),
    /// QFI and QSNR over a temperature × time grid
    QfiSurface(SurfaceArgs),
    /// Optimal interaction time for each temperature
    Topt(ToptArgs),
    /// Optimal temperature for each interaction time
    Tempopt(TempoptArgs),
    /// QSNR at the optimal interaction time for several ohmicities
    Qsnr(QsnrArgs),
    /// QFI and residual coherence over a time sweep
    Coherence(CoherenceArgs),
    /// Monte Carlo estimation run compared with the Cramér-Rao bound
    Simulate(SimulateArgs),
    /// Run the built-in invariant suite
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct QuadArgs {
    /// Relative tolerance of the frequency quadrature
    #[arg(long, default_value_t = 1e-8)]
    pub rel_tol: f64,
    /// Absolute tolerance of the frequency quadrature
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
    /// Frequency truncation in cutoff units
    #[arg(long, default_value_t = 60.0)]
    pub omega_max: f64,
    #[arg(long, default_value_t = 400_000)]
    pub max_panels: usize,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Output file (stdout when absent)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Emit a JSON document instead of CSV
    #[arg(long)]
    pub json: bool,
    /// Also write a gnuplot script next to the CSV (needs --out)
    #[arg(long)]
    pub plot: bool,
}

#[derive(Args, Debug, Clone)]
pub struct TimeSweepArgs {
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of time points
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub scale: Option<Scale>,
}

#[derive(Args, Debug, Clone)]
pub struct TempSweepArgs {
    #[arg(long)]
    pub temp_min: Option<f64>,
    #[arg(long)]
    pub temp_max: Option<f64>,
    /// Number of temperature points
    #[arg(long)]
    pub temp_points: Option<usize>,
    #[arg(long, value_enum)]
    pub temp_scale: Option<Scale>,
}

#[derive(Args, Debug, Clone)]
pub struct OptArgs {
    /// Lower end of the search bracket
    #[arg(long)]
    pub bracket_lo: Option<f64>,
    /// Upper end of the search bracket
    #[arg(long)]
    pub bracket_hi: Option<f64>,
    /// Coarse grid size before refinement
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Refinement tolerance (relative for log brackets)
    #[arg(long)]
    pub x_tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct GammaArgs {
    /// Ohmicity parameter
    #[arg(long)]
    pub s: f64,
    /// Bath temperature
    #[arg(long)]
    pub temp: f64,
    #[command(flatten)]
    pub time: TimeSweepArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SurfaceArgs {
    #[arg(long)]
    pub s: f64,
    #[command(flatten)]
    pub temp: TempSweepArgs,
    #[command(flatten)]
    pub time: TimeSweepArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ToptArgs {
    #[arg(long)]
    pub s: f64,
    #[command(flatten)]
    pub temp: TempSweepArgs,
    #[command(flatten)]
    pub opt: OptArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct TempoptArgs {
    #[arg(long)]
    pub s: f64,
    #[command(flatten)]
    pub time: TimeSweepArgs,
    #[command(flatten)]
    pub opt: OptArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct QsnrArgs {
    /// Comma-separated ohmicities
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,3")]
    pub s: Vec<f64>,
    #[command(flatten)]
    pub temp: TempSweepArgs,
    #[command(flatten)]
    pub opt: OptArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CoherenceArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub temp: f64,
    #[command(flatten)]
    pub time: TimeSweepArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub temp: f64,
    /// Interaction time, or `auto` for the QFI-optimal time
    #[arg(long, default_value = "auto")]
    pub t: String,
    /// Measurements per experiment
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    /// Independent experiments
    #[arg(long, default_value_t = 500)]
    pub reps: u64,
    #[arg(long, default_value_t = 1_234_567)]
    pub seed: u64,
    #[command(flatten)]
    pub quad: QuadArgs,
    /// Output file (stdout when absent)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Accepted for symmetry; the report is always JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub quad: QuadArgs,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

fn command() -> clap::Command {
    Cli::command().mut_subcommands(|c| c.args_override_self(true))
}

/// Splices config-file flags in right after the subcommand name.
fn expand_config(args: Vec<String>) -> anyhow::Result<Vec<String>> {
    let Some(path) = config::find_config_arg(&args) else {
        return Ok(args);
    };
    let entries = config::load(path.as_ref())?;
    let cmd = command();
    let Some(pos) = args.iter().skip(1).position(|a| cmd.find_subcommand(a).is_some()).map(|p| p + 1) else {
        return Ok(args);
    };
    let sub = cmd.find_subcommand(&args[pos]).expect("position found above");
    let mut kept = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            anyhow::bail!("config files cannot include other config files");
        }
        let known_anywhere = cmd
            .get_subcommands()
            .any(|c| c.get_arguments().any(|a| a.get_long() == Some(key.as_str())));
        if !known_anywhere {
            anyhow::bail!("unknown config key `{key}`");
        }
        // keys meant for other subcommands are ignored
        if sub.get_arguments().any(|a| a.get_long() == Some(key.as_str())) {
            kept.push((key, value));
        }
    }
    let is_switch = |key: &str| {
        sub.get_arguments()
            .find(|a| a.get_long() == Some(key))
            .is_some_and(|a| !a.get_action().takes_values())
    };
    let flags = config::to_flags(&kept, is_switch)?;
    let mut out = args[..=pos].to_vec();
    out.extend(flags);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // only fails if a global pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let args = match expand_config(raw) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(commands::EXIT_USAGE);
        }
    };
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { commands::EXIT_USAGE } else { 0 });
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(commands::EXIT_USAGE);
        }
    };
    init_threads();

    let result = match &cli.command {
        Command::Gamma(a) => commands::gamma(a),
        Command::QfiSurface(a) => commands::qfi_surface(a),
        Command::Topt(a) => commands::topt(a),
        Command::Tempopt(a) => commands::tempopt(a),
        Command::Qsnr(a) => commands::qsnr(a),
        Command::Coherence(a) => commands::coherence(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Validate(a) => commands::validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
