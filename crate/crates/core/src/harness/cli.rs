//! `ancbench` command line.
//!
//! Exit codes: 0 on success, 1 for invalid arguments or experiment settings,
//! 2 for I/O and other run-time failures.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::{
    run_comparison, run_experiment, run_sweep, run_tables, write_csv, write_summary, write_tables, write_timings,
    ChannelChoice, ExperimentSpec, HarnessError, RunRecord, SignalSpec, SweepParam,
};
use crate::filters::{Algorithm, FilterConfig};
use crate::noise::{NoiseKind, NoiseSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ancbench", version, about = "Adaptive noise cancellation benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one algorithm on one scenario.
    Run {
        #[command(flatten)]
        signal: SignalArgs,
        #[arg(long, default_value = "gal")]
        algo: Algorithm,
        #[command(flatten)]
        filter: FilterArgs,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Run RLS, FTF and GAL on identical inputs.
    Compare {
        #[command(flatten)]
        signal: SignalArgs,
        #[command(flatten)]
        filter: FilterArgs,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Vary one parameter, everything else fixed.
    Sweep {
        #[command(flatten)]
        signal: SignalArgs,
        #[arg(long, default_value = "rls")]
        algo: Algorithm,
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values, e.g. `8,16,32`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        filter: FilterArgs,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Reproduce the comparison tables: correlation at 10 dB and output SNR
    /// at 30, 10 and -10 dB, for every signal and algorithm.
    Tables {
        #[command(flatten)]
        filter: FilterArgs,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SignalKind {
    Sinusoid,
    Sawtooth,
    Chirp,
    Audio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NoiseArg {
    White,
    Pink,
    Burst,
}

#[derive(Debug, Args)]
struct SignalArgs {
    #[arg(long, value_enum, default_value = "sinusoid")]
    signal: SignalKind,
    /// Input SNR of the clean signal against the interference at the primary sensor.
    #[arg(long = "snr-db", default_value_t = 10.0, allow_hyphen_values = true)]
    snr_db: f64,
}

#[derive(Debug, Args)]
struct FilterArgs {
    #[arg(long, default_value_t = 16)]
    order: usize,
    /// Forgetting factor (RLS, FTF).
    #[arg(long, default_value_t = 0.995)]
    lambda: f64,
    /// Initial regularization (RLS, FTF).
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Reflection-coefficient step (GAL).
    #[arg(long, default_value_t = 0.05)]
    mu: f64,
    /// Ladder step (GAL).
    #[arg(long = "ladder-mu", default_value_t = 0.05)]
    ladder_mu: f64,
    /// Energy smoothing (GAL).
    #[arg(long, default_value_t = 0.9)]
    beta: f64,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[arg(long, value_enum, default_value = "white")]
    noise: NoiseArg,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Length of the random interference path.
    #[arg(long = "channel-len", default_value_t = 4)]
    channel_len: usize,
    #[arg(long = "mse-window", default_value_t = 100)]
    mse_window: usize,
    /// 16-bit PCM WAV used as the clean signal.
    #[arg(long)]
    audio: Option<PathBuf>,
    #[arg(long = "out-dir", default_value = "out")]
    out_dir: PathBuf,
    /// Also write per-sample CSV traces.
    #[arg(long)]
    traces: bool,
}

impl FilterArgs {
    fn config(&self) -> FilterConfig {
        FilterConfig {
            order: self.order,
            forgetting_factor: self.lambda,
            init_delta: self.delta,
            step_size: self.mu,
            ladder_step: self.ladder_mu,
            smoothing: self.beta,
            ..FilterConfig::default()
        }
    }
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::Invalid(msg.into())
}

fn base_spec(filter: &FilterArgs, scenario: &ScenarioArgs) -> ExperimentSpec {
    let kind = match scenario.noise {
        NoiseArg::White => NoiseKind::White,
        NoiseArg::Pink => NoiseKind::Pink,
        NoiseArg::Burst => NoiseKind::Burst,
    };
    ExperimentSpec {
        noise: NoiseSpec::new(kind, scenario.seed),
        channel: ChannelChoice::Random { len: scenario.channel_len },
        filter: filter.config(),
        n_samples: scenario.samples,
        seed: scenario.seed,
        mse_window: scenario.mse_window,
        ..ExperimentSpec::default()
    }
}

fn full_spec(
    signal: &SignalArgs,
    filter: &FilterArgs,
    scenario: &ScenarioArgs,
) -> Result<ExperimentSpec, HarnessError> {
    let signal_spec = match (signal.signal, &scenario.audio) {
        (SignalKind::Audio, Some(path)) => SignalSpec::Audio { path: path.clone() },
        (SignalKind::Audio, None) => return Err(invalid("--signal audio requires --audio <path>")),
        (_, Some(_)) => return Err(invalid("--audio is only valid with --signal audio")),
        (SignalKind::Sinusoid, None) => SignalSpec::sinusoid(),
        (SignalKind::Sawtooth, None) => SignalSpec::sawtooth(),
        (SignalKind::Chirp, None) => SignalSpec::chirp(),
    };
    let spec = ExperimentSpec { signal: signal_spec, input_snr_db: signal.snr_db, ..base_spec(filter, scenario) };
    spec.validate()?;
    Ok(spec)
}

fn report(path: &Path) {
    println!("wrote {}", path.display());
}

/// Writes the summary and timings, plus one CSV per record named by `trace_names`.
fn persist(records: &[RunRecord], out_dir: &Path, traces: bool, trace_names: &[String]) -> Result<(), HarnessError> {
    let summary = out_dir.join("summary.json");
    write_summary(records, &summary)?;
    report(&summary);
    let timings = out_dir.join("timings.json");
    write_timings(records, &timings)?;
    report(&timings);
    if traces {
        for (record, name) in records.iter().zip(trace_names) {
            let path = out_dir.join(format!("{name}.csv"));
            write_csv(record, &path)?;
            report(&path);
        }
    }
    for r in records {
        println!(
            "{:<4} {:<9} order {:>3}  corr {:.4}  out SNR {:8.3} dB",
            r.spec.algorithm,
            r.spec.signal.name(),
            r.spec.filter.order,
            r.report.corr_coeff,
            r.report.output_snr_db
        );
    }
    Ok(())
}

fn execute(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run { signal, algo, filter, scenario } => {
            let spec = ExperimentSpec { algorithm: algo, ..full_spec(&signal, &filter, &scenario)? };
            let record = run_experiment(&spec)?;
            let names = [format!("trace_{algo}")];
            persist(&[record], &scenario.out_dir, scenario.traces, &names)
        }
        Command::Compare { signal, filter, scenario } => {
            let records = run_comparison(&full_spec(&signal, &filter, &scenario)?)?;
            let names: Vec<String> = Algorithm::ALL.iter().map(|a| format!("trace_{a}")).collect();
            persist(&records, &scenario.out_dir, scenario.traces, &names)
        }
        Command::Sweep { signal, algo, param, values, filter, scenario } => {
            let base = ExperimentSpec { algorithm: algo, ..full_spec(&signal, &filter, &scenario)? };
            let records = run_sweep(&base, param, &values)?;
            let names: Vec<String> = values.iter().map(|v| format!("trace_{}_{v}", param_name(param))).collect();
            persist(&records, &scenario.out_dir, scenario.traces, &names)
        }
        Command::Tables { filter, scenario } => {
            let base = base_spec(&filter, &scenario);
            base.validate()?;
            let runs = run_tables(&base, scenario.audio.as_deref())?;
            for path in write_tables(&runs, &scenario.out_dir, scenario.traces)? {
                report(&path);
            }
            Ok(())
        }
    }
}

fn param_name(p: SweepParam) -> &'static str {
    match p {
        SweepParam::Order => "order",
        SweepParam::Lambda => "lambda",
        SweepParam::Mu => "mu",
        SweepParam::Snr => "snr",
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_validation() {
                EXIT_INVALID
            } else {
                EXIT_RUNTIME
            }
        }
    }
}
