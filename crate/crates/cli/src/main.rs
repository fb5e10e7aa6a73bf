use clap::{Args, Parser, Subcommand};
use cvqrnn_cli::commands::{
    exit_code_for, run_forecast, run_sweep, run_train, SweepArgs, SweepVariable, TrainArgs,
};
use cvqrnn_cli::manifest::ModelKind;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cvqrnn",
    version,
    about = "Continuous-variable quantum RNN simulator and experiment harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model on a dataset and emit manifest.json, metrics.csv,
    /// predictions.csv.
    Train(TrainFlags),
    /// Run one sub-run per (value, repeat) of a swept variable and aggregate
    /// the final costs.
    Sweep(SweepFlags),
    /// Re-emit predictions (including the feedback forecast) from a
    /// completed run directory.
    Forecast(ForecastFlags),
}

#[derive(Args, Clone)]
struct TrainFlags {
    /// Model to train: qrnn, lstm, or repeat-last.
    #[arg(long, default_value = "qrnn")]
    model: String,
    /// Dataset: bessel, sine, two-sine, triangle, damped-cosine, or mnist.
    #[arg(long, default_value = "bessel")]
    dataset: String,
    /// Qumode split as register+input, e.g. 2+1.
    #[arg(long, default_value = "2+1")]
    qumodes: String,
    /// Fock levels per mode.
    #[arg(long, default_value_t = 6)]
    cutoff: usize,
    /// Input window length T.
    #[arg(long, default_value_t = 4)]
    window: usize,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    /// Learning rate (default 0.01 for series, 0.005 for mnist).
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long, default_value_t = 7)]
    batch: usize,
    /// Trace-penalty weight η.
    #[arg(long, default_value_t = 10.0)]
    eta: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory for artifacts.
    #[arg(long)]
    out: PathBuf,
    /// Number of equidistant series points.
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Series domain end (default 8π: four quasi-periods).
    #[arg(long, default_value_t = 8.0 * std::f64::consts::PI)]
    x_max: f64,
    #[arg(long)]
    mnist_images: Option<PathBuf>,
    #[arg(long)]
    mnist_labels: Option<PathBuf>,
    /// Keep at most this many images labeled 3 or 6.
    #[arg(long, default_value_t = 1000)]
    mnist_limit: usize,
    /// Photon-loss parameter applied after each layer.
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Uniform data-noise amplitude.
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Multiplier applied to inputs before displacement encoding.
    #[arg(long, default_value_t = 1.0)]
    encoding_scale: f64,
    /// Forecast length (default: through the test half).
    #[arg(long)]
    horizon: Option<usize>,
    /// Write wall_seconds as 0.000 so artifacts are byte-reproducible.
    #[arg(long, default_value_t = false)]
    fixed_timing: bool,
}

#[derive(Args)]
struct SweepFlags {
    #[command(flatten)]
    train: TrainFlags,
    /// Swept variable: window-T, channel-beta, or data-epsilon.
    #[arg(long)]
    variable: String,
    /// Comma-separated values, e.g. 2,4,6,8.
    #[arg(long)]
    values: String,
    /// Sub-runs per value with derived seeds.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Parallel sub-runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct ForecastFlags {
    /// Completed run directory containing manifest.json.
    #[arg(long)]
    run: PathBuf,
    #[arg(long)]
    horizon: Option<usize>,
    /// Output directory (default: the run directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_model(name: &str) -> Result<ModelKind, String> {
    match name {
        "qrnn" => Ok(ModelKind::Qrnn),
        "lstm" => Ok(ModelKind::Lstm),
        "repeat-last" | "repeat_last" => Ok(ModelKind::RepeatLast),
        other => Err(format!("unknown model '{other}'")),
    }
}

fn parse_qumodes(spec: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = spec.split('+').collect();
    if parts.len() != 2 {
        return Err(format!("--qumodes expects n1+n2, got '{spec}'"));
    }
    let n1 = parts[0]
        .trim()
        .parse()
        .map_err(|_| format!("bad register count '{}'", parts[0]))?;
    let n2 = parts[1]
        .trim()
        .parse()
        .map_err(|_| format!("bad input count '{}'", parts[1]))?;
    Ok((n1, n2))
}

fn to_train_args(flags: &TrainFlags) -> Result<TrainArgs, String> {
    let model = parse_model(&flags.model)?;
    let (n1, n2) = parse_qumodes(&flags.qumodes)?;
    Ok(TrainArgs {
        model,
        dataset: flags.dataset.clone(),
        n1,
        n2,
        cutoff: flags.cutoff,
        window: flags.window,
        epochs: flags.epochs,
        lr: flags.lr,
        batch: flags.batch,
        eta: flags.eta,
        seed: flags.seed,
        out: flags.out.clone(),
        points: flags.points,
        x_max: flags.x_max,
        mnist_images: flags.mnist_images.clone(),
        mnist_labels: flags.mnist_labels.clone(),
        mnist_limit: flags.mnist_limit,
        beta: flags.beta,
        epsilon: flags.epsilon,
        encoding_scale: flags.encoding_scale,
        horizon: flags.horizon,
        fixed_timing: flags.fixed_timing,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<(), (i32, String)> = match cli.command {
        Command::Train(flags) => to_train_args(&flags)
            .map_err(|m| (2, m))
            .and_then(|args| {
                run_train(&args)
                    .map(|outcome| {
                        if let Some(m) = outcome.manifest.metrics.last() {
                            println!(
                                "done: train_cost {} test_cost {} ({} epochs) → {}",
                                m.train_cost,
                                m.test_cost,
                                outcome.manifest.metrics.len(),
                                outcome.out_dir.display()
                            );
                        } else {
                            println!("done: no epochs → {}", outcome.out_dir.display());
                        }
                    })
                    .map_err(|e| (exit_code_for(&e), e.to_string()))
            }),
        Command::Sweep(flags) => {
            let parsed: Result<(TrainArgs, SweepVariable, Vec<f64>), (i32, String)> = (|| {
                let base = to_train_args(&flags.train).map_err(|m| (2, m))?;
                let variable =
                    SweepVariable::parse(&flags.variable).map_err(|e| (2, e.to_string()))?;
                let values: Result<Vec<f64>, _> = flags
                    .values
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect();
                let values = values.map_err(|e| (2, format!("bad --values: {e}")))?;
                Ok((base, variable, values))
            })();
            parsed.and_then(|(base, variable, values)| {
                let args = SweepArgs {
                    base,
                    variable,
                    values,
                    repeats: flags.repeats,
                    jobs: flags.jobs,
                };
                run_sweep(&args)
                    .map(|path| println!("sweep aggregate → {}", path.display()))
                    .map_err(|e| (exit_code_for(&e), e.to_string()))
            })
        }
        Command::Forecast(flags) => {
            run_forecast(flags.run.as_path(), flags.horizon, flags.out.as_deref())
                .map(|path| println!("predictions → {}", path.display()))
                .map_err(|e| (exit_code_for(&e), e.to_string()))
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
