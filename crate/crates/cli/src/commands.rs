//! Implementation of the `train`, `sweep`, and `forecast` subcommands:
//! dataset resolution, model construction, the run loop, and artifact
//! emission (manifest.json, metrics.csv, predictions.csv, aggregate.csv).

use crate::manifest::{DatasetSpec, ModelKind, ParamCounts, RunManifest};
use crate::seeds::{derive_stream_seed, derive_subrun_seed};
use cvqrnn_core::baseline::{match_hidden_size, LstmModel, LstmParams, RepeatLastModel};
use cvqrnn_core::channels::{add_data_noise, DataNoiseSpec, LossSpec};
use cvqrnn_core::datasets::{
    dataset_from_values, load_mnist, series_to_csv, SeriesDataset, SeriesKind,
};
use cvqrnn_core::gates::LayerParams;
use cvqrnn_core::qrnn::{sigmoid, QRNNConfig, QrnnModel};
use cvqrnn_core::training::{
    evaluate, train, CostKind, CostSpec, EpochMetrics, TaskData, TrainConfig, TrainableModel,
};
use cvqrnn_core::Error as CoreError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Exit status mapping: configuration problems → 2, numerical failures → 3.
pub fn exit_code_for(err: &CoreError) -> i32 {
    match err {
        CoreError::NumericalInconsistency(_)
        | CoreError::NumericalFailure { .. }
        | CoreError::NotHermitian(_) => 3,
        _ => 2,
    }
}

#[derive(Debug, Clone)]
pub struct TrainArgs {
    pub model: ModelKind,
    pub dataset: String,
    pub n1: usize,
    pub n2: usize,
    pub cutoff: usize,
    pub window: usize,
    pub epochs: usize,
    pub lr: Option<f64>,
    pub batch: usize,
    pub eta: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub points: usize,
    pub x_max: f64,
    pub mnist_images: Option<PathBuf>,
    pub mnist_labels: Option<PathBuf>,
    pub mnist_limit: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub encoding_scale: f64,
    pub horizon: Option<usize>,
    pub fixed_timing: bool,
}

impl TrainArgs {
    pub fn is_mnist(&self) -> bool {
        self.dataset == "mnist"
    }

    /// Learning-rate default: 0.01 for series prediction, 0.005 for images.
    pub fn resolved_lr(&self) -> f64 {
        self.lr.unwrap_or(if self.is_mnist() { 0.005 } else { 0.01 })
    }
}

/// Either task's resolved data: the windowed series (kept for prediction
/// emission) and the flattened training arrays.
pub struct ResolvedData {
    pub task: TaskData,
    pub series: Option<SeriesDataset>,
    pub class_counts: Option<(usize, usize)>,
    pub warning: Option<String>,
    pub cost: CostSpec,
}

pub fn resolve_dataset(args: &TrainArgs) -> Result<ResolvedData, CoreError> {
    let noise_seed = derive_stream_seed(args.seed, "noise");
    if args.is_mnist() {
        let (images, labels) = match (&args.mnist_images, &args.mnist_labels) {
            (Some(i), Some(l)) => (i, l),
            _ => {
                return Err(CoreError::invalid(
                    "mnist dataset requires --mnist-images and --mnist-labels",
                ))
            }
        };
        let ds = load_mnist(images, labels, args.mnist_limit)?;
        let mut cost = CostSpec::bce();
        cost.eta = args.eta;
        Ok(ResolvedData {
            task: TaskData::from_images(&ds),
            series: None,
            class_counts: Some(ds.class_counts),
            warning: ds.shortfall_warning.clone(),
            cost,
        })
    } else {
        let kind = SeriesKind::parse(&args.dataset)?;
        let mut ds = cvqrnn_core::datasets::generate_series(
            kind,
            args.points,
            (0.0, args.x_max),
            args.window,
        )?;
        if args.epsilon > 0.0 {
            let noisy = add_data_noise(
                &ds.values,
                &DataNoiseSpec::new(args.epsilon, noise_seed)?,
            );
            ds = dataset_from_values(ds.xs.clone(), noisy, args.window)?;
        }
        let mut cost = CostSpec::mse();
        cost.eta = args.eta;
        Ok(ResolvedData {
            task: TaskData::from_series(&ds),
            series: Some(ds),
            class_counts: None,
            warning: None,
            cost,
        })
    }
}

fn qrnn_config(args: &TrainArgs) -> QRNNConfig {
    QRNNConfig {
        n1: args.n1,
        n2: args.n2,
        cutoff: args.cutoff,
        window: args.window,
        forecast_len: args.horizon.unwrap_or(0),
        encoding_scale: args.encoding_scale,
    }
}

fn float_cell(v: f64) -> String {
    format!("{v}")
}

pub fn metrics_csv(metrics: &[EpochMetrics], fixed_timing: bool) -> String {
    let mut out = String::from("epoch,train_cost,test_cost,accuracy,wall_seconds\n");
    for m in metrics {
        let acc = m.accuracy.map(float_cell).unwrap_or_default();
        let wall = if fixed_timing {
            "0.000".to_string()
        } else {
            format!("{:.3}", m.wall_seconds)
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            m.epoch,
            float_cell(m.train_cost),
            float_cell(m.test_cost),
            acc,
            wall
        );
    }
    out
}

/// One model behind a common interface for artifact emission.
pub enum AnyModel {
    Qrnn(QrnnModel),
    Lstm(LstmModel),
    RepeatLast(RepeatLastModel),
}

impl AnyModel {
    pub fn predict_value(&self, input: &[f64]) -> Result<f64, CoreError> {
        Ok(match self {
            AnyModel::Qrnn(m) => m.predict(input)?.value,
            AnyModel::Lstm(m) => m.predict(input)?.value,
            AnyModel::RepeatLast(m) => m.predict(input)?.value,
        })
    }

    pub fn forecast_values(&self, input: &[f64], horizon: usize) -> Result<Vec<f64>, CoreError> {
        match self {
            AnyModel::Qrnn(m) => m.forecast(input, horizon),
            AnyModel::Lstm(m) => m.forecast(input, horizon),
            AnyModel::RepeatLast(m) => m.forecast(input, horizon),
        }
    }

    pub fn final_params(&self) -> Vec<f64> {
        match self {
            AnyModel::Qrnn(m) => m.params.to_flat(),
            AnyModel::Lstm(m) => m.params.to_flat(),
            AnyModel::RepeatLast(_) => Vec::new(),
        }
    }
}

/// Prediction artifact: one-step predictions over both halves, plus the
/// feedback forecast launched from the first test window.
pub fn predictions_csv(
    model: &AnyModel,
    series: &SeriesDataset,
    horizon: usize,
) -> Result<String, CoreError> {
    let mut out = String::from("x,target,prediction,phase\n");
    for (phase, windows) in [
        ("train", &series.train_windows),
        ("test", &series.test_windows),
    ] {
        for w in windows {
            let pred = model.predict_value(&w.input)?;
            let _ = writeln!(
                out,
                "{},{},{},{}",
                float_cell(series.xs[w.target_index]),
                float_cell(w.target),
                float_cell(pred),
                phase
            );
        }
    }
    if horizon > 0 || !series.test_windows.is_empty() {
        let first = &series.test_windows[0];
        let forecast = model.forecast_values(&first.input, horizon)?;
        for (tau, value) in forecast.iter().enumerate() {
            let idx = first.target_index + tau;
            if idx >= series.xs.len() {
                break;
            }
            let _ = writeln!(
                out,
                "{},{},{},forecast",
                float_cell(series.xs[idx]),
                float_cell(series.values[idx]),
                float_cell(*value)
            );
        }
    }
    Ok(out)
}

/// Classification artifact: per-example probabilities.
pub fn classification_csv(model: &AnyModel, data: &TaskData) -> Result<String, CoreError> {
    let mut out = String::from("x,target,prediction,phase\n");
    let mut index = 0usize;
    for (phase, inputs, targets) in [
        ("train", &data.train_inputs, &data.train_targets),
        ("test", &data.test_inputs, &data.test_targets),
    ] {
        for (input, target) in inputs.iter().zip(targets.iter()) {
            let prob = sigmoid(model.predict_value(input)?);
            let _ = writeln!(
                out,
                "{index},{},{},{phase}",
                float_cell(*target),
                float_cell(prob)
            );
            index += 1;
        }
    }
    Ok(out)
}

pub struct TrainOutcome {
    pub manifest: RunManifest,
    pub out_dir: PathBuf,
}

pub fn run_train(args: &TrainArgs) -> Result<TrainOutcome, CoreError> {
    let started = chrono::Utc::now().to_rfc3339();
    let resolved = resolve_dataset(args)?;
    let cfg = qrnn_config(args);
    cfg.validate()?;
    let lr = args.resolved_lr();
    let mut train_cfg = TrainConfig::new(lr, args.epochs, args.seed);
    train_cfg.batch_size = args.batch;

    let init_seed = derive_stream_seed(args.seed, "init");
    let qrnn_reference = LayerParams::param_count(cfg.n_modes());
    let loss_spec = if args.beta > 0.0 {
        Some(LossSpec::all_modes(args.beta, cfg.n_modes())?)
    } else {
        None
    };

    let mut lstm_hidden = None;
    let mut lstm_matched = None;
    let (model, metrics, model_count): (AnyModel, Vec<EpochMetrics>, usize) = match args.model {
        ModelKind::Qrnn => {
            let mut rng = ChaCha8Rng::seed_from_u64(init_seed);
            let mut m = QrnnModel::random_init(cfg.clone(), &mut rng)?.with_loss(loss_spec);
            let metrics = train(&mut m, &resolved.task, &resolved.cost, &train_cfg)?;
            let count = m.param_count();
            (AnyModel::Qrnn(m), metrics, count)
        }
        ModelKind::Lstm => {
            let d = match_hidden_size(qrnn_reference, 1, 1);
            lstm_hidden = Some(d);
            let mut rng = ChaCha8Rng::seed_from_u64(init_seed);
            let mut m = LstmModel {
                params: LstmParams::random_init(d, 1, 1, &mut rng),
            };
            lstm_matched = Some(m.param_count());
            let metrics = train(&mut m, &resolved.task, &resolved.cost, &train_cfg)?;
            let count = m.param_count();
            (AnyModel::Lstm(m), metrics, count)
        }
        ModelKind::RepeatLast => {
            // no training: a single evaluation row
            let m = RepeatLastModel;
            let (train_cost, test_cost) = evaluate(&m, &resolved.task, &resolved.cost)?;
            let accuracy = match resolved.cost.kind {
                CostKind::Bce => Some(cvqrnn_core::training::classification_accuracy(
                    &m,
                    &resolved.task.test_inputs,
                    &resolved.task.test_targets,
                )?),
                CostKind::Mse => None,
            };
            let metrics = vec![EpochMetrics {
                epoch: 0,
                train_cost,
                test_cost,
                accuracy,
                wall_seconds: 0.0,
            }];
            (AnyModel::RepeatLast(m), metrics, 0)
        }
    };

    // artifacts
    std::fs::create_dir_all(&args.out)?;
    std::fs::write(
        args.out.join("metrics.csv"),
        metrics_csv(&metrics, args.fixed_timing),
    )?;
    let horizon = match &resolved.series {
        Some(series) => {
            let default_horizon = series
                .values
                .len()
                .saturating_sub(series.values.len() / 2 + args.window + 1);
            let horizon = args.horizon.unwrap_or(default_horizon);
            std::fs::write(
                args.out.join("predictions.csv"),
                predictions_csv(&model, series, horizon)?,
            )?;
            std::fs::write(args.out.join("series.csv"), series_to_csv(series))?;
            horizon
        }
        None => {
            std::fs::write(
                args.out.join("predictions.csv"),
                classification_csv(&model, &resolved.task)?,
            )?;
            0
        }
    };

    let manifest = RunManifest {
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        command: "train".into(),
        model: args.model,
        dataset: DatasetSpec {
            kind: args.dataset.clone(),
            n_points: args.points,
            x_max: args.x_max,
            window: args.window,
            mnist_images: args
                .mnist_images
                .as_ref()
                .map(|p| p.display().to_string()),
            mnist_labels: args
                .mnist_labels
                .as_ref()
                .map(|p| p.display().to_string()),
            mnist_limit: args.mnist_limit,
            epsilon: args.epsilon,
            noise_seed: derive_stream_seed(args.seed, "noise"),
        },
        qrnn: cfg,
        train: train_cfg,
        cost: resolved.cost.clone(),
        beta: args.beta,
        seed: args.seed,
        init_seed,
        param_counts: ParamCounts {
            model: model_count,
            qrnn_reference,
            lstm_hidden,
            lstm_matched,
        },
        class_counts: resolved.class_counts,
        dataset_warning: resolved.warning.clone(),
        horizon,
        fixed_timing: args.fixed_timing,
        final_params: model.final_params(),
        metrics,
        started_utc: started,
        finished_utc: chrono::Utc::now().to_rfc3339(),
    };
    std::fs::write(args.out.join("manifest.json"), manifest.to_json())?;
    Ok(TrainOutcome {
        manifest,
        out_dir: args.out.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    WindowT,
    ChannelBeta,
    DataEpsilon,
}

impl SweepVariable {
    pub fn parse(name: &str) -> Result<Self, CoreError> {
        match name {
            "window-T" | "window-t" | "window_t" => Ok(SweepVariable::WindowT),
            "channel-beta" | "channel_beta" => Ok(SweepVariable::ChannelBeta),
            "data-epsilon" | "data_epsilon" => Ok(SweepVariable::DataEpsilon),
            other => Err(CoreError::invalid(format!(
                "unknown sweep variable '{other}'"
            ))),
        }
    }
}

pub struct SweepArgs {
    pub base: TrainArgs,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub repeats: usize,
    pub jobs: usize,
}

/// Aggregate rows: `(value, repeat, final train, final test)` for completed
/// sub-runs; failures carry the error text instead.
pub enum SubRunRecord {
    Done {
        value: f64,
        repeat: usize,
        final_train: f64,
        final_test: f64,
    },
    Failed {
        value: f64,
        repeat: usize,
        message: String,
    },
}

pub fn run_sweep(args: &SweepArgs) -> Result<PathBuf, CoreError> {
    if args.values.is_empty() {
        return Err(CoreError::invalid("sweep needs at least one value"));
    }
    if args.repeats < 1 {
        return Err(CoreError::invalid("sweep needs at least one repeat"));
    }
    std::fs::create_dir_all(&args.base.out)?;

    let tasks: Vec<(usize, f64, usize)> = args
        .values
        .iter()
        .enumerate()
        .flat_map(|(vi, &v)| (0..args.repeats).map(move |r| (vi, v, r)))
        .collect();

    let execute = |&(vi, value, repeat): &(usize, f64, usize)| -> SubRunRecord {
        let mut sub = args.base.clone();
        sub.seed = derive_subrun_seed(args.base.seed, vi, repeat);
        match args.variable {
            SweepVariable::WindowT => sub.window = value.round() as usize,
            SweepVariable::ChannelBeta => sub.beta = value,
            SweepVariable::DataEpsilon => sub.epsilon = value,
        }
        sub.out = args
            .base
            .out
            .join(format!("run_v{vi}_r{repeat}"));
        match run_train(&sub) {
            Ok(outcome) => {
                let last = outcome.manifest.metrics.last();
                SubRunRecord::Done {
                    value,
                    repeat,
                    final_train: last.map(|m| m.train_cost).unwrap_or(f64::NAN),
                    final_test: last.map(|m| m.test_cost).unwrap_or(f64::NAN),
                }
            }
            Err(e) => SubRunRecord::Failed {
                value,
                repeat,
                message: e.to_string(),
            },
        }
    };

    let records: Vec<SubRunRecord> = if args.jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs)
            .build()
            .map_err(|e| CoreError::invalid(format!("thread pool: {e}")))?;
        pool.install(|| tasks.par_iter().map(execute).collect())
    } else {
        tasks.iter().map(execute).collect()
    };

    let mut out = String::from("value,repeat,final_train_cost,final_test_cost\n");
    let mut failures = String::new();
    for rec in &records {
        match rec {
            SubRunRecord::Done {
                value,
                repeat,
                final_train,
                final_test,
            } => {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    float_cell(*value),
                    repeat,
                    float_cell(*final_train),
                    float_cell(*final_test)
                );
            }
            SubRunRecord::Failed {
                value,
                repeat,
                message,
            } => {
                let _ = writeln!(out, "{},{},,", float_cell(*value), repeat);
                let _ = writeln!(failures, "value {value} repeat {repeat}: {message}");
            }
        }
    }
    // summary rows: mean and min–max band per value (the paper-style plot data)
    for (vi, &value) in args.values.iter().enumerate() {
        let finals: Vec<(f64, f64)> = records
            .iter()
            .filter_map(|r| match r {
                SubRunRecord::Done {
                    value: v,
                    final_train,
                    final_test,
                    ..
                } if (*v - value).abs() < 1e-12 => Some((*final_train, *final_test)),
                _ => None,
            })
            .collect();
        let _ = vi;
        if finals.is_empty() {
            continue;
        }
        let n = finals.len() as f64;
        let mean_train = finals.iter().map(|f| f.0).sum::<f64>() / n;
        let mean_test = finals.iter().map(|f| f.1).sum::<f64>() / n;
        let min_test = finals.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
        let max_test = finals.iter().map(|f| f.1).fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(
            out,
            "{},mean,{},{}",
            float_cell(value),
            float_cell(mean_train),
            float_cell(mean_test)
        );
        let _ = writeln!(out, "{},min,,{}", float_cell(value), float_cell(min_test));
        let _ = writeln!(out, "{},max,,{}", float_cell(value), float_cell(max_test));
    }
    let path = args.base.out.join("aggregate.csv");
    std::fs::write(&path, out)?;
    if !failures.is_empty() {
        std::fs::write(args.base.out.join("failures.txt"), failures)?;
    }
    Ok(path)
}

/// Rebuild the trained model and dataset from a run directory and re-emit
/// predictions (the same code path as training-time emission).
pub fn run_forecast(
    run_dir: &Path,
    horizon_override: Option<usize>,
    out_dir: Option<&Path>,
) -> Result<PathBuf, CoreError> {
    let manifest_path = run_dir.join("manifest.json");
    let json = std::fs::read_to_string(&manifest_path)
        .map_err(|e| CoreError::FormatError(format!("cannot read {manifest_path:?}: {e}")))?;
    let manifest = RunManifest::from_json(&json)
        .map_err(|e| CoreError::FormatError(format!("corrupt manifest: {e}")))?;

    let args = TrainArgs {
        model: manifest.model,
        dataset: manifest.dataset.kind.clone(),
        n1: manifest.qrnn.n1,
        n2: manifest.qrnn.n2,
        cutoff: manifest.qrnn.cutoff,
        window: manifest.dataset.window,
        epochs: manifest.train.epochs,
        lr: Some(manifest.train.lr),
        batch: manifest.train.batch_size,
        eta: manifest.cost.eta,
        seed: manifest.seed,
        out: run_dir.to_path_buf(),
        points: manifest.dataset.n_points,
        x_max: manifest.dataset.x_max,
        mnist_images: manifest.dataset.mnist_images.clone().map(PathBuf::from),
        mnist_labels: manifest.dataset.mnist_labels.clone().map(PathBuf::from),
        mnist_limit: manifest.dataset.mnist_limit,
        beta: manifest.beta,
        epsilon: manifest.dataset.epsilon,
        encoding_scale: manifest.qrnn.encoding_scale,
        horizon: Some(manifest.horizon),
        fixed_timing: manifest.fixed_timing,
    };
    let resolved = resolve_dataset(&args)?;

    let loss_spec = if manifest.beta > 0.0 {
        Some(LossSpec::all_modes(manifest.beta, manifest.qrnn.n_modes())?)
    } else {
        None
    };
    let model = match manifest.model {
        ModelKind::Qrnn => {
            let params =
                LayerParams::from_flat(manifest.qrnn.n_modes(), &manifest.final_params)?;
            AnyModel::Qrnn(QrnnModel::new(params, manifest.qrnn.clone())?.with_loss(loss_spec))
        }
        ModelKind::Lstm => {
            let d = manifest.param_counts.lstm_hidden.ok_or_else(|| {
                CoreError::FormatError("manifest missing lstm hidden size".into())
            })?;
            AnyModel::Lstm(LstmModel {
                params: LstmParams::from_flat(d, 1, 1, &manifest.final_params)?,
            })
        }
        ModelKind::RepeatLast => AnyModel::RepeatLast(RepeatLastModel),
    };

    let out = out_dir.unwrap_or(run_dir);
    std::fs::create_dir_all(out)?;
    let path = out.join("predictions.csv");
    match &resolved.series {
        Some(series) => {
            let horizon = horizon_override.unwrap_or(manifest.horizon);
            std::fs::write(&path, predictions_csv(&model, series, horizon)?)?;
        }
        None => {
            std::fs::write(&path, classification_csv(&model, &resolved.task)?)?;
        }
    }
    Ok(path)
}
