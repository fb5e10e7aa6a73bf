//! The run manifest: the full configuration, seeds, parameter counts, and
//! results of one run. A manifest is sufficient to reproduce its run
//! bit-for-bit (wall-clock fields aside).

use cvqrnn_core::qrnn::QRNNConfig;
use cvqrnn_core::training::{CostSpec, EpochMetrics, TrainConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Qrnn,
    Lstm,
    RepeatLast,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::Qrnn => f.write_str("qrnn"),
            ModelKind::Lstm => f.write_str("lstm"),
            ModelKind::RepeatLast => f.write_str("repeat-last"),
        }
    }
}

/// Dataset configuration as resolved from the CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub kind: String,
    pub n_points: usize,
    pub x_max: f64,
    pub window: usize,
    pub mnist_images: Option<String>,
    pub mnist_labels: Option<String>,
    pub mnist_limit: usize,
    /// Additive uniform data-noise amplitude (Appendix-style sweeps).
    pub epsilon: f64,
    /// Derived seed of the noise stream (recorded for reproducibility).
    pub noise_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamCounts {
    pub model: usize,
    /// Parameter count of the reference quantum layer for the same qumodes.
    pub qrnn_reference: usize,
    /// Matched LSTM hidden size and count, when a classical model is in play.
    pub lstm_hidden: Option<usize>,
    pub lstm_matched: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub code_version: String,
    pub command: String,
    pub model: ModelKind,
    pub dataset: DatasetSpec,
    pub qrnn: QRNNConfig,
    pub train: TrainConfig,
    pub cost: CostSpec,
    /// Photon-loss parameter applied after the layer unitary on all modes.
    pub beta: f64,
    pub seed: u64,
    pub init_seed: u64,
    pub param_counts: ParamCounts,
    /// Realized (threes, sixes) counts for image runs.
    pub class_counts: Option<(usize, usize)>,
    pub dataset_warning: Option<String>,
    pub horizon: usize,
    pub fixed_timing: bool,
    pub final_params: Vec<f64>,
    pub metrics: Vec<EpochMetrics>,
    pub started_utc: String,
    pub finished_utc: String,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}
