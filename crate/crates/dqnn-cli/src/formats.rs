//! On-disk JSON formats: model, dataset, and run configuration.
//!
//! Floats are serialized as shortest round-trip decimals, so a saved model
//! reloads bit-exactly.

use std::fs;
use std::path::Path;

use dqnn_core::comp_param::ParamMatrix;
use dqnn_core::linalg::{ComplexMatrix, PureState};
use dqnn_core::network::{GradientStrategy, NetworkTopology, QNN};
use dqnn_core::training::{
    default_epsilon_grid, Dataset, DatasetKind, TrainingConfig, TrainingPair,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::AppError;

pub const FORMAT_VERSION: u32 = 1;

fn usage(msg: impl Into<String>) -> AppError {
    AppError::Usage(msg.into())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, AppError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {what} file {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| usage(format!("cannot parse {what} file {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T, what: &str) -> Result<(), AppError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Runtime(format!("cannot serialize {what}: {e}")))?;
    fs::write(path, text + "\n")
        .map_err(|e| AppError::Runtime(format!("cannot write {what} file {}: {e}", path.display())))
}

fn check_version(found: u32, what: &str) -> Result<(), AppError> {
    if found != FORMAT_VERSION {
        Err(usage(format!(
            "unsupported {what} format version {found} (expected {FORMAT_VERSION})"
        )))
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Model files

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub topology: Vec<usize>,
    /// Row-major `d x d` parameter tables, one per perceptron.
    pub perceptrons: Vec<Vec<f64>>,
    pub rng_seed: u64,
    pub rounds_completed: usize,
}

pub fn save_model(
    net: &QNN,
    rng_seed: u64,
    rounds_completed: usize,
    path: &Path,
) -> Result<(), AppError> {
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        topology: net.topology().layer_widths().to_vec(),
        perceptrons: net
            .perceptrons()
            .iter()
            .map(|p| p.values().to_vec())
            .collect(),
        rng_seed,
        rounds_completed,
    };
    write_json(path, &file, "model")
}

pub fn load_model(path: &Path) -> Result<(QNN, ModelFile), AppError> {
    let file: ModelFile = read_json(path, "model")?;
    check_version(file.format_version, "model")?;
    let topology = NetworkTopology::new(file.topology.clone())
        .map_err(|e| usage(format!("model topology invalid: {e}")))?;
    if file.perceptrons.len() != topology.n_perceptrons() {
        return Err(usage(format!(
            "model has {} perceptrons, topology needs {}",
            file.perceptrons.len(),
            topology.n_perceptrons()
        )));
    }
    let mut params = Vec::with_capacity(file.perceptrons.len());
    let mut idx = 0;
    for stage in 0..topology.n_stages() {
        let dim = topology.perceptron_dim(stage);
        for _ in 0..topology.layer_widths()[stage + 1] {
            let table = &file.perceptrons[idx];
            let p = ParamMatrix::from_values(dim, table.clone())
                .map_err(|e| usage(format!("model perceptron {idx} invalid: {e}")))?;
            params.push(p);
            idx += 1;
        }
    }
    let net = QNN::new(topology, params).map_err(|e| usage(format!("model inconsistent: {e}")))?;
    Ok((net, file))
}

// ---------------------------------------------------------------------------
// Dataset files

#[derive(Debug, Serialize, Deserialize)]
pub struct PairFile {
    /// Amplitudes as `[re, im]` pairs.
    pub input: Vec<[f64; 2]>,
    pub desired: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DatasetFile {
    pub format_version: u32,
    pub kind: String,
    pub seed: u64,
    /// Row-major `[re, im]` entries of the pair-generating unitary, when one
    /// exists (example-a).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_unitary: Option<Vec<[f64; 2]>>,
    pub train: Vec<PairFile>,
    pub validation: Vec<PairFile>,
}

fn amplitudes_to_file(state: &PureState) -> Vec<[f64; 2]> {
    state.amplitudes().iter().map(|z| [z.re, z.im]).collect()
}

fn state_from_file(raw: &[[f64; 2]], what: &str) -> Result<PureState, AppError> {
    let amps: Vec<Complex64> = raw.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
    PureState::new(amps).map_err(|e| usage(format!("{what}: {e}")))
}

fn kind_to_string(kind: DatasetKind) -> &'static str {
    match kind {
        DatasetKind::ExampleA => "example-a",
        DatasetKind::ExampleB => "example-b",
        DatasetKind::Custom => "custom",
    }
}

fn kind_from_string(s: &str) -> Result<DatasetKind, AppError> {
    match s {
        "example-a" => Ok(DatasetKind::ExampleA),
        "example-b" => Ok(DatasetKind::ExampleB),
        "custom" => Ok(DatasetKind::Custom),
        other => Err(usage(format!("unknown dataset kind {other:?}"))),
    }
}

pub fn save_dataset(
    dataset: &Dataset,
    hidden_unitary: Option<&ComplexMatrix>,
    path: &Path,
) -> Result<(), AppError> {
    let encode = |pairs: &[TrainingPair]| {
        pairs
            .iter()
            .map(|p| PairFile {
                input: amplitudes_to_file(&p.input),
                desired: amplitudes_to_file(&p.desired),
            })
            .collect()
    };
    let file = DatasetFile {
        format_version: FORMAT_VERSION,
        kind: kind_to_string(dataset.kind).to_string(),
        seed: dataset.seed,
        hidden_unitary: hidden_unitary.map(|u| u.data().iter().map(|z| [z.re, z.im]).collect()),
        train: encode(&dataset.train),
        validation: encode(&dataset.validation),
    };
    write_json(path, &file, "dataset")
}

pub fn load_dataset(path: &Path) -> Result<Dataset, AppError> {
    let file: DatasetFile = read_json(path, "dataset")?;
    check_version(file.format_version, "dataset")?;
    let decode = |pairs: &[PairFile], what: &str| -> Result<Vec<TrainingPair>, AppError> {
        pairs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                Ok(TrainingPair {
                    input: state_from_file(&p.input, &format!("{what} pair {i} input"))?,
                    desired: state_from_file(&p.desired, &format!("{what} pair {i} desired"))?,
                })
            })
            .collect()
    };
    let train = decode(&file.train, "train")?;
    if train.is_empty() {
        return Err(usage("dataset has no training pairs"));
    }
    Ok(Dataset {
        train,
        validation: decode(&file.validation, "validation")?,
        seed: file.seed,
        kind: kind_from_string(&file.kind)?,
    })
}

// ---------------------------------------------------------------------------
// Run configuration files

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum EpsilonGridSpec {
    Geometric {
        min: f64,
        max: f64,
        count: usize,
        #[serde(default = "default_true")]
        include_zero: bool,
    },
    Explicit {
        values: Vec<f64>,
    },
}

fn default_true() -> bool {
    true
}

impl EpsilonGridSpec {
    pub fn build(&self) -> Result<Vec<f64>, AppError> {
        match self {
            EpsilonGridSpec::Geometric {
                min,
                max,
                count,
                include_zero,
            } => {
                if !(min.is_finite() && max.is_finite()) || *min <= 0.0 || max < min || *count < 2
                {
                    return Err(usage("invalid geometric epsilon grid"));
                }
                let ratio = (max / min).powf(1.0 / (*count - 1) as f64);
                let mut grid = Vec::with_capacity(count + 1);
                if *include_zero {
                    grid.push(0.0);
                }
                let mut value = *min;
                for _ in 0..*count {
                    grid.push(value);
                    value *= ratio;
                }
                Ok(grid)
            }
            EpsilonGridSpec::Explicit { values } => Ok(values.clone()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    #[serde(default)]
    pub dataset: Option<String>,
    #[serde(default)]
    pub rounds: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub gradient_strategy: Option<String>,
    #[serde(default)]
    pub epsilon_grid: Option<EpsilonGridSpec>,
    #[serde(default)]
    pub probe_uncertainty: Option<bool>,
    #[serde(default)]
    pub probe_stride: Option<usize>,
    #[serde(default)]
    pub model_out: Option<String>,
    #[serde(default)]
    pub log_out: Option<String>,
}

pub fn load_run_config(path: &Path) -> Result<RunConfigFile, AppError> {
    read_json(path, "config")
}

pub fn strategy_from_string(s: &str) -> Result<GradientStrategy, AppError> {
    match s {
        "exact" => Ok(GradientStrategy::Exact),
        "paper-literal" | "stage-local" => Ok(GradientStrategy::StageLocal),
        other => Err(usage(format!(
            "unknown gradient strategy {other:?} (use exact or paper-literal)"
        ))),
    }
}

/// Assembles the core training configuration from file values and overrides,
/// validating everything before any computation starts.
pub fn build_training_config(
    rounds: usize,
    seed: u64,
    strategy: GradientStrategy,
    grid: Option<&EpsilonGridSpec>,
    probe_uncertainty: bool,
    probe_stride: usize,
) -> Result<TrainingConfig, AppError> {
    let epsilon_grid = match grid {
        Some(spec) => spec.build()?,
        None => default_epsilon_grid(),
    };
    let config = TrainingConfig {
        rounds,
        epsilon_grid,
        gradient_strategy: strategy,
        probe_uncertainty,
        probe_stride,
        seed,
    };
    config
        .validate()
        .map_err(|e| usage(format!("invalid training configuration: {e}")))?;
    Ok(config)
}
