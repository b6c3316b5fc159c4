//! Flat `key = value` configuration files and flag/file/default merging.
//!
//! Precedence is flags > config file > built-in defaults; the merged
//! result is echoed into the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use biotrig_core::model::{CellKind, FeatureVariant, HeadVariant, ModelConfig};
use biotrig_core::train::TrainConfig;

/// Parsed config file: known keys only, checked before any compute.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "word_dim",
    "entity_dim",
    "rnn_hidden",
    "hidden_dims",
    "dropout",
    "cell",
    "features",
    "head",
    "train_embeddings",
    "learning_rate",
    "epochs",
    "grad_clip_norm",
    "seed",
    "runs",
    "shuffle",
    "combine_train_dev",
    "rare_threshold",
];

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, context: &str) -> Result<ConfigFile> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("{context}:{}: expected \"key = value\", got {raw:?}", lineno + 1);
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                bail!("{context}:{}: unknown config key {key:?}", lineno + 1);
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("{context}:{}: duplicate config key {key:?}", lineno + 1);
            }
        }
        Ok(ConfigFile { entries })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn parse_as<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key {key}: {e}")),
        }
    }
}

/// Flag-level overrides shared by train-like commands; `None` means "not
/// given on the command line".
#[derive(Debug, Default, Clone, clap::Args)]
pub struct TrainOverrides {
    /// RNN cell kind (lstm or gru)
    #[arg(long)]
    pub cell: Option<CellKind>,
    /// Input features: w (word only) or we (word + entity type)
    #[arg(long)]
    pub features: Option<FeatureVariant>,
    /// Classifier head input: g (global only) or lg (local + global)
    #[arg(long)]
    pub head: Option<HeadVariant>,
    /// SGD learning rate
    #[arg(long)]
    pub lr: Option<f64>,
    /// Number of training epochs
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Base seed; run r uses seed + r
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of seeded runs (best-of-N protocol)
    #[arg(long)]
    pub runs: Option<usize>,
    /// Gradient clipping threshold (global L2 norm)
    #[arg(long)]
    pub clip: Option<f64>,
    /// Word embedding dimension (must match the vector file)
    #[arg(long)]
    pub word_dim: Option<usize>,
    /// Entity-type embedding dimension
    #[arg(long)]
    pub entity_dim: Option<usize>,
    /// RNN hidden state dimension
    #[arg(long)]
    pub rnn_hidden: Option<usize>,
    /// Hidden layer dimensions, comma-separated
    #[arg(long, value_delimiter = ',')]
    pub hidden_dims: Option<Vec<usize>>,
    /// Dropout rate on the classifier hidden layers
    #[arg(long)]
    pub dropout: Option<f64>,
    /// After dev selection, retrain on train+dev for the selected epochs
    #[arg(long)]
    pub combine_train_dev: bool,
}

/// Fully merged configuration for a training-style command.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EffectiveConfig {
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub combine_train_dev: bool,
}

pub fn merge(file: &ConfigFile, flags: &TrainOverrides) -> Result<EffectiveConfig> {
    let mut model = ModelConfig::default();
    let mut train = TrainConfig::default();
    let mut combine = false;

    if let Some(v) = file.parse_as::<usize>("word_dim")? {
        model.word_dim = v;
    }
    if let Some(v) = file.parse_as::<usize>("entity_dim")? {
        model.entity_dim = v;
    }
    if let Some(v) = file.parse_as::<usize>("rnn_hidden")? {
        model.rnn_hidden = v;
    }
    if let Some(v) = file.get("hidden_dims") {
        model.hidden_dims = v
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| anyhow::anyhow!("config key hidden_dims: {e}"))?;
    }
    if let Some(v) = file.parse_as::<f64>("dropout")? {
        model.dropout_rate = v;
    }
    if let Some(v) = file.get("cell") {
        model.cell = v.parse().map_err(|e| anyhow::anyhow!("config key cell: {e}"))?;
    }
    if let Some(v) = file.get("features") {
        model.features = v
            .parse()
            .map_err(|e| anyhow::anyhow!("config key features: {e}"))?;
    }
    if let Some(v) = file.get("head") {
        model.head = v.parse().map_err(|e| anyhow::anyhow!("config key head: {e}"))?;
    }
    if let Some(v) = file.parse_as::<bool>("train_embeddings")? {
        model.train_embeddings = v;
    }
    if let Some(v) = file.parse_as::<f64>("learning_rate")? {
        train.learning_rate = v;
    }
    if let Some(v) = file.parse_as::<usize>("epochs")? {
        train.epochs = v;
    }
    if let Some(v) = file.parse_as::<f64>("grad_clip_norm")? {
        train.grad_clip_norm = v;
    }
    if let Some(v) = file.parse_as::<u64>("seed")? {
        train.seed = v;
        model.seed = v;
    }
    if let Some(v) = file.parse_as::<usize>("runs")? {
        train.runs = v;
    }
    if let Some(v) = file.parse_as::<bool>("shuffle")? {
        train.shuffle = v;
    }
    if let Some(v) = file.parse_as::<bool>("combine_train_dev")? {
        combine = v;
    }

    if let Some(v) = flags.cell {
        model.cell = v;
    }
    if let Some(v) = flags.features {
        model.features = v;
    }
    if let Some(v) = flags.head {
        model.head = v;
    }
    if let Some(v) = flags.lr {
        train.learning_rate = v;
    }
    if let Some(v) = flags.epochs {
        train.epochs = v;
    }
    if let Some(v) = flags.seed {
        train.seed = v;
        model.seed = v;
    }
    if let Some(v) = flags.runs {
        train.runs = v;
    }
    if let Some(v) = flags.clip {
        train.grad_clip_norm = v;
    }
    if let Some(v) = flags.word_dim {
        model.word_dim = v;
    }
    if let Some(v) = flags.entity_dim {
        model.entity_dim = v;
    }
    if let Some(v) = flags.rnn_hidden {
        model.rnn_hidden = v;
    }
    if let Some(v) = &flags.hidden_dims {
        model.hidden_dims = v.clone();
    }
    if let Some(v) = flags.dropout {
        model.dropout_rate = v;
    }
    if flags.combine_train_dev {
        combine = true;
    }

    if train.learning_rate <= 0.0 {
        bail!("learning_rate must be positive, got {}", train.learning_rate);
    }
    if train.epochs == 0 {
        bail!("epochs must be at least 1");
    }
    if train.runs == 0 {
        bail!("runs must be at least 1");
    }
    if !(0.0..1.0).contains(&model.dropout_rate) {
        bail!("dropout must satisfy 0 <= rate < 1, got {}", model.dropout_rate);
    }
    Ok(EffectiveConfig {
        model,
        train,
        combine_train_dev: combine,
    })
}
