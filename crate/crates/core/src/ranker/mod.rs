//! Pairwise edge ranking: dataset construction, linear classifiers per state
//! class and game mode, score-sum ranking and strategy recommendation.

mod dataset;
mod rank;
mod rfe;
mod svm;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::features::{FeatureSchema, StateClass};

pub use dataset::{build_pair_dataset, read_pairs_csv, write_pairs_csv, GameData, PairDataset};
pub use rank::{rank_edges, recommend_strategy, score_sum, RankedEdge, Ranker};
pub use rfe::feature_elimination;
pub use svm::{dataset_hash, train, LinearModel, TrainStats};

#[derive(Debug, thiserror::Error)]
pub enum RankerError {
    #[error("training data for {0} contains a single label")]
    SingleClass(ModelKey),
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("schema version {found} does not match {expected}")]
    Schema { expected: u32, found: u32 },
    #[error("malformed dataset: {0}")]
    Dataset(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One model per state class and game mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModelKey {
    pub class: StateClass,
    pub complement: bool,
}

impl ModelKey {
    pub fn all() -> impl Iterator<Item = ModelKey> {
        StateClass::ALL.into_iter().flat_map(|class| [false, true].map(|complement| ModelKey { class, complement }))
    }

    pub(crate) fn id(self) -> u64 {
        self.class as u64 * 2 + self.complement as u64
    }
}

impl std::fmt::Display for ModelKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.class, if self.complement { "/complement" } else { "" })
    }
}

/// Two edges of the same state; `y = 1` iff the first has the larger ground
/// truth. Feature vectors follow the full schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub game: String,
    pub key: ModelKey,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub y: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub lambda: f64,
    pub epochs: usize,
    /// Initial step size of the decaying schedule.
    pub eta0: f64,
    /// Unordered pairs kept per game.
    pub pair_cap: usize,
    pub min_features: usize,
    pub max_features: usize,
    /// Largest tolerated validation accuracy loss while eliminating below
    /// `max_features`.
    pub max_accuracy_drop: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda: 1e-3,
            epochs: 15,
            eta0: 0.05,
            pair_cap: 200,
            min_features: 30,
            max_features: 40,
            max_accuracy_drop: 0.01,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), RankerError> {
        if !(self.lambda > 0.0) {
            return Err(RankerError::Config("lambda must be positive".into()));
        }
        if self.pair_cap == 0 {
            return Err(RankerError::Config("pair cap must be at least 1".into()));
        }
        if self.epochs == 0 || !(self.eta0 > 0.0) {
            return Err(RankerError::Config("epochs and eta0 must be positive".into()));
        }
        if self.min_features > self.max_features {
            return Err(RankerError::Config("min_features exceeds max_features".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankerBank {
    pub schema: FeatureSchema,
    pub config: TrainConfig,
    /// Missing keys fall back to trueness ordering.
    pub models: Vec<LinearModel>,
}

impl RankerBank {
    pub fn empty(schema: FeatureSchema, config: TrainConfig) -> Self {
        RankerBank { schema, config, models: Vec::new() }
    }

    pub fn model(&self, key: ModelKey) -> Option<&LinearModel> {
        self.models.iter().find(|m| m.key == key)
    }

    /// Trains every model that has usable data, with feature elimination.
    pub fn train(
        schema: &FeatureSchema,
        train: &PairDataset,
        validation: Option<&PairDataset>,
        cfg: &TrainConfig,
    ) -> Result<Self, RankerError> {
        use rayon::prelude::*;
        cfg.validate()?;
        let keys: Vec<ModelKey> = ModelKey::all().collect();
        let trained: Vec<Option<LinearModel>> = keys
            .par_iter()
            .map(|&key| {
                let samples = train.samples(key);
                if samples.is_empty() {
                    log::info!("no pairs for {key}; ranking falls back to trueness");
                    return None;
                }
                let val = validation.map(|v| v.samples(key));
                match feature_elimination(key, samples, val, schema, cfg) {
                    Ok(m) => Some(m),
                    Err(e) => {
                        log::warn!("no model for {key}: {e}; ranking falls back to trueness");
                        None
                    }
                }
            })
            .collect();
        Ok(RankerBank { schema: schema.clone(), config: cfg.clone(), models: trained.into_iter().flatten().collect() })
    }

    pub fn to_json(&self) -> Result<String, RankerError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, RankerError> {
        let bank: RankerBank = serde_json::from_str(text)?;
        let expected = crate::features::SCHEMA_VERSION;
        if bank.schema.version != expected {
            return Err(RankerError::Schema { expected, found: bank.schema.version });
        }
        Ok(bank)
    }

    /// Feature count per model.
    pub fn summary(&self) -> BTreeMap<String, usize> {
        self.models.iter().map(|m| (m.key.to_string(), m.mask.len())).collect()
    }
}

#[cfg(test)]
mod tests;
