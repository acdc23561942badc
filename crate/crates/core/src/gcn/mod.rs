//! GCN-SOAN: graph convolution over the propagation operator with a
//! logistic head on item nodes, trained full-batch with Adam on squared
//! error.

mod adam;
mod model;
mod train;

pub use adam::{adam_step, AdamState};
pub use model::{
    backward, forward, init_params, initial_features, mse_loss, predict, ForwardCache,
    ModelParams,
};
pub use train::{train, train_on, TrainOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Initial node features.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureInit {
    /// One constant feature per node.
    #[default]
    Ones,
    /// Identity features, one column per node.
    OneHot,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub layers: usize,
    pub dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub features: FeatureInit,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            layers: 2,
            dim: 64,
            epochs: 800,
            learning_rate: 0.02,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
            features: FeatureInit::Ones,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.layers >= 1
            && self.dim >= 1
            && self.epochs >= 1
            && self.learning_rate.is_finite()
            && self.learning_rate > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::validation(format!("invalid training config {self:?}")))
        }
    }
}
