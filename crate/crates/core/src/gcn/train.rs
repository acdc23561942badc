use log::debug;

use super::{adam_step, backward, forward, init_params, initial_features, mse_loss};
use super::{AdamState, ModelParams, TrainConfig};
use crate::error::{Error, Result};
use crate::graph::{Dataset, GroundTruth};
use crate::propagation::PropagationMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    /// Parameters after the final epoch's update.
    pub params: ModelParams,
    /// Training loss measured at the start of each epoch.
    pub history: Vec<f64>,
}

/// Trains on `dataset.split.train`.
pub fn train(dataset: &Dataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    let prop = PropagationMatrix::new(&dataset.graph);
    train_on(&prop, &dataset.truth, &dataset.split.train, cfg)
}

/// Full-batch training: one forward pass over the whole graph, loss on
/// `train_ids` only, one Adam step per epoch.
pub fn train_on(
    prop: &PropagationMatrix,
    truth: &GroundTruth,
    train_ids: &[usize],
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if train_ids.is_empty() {
        return Err(Error::Empty("training set"));
    }
    truth.require(train_ids)?;
    let h0 = initial_features(cfg.features, prop.n_nodes());
    let mut params = init_params(cfg, h0.ncols());
    let mut state = AdamState::new(&params);
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let (pred, cache) = forward(&params, prop, &h0)?;
        let loss = mse_loss(pred.view(), truth, train_ids)?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch, loss });
        }
        history.push(loss);
        let grads = backward(&params, prop, &cache, truth, train_ids)?;
        adam_step(&mut params, &grads, &mut state, cfg)?;
        if !params.is_finite() {
            return Err(Error::NonFiniteLoss {
                epoch,
                loss: f64::NAN,
            });
        }
    }
    debug!(
        "trained {} epochs, loss {:.6} -> {:.6}",
        cfg.epochs,
        history[0],
        history[history.len() - 1]
    );
    Ok(TrainOutcome { params, history })
}
