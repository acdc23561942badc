use super::{ModelParams, TrainConfig};
use crate::error::{Error, Result};

/// Moment accumulators shaped like the parameters they track.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub first: ModelParams,
    pub second: ModelParams,
    pub step: u64,
}

impl AdamState {
    pub fn new(params: &ModelParams) -> Self {
        AdamState {
            first: ModelParams::zeros_like(params),
            second: ModelParams::zeros_like(params),
            step: 0,
        }
    }
}

/// One bias-corrected Adam update, in place.
pub fn adam_step(
    params: &mut ModelParams,
    grads: &ModelParams,
    state: &mut AdamState,
    cfg: &TrainConfig,
) -> Result<()> {
    let shapes = |p: &ModelParams| p.slices().iter().map(|s| s.len()).collect::<Vec<_>>();
    let expected = shapes(params);
    if shapes(grads) != expected || shapes(&state.first) != expected {
        return Err(Error::Dimension(
            "gradient or optimizer state shape differs from parameters".into(),
        ));
    }
    state.step += 1;
    let t = state.step as i32;
    let (b1, b2) = (cfg.beta1, cfg.beta2);
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    let lr = cfg.learning_rate;

    for (((p, g), m), v) in params
        .slices_mut()
        .into_iter()
        .zip(grads.slices())
        .zip(state.first.slices_mut())
        .zip(state.second.slices_mut())
    {
        for k in 0..p.len() {
            m[k] = b1 * m[k] + (1.0 - b1) * g[k];
            v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
            let m_hat = m[k] / c1;
            let v_hat = v[k] / c2;
            p[k] -= lr * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
    Ok(())
}
