use std::collections::hash_map::DefaultHasher;
use std::hash::Hasher;

use ndarray::{Array1, Array2, ArrayView1, Zip};
use rand::Rng;

use super::{FeatureInit, TrainConfig};
use crate::error::{Error, Result};
use crate::graph::GroundTruth;
use crate::propagation::PropagationMatrix;
use crate::rng::{streams, substream};

/// Convolution weights plus the logistic head. Also used to hold gradients.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// `weights[0]` is `d0 x d`, the rest `d x d`.
    pub weights: Vec<Array2<f64>>,
    pub head_weight: Array1<f64>,
    pub head_bias: f64,
}

impl ModelParams {
    pub fn zeros_like(other: &ModelParams) -> Self {
        ModelParams {
            weights: other.weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            head_weight: Array1::zeros(other.head_weight.len()),
            head_bias: 0.0,
        }
    }

    pub fn layers(&self) -> usize {
        self.weights.len()
    }

    pub fn input_dim(&self) -> usize {
        self.weights.first().map_or(0, |w| w.nrows())
    }

    /// Every parameter tensor as a flat row-major slice, head bias last.
    pub fn slices(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = self
            .weights
            .iter()
            .map(|w| w.as_slice().expect("standard layout"))
            .collect();
        out.push(self.head_weight.as_slice().expect("contiguous"));
        out.push(std::slice::from_ref(&self.head_bias));
        out
    }

    pub fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = self
            .weights
            .iter_mut()
            .map(|w| w.as_slice_mut().expect("standard layout"))
            .collect();
        out.push(self.head_weight.as_slice_mut().expect("contiguous"));
        out.push(std::slice::from_mut(&mut self.head_bias));
        out
    }

    pub fn is_finite(&self) -> bool {
        self.slices().iter().all(|s| s.iter().all(|x| x.is_finite()))
    }

    fn fingerprint(&self, nodes: usize) -> u64 {
        let mut h = DefaultHasher::new();
        h.write_usize(nodes);
        for s in self.slices() {
            h.write_usize(s.len());
            for x in s {
                h.write_u64(x.to_bits());
            }
        }
        h.finish()
    }

    fn check_shapes(&self, h0: &Array2<f64>, prop: &PropagationMatrix) -> Result<()> {
        if h0.nrows() != prop.n_nodes() {
            return Err(Error::Dimension(format!(
                "features have {} rows for {} nodes",
                h0.nrows(),
                prop.n_nodes()
            )));
        }
        let mut width = h0.ncols();
        for (l, w) in self.weights.iter().enumerate() {
            if w.nrows() != width {
                return Err(Error::Dimension(format!(
                    "layer {l} expects input width {}, got {width}",
                    w.nrows()
                )));
            }
            width = w.ncols();
        }
        if self.weights.is_empty() || self.head_weight.len() != width {
            return Err(Error::Dimension(format!(
                "head expects width {}, got {width}",
                self.head_weight.len()
            )));
        }
        Ok(())
    }
}

fn glorot(rows: usize, cols: usize, rng: &mut impl Rng) -> Array2<f64> {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    Array2::from_shape_simple_fn((rows, cols), || rng.random_range(-bound..=bound))
}

/// Fan-based uniform initialization, zero head bias.
pub fn init_params(cfg: &TrainConfig, input_dim: usize) -> ModelParams {
    let mut rng = substream(cfg.seed, streams::INIT);
    let mut weights = Vec::with_capacity(cfg.layers);
    let mut width = input_dim;
    for _ in 0..cfg.layers {
        weights.push(glorot(width, cfg.dim, &mut rng));
        width = cfg.dim;
    }
    let head = glorot(cfg.dim, 1, &mut rng);
    ModelParams {
        weights,
        head_weight: head.column(0).to_owned(),
        head_bias: 0.0,
    }
}

pub fn initial_features(kind: FeatureInit, nodes: usize) -> Array2<f64> {
    match kind {
        FeatureInit::Ones => Array2::ones((nodes, 1)),
        FeatureInit::OneHot => Array2::eye(nodes),
    }
}

fn elu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        x.exp_m1()
    }
}

fn elu_grad(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        x.exp()
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Intermediate values of one forward pass.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    /// `N·H⁽ˡ⁾` for each layer.
    pub aggregated: Vec<Array2<f64>>,
    /// `N·H⁽ˡ⁾·W⁽ˡ⁾` before activation.
    pub pre_activation: Vec<Array2<f64>>,
    /// `H⁽¹⁾..H⁽ᴷ⁾`.
    pub hidden: Vec<Array2<f64>>,
    pub logits: Array1<f64>,
    pub predictions: Array1<f64>,
    fingerprint: u64,
}

/// Runs every convolution layer and the head. Returns one prediction per
/// item, in item index order.
pub fn forward(
    params: &ModelParams,
    prop: &PropagationMatrix,
    h0: &Array2<f64>,
) -> Result<(Array1<f64>, ForwardCache)> {
    params.check_shapes(h0, prop)?;
    let n_layers = params.layers();
    let mut aggregated = Vec::with_capacity(n_layers);
    let mut pre_activation = Vec::with_capacity(n_layers);
    let mut hidden: Vec<Array2<f64>> = Vec::with_capacity(n_layers);
    for (l, w) in params.weights.iter().enumerate() {
        let input = if l == 0 { h0.view() } else { hidden[l - 1].view() };
        let agg = prop.matrix().mul_dense(input)?;
        let pre = agg.dot(w);
        hidden.push(pre.mapv(elu));
        aggregated.push(agg);
        pre_activation.push(pre);
    }
    let last = hidden.last().expect("at least one layer");
    let items = last.slice(ndarray::s![prop.n_users().., ..]);
    let logits = items.dot(&params.head_weight) + params.head_bias;
    let predictions = logits.mapv(sigmoid);
    let cache = ForwardCache {
        aggregated,
        pre_activation,
        hidden,
        logits,
        predictions: predictions.clone(),
        fingerprint: params.fingerprint(prop.n_nodes()),
    };
    Ok((predictions, cache))
}

/// Mean squared error over `train_ids`.
pub fn mse_loss(
    predictions: ArrayView1<'_, f64>,
    truth: &GroundTruth,
    train_ids: &[usize],
) -> Result<f64> {
    if train_ids.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let targets = truth.require(train_ids)?;
    let mut sum = 0.0;
    for (&i, v) in train_ids.iter().zip(targets) {
        let p = *predictions
            .get(i)
            .ok_or_else(|| Error::UnknownItem(i.to_string()))?;
        sum += (v - p) * (v - p);
    }
    Ok(sum / train_ids.len() as f64)
}

/// Exact gradient of [`mse_loss`] with respect to every parameter.
pub fn backward(
    params: &ModelParams,
    prop: &PropagationMatrix,
    cache: &ForwardCache,
    truth: &GroundTruth,
    train_ids: &[usize],
) -> Result<ModelParams> {
    if cache.fingerprint != params.fingerprint(prop.n_nodes())
        || cache.hidden.len() != params.layers()
    {
        return Err(Error::StaleCache);
    }
    if train_ids.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let targets = truth.require(train_ids)?;
    let scale = 2.0 / train_ids.len() as f64;
    let n_layers = params.layers();
    let top = &cache.hidden[n_layers - 1];

    let mut grads = ModelParams::zeros_like(params);
    let mut d_hidden = Array2::<f64>::zeros(top.raw_dim());
    for (&i, v) in train_ids.iter().zip(targets) {
        if i >= prop.n_items() {
            return Err(Error::UnknownItem(i.to_string()));
        }
        let y = cache.predictions[i];
        let d_logit = scale * (y - v) * y * (1.0 - y);
        let row = prop.item_row(i);
        grads.head_bias += d_logit;
        grads.head_weight.scaled_add(d_logit, &top.row(row));
        d_hidden.row_mut(row).scaled_add(d_logit, &params.head_weight);
    }

    for l in (0..n_layers).rev() {
        let mut d_pre = d_hidden;
        Zip::from(&mut d_pre)
            .and(&cache.pre_activation[l])
            .for_each(|g, &x| *g *= elu_grad(x));
        grads.weights[l] = cache.aggregated[l].t().dot(&d_pre);
        if l == 0 {
            break;
        }
        let d_agg = d_pre.dot(&params.weights[l].t());
        d_hidden = prop.matrix().transpose_mul_dense(d_agg.view())?;
    }
    Ok(grads)
}

/// Head outputs for the requested items.
pub fn predict(
    params: &ModelParams,
    prop: &PropagationMatrix,
    h0: &Array2<f64>,
    item_ids: &[usize],
) -> Result<Vec<f64>> {
    if let Some(&bad) = item_ids.iter().find(|&&i| i >= prop.n_items()) {
        return Err(Error::UnknownItem(bad.to_string()));
    }
    let (all, _) = forward(params, prop, h0)?;
    Ok(item_ids.iter().map(|&i| all[i]).collect())
}
