//! Reference implementations for tests. Nothing here calls the sparse
//! kernels or the analytic backward pass.
#![allow(dead_code)]

use ndarray::Array2;
use peergrade::gcn::{forward, mse_loss, ModelParams};
use peergrade::{GraphBuilder, GroundTruth, PropagationMatrix, SoanGraph};
use rand::Rng;

/// Random graph with 1..=max_n users and 1..=max_m items. Roughly one in
/// five assessments is an explicit 0 grade.
pub fn random_graph(rng: &mut impl Rng, max_n: usize, max_m: usize) -> SoanGraph {
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(1..=max_m);
    let density = rng.random_range(0.2..0.9);
    let mut b = GraphBuilder::new();
    for u in 0..n {
        b.user(format!("u{u:02}"));
    }
    for i in 0..m {
        b.item(format!("i{i:02}"));
    }
    for u in 0..n {
        for i in 0..m {
            if rng.random::<f64>() < density {
                let g = if rng.random::<f64>() < 0.2 { 0.0 } else { rng.random() };
                b.assessment(format!("u{u:02}"), format!("i{i:02}"), g);
            }
            if rng.random::<f64>() < 0.25 {
                b.ownership(format!("u{u:02}"), format!("i{i:02}"), rng.random());
            }
        }
        for v in u + 1..n {
            if rng.random::<f64>() < 0.3 {
                b.social(format!("u{u:02}"), format!("u{v:02}"), rng.random());
            }
        }
    }
    b.build().unwrap()
}

pub fn random_truth(rng: &mut impl Rng, m: usize) -> GroundTruth {
    GroundTruth::full((0..m).map(|_| rng.random()).collect()).unwrap()
}

/// `D⁻¹M` assembled densely: build M with an explicit presence mask, count
/// present entries per row, divide.
pub fn dense_propagation(g: &SoanGraph) -> Vec<Vec<f64>> {
    let (n, m) = (g.n_users(), g.n_items());
    let size = n + m;
    let mut weight = vec![vec![0.0; size]; size];
    let mut present = vec![vec![false; size]; size];
    for (a, b, w) in g.social.triplets() {
        weight[a][b] += w;
        present[a][b] = true;
    }
    for rel in [&g.ownership, &g.assessment] {
        for (u, i, w) in rel.triplets() {
            weight[u][n + i] += w;
            weight[n + i][u] += w;
            present[u][n + i] = true;
            present[n + i][u] = true;
        }
    }
    for k in 0..size {
        weight[k][k] += 1.0;
        present[k][k] = true;
    }
    (0..size)
        .map(|r| {
            let deg = present[r].iter().filter(|&&p| p).count() as f64;
            weight[r].iter().map(|w| w / deg).collect()
        })
        .collect()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                .collect()
        })
        .collect()
}

fn to_rows(a: &Array2<f64>) -> Vec<Vec<f64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

/// Item predictions from plain nested-vector arithmetic.
pub fn dense_forward(
    params: &ModelParams,
    prop_dense: &[Vec<f64>],
    h0: &Array2<f64>,
    n_users: usize,
) -> Vec<f64> {
    let mut h = to_rows(h0);
    for w in &params.weights {
        let z = matmul(&matmul(prop_dense, &h), &to_rows(w));
        h = z
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| if x > 0.0 { x } else { x.exp() - 1.0 })
                    .collect()
            })
            .collect();
    }
    h[n_users..]
        .iter()
        .map(|z| {
            let logit: f64 = z
                .iter()
                .zip(params.head_weight.iter())
                .map(|(a, b)| a * b)
                .sum::<f64>()
                + params.head_bias;
            1.0 / (1.0 + (-logit).exp())
        })
        .collect()
}

pub fn loss_at(
    params: &ModelParams,
    prop: &PropagationMatrix,
    h0: &Array2<f64>,
    truth: &GroundTruth,
    train: &[usize],
) -> f64 {
    let (pred, _) = forward(params, prop, h0).unwrap();
    mse_loss(pred.view(), truth, train).unwrap()
}

/// Central differences with step `h` for every parameter, in the order of
/// `ModelParams::slices`.
pub fn numeric_gradient(
    params: &ModelParams,
    prop: &PropagationMatrix,
    h0: &Array2<f64>,
    truth: &GroundTruth,
    train: &[usize],
    h: f64,
) -> Vec<f64> {
    let sizes: Vec<usize> = params.slices().iter().map(|s| s.len()).collect();
    let mut out = Vec::new();
    for (t, &len) in sizes.iter().enumerate() {
        for k in 0..len {
            let mut plus = params.clone();
            plus.slices_mut()[t][k] += h;
            let mut minus = params.clone();
            minus.slices_mut()[t][k] -= h;
            let lp = loss_at(&plus, prop, h0, truth, train);
            let lm = loss_at(&minus, prop, h0, truth, train);
            out.push((lp - lm) / (2.0 * h));
        }
    }
    out
}

/// `|a - b| / max(|a|, |b|, floor)`; the floor keeps near-zero entries
/// from turning round-off into huge ratios.
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
