//! Synthetic peer-grading scenarios: mixture ground truth, one-to-one
//! ownership, Erdős–Rényi or homophily social ties, and strategic or
//! bias-reliability graders.
//!
//! All sampled grades and values are clamped into `[0, 1]`.

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dataset, GroundTruth, SoanGraph};
use crate::rng::{streams, substream};
use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureConfig {
    pub pi: [f64; 2],
    pub mu: [f64; 2],
    pub sigma: [f64; 2],
}

impl Default for MixtureConfig {
    fn default() -> Self {
        MixtureConfig {
            pi: [0.2, 0.8],
            mu: [0.3, 0.7],
            sigma: [0.1, 0.1],
        }
    }
}

impl MixtureConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.pi.iter().all(|p| p.is_finite() && *p >= 0.0)
            && (self.pi[0] + self.pi[1] - 1.0).abs() <= 1e-9
            && self.sigma.iter().all(|s| s.is_finite() && *s >= 0.0)
            && self.mu.iter().all(|m| m.is_finite() && (0.0..=1.0).contains(m));
        if ok {
            Ok(())
        } else {
            Err(Error::validation(format!("invalid mixture {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErConfig {
    pub n: usize,
    pub p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomophilyConfig {
    pub tau: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategicConfig {
    pub k: usize,
    pub sigma_h: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasReliabilityConfig {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub sigma_max: f64,
}

impl Default for BiasReliabilityConfig {
    fn default() -> Self {
        BiasReliabilityConfig {
            k: 3,
            alpha: 0.0,
            beta: 0.0,
            sigma_max: 0.25,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SocialModel {
    None,
    Er { p: f64 },
    Homophily { tau: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AssessmentModel {
    Strategic { k: usize, sigma_h: f64 },
    BiasReliability {
        k: usize,
        alpha: f64,
        beta: f64,
        sigma_max: f64,
    },
}

impl AssessmentModel {
    pub fn k(&self) -> usize {
        match *self {
            AssessmentModel::Strategic { k, .. } | AssessmentModel::BiasReliability { k, .. } => k,
        }
    }

    pub(crate) fn set_k(&mut self, value: usize) {
        match self {
            AssessmentModel::Strategic { k, .. } | AssessmentModel::BiasReliability { k, .. } => {
                *k = value
            }
        }
    }
}

impl From<BiasReliabilityConfig> for AssessmentModel {
    fn from(c: BiasReliabilityConfig) -> Self {
        AssessmentModel::BiasReliability {
            k: c.k,
            alpha: c.alpha,
            beta: c.beta,
            sigma_max: c.sigma_max,
        }
    }
}

impl From<StrategicConfig> for AssessmentModel {
    fn from(c: StrategicConfig) -> Self {
        AssessmentModel::Strategic {
            k: c.k,
            sigma_h: c.sigma_h,
        }
    }
}

/// Everything needed to generate one synthetic dataset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub mixture: MixtureConfig,
    pub social: SocialModel,
    pub assessment: AssessmentModel,
}

impl Default for ScenarioConfig {
    /// 500 users and items, k = 3 bias-reliability graders with
    /// `sigma_max = 0.25`, no social network.
    fn default() -> Self {
        ScenarioConfig {
            n: 500,
            m: 500,
            seed: 0,
            mixture: MixtureConfig::default(),
            social: SocialModel::None,
            assessment: BiasReliabilityConfig::default().into(),
        }
    }
}

impl ScenarioConfig {
    /// Default sizes and mixture with colluding friends on an ER(p = 0.05)
    /// social network and `sigma_h = 0.25`.
    pub fn strategic() -> Self {
        ScenarioConfig {
            social: SocialModel::Er { p: 0.05 },
            assessment: AssessmentModel::Strategic { k: 3, sigma_h: 0.25 },
            ..Self::default()
        }
    }
}

fn clamp_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

pub fn gen_ground_truth<R: Rng + ?Sized>(
    m: usize,
    cfg: &MixtureConfig,
    rng: &mut R,
) -> Result<GroundTruth> {
    cfg.validate()?;
    let values = (0..m)
        .map(|_| {
            let c = if rng.random::<f64>() < cfg.pi[0] { 0 } else { 1 };
            let z: f64 = rng.sample(StandardNormal);
            clamp_unit(cfg.mu[c] + cfg.sigma[c] * z)
        })
        .collect();
    GroundTruth::full(values)
}

/// Random permutation ownership: user `u` owns exactly one item, weight 1.
pub fn gen_ownership_one_to_one<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    rng: &mut R,
) -> Result<CsrMatrix> {
    if n != m {
        return Err(Error::Dimension(format!(
            "one-to-one ownership needs n = m, got n = {n}, m = {m}"
        )));
    }
    let mut items: Vec<usize> = (0..m).collect();
    items.shuffle(rng);
    let triplets = items.into_iter().enumerate().map(|(u, i)| (u, i, 1.0)).collect();
    Ok(CsrMatrix::from_triplets(n, m, triplets).expect("permutation has distinct entries"))
}

/// For a one-to-one ownership matrix, the item owned by each user.
pub fn owned_item_per_user(ownership: &CsrMatrix) -> Result<Vec<usize>> {
    let mut owners = vec![0usize; ownership.ncols()];
    let mut out = Vec::with_capacity(ownership.nrows());
    for u in 0..ownership.nrows() {
        let mut row = ownership.row(u);
        match (row.next(), row.next()) {
            (Some((i, w)), None) if w > 0.0 => {
                owners[i] += 1;
                out.push(i);
            }
            _ => {
                return Err(Error::validation(format!(
                    "user {u} must own exactly one item"
                )))
            }
        }
    }
    if let Some(i) = owners.iter().position(|&c| c != 1) {
        return Err(Error::validation(format!(
            "item {i} must have exactly one owner"
        )));
    }
    Ok(out)
}

fn owner_per_item(owned: &[usize]) -> Vec<usize> {
    let mut owner = vec![0; owned.len()];
    for (u, &i) in owned.iter().enumerate() {
        owner[i] = u;
    }
    owner
}

fn symmetric_from_pairs(n: usize, pairs: Vec<(usize, usize)>) -> CsrMatrix {
    let triplets = pairs
        .into_iter()
        .flat_map(|(a, b)| [(a, b, 1.0), (b, a, 1.0)])
        .collect();
    CsrMatrix::from_triplets(n, n, triplets).expect("pairs are distinct")
}

/// G(n, p): each unordered pair joined independently with probability `p`.
pub fn gen_social_er<R: Rng + ?Sized>(cfg: &ErConfig, rng: &mut R) -> Result<CsrMatrix> {
    if !(0.0..=1.0).contains(&cfg.p) {
        return Err(Error::validation(format!("ER probability {} not in [0,1]", cfg.p)));
    }
    let mut pairs = Vec::new();
    for a in 0..cfg.n {
        for b in a + 1..cfg.n {
            if rng.random::<f64>() < cfg.p {
                pairs.push((a, b));
            }
        }
    }
    Ok(symmetric_from_pairs(cfg.n, pairs))
}

/// Joins two users whose owned items' true values differ by at most `tau`.
pub fn gen_social_homophily(
    truth: &GroundTruth,
    ownership: &CsrMatrix,
    cfg: &HomophilyConfig,
) -> Result<CsrMatrix> {
    if !(0.0..=1.0).contains(&cfg.tau) {
        return Err(Error::validation(format!("tau {} not in [0,1]", cfg.tau)));
    }
    let owned = owned_item_per_user(ownership)?;
    let values = truth.require(&owned)?;
    let n = owned.len();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if (values[a] - values[b]).abs() <= cfg.tau {
                pairs.push((a, b));
            }
        }
    }
    Ok(symmetric_from_pairs(n, pairs))
}

/// `k` distinct graders for one item, excluding its owner, in index order.
fn pick_graders<R: Rng + ?Sized>(n: usize, owner: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut picked: Vec<usize> = index::sample(rng, n - 1, k)
        .into_iter()
        .map(|j| if j >= owner { j + 1 } else { j })
        .collect();
    picked.sort_unstable();
    picked
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k + 1 > n {
        return Err(Error::validation(format!(
            "k = {k} graders per item needs at least {} users, have {n}",
            k + 1
        )));
    }
    Ok(())
}

/// Friends of an item's owner award 1; everyone else grades
/// `Normal(v_i, sigma_h)`.
pub fn gen_assess_strategic<R: Rng + ?Sized>(
    truth: &GroundTruth,
    ownership: &CsrMatrix,
    social: &CsrMatrix,
    cfg: &StrategicConfig,
    rng: &mut R,
) -> Result<CsrMatrix> {
    if !(cfg.sigma_h.is_finite() && cfg.sigma_h >= 0.0) {
        return Err(Error::validation(format!("sigma_h {} must be >= 0", cfg.sigma_h)));
    }
    let owned = owned_item_per_user(ownership)?;
    let (n, m) = (ownership.nrows(), ownership.ncols());
    check_k(cfg.k, n)?;
    let values = truth.require(&(0..m).collect::<Vec<_>>())?;
    let owner = owner_per_item(&owned);
    let mut triplets = Vec::with_capacity(m * cfg.k);
    for (i, &v) in values.iter().enumerate() {
        for u in pick_graders(n, owner[i], cfg.k, rng) {
            let friend = social.get(u, owner[i]).is_some_and(|w| w > 0.0);
            let grade = if friend {
                1.0
            } else {
                let z: f64 = rng.sample(StandardNormal);
                clamp_unit(v + cfg.sigma_h * z)
            };
            triplets.push((u, i, grade));
        }
    }
    Ok(CsrMatrix::from_triplets(n, m, triplets).expect("graders are distinct per item"))
}

/// Grades drawn from `Normal(v_i + alpha, sigma_max * (1 - beta * v_l))`
/// where `v_l` is the true value of the grader's own item.
pub fn gen_assess_bias_reliability<R: Rng + ?Sized>(
    truth: &GroundTruth,
    ownership: &CsrMatrix,
    cfg: &BiasReliabilityConfig,
    rng: &mut R,
) -> Result<CsrMatrix> {
    if !(-1.0..=1.0).contains(&cfg.alpha) || !cfg.beta.is_finite() {
        return Err(Error::validation(format!(
            "alpha must be in [-1,1] and beta finite, got alpha = {}, beta = {}",
            cfg.alpha, cfg.beta
        )));
    }
    if !(cfg.sigma_max.is_finite() && cfg.sigma_max >= 0.0) {
        return Err(Error::validation(format!("sigma_max {} must be >= 0", cfg.sigma_max)));
    }
    let owned = owned_item_per_user(ownership)?;
    let (n, m) = (ownership.nrows(), ownership.ncols());
    check_k(cfg.k, n)?;
    let values = truth.require(&(0..m).collect::<Vec<_>>())?;
    let grader_sd: Vec<f64> = owned
        .iter()
        .map(|&l| cfg.sigma_max * (1.0 - cfg.beta * values[l]))
        .collect();
    if let Some(u) = grader_sd.iter().position(|&sd| sd < 0.0) {
        return Err(Error::validation(format!(
            "negative grading noise {} for user {u} (sigma_max = {}, beta = {})",
            grader_sd[u], cfg.sigma_max, cfg.beta
        )));
    }
    let owner = owner_per_item(&owned);
    let mut triplets = Vec::with_capacity(m * cfg.k);
    for (i, &v) in values.iter().enumerate() {
        for u in pick_graders(n, owner[i], cfg.k, rng) {
            let z: f64 = rng.sample(StandardNormal);
            triplets.push((u, i, clamp_unit(v + cfg.alpha + grader_sd[u] * z)));
        }
    }
    Ok(CsrMatrix::from_triplets(n, m, triplets).expect("graders are distinct per item"))
}

/// Zero-padded ids whose lexicographic order matches numeric order.
fn padded_ids(prefix: &str, count: usize) -> Vec<String> {
    let width = count.saturating_sub(1).to_string().len();
    (0..count).map(|k| format!("{prefix}{k:0width$}")).collect()
}

/// Generates a full dataset (empty split) from a scenario.
///
/// Substreams of `cfg.seed`, in order: truth, ownership, social, assessment.
pub fn build_scenario(cfg: &ScenarioConfig) -> Result<Dataset> {
    let (n, m) = (cfg.n, cfg.m);
    let truth = gen_ground_truth(m, &cfg.mixture, &mut substream(cfg.seed, streams::TRUTH))?;
    let ownership = gen_ownership_one_to_one(n, m, &mut substream(cfg.seed, streams::OWNERSHIP))?;
    let social = match cfg.social {
        SocialModel::None => CsrMatrix::zeros(n, n),
        SocialModel::Er { p } => {
            gen_social_er(&ErConfig { n, p }, &mut substream(cfg.seed, streams::SOCIAL))?
        }
        SocialModel::Homophily { tau } => {
            gen_social_homophily(&truth, &ownership, &HomophilyConfig { tau })?
        }
    };
    let mut rng = substream(cfg.seed, streams::ASSESSMENT);
    let assessment = match cfg.assessment {
        AssessmentModel::Strategic { k, sigma_h } => gen_assess_strategic(
            &truth,
            &ownership,
            &social,
            &StrategicConfig { k, sigma_h },
            &mut rng,
        )?,
        AssessmentModel::BiasReliability {
            k,
            alpha,
            beta,
            sigma_max,
        } => gen_assess_bias_reliability(
            &truth,
            &ownership,
            &BiasReliabilityConfig {
                k,
                alpha,
                beta,
                sigma_max,
            },
            &mut rng,
        )?,
    };
    let graph = SoanGraph::from_parts(
        padded_ids("u", n),
        padded_ids("i", m),
        social,
        ownership,
        assessment,
    )?;
    Dataset::new(graph, truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        substream(seed, 0)
    }

    fn full_truth(values: &[f64]) -> GroundTruth {
        GroundTruth::full(values.to_vec()).unwrap()
    }

    fn identity_ownership(n: usize) -> CsrMatrix {
        CsrMatrix::from_triplets(n, n, (0..n).map(|k| (k, k, 1.0)).collect()).unwrap()
    }

    fn complete(n: usize) -> CsrMatrix {
        let pairs = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        symmetric_from_pairs(n, pairs)
    }

    #[test]
    fn degenerate_mixture() {
        let cfg = MixtureConfig {
            pi: [0.0, 1.0],
            mu: [0.3, 0.7],
            sigma: [0.0, 0.0],
        };
        let t = gen_ground_truth(50, &cfg, &mut rng(1)).unwrap();
        assert!(t.values().iter().all(|v| *v == Some(0.7)));
    }

    #[test]
    fn mixture_mean() {
        // Clamping at 0 and 1 is a ~1e-5 effect for these components.
        let t = gen_ground_truth(10_000, &MixtureConfig::default(), &mut rng(2)).unwrap();
        let mean = t.values().iter().map(|v| v.unwrap()).sum::<f64>() / 10_000.0;
        assert!((mean - 0.62).abs() < 0.01, "{mean}");
    }

    #[test]
    fn mixture_samples_are_clamped() {
        let cfg = MixtureConfig {
            pi: [0.5, 0.5],
            mu: [0.0, 1.0],
            sigma: [0.1, 0.1],
        };
        let t = gen_ground_truth(1000, &cfg, &mut rng(3)).unwrap();
        assert!(t.values().iter().all(|v| (0.0..=1.0).contains(&v.unwrap())));
        assert!(t.values().contains(&Some(0.0)));
    }

    #[test]
    fn invalid_mixture_rejected() {
        let bad = MixtureConfig {
            pi: [0.5, 0.6],
            ..MixtureConfig::default()
        };
        assert!(gen_ground_truth(3, &bad, &mut rng(0)).is_err());
        let bad = MixtureConfig {
            sigma: [-0.1, 0.1],
            ..MixtureConfig::default()
        };
        assert!(gen_ground_truth(3, &bad, &mut rng(0)).is_err());
    }

    #[test]
    fn one_to_one_ownership() {
        let o = gen_ownership_one_to_one(1, 1, &mut rng(0)).unwrap();
        assert_eq!(o.get(0, 0), Some(1.0));
        let o = gen_ownership_one_to_one(3, 3, &mut rng(0)).unwrap();
        let d = o.to_dense();
        for k in 0..3 {
            assert_eq!(d.row(k).sum(), 1.0);
            assert_eq!(d.column(k).sum(), 1.0);
        }
        assert!(matches!(
            gen_ownership_one_to_one(3, 4, &mut rng(0)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn er_extremes() {
        assert_eq!(gen_social_er(&ErConfig { n: 20, p: 0.0 }, &mut rng(0)).unwrap().nnz(), 0);
        let s = gen_social_er(&ErConfig { n: 20, p: 1.0 }, &mut rng(0)).unwrap();
        assert_eq!(s.nnz() / 2, 20 * 19 / 2);
        assert!((0..20).all(|u| s.get(u, u).is_none()));
    }

    #[test]
    fn er_edge_count_is_binomial() {
        let pairs = 500.0 * 499.0 / 2.0;
        let (mean, sd) = (0.05 * pairs, (pairs * 0.05 * 0.95f64).sqrt());
        let s = gen_social_er(&ErConfig { n: 500, p: 0.05 }, &mut rng(4)).unwrap();
        let edges = (s.nnz() / 2) as f64;
        assert!((edges - mean).abs() < 4.0 * sd, "{edges} vs {mean} ± {sd}");
        assert_eq!(s.transpose(), s);
    }

    #[test]
    fn homophily_thresholds() {
        let own = identity_ownership(3);
        let t = full_truth(&[0.30, 0.35, 0.90]);
        let s = gen_social_homophily(&t, &own, &HomophilyConfig { tau: 0.1 }).unwrap();
        assert_eq!(s.triplets().collect::<Vec<_>>(), vec![(0, 1, 1.0), (1, 0, 1.0)]);
        let s = gen_social_homophily(&t, &own, &HomophilyConfig { tau: 1.0 }).unwrap();
        assert_eq!(s.nnz(), 6);
        let s = gen_social_homophily(&t, &own, &HomophilyConfig { tau: 0.0 }).unwrap();
        assert_eq!(s.nnz(), 0);
    }

    #[test]
    fn homophily_rejects_shared_ownership() {
        let own = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 1, 1.0)]).unwrap();
        let t = full_truth(&[0.1, 0.2]);
        assert!(gen_social_homophily(&t, &own, &HomophilyConfig { tau: 0.5 }).is_err());
    }

    #[test]
    fn strategic_complete_social_gives_all_ones() {
        let n = 10;
        let t = full_truth(&[0.4; 10]);
        let cfg = StrategicConfig { k: 3, sigma_h: 0.25 };
        let a = gen_assess_strategic(&t, &identity_ownership(n), &complete(n), &cfg, &mut rng(5))
            .unwrap();
        assert_eq!(a.nnz(), 30);
        assert!(a.values().iter().all(|&g| g == 1.0));
    }

    #[test]
    fn strategic_without_noise_or_friends_is_exact() {
        let n = 8;
        let vals: Vec<f64> = (0..n).map(|k| k as f64 / 10.0).collect();
        let cfg = StrategicConfig { k: 4, sigma_h: 0.0 };
        let a = gen_assess_strategic(
            &full_truth(&vals),
            &identity_ownership(n),
            &CsrMatrix::zeros(n, n),
            &cfg,
            &mut rng(6),
        )
        .unwrap();
        for (u, i, g) in a.triplets() {
            assert_ne!(u, i, "owner graded own item");
            assert_eq!(g, vals[i]);
        }
    }

    #[test]
    fn strategic_k_too_large() {
        let cfg = StrategicConfig { k: 3, sigma_h: 0.1 };
        let r = gen_assess_strategic(
            &full_truth(&[0.5; 3]),
            &identity_ownership(3),
            &CsrMatrix::zeros(3, 3),
            &cfg,
            &mut rng(0),
        );
        assert!(r.is_err());
    }

    #[test]
    fn bias_reliability_boundaries() {
        let vals = [0.9, 1.0, 0.2, 0.5];
        let t = full_truth(&vals);
        let own = identity_ownership(4);
        let exact = BiasReliabilityConfig {
            k: 3,
            alpha: 0.0,
            beta: 0.0,
            sigma_max: 0.0,
        };
        let a = gen_assess_bias_reliability(&t, &own, &exact, &mut rng(7)).unwrap();
        assert!(a.triplets().all(|(_, i, g)| g == vals[i]));

        let clamp = BiasReliabilityConfig { alpha: 0.3, ..exact };
        let a = gen_assess_bias_reliability(&t, &own, &clamp, &mut rng(7)).unwrap();
        assert!(a.triplets().filter(|&(_, i, _)| i == 0).all(|(_, _, g)| g == 1.0));

        // User 1 owns the item worth 1.0; with beta = 1 its noise vanishes.
        let reliable = BiasReliabilityConfig {
            k: 3,
            alpha: -0.1,
            beta: 1.0,
            sigma_max: 0.25,
        };
        let a = gen_assess_bias_reliability(&t, &own, &reliable, &mut rng(8)).unwrap();
        for (u, i, g) in a.triplets() {
            if u == 1 {
                assert_eq!(g, (vals[i] - 0.1).clamp(0.0, 1.0));
            }
        }
    }

    #[test]
    fn bias_reliability_negative_noise_is_config_error() {
        let cfg = BiasReliabilityConfig {
            k: 1,
            alpha: 0.0,
            beta: 2.0,
            sigma_max: 0.25,
        };
        let r = gen_assess_bias_reliability(
            &full_truth(&[0.9, 0.1]),
            &identity_ownership(2),
            &cfg,
            &mut rng(0),
        );
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn default_preset_counts() {
        let d = build_scenario(&ScenarioConfig::default()).unwrap();
        assert_eq!(d.graph.assessment.nnz(), 1500);
        assert_eq!(d.graph.ownership.nnz(), 500);
        assert_eq!(d.graph.social.nnz(), 0);
        assert_eq!(d.graph.user_ids[0], "u000");
        assert_eq!(d.graph.item_ids[499], "i499");
    }

    #[test]
    fn strategic_preset_social_edges() {
        let d = build_scenario(&ScenarioConfig::strategic()).unwrap();
        let pairs = 500.0 * 499.0 / 2.0;
        let (mean, sd) = (0.05 * pairs, (pairs * 0.05 * 0.95f64).sqrt());
        let edges = d.graph.social_edge_count() as f64;
        assert!((edges - mean).abs() < 4.0 * sd, "{edges}");
    }

    #[test]
    fn single_grader_preset() {
        let mut cfg = ScenarioConfig::default();
        cfg.assessment.set_k(1);
        let d = build_scenario(&cfg).unwrap();
        assert!(d.graph.grades_by_item().iter().all(|g| g.len() == 1));
    }

    #[test]
    fn scenario_is_deterministic() {
        let cfg = ScenarioConfig {
            seed: 11,
            ..ScenarioConfig::strategic()
        };
        assert_eq!(build_scenario(&cfg).unwrap(), build_scenario(&cfg).unwrap());
        let other = ScenarioConfig { seed: 12, ..cfg };
        assert_ne!(build_scenario(&cfg).unwrap(), build_scenario(&other).unwrap());
    }
}
