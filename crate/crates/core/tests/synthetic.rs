use peergrade::rng::substream;
use peergrade::synthetic::{
    build_scenario, gen_social_homophily, AssessmentModel, BiasReliabilityConfig,
    HomophilyConfig, MixtureConfig, ScenarioConfig, SocialModel,
};
use peergrade::Dataset;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn residuals(d: &Dataset) -> Vec<f64> {
    d.graph
        .assessment
        .triplets()
        .map(|(_, i, g)| g - d.truth.get(i).unwrap())
        .collect()
}

/// Expected `clamp(v + sd·z, 0, 1) - v`, averaged over the given items, by
/// brute-force sampling.
fn clamped_bias_oracle(values: &[f64], sd: f64, draws: usize) -> f64 {
    let mut rng = substream(0xC1A3, 99);
    let mut total = 0.0;
    for &v in values {
        for _ in 0..draws {
            let z: f64 = rng.sample(StandardNormal);
            total += (v + sd * z).clamp(0.0, 1.0) - v;
        }
    }
    total / (values.len() * draws) as f64
}

fn strategic_without_friends(m: usize, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        n: m,
        m,
        seed,
        social: SocialModel::None,
        assessment: AssessmentModel::Strategic { k: 3, sigma_h: 0.25 },
        ..ScenarioConfig::default()
    }
}

#[test]
fn stranger_grades_are_unbiased_up_to_clamping() {
    for m in [500, 5000] {
        let d = build_scenario(&strategic_without_friends(m, 21)).unwrap();
        let res = residuals(&d);
        assert_eq!(res.len(), 3 * m);
        let observed = res.iter().sum::<f64>() / res.len() as f64;
        let graded: Vec<f64> = d
            .graph
            .assessment
            .triplets()
            .map(|(_, i, _)| d.truth.get(i).unwrap())
            .collect();
        let expected = clamped_bias_oracle(&graded, 0.25, 200);
        assert!(
            (observed - expected).abs() < 0.01,
            "m = {m}: observed bias {observed:.5}, oracle {expected:.5}"
        );
    }
}

/// Two-sample Kolmogorov–Smirnov statistic.
fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn strangers_and_unbiased_graders_share_a_distribution() {
    let strategic = build_scenario(&strategic_without_friends(5000, 1)).unwrap();
    let reliability = build_scenario(&ScenarioConfig {
        n: 5000,
        m: 5000,
        seed: 2,
        ..ScenarioConfig::default()
    })
    .unwrap();
    let (a, b) = (residuals(&strategic), residuals(&reliability));
    let n_eff = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
    // 0.1% critical value.
    let critical = 1.95 / n_eff.sqrt();
    let d = ks_statistic(a, b);
    assert!(d < critical, "KS {d} >= {critical}");
}

#[test]
fn homophily_is_deterministic_and_symmetric() {
    let d = build_scenario(&ScenarioConfig {
        n: 80,
        m: 80,
        ..ScenarioConfig::default()
    })
    .unwrap();
    let cfg = HomophilyConfig { tau: 0.05 };
    let a = gen_social_homophily(&d.truth, &d.graph.ownership, &cfg).unwrap();
    let b = gen_social_homophily(&d.truth, &d.graph.ownership, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.transpose(), a);
    assert!(a.nnz() > 0);
}

fn scenario_strategy() -> impl Strategy<Value = ScenarioConfig> {
    let social = prop_oneof![
        Just(SocialModel::None),
        (0.0..=1.0f64).prop_map(|p| SocialModel::Er { p }),
        (0.0..=1.0f64).prop_map(|tau| SocialModel::Homophily { tau }),
    ];
    let assessment = prop_oneof![
        (1usize..4, 0.0..0.5f64).prop_map(|(k, sigma_h)| AssessmentModel::Strategic { k, sigma_h }),
        (1usize..4, -1.0..=1.0f64, 0.0..=1.0f64, 0.0..0.5f64).prop_map(|(k, alpha, beta, sigma_max)| {
            BiasReliabilityConfig { k, alpha, beta, sigma_max }.into()
        }),
    ];
    (4usize..30, any::<u64>(), social, assessment, 0.0..=1.0f64).prop_map(
        |(n, seed, social, assessment, pi0)| ScenarioConfig {
            n,
            m: n,
            seed,
            mixture: MixtureConfig {
                pi: [pi0, 1.0 - pi0],
                ..MixtureConfig::default()
            },
            social,
            assessment,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_scenarios_keep_invariants(cfg in scenario_strategy()) {
        let d = build_scenario(&cfg).unwrap();
        let k = cfg.assessment.k();
        prop_assert!(d.truth.values().iter().all(|v| (0.0..=1.0).contains(&v.unwrap())));
        prop_assert!(d.graph.assessment.values().iter().all(|g| (0.0..=1.0).contains(g)));
        prop_assert!(d.graph.grades_by_item().iter().all(|g| g.len() == k));
        for (u, i, _) in d.graph.assessment.triplets() {
            prop_assert!(d.graph.ownership.get(u, i).is_none(), "user {} graded own item {}", u, i);
        }
        prop_assert_eq!(d.graph.social.transpose(), d.graph.social.clone());
        prop_assert!(d.graph.validate().is_ok());
        prop_assert_eq!(build_scenario(&cfg).unwrap(), d);
    }
}
