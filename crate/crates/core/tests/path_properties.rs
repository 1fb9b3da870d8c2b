use idg_core::attribution::{idg_terms, integrated_gradients, left_ig};
use idg_core::nn::zoo;
use idg_core::path::{importance_factor, logit_curve, uniform_alphas};
use idg_core::sampling::{adaptive_attribution, build_plan, ig_adaptive};
use idg_core::{AdaptiveConfig, Network, StraightLinePath, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_case(seed: u64) -> (Network, StraightLinePath) {
    let net = zoo::random_convnet(1, 6, 3, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Tensor::new(vec![1, 6, 6], (0..36).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
    (net, StraightLinePath::from_black(x))
}

/// The chain-rule slope must match the curve's slope on at least one side:
/// a ReLU kink can fall inside only one of two adjacent one-sided windows.
fn one_sided_gap(net: &Network, path: &StraightLinePath, class: usize, alpha: f64, d: f64) -> f64 {
    let f = |a: f64| net.output(&path.interpolate(a).unwrap(), class).unwrap();
    let chain = importance_factor(net, path, class, alpha).unwrap();
    let fwd = (f(alpha + d) - f(alpha)) / d;
    let bwd = (f(alpha) - f(alpha - d)) / d;
    (chain - fwd).abs().min((chain - bwd).abs())
}

#[test]
fn importance_factor_is_the_curve_slope() {
    for seed in 0..10 {
        let (net, path) = random_case(seed);
        for k in 0..100 {
            let alpha = (k as f64 + 0.5) / 100.0;
            let gap = one_sided_gap(&net, &path, 1, alpha, 1e-6);
            assert!(gap <= 1e-3, "seed {seed} alpha {alpha}: {gap}");
        }
    }
}

#[test]
fn ig_is_complete_at_high_resolution() {
    for seed in 0..10 {
        let (net, path) = random_case(seed);
        let ig = integrated_gradients(&net, &path, 0, 4096).unwrap();
        let df = net.output(path.input(), 0).unwrap() - net.output(path.baseline(), 0).unwrap();
        let gap = (ig.values.sum() - df).abs();
        assert!(gap <= 1e-3 * df.abs().max(1.0), "seed {seed}: {gap}");
    }
}

#[test]
fn adaptive_ig_is_complete_over_covered_growth() {
    // Regions without nodes have no growth, so completeness survives the plan.
    let net = zoo::build_example1();
    let path = StraightLinePath::new(Tensor::vector(vec![0.0]).unwrap(), Tensor::vector(vec![2.0]).unwrap()).unwrap();
    let a = ig_adaptive(&net, &path, 0, &AdaptiveConfig::new(20, 200).unwrap()).unwrap();
    assert!((a.values.sum() - 1.0).abs() < 1e-9, "{}", a.values.sum());
}

#[test]
fn saturated_steps_contribute_exact_zeros() {
    let net = zoo::plateau(vec![0.5, 0.25, 0.25]).unwrap();
    let path = StraightLinePath::from_black(Tensor::vector(vec![3.0, 2.0, 2.0]).unwrap());
    let terms = idg_terms(&net, &path, 0, 64).unwrap();
    let flat: Vec<_> = terms.iter().filter(|(p, _)| p.importance == 0.0).collect();
    assert!(!flat.is_empty() && flat.len() < terms.len());
    for (_, term) in flat {
        assert!(term.data().iter().all(|&v| v == 0.0));
    }
}

#[test]
fn left_ig_never_exceeds_ig_steps() {
    for seed in 0..5 {
        let (net, path) = random_case(seed);
        let ig = integrated_gradients(&net, &path, 2, 40).unwrap();
        let lig = left_ig(&net, &path, 2, 40, 0.9).unwrap();
        assert!(lig.steps <= ig.steps);
        assert_eq!(left_ig(&net, &path, 2, 40, 1.0).unwrap().values, ig.values);
    }
}

#[test]
fn adaptive_plan_matches_growth_profile() {
    let (net, imgs) = zoo::steep_logistic_suite(&zoo::SteepLogistic::default(), 3, 11).unwrap();
    for img in imgs {
        let path = StraightLinePath::from_black(img);
        let run = adaptive_attribution(&net, &path, 0, &AdaptiveConfig::new(50, 50).unwrap(), true).unwrap();
        let plan = run.plan.expect("steep curve grows");
        let curve = logit_curve(&net, &path, 0, &uniform_alphas(1001)).unwrap();
        let region = idg_core::path::decision_region(&curve, 0.9).unwrap();
        let inside = plan.nodes.iter().filter(|&&a| a >= region.alpha_lo - 0.02 && a <= region.alpha_hi).count();
        assert!(inside as f64 >= 0.6 * plan.len() as f64, "{inside} of {}", plan.len());
        assert_eq!(build_plan(&plan.counts, 50).unwrap(), plan);
    }
}
