//! Exit criteria. Each test writes one `criterion N: PASS|FAIL` line to
//! stderr whether or not output capture is on.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use idg_core::attribution::{gradient, idg_terms, idg_uniform, integrated_gradients};
use idg_core::experiments::{ablation_nm, error_curve, DEFAULT_M_REF};
use idg_core::metrics::{evaluate_batch, BatchReport};
use idg_core::nn::zoo::{self, SteepLogistic};
use idg_core::nn::{train_toy, TrainConfig};
use idg_core::path::{importance_factor, logit_curve};
use idg_core::sampling::{allocate_samples, build_plan};
use idg_core::{
    make_dataset, AblationAxis, CurveKind, DatasetKind, ErrorMethod, Method, MethodConfig, MetricConfig, Network,
    PathCase, StraightLinePath, Tensor,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn report(id: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {id:>2}: {verdict}  {detail}");
    assert!(pass, "criterion {id} failed: {detail}");
}

fn example1_path() -> StraightLinePath {
    StraightLinePath::new(Tensor::vector(vec![0.0]).unwrap(), Tensor::vector(vec![2.0]).unwrap()).unwrap()
}

fn random_case(seed: u64) -> (Network, StraightLinePath) {
    let net = zoo::random_convnet(1, 6, 3, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Tensor::new(vec![1, 6, 6], (0..36).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
    (net, StraightLinePath::from_black(x))
}

#[test]
fn criterion_01_example1_sensitivity() {
    let t = Instant::now();
    let net = zoo::build_example1();
    let path = example1_path();
    let grad = gradient(&net, path.input(), 0).unwrap().values.data()[0];
    let ig = integrated_gradients(&net, &path, 0, 512).unwrap().values.data()[0];
    let idg = idg_uniform(&net, &path, 0, 512).unwrap().values.data()[0];
    let elapsed = t.elapsed();
    let pass = grad == 0.0 && (ig - 1.0).abs() <= 2e-3 && (idg - 2.0).abs() <= 1e-2 && elapsed < Duration::from_secs(1);
    report(1, pass, &format!("grad {grad}, ig {ig:.6}, idg {idg:.6}, {elapsed:.2?}"));
}

/// `||a - b|| / max(||a||, ||b||)`.
fn relative_error(a: &Tensor, b: &Tensor) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.data().iter().zip(b.data()).map(|(x, y)| x - y).collect();
    let scale = norm(a.data()).max(norm(b.data()));
    if scale == 0.0 {
        norm(&diff)
    } else {
        norm(&diff) / scale
    }
}

#[test]
fn criterion_02_gradcheck() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    let mut nets = 0;
    for seed in 0..100u64 {
        let net = if seed < 60 {
            let hidden: Vec<usize> = (0..1 + seed % 3).map(|d| 3 + ((seed + d) % 5) as usize).collect();
            zoo::random_mlp(2 + (seed % 7) as usize, &hidden, 1 + (seed % 3) as usize, seed).unwrap()
        } else {
            zoo::random_convnet(1 + (seed % 2) as usize, 3 + (seed % 3) as usize, 2, seed).unwrap()
        };
        let n: usize = net.input_shape().iter().product();
        let x = (0..1000)
            .map(|_| Tensor::new(net.input_shape().to_vec(), (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap())
            .find(|x| net.relu_margin(x).unwrap() > 1e-3)
            .expect("input away from kinks");
        for class in 0..net.class_count() {
            let ad = net.grad_input(&x, class).unwrap();
            let fd = net.finite_diff_grad(&x, class, 1e-5).unwrap();
            worst = worst.max(relative_error(&ad, &fd));
        }
        nets += 1;
    }
    let elapsed = t.elapsed();
    let pass = nets == 100 && worst <= 1e-6 && elapsed < Duration::from_secs(30);
    report(2, pass, &format!("{nets} networks, worst relative error {worst:.2e}, {elapsed:.2?}"));
}

#[test]
fn criterion_03_chain_rule() {
    let d = 1e-6;
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let (net, path) = random_case(seed);
        for k in 0..100 {
            let alpha = (k as f64 + 0.5) / 100.0;
            let curve = logit_curve(&net, &path, 1, &[alpha - d, alpha, alpha + d]).unwrap();
            let f = &curve.logits;
            let chain = importance_factor(&net, &path, 1, alpha).unwrap();
            // A ReLU kink can sit inside one of the two one-sided windows.
            let gap = (chain - (f[2] - f[1]) / d).abs().min((chain - (f[1] - f[0]) / d).abs());
            worst = worst.max(gap);
        }
    }
    report(3, worst <= 1e-3, &format!("20 paths x 100 alphas, max abs error {worst:.2e}"));
}

#[test]
fn criterion_04_flat_steps_contribute_nothing() {
    let net = zoo::plateau(vec![0.5, 0.25, 0.25]).unwrap();
    let path = StraightLinePath::from_black(Tensor::vector(vec![3.0, 2.0, 2.0]).unwrap());
    let terms = idg_terms(&net, &path, 0, 64).unwrap();
    let flat: Vec<_> = terms.iter().filter(|(p, _)| p.importance == 0.0).collect();
    let nonzero = flat
        .iter()
        .flat_map(|(_, term)| term.data())
        .filter(|v| v.to_bits() != 0.0f64.to_bits())
        .count();
    let pass = !flat.is_empty() && flat.len() < terms.len() && nonzero == 0;
    report(4, pass, &format!("{} of {} steps flat, {nonzero} nonzero entries", flat.len(), terms.len()));
}

#[test]
fn criterion_05_ig_completeness() {
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let (net, path) = random_case(100 + seed);
        let class = (seed % 3) as usize;
        let ig = integrated_gradients(&net, &path, class, 4096).unwrap();
        let df = net.output(path.input(), class).unwrap() - net.output(path.baseline(), class).unwrap();
        worst = worst.max((ig.values.sum() - df).abs() / df.abs().max(1.0));
    }
    report(5, worst <= 1e-3, &format!("20 cases, worst scaled gap {worst:.2e}"));
}

#[test]
fn criterion_06_apportionment() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad_sums = 0;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=100);
        let deltas: Vec<f64> = (0..n)
            .map(|_| match rng.gen_range(0..4) {
                0 => 0.0,
                1 => -rng.gen::<f64>(),
                _ => rng.gen::<f64>() * 10f64.powi(rng.gen_range(-6..3)),
            })
            .collect();
        for m in [10, 50, 250] {
            let counts = allocate_samples(&deltas, m);
            if counts.len() != n || counts.iter().sum::<usize>() != m {
                bad_sums += 1;
                continue;
            }
            let plan = build_plan(&counts, n).unwrap();
            worst = worst.max((plan.weights.iter().sum::<f64>() - plan.covered_measure()).abs());
        }
    }
    let pass = bad_sums == 0 && worst <= 1e-12;
    report(6, pass, &format!("3000 allocations, {bad_sums} bad sums, weight gap {worst:.1e}"));
}

#[test]
fn criterion_07_adaptive_error() {
    let t = Instant::now();
    let (net, images) = zoo::steep_logistic_suite(&SteepLogistic::default(), 10, 7).unwrap();
    let cases: Vec<PathCase> = images
        .into_iter()
        .map(|x| PathCase {
            path: StraightLinePath::from_black(x),
            class_index: 0,
        })
        .collect();
    let uniform = error_curve(&net, &cases, &[10, 50, 250, 600], ErrorMethod::Idg, DEFAULT_M_REF).unwrap();
    let adaptive = error_curve(&net, &cases, &[50], ErrorMethod::IdgAdaptive { regions: 50 }, DEFAULT_M_REF).unwrap();
    let e = &uniform.epsilons;
    let a = adaptive.epsilons[0];
    let elapsed = t.elapsed();
    let decreasing = e.windows(2).all(|w| w[1] < w[0]);
    let pass = a <= e[1] && a <= 1.25 * e[3] && decreasing && elapsed < Duration::from_secs(120);
    report(
        7,
        pass,
        &format!("adaptive {a:.4e}, uniform {e:.4?}, ratio to n=600 {:.3}, {elapsed:.2?}", a / e[3]),
    );
}

const TOY_SIDE: usize = 32;

struct Toy {
    net: Network,
    train_accuracy: f64,
    images: Vec<Tensor>,
    report: BatchReport,
    elapsed: Duration,
}

/// Toy CNN trained on 1500 seed-7 images, scored on 100 seed-8 images.
fn toy() -> &'static Toy {
    static TOY: OnceLock<Toy> = OnceLock::new();
    TOY.get_or_init(|| {
        let t = Instant::now();
        let train = make_dataset(DatasetKind::Shapes, 1500, TOY_SIDE, 7).unwrap();
        let cfg = TrainConfig {
            epochs: 30,
            ..TrainConfig::default()
        };
        let init = zoo::toy_cnn(TOY_SIDE, 3, 7).unwrap();
        let (net, trained) = train_toy(&init, &train, &cfg).unwrap();
        let held_out = make_dataset(DatasetKind::Shapes, 102, TOY_SIDE, 8).unwrap();
        let images: Vec<Tensor> = held_out.samples.into_iter().take(100).map(|s| s.image).collect();
        let methods = [Method::Ig, Method::LeftIg, Method::Idg, Method::IdgAdaptive, Method::IgAdaptive];
        let report = evaluate_batch(
            &net,
            &images,
            &methods,
            &[CurveKind::Insertion, CurveKind::Deletion],
            &MethodConfig::default(),
            &MetricConfig::default(),
        )
        .unwrap();
        Toy {
            net,
            train_accuracy: trained.final_accuracy,
            images,
            report,
            elapsed: t.elapsed(),
        }
    })
}

/// Share of images where `a` scores above (or below, for `lower`) `b`.
fn win_rate(r: &BatchReport, kind: CurveKind, a: Method, b: Method, lower: bool) -> f64 {
    let x: Vec<f64> = r.values(kind, a).collect();
    let y: Vec<f64> = r.values(kind, b).collect();
    let wins = x.iter().zip(&y).filter(|(p, q)| if lower { p < q } else { p > q }).count();
    wins as f64 / x.len() as f64
}

#[test]
fn criterion_08_toy_metric_ordering() {
    let toy = toy();
    let r = &toy.report;
    let mean = |k, m| r.mean(k, m).unwrap();
    let idg = Method::IdgAdaptive;
    let checks = [
        (
            "insertion vs ig",
            mean(CurveKind::Insertion, idg) > mean(CurveKind::Insertion, Method::Ig),
            win_rate(r, CurveKind::Insertion, idg, Method::Ig, false),
        ),
        (
            "deletion vs ig",
            mean(CurveKind::Deletion, idg) < mean(CurveKind::Deletion, Method::Ig),
            win_rate(r, CurveKind::Deletion, idg, Method::Ig, true),
        ),
        (
            "deletion vs lig",
            mean(CurveKind::Deletion, idg) < mean(CurveKind::Deletion, Method::LeftIg),
            win_rate(r, CurveKind::Deletion, idg, Method::LeftIg, true),
        ),
    ];
    let pass = toy.train_accuracy >= 0.90
        && toy.images.len() == 100
        && checks.iter().all(|&(_, better, rate)| better && rate >= 0.6)
        && toy.elapsed < Duration::from_secs(300);
    let detail: Vec<String> = checks
        .iter()
        .map(|(name, better, rate)| format!("{name}: mean better {better}, win rate {rate:.2}"))
        .collect();
    report(
        8,
        pass,
        &format!(
            "train acc {:.3}; insertion ig {:.4} idg-as {:.4}; deletion ig {:.4} lig {:.4} idg-as {:.4}; {}; {:.1?}",
            toy.train_accuracy,
            mean(CurveKind::Insertion, Method::Ig),
            mean(CurveKind::Insertion, idg),
            mean(CurveKind::Deletion, Method::Ig),
            mean(CurveKind::Deletion, Method::LeftIg),
            mean(CurveKind::Deletion, idg),
            detail.join("; "),
            toy.elapsed
        ),
    );
}

#[test]
fn criterion_09_region_and_node_ablation() {
    let toy = toy();
    let cases: Vec<PathCase> = toy.images[..10]
        .iter()
        .map(|x| PathCase::black(&toy.net, x).unwrap())
        .collect();
    let values = [5, 10, 25, 50, 100];
    let cfg = MetricConfig::default();
    let regions = ablation_nm(&toy.net, &cases, AblationAxis::Regions, 50, &values, &cfg).unwrap();
    let steps = ablation_nm(&toy.net, &cases, AblationAxis::Steps, 50, &values, &cfg).unwrap();
    let at = |g: &idg_core::AblationGrid, v| g.auc_at(v).unwrap();
    let pass = at(&regions, 50) <= at(&regions, 5) && at(&steps, 100) <= at(&steps, 5);
    report(
        9,
        pass,
        &format!(
            "N sweep (M=50) {:.4?}; M sweep (N=50) {:.4?} over {values:?}",
            regions.aucs, steps.aucs
        ),
    );
}

#[test]
fn criterion_10_sampling_moves_deletion_less_than_weighting() {
    let r = &toy().report;
    let del = |m| r.mean(CurveKind::Deletion, m).unwrap();
    let sampling = (del(Method::IgAdaptive) - del(Method::Ig)).abs();
    let weighting = (del(Method::Idg) - del(Method::Ig)).abs();
    report(
        10,
        sampling < weighting,
        &format!(
            "deletion ig {:.4} ig-as {:.4} idg {:.4} idg-as {:.4}; |ig-as - ig| {sampling:.4} vs |idg - ig| {weighting:.4}",
            del(Method::Ig),
            del(Method::IgAdaptive),
            del(Method::Idg),
            del(Method::IdgAdaptive)
        ),
    );
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_11_cli_determinism() {
    let tmp = TempDir::new().unwrap();
    let root = tmp.path();
    let data = root.join("data");
    let model = root.join("model").join("model.dgnet");
    let scalar = root.join("x.csv");
    fs::write(&scalar, "shape:1\n2\n").unwrap();

    let image = data.join("img_00002.pgm");
    let commands: Vec<(&str, Vec<String>)> = vec![
        ("make-data", vec!["make-data".into(), "--count".into(), "9".into(), "--side".into(), "16".into()]),
        ("train", vec!["train".into(), "--data".into(), data.display().to_string(), "--epochs".into(), "2".into()]),
        (
            "attribute",
            vec![
                "attribute".into(), "--model".into(), model.display().to_string(), "--image".into(),
                image.display().to_string(), "--method".into(), "idg-as".into(), "--N".into(), "10".into(),
                "--M".into(), "10".into(),
            ],
        ),
        (
            "evaluate",
            vec![
                "evaluate".into(), "--model".into(), model.display().to_string(), "--data".into(),
                data.display().to_string(), "--methods".into(), "ig,lig,idg,idg-as,ig-as".into(), "--metrics".into(),
                "insertion,deletion,aic,sic".into(), "--steps".into(), "8".into(), "--N".into(), "8".into(),
                "--M".into(), "8".into(),
            ],
        ),
        (
            "error-curve",
            vec![
                "experiment".into(), "error-curve".into(), "--count".into(), "3".into(), "--n".into(),
                "10,50".into(), "--m-ref".into(), "400".into(),
            ],
        ),
        (
            "ablate-nm",
            vec![
                "experiment".into(), "ablate-nm".into(), "--count".into(), "2".into(), "--values".into(),
                "5,20".into(),
            ],
        ),
        (
            "saturation",
            vec![
                "experiment".into(), "saturation".into(), "--model".into(), "builtin:example1".into(), "--image".into(),
                scalar.display().to_string(),
            ],
        ),
    ];

    let mut failures = Vec::new();
    for (name, args) in &commands {
        let mut outputs = Vec::new();
        for (run, jobs) in [(0, "1"), (1, "3")] {
            // The first run of make-data and train feeds the later commands.
            let out = match *name {
                "make-data" if run == 0 => data.clone(),
                "train" if run == 0 => model.parent().unwrap().to_path_buf(),
                _ => root.join(format!("{name}-{run}")),
            };
            let status = Command::new(env!("CARGO_BIN_EXE_idg"))
                .args(args)
                .args(["--seed", "11", "--jobs", jobs, "--out"])
                .arg(&out)
                .env_remove("DG_SEED")
                .output()
                .unwrap();
            assert!(status.status.success(), "{name}: {}", String::from_utf8_lossy(&status.stderr));
            outputs.push(snapshot(&out));
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            failures.push(*name);
        }
    }
    report(
        11,
        failures.is_empty(),
        &format!("{} commands rerun with a fixed seed, differing: {failures:?}", commands.len()),
    );
}
