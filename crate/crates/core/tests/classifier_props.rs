use std::collections::BTreeSet;

use htx_core::classifier::{
    cross_validate, train, ClassDistribution, CvOptions, HashtagClass, Instance, MaxEntModel, Problem,
    SampleOptions, TrainOptions,
};
use htx_core::cooccur::{BuildOptions, CooccurrenceStore};
use htx_core::corpus::{CorpusIndex, IngestOptions};
use htx_core::features::{FeatureConfig, FeatureExtractor, Gazetteer};
use htx_core::synthetic;
use htx_core::Execution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_problem(rng: &mut ChaCha8Rng) -> Problem {
    let n_features = rng.gen_range(3..=20);
    let instances = (0..rng.gen_range(5..=50))
        .map(|_| {
            let mut f: Vec<u32> = (0..n_features as u32).filter(|_| rng.gen_bool(0.3)).collect();
            f.dedup();
            Instance {
                features: f,
                label: rng.gen_range(0..5),
            }
        })
        .collect();
    Problem {
        n_features,
        instances,
        sigma2: rng.gen_range(0.5..3.0),
    }
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let p = random_problem(&mut rng);
        let w: Vec<f64> = (0..p.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (_, grad) = p.objective(&w, Execution::Sequential);
        let h = 1e-5;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..w.len() {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[i] += h;
            wm[i] -= h;
            let fd = (p.objective(&wp, Execution::Sequential).0 - p.objective(&wm, Execution::Sequential).0) / (2.0 * h);
            num += (fd - grad[i]).powi(2);
            den += fd.powi(2).max(grad[i].powi(2));
        }
        let rel = (num / den.max(1e-300)).sqrt();
        assert!(rel < 1e-5, "relative gradient error {rel}");
    }
}

#[test]
fn parallel_objective_is_bitwise_sequential() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut p = random_problem(&mut rng);
    let extra: Vec<Instance> = (0..2000)
        .map(|i| Instance {
            features: vec![(i % p.n_features) as u32],
            label: i % 5,
        })
        .collect();
    p.instances.extend(extra);
    let w: Vec<f64> = (0..p.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let a = p.objective(&w, Execution::Parallel);
    let b = p.objective(&w, Execution::Sequential);
    assert_eq!(a.0.to_bits(), b.0.to_bits());
    assert_eq!(a.1, b.1);
}

#[test]
fn trained_objective_beats_random_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for round in 0..5 {
        let sets: Vec<BTreeSet<String>> = (0..40)
            .map(|_| (0..8).filter(|_| rng.gen_bool(0.4)).map(|j| format!("f{j}")).collect())
            .collect();
        let data: Vec<(&BTreeSet<String>, HashtagClass)> = sets
            .iter()
            .map(|s| (s, HashtagClass::ALL[rng.gen_range(0..5)]))
            .collect();
        let model = train(&data, TrainOptions::default()).unwrap();
        assert!(model.trace.windows(2).all(|w| w[1] >= w[0]), "round {round}");
        let p = Problem {
            n_features: model.n_features(),
            instances: data
                .iter()
                .map(|(s, c)| Instance {
                    features: model.encode(s.iter()),
                    label: c.index(),
                })
                .collect(),
            sigma2: 1.0,
        };
        for _ in 0..50 {
            let w: Vec<f64> = (0..p.dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            assert!(model.objective >= p.objective(&w, Execution::Sequential).0);
        }
    }
}

#[test]
fn unseen_features_do_not_matter() {
    let a: BTreeSet<String> = ["x".to_string()].into();
    let b: BTreeSet<String> = ["y".to_string()].into();
    let data = vec![(&a, HashtagClass::Event), (&b, HashtagClass::Person)];
    let model = train(&data, TrainOptions::default()).unwrap();
    let mut with_extra = a.clone();
    with_extra.insert("never-seen".into());
    assert_eq!(model.classify_active(&a), model.classify_active(&with_extra));
    let d = model.classify_active(&with_extra);
    assert!((d.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let zero = MaxEntModel::zeros(vec![], false);
    assert_eq!(zero.classify_active(&a), ClassDistribution::uniform());
}

#[test]
fn planted_classes_small() {
    let tmp = tempfile::tempdir().unwrap();
    let (tweets, gold) = synthetic::planted_class_corpus(7, 10, 12);
    let input = tmp.path().join("planted.jsonl");
    std::fs::write(&input, synthetic::to_jsonl(&tweets)).unwrap();
    let index = CorpusIndex::build(&input, &tmp.path().join("idx"), IngestOptions::default()).unwrap();
    let store = CooccurrenceStore::build(&index, &tmp.path().join("cooc"), BuildOptions::default()).unwrap();
    let gaz = Gazetteer::default();
    let fx = FeatureExtractor::new(Some(&store), &gaz, None, FeatureConfig::default());
    let report = cross_validate(
        &gold,
        &fx,
        &index,
        CvOptions {
            folds: 5,
            sample: SampleOptions {
                sample_size: 100,
                seed: 3,
                exec: Execution::Parallel,
            },
            train: TrainOptions::default(),
        },
    )
    .unwrap();
    assert!(report.macro_f1 >= 0.9, "macro-F1 {}", report.macro_f1);
    let mut gold_total = [0u64; 5];
    let mut pred_total = [0u64; 5];
    for f in &report.folds {
        for c in 0..5 {
            gold_total[c] += f.gold_counts[c];
            pred_total[c] += f.predicted_counts[c];
        }
    }
    assert_eq!(report.column_sums(), gold_total);
    assert_eq!(report.row_sums(), pred_total);
    assert_eq!(report.column_sums(), gold.class_counts());
}
