//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::Request;
use htx_core::classifier::{self, cross_validate, CvOptions, HashtagClass, Instance, Problem, SampleOptions, TrainOptions};
use htx_core::cooccur::{BuildOptions, CooccurrenceStore};
use htx_core::corpus::{CorpusIndex, IngestOptions, RawTweet};
use htx_core::features::{FeatureConfig, FeatureExtractor, Gazetteer};
use htx_core::hashgraph::{partition_graph, PartitionOptions, WeightedGraph};
use htx_core::synthetic;
use htx_core::taxonomy::{self, EvalOptions, Measure, Taxonomy};
use htx_core::tokenizer::{tokenize, Token};
use htx_core::Execution;
use htx_pipeline::{BuildLayout, PipelineConfig};
use htx_server::{router, Snapshot};
use http_body_util::BodyExt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::Value;
use tower::ServiceExt;

type Check = Result<String, String>;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

// 1

#[derive(Deserialize)]
struct GoldenTokens {
    text: String,
    tokens: Vec<Token>,
}

fn tokenizer_golden() -> Check {
    let body = ok(std::fs::read_to_string(fixtures().join("tokenizer_golden.jsonl")), "reading suite")?;
    let cases: Vec<GoldenTokens> = body
        .lines()
        .map(|l| serde_json::from_str(l).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    ensure(cases.len() >= 50, || format!("only {} cases", cases.len()))?;
    let failed: Vec<&str> = cases
        .iter()
        .filter(|c| tokenize(&c.text) != c.tokens)
        .map(|c| c.text.as_str())
        .collect();
    ensure(failed.is_empty(), || format!("{} mismatches, first: {:?}", failed.len(), failed[0]))?;
    Ok(format!("{}/{} tweets identical", cases.len(), cases.len()))
}

// 2

type Pairs = BTreeMap<(String, String), u32>;

fn brute_force_pairs(tweets: &[RawTweet], min_support: u64) -> Pairs {
    let sets: Vec<BTreeSet<String>> = tweets
        .iter()
        .map(|t| {
            t.text
                .split_whitespace()
                .filter_map(|w| w.strip_prefix('#'))
                .map(str::to_lowercase)
                .collect()
        })
        .collect();
    let mut freq: BTreeMap<&str, u64> = BTreeMap::new();
    for s in &sets {
        for h in s {
            *freq.entry(h).or_default() += 1;
        }
    }
    let mut pairs = BTreeMap::new();
    for s in &sets {
        let rel: Vec<&String> = s.iter().filter(|h| freq[h.as_str()] >= min_support).collect();
        for i in 0..rel.len() {
            for j in i + 1..rel.len() {
                *pairs.entry((rel[i].clone(), rel[j].clone())).or_insert(0) += 1;
            }
        }
    }
    pairs
}

fn dictionary_oracle(pairs: &Pairs, tag: &str, k: usize) -> Vec<(String, u32)> {
    let mut v: Vec<(String, u32)> = pairs
        .iter()
        .filter_map(|((a, b), &c)| {
            if a == tag {
                Some((b.clone(), c))
            } else if b == tag {
                Some((a.clone(), c))
            } else {
                None
            }
        })
        .collect();
    v.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
    v.truncate(k);
    v
}

fn cooccurrence_oracle() -> Check {
    let start = Instant::now();
    let mut total_pairs = 0;
    let mut dictionaries = 0;
    for seed in 0..20u64 {
        let n_tweets = 1000 + seed as usize * 450;
        let n_tags = 60 + seed as usize * 22;
        let tweets = synthetic::random_corpus(seed, n_tweets, n_tags);
        let tmp = ok(tempfile::tempdir(), "tempdir")?;
        let input = tmp.path().join("c.jsonl");
        ok(std::fs::write(&input, synthetic::to_jsonl(&tweets)), "writing corpus")?;
        let index = ok(CorpusIndex::build(&input, &tmp.path().join("idx"), IngestOptions::default()), "ingest")?;
        let store = ok(
            CooccurrenceStore::build(
                &index,
                &tmp.path().join("cooc"),
                BuildOptions {
                    spill_threshold: 2000 + seed as usize * 500,
                    exec: if seed % 2 == 0 { Execution::Parallel } else { Execution::Sequential },
                },
            ),
            "cooc build",
        )?;
        let want = brute_force_pairs(&tweets, 3);
        let mut got = Pairs::new();
        for r in ok(store.pairs(), "pairs")? {
            let (a, b, c) = ok(r, "pair")?;
            got.insert((a.to_string(), b.to_string()), c);
        }
        ensure(got == want, || format!("seed {seed}: pair counts differ"))?;
        for tag in store.tags() {
            let d = ok(store.dictionary(tag, 10), "dictionary")?.unwrap_or_default();
            ensure(d == dictionary_oracle(&want, tag, 10), || format!("seed {seed}: dictionary of {tag}"))?;
            dictionaries += 1;
        }
        total_pairs += want.len();
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:.1?}"))?;
    Ok(format!(
        "20 corpora, {total_pairs} pairs and {dictionaries} dictionaries exact in {elapsed:.1?}"
    ))
}

// 3

#[derive(Deserialize)]
struct TaxonomyExpected {
    pairs: Vec<(String, String, f64, f64)>,
    lemma_pairs: Vec<(String, String, f64, f64)>,
}

fn similarity_oracle() -> Check {
    let tax = ok(Taxonomy::load(&fixtures().join("taxonomy50.json")), "taxonomy")?;
    let exp: TaxonomyExpected = ok(
        serde_json::from_str(&ok(std::fs::read_to_string(fixtures().join("taxonomy50.expected.json")), "oracle")?),
        "oracle json",
    )?;
    let mut worst: f64 = 0.0;
    for (a, b, path, wup) in &exp.pairs {
        let (x, y) = (ok(tax.synset(a), "synset")?, ok(tax.synset(b), "synset")?);
        worst = worst
            .max((tax.path_similarity(x, y).value - path).abs())
            .max((tax.wu_palmer_similarity(x, y).value - wup).abs());
    }
    for (a, b, path, wup) in &exp.lemma_pairs {
        let p = tax.lemma_similarity(a, b, Measure::Path).ok_or("lemma missing")?.value;
        let w = tax.lemma_similarity(a, b, Measure::WuPalmer).ok_or("lemma missing")?.value;
        worst = worst.max((p - path).abs()).max((w - wup).abs());
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    let n = tax.len() as u32;
    for i in 0..n {
        let a = htx_core::taxonomy::SynsetId(i);
        for m in [Measure::Path, Measure::WuPalmer] {
            ensure(tax.similarity(a, a, m).value == 1.0, || format!("identity fails for {}", tax.name(a)))?;
        }
        for j in 0..n {
            let b = htx_core::taxonomy::SynsetId(j);
            for m in [Measure::Path, Measure::WuPalmer] {
                ensure(tax.similarity(a, b, m).value == tax.similarity(b, a, m).value, || {
                    format!("asymmetric {} {}", tax.name(a), tax.name(b))
                })?;
            }
        }
    }
    Ok(format!(
        "{} synset and {} lemma pairs within {worst:e}; symmetry and identity on {} synsets",
        exp.pairs.len(),
        exp.lemma_pairs.len(),
        n
    ))
}

// 4

fn evaluation_ordering() -> Check {
    let (tweets, records) = synthetic::sibling_fixture(42);
    let tax = ok(Taxonomy::from_records(records), "taxonomy")?;
    let tmp = ok(tempfile::tempdir(), "tempdir")?;
    let input = tmp.path().join("s.jsonl");
    ok(std::fs::write(&input, synthetic::to_jsonl(&tweets)), "writing corpus")?;
    let index = ok(CorpusIndex::build(&input, &tmp.path().join("idx"), IngestOptions::default()), "ingest")?;
    let store = ok(CooccurrenceStore::build(&index, &tmp.path().join("cooc"), BuildOptions::default()), "cooc")?;
    let r = ok(taxonomy::evaluate_dictionary(&store, &tax, EvalOptions::default()), "evaluation")?;
    let get = |m: &htx_core::taxonomy::MeanSimilarity, path: bool| if path { m.path } else { m.wu_palmer };
    let mut lines = Vec::new();
    for (path, name) in [(true, "path"), (false, "wu-palmer")] {
        let c = get(&r.cooccurrence, path).ok_or("no co-occurrence pairs")?;
        let t = get(&r.twitter_baseline, path).ok_or("no twitter baseline pairs")?;
        let w = get(&r.taxonomy_baseline, path).ok_or("no taxonomy baseline pairs")?;
        ensure(c > t && t > w, || format!("{name}: {c:.4} / {t:.4} / {w:.4} not strictly ordered"))?;
        lines.push(format!("{name} {c:.3} > {t:.3} > {w:.3}"));
    }
    Ok(lines.join("; "))
}

// 5

fn random_problem(rng: &mut ChaCha8Rng) -> Problem {
    let n_features = rng.gen_range(3..=20);
    let instances = (0..rng.gen_range(5..=50))
        .map(|_| Instance {
            features: (0..n_features as u32).filter(|_| rng.gen_bool(0.3)).collect(),
            label: rng.gen_range(0..5),
        })
        .collect();
    Problem {
        n_features,
        instances,
        sigma2: rng.gen_range(0.5..3.0),
    }
}

fn maxent_gradient() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2010);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let p = random_problem(&mut rng);
        let w: Vec<f64> = (0..p.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (_, grad) = p.objective(&w, Execution::Sequential);
        let h = 1e-5;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..w.len() {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[i] += h;
            wm[i] -= h;
            let fd = (p.objective(&wp, Execution::Sequential).0 - p.objective(&wm, Execution::Sequential).0) / (2.0 * h);
            num += (fd - grad[i]).powi(2);
            den += fd.powi(2).max(grad[i].powi(2));
        }
        worst = worst.max((num / den.max(1e-300)).sqrt());
    }
    ensure(worst < 1e-5, || format!("relative gradient error {worst:e}"))?;
    let mut steps = 0;
    for round in 0..10 {
        let sets: Vec<BTreeSet<String>> = (0..rng.gen_range(5..=50))
            .map(|_| (0..rng.gen_range(3..=20)).filter(|_| rng.gen_bool(0.4)).map(|j| format!("f{j}")).collect())
            .collect();
        let data: Vec<(&BTreeSet<String>, HashtagClass)> =
            sets.iter().map(|s| (s, HashtagClass::ALL[rng.gen_range(0..5)])).collect();
        let model = ok(classifier::train(&data, TrainOptions::default()), "training")?;
        ensure(model.trace.windows(2).all(|w| w[1] >= w[0]), || format!("round {round}: trace decreases"))?;
        steps += model.trace.len().saturating_sub(1);
    }
    Ok(format!(
        "max relative gradient error {worst:.1e} on 10 problems; objective monotone over {steps} accepted steps"
    ))
}

// 6

fn planted_recovery() -> Check {
    let start = Instant::now();
    let tmp = ok(tempfile::tempdir(), "tempdir")?;
    let (tweets, gold) = synthetic::planted_class_corpus(2010, 20, 30);
    let input = tmp.path().join("planted.jsonl");
    ok(std::fs::write(&input, synthetic::to_jsonl(&tweets)), "writing corpus")?;
    let index = ok(CorpusIndex::build(&input, &tmp.path().join("idx"), IngestOptions::default()), "ingest")?;
    let store = ok(CooccurrenceStore::build(&index, &tmp.path().join("cooc"), BuildOptions::default()), "cooc")?;
    let gaz = Gazetteer::default();
    let fx = FeatureExtractor::new(Some(&store), &gaz, None, FeatureConfig::default());
    let report = ok(
        cross_validate(
            &gold,
            &fx,
            &index,
            CvOptions {
                folds: 5,
                sample: SampleOptions::default(),
                train: TrainOptions::default(),
            },
        ),
        "cross-validation",
    )?;
    let mut gold_total = [0u64; 5];
    let mut pred_total = [0u64; 5];
    for f in &report.folds {
        for c in 0..5 {
            gold_total[c] += f.gold_counts[c];
            pred_total[c] += f.predicted_counts[c];
        }
    }
    ensure(report.column_sums() == gold_total, || "column sums differ from fold gold counts".into())?;
    ensure(report.row_sums() == pred_total, || "row sums differ from fold predicted counts".into())?;
    ensure(report.column_sums() == gold.class_counts(), || "column sums differ from gold class counts".into())?;
    ensure(report.macro_f1 >= 0.9, || format!("macro-F1 {:.3}", report.macro_f1))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:.1?}"))?;
    Ok(format!("5-fold macro-F1 {:.3}, sums exact, {elapsed:.1?}", report.macro_f1))
}

// 7

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> WeightedGraph {
    let mut g = WeightedGraph::new(n);
    for _ in 0..n * rng.gen_range(2..5) {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        g.add_edge(u, v, rng.gen_range(1..20));
    }
    g
}

fn cut_of(g: &WeightedGraph, labels: &[usize]) -> u64 {
    let mut cut = 0;
    for u in 0..g.len() {
        for &(v, w) in &g.adj[u] {
            if labels[u] != labels[v] {
                cut += w;
            }
        }
    }
    cut / 2
}

fn partitioner_quality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2010);
    let mut passes = 0;
    let mut margin = 0u64;
    for round in 0..20 {
        let n = rng.gen_range(50..=200);
        let k = [2, 3, 4, 5, 8][round % 5];
        let g = random_graph(&mut rng, n);
        let cap = (1.1 * n as f64 / k as f64).ceil() as u64;
        let p = partition_graph(
            &g,
            k,
            PartitionOptions {
                seed: round as u64,
                max_part_weight: cap,
                trials: 8,
                max_passes: 16,
                exec: Execution::Parallel,
            },
        );
        ensure(p.cut == cut_of(&g, &p.labels), || format!("round {round}: reported cut is wrong"))?;
        ensure(p.passes.iter().all(|r| r.after <= r.before), || format!("round {round}: a pass increased the cut"))?;
        passes += p.passes.len();
        let mut best = u64::MAX;
        let mut order: Vec<usize> = (0..n).collect();
        for _ in 0..100 {
            order.shuffle(&mut rng);
            let mut labels = vec![0; n];
            for (i, &v) in order.iter().enumerate() {
                labels[v] = i % k;
            }
            best = best.min(cut_of(&g, &labels));
        }
        ensure(p.cut <= best, || format!("round {round}: cut {} > best random {best}", p.cut))?;
        margin += best - p.cut;
    }
    let mut cliques = WeightedGraph::new(20);
    for base in [0, 10] {
        for u in base..base + 10 {
            for v in u + 1..base + 10 {
                cliques.add_edge(u, v, 1);
            }
        }
    }
    let p = partition_graph(
        &cliques,
        2,
        PartitionOptions {
            seed: 1,
            max_part_weight: 11,
            trials: 8,
            max_passes: 16,
            exec: Execution::Parallel,
        },
    );
    ensure(p.cut == 0, || format!("two cliques cut {}", p.cut))?;
    Ok(format!(
        "20 graphs beat 100 random partitions (total margin {margin}); {passes} refinement passes monotone; cliques cut 0"
    ))
}

// 8

fn pipeline_determinism() -> Check {
    let start = Instant::now();
    let tmp = ok(tempfile::tempdir(), "tempdir")?;
    let mut manifests = Vec::new();
    for run in ["first", "second"] {
        let mut cfg = ok(PipelineConfig::load(&fixtures().join("mini100.pipeline.toml"), &[]), "config")?;
        cfg.out = tmp.path().join(run);
        ok(htx_pipeline::run(&cfg), "pipeline")?;
        manifests.push(ok(std::fs::read(BuildLayout::new(&cfg.out).manifest()), "manifest")?);
    }
    ensure(manifests[0] == manifests[1], || "manifests differ".into())?;
    let mut cfg = ok(PipelineConfig::load(&fixtures().join("mini100.pipeline.toml"), &[]), "config")?;
    cfg.out = tmp.path().join("first");
    let rerun = ok(htx_pipeline::run(&cfg), "rerun")?;
    ensure(rerun.executed.is_empty(), || format!("rerun executed {:?}", rerun.executed))?;
    let elapsed = start.elapsed();
    Ok(format!(
        "byte-identical manifests ({} bytes); rerun skipped all {} stages; {elapsed:.1?}",
        manifests[0].len(),
        rerun.skipped.len()
    ))
}

// 9

async fn fetch(snapshot: Arc<Snapshot>, uri: &str) -> Result<(u16, Value), String> {
    let resp = router(snapshot)
        .oneshot(Request::builder().uri(uri).body(Body::empty()).map_err(|e| e.to_string())?)
        .await
        .map_err(|e| e.to_string())?;
    let status = resp.status().as_u16();
    let bytes = resp.into_body().collect().await.map_err(|e| e.to_string())?.to_bytes();
    Ok((status, serde_json::from_slice(&bytes).map_err(|e| format!("{uri}: {e}"))?))
}

async fn http_contract_async() -> Check {
    let tmp = ok(tempfile::tempdir(), "tempdir")?;
    let mut cfg = ok(PipelineConfig::load(&fixtures().join("mini100.pipeline.toml"), &[]), "config")?;
    cfg.out = tmp.path().join("build");
    ok(htx_pipeline::run(&cfg), "pipeline")?;
    let snap = Arc::new(ok(Snapshot::open(&cfg.out, None, None), "snapshot")?);
    let first_obama = snap.detail("obama").map_err(|e| e.detail)?.sample_tweets[0].id;
    let cases = [
        ("hashtags", "/api/hashtags".to_string()),
        ("hashtags_limit1", "/api/hashtags?sort=freq&limit=1".into()),
        ("hashtags_by_name", "/api/hashtags?sort=name&limit=5&offset=5".into()),
        ("hashtags_limit_too_large", "/api/hashtags?limit=1001".into()),
        ("hashtag_paris", "/api/hashtags/paris".into()),
        ("hashtag_unknown", "/api/hashtags/nosuchtag".into()),
        (
            "tweet_classification_obama",
            format!("/api/hashtags/obama/tweets/{first_obama}/classification"),
        ),
        ("tweet_not_in_sample", "/api/hashtags/obama/tweets/1/classification".into()),
        ("graph", "/api/graph".into()),
        ("stats", "/api/stats".into()),
        ("stats_month", "/api/stats?bucket=month".into()),
    ];
    let golden_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../server/tests/golden");
    for (name, uri) in &cases {
        let (status, body) = fetch(snap.clone(), uri).await?;
        let want: Value = ok(
            serde_json::from_str(&ok(std::fs::read_to_string(golden_dir.join(format!("{name}.json"))), name)?),
            name,
        )?;
        ensure(want["status"] == status && want["body"] == body, || format!("{uri} differs from golden {name}"))?;
        let again = fetch(snap.clone(), uri).await?;
        ensure(again == (status, body), || format!("{uri} not repeatable"))?;
    }

    let (_, list) = fetch(snap.clone(), "/api/hashtags").await?;
    let mut vocab: Vec<(String, u64)> = snap.index.vocab().map(|(t, f)| (t.to_string(), f)).collect();
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let listed: Vec<(String, u64)> = list["items"]
        .as_array()
        .ok_or("items")?
        .iter()
        .map(|i| (i["tag"].as_str().unwrap_or("").to_string(), i["tweet_count"].as_u64().unwrap_or(0)))
        .collect();
    ensure(listed == vocab, || "hashtag list differs from vocab sort".into())?;
    let (_, paris) = fetch(snap.clone(), "/api/hashtags/paris").await?;
    let dict: Vec<(String, u32)> = paris["dictionary"]
        .as_array()
        .ok_or("dictionary")?
        .iter()
        .map(|e| (e["tag"].as_str().unwrap_or("").to_string(), e["count"].as_u64().unwrap_or(0) as u32))
        .collect();
    ensure(Some(dict) == ok(snap.store.dictionary("paris", 10), "dictionary")?, || "dictionary differs".into())?;
    let (_, detail) = fetch(snap.clone(), &format!("/api/hashtags/obama/tweets/{first_obama}/classification")).await?;
    for c in HashtagClass::ALL {
        let mut s = detail["bias"][c.name()].as_f64().ok_or("bias")?;
        for f in detail["active_features"].as_array().ok_or("features")? {
            s += f["weights"][c.name()].as_f64().ok_or("weight")?;
        }
        let want = detail["scores"][c.name()].as_f64().ok_or("score")?;
        ensure((s - want).abs() < 1e-12, || format!("{c}: contributions {s} vs score {want}"))?;
    }
    let (_, graph) = fetch(snap.clone(), "/api/graph").await?;
    let file: Value = ok(
        serde_json::from_str(&ok(std::fs::read_to_string(BuildLayout::new(&cfg.out).graph()), "graph")?),
        "graph json",
    )?;
    ensure(graph == file, || "graph differs from exported json".into())?;
    let (_, stats) = fetch(snap.clone(), "/api/stats").await?;
    ensure(stats["tweets"] == 100, || format!("tweets = {}", stats["tweets"]))?;
    ensure(stats["cooccurring_pairs"] == snap.store.pair_count(), || "pair count".into())?;
    Ok(format!("{} golden responses across 5 endpoint families; cross-checks hold", cases.len()))
}

fn http_contract() -> Check {
    let rt = ok(tokio::runtime::Runtime::new(), "runtime")?;
    rt.block_on(http_contract_async())
}

fn main() {
    let criteria: [(u8, &str, fn() -> Check); 9] = [
        (1, "tokenizer golden suite", tokenizer_golden),
        (2, "co-occurrence oracle equivalence", cooccurrence_oracle),
        (3, "similarity correctness", similarity_oracle),
        (4, "evaluation ordering", evaluation_ordering),
        (5, "maxent gradient and monotone L-BFGS", maxent_gradient),
        (6, "planted-class recovery", planted_recovery),
        (7, "partitioner quality", partitioner_quality),
        (8, "pipeline determinism", pipeline_determinism),
        (9, "HTTP contract", http_contract),
    ];
    let mut failed = 0;
    for (id, name, f) in criteria {
        let start = Instant::now();
        let result = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(r) => r,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS  criterion {id}: {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {id}: {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
