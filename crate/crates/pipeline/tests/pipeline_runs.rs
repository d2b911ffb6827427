use std::path::{Path, PathBuf};

use htx_pipeline::{run, BuildLayout, PipelineConfig, PipelineError};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn mini_config(out: &Path, overrides: &[&str]) -> PipelineConfig {
    let overrides: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    let mut cfg = PipelineConfig::load(&fixtures().join("mini100.pipeline.toml"), &overrides).unwrap();
    cfg.out = out.to_path_buf();
    cfg
}

#[test]
fn mini100_is_deterministic_and_idempotent() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let first = run(&mini_config(&a, &[])).unwrap();
    assert_eq!(
        first.executed,
        ["ingest", "cooc", "gazetteer", "tagger", "model", "cv", "graph", "eval"]
    );
    let seq = run(&mini_config(&b, &["parallel=false"])).unwrap();
    assert_eq!(seq.executed.len(), 8);
    let ma = std::fs::read(BuildLayout::new(&a).manifest()).unwrap();
    let mb = std::fs::read(BuildLayout::new(&b).manifest()).unwrap();
    assert_eq!(ma, mb);

    let again = run(&mini_config(&a, &[])).unwrap();
    assert!(again.executed.is_empty(), "{:?}", again.executed);
    assert_eq!(std::fs::read(BuildLayout::new(&a).manifest()).unwrap(), ma);

    let changed = run(&mini_config(&a, &["graph.k=3"])).unwrap();
    assert_eq!(changed.executed, ["graph"]);
}

#[test]
fn missing_corpus_fails_before_any_work() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let mut cfg = mini_config(&out, &[]);
    cfg.corpus.input = None;
    assert!(matches!(run(&cfg), Err(PipelineError::Config(_))));
    assert!(!out.exists());
}

#[test]
fn failing_stage_is_named_and_quarantined() {
    let tmp = tempfile::tempdir().unwrap();
    let gold = tmp.path().join("gold.tsv");
    std::fs::write(&gold, "paris\tGeolocation\nnotatag\tPerson\n").unwrap();
    let out = tmp.path().join("out");
    let mut cfg = mini_config(&out, &[]);
    cfg.classifier.gold = Some(gold);
    match run(&cfg) {
        Err(PipelineError::Stage { stage, quarantined, .. }) => {
            assert_eq!(stage, "model");
            assert_eq!(quarantined.as_deref(), Some(BuildLayout::new(&out).quarantine("model").as_path()));
            assert!(quarantined.unwrap().exists());
        }
        other => panic!("expected a stage failure, got {other:?}"),
    }
    assert!(!BuildLayout::new(&out).model().exists());
}
