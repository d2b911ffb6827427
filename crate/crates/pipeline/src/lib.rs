//! Staged build of every htx artifact into one build directory.
//!
//! Each stage has a content hash over its parameters, its external inputs
//! and the hashes of the stages it reads from. A stage whose hash and
//! outputs match the previous build manifest is skipped. Stages write into
//! a staging directory first; a failed stage's partial outputs are moved to
//! `quarantine/<stage>` and the run aborts.

pub mod config;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use htx_core::classifier::{self, CvOptions, GoldLabels, MaxEntModel, SampleOptions, TrainOptions};
use htx_core::cooccur::{self, CooccurrenceStore};
use htx_core::corpus::{CorpusIndex, IngestOptions};
use htx_core::features::{FeatureConfig, FeatureExtractor, Gazetteer, TrigramTagger};
use htx_core::hashgraph::{self, GraphPartitionOptions, LayoutOptions};
use htx_core::taxonomy::{self, Taxonomy};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::PipelineConfig;

pub const TOOL_VERSION: &str = concat!("htx ", env!("CARGO_PKG_VERSION"));
pub const MANIFEST_FORMAT: &str = "htx-build";
pub const MANIFEST_VERSION: u32 = 1;

type BoxError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid config: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        quarantined: Option<PathBuf>,
        #[source]
        source: BoxError,
    },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// File names inside a build directory.
#[derive(Debug, Clone)]
pub struct BuildLayout {
    pub root: PathBuf,
}

impl BuildLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }
    pub fn index(&self) -> PathBuf {
        self.root.join("index")
    }
    pub fn cooc(&self) -> PathBuf {
        self.root.join("cooc")
    }
    pub fn gazetteer(&self) -> PathBuf {
        self.root.join("gazetteer.json")
    }
    pub fn tagger(&self) -> PathBuf {
        self.root.join("tagger.json")
    }
    pub fn model(&self) -> PathBuf {
        self.root.join("model.json")
    }
    pub fn cv_report(&self) -> PathBuf {
        self.root.join("cv.json")
    }
    pub fn graph(&self) -> PathBuf {
        self.root.join("graph.json")
    }
    pub fn eval_report(&self) -> PathBuf {
        self.root.join("eval.json")
    }
    pub fn manifest(&self) -> PathBuf {
        self.root.join("build-manifest.json")
    }
    pub fn staging(&self, stage: &str) -> PathBuf {
        self.root.join(".staging").join(stage)
    }
    pub fn quarantine(&self, stage: &str) -> PathBuf {
        self.root.join("quarantine").join(stage)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub hash: String,
    pub params: serde_json::Value,
    /// Content hashes of external inputs, keyed by config role.
    pub inputs: BTreeMap<String, String>,
    pub upstream: Vec<String>,
    pub outputs: Vec<OutputRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    pub classifier: u64,
    pub graph: u64,
    pub eval: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildManifest {
    pub format: String,
    pub version: u32,
    pub tool: String,
    pub seeds: Seeds,
    pub features: FeatureConfig,
    pub sample_size: usize,
    pub stages: Vec<StageRecord>,
}

impl BuildManifest {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub executed: Vec<String>,
    pub skipped: Vec<String>,
    pub manifest: BuildManifest,
}

fn hex_digest(h: Sha256) -> String {
    hex::encode(h.finalize())
}

fn hash_file_into(h: &mut Sha256, path: &Path) -> io::Result<()> {
    let mut f = fs::File::open(path)?;
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            return Ok(());
        }
        h.update(&buf[..n]);
    }
}

/// SHA-256 over a file, or over the sorted relative names and contents of
/// every file below a directory.
pub fn hash_path(path: &Path) -> io::Result<String> {
    let mut h = Sha256::new();
    if path.is_dir() {
        let mut files = Vec::new();
        for entry in walkdir::WalkDir::new(path).sort_by_file_name() {
            let entry = entry.map_err(io::Error::other)?;
            if entry.file_type().is_file() {
                files.push(entry.into_path());
            }
        }
        for f in files {
            let rel = f.strip_prefix(path).unwrap_or(&f).to_string_lossy().replace('\\', "/");
            h.update((rel.len() as u64).to_le_bytes());
            h.update(rel.as_bytes());
            h.update(fs::metadata(&f)?.len().to_le_bytes());
            hash_file_into(&mut h, &f)?;
        }
    } else {
        hash_file_into(&mut h, path)?;
    }
    Ok(hex_digest(h))
}

fn remove_path(p: &Path) -> io::Result<()> {
    if p.is_dir() {
        fs::remove_dir_all(p)
    } else if p.exists() {
        fs::remove_file(p)
    } else {
        Ok(())
    }
}

type Action<'a> = Box<dyn FnOnce(&Path) -> Result<(), BoxError> + 'a>;

struct Stage<'a> {
    name: &'static str,
    params: serde_json::Value,
    inputs: Vec<(&'static str, PathBuf)>,
    upstream: Vec<&'static str>,
    outputs: Vec<&'static str>,
    action: Action<'a>,
}

fn stage_hash(stage: &Stage<'_>, inputs: &BTreeMap<String, String>, upstream: &[(String, String)]) -> String {
    let mut h = Sha256::new();
    h.update(TOOL_VERSION.as_bytes());
    h.update([0]);
    h.update(stage.name.as_bytes());
    h.update([0]);
    h.update(stage.params.to_string().as_bytes());
    for (k, v) in inputs {
        h.update([0]);
        h.update(k.as_bytes());
        h.update(v.as_bytes());
    }
    for (k, v) in upstream {
        h.update([1]);
        h.update(k.as_bytes());
        h.update(v.as_bytes());
    }
    hex_digest(h)
}

fn outputs_match(layout: &BuildLayout, rec: &StageRecord) -> bool {
    rec.outputs.iter().all(|o| {
        let p = layout.root.join(&o.path);
        p.exists() && hash_path(&p).map(|h| h == o.sha256).unwrap_or(false)
    })
}

fn feature_config(cfg: &PipelineConfig) -> FeatureConfig {
    FeatureConfig {
        window: cfg.features.window,
        bag_window: cfg.features.bag_window,
        cooc_features: cfg.features.cooc_features,
    }
}

fn sample_options(cfg: &PipelineConfig) -> SampleOptions {
    SampleOptions {
        sample_size: cfg.classifier.sample_size,
        seed: cfg.classifier.seed,
        exec: cfg.exec(),
    }
}

fn train_options(cfg: &PipelineConfig) -> TrainOptions {
    TrainOptions {
        sigma2: cfg.classifier.sigma2,
        tol: cfg.classifier.tol,
        max_iter: cfg.classifier.max_iter,
        bias: cfg.classifier.bias,
        exec: cfg.exec(),
    }
}

fn load_optional_artifacts(layout: &BuildLayout) -> Result<(Gazetteer, Option<TrigramTagger>), BoxError> {
    let gaz = if layout.gazetteer().exists() {
        Gazetteer::load(&layout.gazetteer())?
    } else {
        Gazetteer::default()
    };
    let tagger = if layout.tagger().exists() {
        Some(TrigramTagger::load(&layout.tagger())?)
    } else {
        None
    };
    Ok((gaz, tagger))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), BoxError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn plan<'a>(cfg: &'a PipelineConfig, layout: &'a BuildLayout) -> Vec<Stage<'a>> {
    let exec = cfg.exec();
    let corpus = cfg.corpus.input.clone().unwrap_or_default();
    let mut stages = vec![
        Stage {
            name: "ingest",
            params: serde_json::json!({ "min_support": cfg.corpus.min_support }),
            inputs: vec![("corpus", corpus.clone())],
            upstream: vec![],
            outputs: vec!["index"],
            action: Box::new(move |dir| {
                let opts = IngestOptions {
                    min_support: cfg.corpus.min_support,
                    exec,
                };
                CorpusIndex::build(&corpus, &dir.join("index"), opts)?;
                Ok(())
            }),
        },
        Stage {
            name: "cooc",
            params: serde_json::json!({}),
            inputs: vec![],
            upstream: vec!["ingest"],
            outputs: vec!["cooc"],
            action: Box::new(move |dir| {
                let index = CorpusIndex::open(&layout.index())?;
                let opts = cooccur::BuildOptions {
                    spill_threshold: cfg.cooc.spill_threshold,
                    exec,
                };
                CooccurrenceStore::build(&index, &dir.join("cooc"), opts)?;
                Ok(())
            }),
        },
    ];
    if let Some(geo) = cfg.gazetteer.geonames.clone() {
        stages.push(Stage {
            name: "gazetteer",
            params: serde_json::json!({}),
            inputs: vec![("geonames", geo.clone())],
            upstream: vec![],
            outputs: vec!["gazetteer.json"],
            action: Box::new(move |dir| {
                Gazetteer::from_geonames(&geo)?.save(&dir.join("gazetteer.json"))?;
                Ok(())
            }),
        });
    }
    if let Some(tagged) = cfg.tagger.corpus.clone() {
        stages.push(Stage {
            name: "tagger",
            params: serde_json::json!({}),
            inputs: vec![("tagged_corpus", tagged.clone())],
            upstream: vec![],
            outputs: vec!["tagger.json"],
            action: Box::new(move |dir| {
                TrigramTagger::train_file(&tagged)?.save(&dir.join("tagger.json"))?;
                Ok(())
            }),
        });
    }
    let mut feature_upstream = vec!["ingest", "cooc"];
    if cfg.gazetteer.geonames.is_some() {
        feature_upstream.push("gazetteer");
    }
    if cfg.tagger.corpus.is_some() {
        feature_upstream.push("tagger");
    }
    if let Some(gold_path) = cfg.classifier.gold.clone() {
        let c = &cfg.classifier;
        let params = serde_json::json!({
            "features": feature_config(cfg),
            "sample_size": c.sample_size,
            "seed": c.seed,
            "sigma2": c.sigma2,
            "tol": c.tol,
            "max_iter": c.max_iter,
            "bias": c.bias,
        });
        let gold_for_model = gold_path.clone();
        stages.push(Stage {
            name: "model",
            params: params.clone(),
            inputs: vec![("gold", gold_path.clone())],
            upstream: feature_upstream.clone(),
            outputs: vec!["model.json"],
            action: Box::new(move |dir| {
                let index = CorpusIndex::open(&layout.index())?;
                let store = CooccurrenceStore::open(&layout.cooc())?;
                let (gaz, tagger) = load_optional_artifacts(layout)?;
                let gold = GoldLabels::load(&gold_for_model)?;
                gold.validate(&index)?;
                let fx = FeatureExtractor::new(Some(&store), &gaz, tagger.as_ref(), feature_config(cfg));
                let model: MaxEntModel =
                    classifier::train_on_gold(&gold, &fx, &index, sample_options(cfg), train_options(cfg))?;
                model.save(&dir.join("model.json"))?;
                Ok(())
            }),
        });
        if c.folds >= 2 {
            let mut params = params;
            params["folds"] = c.folds.into();
            stages.push(Stage {
                name: "cv",
                params,
                inputs: vec![("gold", gold_path.clone())],
                upstream: feature_upstream.clone(),
                outputs: vec!["cv.json"],
                action: Box::new(move |dir| {
                    let index = CorpusIndex::open(&layout.index())?;
                    let store = CooccurrenceStore::open(&layout.cooc())?;
                    let (gaz, tagger) = load_optional_artifacts(layout)?;
                    let gold = GoldLabels::load(&gold_path)?;
                    gold.validate(&index)?;
                    let fx = FeatureExtractor::new(Some(&store), &gaz, tagger.as_ref(), feature_config(cfg));
                    let report = classifier::cross_validate(
                        &gold,
                        &fx,
                        &index,
                        CvOptions {
                            folds: cfg.classifier.folds,
                            sample: sample_options(cfg),
                            train: train_options(cfg),
                        },
                    )?;
                    write_json(&dir.join("cv.json"), &report)
                }),
            });
        }
    }
    let g = &cfg.graph;
    stages.push(Stage {
        name: "graph",
        params: serde_json::to_value(g).expect("graph config serializes"),
        inputs: vec![],
        upstream: vec!["ingest", "cooc"],
        outputs: vec!["graph.json"],
        action: Box::new(move |dir| {
            let index = CorpusIndex::open(&layout.index())?;
            let store = CooccurrenceStore::open(&layout.cooc())?;
            let mut graph = hashgraph::build_graph(&store, &index, g.nodes, g.edges)?;
            if !graph.nodes.is_empty() {
                graph.partition(GraphPartitionOptions {
                    k: g.k,
                    seed: g.seed,
                    balance: g.balance,
                    trials: g.trials,
                    max_passes: g.max_passes,
                    exec,
                })?;
                graph.layout(LayoutOptions {
                    iterations: g.iterations,
                    seed: g.seed,
                    exec,
                    ..LayoutOptions::default()
                })?;
            }
            let mut text = graph.to_json()?;
            text.push('\n');
            fs::write(dir.join("graph.json"), text)?;
            Ok(())
        }),
    });
    if let Some(tax_path) = cfg.eval.taxonomy.clone() {
        let e = &cfg.eval;
        stages.push(Stage {
            name: "eval",
            params: serde_json::json!({
                "seed": e.seed,
                "dictionary_size": e.dictionary_size,
                "random_partners": e.random_partners,
                "lemma_sample": e.lemma_sample,
            }),
            inputs: vec![("taxonomy", tax_path.clone())],
            upstream: vec!["cooc"],
            outputs: vec!["eval.json"],
            action: Box::new(move |dir| {
                let store = CooccurrenceStore::open(&layout.cooc())?;
                let tax = Taxonomy::load(&tax_path)?;
                let report = taxonomy::evaluate_dictionary(
                    &store,
                    &tax,
                    taxonomy::EvalOptions {
                        seed: e.seed,
                        dictionary_size: e.dictionary_size,
                        random_partners: e.random_partners,
                        lemma_sample: e.lemma_sample,
                        exec,
                    },
                )?;
                write_json(&dir.join("eval.json"), &report)
            }),
        });
    }
    stages
}

fn quarantine(layout: &BuildLayout, stage: &str) -> Option<PathBuf> {
    let staging = layout.staging(stage);
    if !staging.exists() {
        return None;
    }
    let target = layout.quarantine(stage);
    let moved = (|| -> io::Result<()> {
        remove_path(&target)?;
        fs::create_dir_all(target.parent().expect("quarantine has a parent"))?;
        fs::rename(&staging, &target)
    })();
    match moved {
        Ok(()) => Some(target),
        Err(e) => {
            log::error!("could not quarantine {}: {e}", staging.display());
            None
        }
    }
}

/// Validates `cfg`, then runs every stage whose inputs changed since the
/// last manifest written to `cfg.out`.
pub fn run(cfg: &PipelineConfig) -> Result<RunReport, PipelineError> {
    cfg.validate()?;
    let layout = BuildLayout::new(&cfg.out);
    fs::create_dir_all(&layout.root)?;
    let previous = BuildManifest::load(&layout.manifest()).ok();
    let mut records: Vec<StageRecord> = Vec::new();
    let mut executed = Vec::new();
    let mut skipped = Vec::new();

    for stage in plan(cfg, &layout) {
        let mut inputs = BTreeMap::new();
        for (role, path) in &stage.inputs {
            let h = hash_path(path).map_err(|e| PipelineError::Stage {
                stage: stage.name,
                quarantined: None,
                source: format!("cannot read {role} input {}: {e}", path.display()).into(),
            })?;
            inputs.insert(role.to_string(), h);
        }
        let upstream: Vec<(String, String)> = stage
            .upstream
            .iter()
            .map(|u| {
                let rec = records.iter().find(|r| r.name == *u).expect("upstream stage planned earlier");
                (u.to_string(), rec.hash.clone())
            })
            .collect();
        let hash = stage_hash(&stage, &inputs, &upstream);

        if let Some(prev) = previous.as_ref().and_then(|m| m.stage(stage.name)) {
            if prev.hash == hash && outputs_match(&layout, prev) {
                log::info!("stage {}: up to date", stage.name);
                skipped.push(stage.name.to_string());
                records.push(prev.clone());
                continue;
            }
        }

        log::info!("stage {}: running", stage.name);
        let staging = layout.staging(stage.name);
        remove_path(&staging)?;
        fs::create_dir_all(&staging)?;
        if let Err(source) = (stage.action)(&staging) {
            let quarantined = quarantine(&layout, stage.name);
            return Err(PipelineError::Stage {
                stage: stage.name,
                quarantined,
                source,
            });
        }
        let mut outputs = Vec::new();
        for out in &stage.outputs {
            let from = staging.join(out);
            let to = layout.root.join(out);
            if !from.exists() {
                let quarantined = quarantine(&layout, stage.name);
                return Err(PipelineError::Stage {
                    stage: stage.name,
                    quarantined,
                    source: format!("stage did not produce {out}").into(),
                });
            }
            remove_path(&to)?;
            fs::rename(&from, &to)?;
            outputs.push(OutputRecord {
                path: out.to_string(),
                sha256: hash_path(&to)?,
            });
        }
        remove_path(&staging)?;
        executed.push(stage.name.to_string());
        records.push(StageRecord {
            name: stage.name.to_string(),
            hash,
            params: stage.params,
            inputs,
            upstream: stage.upstream.iter().map(|s| s.to_string()).collect(),
            outputs,
        });
    }
    let staging_root = layout.root.join(".staging");
    if staging_root.exists() {
        fs::remove_dir(&staging_root).ok();
    }

    let manifest = BuildManifest {
        format: MANIFEST_FORMAT.into(),
        version: MANIFEST_VERSION,
        tool: TOOL_VERSION.into(),
        seeds: Seeds {
            classifier: cfg.classifier.seed,
            graph: cfg.graph.seed,
            eval: cfg.eval.seed,
        },
        features: feature_config(cfg),
        sample_size: cfg.classifier.sample_size,
        stages: records,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(layout.manifest(), text)?;
    Ok(RunReport {
        executed,
        skipped,
        manifest,
    })
}
