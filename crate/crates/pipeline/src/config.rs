//! Pipeline configuration: one TOML document whose keys mirror the CLI flags.

use std::path::{Path, PathBuf};

use htx_core::classifier::{DEFAULT_FOLDS, DEFAULT_SAMPLE_SIZE};
use htx_core::cooccur::DEFAULT_DICTIONARY_SIZE;
use htx_core::corpus::DEFAULT_MIN_SUPPORT;
use htx_core::features::{COOC_FEATURES, DEFAULT_WINDOW};
use htx_core::hashgraph::{DEFAULT_BALANCE, DEFAULT_EDGES, DEFAULT_NODES, DEFAULT_PARTS};
use htx_core::Execution;
use serde::{Deserialize, Serialize};

use crate::PipelineError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Build directory. Relative paths resolve against the config file.
    pub out: PathBuf,
    pub parallel: bool,
    pub corpus: CorpusConfig,
    pub cooc: CoocConfig,
    pub gazetteer: GazetteerConfig,
    pub tagger: TaggerConfig,
    pub features: FeaturesConfig,
    pub classifier: ClassifierConfig,
    pub graph: GraphConfig,
    pub eval: EvalConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub input: Option<PathBuf>,
    pub min_support: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoocConfig {
    pub spill_threshold: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GazetteerConfig {
    pub geonames: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaggerConfig {
    pub corpus: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesConfig {
    pub window: usize,
    pub bag_window: bool,
    pub cooc_features: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub gold: Option<PathBuf>,
    pub sample_size: usize,
    pub seed: u64,
    /// Cross-validation folds; 0 skips the evaluation stage.
    pub folds: usize,
    pub sigma2: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub bias: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub nodes: usize,
    pub edges: usize,
    pub k: usize,
    pub seed: u64,
    pub balance: f64,
    pub trials: usize,
    pub max_passes: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// JSON taxonomy file or WordNet database directory.
    pub taxonomy: Option<PathBuf>,
    pub seed: u64,
    pub dictionary_size: usize,
    pub random_partners: usize,
    pub lemma_sample: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            out: PathBuf::from("build"),
            parallel: true,
            corpus: CorpusConfig::default(),
            cooc: CoocConfig::default(),
            gazetteer: GazetteerConfig::default(),
            tagger: TaggerConfig::default(),
            features: FeaturesConfig::default(),
            classifier: ClassifierConfig::default(),
            graph: GraphConfig::default(),
            eval: EvalConfig::default(),
        }
    }
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            input: None,
            min_support: DEFAULT_MIN_SUPPORT,
        }
    }
}

impl Default for CoocConfig {
    fn default() -> Self {
        Self {
            spill_threshold: htx_core::cooccur::BuildOptions::default().spill_threshold,
        }
    }
}

impl Default for FeaturesConfig {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            bag_window: false,
            cooc_features: COOC_FEATURES,
        }
    }
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            gold: None,
            sample_size: DEFAULT_SAMPLE_SIZE,
            seed: 42,
            folds: DEFAULT_FOLDS,
            sigma2: 1.0,
            tol: 1e-6,
            max_iter: 200,
            bias: true,
        }
    }
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
            edges: DEFAULT_EDGES,
            k: DEFAULT_PARTS,
            seed: 42,
            balance: DEFAULT_BALANCE,
            trials: 8,
            max_passes: 16,
            iterations: 200,
        }
    }
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            taxonomy: None,
            seed: 42,
            dictionary_size: DEFAULT_DICTIONARY_SIZE,
            random_partners: 10,
            lemma_sample: 10_000,
        }
    }
}

/// Parses a `--set` value as a TOML literal, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

/// Applies `section.key=value` to a parsed document.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<(), PipelineError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| PipelineError::Config(vec![format!("override {assignment:?} is not key=value")]))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(PipelineError::Config(vec![format!("bad override key {key:?}")]));
    }
    let mut table = doc;
    for p in &parts[..parts.len() - 1] {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| PipelineError::Config(vec![format!("override {key:?}: {p} is not a section")]))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

fn resolve(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

impl PipelineConfig {
    pub fn exec(&self) -> Execution {
        if self.parallel {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }

    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self, PipelineError> {
        let mut doc: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| PipelineError::Config(vec![e.to_string()]))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        toml::Value::Table(doc)
            .try_into()
            .map_err(|e: toml::de::Error| PipelineError::Config(vec![e.to_string()]))
    }

    /// Reads a config file and resolves its relative paths against the
    /// file's directory.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(vec![format!("{}: {e}", path.display())]))?;
        let mut cfg = Self::from_toml(&text, overrides)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.resolve_paths(&base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        if self.out.is_relative() {
            self.out = base.join(&self.out);
        }
        resolve(base, &mut self.corpus.input);
        resolve(base, &mut self.gazetteer.geonames);
        resolve(base, &mut self.tagger.corpus);
        resolve(base, &mut self.classifier.gold);
        resolve(base, &mut self.eval.taxonomy);
    }

    /// Every problem with the config, so they can be reported together
    /// before any stage runs.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let mut errs = Vec::new();
        match &self.corpus.input {
            None => errs.push("corpus.input is required".to_string()),
            Some(p) if !p.is_file() => errs.push(format!("corpus.input {} does not exist", p.display())),
            _ => {}
        }
        let check = |errs: &mut Vec<String>, key: &str, p: &Option<PathBuf>, dir: bool| {
            if let Some(p) = p {
                let ok = if dir { p.is_dir() } else { p.exists() };
                if !ok {
                    errs.push(format!("{key} {} does not exist", p.display()));
                }
            }
        };
        check(&mut errs, "gazetteer.geonames", &self.gazetteer.geonames, true);
        check(&mut errs, "tagger.corpus", &self.tagger.corpus, false);
        check(&mut errs, "classifier.gold", &self.classifier.gold, false);
        check(&mut errs, "eval.taxonomy", &self.eval.taxonomy, false);
        if self.corpus.min_support == 0 {
            errs.push("corpus.min_support must be at least 1".into());
        }
        if self.cooc.spill_threshold == 0 {
            errs.push("cooc.spill_threshold must be positive".into());
        }
        if self.features.window == 0 || self.features.window % 2 == 0 {
            errs.push("features.window must be odd".into());
        }
        if self.classifier.sample_size == 0 {
            errs.push("classifier.sample_size must be positive".into());
        }
        if self.classifier.folds == 1 {
            errs.push("classifier.folds must be 0 or at least 2".into());
        }
        if !(self.classifier.sigma2 > 0.0) {
            errs.push("classifier.sigma2 must be positive".into());
        }
        if !(self.classifier.tol > 0.0) {
            errs.push("classifier.tol must be positive".into());
        }
        if self.graph.k == 0 {
            errs.push("graph.k must be at least 1".into());
        }
        if !(self.graph.balance >= 1.0) {
            errs.push("graph.balance must be at least 1".into());
        }
        if self.graph.trials == 0 {
            errs.push("graph.trials must be at least 1".into());
        }
        if self.eval.dictionary_size == 0 {
            errs.push("eval.dictionary_size must be positive".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(PipelineError::Config(errs))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = PipelineConfig::from_toml("[graph]\nk = 4\n", &["graph.seed=7".into(), "eval.taxonomy=wn".into()])
            .unwrap();
        assert_eq!(cfg.graph.k, 4);
        assert_eq!(cfg.graph.seed, 7);
        assert_eq!(cfg.graph.nodes, DEFAULT_NODES);
        assert_eq!(cfg.eval.taxonomy, Some(PathBuf::from("wn")));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(PipelineConfig::from_toml("[graph]\nkk = 4\n", &[]).is_err());
        assert!(PipelineConfig::from_toml("", &["graph".into()]).is_err());
    }

    #[test]
    fn missing_corpus_is_a_validation_error() {
        let cfg = PipelineConfig::default();
        let PipelineError::Config(errs) = cfg.validate().unwrap_err() else {
            panic!("expected config error");
        };
        assert!(errs.iter().any(|e| e.contains("corpus.input")));
    }
}
