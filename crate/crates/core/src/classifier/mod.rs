//! Maximum-entropy hashtag classification.
//!
//! Each (hashtag, tweet) occurrence is soft-classified by a multiclass
//! log-linear model over binary features; a hashtag's label is the mean of
//! the distributions of a seeded sample of its tweets.

pub mod lbfgs;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{self, BufRead};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::corpus::{CorpusError, CorpusIndex, Tweet};
use crate::features::{FeatureError, FeatureExtractor, FeatureVector};
use crate::par::{self, Execution};
use crate::seeding::{item_rng, named_rng};
use crate::tokenizer::normalize_hashtag;

pub use lbfgs::{LbfgsOptions, Termination};

pub const N_CLASSES: usize = 5;
pub const DEFAULT_SAMPLE_SIZE: usize = 100;
pub const DEFAULT_FOLDS: usize = 5;
pub const BIAS_FEATURE: &str = "<bias>";

const STREAM_TRAIN: u64 = 0x7472_6169_6e;
const STREAM_EVAL: u64 = 0x6576_616c;
const STREAM_FOLDS: u64 = 0x666f_6c64;
const GRADIENT_CHUNK: usize = 256;

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("no training instances")]
    NoInstances,
    #[error("objective became non-finite at iteration {iteration}")]
    Diverged { iteration: usize },
    #[error("hashtag #{0} has no tweets")]
    NoTweets(String),
    #[error("{gold} gold hashtags cannot fill {folds} folds")]
    FoldTooSmall { gold: usize, folds: usize },
    #[error("gold hashtag #{0} is not in the index")]
    UnknownHashtag(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T, E = ClassifierError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HashtagClass {
    Category,
    Event,
    Geolocation,
    Organization,
    Person,
}

impl HashtagClass {
    pub const ALL: [HashtagClass; N_CLASSES] = [
        Self::Category,
        Self::Event,
        Self::Geolocation,
        Self::Organization,
        Self::Person,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Category => "Category",
            Self::Event => "Event",
            Self::Geolocation => "Geolocation",
            Self::Organization => "Organization",
            Self::Person => "Person",
        }
    }
}

impl fmt::Display for HashtagClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HashtagClass {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "category" => Ok(Self::Category),
            "event" => Ok(Self::Event),
            "geolocation" | "location" | "geo" => Ok(Self::Geolocation),
            "organization" | "organisation" | "org" => Ok(Self::Organization),
            "person" => Ok(Self::Person),
            other => Err(format!("unknown class {other:?}")),
        }
    }
}

/// Probability per class, in [`HashtagClass::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassDistribution {
    pub probs: [f64; N_CLASSES],
}

impl ClassDistribution {
    pub fn uniform() -> Self {
        Self {
            probs: [1.0 / N_CLASSES as f64; N_CLASSES],
        }
    }

    pub fn get(&self, c: HashtagClass) -> f64 {
        self.probs[c.index()]
    }

    /// Most probable class; ties go to the earlier class.
    pub fn argmax(&self) -> HashtagClass {
        let mut best = 0;
        for i in 1..N_CLASSES {
            if self.probs[i] > self.probs[best] {
                best = i;
            }
        }
        HashtagClass::ALL[best]
    }

    /// Component-wise mean.
    pub fn mean<'a, I: IntoIterator<Item = &'a ClassDistribution>>(items: I) -> Option<Self> {
        let mut sum = [0.0; N_CLASSES];
        let mut n = 0usize;
        for d in items {
            for (s, p) in sum.iter_mut().zip(d.probs) {
                *s += p;
            }
            n += 1;
        }
        (n > 0).then(|| Self {
            probs: sum.map(|s| s / n as f64),
        })
    }
}

impl Serialize for ClassDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(N_CLASSES))?;
        for c in HashtagClass::ALL {
            m.serialize_entry(c.name(), &self.probs[c.index()])?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for ClassDistribution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = BTreeMap::<String, f64>::deserialize(d)?;
        let mut probs = [0.0; N_CLASSES];
        for (k, v) in m {
            let c: HashtagClass = k.parse().map_err(serde::de::Error::custom)?;
            probs[c.index()] = v;
        }
        Ok(Self { probs })
    }
}

fn softmax(scores: [f64; N_CLASSES]) -> [f64; N_CLASSES] {
    let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e = scores.map(|s| (s - m).exp());
    let z: f64 = e.iter().sum();
    e.map(|v| v / z)
}

/// Training instance over feature indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub features: Vec<u32>,
    pub label: usize,
}

/// Penalized log-likelihood problem. Weights are laid out class-major:
/// `w[c * n_features + j]`.
#[derive(Debug, Clone)]
pub struct Problem {
    pub n_features: usize,
    pub instances: Vec<Instance>,
    pub sigma2: f64,
}

impl Problem {
    pub fn dim(&self) -> usize {
        N_CLASSES * self.n_features
    }

    /// Log-likelihood minus the Gaussian penalty, and its gradient.
    /// Instance chunks are summed in a fixed order.
    pub fn objective(&self, w: &[f64], exec: Execution) -> (f64, Vec<f64>) {
        let nf = self.n_features;
        let partials = par::map_chunks(exec, &self.instances, GRADIENT_CHUNK, |chunk| {
            let mut ll = 0.0;
            let mut grad: HashMap<usize, f64> = HashMap::new();
            for inst in chunk {
                let mut scores = [0.0; N_CLASSES];
                for (c, s) in scores.iter_mut().enumerate() {
                    *s = inst.features.iter().map(|&j| w[c * nf + j as usize]).sum();
                }
                let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lse = m + scores.iter().map(|s| (s - m).exp()).sum::<f64>().ln();
                ll += scores[inst.label] - lse;
                for (c, &score) in scores.iter().enumerate() {
                    let p = (score - lse).exp();
                    let coef = if c == inst.label { 1.0 - p } else { -p };
                    for &j in &inst.features {
                        *grad.entry(c * nf + j as usize).or_default() += coef;
                    }
                }
            }
            let mut grad: Vec<(usize, f64)> = grad.into_iter().collect();
            grad.sort_unstable_by_key(|e| e.0);
            (ll, grad)
        });
        let mut value = 0.0;
        let mut grad = vec![0.0; w.len()];
        for (ll, g) in partials {
            value += ll;
            for (i, v) in g {
                grad[i] += v;
            }
        }
        for (gi, wi) in grad.iter_mut().zip(w) {
            value -= wi * wi / (2.0 * self.sigma2);
            *gi -= wi / self.sigma2;
        }
        (value, grad)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrainOptions {
    pub sigma2: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub bias: bool,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            sigma2: 1.0,
            tol: 1e-6,
            max_iter: 200,
            bias: true,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaxEntModel {
    pub features: Vec<String>,
    /// class-major, `weights[c * features.len() + j]`
    pub weights: Vec<f64>,
    pub bias: bool,
    pub sigma2: f64,
    pub iterations: usize,
    /// Final penalized log-likelihood.
    pub objective: f64,
    /// Penalized log-likelihood after each accepted step.
    pub trace: Vec<f64>,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

/// Per-feature weights of one active feature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Attribution {
    pub feature: String,
    pub weights: ClassDistribution,
}

impl MaxEntModel {
    /// Zero-weight model over `features`.
    pub fn zeros(features: Vec<String>, bias: bool) -> Self {
        let mut m = Self {
            weights: vec![0.0; N_CLASSES * features.len()],
            features,
            bias,
            sigma2: 1.0,
            iterations: 0,
            objective: 0.0,
            trace: Vec::new(),
            index: HashMap::new(),
        };
        m.reindex();
        m
    }

    fn reindex(&mut self) {
        self.index = self
            .features
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i as u32))
            .collect();
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn weight(&self, class: HashtagClass, feature: &str) -> Option<f64> {
        let j = *self.index.get(feature)? as usize;
        Some(self.weights[class.index() * self.features.len() + j])
    }

    /// Indices of the known features among `active`, plus the bias.
    pub fn encode<'s, I: IntoIterator<Item = &'s String>>(&self, active: I) -> Vec<u32> {
        let mut out: Vec<u32> = active.into_iter().filter_map(|f| self.index.get(f).copied()).collect();
        if self.bias {
            if let Some(&b) = self.index.get(BIAS_FEATURE) {
                out.push(b);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn scores(&self, encoded: &[u32]) -> [f64; N_CLASSES] {
        let nf = self.features.len();
        let mut s = [0.0; N_CLASSES];
        for (c, v) in s.iter_mut().enumerate() {
            *v = encoded.iter().map(|&j| self.weights[c * nf + j as usize]).sum();
        }
        s
    }

    pub fn classify_active(&self, active: &BTreeSet<String>) -> ClassDistribution {
        ClassDistribution {
            probs: softmax(self.scores(&self.encode(active))),
        }
    }

    /// Weights of every known active feature (and the bias), sorted by the
    /// absolute weight on the predicted class.
    pub fn explain(&self, active: &BTreeSet<String>) -> Vec<Attribution> {
        let encoded = self.encode(active);
        let predicted = self.classify_active(active).argmax().index();
        let nf = self.features.len();
        let mut out: Vec<Attribution> = encoded
            .iter()
            .map(|&j| {
                let mut probs = [0.0; N_CLASSES];
                for (c, p) in probs.iter_mut().enumerate() {
                    *p = self.weights[c * nf + j as usize];
                }
                Attribution {
                    feature: self.features[j as usize].clone(),
                    weights: ClassDistribution { probs },
                }
            })
            .collect();
        out.sort_by(|a, b| {
            b.weights.probs[predicted]
                .abs()
                .total_cmp(&a.weights.probs[predicted].abs())
                .then_with(|| a.feature.cmp(&b.feature))
        });
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let mut m: MaxEntModel = serde_json::from_str(s)?;
        if m.weights.len() != N_CLASSES * m.features.len() {
            return Err(ClassifierError::InvalidModel("weight matrix size mismatch".into()));
        }
        if m.weights.iter().any(|w| !w.is_finite()) {
            return Err(ClassifierError::InvalidModel("non-finite weight".into()));
        }
        m.reindex();
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub fn classify_instance(model: &MaxEntModel, fv: &FeatureVector) -> ClassDistribution {
    model.classify_active(&fv.active)
}

/// Fits a model to labelled feature sets. The vocabulary is the sorted union
/// of the training features.
pub fn train(instances: &[(&BTreeSet<String>, HashtagClass)], opts: TrainOptions) -> Result<MaxEntModel> {
    if instances.is_empty() {
        return Err(ClassifierError::NoInstances);
    }
    let mut vocab: BTreeSet<&str> = instances.iter().flat_map(|(f, _)| f.iter().map(String::as_str)).collect();
    if opts.bias {
        vocab.insert(BIAS_FEATURE);
    }
    let mut model = MaxEntModel::zeros(vocab.into_iter().map(str::to_string).collect(), opts.bias);
    model.sigma2 = opts.sigma2;
    let problem = Problem {
        n_features: model.n_features(),
        instances: instances
            .iter()
            .map(|(f, c)| Instance {
                features: model.encode(f.iter()),
                label: c.index(),
            })
            .collect(),
        sigma2: opts.sigma2,
    };
    let lopts = LbfgsOptions {
        max_iter: opts.max_iter,
        tol: opts.tol,
        ..Default::default()
    };
    let result = lbfgs::minimize(
        |w, g| {
            let (v, grad) = problem.objective(w, opts.exec);
            for (gi, x) in g.iter_mut().zip(grad) {
                *gi = -x;
            }
            -v
        },
        vec![0.0; problem.dim()],
        lopts,
    )
    .map_err(|e| ClassifierError::Diverged { iteration: e.iteration })?;
    if result.x.iter().any(|w| !w.is_finite()) {
        return Err(ClassifierError::Diverged {
            iteration: result.iterations,
        });
    }
    model.weights = result.x;
    model.iterations = result.iterations;
    model.objective = -result.value;
    model.trace = result.trace.iter().map(|v| -v).collect();
    Ok(model)
}

/// Hand-labelled hashtags, read from `hashtag<TAB>class` lines. Blank lines
/// and lines starting with `//` are skipped; a leading `#` on the hashtag is
/// optional.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLabels {
    pub labels: BTreeMap<String, HashtagClass>,
}

impl GoldLabels {
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut labels = BTreeMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with("//") {
                continue;
            }
            let Some((tag, class)) = t.split_once('\t') else {
                return Err(ClassifierError::Parse {
                    line: i + 1,
                    reason: "expected hashtag<TAB>class".into(),
                });
            };
            let tag = normalize_hashtag(tag.trim().trim_start_matches('#'));
            if tag.is_empty() {
                continue;
            }
            let class = class.parse().map_err(|reason| ClassifierError::Parse { line: i + 1, reason })?;
            labels.insert(tag, class);
        }
        Ok(Self { labels })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn validate(&self, index: &CorpusIndex) -> Result<()> {
        match self.labels.keys().find(|h| !index.is_relevant(h)) {
            Some(h) => Err(ClassifierError::UnknownHashtag(h.clone())),
            None => Ok(()),
        }
    }

    pub fn class_counts(&self) -> [u64; N_CLASSES] {
        let mut c = [0; N_CLASSES];
        for class in self.labels.values() {
            c[class.index()] += 1;
        }
        c
    }
}

/// Up to `size` tweets of `hashtag`, drawn without replacement from a stream
/// keyed by `(seed, stream, hashtag)`, in id order.
pub fn sample_tweets(index: &CorpusIndex, hashtag: &str, size: usize, seed: u64, stream: u64) -> Result<Vec<Tweet>> {
    let mut ids = index.tweet_ids_for(hashtag)?;
    if ids.len() > size {
        let mut rng = named_rng(seed, stream, hashtag);
        let (chosen, _) = ids.partial_shuffle(&mut rng, size);
        let mut chosen = chosen.to_vec();
        chosen.sort_unstable();
        ids = chosen;
    }
    let mut out = Vec::with_capacity(ids.len());
    for id in ids {
        if let Some(t) = index.tweet(id)? {
            out.push(t);
        }
    }
    Ok(out)
}

fn featurize(extractor: &FeatureExtractor<'_>, hashtag: &str, tweets: &[Tweet], exec: Execution) -> Result<Vec<FeatureVector>> {
    par::map(exec, tweets, |t| extractor.extract(hashtag, t))
        .into_iter()
        .map(|r| r.map_err(ClassifierError::from))
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct SampleOptions {
    pub sample_size: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            sample_size: DEFAULT_SAMPLE_SIZE,
            seed: 42,
            exec: Execution::default(),
        }
    }
}

/// Hashtag-level result: the mean of per-tweet distributions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HashtagClassification {
    pub hashtag: String,
    pub label: HashtagClass,
    pub distribution: ClassDistribution,
    pub tweets: usize,
}

/// The tweets a hashtag-level classification is computed from.
pub fn classification_sample(index: &CorpusIndex, hashtag: &str, opts: SampleOptions) -> Result<Vec<Tweet>> {
    sample_tweets(index, hashtag, opts.sample_size, opts.seed, STREAM_EVAL)
}

pub fn classify_hashtag(
    model: &MaxEntModel,
    extractor: &FeatureExtractor<'_>,
    index: &CorpusIndex,
    hashtag: &str,
    opts: SampleOptions,
) -> Result<HashtagClassification> {
    let h = normalize_hashtag(hashtag.trim_start_matches('#'));
    let tweets = classification_sample(index, &h, opts)?;
    if tweets.is_empty() {
        return Err(ClassifierError::NoTweets(h));
    }
    let dists: Vec<ClassDistribution> = featurize(extractor, &h, &tweets, opts.exec)?
        .iter()
        .map(|fv| classify_instance(model, fv))
        .collect();
    let distribution = ClassDistribution::mean(&dists).expect("non-empty sample");
    Ok(HashtagClassification {
        hashtag: h,
        label: distribution.argmax(),
        distribution,
        tweets: tweets.len(),
    })
}

/// Feature vectors of the sampled training tweets of every gold hashtag.
pub fn training_instances(
    gold: &GoldLabels,
    extractor: &FeatureExtractor<'_>,
    index: &CorpusIndex,
    opts: SampleOptions,
) -> Result<Vec<(FeatureVector, HashtagClass)>> {
    let mut out = Vec::new();
    for (h, &class) in &gold.labels {
        let tweets = sample_tweets(index, h, opts.sample_size, opts.seed, STREAM_TRAIN)?;
        out.extend(featurize(extractor, h, &tweets, opts.exec)?.into_iter().map(|fv| (fv, class)));
    }
    Ok(out)
}

pub fn train_on_gold(
    gold: &GoldLabels,
    extractor: &FeatureExtractor<'_>,
    index: &CorpusIndex,
    sample: SampleOptions,
    train_opts: TrainOptions,
) -> Result<MaxEntModel> {
    let instances = training_instances(gold, extractor, index, sample)?;
    let refs: Vec<(&BTreeSet<String>, HashtagClass)> = instances.iter().map(|(fv, c)| (&fv.active, *c)).collect();
    train(&refs, train_opts)
}

#[derive(Debug, Clone, Copy)]
pub struct CvOptions {
    pub folds: usize,
    pub sample: SampleOptions,
    pub train: TrainOptions,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            folds: DEFAULT_FOLDS,
            sample: SampleOptions::default(),
            train: TrainOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: HashtagClass,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Set when the metric had a zero denominator and was reported as 0.
    pub precision_undefined: bool,
    pub recall_undefined: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Prediction {
    pub hashtag: String,
    pub fold: usize,
    pub gold: HashtagClass,
    pub predicted: HashtagClass,
    pub distribution: ClassDistribution,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub test_hashtags: Vec<String>,
    pub gold_counts: [u64; N_CLASSES],
    pub predicted_counts: [u64; N_CLASSES],
    pub train_instances: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfusionReport {
    pub classes: Vec<HashtagClass>,
    /// `matrix[predicted][gold]`
    pub matrix: [[u64; N_CLASSES]; N_CLASSES],
    pub metrics: Vec<ClassMetrics>,
    pub macro_f1: f64,
    pub folds: Vec<FoldReport>,
    pub predictions: Vec<Prediction>,
}

impl ConfusionReport {
    pub fn from_matrix(matrix: [[u64; N_CLASSES]; N_CLASSES]) -> Self {
        let metrics: Vec<ClassMetrics> = HashtagClass::ALL
            .iter()
            .map(|&class| {
                let c = class.index();
                let tp = matrix[c][c] as f64;
                let predicted: u64 = matrix[c].iter().sum();
                let actual: u64 = matrix.iter().map(|row| row[c]).sum();
                let precision = if predicted > 0 { tp / predicted as f64 } else { 0.0 };
                let recall = if actual > 0 { tp / actual as f64 } else { 0.0 };
                let f1 = if precision + recall > 0.0 {
                    2.0 * precision * recall / (precision + recall)
                } else {
                    0.0
                };
                ClassMetrics {
                    class,
                    precision,
                    recall,
                    f1,
                    precision_undefined: predicted == 0,
                    recall_undefined: actual == 0,
                }
            })
            .collect();
        let macro_f1 = metrics.iter().map(|m| m.f1).sum::<f64>() / N_CLASSES as f64;
        Self {
            classes: HashtagClass::ALL.to_vec(),
            matrix,
            metrics,
            macro_f1,
            folds: Vec::new(),
            predictions: Vec::new(),
        }
    }

    pub fn row_sums(&self) -> [u64; N_CLASSES] {
        self.matrix.map(|row| row.iter().sum())
    }

    pub fn column_sums(&self) -> [u64; N_CLASSES] {
        let mut out = [0; N_CLASSES];
        for row in &self.matrix {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }
}

/// Seeded fold of every gold hashtag: a shuffled order dealt round-robin.
pub fn assign_folds(gold: &GoldLabels, folds: usize, seed: u64) -> Vec<Vec<String>> {
    let mut tags: Vec<String> = gold.labels.keys().cloned().collect();
    tags.shuffle(&mut item_rng(seed, STREAM_FOLDS, folds as u64));
    let mut out = vec![Vec::new(); folds];
    for (i, t) in tags.into_iter().enumerate() {
        out[i % folds].push(t);
    }
    for f in &mut out {
        f.sort();
    }
    out
}

/// K-fold cross-validation at the hashtag level.
pub fn cross_validate(
    gold: &GoldLabels,
    extractor: &FeatureExtractor<'_>,
    index: &CorpusIndex,
    opts: CvOptions,
) -> Result<ConfusionReport> {
    if opts.folds < 2 || gold.len() < opts.folds {
        return Err(ClassifierError::FoldTooSmall {
            gold: gold.len(),
            folds: opts.folds,
        });
    }
    gold.validate(index)?;
    let assignment = assign_folds(gold, opts.folds, opts.sample.seed);

    // each hashtag's training features are shared by the folds that train on it
    let all_train = training_instances(gold, extractor, index, opts.sample)?;

    let fold_results = par::map_range(opts.sample.exec, opts.folds, |fold| -> Result<_> {
        let test: BTreeSet<&str> = assignment[fold].iter().map(String::as_str).collect();
        let refs: Vec<(&BTreeSet<String>, HashtagClass)> = all_train
            .iter()
            .filter(|(fv, _)| !test.contains(fv.hashtag.as_str()))
            .map(|(fv, c)| (&fv.active, *c))
            .collect();
        let model = train(&refs, opts.train)?;
        let mut preds = Vec::new();
        for h in &assignment[fold] {
            let r = classify_hashtag(&model, extractor, index, h, opts.sample)?;
            preds.push(Prediction {
                hashtag: h.clone(),
                fold,
                gold: gold.labels[h],
                predicted: r.label,
                distribution: r.distribution,
            });
        }
        Ok((refs.len(), model.iterations, preds))
    });

    let mut matrix = [[0u64; N_CLASSES]; N_CLASSES];
    let mut folds = Vec::new();
    let mut predictions = Vec::new();
    for (fold, result) in fold_results.into_iter().enumerate() {
        let (train_instances, iterations, preds) = result?;
        let mut gold_counts = [0; N_CLASSES];
        let mut predicted_counts = [0; N_CLASSES];
        for p in &preds {
            matrix[p.predicted.index()][p.gold.index()] += 1;
            gold_counts[p.gold.index()] += 1;
            predicted_counts[p.predicted.index()] += 1;
        }
        folds.push(FoldReport {
            fold,
            test_hashtags: assignment[fold].clone(),
            gold_counts,
            predicted_counts,
            train_instances,
            iterations,
        });
        predictions.extend(preds);
    }
    let mut report = ConfusionReport::from_matrix(matrix);
    report.folds = folds;
    report.predictions = predictions;
    Ok(report)
}
