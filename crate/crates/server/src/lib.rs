//! Read-only JSON API over a build directory: hashtag lists, per-hashtag
//! dictionaries and classifications, per-tweet attributions, the clustered
//! graph and corpus statistics.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use htx_core::classifier::{self, ClassDistribution, HashtagClass, MaxEntModel, SampleOptions, BIAS_FEATURE, N_CLASSES};
use htx_core::cooccur::{CooccurrenceStore, DEFAULT_DICTIONARY_SIZE};
use htx_core::corpus::{Bucket, CorpusIndex, Tweet};
use htx_core::features::{FeatureConfig, FeatureExtractor, Gazetteer, TrigramTagger};
use htx_core::hashgraph::HashtagGraph;
use htx_core::tokenizer::normalize_hashtag;
use htx_core::Execution;
use htx_pipeline::{BuildLayout, BuildManifest};
use serde::Serialize;
use thiserror::Error;
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

pub const API_VERSION: &str = "1";
pub const MAX_PAGE: usize = 1000;
pub const DEFAULT_PAGE: usize = 50;
pub const DEFAULT_CACHE_SIZE: usize = 256;

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("cannot load {what} from {path}: {reason}")]
    Load { what: &'static str, path: PathBuf, reason: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub sample_size: usize,
    pub seed: u64,
    pub features: FeatureConfig,
    /// Hashtag details kept in the memo cache.
    pub cache_size: usize,
    pub static_dir: Option<PathBuf>,
    pub exec: Execution,
}

impl Default for ServeConfig {
    fn default() -> Self {
        Self {
            sample_size: classifier::DEFAULT_SAMPLE_SIZE,
            seed: 42,
            features: FeatureConfig::default(),
            cache_size: DEFAULT_CACHE_SIZE,
            static_dir: None,
            exec: Execution::default(),
        }
    }
}

impl ServeConfig {
    /// Sampling and feature settings recorded by the build that produced
    /// the model.
    pub fn from_manifest(m: &BuildManifest) -> Self {
        Self {
            sample_size: m.sample_size,
            seed: m.seeds.classifier,
            features: m.features,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DictionaryEntry {
    pub tag: String,
    pub count: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub label: HashtagClass,
    pub distribution: ClassDistribution,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleTweet {
    pub id: u64,
    pub text: String,
    pub created_at: i64,
    /// Per-tweet distribution; absent without a model.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probs: Option<ClassDistribution>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HashtagDetail {
    pub tag: String,
    pub tweet_count: u64,
    pub dictionary: Vec<DictionaryEntry>,
    pub classification: Option<Classification>,
    pub sample_tweets: Vec<SampleTweet>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeatureContribution {
    pub name: String,
    pub weights: BTreeMap<&'static str, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TweetClassification {
    pub tag: String,
    pub tweet_id: u64,
    pub label: HashtagClass,
    pub probs: ClassDistribution,
    /// Pre-softmax score per class: the bias plus every contribution.
    pub scores: BTreeMap<&'static str, f64>,
    pub bias: Option<BTreeMap<&'static str, f64>>,
    pub active_features: Vec<FeatureContribution>,
    /// Active features the model has no weights for.
    pub unmodeled_features: Vec<String>,
}

fn per_class(v: [f64; N_CLASSES]) -> BTreeMap<&'static str, f64> {
    HashtagClass::ALL.iter().map(|c| (c.name(), v[c.index()])).collect()
}

#[derive(Default)]
struct Memo {
    map: HashMap<String, Arc<HashtagDetail>>,
    order: VecDeque<String>,
}

/// Every artifact the API reads. Immutable once built.
pub struct Snapshot {
    pub index: CorpusIndex,
    pub store: CooccurrenceStore,
    pub graph: HashtagGraph,
    pub model: Option<MaxEntModel>,
    pub gazetteer: Gazetteer,
    pub tagger: Option<TrigramTagger>,
    pub config: ServeConfig,
    graph_json: String,
    memo: Mutex<Memo>,
}

fn load_err(what: &'static str, path: &Path, e: impl std::fmt::Display) -> ServerError {
    ServerError::Load {
        what,
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

impl Snapshot {
    pub fn new(
        index: CorpusIndex,
        store: CooccurrenceStore,
        graph: HashtagGraph,
        model: Option<MaxEntModel>,
        gazetteer: Gazetteer,
        tagger: Option<TrigramTagger>,
        config: ServeConfig,
    ) -> Self {
        let graph_json = graph.to_json().expect("graph serializes");
        Self {
            index,
            store,
            graph,
            model,
            gazetteer,
            tagger,
            config,
            graph_json,
            memo: Mutex::new(Memo::default()),
        }
    }

    /// Opens a build directory. `model` overrides the build's own model;
    /// the graph, model, gazetteer and tagger are optional.
    pub fn open(dir: &Path, model: Option<&Path>, config: Option<ServeConfig>) -> Result<Self, ServerError> {
        let layout = BuildLayout::new(dir);
        let index = CorpusIndex::open(&layout.index()).map_err(|e| load_err("index", &layout.index(), e))?;
        let store = CooccurrenceStore::open(&layout.cooc()).map_err(|e| load_err("cooc store", &layout.cooc(), e))?;
        let graph = if layout.graph().exists() {
            let text = std::fs::read_to_string(layout.graph())?;
            HashtagGraph::from_json(&text).map_err(|e| load_err("graph", &layout.graph(), e))?
        } else {
            HashtagGraph::default()
        };
        let model_path = model.map(Path::to_path_buf).unwrap_or_else(|| layout.model());
        let model = if model.is_some() || model_path.exists() {
            Some(MaxEntModel::load(&model_path).map_err(|e| load_err("model", &model_path, e))?)
        } else {
            None
        };
        let gazetteer = if layout.gazetteer().exists() {
            Gazetteer::load(&layout.gazetteer()).map_err(|e| load_err("gazetteer", &layout.gazetteer(), e))?
        } else {
            Gazetteer::default()
        };
        let tagger = if layout.tagger().exists() {
            Some(TrigramTagger::load(&layout.tagger()).map_err(|e| load_err("tagger", &layout.tagger(), e))?)
        } else {
            None
        };
        let config = match config {
            Some(c) => c,
            None => match BuildManifest::load(&layout.manifest()) {
                Ok(m) => ServeConfig::from_manifest(&m),
                Err(_) => ServeConfig::default(),
            },
        };
        Ok(Self::new(index, store, graph, model, gazetteer, tagger, config))
    }

    fn extractor(&self) -> FeatureExtractor<'_> {
        FeatureExtractor::new(Some(&self.store), &self.gazetteer, self.tagger.as_ref(), self.config.features)
    }

    fn sample_options(&self) -> SampleOptions {
        SampleOptions {
            sample_size: self.config.sample_size,
            seed: self.config.seed,
            exec: self.config.exec,
        }
    }

    /// The seeded classification sample of a relevant hashtag.
    pub fn sample(&self, tag: &str) -> Result<Vec<Tweet>, ApiError> {
        classifier::classification_sample(&self.index, tag, self.sample_options()).map_err(ApiError::internal)
    }

    fn compute_detail(&self, tag: &str) -> Result<HashtagDetail, ApiError> {
        let tweet_count = self.index.frequency(tag).ok_or_else(|| ApiError::unknown_tag(tag))?;
        let dictionary = self
            .store
            .dictionary(tag, DEFAULT_DICTIONARY_SIZE)
            .map_err(ApiError::internal)?
            .unwrap_or_default()
            .into_iter()
            .map(|(tag, count)| DictionaryEntry { tag, count })
            .collect();
        let tweets = self.sample(tag)?;
        let mut probs: Vec<Option<ClassDistribution>> = vec![None; tweets.len()];
        let mut classification = None;
        if let Some(model) = &self.model {
            let fx = self.extractor();
            for (p, t) in probs.iter_mut().zip(&tweets) {
                let fv = fx.extract(tag, t).map_err(ApiError::internal)?;
                *p = Some(classifier::classify_instance(model, &fv));
            }
            if let Some(distribution) = ClassDistribution::mean(probs.iter().flatten()) {
                classification = Some(Classification {
                    label: distribution.argmax(),
                    distribution,
                });
            }
        }
        let sample_tweets = tweets
            .into_iter()
            .zip(probs)
            .map(|(t, probs)| SampleTweet {
                id: t.id,
                text: t.text,
                created_at: t.created_at,
                probs,
            })
            .collect();
        Ok(HashtagDetail {
            tag: tag.to_string(),
            tweet_count,
            dictionary,
            classification,
            sample_tweets,
        })
    }

    /// Memoized hashtag detail. Concurrent misses may compute twice; the
    /// results are identical.
    pub fn detail(&self, tag: &str) -> Result<Arc<HashtagDetail>, ApiError> {
        if let Some(d) = self.memo.lock().unwrap().map.get(tag) {
            return Ok(d.clone());
        }
        let d = Arc::new(self.compute_detail(tag)?);
        if self.config.cache_size > 0 {
            let mut memo = self.memo.lock().unwrap();
            if !memo.map.contains_key(tag) {
                while memo.order.len() >= self.config.cache_size {
                    if let Some(old) = memo.order.pop_front() {
                        memo.map.remove(&old);
                    }
                }
                memo.order.push_back(tag.to_string());
                memo.map.insert(tag.to_string(), d.clone());
            }
        }
        Ok(d)
    }

    pub fn cached_details(&self) -> usize {
        self.memo.lock().unwrap().map.len()
    }

    pub fn tweet_classification(&self, tag: &str, tweet_id: u64) -> Result<TweetClassification, ApiError> {
        if self.index.frequency(tag).is_none() {
            return Err(ApiError::unknown_tag(tag));
        }
        let Some(model) = &self.model else {
            return Err(ApiError::new(StatusCode::NOT_FOUND, "no_model", "no classification model is loaded"));
        };
        let tweet = self
            .sample(tag)?
            .into_iter()
            .find(|t| t.id == tweet_id)
            .ok_or_else(|| {
                ApiError::new(
                    StatusCode::NOT_FOUND,
                    "not_in_sample",
                    format!("tweet {tweet_id} is not in the classification sample of #{tag}"),
                )
            })?;
        let fv = self.extractor().extract(tag, &tweet).map_err(ApiError::internal)?;
        let encoded = model.encode(&fv.active);
        let scores = model.scores(&encoded);
        let probs = model.classify_active(&fv.active);
        let mut bias = None;
        let mut active_features = Vec::new();
        for a in model.explain(&fv.active) {
            if a.feature == BIAS_FEATURE {
                bias = Some(per_class(a.weights.probs));
            } else {
                active_features.push(FeatureContribution {
                    name: a.feature,
                    weights: per_class(a.weights.probs),
                });
            }
        }
        let unmodeled_features = fv
            .active
            .iter()
            .filter(|f| model.weight(HashtagClass::Category, f).is_none())
            .cloned()
            .collect();
        Ok(TweetClassification {
            tag: tag.to_string(),
            tweet_id,
            label: probs.argmax(),
            probs,
            scores: per_class(scores),
            bias,
            active_features,
            unmodeled_features,
        })
    }
}

/// JSON error body `{error, detail}` with its status code.
#[derive(Debug, Clone)]
pub struct ApiError {
    pub status: StatusCode,
    pub error: &'static str,
    pub detail: String,
}

impl ApiError {
    pub fn new(status: StatusCode, error: &'static str, detail: impl Into<String>) -> Self {
        Self {
            status,
            error,
            detail: detail.into(),
        }
    }

    fn bad_request(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", detail)
    }

    fn unknown_tag(tag: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_hashtag", format!("#{tag} is not a relevant hashtag"))
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        log::error!("request failed: {e}");
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        #[derive(Serialize)]
        struct Body<'a> {
            error: &'a str,
            detail: &'a str,
        }
        let body = Json(Body {
            error: self.error,
            detail: &self.detail,
        });
        (self.status, body).into_response()
    }
}

type Shared = Arc<Snapshot>;
type Params = Query<BTreeMap<String, String>>;

fn check_params(q: &BTreeMap<String, String>, allowed: &[&str]) -> Result<(), ApiError> {
    match q.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(ApiError::bad_request(format!("unknown query parameter {k:?}"))),
        None => Ok(()),
    }
}

fn parse_param<T: std::str::FromStr>(q: &BTreeMap<String, String>, key: &str, default: T) -> Result<T, ApiError> {
    match q.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| ApiError::bad_request(format!("{key}={v:?} is not a valid value"))),
    }
}

async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f).await.map_err(ApiError::internal)?
}

#[derive(Serialize)]
struct TagCount<'a> {
    tag: &'a str,
    tweet_count: u64,
}

async fn list_hashtags(State(s): State<Shared>, query: Result<Params, axum::extract::rejection::QueryRejection>) -> Result<Response, ApiError> {
    let Query(q) = query.map_err(|e| ApiError::bad_request(e.body_text()))?;
    check_params(&q, &["sort", "limit", "offset"])?;
    let sort = q.get("sort").map(String::as_str).unwrap_or("freq");
    let limit: usize = parse_param(&q, "limit", DEFAULT_PAGE)?;
    let offset: usize = parse_param(&q, "offset", 0)?;
    if limit == 0 || limit > MAX_PAGE {
        return Err(ApiError::bad_request(format!("limit must be between 1 and {MAX_PAGE}")));
    }
    let all: Vec<(&str, u64)> = match sort {
        "freq" => s.index.by_frequency(),
        "name" => s.index.vocab().collect(),
        other => return Err(ApiError::bad_request(format!("sort={other:?}; expected freq or name"))),
    };
    let items: Vec<TagCount<'_>> = all
        .iter()
        .skip(offset)
        .take(limit)
        .map(|&(tag, tweet_count)| TagCount { tag, tweet_count })
        .collect();
    Ok(Json(serde_json::json!({
        "total": all.len(),
        "offset": offset,
        "limit": limit,
        "sort": sort,
        "items": items,
    }))
    .into_response())
}

async fn hashtag(State(s): State<Shared>, UrlPath(tag): UrlPath<String>) -> Result<Response, ApiError> {
    let tag = normalize_hashtag(tag.trim_start_matches('#'));
    let d = blocking(move || s.detail(&tag)).await?;
    Ok(Json(d.as_ref().clone()).into_response())
}

async fn tweet_classification(
    State(s): State<Shared>,
    UrlPath((tag, id)): UrlPath<(String, String)>,
) -> Result<Response, ApiError> {
    let tag = normalize_hashtag(tag.trim_start_matches('#'));
    let id: u64 = id
        .parse()
        .map_err(|_| ApiError::bad_request(format!("tweet id {id:?} is not an integer")))?;
    let c = blocking(move || s.tweet_classification(&tag, id)).await?;
    Ok(Json(c).into_response())
}

async fn graph(State(s): State<Shared>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], s.graph_json.clone()).into_response()
}

async fn stats(State(s): State<Shared>, query: Result<Params, axum::extract::rejection::QueryRejection>) -> Result<Response, ApiError> {
    let Query(q) = query.map_err(|e| ApiError::bad_request(e.body_text()))?;
    check_params(&q, &["bucket"])?;
    let bucket: Bucket = match q.get("bucket") {
        None => Bucket::Day,
        Some(b) => b.parse().map_err(ApiError::bad_request)?,
    };
    let st = s.index.stats();
    let timeline: Vec<serde_json::Value> = s
        .index
        .timeline_histogram(bucket)
        .into_iter()
        .map(|(start, count)| serde_json::json!({ "start": start, "count": count }))
        .collect();
    Ok(Json(serde_json::json!({
        "tweets": st.total_tweets,
        "indexed_tweets": st.indexed_tweets,
        "distinct_hashtags": st.distinct_hashtags,
        "relevant_hashtags": st.relevant_hashtags,
        "cooccurring_pairs": s.store.pair_count(),
        "bucket": bucket,
        "timeline": timeline,
    }))
    .into_response())
}

async fn version() -> Response {
    Json(serde_json::json!({ "api": API_VERSION, "tool": htx_pipeline::TOOL_VERSION })).into_response()
}

async fn api_not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

/// The API router. Non-API paths fall through to the static UI directory
/// when one is configured.
pub fn router(snapshot: Arc<Snapshot>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET, Method::OPTIONS])
        .allow_headers(Any);
    let static_dir = snapshot.config.static_dir.clone();
    let api = Router::new()
        .route("/api", get(version))
        .route("/api/hashtags", get(list_hashtags))
        .route("/api/hashtags/{tag}", get(hashtag))
        .route("/api/hashtags/{tag}/tweets/{id}/classification", get(tweet_classification))
        .route("/api/graph", get(graph))
        .route("/api/stats", get(stats))
        .route("/api/{*rest}", get(api_not_found))
        .with_state(snapshot);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(api_not_found),
    };
    app.layer(cors)
}

/// Serves `snapshot` on `addr` until the process is stopped.
pub async fn serve(snapshot: Arc<Snapshot>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(snapshot)).await
}
