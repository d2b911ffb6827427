mod failure;

use std::collections::BTreeSet;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use htx_core::classifier::{self, CvOptions, GoldLabels, MaxEntModel, SampleOptions, TrainOptions};
use htx_core::cooccur::{self, CooccurrenceStore};
use htx_core::corpus::{CorpusIndex, IngestOptions};
use htx_core::features::{FeatureConfig, FeatureExtractor, Gazetteer, TrigramTagger};
use htx_core::hashgraph::{self, ExportFormat, GraphPartitionOptions, LayoutOptions};
use htx_core::taxonomy::{self, EvalOptions, Taxonomy};
use htx_core::tokenizer::normalize_hashtag;
use htx_core::Execution;
use htx_pipeline::PipelineConfig;
use htx_server::{ServeConfig, Snapshot};
use serde::Serialize;

use failure::{Context, Failure, Outcome};

#[derive(Parser)]
#[command(name = "htx", version, about = "Hashtag co-occurrence toolkit")]
struct Cli {
    /// Run every stage on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the inverted index of a JSON-lines tweet corpus.
    Ingest(IngestArgs),
    /// Co-occurrence store.
    #[command(subcommand)]
    Cooc(CoocCommand),
    /// Compare dictionaries with a taxonomy.
    EvalDict(EvalDictArgs),
    /// Partitioned hashtag graph.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Place-name lists from Geonames dumps.
    #[command(subcommand)]
    Gazetteer(GazetteerCommand),
    /// Part-of-speech tagger.
    #[command(subcommand)]
    Tagger(TaggerCommand),
    /// Inspect classifier features.
    #[command(subcommand)]
    Features(FeaturesCommand),
    /// Hashtag classifier.
    #[command(subcommand)]
    Clf(ClfCommand),
    /// Serve the HTTP API over a build directory.
    Serve(ServeArgs),
    /// Run every stage from a TOML config.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = htx_core::corpus::DEFAULT_MIN_SUPPORT)]
    min_support: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum CoocCommand {
    /// Count hashtag pairs into a store.
    Build {
        #[arg(long)]
        index: PathBuf,
        /// Defaults to `cooc` next to the index.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = cooccur::BuildOptions::default().spill_threshold)]
        spill_threshold: usize,
        #[arg(long)]
        json: bool,
    },
    /// Print the co-occurrence dictionary of a hashtag.
    Top {
        #[arg(long)]
        tag: String,
        #[arg(short, default_value_t = cooccur::DEFAULT_DICTIONARY_SIZE)]
        k: usize,
        #[arg(long, default_value = "build/cooc")]
        store: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct EvalDictArgs {
    #[arg(long)]
    index: PathBuf,
    /// Defaults to `cooc` next to the index.
    #[arg(long)]
    store: Option<PathBuf>,
    /// WordNet database directory or JSON taxonomy file.
    #[arg(long)]
    wordnet: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = cooccur::DEFAULT_DICTIONARY_SIZE)]
    dictionary_size: usize,
    #[arg(long, default_value_t = 10)]
    random_partners: usize,
    #[arg(long, default_value_t = 10_000)]
    lemma_sample: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Build, partition and lay out the hashtag graph.
    Build {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long, default_value_t = hashgraph::DEFAULT_NODES)]
        nodes: usize,
        #[arg(long, default_value_t = hashgraph::DEFAULT_EDGES)]
        edges: usize,
        #[arg(long, default_value_t = hashgraph::DEFAULT_PARTS)]
        k: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = hashgraph::DEFAULT_BALANCE)]
        balance: f64,
        #[arg(long, default_value_t = 200)]
        iterations: usize,
        /// Output file; the extension picks json, dot or svg.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum GazetteerCommand {
    /// Build the gazetteer from a GeoNames dump directory.
    Build {
        #[arg(long)]
        geonames: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum TaggerCommand {
    /// Train the part-of-speech tagger on `word/TAG` sentences.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Artifacts feature extraction reads. Paths default to the layout of a
/// build directory around `--index`.
#[derive(Args, Clone)]
struct ArtifactArgs {
    #[arg(long, default_value = "build/index")]
    index: PathBuf,
    #[arg(long)]
    store: Option<PathBuf>,
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    #[arg(long)]
    tagger: Option<PathBuf>,
    #[arg(long, default_value_t = htx_core::features::DEFAULT_WINDOW)]
    window: usize,
    #[arg(long)]
    bag_window: bool,
    #[arg(long, default_value_t = htx_core::features::COOC_FEATURES)]
    cooc_features: usize,
}

#[derive(Subcommand)]
enum FeaturesCommand {
    /// Print the feature vectors of a hashtag's sampled tweets.
    Dump {
        #[arg(long)]
        tag: String,
        #[arg(long, default_value_t = 10)]
        limit: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        artifacts: ArtifactArgs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Clone)]
struct SampleArgs {
    #[arg(long, default_value_t = classifier::DEFAULT_SAMPLE_SIZE)]
    sample_size: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Clone)]
struct TrainArgs {
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long)]
    no_bias: bool,
}

#[derive(Subcommand)]
enum ClfCommand {
    /// Train on gold-labelled hashtags.
    Train {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        artifacts: ArtifactArgs,
        #[command(flatten)]
        sample: SampleArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        json: bool,
    },
    /// Cross-validate on gold-labelled hashtags.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, default_value_t = classifier::DEFAULT_FOLDS)]
        folds: usize,
        #[command(flatten)]
        artifacts: ArtifactArgs,
        #[command(flatten)]
        sample: SampleArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        json: bool,
    },
    /// Classify one hashtag.
    Tag {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        hashtag: String,
        #[command(flatten)]
        artifacts: ArtifactArgs,
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "build")]
    data: PathBuf,
    /// Overrides the model of the build directory.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    #[arg(long, default_value_t = htx_server::DEFAULT_CACHE_SIZE)]
    cache_size: usize,
    /// Directory with the built web UI, served at `/`.
    #[arg(long)]
    static_dir: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the build directory from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `section.key=value` override; repeatable.
    #[arg(long = "set")]
    set: Vec<String>,
    #[arg(long)]
    json: bool,
}

fn sibling(index: &Path, name: &str) -> PathBuf {
    index.parent().unwrap_or(Path::new(".")).join(name)
}

fn print_json<T: Serialize>(value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).internal("serializing output")?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").internal("writing output")
}

struct Loaded {
    index: CorpusIndex,
    store: CooccurrenceStore,
    gazetteer: Gazetteer,
    tagger: Option<TrigramTagger>,
    config: FeatureConfig,
}

impl Loaded {
    fn open(a: &ArtifactArgs) -> Outcome<Self> {
        let index = CorpusIndex::open(&a.index).user("opening index")?;
        let store_dir = a.store.clone().unwrap_or_else(|| sibling(&a.index, "cooc"));
        let store = CooccurrenceStore::open(&store_dir).user("opening co-occurrence store")?;
        let gaz_path = a.gazetteer.clone().or_else(|| {
            let p = sibling(&a.index, "gazetteer.json");
            p.exists().then_some(p)
        });
        let gazetteer = match gaz_path {
            Some(p) => Gazetteer::load(&p).user("loading gazetteer")?,
            None => Gazetteer::default(),
        };
        let tagger_path = a.tagger.clone().or_else(|| {
            let p = sibling(&a.index, "tagger.json");
            p.exists().then_some(p)
        });
        let tagger = match tagger_path {
            Some(p) => Some(TrigramTagger::load(&p).user("loading tagger")?),
            None => None,
        };
        if a.window == 0 || a.window % 2 == 0 {
            return Err(Failure::user("--window must be odd"));
        }
        Ok(Self {
            index,
            store,
            gazetteer,
            tagger,
            config: FeatureConfig {
                window: a.window,
                bag_window: a.bag_window,
                cooc_features: a.cooc_features,
            },
        })
    }

    fn extractor(&self) -> FeatureExtractor<'_> {
        FeatureExtractor::new(Some(&self.store), &self.gazetteer, self.tagger.as_ref(), self.config)
    }
}

fn sample_options(s: &SampleArgs, exec: Execution) -> SampleOptions {
    SampleOptions {
        sample_size: s.sample_size,
        seed: s.seed,
        exec,
    }
}

fn train_options(t: &TrainArgs, exec: Execution) -> TrainOptions {
    TrainOptions {
        sigma2: t.sigma2,
        tol: t.tol,
        max_iter: t.max_iter,
        bias: !t.no_bias,
        exec,
    }
}

fn load_gold(path: &Path, index: &CorpusIndex) -> Outcome<GoldLabels> {
    let gold = GoldLabels::load(path).map_err(|e| failure::classifier("reading gold labels", e))?;
    gold.validate(index).map_err(|e| failure::classifier("gold labels", e))?;
    Ok(gold)
}

fn ingest(a: IngestArgs, exec: Execution) -> Outcome {
    let opts = IngestOptions {
        min_support: a.min_support,
        exec,
    };
    let index = CorpusIndex::build(&a.input, &a.out, opts).user("ingest")?;
    let st = index.stats();
    if a.json {
        return print_json(&st);
    }
    println!(
        "{} tweets read, {} indexed, {} of {} hashtags relevant, {} malformed lines",
        st.total_tweets, st.indexed_tweets, st.relevant_hashtags, st.distinct_hashtags, st.malformed_lines
    );
    Ok(())
}

fn cooc(c: CoocCommand, exec: Execution) -> Outcome {
    match c {
        CoocCommand::Build {
            index,
            out,
            spill_threshold,
            json,
        } => {
            if spill_threshold == 0 {
                return Err(Failure::user("--spill-threshold must be positive"));
            }
            let idx = CorpusIndex::open(&index).user("opening index")?;
            let out = out.unwrap_or_else(|| sibling(&index, "cooc"));
            let store = CooccurrenceStore::build(&idx, &out, cooccur::BuildOptions { spill_threshold, exec })
                .internal("building co-occurrence store")?;
            if json {
                return print_json(store.manifest());
            }
            println!("{} pairs over {} hashtags in {}", store.pair_count(), store.tags().len(), out.display());
            Ok(())
        }
        CoocCommand::Top { tag, k, store, json } => {
            let store = CooccurrenceStore::open(&store).user("opening co-occurrence store")?;
            let h = normalize_hashtag(tag.trim_start_matches('#'));
            let dict = store
                .dictionary(&h, k)
                .internal("reading dictionary")?
                .ok_or_else(|| Failure::user(format!("#{h} is not a relevant hashtag")))?;
            if json {
                #[derive(Serialize)]
                struct Entry<'a> {
                    tag: &'a str,
                    count: u32,
                }
                let entries: Vec<Entry<'_>> = dict.iter().map(|(t, c)| Entry { tag: t, count: *c }).collect();
                return print_json(&serde_json::json!({ "tag": h, "dictionary": entries }));
            }
            for (t, c) in dict {
                println!("{c}\t#{t}");
            }
            Ok(())
        }
    }
}

fn eval_dict(a: EvalDictArgs, exec: Execution) -> Outcome {
    let store_dir = a.store.clone().unwrap_or_else(|| sibling(&a.index, "cooc"));
    CorpusIndex::open(&a.index).user("opening index")?;
    let store = CooccurrenceStore::open(&store_dir).user("opening co-occurrence store")?;
    let tax = Taxonomy::load(&a.wordnet).map_err(|e| failure::taxonomy("loading taxonomy", e))?;
    let report = taxonomy::evaluate_dictionary(
        &store,
        &tax,
        EvalOptions {
            seed: a.seed,
            dictionary_size: a.dictionary_size,
            random_partners: a.random_partners,
            lemma_sample: a.lemma_sample,
            exec,
        },
    )
    .map_err(|e| failure::taxonomy("evaluating dictionaries", e))?;
    if a.json {
        return print_json(&report);
    }
    println!("{} hashtags in taxonomy, {} lemmas", report.hashtags_in_taxonomy, report.lemmas_in_taxonomy);
    println!("{:<22}{:>8}{:>12}{:>12}", "", "pairs", "path", "wu-palmer");
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
    for (name, m) in [
        ("co-occurrence", report.cooccurrence),
        ("twitter baseline", report.twitter_baseline),
        ("taxonomy baseline", report.taxonomy_baseline),
    ] {
        println!("{name:<22}{:>8}{:>12}{:>12}", m.pairs, fmt(m.path), fmt(m.wu_palmer));
    }
    Ok(())
}

fn graph(c: GraphCommand, exec: Execution) -> Outcome {
    let GraphCommand::Build {
        index,
        store,
        nodes,
        edges,
        k,
        seed,
        balance,
        iterations,
        out,
        json,
    } = c;
    let format: ExportFormat = out
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .parse()
        .map_err(|e: String| Failure::user(format!("--out {}: {e}", out.display())))?;
    let idx = CorpusIndex::open(&index).user("opening index")?;
    let store_dir = store.unwrap_or_else(|| sibling(&index, "cooc"));
    let store = CooccurrenceStore::open(&store_dir).user("opening co-occurrence store")?;
    let mut g = hashgraph::build_graph(&store, &idx, nodes, edges).map_err(|e| failure::graph("building graph", e))?;
    let report = if g.nodes.is_empty() {
        None
    } else {
        let r = g
            .partition(GraphPartitionOptions {
                k,
                seed,
                balance,
                exec,
                ..GraphPartitionOptions::default()
            })
            .map_err(|e| failure::graph("partitioning", e))?;
        g.layout(LayoutOptions {
            iterations,
            seed,
            exec,
            ..LayoutOptions::default()
        })
        .map_err(|e| failure::graph("layout", e))?;
        Some(r)
    };
    let bytes = g.export(format).map_err(|e| failure::graph("exporting", e))?;
    std::fs::write(&out, bytes).user("writing graph")?;
    if json {
        return print_json(&serde_json::json!({
            "nodes": g.nodes.len(),
            "edges": g.edges.len(),
            "partition": report,
        }));
    }
    match report {
        Some(r) => println!(
            "{} nodes, {} edges, k = {}, edge cut {}, largest part {}",
            g.nodes.len(),
            g.edges.len(),
            r.k,
            r.cut,
            r.max_part_size
        ),
        None => println!("empty graph"),
    }
    Ok(())
}

fn gazetteer(c: GazetteerCommand) -> Outcome {
    let GazetteerCommand::Build { geonames, out, json } = c;
    let gaz = Gazetteer::from_geonames(&geonames).user("reading GeoNames dump")?;
    gaz.save(&out).user("writing gazetteer")?;
    if json {
        return print_json(&gaz.stats);
    }
    println!(
        "{} cities, {} regions, {} countries",
        gaz.stats.cities, gaz.stats.regions, gaz.stats.countries
    );
    Ok(())
}

fn tagger(c: TaggerCommand) -> Outcome {
    let TaggerCommand::Train { corpus, out } = c;
    let t = TrigramTagger::train_file(&corpus).user("training tagger")?;
    t.save(&out).user("writing tagger")?;
    let [l1, l2, l3] = t.lambdas();
    println!("{} tags; lambdas {l1:.3} {l2:.3} {l3:.3}", t.tags().len());
    Ok(())
}

fn features(c: FeaturesCommand, exec: Execution) -> Outcome {
    let FeaturesCommand::Dump {
        tag,
        limit,
        seed,
        artifacts,
        json,
    } = c;
    let loaded = Loaded::open(&artifacts)?;
    let h = normalize_hashtag(tag.trim_start_matches('#'));
    if !loaded.index.is_relevant(&h) {
        return Err(Failure::user(format!("#{h} is not a relevant hashtag")));
    }
    let opts = SampleOptions {
        sample_size: limit,
        seed,
        exec,
    };
    let tweets = classifier::classification_sample(&loaded.index, &h, opts)
        .map_err(|e| failure::classifier("sampling tweets", e))?;
    let fx = loaded.extractor();
    let mut vectors = Vec::with_capacity(tweets.len());
    for t in &tweets {
        vectors.push(fx.extract(&h, t).internal("extracting features")?);
    }
    if json {
        return print_json(&vectors);
    }
    for (t, fv) in tweets.iter().zip(&vectors) {
        println!("{}\t{}", t.id, t.text);
        let names: Vec<&str> = fv.active.iter().map(String::as_str).collect();
        println!("\t{}", names.join(" "));
    }
    Ok(())
}

fn clf(c: ClfCommand, exec: Execution) -> Outcome {
    match c {
        ClfCommand::Train {
            gold,
            out,
            artifacts,
            sample,
            train,
            json,
        } => {
            let loaded = Loaded::open(&artifacts)?;
            let gold = load_gold(&gold, &loaded.index)?;
            let model = classifier::train_on_gold(
                &gold,
                &loaded.extractor(),
                &loaded.index,
                sample_options(&sample, exec),
                train_options(&train, exec),
            )
            .map_err(|e| failure::classifier("training", e))?;
            model.save(&out).user("writing model")?;
            if json {
                return print_json(&serde_json::json!({
                    "features": model.n_features(),
                    "iterations": model.iterations,
                    "objective": model.objective,
                }));
            }
            println!(
                "{} features, {} iterations, penalized log-likelihood {:.4}",
                model.n_features(),
                model.iterations,
                model.objective
            );
            Ok(())
        }
        ClfCommand::Eval {
            gold,
            folds,
            artifacts,
            sample,
            train,
            json,
        } => {
            if folds < 2 {
                return Err(Failure::user("--folds must be at least 2"));
            }
            let loaded = Loaded::open(&artifacts)?;
            let gold = load_gold(&gold, &loaded.index)?;
            let report = classifier::cross_validate(
                &gold,
                &loaded.extractor(),
                &loaded.index,
                CvOptions {
                    folds,
                    sample: sample_options(&sample, exec),
                    train: train_options(&train, exec),
                },
            )
            .map_err(|e| failure::classifier("cross-validation", e))?;
            if json {
                return print_json(&report);
            }
            let short: Vec<&str> = report.classes.iter().map(|c| &c.name()[..3]).collect();
            println!("predicted \\ gold  {}", short.join("  "));
            for (c, row) in report.classes.iter().zip(report.matrix) {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
                println!("{:<17} {}", c.name(), cells.join("  "));
            }
            for m in &report.metrics {
                println!("{:<13} P {:.3}  R {:.3}  F1 {:.3}", m.class.name(), m.precision, m.recall, m.f1);
            }
            println!("macro-F1 {:.3}", report.macro_f1);
            Ok(())
        }
        ClfCommand::Tag {
            model,
            hashtag,
            artifacts,
            sample,
            json,
        } => {
            let model = MaxEntModel::load(&model).map_err(|e| failure::classifier("loading model", e))?;
            let loaded = Loaded::open(&artifacts)?;
            let h = normalize_hashtag(hashtag.trim_start_matches('#'));
            if !loaded.index.is_relevant(&h) {
                return Err(Failure::user(format!("#{h} is not a relevant hashtag")));
            }
            let result = classifier::classify_hashtag(
                &model,
                &loaded.extractor(),
                &loaded.index,
                &h,
                sample_options(&sample, exec),
            )
            .map_err(|e| failure::classifier("classifying", e))?;
            if json {
                return print_json(&result);
            }
            println!("#{}: {} ({} tweets)", result.hashtag, result.label, result.tweets);
            for c in htx_core::classifier::HashtagClass::ALL {
                println!("  {:<13} {:.3}", c.name(), result.distribution.get(c));
            }
            Ok(())
        }
    }
}

fn serve(a: ServeArgs, exec: Execution) -> Outcome {
    let manifest = htx_pipeline::BuildManifest::load(&htx_pipeline::BuildLayout::new(&a.data).manifest()).ok();
    let mut config = manifest.as_ref().map(ServeConfig::from_manifest).unwrap_or_default();
    config.cache_size = a.cache_size;
    config.static_dir = a.static_dir;
    config.exec = exec;
    let snapshot = Snapshot::open(&a.data, a.model.as_deref(), Some(config)).user("loading build")?;
    let runtime = tokio::runtime::Runtime::new().internal("starting runtime")?;
    runtime
        .block_on(htx_server::serve(Arc::new(snapshot), a.addr))
        .user(&format!("serving on {}", a.addr))
}

fn pipeline(a: PipelineArgs, sequential: bool) -> Outcome {
    let mut cfg = PipelineConfig::load(&a.config, &a.set).map_err(failure::pipeline)?;
    if let Some(out) = a.out {
        cfg.out = out;
    }
    if sequential {
        cfg.parallel = false;
    }
    let report = htx_pipeline::run(&cfg).map_err(failure::pipeline)?;
    if a.json {
        return print_json(&serde_json::json!({
            "out": cfg.out,
            "executed": report.executed,
            "skipped": report.skipped,
            "manifest": report.manifest,
        }));
    }
    let skipped: BTreeSet<&String> = report.skipped.iter().collect();
    for s in &report.manifest.stages {
        let state = if skipped.contains(&s.name) { "up to date" } else { "built" };
        println!("{:<10} {:<11} {}", s.name, state, &s.hash[..12]);
    }
    println!("build directory: {}", cfg.out.display());
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match cli.command {
        Command::Ingest(a) => ingest(a, exec),
        Command::Cooc(c) => cooc(c, exec),
        Command::EvalDict(a) => eval_dict(a, exec),
        Command::Graph(c) => graph(c, exec),
        Command::Gazetteer(c) => gazetteer(c),
        Command::Tagger(c) => tagger(c),
        Command::Features(c) => features(c, exec),
        Command::Clf(c) => clf(c, exec),
        Command::Serve(a) => serve(a, exec),
        Command::Pipeline(a) => pipeline(a, cli.sequential),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { failure::USER } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("htx: {f}");
            ExitCode::from(f.code)
        }
    }
}
