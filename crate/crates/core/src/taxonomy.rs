//! Hypernym taxonomy, path and Wu-Palmer similarity, and the co-occurrence
//! dictionary evaluation.
//!
//! Distances are measured in the undirected hypernym graph extended by a
//! virtual root adjacent to every root synset, so the graph is connected
//! even when the taxonomy is a forest. Depth follows the longest hypernym
//! path: a root has depth 1 and the virtual root depth 0.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cooccur::{CooccurError, CooccurrenceStore, DEFAULT_DICTIONARY_SIZE};
use crate::par::{self, Execution};
use crate::seeding::item_rng;

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("parse error at {location}: {reason}")]
    Parse { location: String, reason: String },
    #[error("hypernym cycle through synset {0}")]
    CycleDetected(String),
    #[error("synset {synset} names unknown hypernym {hypernym}")]
    DanglingHypernym { synset: String, hypernym: String },
    #[error("unknown synset {0}")]
    UnknownSynset(String),
    #[error("no relevant hashtag is a taxonomy lemma")]
    EmptyIntersection,
    #[error(transparent)]
    Store(#[from] CooccurError),
}

pub type Result<T, E = TaxonomyError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Path,
    WuPalmer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    pub value: f64,
    pub measure: Measure,
}

/// Index of a synset inside a loaded [`Taxonomy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SynsetId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynsetRecord {
    pub id: String,
    pub lemmas: Vec<String>,
    #[serde(default)]
    pub hypernyms: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct JsonTaxonomy {
    synsets: Vec<SynsetRecord>,
}

#[derive(Debug)]
pub struct Taxonomy {
    names: Vec<String>,
    lemmas: Vec<Vec<String>>,
    hypernyms: Vec<Vec<u32>>,
    hyponyms: Vec<Vec<u32>>,
    by_name: HashMap<String, u32>,
    lemma_index: BTreeMap<String, Vec<u32>>,
    roots: Vec<u32>,
    depth: Vec<u32>,
    /// Undirected distance to the nearest root.
    root_dist: Vec<u32>,
}

impl Taxonomy {
    /// Loads a JSON taxonomy file, or a WordNet database directory holding
    /// `data.noun`, `data.verb`, `data.adj` and/or `data.adv`.
    pub fn load(path: &Path) -> Result<Self> {
        if path.is_dir() {
            Self::from_records(read_wordnet_dir(path)?)
        } else {
            let text = fs::read_to_string(path)?;
            Self::from_json_str(&text, &path.display().to_string())
        }
    }

    pub fn from_json_str(text: &str, location: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(TaxonomyError::Parse {
                location: location.to_owned(),
                reason: "empty taxonomy".into(),
            });
        }
        let parsed: JsonTaxonomy = serde_json::from_str(text).map_err(|e| TaxonomyError::Parse {
            location: format!("{location}:{}:{}", e.line(), e.column()),
            reason: e.to_string(),
        })?;
        Self::from_records(parsed.synsets)
    }

    pub fn from_records(records: Vec<SynsetRecord>) -> Result<Self> {
        let mut by_name = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if by_name.insert(r.id.clone(), i as u32).is_some() {
                return Err(TaxonomyError::Parse {
                    location: format!("synset {}", r.id),
                    reason: "duplicate synset id".into(),
                });
            }
        }
        let n = records.len();
        let mut names = Vec::with_capacity(n);
        let mut lemmas = Vec::with_capacity(n);
        let mut hypernyms = Vec::with_capacity(n);
        let mut hyponyms = vec![Vec::new(); n];
        let mut lemma_index: BTreeMap<String, Vec<u32>> = BTreeMap::new();
        for (i, r) in records.into_iter().enumerate() {
            let mut hs = Vec::with_capacity(r.hypernyms.len());
            for h in &r.hypernyms {
                let &j = by_name.get(h).ok_or_else(|| TaxonomyError::DanglingHypernym {
                    synset: r.id.clone(),
                    hypernym: h.clone(),
                })?;
                if !hs.contains(&j) {
                    hs.push(j);
                    hyponyms[j as usize].push(i as u32);
                }
            }
            let mut ls: Vec<String> = r.lemmas.iter().map(|l| l.to_lowercase()).collect();
            ls.sort();
            ls.dedup();
            for l in &ls {
                lemma_index.entry(l.clone()).or_default().push(i as u32);
            }
            names.push(r.id);
            lemmas.push(ls);
            hypernyms.push(hs);
        }

        // Kahn's algorithm from the roots down; anything left over is on a cycle.
        let roots: Vec<u32> = (0..n as u32).filter(|&i| hypernyms[i as usize].is_empty()).collect();
        let mut pending: Vec<usize> = hypernyms.iter().map(Vec::len).collect();
        let mut depth = vec![0u32; n];
        let mut queue: VecDeque<u32> = roots.iter().copied().collect();
        for &r in &roots {
            depth[r as usize] = 1;
        }
        let mut done = 0;
        while let Some(s) = queue.pop_front() {
            done += 1;
            for &c in &hyponyms[s as usize] {
                let c = c as usize;
                depth[c] = depth[c].max(depth[s as usize] + 1);
                pending[c] -= 1;
                if pending[c] == 0 {
                    queue.push_back(c as u32);
                }
            }
        }
        if done < n {
            let culprit = (0..n).find(|&i| pending[i] > 0).expect("some synset unresolved");
            return Err(TaxonomyError::CycleDetected(names[culprit].clone()));
        }

        let mut root_dist = vec![u32::MAX; n];
        let mut queue: VecDeque<u32> = VecDeque::new();
        for &r in &roots {
            root_dist[r as usize] = 0;
            queue.push_back(r);
        }
        while let Some(s) = queue.pop_front() {
            let d = root_dist[s as usize] + 1;
            for &t in hypernyms[s as usize].iter().chain(&hyponyms[s as usize]) {
                if root_dist[t as usize] == u32::MAX {
                    root_dist[t as usize] = d;
                    queue.push_back(t);
                }
            }
        }

        Ok(Taxonomy {
            names,
            lemmas,
            hypernyms,
            hyponyms,
            by_name,
            lemma_index,
            roots,
            depth,
            root_dist,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn synset(&self, name: &str) -> Result<SynsetId> {
        self.by_name
            .get(name)
            .map(|&i| SynsetId(i))
            .ok_or_else(|| TaxonomyError::UnknownSynset(name.to_owned()))
    }

    pub fn name(&self, s: SynsetId) -> &str {
        &self.names[s.0 as usize]
    }

    pub fn lemmas_of(&self, s: SynsetId) -> &[String] {
        &self.lemmas[s.0 as usize]
    }

    pub fn hypernyms_of(&self, s: SynsetId) -> impl Iterator<Item = SynsetId> + '_ {
        self.hypernyms[s.0 as usize].iter().map(|&i| SynsetId(i))
    }

    pub fn roots(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.roots.iter().map(|&i| SynsetId(i))
    }

    /// Depth along the longest hypernym path; roots are at depth 1.
    pub fn depth(&self, s: SynsetId) -> u32 {
        self.depth[s.0 as usize]
    }

    pub fn synsets_of(&self, lemma: &str) -> &[u32] {
        self.lemma_index
            .get(&lemma.to_lowercase())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn has_lemma(&self, lemma: &str) -> bool {
        self.lemma_index.contains_key(lemma)
    }

    /// All indexed lemmas, sorted.
    pub fn lemma_list(&self) -> Vec<&str> {
        self.lemma_index.keys().map(String::as_str).collect()
    }

    fn neighbors(&self, s: u32) -> impl Iterator<Item = u32> + '_ {
        self.hypernyms[s as usize]
            .iter()
            .chain(&self.hyponyms[s as usize])
            .copied()
    }

    /// Shortest undirected distance between any of `from` and any of `to`.
    fn distance(&self, from: &[u32], to: &[u32]) -> u32 {
        if from.iter().any(|s| to.contains(s)) {
            return 0;
        }
        let min_root = |ss: &[u32]| ss.iter().map(|&s| self.root_dist[s as usize]).min().unwrap();
        // every pair is connected through the virtual root
        let bound = min_root(from) + min_root(to) + 2;

        let mut dist_a: HashMap<u32, u32> = from.iter().map(|&s| (s, 0)).collect();
        let mut dist_b: HashMap<u32, u32> = to.iter().map(|&s| (s, 0)).collect();
        let mut frontier_a: Vec<u32> = from.to_vec();
        let mut frontier_b: Vec<u32> = to.to_vec();
        let (mut ra, mut rb) = (0u32, 0u32);
        let mut best = bound;
        while ra + rb < best && !frontier_a.is_empty() && !frontier_b.is_empty() {
            let expand_a = frontier_a.len() <= frontier_b.len();
            let (frontier, dist, other, radius) = if expand_a {
                (&mut frontier_a, &mut dist_a, &dist_b, &mut ra)
            } else {
                (&mut frontier_b, &mut dist_b, &dist_a, &mut rb)
            };
            *radius += 1;
            let mut next = Vec::new();
            for &s in frontier.iter() {
                for t in self.neighbors(s) {
                    if dist.contains_key(&t) {
                        continue;
                    }
                    dist.insert(t, *radius);
                    if let Some(&d) = other.get(&t) {
                        best = best.min(*radius + d);
                    }
                    next.push(t);
                }
            }
            *frontier = next;
        }
        best
    }

    pub fn path_similarity(&self, a: SynsetId, b: SynsetId) -> SimilarityScore {
        let d = self.distance(&[a.0], &[b.0]);
        SimilarityScore {
            value: 1.0 / (d as f64 + 1.0),
            measure: Measure::Path,
        }
    }

    /// Hypernym closure of `s`, including `s`.
    fn ancestors(&self, s: u32) -> HashSet<u32> {
        let mut seen = HashSet::new();
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                stack.extend(&self.hypernyms[x as usize]);
            }
        }
        seen
    }

    fn wu_palmer_sets(&self, a: u32, anc_a: &HashSet<u32>, b: u32, anc_b: &HashSet<u32>) -> f64 {
        let (small, large) = if anc_a.len() <= anc_b.len() {
            (anc_a, anc_b)
        } else {
            (anc_b, anc_a)
        };
        let lcs_depth = small
            .iter()
            .filter(|s| large.contains(s))
            .map(|&s| self.depth[s as usize])
            .max()
            .unwrap_or(0);
        2.0 * lcs_depth as f64 / (self.depth[a as usize] + self.depth[b as usize]) as f64
    }

    pub fn wu_palmer_similarity(&self, a: SynsetId, b: SynsetId) -> SimilarityScore {
        let value = self.wu_palmer_sets(a.0, &self.ancestors(a.0), b.0, &self.ancestors(b.0));
        SimilarityScore {
            value,
            measure: Measure::WuPalmer,
        }
    }

    pub fn similarity(&self, a: SynsetId, b: SynsetId, measure: Measure) -> SimilarityScore {
        match measure {
            Measure::Path => self.path_similarity(a, b),
            Measure::WuPalmer => self.wu_palmer_similarity(a, b),
        }
    }

    /// Similarity of two words: the best score over all pairs of synsets
    /// containing them. `None` when either word is not a lemma.
    pub fn lemma_similarity(&self, w1: &str, w2: &str, measure: Measure) -> Option<SimilarityScore> {
        let s1 = self.synsets_of(w1);
        let s2 = self.synsets_of(w2);
        if s1.is_empty() || s2.is_empty() {
            return None;
        }
        let value = match measure {
            Measure::Path => 1.0 / (self.distance(s1, s2) as f64 + 1.0),
            Measure::WuPalmer => {
                let anc2: Vec<HashSet<u32>> = s2.iter().map(|&s| self.ancestors(s)).collect();
                s1.iter()
                    .flat_map(|&a| {
                        let anc_a = self.ancestors(a);
                        s2.iter()
                            .zip(&anc2)
                            .map(|(&b, anc_b)| self.wu_palmer_sets(a, &anc_a, b, anc_b))
                            .collect::<Vec<_>>()
                    })
                    .fold(0.0, f64::max)
            }
        };
        Some(SimilarityScore { value, measure })
    }
}

fn parse_err(location: String, reason: impl Into<String>) -> TaxonomyError {
    TaxonomyError::Parse {
        location,
        reason: reason.into(),
    }
}

/// Lemma form as stored in the database files, minus adjective position
/// markers such as `(a)` or `(ip)`.
fn clean_lemma(raw: &str) -> String {
    let base = match raw.find('(') {
        Some(i) if raw.ends_with(')') => &raw[..i],
        _ => raw,
    };
    base.to_lowercase()
}

fn pos_key(c: &str) -> &str {
    if c == "s" {
        "a"
    } else {
        c
    }
}

/// Reads the hypernym structure of a WordNet database directory. Synset ids
/// are `<pos>:<offset>`; `@` and `@i` pointers become hypernym edges.
fn read_wordnet_dir(dir: &Path) -> Result<Vec<SynsetRecord>> {
    let mut records = Vec::new();
    let mut found = false;
    for (file, pos) in [("data.noun", "n"), ("data.verb", "v"), ("data.adj", "a"), ("data.adv", "r")] {
        let path = dir.join(file);
        if !path.exists() {
            continue;
        }
        found = true;
        let text = fs::read_to_string(&path)?;
        for (no, line) in text.lines().enumerate() {
            if line.starts_with("  ") || line.trim().is_empty() {
                continue;
            }
            let loc = || format!("{}:{}", path.display(), no + 1);
            let data = line.split(" | ").next().unwrap_or(line);
            let f: Vec<&str> = data.split_whitespace().collect();
            if f.len() < 4 {
                return Err(parse_err(loc(), "too few fields"));
            }
            let offset = f[0];
            let w_cnt = usize::from_str_radix(f[3], 16).map_err(|_| parse_err(loc(), "bad word count"))?;
            let mut at = 4;
            let mut lemmas = Vec::with_capacity(w_cnt);
            for _ in 0..w_cnt {
                let w = f.get(at).ok_or_else(|| parse_err(loc(), "truncated word list"))?;
                lemmas.push(clean_lemma(w));
                at += 2;
            }
            let p_cnt: usize = f
                .get(at)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(loc(), "bad pointer count"))?;
            at += 1;
            let mut hypernyms = Vec::new();
            for _ in 0..p_cnt {
                if at + 4 > f.len() {
                    return Err(parse_err(loc(), "truncated pointer list"));
                }
                let (sym, target, tpos) = (f[at], f[at + 1], f[at + 2]);
                if sym == "@" || sym == "@i" {
                    hypernyms.push(format!("{}:{}", pos_key(tpos), target));
                }
                at += 4;
            }
            records.push(SynsetRecord {
                id: format!("{pos}:{offset}"),
                lemmas,
                hypernyms,
            });
        }
    }
    if !found {
        return Err(parse_err(dir.display().to_string(), "no WordNet data files found"));
    }
    if records.is_empty() {
        return Err(parse_err(dir.display().to_string(), "no synsets"));
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub seed: u64,
    pub dictionary_size: usize,
    /// Random partners per hashtag or lemma in the two baselines.
    pub random_partners: usize,
    /// Base lemmas drawn for the taxonomy baseline.
    pub lemma_sample: usize,
    pub exec: Execution,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            dictionary_size: DEFAULT_DICTIONARY_SIZE,
            random_partners: 10,
            lemma_sample: 10_000,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSimilarity {
    pub pairs: u64,
    /// `None` when no pairs were scored.
    pub path: Option<f64>,
    pub wu_palmer: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub seed: u64,
    /// Number of relevant hashtags that are taxonomy lemmas.
    pub hashtags_in_taxonomy: usize,
    pub lemmas_in_taxonomy: usize,
    pub cooccurrence: MeanSimilarity,
    pub twitter_baseline: MeanSimilarity,
    pub taxonomy_baseline: MeanSimilarity,
}

const STREAM_TWITTER: u64 = 2;
const STREAM_LEMMA_BASE: u64 = 3;
const STREAM_LEMMA_PARTNERS: u64 = 4;

fn summarize(per_item: Vec<Vec<(f64, f64)>>) -> MeanSimilarity {
    let mut n = 0u64;
    let (mut p, mut w) = (0.0, 0.0);
    for item in per_item {
        for (a, b) in item {
            n += 1;
            p += a;
            w += b;
        }
    }
    MeanSimilarity {
        pairs: n,
        path: (n > 0).then(|| p / n as f64),
        wu_palmer: (n > 0).then(|| w / n as f64),
    }
}

fn both(tax: &Taxonomy, a: &str, b: &str) -> Option<(f64, f64)> {
    Some((
        tax.lemma_similarity(a, b, Measure::Path)?.value,
        tax.lemma_similarity(a, b, Measure::WuPalmer)?.value,
    ))
}

/// Draws `k` indices uniformly from `0..n` excluding `skip`, with replacement.
fn partners<R: Rng>(rng: &mut R, n: usize, skip: usize, k: usize) -> Vec<usize> {
    if n < 2 {
        return Vec::new();
    }
    (0..k)
        .map(|_| {
            let j = rng.gen_range(0..n - 1);
            if j >= skip {
                j + 1
            } else {
                j
            }
        })
        .collect()
}

/// Mean similarities for dictionary neighbours, random hashtag pairs and
/// random lemma pairs.
pub fn evaluate_dictionary(
    store: &CooccurrenceStore,
    tax: &Taxonomy,
    opts: EvalOptions,
) -> Result<EvaluationReport> {
    let h_wn: Vec<&str> = store
        .tags()
        .iter()
        .map(String::as_str)
        .filter(|t| tax.has_lemma(t))
        .collect();
    if h_wn.is_empty() {
        return Err(TaxonomyError::EmptyIntersection);
    }
    let in_wn: HashSet<&str> = h_wn.iter().copied().collect();

    let dictionaries = h_wn
        .iter()
        .map(|h| store.dictionary(h, opts.dictionary_size))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let cooc = par::map_range(opts.exec, h_wn.len(), |i| {
        dictionaries[i]
            .iter()
            .flatten()
            .filter(|(n, _)| in_wn.contains(n.as_str()))
            .filter_map(|(n, _)| both(tax, h_wn[i], n))
            .collect::<Vec<_>>()
    });

    let twitter = par::map_range(opts.exec, h_wn.len(), |i| {
        let mut rng = item_rng(opts.seed, STREAM_TWITTER, i as u64);
        partners(&mut rng, h_wn.len(), i, opts.random_partners)
            .into_iter()
            .filter_map(|j| both(tax, h_wn[i], h_wn[j]))
            .collect::<Vec<_>>()
    });

    let lemmas = tax.lemma_list();
    let m = opts.lemma_sample.min(lemmas.len());
    let mut rng = item_rng(opts.seed, STREAM_LEMMA_BASE, 0);
    let base: Vec<usize> = sample(&mut rng, lemmas.len(), m).into_vec();
    let wordnet = par::map(opts.exec, &base, |&i| {
        let mut rng = item_rng(opts.seed, STREAM_LEMMA_PARTNERS, i as u64);
        partners(&mut rng, lemmas.len(), i, opts.random_partners)
            .into_iter()
            .filter_map(|j| both(tax, lemmas[i], lemmas[j]))
            .collect::<Vec<_>>()
    });

    Ok(EvaluationReport {
        seed: opts.seed,
        hashtags_in_taxonomy: h_wn.len(),
        lemmas_in_taxonomy: lemmas.len(),
        cooccurrence: summarize(cooc),
        twitter_baseline: summarize(twitter),
        taxonomy_baseline: summarize(wordnet),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, lemmas: &[&str], hyper: &[&str]) -> SynsetRecord {
        SynsetRecord {
            id: id.into(),
            lemmas: lemmas.iter().map(|s| s.to_string()).collect(),
            hypernyms: hyper.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// entity > animal > {dog, cat}; entity > plant; separate root: abstraction
    fn small() -> Taxonomy {
        Taxonomy::from_records(vec![
            rec("entity", &["entity"], &[]),
            rec("animal", &["animal", "beast"], &["entity"]),
            rec("dog", &["dog", "Hound"], &["animal"]),
            rec("cat", &["cat"], &["animal"]),
            rec("plant", &["plant"], &["entity"]),
            rec("abstraction", &["abstraction"], &[]),
            rec("idea", &["idea", "dog"], &["abstraction"]),
        ])
        .unwrap()
    }

    fn sim(t: &Taxonomy, a: &str, b: &str, m: Measure) -> f64 {
        t.similarity(t.synset(a).unwrap(), t.synset(b).unwrap(), m).value
    }

    #[test]
    fn roots_and_depths() {
        let t = small();
        assert_eq!(t.roots().count(), 2);
        assert_eq!(t.depth(t.synset("dog").unwrap()), 3);
        assert_eq!(t.depth(t.synset("abstraction").unwrap()), 1);
        assert_eq!(t.synsets_of("HOUND").len(), 1);
    }

    #[test]
    fn path_basics() {
        let t = small();
        assert_eq!(sim(&t, "dog", "dog", Measure::Path), 1.0);
        assert_eq!(sim(&t, "dog", "animal", Measure::Path), 0.5);
        assert_eq!(sim(&t, "dog", "cat", Measure::Path), 1.0 / 3.0);
        // dog-animal-entity-V-abstraction-idea
        assert_eq!(sim(&t, "dog", "idea", Measure::Path), 1.0 / 6.0);
    }

    #[test]
    fn wu_palmer_basics() {
        let t = small();
        assert_eq!(sim(&t, "cat", "cat", Measure::WuPalmer), 1.0);
        // child depth 3 vs parent depth 2: 2*2/(3+2)
        assert_eq!(sim(&t, "dog", "animal", Measure::WuPalmer), 4.0 / 5.0);
        assert_eq!(sim(&t, "dog", "cat", Measure::WuPalmer), 4.0 / 6.0);
        assert_eq!(sim(&t, "dog", "idea", Measure::WuPalmer), 0.0);
    }

    #[test]
    fn lemma_similarity_takes_best_sense() {
        let t = small();
        // "dog" is both an animal and an idea
        let s = t.lemma_similarity("dog", "abstraction", Measure::Path).unwrap();
        assert_eq!(s.value, 0.5);
        assert!(t.lemma_similarity("dog", "unicorn", Measure::Path).is_none());
        assert_eq!(t.lemma_similarity("cat", "cat", Measure::WuPalmer).unwrap().value, 1.0);
    }

    #[test]
    fn load_errors() {
        assert!(matches!(
            Taxonomy::from_json_str("", "x"),
            Err(TaxonomyError::Parse { .. })
        ));
        assert!(matches!(
            Taxonomy::from_records(vec![rec("a", &["a"], &["a"])]),
            Err(TaxonomyError::CycleDetected(_))
        ));
        assert!(matches!(
            Taxonomy::from_records(vec![rec("a", &["a"], &["b"]), rec("b", &["b"], &["c"]), rec("c", &["c"], &["b"])]),
            Err(TaxonomyError::DanglingHypernym { .. }) | Err(TaxonomyError::CycleDetected(_))
        ));
        assert!(matches!(
            Taxonomy::from_records(vec![rec("a", &["a"], &["zz"])]),
            Err(TaxonomyError::DanglingHypernym { .. })
        ));
        assert!(matches!(small().synset("nope"), Err(TaxonomyError::UnknownSynset(_))));
    }

    #[test]
    fn wordnet_data_file() {
        let tmp = tempfile::tempdir().unwrap();
        let noun = "  1 This software and database is being provided\n\
00001740 03 n 01 entity 0 001 ~ 00001930 n 0000 | that which is perceived\n\
00001930 03 n 02 physical_entity 0 Object 0 002 @ 00001740 n 0000 ~ 00002137 n 0000 | an entity\n\
00002137 03 n 01 thing 0 001 @i 00001930 n 0000 | a thing\n";
        fs::write(tmp.path().join("data.noun"), noun).unwrap();
        fs::write(
            tmp.path().join("data.adj"),
            "00001740 00 a 01 able(a) 0 000 | usually\n",
        )
        .unwrap();
        let t = Taxonomy::load(tmp.path()).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.depth(t.synset("n:00002137").unwrap()), 3);
        assert!(t.has_lemma("object"));
        assert!(t.has_lemma("able"));
        assert_eq!(t.roots().count(), 2);
    }
}
