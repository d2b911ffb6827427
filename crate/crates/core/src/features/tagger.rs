//! Trigram HMM part-of-speech tagger in the style of TnT.
//!
//! Transitions interpolate unigram, bigram and trigram estimates with
//! weights found by deleted interpolation. Unknown words are scored through
//! suffix statistics of rare training words, kept separately for
//! capitalized and other words. Decoding is Viterbi over tag-pair states and
//! includes the transition into the end of the sentence.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, BufRead};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const MAX_SUFFIX: usize = 10;
const RARE_WORD_MAX: u64 = 10;

#[derive(Debug, Error)]
pub enum TaggerError {
    #[error("training corpus contains no tagged tokens")]
    EmptyTrainingCorpus,
    #[error("line {line}: malformed token {token:?}, expected word/TAG")]
    Parse { line: usize, token: String },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T, E = TaggerError> = std::result::Result<T, E>;

pub type TaggedSentence = Vec<(String, String)>;

/// Reads one sentence per line of whitespace-separated `word/TAG` tokens; the
/// tag follows the last slash.
pub fn read_tagged<R: BufRead>(reader: R) -> Result<Vec<TaggedSentence>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let mut sent = Vec::new();
        for tok in line.split_whitespace() {
            match tok.rsplit_once('/') {
                Some((w, t)) if !w.is_empty() && !t.is_empty() => sent.push((w.to_string(), t.to_string())),
                _ => {
                    return Err(TaggerError::Parse {
                        line: i + 1,
                        token: tok.to_string(),
                    })
                }
            }
        }
        if !sent.is_empty() {
            out.push(sent);
        }
    }
    Ok(out)
}

/// Raw training counts; the serialized form of a model.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct Counts {
    tags: Vec<String>,
    sentences: u64,
    /// per tag, then the end marker
    unigram: Vec<u64>,
    /// (prev, next, count); prev == tags.len() is the start marker, next ==
    /// tags.len() the end marker
    bigram: Vec<(u32, u32, u64)>,
    trigram: Vec<(u32, u32, u32, u64)>,
    lexicon: BTreeMap<String, Vec<(u32, u64)>>,
}

#[derive(Debug, Clone, Default)]
struct SuffixModel {
    /// P(t) over rare words of this case class
    prior: Vec<f64>,
    /// suffix -> per-tag counts
    table: HashMap<String, Vec<u64>>,
    theta: f64,
}

#[derive(Debug, Clone)]
pub struct TrigramTagger {
    counts: Counts,
    lambdas: [f64; 3],
    tag_index: HashMap<String, u32>,
    bigram: HashMap<(u32, u32), u64>,
    trigram: HashMap<(u32, u32, u32), u64>,
    trigram_ctx: HashMap<(u32, u32), u64>,
    context: Vec<u64>,
    unigram_total: u64,
    upper: SuffixModel,
    lower: SuffixModel,
}

impl TrigramTagger {
    pub fn train(sentences: &[TaggedSentence]) -> Result<Self> {
        if sentences.iter().all(|s| s.is_empty()) {
            return Err(TaggerError::EmptyTrainingCorpus);
        }
        let mut tags: Vec<String> = sentences.iter().flatten().map(|(_, t)| t.clone()).collect();
        tags.sort();
        tags.dedup();
        let idx: HashMap<&str, u32> = tags.iter().enumerate().map(|(i, t)| (t.as_str(), i as u32)).collect();
        let marker = tags.len() as u32;
        let mut unigram = vec![0u64; tags.len() + 1];
        let mut bigram: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        let mut trigram: BTreeMap<(u32, u32, u32), u64> = BTreeMap::new();
        let mut lexicon: BTreeMap<String, BTreeMap<u32, u64>> = BTreeMap::new();
        let mut n_sent = 0;
        for sent in sentences.iter().filter(|s| !s.is_empty()) {
            n_sent += 1;
            let mut seq = vec![marker, marker];
            for (w, t) in sent {
                let t = idx[t.as_str()];
                seq.push(t);
                unigram[t as usize] += 1;
                *lexicon.entry(w.clone()).or_default().entry(t).or_default() += 1;
            }
            seq.push(marker);
            unigram[marker as usize] += 1;
            for i in 2..seq.len() {
                *bigram.entry((seq[i - 1], seq[i])).or_default() += 1;
                *trigram.entry((seq[i - 2], seq[i - 1], seq[i])).or_default() += 1;
            }
        }
        let counts = Counts {
            tags: tags.clone(),
            sentences: n_sent,
            unigram,
            bigram: bigram.into_iter().map(|((a, b), c)| (a, b, c)).collect(),
            trigram: trigram.into_iter().map(|((a, b, c), n)| (a, b, c, n)).collect(),
            lexicon: lexicon
                .into_iter()
                .map(|(w, m)| (w, m.into_iter().collect()))
                .collect(),
        };
        Self::from_counts(counts)
    }

    pub fn train_file(path: &Path) -> Result<Self> {
        let f = io::BufReader::new(std::fs::File::open(path)?);
        Self::train(&read_tagged(f)?)
    }

    fn from_counts(counts: Counts) -> Result<Self> {
        let n_tags = counts.tags.len();
        if n_tags == 0 || counts.unigram.len() != n_tags + 1 {
            return Err(TaggerError::InvalidModel("tag table mismatch".into()));
        }
        let marker = n_tags as u32;
        let in_range = |t: u32| t <= marker;
        if !counts.bigram.iter().all(|&(a, b, _)| in_range(a) && in_range(b))
            || !counts.trigram.iter().all(|&(a, b, c, _)| in_range(a) && in_range(b) && in_range(c))
            || !counts.lexicon.values().flatten().all(|&(t, _)| t < marker)
        {
            return Err(TaggerError::InvalidModel("tag index out of range".into()));
        }
        let bigram: HashMap<(u32, u32), u64> = counts.bigram.iter().map(|&(a, b, c)| ((a, b), c)).collect();
        let trigram: HashMap<(u32, u32, u32), u64> =
            counts.trigram.iter().map(|&(a, b, c, n)| ((a, b, c), n)).collect();
        let mut trigram_ctx: HashMap<(u32, u32), u64> = HashMap::new();
        for &(a, b, _, n) in &counts.trigram {
            *trigram_ctx.entry((a, b)).or_default() += n;
        }
        // how often each tag (or the start marker) precedes a prediction
        let mut context = vec![0u64; n_tags + 1];
        for &(a, _, c) in &counts.bigram {
            context[a as usize] += c;
        }
        let unigram_total: u64 = counts.unigram.iter().sum();

        let mut lambda_mass = [0u64; 3];
        for &(a, b, c, n) in &counts.trigram {
            let ratio = |num: u64, den: u64| {
                if den <= 1 {
                    0.0
                } else {
                    (num as f64 - 1.0) / (den as f64 - 1.0)
                }
            };
            let c3 = ratio(n, trigram_ctx[&(a, b)]);
            let c2 = ratio(bigram[&(b, c)], context[b as usize]);
            let c1 = ratio(counts.unigram[c as usize], unigram_total);
            // ties go to the lower order
            let slot = if c1 >= c2 && c1 >= c3 {
                0
            } else if c2 >= c3 {
                1
            } else {
                2
            };
            lambda_mass[slot] += n;
        }
        let total: u64 = lambda_mass.iter().sum();
        let lambdas = if total == 0 {
            [1.0 / 3.0; 3]
        } else {
            lambda_mass.map(|m| m as f64 / total as f64)
        };

        let mut tagger = Self {
            tag_index: counts.tags.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect(),
            upper: SuffixModel::default(),
            lower: SuffixModel::default(),
            counts,
            lambdas,
            bigram,
            trigram,
            trigram_ctx,
            context,
            unigram_total,
        };
        tagger.upper = tagger.suffix_model(true);
        tagger.lower = tagger.suffix_model(false);
        Ok(tagger)
    }

    fn suffix_model(&self, upper: bool) -> SuffixModel {
        let n_tags = self.counts.tags.len();
        let mut table: HashMap<String, Vec<u64>> = HashMap::new();
        let mut prior = vec![0u64; n_tags];
        for (word, tags) in &self.counts.lexicon {
            if is_capitalized(word) != upper {
                continue;
            }
            let freq: u64 = tags.iter().map(|t| t.1).sum();
            if freq > RARE_WORD_MAX {
                continue;
            }
            let chars: Vec<char> = word.chars().collect();
            for len in 1..=MAX_SUFFIX.min(chars.len()) {
                let suffix: String = chars[chars.len() - len..].iter().collect();
                let row = table.entry(suffix).or_insert_with(|| vec![0; n_tags]);
                for &(t, c) in tags {
                    row[t as usize] += c;
                }
            }
            for &(t, c) in tags {
                prior[t as usize] += c;
            }
        }
        let unconditional: Vec<f64> = (0..n_tags).map(|t| self.tag_prob(t)).collect();
        let prior_total: u64 = prior.iter().sum();
        let prior = if prior_total == 0 {
            unconditional.clone()
        } else {
            prior.iter().map(|&c| c as f64 / prior_total as f64).collect()
        };
        let mean = 1.0 / n_tags as f64;
        let theta = if n_tags > 1 {
            (unconditional.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n_tags - 1) as f64).sqrt()
        } else {
            0.0
        };
        SuffixModel { prior, table, theta }
    }

    pub fn tags(&self) -> &[String] {
        &self.counts.tags
    }

    pub fn lambdas(&self) -> [f64; 3] {
        self.lambdas
    }

    /// Unconditional tag probability over word tokens.
    fn tag_prob(&self, t: usize) -> f64 {
        let words = self.unigram_total - self.counts.sentences;
        self.counts.unigram[t] as f64 / words.max(1) as f64
    }

    /// Interpolated P(next | a, b). Index `tags().len()` stands for the start
    /// marker in `a`/`b` and for the end marker in `next`. Components whose
    /// context was never observed are dropped and the weights renormalized.
    pub fn transition(&self, a: u32, b: u32, next: u32) -> f64 {
        let l = self.lambdas;
        let mut num = 0.0;
        let mut den = 0.0;
        if self.unigram_total > 0 {
            num += l[0] * self.counts.unigram[next as usize] as f64 / self.unigram_total as f64;
            den += l[0];
        }
        let ctx = self.context[b as usize];
        if ctx > 0 {
            num += l[1] * self.bigram.get(&(b, next)).copied().unwrap_or(0) as f64 / ctx as f64;
            den += l[1];
        }
        if let Some(&ctx) = self.trigram_ctx.get(&(a, b)) {
            num += l[2] * self.trigram.get(&(a, b, next)).copied().unwrap_or(0) as f64 / ctx as f64;
            den += l[2];
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    fn lexicon_entry(&self, word: &str) -> Option<&Vec<(u32, u64)>> {
        self.counts.lexicon.get(word).or_else(|| {
            let lower = word.to_lowercase();
            self.counts.lexicon.get(&lower)
        })
    }

    /// Emission scores `(tag, score)` with nonzero score; proportional to
    /// P(word | tag) for unknown words.
    pub fn emissions(&self, word: &str) -> Vec<(u32, f64)> {
        if let Some(entry) = self.lexicon_entry(word) {
            return entry
                .iter()
                .map(|&(t, c)| (t, c as f64 / self.counts.unigram[t as usize] as f64))
                .collect();
        }
        let model = if is_capitalized(word) { &self.upper } else { &self.lower };
        let chars: Vec<char> = word.chars().collect();
        let mut p = model.prior.clone();
        for len in 1..=MAX_SUFFIX.min(chars.len()) {
            let suffix: String = chars[chars.len() - len..].iter().collect();
            let Some(row) = model.table.get(&suffix) else { break };
            let total: u64 = row.iter().sum();
            for (t, pt) in p.iter_mut().enumerate() {
                let local = row[t] as f64 / total as f64;
                *pt = (local + model.theta * *pt) / (1.0 + model.theta);
            }
        }
        p.iter()
            .enumerate()
            .filter_map(|(t, &pt)| {
                let base = self.tag_prob(t);
                (pt > 0.0 && base > 0.0).then(|| (t as u32, pt / base))
            })
            .collect()
    }

    /// Log score of a complete tag sequence, including the end transition.
    pub fn log_score(&self, words: &[&str], tags: &[u32]) -> f64 {
        assert_eq!(words.len(), tags.len());
        let marker = self.counts.tags.len() as u32;
        let (mut a, mut b) = (marker, marker);
        let mut score = 0.0;
        for (w, &t) in words.iter().zip(tags) {
            let e = self
                .emissions(w)
                .into_iter()
                .find(|&(x, _)| x == t)
                .map_or(0.0, |(_, s)| s);
            score += self.transition(a, b, t).ln() + e.ln();
            (a, b) = (b, t);
        }
        score + self.transition(a, b, marker).ln()
    }

    /// Most probable tag indices for `words`.
    pub fn tag_indices(&self, words: &[&str]) -> Vec<u32> {
        if words.is_empty() {
            return Vec::new();
        }
        let marker = self.counts.tags.len() as u32;
        // state (prev, cur) -> (score, backpointer into previous column)
        let mut columns: Vec<Vec<((u32, u32), f64, usize)>> = Vec::with_capacity(words.len());
        let mut prev: Vec<((u32, u32), f64, usize)> = vec![((marker, marker), 0.0, 0)];
        for w in words {
            let em = self.emissions(w);
            let mut next: BTreeMap<(u32, u32), (f64, usize)> = BTreeMap::new();
            for (pi, &((a, b), s, _)) in prev.iter().enumerate() {
                for &(t, e) in &em {
                    let cand = s + self.transition(a, b, t).ln() + e.ln();
                    let slot = next.entry((b, t)).or_insert((f64::NEG_INFINITY, usize::MAX));
                    if cand > slot.0 || slot.1 == usize::MAX {
                        *slot = (cand, pi);
                    }
                }
            }
            let col: Vec<_> = next.into_iter().map(|(k, (s, bp))| (k, s, bp)).collect();
            columns.push(std::mem::replace(&mut prev, col));
        }
        columns.push(prev);
        let last = columns.last().unwrap();
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (i, &((a, b), s, _)) in last.iter().enumerate() {
            let total = s + self.transition(a, b, marker).ln();
            if total > best_score || i == 0 {
                best_score = total;
                best = i;
            }
        }
        let mut out = vec![0u32; words.len()];
        let mut i = best;
        for pos in (0..words.len()).rev() {
            let (state, _, bp) = columns[pos + 1][i];
            out[pos] = state.1;
            i = bp;
        }
        out
    }

    pub fn tag<S: AsRef<str>>(&self, words: &[S]) -> Vec<String> {
        let words: Vec<&str> = words.iter().map(AsRef::as_ref).collect();
        self.tag_indices(&words)
            .into_iter()
            .map(|t| self.counts.tags[t as usize].clone())
            .collect()
    }

    pub fn tag_id(&self, tag: &str) -> Option<u32> {
        self.tag_index.get(tag).copied()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.counts)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_counts(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

fn is_capitalized(word: &str) -> bool {
    word.chars().next().is_some_and(char::is_uppercase)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(text: &str) -> Vec<TaggedSentence> {
        read_tagged(text.as_bytes()).unwrap()
    }

    #[test]
    fn unambiguous_word() {
        let t = TrigramTagger::train(&corpus(
            "the/DT dog/NN barks/VBZ\na/DT dog/NN sleeps/VBZ\nthe/DT cat/NN runs/VBZ\n",
        ))
        .unwrap();
        assert_eq!(t.tag(&["dog"]), vec!["NN"]);
        assert_eq!(t.tag(&["the", "dog", "runs"]), vec!["DT", "NN", "VBZ"]);
    }

    #[test]
    fn empty_corpus() {
        assert!(matches!(
            TrigramTagger::train(&corpus("\n\n")),
            Err(TaggerError::EmptyTrainingCorpus)
        ));
        assert!(matches!(
            read_tagged("a/DT dog".as_bytes()),
            Err(TaggerError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn transitions_are_normalized() {
        let t = TrigramTagger::train(&corpus(
            "the/DT dog/NN barks/VBZ\na/DT dog/NN sleeps/VBZ\nthe/DT cat/NN runs/VBZ ./.\nrun/VB !/.\n",
        ))
        .unwrap();
        let m = t.tags().len() as u32;
        for a in 0..=m {
            for b in 0..=m {
                let s: f64 = (0..=m).map(|c| t.transition(a, b, c)).sum();
                assert!((s - 1.0).abs() < 1e-12, "{a} {b} {s}");
            }
        }
        let l = t.lambdas();
        assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn model_round_trip() {
        let t = TrigramTagger::train(&corpus("Will/MD make/VB it/PRP\n")).unwrap();
        let back = TrigramTagger::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back.tag(&["Will", "make", "zorp"]), t.tag(&["Will", "make", "zorp"]));
    }
}
