//! Tweet corpus ingestion and the hashtag -> tweets inverted index.
//!
//! Input is JSON lines, one `{"id", "created_at", "text"}` object per line.
//! A hashtag is *relevant* when it occurs in at least `min_support` tweets;
//! only tweets carrying at least one relevant hashtag are indexed.
//!
//! On-disk layout of an index directory (all integers little-endian):
//!
//! * `manifest.json` – format name, version, `min_support` and build stats.
//! * `vocab.json` – relevant hashtags sorted by name, each with its tweet
//!   frequency and the offset (in ids) of its postings list.
//! * `postings.bin` – concatenated postings lists, one `u64` tweet id per
//!   entry, each list sorted ascending.
//! * `tweets.jsonl` – indexed tweets sorted by id, one JSON object per line.
//! * `tweets.slots` – 32-byte records sorted by id:
//!   `id: u64, created_at: i64, byte offset: u64, byte length: u64`
//!   pointing into `tweets.jsonl`.
//!
//! The build writes into a staging directory which is renamed into place
//! once complete.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Datelike, Duration, NaiveDate, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diskio::{i64_at, u64_at, RandomAccessFile, StagingDir};
use crate::par::{self, Execution};
use crate::tokenizer::extract_hashtags;

pub const INDEX_FORMAT: &str = "htx-index";
pub const INDEX_VERSION: u32 = 1;
pub const DEFAULT_MIN_SUPPORT: u32 = 3;

const SLOT_SIZE: usize = 32;
const BATCH_LINES: usize = 4096;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("duplicate tweet id {id} at line {line}")]
    DuplicateId { id: u64, line: usize },
    #[error("min_support must be at least 1")]
    InvalidMinSupport,
    #[error("invalid index at {path}: {reason}")]
    InvalidIndex { path: PathBuf, reason: String },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

/// A corpus record as it appears in the input file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTweet {
    pub id: u64,
    pub created_at: i64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: u64,
    /// Seconds since the Unix epoch, UTC.
    pub created_at: i64,
    pub text: String,
    /// Deduplicated, normalized hashtags of `text`.
    pub hashtags: BTreeSet<String>,
}

impl Tweet {
    pub fn from_raw(raw: RawTweet) -> Self {
        let hashtags = extract_hashtags(&raw.text).into_iter().collect();
        Tweet {
            id: raw.id,
            created_at: raw.created_at,
            text: raw.text,
            hashtags,
        }
    }

    pub fn has_hashtag(&self, tag: &str) -> bool {
        self.hashtags.contains(tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IndexStats {
    /// Well-formed records read from the input.
    pub total_tweets: u64,
    /// Distinct hashtags across all records, relevant or not.
    pub distinct_hashtags: u64,
    pub relevant_hashtags: u64,
    pub indexed_tweets: u64,
    pub malformed_lines: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexManifest {
    pub format: String,
    pub version: u32,
    pub min_support: u32,
    pub stats: IndexStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct VocabEntry {
    tag: String,
    tweets: u64,
    offset: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct IngestOptions {
    pub min_support: u32,
    pub exec: Execution,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            min_support: DEFAULT_MIN_SUPPORT,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bucket {
    Day,
    Week,
    Month,
}

impl std::str::FromStr for Bucket {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "day" => Ok(Bucket::Day),
            "week" => Ok(Bucket::Week),
            "month" => Ok(Bucket::Month),
            other => Err(format!("unknown bucket `{other}` (expected day, week or month)")),
        }
    }
}

impl Bucket {
    /// Start (Unix seconds, UTC) of the bucket containing `ts`. Weeks start
    /// on Monday.
    pub fn start_of(self, ts: i64) -> i64 {
        let day = ts.div_euclid(86_400) * 86_400;
        match self {
            Bucket::Day => day,
            Bucket::Week => {
                let dt = Utc.timestamp_opt(day, 0).single().expect("in range");
                let back = dt.weekday().num_days_from_monday() as i64;
                (dt - Duration::days(back)).timestamp()
            }
            Bucket::Month => {
                let dt: DateTime<Utc> = Utc.timestamp_opt(day, 0).single().expect("in range");
                NaiveDate::from_ymd_opt(dt.year(), dt.month(), 1)
                    .expect("valid date")
                    .and_hms_opt(0, 0, 0)
                    .expect("valid time")
                    .and_utc()
                    .timestamp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    id: u64,
    created_at: i64,
    offset: u64,
    len: u64,
}

/// An immutable, built inverted index over a tweet corpus.
#[derive(Debug)]
pub struct CorpusIndex {
    dir: PathBuf,
    manifest: IndexManifest,
    vocab: BTreeMap<String, VocabEntry>,
    slots: Vec<Slot>,
    postings: RandomAccessFile,
    tweets: RandomAccessFile,
}

struct Parsed {
    line: usize,
    record: Option<Tweet>,
}

fn parse_batch(exec: Execution, batch: &[(usize, String)]) -> Vec<Parsed> {
    par::map(exec, batch, |(line, text)| Parsed {
        line: *line,
        record: serde_json::from_str::<RawTweet>(text).ok().map(Tweet::from_raw),
    })
}

/// Streams the non-blank lines of `path` in parsed batches.
fn for_each_batch<F>(path: &Path, exec: Execution, mut f: F) -> Result<()>
where
    F: FnMut(Vec<Parsed>) -> Result<()>,
{
    let reader = BufReader::new(File::open(path)?);
    let mut batch = Vec::with_capacity(BATCH_LINES);
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        batch.push((i + 1, line));
        if batch.len() == BATCH_LINES {
            f(parse_batch(exec, &batch))?;
            batch.clear();
        }
    }
    if !batch.is_empty() {
        f(parse_batch(exec, &batch))?;
    }
    Ok(())
}

impl CorpusIndex {
    /// Builds an index for the JSON-lines corpus at `input` into `out_dir`.
    ///
    /// Pass one counts hashtag tweet frequencies; pass two keeps the tweets
    /// that carry at least one relevant hashtag. Malformed lines are skipped
    /// with a warning and counted; a repeated tweet id aborts the build.
    pub fn build(input: &Path, out_dir: &Path, opts: IngestOptions) -> Result<CorpusIndex> {
        if opts.min_support == 0 {
            return Err(CorpusError::InvalidMinSupport);
        }

        let mut freq: HashMap<String, u64> = HashMap::new();
        let mut seen: HashSet<u64> = HashSet::new();
        let mut stats = IndexStats::default();
        for_each_batch(input, opts.exec, |batch| {
            for p in batch {
                match p.record {
                    None => {
                        log::warn!("{}:{}: malformed record skipped", input.display(), p.line);
                        stats.malformed_lines += 1;
                    }
                    Some(t) => {
                        if !seen.insert(t.id) {
                            return Err(CorpusError::DuplicateId { id: t.id, line: p.line });
                        }
                        stats.total_tweets += 1;
                        for h in t.hashtags {
                            *freq.entry(h).or_insert(0) += 1;
                        }
                    }
                }
            }
            Ok(())
        })?;
        drop(seen);
        stats.distinct_hashtags = freq.len() as u64;

        let min = opts.min_support as u64;
        let relevant: HashSet<&str> = freq
            .iter()
            .filter(|(_, &c)| c >= min)
            .map(|(h, _)| h.as_str())
            .collect();
        stats.relevant_hashtags = relevant.len() as u64;

        let mut kept: Vec<Tweet> = Vec::new();
        for_each_batch(input, opts.exec, |batch| {
            kept.extend(batch.into_iter().filter_map(|p| p.record).filter(|t| {
                t.hashtags.iter().any(|h| relevant.contains(h.as_str()))
            }));
            Ok(())
        })?;
        kept.sort_unstable_by_key(|t| t.id);
        stats.indexed_tweets = kept.len() as u64;

        let staging = StagingDir::new(out_dir)?;
        write_index(staging.path(), &kept, &freq, &relevant, opts.min_support, stats)?;
        let dir = staging.commit()?;
        CorpusIndex::open(&dir)
    }

    pub fn open(dir: &Path) -> Result<CorpusIndex> {
        let invalid = |reason: String| CorpusError::InvalidIndex {
            path: dir.to_path_buf(),
            reason,
        };
        let manifest: IndexManifest =
            serde_json::from_reader(BufReader::new(File::open(dir.join("manifest.json"))?))?;
        if manifest.format != INDEX_FORMAT || manifest.version != INDEX_VERSION {
            return Err(invalid(format!(
                "unsupported format {} v{}",
                manifest.format, manifest.version
            )));
        }
        let entries: Vec<VocabEntry> =
            serde_json::from_reader(BufReader::new(File::open(dir.join("vocab.json"))?))?;
        let vocab = entries.into_iter().map(|e| (e.tag.clone(), e)).collect();

        let mut raw = Vec::new();
        File::open(dir.join("tweets.slots"))?.read_to_end(&mut raw)?;
        if raw.len() % SLOT_SIZE != 0 {
            return Err(invalid("truncated tweets.slots".into()));
        }
        let slots = raw
            .chunks_exact(SLOT_SIZE)
            .map(|c| Slot {
                id: u64_at(c, 0),
                created_at: i64_at(c, 8),
                offset: u64_at(c, 16),
                len: u64_at(c, 24),
            })
            .collect::<Vec<_>>();
        if slots.len() as u64 != manifest.stats.indexed_tweets {
            return Err(invalid("slot count disagrees with manifest".into()));
        }

        Ok(CorpusIndex {
            dir: dir.to_path_buf(),
            manifest,
            vocab,
            slots,
            postings: RandomAccessFile::open(&dir.join("postings.bin"))?,
            tweets: RandomAccessFile::open(&dir.join("tweets.jsonl"))?,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn manifest(&self) -> &IndexManifest {
        &self.manifest
    }

    pub fn stats(&self) -> IndexStats {
        self.manifest.stats
    }

    pub fn min_support(&self) -> u32 {
        self.manifest.min_support
    }

    pub fn is_relevant(&self, tag: &str) -> bool {
        self.vocab.contains_key(tag)
    }

    /// Tweet frequency of a relevant hashtag.
    pub fn frequency(&self, tag: &str) -> Option<u64> {
        self.vocab.get(tag).map(|e| e.tweets)
    }

    /// Relevant hashtags with their tweet frequencies, sorted by name.
    pub fn vocab(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.vocab.iter().map(|(k, e)| (k.as_str(), e.tweets))
    }

    /// Relevant hashtags by descending frequency, ties by name ascending.
    pub fn by_frequency(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<_> = self.vocab().collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// Sorted ids of the indexed tweets containing `tag`; empty when the tag
    /// is not relevant.
    pub fn tweet_ids_for(&self, tag: &str) -> Result<Vec<u64>> {
        let Some(e) = self.vocab.get(tag) else {
            return Ok(Vec::new());
        };
        let buf = self.postings.read_vec(e.offset * 8, e.tweets as usize * 8)?;
        Ok(buf.chunks_exact(8).map(|c| u64_at(c, 0)).collect())
    }

    /// Indexed tweets containing `tag`, ordered by id.
    pub fn tweets_for(&self, tag: &str) -> Result<Vec<Tweet>> {
        self.tweet_ids_for(tag)?
            .into_iter()
            .map(|id| {
                self.tweet(id)?.ok_or_else(|| CorpusError::InvalidIndex {
                    path: self.dir.clone(),
                    reason: format!("posting {id} has no tweet record"),
                })
            })
            .collect()
    }

    pub fn tweet(&self, id: u64) -> Result<Option<Tweet>> {
        let Ok(i) = self.slots.binary_search_by_key(&id, |s| s.id) else {
            return Ok(None);
        };
        let s = self.slots[i];
        let buf = self.tweets.read_vec(s.offset, s.len as usize)?;
        Ok(Some(serde_json::from_slice(&buf)?))
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Streams all indexed tweets in id order.
    pub fn tweets(&self) -> Result<impl Iterator<Item = Result<Tweet>>> {
        let reader = BufReader::new(File::open(self.dir.join("tweets.jsonl"))?);
        Ok(reader.lines().map(|line| Ok(serde_json::from_str(&line?)?)))
    }

    /// Indexed tweet counts per time bucket, ascending by bucket start.
    pub fn timeline_histogram(&self, bucket: Bucket) -> Vec<(i64, u64)> {
        let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
        for s in &self.slots {
            *counts.entry(bucket.start_of(s.created_at)).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }
}

fn write_index(
    dir: &Path,
    tweets: &[Tweet],
    freq: &HashMap<String, u64>,
    relevant: &HashSet<&str>,
    min_support: u32,
    stats: IndexStats,
) -> Result<()> {
    let mut tweets_out = BufWriter::new(File::create(dir.join("tweets.jsonl"))?);
    let mut slots_out = BufWriter::new(File::create(dir.join("tweets.slots"))?);
    let mut postings: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
    let mut offset = 0u64;
    for t in tweets {
        let mut line = serde_json::to_vec(t)?;
        line.push(b'\n');
        tweets_out.write_all(&line)?;
        slots_out.write_all(&t.id.to_le_bytes())?;
        slots_out.write_all(&t.created_at.to_le_bytes())?;
        slots_out.write_all(&offset.to_le_bytes())?;
        slots_out.write_all(&((line.len() - 1) as u64).to_le_bytes())?;
        offset += line.len() as u64;
        for h in &t.hashtags {
            if let Some(&key) = relevant.get(h.as_str()) {
                postings.entry(key).or_default().push(t.id);
            }
        }
    }
    tweets_out.flush()?;
    slots_out.flush()?;

    let mut postings_out = BufWriter::new(File::create(dir.join("postings.bin"))?);
    let mut vocab = Vec::with_capacity(postings.len());
    let mut at = 0u64;
    for (tag, ids) in &postings {
        debug_assert_eq!(ids.len() as u64, freq[*tag]);
        for id in ids {
            postings_out.write_all(&id.to_le_bytes())?;
        }
        vocab.push(VocabEntry {
            tag: (*tag).to_owned(),
            tweets: ids.len() as u64,
            offset: at,
        });
        at += ids.len() as u64;
    }
    postings_out.flush()?;

    fs::write(dir.join("vocab.json"), serde_json::to_vec(&vocab)?)?;
    let manifest = IndexManifest {
        format: INDEX_FORMAT.to_owned(),
        version: INDEX_VERSION,
        min_support,
        stats,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_vec_pretty(&manifest)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_corpus(dir: &Path, lines: &[&str]) -> PathBuf {
        let p = dir.join("corpus.jsonl");
        fs::write(&p, lines.join("\n")).unwrap();
        p
    }

    fn rec(id: u64, ts: i64, text: &str) -> String {
        serde_json::to_string(&RawTweet {
            id,
            created_at: ts,
            text: text.into(),
        })
        .unwrap()
    }

    #[test]
    fn relevance_filter() {
        let tmp = tempfile::tempdir().unwrap();
        let lines = [
            rec(1, 0, "#a x"),
            rec(2, 0, "#a #b"),
            rec(3, 0, "#a"),
            rec(4, 0, "plain"),
            rec(5, 0, "nothing"),
        ];
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let input = write_corpus(tmp.path(), &refs);
        let idx = CorpusIndex::build(&input, &tmp.path().join("idx"), IngestOptions::default()).unwrap();
        assert_eq!(idx.vocab().collect::<Vec<_>>(), vec![("a", 3)]);
        assert_eq!(idx.tweet_ids_for("a").unwrap(), vec![1, 2, 3]);
        assert!(idx.tweets_for("b").unwrap().is_empty());
        assert!(idx.tweets_for("zzz").unwrap().is_empty());
        assert_eq!(idx.stats().indexed_tweets, 3);
        assert_eq!(idx.stats().total_tweets, 5);
        // the stored record keeps the irrelevant hashtag
        assert!(idx.tweet(2).unwrap().unwrap().has_hashtag("b"));
    }

    #[test]
    fn min_support_one_keeps_all() {
        let tmp = tempfile::tempdir().unwrap();
        let lines = [rec(1, 0, "#a"), rec(2, 0, "#b #c")];
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let input = write_corpus(tmp.path(), &refs);
        let opts = IngestOptions {
            min_support: 1,
            ..Default::default()
        };
        let idx = CorpusIndex::build(&input, &tmp.path().join("idx"), opts).unwrap();
        assert_eq!(idx.vocab().count(), 3);
    }

    #[test]
    fn zero_min_support_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        let input = write_corpus(tmp.path(), &[]);
        let opts = IngestOptions {
            min_support: 0,
            ..Default::default()
        };
        assert!(matches!(
            CorpusIndex::build(&input, &tmp.path().join("idx"), opts),
            Err(CorpusError::InvalidMinSupport)
        ));
    }

    #[test]
    fn malformed_lines_skipped_and_counted() {
        let tmp = tempfile::tempdir().unwrap();
        let good = rec(7, 0, "#x");
        let input = write_corpus(tmp.path(), &[&good, "{not json", "{\"id\": 3}", ""]);
        let opts = IngestOptions {
            min_support: 1,
            ..Default::default()
        };
        let idx = CorpusIndex::build(&input, &tmp.path().join("idx"), opts).unwrap();
        assert_eq!(idx.stats().malformed_lines, 2);
        assert_eq!(idx.stats().total_tweets, 1);
    }

    #[test]
    fn duplicate_id_is_fatal() {
        let tmp = tempfile::tempdir().unwrap();
        let a = rec(7, 0, "#x");
        let b = rec(7, 5, "#y");
        let input = write_corpus(tmp.path(), &[&a, &b]);
        let out = tmp.path().join("idx");
        let err = CorpusIndex::build(&input, &out, IngestOptions::default()).unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId { id: 7, line: 2 }));
        assert!(!out.exists());
    }

    #[test]
    fn timeline_buckets() {
        let tmp = tempfile::tempdir().unwrap();
        // 2009-11-02 is a Monday
        let mon = 1_257_120_000;
        let lines = [
            rec(1, mon + 10, "#a"),
            rec(2, mon + 86_400 * 2, "#a"),
            rec(3, mon + 86_400 * 7, "#a"),
        ];
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let input = write_corpus(tmp.path(), &refs);
        let idx = CorpusIndex::build(&input, &tmp.path().join("idx"), IngestOptions::default()).unwrap();
        assert_eq!(idx.timeline_histogram(Bucket::Day).len(), 3);
        assert_eq!(
            idx.timeline_histogram(Bucket::Week),
            vec![(mon, 2), (mon + 7 * 86_400, 1)]
        );
        // 2009-11-01 00:00 UTC
        assert_eq!(idx.timeline_histogram(Bucket::Month), vec![(1_257_033_600, 3)]);
    }

    #[test]
    fn empty_corpus() {
        let tmp = tempfile::tempdir().unwrap();
        let input = write_corpus(tmp.path(), &[]);
        let idx = CorpusIndex::build(&input, &tmp.path().join("idx"), IngestOptions::default()).unwrap();
        assert!(idx.is_empty());
        assert!(idx.timeline_histogram(Bucket::Day).is_empty());
    }
}
