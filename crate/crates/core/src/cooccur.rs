//! Pairwise hashtag co-occurrence counts and top-k dictionary queries.
//!
//! `C(a, b)` is the number of distinct indexed tweets whose hashtag set
//! contains both `a` and `b`; only relevant hashtags take part. The
//! dictionary entry of a hashtag is its top-k neighbours by count, ties
//! broken by name ascending.
//!
//! The build emits canonical pairs per tweet, sorts them externally with a
//! bounded in-memory buffer, and merge-counts the sorted stream. Hashtag ids
//! are positions in the sorted tag list, so id order is name order.
//!
//! Store directory layout (integers little-endian):
//!
//! * `manifest.json` – format, version, tag/pair counts, block size.
//! * `tags.json` – relevant hashtags sorted by name; id = position.
//! * `pairs.bin` – 12-byte records `a: u32, b: u32, count: u32`, `a < b`,
//!   sorted by `(a, b)`.
//! * `pairs.idx` – sparse block index: the `(a, b)` key of every
//!   `block_size`-th record, 8 bytes each.
//! * `adj.bin` – 8-byte records `neighbor: u32, count: u32`, grouped by
//!   hashtag id, each group sorted by count descending then neighbor id.
//! * `adj.idx` – `tags + 1` offsets (`u64`, in records) into `adj.bin`.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CorpusError, CorpusIndex};
use crate::diskio::{u32_at, u64_at, RandomAccessFile, StagingDir};
use crate::extsort::{ExternalSorter, Record};
use crate::par::{self, Execution};

pub const STORE_FORMAT: &str = "htx-cooc";
pub const STORE_VERSION: u32 = 1;
pub const DEFAULT_DICTIONARY_SIZE: usize = 10;

const BLOCK_SIZE: usize = 256;
const TWEET_BATCH: usize = 8192;

#[derive(Debug, Error)]
pub enum CooccurError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid store at {path}: {reason}")]
    InvalidStore { path: PathBuf, reason: String },
}

pub type Result<T, E = CooccurError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    /// Buffered pair records before a sorted run is spilled to disk.
    pub spill_threshold: usize,
    pub exec: Execution,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            spill_threshold: 4 << 20,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreManifest {
    pub format: String,
    pub version: u32,
    pub tags: u64,
    pub pairs: u64,
    /// Sum of all pair counts.
    pub total_mass: u64,
    pub block_size: u32,
}

/// Result of a dictionary lookup for a known hashtag.
pub type Dictionary = Vec<(String, u32)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct PairRec {
    a: u32,
    b: u32,
    count: u32,
}

impl Record for PairRec {
    const SIZE: usize = 12;
    fn encode(&self, out: &mut [u8]) {
        out[0..4].copy_from_slice(&self.a.to_le_bytes());
        out[4..8].copy_from_slice(&self.b.to_le_bytes());
        out[8..12].copy_from_slice(&self.count.to_le_bytes());
    }
    fn decode(buf: &[u8]) -> Self {
        PairRec {
            a: u32_at(buf, 0),
            b: u32_at(buf, 4),
            count: u32_at(buf, 8),
        }
    }
}

fn add_pair(acc: &mut PairRec, next: PairRec) -> bool {
    if (acc.a, acc.b) == (next.a, next.b) {
        acc.count += next.count;
        true
    } else {
        false
    }
}

/// Directed adjacency entry; the derived order is the on-disk order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct AdjRec {
    src: u32,
    neg_count: std::cmp::Reverse<u32>,
    dst: u32,
}

impl Record for AdjRec {
    const SIZE: usize = 12;
    fn encode(&self, out: &mut [u8]) {
        out[0..4].copy_from_slice(&self.src.to_le_bytes());
        out[4..8].copy_from_slice(&self.neg_count.0.to_le_bytes());
        out[8..12].copy_from_slice(&self.dst.to_le_bytes());
    }
    fn decode(buf: &[u8]) -> Self {
        AdjRec {
            src: u32_at(buf, 0),
            neg_count: std::cmp::Reverse(u32_at(buf, 4)),
            dst: u32_at(buf, 8),
        }
    }
}

/// A built, immutable co-occurrence store.
#[derive(Debug)]
pub struct CooccurrenceStore {
    dir: PathBuf,
    manifest: StoreManifest,
    tags: Vec<String>,
    ids: HashMap<String, u32>,
    block_keys: Vec<(u32, u32)>,
    adj_offsets: Vec<u64>,
    pairs: RandomAccessFile,
    adj: RandomAccessFile,
}

impl CooccurrenceStore {
    /// Counts co-occurrences over the indexed tweets of `index`.
    pub fn build(index: &CorpusIndex, out_dir: &Path, opts: BuildOptions) -> Result<Self> {
        let tags: Vec<String> = index.vocab().map(|(t, _)| t.to_owned()).collect();
        let ids: HashMap<&str, u32> = tags
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i as u32))
            .collect();

        let staging = StagingDir::new(out_dir)?;
        let spill_dir = staging.path().join("spill");
        fs::create_dir_all(&spill_dir)?;

        // map phase: per-tweet canonical pairs, counted into sorted runs
        let mut sorter = ExternalSorter::new(
            &spill_dir,
            "pairs",
            opts.spill_threshold,
            opts.exec,
            Some(add_pair),
        );
        let mut batch: Vec<Vec<u32>> = Vec::with_capacity(TWEET_BATCH);
        let flush = |batch: &mut Vec<Vec<u32>>, sorter: &mut ExternalSorter<PairRec>| -> io::Result<()> {
            let emitted = par::map(opts.exec, batch, |hs| {
                let mut out = Vec::with_capacity(hs.len() * hs.len().saturating_sub(1) / 2);
                for (i, &a) in hs.iter().enumerate() {
                    for &b in &hs[i + 1..] {
                        out.push(PairRec { a, b, count: 1 });
                    }
                }
                out
            });
            for recs in emitted {
                for r in recs {
                    sorter.push(r)?;
                }
            }
            batch.clear();
            Ok(())
        };
        for tweet in index.tweets()? {
            let tweet = tweet?;
            let mut hs: Vec<u32> = tweet
                .hashtags
                .iter()
                .filter_map(|h| ids.get(h.as_str()).copied())
                .collect();
            if hs.len() < 2 {
                continue;
            }
            hs.sort_unstable();
            batch.push(hs);
            if batch.len() == TWEET_BATCH {
                flush(&mut batch, &mut sorter)?;
            }
        }
        flush(&mut batch, &mut sorter)?;

        // reduce phase: merge-count into pairs.bin and feed the adjacency sort
        let mut adj_sorter = ExternalSorter::new(
            &spill_dir,
            "adj",
            opts.spill_threshold,
            opts.exec,
            None,
        );
        let mut pairs_out = BufWriter::new(File::create(staging.path().join("pairs.bin"))?);
        let mut idx_out = BufWriter::new(File::create(staging.path().join("pairs.idx"))?);
        let mut n_pairs = 0u64;
        let mut mass = 0u64;
        let mut buf = [0u8; 12];
        let mut write_pair = |p: PairRec, adj: &mut ExternalSorter<AdjRec>| -> io::Result<()> {
            if n_pairs % BLOCK_SIZE as u64 == 0 {
                idx_out.write_all(&p.a.to_le_bytes())?;
                idx_out.write_all(&p.b.to_le_bytes())?;
            }
            p.encode(&mut buf);
            pairs_out.write_all(&buf)?;
            n_pairs += 1;
            mass += p.count as u64;
            adj.push(AdjRec {
                src: p.a,
                neg_count: std::cmp::Reverse(p.count),
                dst: p.b,
            })?;
            adj.push(AdjRec {
                src: p.b,
                neg_count: std::cmp::Reverse(p.count),
                dst: p.a,
            })
        };
        let mut current: Option<PairRec> = None;
        log::debug!("pair sort spilled {} runs", sorter.spilled_runs());
        for r in sorter.finish()? {
            let r = r?;
            let folded = current.as_mut().is_some_and(|acc| add_pair(acc, r));
            if !folded {
                if let Some(done) = current.replace(r) {
                    write_pair(done, &mut adj_sorter)?;
                }
            }
        }
        if let Some(done) = current {
            write_pair(done, &mut adj_sorter)?;
        }
        drop(write_pair);
        pairs_out.flush()?;
        idx_out.flush()?;

        let mut adj_out = BufWriter::new(File::create(staging.path().join("adj.bin"))?);
        let mut offsets = vec![0u64; tags.len() + 1];
        let mut written = 0u64;
        for r in adj_sorter.finish()? {
            let r = r?;
            offsets[r.src as usize + 1] += 1;
            adj_out.write_all(&r.dst.to_le_bytes())?;
            adj_out.write_all(&r.neg_count.0.to_le_bytes())?;
            written += 1;
        }
        adj_out.flush()?;
        debug_assert_eq!(written, 2 * n_pairs);
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let mut adj_idx = BufWriter::new(File::create(staging.path().join("adj.idx"))?);
        for o in &offsets {
            adj_idx.write_all(&o.to_le_bytes())?;
        }
        adj_idx.flush()?;

        fs::remove_dir_all(&spill_dir)?;
        fs::write(staging.path().join("tags.json"), serde_json::to_vec(&tags)?)?;
        let manifest = StoreManifest {
            format: STORE_FORMAT.to_owned(),
            version: STORE_VERSION,
            tags: tags.len() as u64,
            pairs: n_pairs,
            total_mass: mass,
            block_size: BLOCK_SIZE as u32,
        };
        fs::write(
            staging.path().join("manifest.json"),
            serde_json::to_vec_pretty(&manifest)?,
        )?;
        let dir = staging.commit()?;
        Self::open(&dir)
    }

    pub fn open(dir: &Path) -> Result<Self> {
        let invalid = |reason: &str| CooccurError::InvalidStore {
            path: dir.to_path_buf(),
            reason: reason.to_owned(),
        };
        let manifest: StoreManifest =
            serde_json::from_reader(BufReader::new(File::open(dir.join("manifest.json"))?))?;
        if manifest.format != STORE_FORMAT || manifest.version != STORE_VERSION {
            return Err(invalid("unsupported format or version"));
        }
        let tags: Vec<String> =
            serde_json::from_reader(BufReader::new(File::open(dir.join("tags.json"))?))?;
        if tags.len() as u64 != manifest.tags || tags.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("tag list inconsistent"));
        }
        let ids = tags
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();

        let mut raw = Vec::new();
        File::open(dir.join("pairs.idx"))?.read_to_end(&mut raw)?;
        let block_keys = raw
            .chunks_exact(8)
            .map(|c| (u32_at(c, 0), u32_at(c, 4)))
            .collect();
        raw.clear();
        File::open(dir.join("adj.idx"))?.read_to_end(&mut raw)?;
        let adj_offsets: Vec<u64> = raw.chunks_exact(8).map(|c| u64_at(c, 0)).collect();
        if adj_offsets.len() != tags.len() + 1 {
            return Err(invalid("adjacency index length"));
        }
        let pairs = RandomAccessFile::open(&dir.join("pairs.bin"))?;
        if pairs.len() != manifest.pairs * PairRec::SIZE as u64 {
            return Err(invalid("pairs.bin length"));
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest,
            tags,
            ids,
            block_keys,
            adj_offsets,
            pairs,
            adj: RandomAccessFile::open(&dir.join("adj.bin"))?,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn manifest(&self) -> &StoreManifest {
        &self.manifest
    }

    pub fn pair_count(&self) -> u64 {
        self.manifest.pairs
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.ids.contains_key(tag)
    }

    /// `C(a, b)`; zero when either tag is unknown or the pair never occurs.
    pub fn count(&self, a: &str, b: &str) -> Result<u32> {
        let (Some(&x), Some(&y)) = (self.ids.get(a), self.ids.get(b)) else {
            return Ok(0);
        };
        if x == y {
            return Ok(0);
        }
        let key = (x.min(y), x.max(y));
        // last block whose first key is <= key
        let block = match self.block_keys.partition_point(|k| *k <= key) {
            0 => return Ok(0),
            n => n - 1,
        };
        let first = block * BLOCK_SIZE;
        let n = BLOCK_SIZE.min(self.manifest.pairs as usize - first);
        let buf = self
            .pairs
            .read_vec((first * PairRec::SIZE) as u64, n * PairRec::SIZE)?;
        let recs: Vec<PairRec> = buf.chunks_exact(PairRec::SIZE).map(PairRec::decode).collect();
        Ok(recs
            .binary_search_by(|r| (r.a, r.b).cmp(&key))
            .map(|i| recs[i].count)
            .unwrap_or(0))
    }

    fn read_adjacency(&self, id: u32, k: usize) -> Result<Dictionary> {
        let lo = self.adj_offsets[id as usize];
        let hi = self.adj_offsets[id as usize + 1];
        let n = ((hi - lo) as usize).min(k);
        let buf = self.adj.read_vec(lo * 8, n * 8)?;
        Ok(buf
            .chunks_exact(8)
            .map(|c| (self.tags[u32_at(c, 0) as usize].clone(), u32_at(c, 4)))
            .collect())
    }

    /// Top-`k` co-occurring hashtags of `tag`. `None` when the tag is not in
    /// the store; `Some(vec![])` when it is known but never co-occurs.
    pub fn dictionary(&self, tag: &str, k: usize) -> Result<Option<Dictionary>> {
        match self.ids.get(tag) {
            None => Ok(None),
            Some(&id) => self.read_adjacency(id, k).map(Some),
        }
    }

    /// All neighbours of `tag` in dictionary order.
    pub fn neighbors(&self, tag: &str) -> Result<Option<Dictionary>> {
        self.dictionary(tag, usize::MAX)
    }

    pub fn degree(&self, tag: &str) -> Option<u64> {
        self.ids
            .get(tag)
            .map(|&i| self.adj_offsets[i as usize + 1] - self.adj_offsets[i as usize])
    }

    /// Streams every stored pair `(a, b, count)` with `a < b`, in key order.
    pub fn pairs(&self) -> Result<impl Iterator<Item = Result<(&str, &str, u32)>> + '_> {
        let mut reader = BufReader::new(File::open(self.dir.join("pairs.bin"))?);
        let mut buf = [0u8; PairRec::SIZE];
        Ok(std::iter::from_fn(move || match reader.read_exact(&mut buf) {
            Ok(()) => {
                let r = PairRec::decode(&buf);
                Some(Ok((
                    self.tags[r.a as usize].as_str(),
                    self.tags[r.b as usize].as_str(),
                    r.count,
                )))
            }
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => None,
            Err(e) => Some(Err(e.into())),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{IngestOptions, RawTweet};

    fn build(texts: &[&str], min_support: u32, spill: usize) -> (tempfile::TempDir, CooccurrenceStore) {
        let tmp = tempfile::tempdir().unwrap();
        let input = tmp.path().join("c.jsonl");
        let body: Vec<String> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| {
                serde_json::to_string(&RawTweet {
                    id: i as u64 + 1,
                    created_at: 0,
                    text: (*t).into(),
                })
                .unwrap()
            })
            .collect();
        fs::write(&input, body.join("\n")).unwrap();
        let idx = CorpusIndex::build(
            &input,
            &tmp.path().join("idx"),
            IngestOptions {
                min_support,
                ..Default::default()
            },
        )
        .unwrap();
        let store = CooccurrenceStore::build(
            &idx,
            &tmp.path().join("cooc"),
            BuildOptions {
                spill_threshold: spill,
                ..Default::default()
            },
        )
        .unwrap();
        (tmp, store)
    }

    #[test]
    fn single_tweet_triangle() {
        let (_t, s) = build(&["#a #b #c"], 1, 1000);
        assert_eq!(s.pair_count(), 3);
        for (x, y) in [("a", "b"), ("a", "c"), ("b", "c")] {
            assert_eq!(s.count(x, y).unwrap(), 1);
            assert_eq!(s.count(y, x).unwrap(), 1);
        }
    }

    #[test]
    fn repeated_hashtag_counts_once() {
        let (_t, s) = build(&["#a #A #b"], 1, 1000);
        assert_eq!(s.count("a", "b").unwrap(), 1);
        assert_eq!(s.count("a", "a").unwrap(), 0);
    }

    #[test]
    fn dictionary_order_and_presence() {
        let (_t, s) = build(
            &["#h #x #y", "#h #y", "#h #z", "#h #y #z", "#lonely"],
            1,
            2,
        );
        let d = s.dictionary("h", 10).unwrap().unwrap();
        assert_eq!(d, vec![("y".into(), 3), ("z".into(), 2), ("x".into(), 1)]);
        assert_eq!(s.dictionary("h", 1).unwrap().unwrap().len(), 1);
        assert_eq!(s.dictionary("lonely", 10).unwrap(), Some(vec![]));
        assert_eq!(s.dictionary("nope", 10).unwrap(), None);
        assert_eq!(s.dictionary("x", 10).unwrap().unwrap().len(), 2);
    }

    #[test]
    fn ties_break_by_name() {
        let (_t, s) = build(&["#h #c", "#h #a", "#h #b"], 1, 1000);
        let d = s.dictionary("h", 10).unwrap().unwrap();
        let names: Vec<&str> = d.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, vec!["a", "b", "c"]);
    }

    #[test]
    fn irrelevant_tags_excluded() {
        let (_t, s) = build(&["#a #b #rare", "#a #b", "#a #b"], 3, 1000);
        assert_eq!(s.tags(), &["a".to_string(), "b".to_string()]);
        assert_eq!(s.count("a", "b").unwrap(), 3);
        assert_eq!(s.count("a", "rare").unwrap(), 0);
    }

    #[test]
    fn empty_store() {
        let (_t, s) = build(&[], 3, 1000);
        assert_eq!(s.pair_count(), 0);
        assert_eq!(s.count("a", "b").unwrap(), 0);
        assert_eq!(s.pairs().unwrap().count(), 0);
    }
}
