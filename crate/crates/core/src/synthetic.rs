//! Seeded synthetic corpora and taxonomies for tests, benchmarks and
//! acceptance runs.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::classifier::{GoldLabels, HashtagClass};
use crate::corpus::RawTweet;
use crate::seeding::item_rng;
use crate::taxonomy::SynsetRecord;

const EPOCH_2009: i64 = 1_230_768_000;
const FILLER: &[&str] = &[
    "the", "a", "is", "on", "at", "so", "and", "my", "this", "now", "just", "with", "for", "it", "new", "today",
];

fn word<R: Rng>(rng: &mut R, min: usize, max: usize) -> String {
    const SYL: &[&str] = &[
        "ka", "lo", "mi", "ra", "te", "su", "no", "vi", "da", "pe", "zo", "ri", "ba", "go", "ne", "tu", "sa", "ly",
    ];
    let n = rng.gen_range(min..=max);
    (0..n).map(|_| *SYL.choose(rng).unwrap()).collect()
}

fn distinct_words<R: Rng>(rng: &mut R, n: usize, taken: &mut std::collections::HashSet<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w = word(rng, 2, 4);
        if taken.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

/// Tweets whose hashtags are drawn with Zipf-like popularity from
/// `n_hashtags` names. Hashtags are whitespace-separated `#name` tokens with
/// random capitalization, occasionally repeated within a tweet.
pub fn random_corpus(seed: u64, n_tweets: usize, n_hashtags: usize) -> Vec<RawTweet> {
    let mut rng = item_rng(seed, 0x636f_7270, 0);
    let names: Vec<String> = (0..n_hashtags).map(|i| format!("h{i}{}", word(&mut rng, 1, 2))).collect();
    let weights: Vec<f64> = (0..n_hashtags).map(|i| 1.0 / (i as f64 + 1.0).powf(0.9)).collect();
    let total: f64 = weights.iter().sum();
    let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
        let mut x = rng.gen::<f64>() * total;
        for (i, w) in weights.iter().enumerate() {
            x -= w;
            if x <= 0.0 {
                return i;
            }
        }
        n_hashtags - 1
    };
    (0..n_tweets)
        .map(|i| {
            let mut parts: Vec<String> = (0..rng.gen_range(1..6))
                .map(|_| FILLER.choose(&mut rng).unwrap().to_string())
                .collect();
            let k = if n_hashtags == 0 { 0 } else { rng.gen_range(0..5) };
            for _ in 0..k {
                let name = &names[pick(&mut rng)];
                let shown = if rng.gen_bool(0.2) { name.to_uppercase() } else { name.clone() };
                let pos = rng.gen_range(0..=parts.len());
                parts.insert(pos, format!("#{shown}"));
            }
            RawTweet {
                id: 1_000_000 + i as u64 * 7,
                created_at: EPOCH_2009 + rng.gen_range(0..365 * 86_400),
                text: parts.join(" "),
            }
        })
        .collect()
}

/// Corpus with `classes x per_class` hashtags, each class owning a context
/// vocabulary. Returns the tweets and the gold labels.
pub fn planted_class_corpus(seed: u64, per_class: usize, tweets_per_tag: usize) -> (Vec<RawTweet>, GoldLabels) {
    let mut rng = item_rng(seed, 0x706c_616e, 0);
    let mut taken = std::collections::HashSet::new();
    let mut gold = BTreeMap::new();
    let mut tags_by_class = Vec::new();
    let mut vocab_by_class = Vec::new();
    for class in HashtagClass::ALL {
        let tags = distinct_words(&mut rng, per_class, &mut taken);
        for t in &tags {
            gold.insert(t.clone(), class);
        }
        tags_by_class.push(tags);
        vocab_by_class.push(distinct_words(&mut rng, 12, &mut taken));
    }
    let shared = distinct_words(&mut rng, 30, &mut taken);
    let mut tweets = Vec::new();
    let mut id = 5_000_000u64;
    for (c, tags) in tags_by_class.iter().enumerate() {
        for tag in tags {
            for _ in 0..tweets_per_tag {
                let mut parts: Vec<String> = Vec::new();
                for _ in 0..rng.gen_range(2..5) {
                    let pool = if rng.gen_bool(0.6) { &vocab_by_class[c] } else { &shared };
                    parts.push(pool.choose(&mut rng).unwrap().clone());
                }
                let pos = rng.gen_range(0..=parts.len());
                parts.insert(pos, format!("#{tag}"));
                if rng.gen_bool(0.3) {
                    let other = tags.choose(&mut rng).unwrap();
                    if other != tag {
                        parts.push(format!("#{other}"));
                    }
                }
                tweets.push(RawTweet {
                    id,
                    created_at: EPOCH_2009 + (id % 100_000) as i64 * 60,
                    text: parts.join(" "),
                });
                id += 1;
            }
        }
    }
    tweets.shuffle(&mut rng);
    (tweets, GoldLabels { labels: gold })
}

/// A taxonomy and corpus in which every tweet's hashtags are lemmas of
/// sibling synsets. Hashtag synsets sit in a four-level tree under one root;
/// a second root carries a larger tree of lemmas that never occur as
/// hashtags.
pub fn sibling_fixture(seed: u64) -> (Vec<RawTweet>, Vec<SynsetRecord>) {
    let mut rng = item_rng(seed, 0x7369_626c, 0);
    let mut taken = std::collections::HashSet::new();
    let rec = |id: String, lemmas: Vec<String>, hyper: Vec<String>| SynsetRecord {
        id,
        lemmas,
        hypernyms: hyper,
    };
    let mut records = vec![rec("root".into(), vec!["entity".into()], vec![])];
    let mut groups: Vec<Vec<String>> = Vec::new();
    for d in 0..4 {
        let domain = format!("d{d}");
        records.push(rec(domain.clone(), distinct_words(&mut rng, 1, &mut taken), vec!["root".into()]));
        for g in 0..4 {
            let group = format!("d{d}g{g}");
            records.push(rec(group.clone(), distinct_words(&mut rng, 1, &mut taken), vec![domain.clone()]));
            let leaves = distinct_words(&mut rng, 5, &mut taken);
            for (i, l) in leaves.iter().enumerate() {
                records.push(rec(format!("{group}l{i}"), vec![l.clone()], vec![group.clone()]));
            }
            groups.push(leaves);
        }
    }
    // unrelated lemmas: a deep second tree
    records.push(rec("other".into(), vec!["abstraction".into()], vec![]));
    let mut frontier = vec!["other".to_string()];
    for level in 0..5 {
        let mut next = Vec::new();
        for parent in &frontier {
            for k in 0..3 {
                let id = format!("{parent}.{level}{k}");
                records.push(rec(id.clone(), distinct_words(&mut rng, 1, &mut taken), vec![parent.clone()]));
                next.push(id);
            }
        }
        frontier = next;
    }

    let mut tweets = Vec::new();
    let mut id = 9_000_000u64;
    for _ in 0..1500 {
        let group = groups.choose(&mut rng).unwrap();
        let k = rng.gen_range(2..=3);
        let chosen: Vec<&String> = group.choose_multiple(&mut rng, k).collect();
        let mut parts: Vec<String> = (0..rng.gen_range(1..4))
            .map(|_| FILLER.choose(&mut rng).unwrap().to_string())
            .collect();
        parts.extend(chosen.iter().map(|t| format!("#{t}")));
        tweets.push(RawTweet {
            id,
            created_at: EPOCH_2009 + (id % 50_000) as i64 * 300,
            text: parts.join(" "),
        });
        id += 1;
    }
    (tweets, records)
}

pub fn to_jsonl(tweets: &[RawTweet]) -> String {
    let mut out = String::new();
    for t in tweets {
        out.push_str(&serde_json::to_string(t).expect("tweet serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_corpus(3, 50, 20), random_corpus(3, 50, 20));
        let (a, ga) = planted_class_corpus(1, 4, 3);
        let (b, gb) = planted_class_corpus(1, 4, 3);
        assert_eq!(a, b);
        assert_eq!(ga, gb);
        assert_eq!(ga.len(), 20);
        assert_eq!(a.len(), 60);
        let (t, r) = sibling_fixture(2);
        assert_eq!(t.len(), 1500);
        assert!(crate::taxonomy::Taxonomy::from_records(r).is_ok());
    }
}
