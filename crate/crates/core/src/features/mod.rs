//! Binary features of one hashtag occurrence in a tweet.
//!
//! Feature names follow a closed set of templates (`δ` is a signed offset
//! such as `-2` or `+1`):
//!
//! ```text
//! win[δ]=<word>        shape[δ]=<shape>     pos[δ]=<tag>
//! geo[δ]=city|region|country|any|partial
//! hshape=<shape>       first_token          fifth=1..5
//! tail_all_hashtags    cooc=<hashtag>       cooc_geo=city|region|country|any|partial
//! win=<word>           (bag-of-words window instead of win[δ])
//! ```

pub mod gazetteer;
pub mod shape;
pub mod tagger;

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cooccur::{CooccurError, CooccurrenceStore};
use crate::corpus::Tweet;
use crate::tokenizer::{normalize_hashtag, tokenize, Token};

pub use gazetteer::{GeoKind, GeoMatch, Gazetteer};
pub use shape::{shape_of, shape_of_str, ShapeClass};
pub use tagger::TrigramTagger;

pub const DEFAULT_WINDOW: usize = 5;
pub const COOC_FEATURES: usize = 5;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("hashtag #{hashtag} does not occur in tweet {tweet}")]
    HashtagAbsent { hashtag: String, tweet: u64 },
    #[error(transparent)]
    Store(#[from] CooccurError),
}

pub type Result<T, E = FeatureError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    /// Tokens in the window including the hashtag itself.
    pub window: usize,
    /// Emit `win=<word>` instead of position-bound `win[δ]=<word>`.
    pub bag_window: bool,
    pub cooc_features: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            bag_window: false,
            cooc_features: COOC_FEATURES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub hashtag: String,
    pub tweet_id: u64,
    pub position: usize,
    pub active: BTreeSet<String>,
}

/// Everything feature extraction consults. The store and tagger are optional;
/// without them the `cooc*` and `pos` templates stay silent.
pub struct FeatureExtractor<'a> {
    pub store: Option<&'a CooccurrenceStore>,
    pub gazetteer: &'a Gazetteer,
    pub tagger: Option<&'a TrigramTagger>,
    pub config: FeatureConfig,
    cooc_cache: Mutex<HashMap<String, Vec<String>>>,
}

fn offset_label(d: isize) -> String {
    if d > 0 {
        format!("+{d}")
    } else {
        d.to_string()
    }
}

fn geo_values(m: &GeoMatch) -> Vec<&'static str> {
    let mut out: Vec<&'static str> = m.exact.iter().map(|k| k.name()).collect();
    if !m.exact.is_empty() {
        out.push("any");
    } else if m.partial {
        out.push("partial");
    }
    out
}

impl<'a> FeatureExtractor<'a> {
    pub fn new(
        store: Option<&'a CooccurrenceStore>,
        gazetteer: &'a Gazetteer,
        tagger: Option<&'a TrigramTagger>,
        config: FeatureConfig,
    ) -> Self {
        Self {
            store,
            gazetteer,
            tagger,
            config,
            cooc_cache: Mutex::new(HashMap::new()),
        }
    }

    fn cooccurring(&self, hashtag: &str) -> Result<Vec<String>> {
        let Some(store) = self.store else {
            return Ok(Vec::new());
        };
        if let Some(v) = self.cooc_cache.lock().unwrap().get(hashtag) {
            return Ok(v.clone());
        }
        let top: Vec<String> = store
            .dictionary(hashtag, self.config.cooc_features)?
            .unwrap_or_default()
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        self.cooc_cache
            .lock()
            .unwrap()
            .insert(hashtag.to_string(), top.clone());
        Ok(top)
    }

    /// Features for the first occurrence of `hashtag` in `tweet`.
    pub fn extract(&self, hashtag: &str, tweet: &Tweet) -> Result<FeatureVector> {
        let tokens = tokenize(&tweet.text);
        let h = normalize_hashtag(hashtag.trim_start_matches('#'));
        let position = tokens
            .iter()
            .position(|t| t.hashtag_name().as_deref() == Some(h.as_str()))
            .ok_or_else(|| FeatureError::HashtagAbsent {
                hashtag: h.clone(),
                tweet: tweet.id,
            })?;
        self.extract_at(&h, tweet.id, &tokens, position)
    }

    /// Features for the hashtag token at `position` of `tokens`.
    pub fn extract_at(&self, hashtag: &str, tweet_id: u64, tokens: &[Token], position: usize) -> Result<FeatureVector> {
        let mut active = BTreeSet::new();
        let n = tokens.len();
        let radius = (self.config.window.max(1) - 1) / 2;
        let tags = self.tagger.map(|tg| {
            let words: Vec<&str> = tokens.iter().map(|t| t.text.as_str()).collect();
            tg.tag(&words)
        });
        let lo = position.saturating_sub(radius);
        let hi = (position + radius).min(n - 1);
        for i in lo..=hi {
            if i == position {
                continue;
            }
            let d = offset_label(i as isize - position as isize);
            let tok = &tokens[i];
            let word = tok.text.to_lowercase();
            if self.config.bag_window {
                active.insert(format!("win={word}"));
            } else {
                active.insert(format!("win[{d}]={word}"));
            }
            active.insert(format!("shape[{d}]={}", shape_of(tok)));
            if let Some(tags) = &tags {
                active.insert(format!("pos[{d}]={}", tags[i]));
            }
            for v in geo_values(&self.gazetteer.lookup(&tok.text)) {
                active.insert(format!("geo[{d}]={v}"));
            }
        }
        let bare = tokens[position].text.trim_start_matches('#');
        active.insert(format!("hshape={}", shape_of_str(bare)));
        if position == 0 {
            active.insert("first_token".to_string());
        }
        active.insert(format!("fifth={}", 5 * position / n + 1));
        if tokens[position + 1..].iter().all(Token::is_hashtag) {
            active.insert("tail_all_hashtags".to_string());
        }
        for other in self.cooccurring(hashtag)? {
            for v in geo_values(&self.gazetteer.lookup(&other)) {
                active.insert(format!("cooc_geo={v}"));
            }
            active.insert(format!("cooc={other}"));
        }
        Ok(FeatureVector {
            hashtag: hashtag.to_string(),
            tweet_id,
            position,
            active,
        })
    }
}

/// Checks a feature name against the template grammar.
pub fn is_valid_feature(name: &str) -> bool {
    const GEO: [&str; 5] = ["city", "region", "country", "any", "partial"];
    let positional = |prefix: &str| -> Option<&str> {
        let (d, v) = name.strip_prefix(prefix)?.split_once("]=")?;
        let digits = d.strip_prefix('+').or_else(|| d.strip_prefix('-'))?;
        let valid = digits.bytes().all(|b| b.is_ascii_digit()) && digits.parse::<u32>().is_ok_and(|x| x > 0);
        valid.then_some(v)
    };
    if let Some(v) = positional("win[").or_else(|| name.strip_prefix("win=")) {
        return !v.is_empty();
    }
    if let Some(v) = positional("shape[").or_else(|| name.strip_prefix("hshape=")) {
        return ShapeClass::from_name(v).is_some();
    }
    if let Some(v) = positional("pos[") {
        return !v.is_empty();
    }
    if let Some(v) = positional("geo[").or_else(|| name.strip_prefix("cooc_geo=")) {
        return GEO.contains(&v);
    }
    if let Some(v) = name.strip_prefix("fifth=") {
        return matches!(v, "1" | "2" | "3" | "4" | "5");
    }
    if let Some(v) = name.strip_prefix("cooc=") {
        return !v.is_empty();
    }
    matches!(name, "first_token" | "tail_all_hashtags")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tweet(text: &str) -> Tweet {
        Tweet {
            id: 1,
            created_at: 0,
            text: text.to_string(),
            hashtags: Default::default(),
        }
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn paris_is_lovely() {
        let gaz = Gazetteer::from_names(vec!["Paris"], vec![], vec![]);
        let fx = FeatureExtractor::new(None, &gaz, None, FeatureConfig::default());
        let fv = fx.extract("paris", &tweet("#paris is lovely")).unwrap();
        assert_eq!(
            fv.active,
            set(&[
                "fifth=1",
                "first_token",
                "hshape=all-lower",
                "shape[+1]=all-lower",
                "shape[+2]=all-lower",
                "win[+1]=is",
                "win[+2]=lovely",
            ])
        );
    }

    #[test]
    fn position_features() {
        let gaz = Gazetteer::default();
        let fx = FeatureExtractor::new(None, &gaz, None, FeatureConfig::default());
        let fv = fx.extract("c", &tweet("a b #c d e")).unwrap();
        assert!(fv.active.contains("fifth=3"));
        assert!(!fv.active.contains("tail_all_hashtags"));
        assert!(!fv.active.contains("first_token"));
        let fv = fx.extract("END", &tweet("so here we go #end")).unwrap();
        assert!(fv.active.contains("tail_all_hashtags"));
        assert!(fv.active.contains("fifth=5"));
        let fv = fx.extract("x", &tweet("go #x #y #z")).unwrap();
        assert!(fv.active.contains("tail_all_hashtags"));
        assert!(matches!(
            fx.extract("nope", &tweet("nothing here")),
            Err(FeatureError::HashtagAbsent { .. })
        ));
    }

    #[test]
    fn window_truncates_and_excludes_hashtag() {
        let gaz = Gazetteer::from_names(vec!["Berlin"], vec!["Bavaria"], vec!["Germany"]);
        let fx = FeatureExtractor::new(None, &gaz, None, FeatureConfig::default());
        let fv = fx.extract("trip", &tweet("Berlin #trip Germany")).unwrap();
        assert!(fv.active.contains("geo[-1]=city"));
        assert!(fv.active.contains("geo[-1]=any"));
        assert!(fv.active.contains("geo[+1]=country"));
        assert!(fv.active.contains("shape[-1]=init-cap"));
        assert!(!fv.active.iter().any(|f| f.contains("[-2]") || f.contains("[+2]")));
        assert!(!fv.active.iter().any(|f| f.ends_with("=#trip")));
        assert!(fv.active.iter().all(|f| is_valid_feature(f)), "{:?}", fv.active);
    }

    #[test]
    fn bag_window() {
        let gaz = Gazetteer::default();
        let cfg = FeatureConfig {
            bag_window: true,
            ..Default::default()
        };
        let fx = FeatureExtractor::new(None, &gaz, None, cfg);
        let fv = fx.extract("x", &tweet("a #x b")).unwrap();
        assert!(fv.active.contains("win=a") && fv.active.contains("win=b"));
        assert!(!fv.active.iter().any(|f| f.starts_with("win[")));
    }

    #[test]
    fn grammar_rejects_strangers() {
        for bad in ["win[0]=x", "geo[+1]=town", "fifth=6", "hshape=weird", "cooc=", "other", "shape[+1]=x"] {
            assert!(!is_valid_feature(bad), "{bad}");
        }
    }
}
