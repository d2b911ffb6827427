use std::path::PathBuf;
use std::sync::LazyLock;

use htx_core::corpus::Tweet;
use htx_core::features::gazetteer::GeoKind;
use htx_core::features::tagger::TaggedSentence;
use htx_core::features::{is_valid_feature, FeatureConfig, FeatureExtractor, Gazetteer, TrigramTagger};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn random_corpus(rng: &mut ChaCha8Rng, n_tags: usize, vocab: usize) -> Vec<TaggedSentence> {
    (0..rng.gen_range(8..30))
        .map(|_| {
            (0..rng.gen_range(1..7))
                .map(|_| {
                    let w = rng.gen_range(0..vocab);
                    // words lean towards a tag but are ambiguous
                    let t = if rng.gen_bool(0.7) { w % n_tags } else { rng.gen_range(0..n_tags) };
                    let word = if rng.gen_bool(0.2) { format!("W{w}x") } else { format!("w{w}ing") };
                    (word, format!("T{t}"))
                })
                .collect()
        })
        .collect()
}

#[test]
fn viterbi_matches_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..40 {
        let n_tags = rng.gen_range(2..=4);
        let tagger = TrigramTagger::train(&random_corpus(&mut rng, n_tags, 9)).unwrap();
        let m = tagger.tags().len() as u32;
        for _ in 0..5 {
            let len = rng.gen_range(1..=5);
            let words: Vec<String> = (0..len)
                .map(|_| match rng.gen_range(0..3) {
                    0 => format!("unseen{}ing", rng.gen_range(0..5)),
                    _ => format!("w{}ing", rng.gen_range(0..9)),
                })
                .collect();
            let refs: Vec<&str> = words.iter().map(String::as_str).collect();
            let mut best = f64::NEG_INFINITY;
            let mut seq = vec![0u32; len];
            'outer: loop {
                best = best.max(tagger.log_score(&refs, &seq));
                for slot in seq.iter_mut() {
                    *slot += 1;
                    if *slot < m {
                        continue 'outer;
                    }
                    *slot = 0;
                }
                break;
            }
            let decoded = tagger.tag_indices(&refs);
            let got = tagger.log_score(&refs, &decoded);
            assert!(
                (got - best).abs() <= 1e-9 * best.abs().max(1.0) || got == best,
                "{refs:?}: viterbi {got} vs exhaustive {best}"
            );
        }
    }
}

#[test]
fn toy_corpus_reproduces_reference_tagging() {
    let tagger = TrigramTagger::train_file(&fixtures().join("tagged/toy.txt")).unwrap();
    assert_eq!(
        tagger.tag(&["Will", "make", "more", "4", "u"]),
        vec!["MD", "VB", "JJR", "CD", "NN"]
    );
}

#[test]
fn geonames_fixture() {
    let g = Gazetteer::from_geonames(&fixtures().join("geonames")).unwrap();
    assert_eq!(g.stats.cities, 6, "Tinyville is below the population floor");
    assert_eq!(g.stats.regions, 5);
    assert_eq!(g.stats.countries, 5);
    assert!(g.contains(GeoKind::City, "göteborg"));
    assert!(g.contains(GeoKind::City, "Parigi"));
    assert!(g.contains(GeoKind::Country, "sverige"));
    assert!(g.contains(GeoKind::Country, "UK"));
    assert!(g.contains(GeoKind::Region, "cali"));
    assert!(!g.contains(GeoKind::City, "tinyville"));
    assert!(!g.contains(GeoKind::Country, "75001"));
    assert!(!g.contains(GeoKind::Country, "https://en.wikipedia.org/wiki/germany"));
    assert!(g.lookup("york").partial);
    let back = Gazetteer::from_json(&g.to_json().unwrap()).unwrap();
    assert_eq!(back, g);
}

fn tweet_text() -> impl Strategy<Value = String> {
    let token = prop_oneof![
        "[a-zA-Z]{1,8}",
        "[A-Z][a-z]{2,6}[0-9]{0,5}",
        "#[a-z]{1,6}",
        "@[a-z]{1,6}",
        Just("http://t.co/x1".to_string()),
        Just(":-)".to_string()),
        Just("$".to_string()),
        Just("paris".to_string()),
        Just("12.5".to_string()),
        "[0-9]{1,4}",
    ];
    prop::collection::vec(token, 1..14).prop_map(|v| v.join(" "))
}

static TOY_TAGGER: LazyLock<TrigramTagger> =
    LazyLock::new(|| TrigramTagger::train_file(&fixtures().join("tagged/toy.txt")).unwrap());

proptest! {
    #[test]
    fn every_feature_parses(text in tweet_text(), pick in 0usize..100, bag in any::<bool>()) {
        let tagger = &*TOY_TAGGER;
        let gaz = Gazetteer::from_names(vec!["Paris", "New York"], vec!["Colorado"], vec!["France"]);
        let cfg = FeatureConfig { bag_window: bag, ..Default::default() };
        let fx = FeatureExtractor::new(None, &gaz, Some(tagger), cfg);
        let tweet = Tweet { id: 9, created_at: 0, text: format!("{text} #pick"), hashtags: Default::default() };
        let tokens = htx_core::tokenizer::tokenize(&tweet.text);
        let tags: Vec<usize> = tokens.iter().enumerate().filter(|(_, t)| t.is_hashtag()).map(|(i, _)| i).collect();
        let pos = tags[pick % tags.len()];
        let name = tokens[pos].hashtag_name().unwrap();
        let fv = fx.extract_at(&name, tweet.id, &tokens, pos).unwrap();
        for f in &fv.active {
            prop_assert!(is_valid_feature(f), "{}", f);
        }
        let again = fx.extract_at(&name, tweet.id, &tokens, pos).unwrap();
        prop_assert_eq!(fv, again);
    }
}
