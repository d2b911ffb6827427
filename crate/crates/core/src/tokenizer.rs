//! Tweet tokenizer.
//!
//! Tokens are found with a single alternation pattern rather than by
//! splitting at delimiters: a slash may separate words (`this/that`), mark an
//! abbreviation (`b/c`) or belong to a link. Branches are tried top to bottom
//! at every position and the first branch that matches wins:
//!
//! ```text
//! c/o|b/c|w/o|w/|\+/-                                   abbreviations, +/-
//! \d+(?:[.,:/-]\d+)+                                    numbers, fractions, dates
//! (?:[:;][-=]?|=)[Dp(|)][D()]*|<3+                      smileys
//! (?:https?://|www\.)[a-zA-Z0-9/.?=&\-#]*[a-zA-Z0-9/]   links
//! [#@]\w+                                               hashtags, @-replies
//! \w+(?:-\w+)*(?:'\w+)?                                 ordinary words
//! [$£€¥¢§@&#]                                           currency and symbols
//! ```
//!
//! `\w` means Unicode letters, Unicode numbers and underscore. Anything not
//! matched (whitespace, sentence punctuation, emoji) is skipped.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

/// Characters emitted as single [`TokenKind::Symbol`] tokens.
pub const SYMBOL_CHARS: &str = "$£€¥¢§@&#";

const WORD: &str = r"[\p{L}\p{N}_]";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TokenKind {
    Abbreviation,
    NumberLike,
    Smiley,
    Url,
    Hashtag,
    AtReply,
    Word,
    Symbol,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
    /// Code-point offset of the first character.
    pub start: usize,
    /// Code-point offset one past the last character.
    pub end: usize,
}

impl Token {
    pub fn span(&self) -> (usize, usize) {
        (self.start, self.end)
    }

    pub fn is_hashtag(&self) -> bool {
        self.kind == TokenKind::Hashtag
    }

    /// Lowercased hashtag name without the leading `#`.
    pub fn hashtag_name(&self) -> Option<String> {
        self.is_hashtag().then(|| normalize_hashtag(&self.text[1..]))
    }
}

static PATTERN: LazyLock<Regex> = LazyLock::new(|| {
    let symbols: String = SYMBOL_CHARS.chars().map(|c| regex::escape(&c.to_string())).collect();
    let pattern = format!(
        concat!(
            r"(?P<abbr>c/o|b/c|w/o|w/|\+/-)",
            r"|(?P<num>\d+(?:[.,:/-]\d+)+)",
            r"|(?P<smiley>(?:[:;][-=]?|=)[Dp(|)][D()]*|<3+)",
            r"|(?P<url>(?:https?://|www\.)[a-zA-Z0-9/.?=&\-#]*[a-zA-Z0-9/])",
            r"|(?P<tag>[#@]{w}+)",
            r"|(?P<word>{w}+(?:-{w}+)*(?:'{w}+)?)",
            r"|(?P<sym>[{sym}])"
        ),
        w = WORD,
        sym = symbols
    );
    Regex::new(&pattern).expect("tokenizer pattern compiles")
});

/// Splits `text` into tokens, in order of appearance.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    // byte offsets -> code-point offsets, advanced incrementally
    let mut byte_pos = 0;
    let mut char_pos = 0;
    for caps in PATTERN.captures_iter(text) {
        let m = caps.get(0).expect("group 0 always present");
        char_pos += text[byte_pos..m.start()].chars().count();
        let start = char_pos;
        char_pos += m.as_str().chars().count();
        byte_pos = m.end();

        let kind = if caps.name("abbr").is_some() {
            TokenKind::Abbreviation
        } else if caps.name("num").is_some() {
            TokenKind::NumberLike
        } else if caps.name("smiley").is_some() {
            TokenKind::Smiley
        } else if caps.name("url").is_some() {
            TokenKind::Url
        } else if caps.name("tag").is_some() {
            if m.as_str().starts_with('#') {
                TokenKind::Hashtag
            } else {
                TokenKind::AtReply
            }
        } else if caps.name("word").is_some() {
            TokenKind::Word
        } else {
            TokenKind::Symbol
        };
        tokens.push(Token {
            text: m.as_str().to_owned(),
            kind,
            start,
            end: char_pos,
        });
    }
    tokens
}

/// Case-folds a hashtag name. Hashtags are compared case-insensitively
/// throughout the corpus.
pub fn normalize_hashtag(name: &str) -> String {
    name.to_lowercase()
}

/// Normalized hashtag names in order of appearance, duplicates preserved.
pub fn extract_hashtags(text: &str) -> Vec<String> {
    tokenize(text)
        .iter()
        .filter_map(Token::hashtag_name)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<(String, TokenKind)> {
        tokenize(text).into_iter().map(|t| (t.text, t.kind)).collect()
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(extract_hashtags("no tags here").is_empty());
    }

    #[test]
    fn abbreviation_beats_word_split() {
        assert_eq!(kinds("b/c"), vec![("b/c".into(), TokenKind::Abbreviation)]);
        assert_eq!(kinds("+/-"), vec![("+/-".into(), TokenKind::Abbreviation)]);
    }

    #[test]
    fn url_beats_words() {
        assert_eq!(kinds("http://x.co"), vec![("http://x.co".into(), TokenKind::Url)]);
    }

    #[test]
    fn lone_digit_is_word() {
        assert_eq!(kinds("4"), vec![("4".into(), TokenKind::Word)]);
        assert_eq!(kinds("4/5")[0].1, TokenKind::NumberLike);
    }

    #[test]
    fn mixed_example() {
        use TokenKind::*;
        let got = kinds("b/c 12.5/3 <33 :-D");
        assert_eq!(
            got,
            vec![
                ("b/c".into(), Abbreviation),
                ("12.5/3".into(), NumberLike),
                ("<33".into(), Smiley),
                (":-D".into(), Smiley),
            ]
        );
    }

    #[test]
    fn hashtags_case_fold() {
        assert_eq!(extract_hashtags("#Jazz and #jazz"), vec!["jazz", "jazz"]);
        assert_eq!(extract_hashtags("#Schröder #GÖTEBORG"), vec!["schröder", "göteborg"]);
    }

    #[test]
    fn bare_hash_and_at_are_symbols() {
        use TokenKind::*;
        assert_eq!(kinds("# @"), vec![("#".into(), Symbol), ("@".into(), Symbol)]);
    }

    #[test]
    fn spans_are_code_points() {
        let toks = tokenize("ö #ä");
        assert_eq!(toks[0].span(), (0, 1));
        assert_eq!(toks[1].span(), (2, 4));
    }
}
