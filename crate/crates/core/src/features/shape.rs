//! Coarse orthographic token shapes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::tokenizer::{Token, TokenKind};

/// Listed in precedence order: a token takes the first shape that applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ShapeClass {
    AtReply,
    Hashtag,
    Link,
    Number,
    Symbol,
    EndsIn4Digits,
    EndsIn3Digits,
    EndsIn2Digits,
    EndsIn1Digit,
    ContainsDigits,
    AllLower,
    AllUpper,
    InitCap,
    MixedCap,
}

impl ShapeClass {
    pub const ALL: [ShapeClass; 14] = [
        Self::AtReply,
        Self::Hashtag,
        Self::Link,
        Self::Number,
        Self::Symbol,
        Self::EndsIn4Digits,
        Self::EndsIn3Digits,
        Self::EndsIn2Digits,
        Self::EndsIn1Digit,
        Self::ContainsDigits,
        Self::AllLower,
        Self::AllUpper,
        Self::InitCap,
        Self::MixedCap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::AtReply => "at-reply",
            Self::Hashtag => "hashtag",
            Self::Link => "link",
            Self::Number => "number",
            Self::Symbol => "symbol",
            Self::EndsIn4Digits => "ends-in-4-digits",
            Self::EndsIn3Digits => "ends-in-3-digits",
            Self::EndsIn2Digits => "ends-in-2-digits",
            Self::EndsIn1Digit => "ends-in-1-digit",
            Self::ContainsDigits => "contains-digits",
            Self::AllLower => "all-lower",
            Self::AllUpper => "all-upper",
            Self::InitCap => "init-cap",
            Self::MixedCap => "mixed-cap",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for ShapeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn shape_of(token: &Token) -> ShapeClass {
    match token.kind {
        TokenKind::AtReply => ShapeClass::AtReply,
        TokenKind::Hashtag => ShapeClass::Hashtag,
        TokenKind::Url => ShapeClass::Link,
        TokenKind::NumberLike => ShapeClass::Number,
        TokenKind::Symbol | TokenKind::Smiley => ShapeClass::Symbol,
        TokenKind::Abbreviation | TokenKind::Word => word_shape(&token.text),
    }
}

/// Shape of a bare string, inferring the token kind from its prefix.
pub fn shape_of_str(s: &str) -> ShapeClass {
    let mut chars = s.chars();
    match chars.next() {
        Some('@') if chars.next().is_some() => ShapeClass::AtReply,
        Some('#') if chars.next().is_some() => ShapeClass::Hashtag,
        _ if s.starts_with("http://") || s.starts_with("https://") || s.starts_with("www.") => ShapeClass::Link,
        _ => word_shape(s),
    }
}

fn word_shape(s: &str) -> ShapeClass {
    if s.is_empty() || !s.chars().any(char::is_alphanumeric) {
        return ShapeClass::Symbol;
    }
    if s.chars().all(|c| c.is_numeric()) {
        return ShapeClass::Number;
    }
    let trailing = s.chars().rev().take_while(|c| c.is_ascii_digit()).count();
    match trailing {
        0 => {}
        1 => return ShapeClass::EndsIn1Digit,
        2 => return ShapeClass::EndsIn2Digits,
        3 => return ShapeClass::EndsIn3Digits,
        _ => return ShapeClass::EndsIn4Digits,
    }
    if s.chars().any(char::is_numeric) {
        return ShapeClass::ContainsDigits;
    }
    let cased: Vec<char> = s.chars().filter(|c| c.is_lowercase() || c.is_uppercase()).collect();
    if cased.iter().all(|c| c.is_lowercase()) {
        return ShapeClass::AllLower;
    }
    if cased.iter().all(|c| c.is_uppercase()) {
        return ShapeClass::AllUpper;
    }
    if cased[0].is_uppercase() && cased[1..].iter().all(|c| c.is_lowercase()) {
        return ShapeClass::InitCap;
    }
    ShapeClass::MixedCap
}
