//! Word representation: normalization, grapheme clusters, Spanish
//! grapheme-to-phoneme rules, frequency lexicons and neighbor queries.

mod affixes;
mod g2p;
mod graphemes;
mod lexicon;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

pub use affixes::{Affix, AffixInventory, AffixKind, MIN_STEM};
pub use g2p::{to_phonemes, Dialect, G2pRule, PhonemeString, RuleContext, RuleTable};
pub use graphemes::{segment_graphemes, Cluster, GraphemeClusterInventory};
pub use lexicon::{
    orthographic_neighbors, phonetic_neighbors, Lexicon, LexiconEntry, LexiconError,
    NeighborCounter,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TextError {
    #[error("no letters left after normalizing {0:?}")]
    EmptyAfterNormalization(String),
    #[error("letter {letter:?} in {word:?} is not part of the {language} alphabet")]
    ForeignLetter {
        word: String,
        letter: char,
        language: Language,
    },
    #[error("unsupported language {0} for this operation")]
    UnsupportedLanguage(Language),
    #[error("unknown language tag {0:?}")]
    UnknownLanguage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Es,
    En,
}

impl Language {
    pub fn tag(self) -> &'static str {
        match self {
            Language::Es => "es",
            Language::En => "en",
        }
    }

    pub fn is_letter(self, c: char) -> bool {
        match self {
            Language::En => c.is_ascii_lowercase(),
            Language::Es => c.is_ascii_lowercase() || "ñáéíóúü".contains(c),
        }
    }

    /// Plain letters offered as last-resort distractors.
    pub fn alphabet(self) -> &'static [&'static str] {
        const EN: &[&str] = &[
            "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n", "o", "p", "q",
            "r", "s", "t", "u", "v", "w", "x", "y", "z",
        ];
        const ES: &[&str] = &[
            "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n", "ñ", "o", "p",
            "q", "r", "s", "t", "u", "v", "w", "x", "y", "z",
        ];
        match self {
            Language::Es => ES,
            Language::En => EN,
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Language {
    type Err = TextError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "es" | "spa" | "spanish" => Ok(Language::Es),
            "en" | "eng" | "english" => Ok(Language::En),
            other => Err(TextError::UnknownLanguage(other.to_string())),
        }
    }
}

/// A normalized single word: NFC, lowercase, letters of its language only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WordForm {
    text: String,
    language: Language,
}

impl WordForm {
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn language(&self) -> Language {
        self.language
    }

    /// Number of letters (Unicode scalar values after NFC).
    pub fn len(&self) -> usize {
        self.text.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn chars(&self) -> Vec<char> {
        self.text.chars().collect()
    }
}

impl fmt::Display for WordForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl AsRef<str> for WordForm {
    fn as_ref(&self) -> &str {
        &self.text
    }
}

/// NFC-normalize, lowercase and strip everything that is not a letter.
///
/// Digits and punctuation are dropped silently; a remaining letter outside
/// the language alphabet (say `ç` in Spanish) is an error.
pub fn normalize(raw: &str, language: Language) -> Result<WordForm, TextError> {
    let text = normalize_text(raw);
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        if language.is_letter(c) {
            out.push(c);
        } else if c.is_alphabetic() {
            return Err(TextError::ForeignLetter {
                word: raw.to_string(),
                letter: c,
                language,
            });
        }
    }
    if out.is_empty() {
        return Err(TextError::EmptyAfterNormalization(raw.to_string()));
    }
    Ok(WordForm {
        text: out,
        language,
    })
}

/// NFC + lowercase without alphabet filtering. Used for raw corpus lines.
pub fn normalize_text(raw: &str) -> String {
    raw.nfc().collect::<String>().to_lowercase().nfc().collect()
}

/// Split a line into normalized word tokens, discarding tokens with no letters.
pub fn tokenize(line: &str, language: Language) -> Vec<String> {
    line.split_whitespace()
        .filter_map(|tok| normalize(tok, language).ok())
        .map(|w| w.text)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize("Árbol", Language::Es).unwrap().text(), "árbol");
        assert_eq!(normalize("casa.", Language::Es).unwrap().text(), "casa");
        assert_eq!(
            normalize("123", Language::Es),
            Err(TextError::EmptyAfterNormalization("123".into()))
        );
    }

    #[test]
    fn normalize_composes_decomposed_accents() {
        let decomposed = "a\u{301}rbol";
        assert_eq!(normalize(decomposed, Language::Es).unwrap().text(), "árbol");
        assert_eq!(normalize("ÑANDÚ", Language::Es).unwrap().text(), "ñandú");
    }

    #[test]
    fn foreign_letters_rejected() {
        assert!(matches!(
            normalize("garçon", Language::Es),
            Err(TextError::ForeignLetter { letter: 'ç', .. })
        ));
        assert!(normalize("niño", Language::En).is_err());
    }

    #[test]
    fn tokenize_drops_punctuation_only_tokens() {
        assert_eq!(
            tokenize("El sol , brilla.", Language::Es),
            vec!["el", "sol", "brilla"]
        );
    }

    #[test]
    fn language_tags_parse() {
        assert_eq!("ES".parse::<Language>().unwrap(), Language::Es);
        assert_eq!("en".parse::<Language>().unwrap(), Language::En);
        assert!("ca".parse::<Language>().is_err());
    }
}
