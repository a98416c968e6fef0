//! Rule-table grapheme-to-phoneme conversion for Spanish.
//!
//! Spanish spelling is close enough to one-to-one that an ordered rule list
//! covers it: at each position the first rule whose pattern and context
//! match is applied and the cursor advances past the pattern. The table is
//! the data file `data/g2p_es.txt`; its line grammar is documented there.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{Language, TextError, WordForm};

const G2P_ES: &str = include_str!("../../data/g2p_es.txt");

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    #[default]
    Castilian,
    Seseo,
}

impl FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "castilian" => Ok(Dialect::Castilian),
            "seseo" => Ok(Dialect::Seseo),
            other => Err(format!("unknown dialect {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhonemeString {
    pub phonemes: Vec<String>,
    pub dialect: Dialect,
}

impl PhonemeString {
    pub fn len(&self) -> usize {
        self.phonemes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phonemes.is_empty()
    }

    /// Joined symbols without slashes, e.g. `aθer`.
    pub fn joined(&self) -> String {
        self.phonemes.concat()
    }
}

impl fmt::Display for PhonemeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "/{}/", self.joined())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleContext {
    pub before: Option<Vec<char>>,
    pub after: Option<Vec<char>>,
    pub initial: bool,
    pub word_final: bool,
    pub dialect: Option<Dialect>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct G2pRule {
    pub pattern: Vec<char>,
    pub phonemes: Vec<String>,
    pub context: RuleContext,
}

impl G2pRule {
    fn matches(&self, word: &[char], at: usize, dialect: Dialect) -> bool {
        let end = at + self.pattern.len();
        if end > word.len() || word[at..end] != self.pattern[..] {
            return false;
        }
        let ctx = &self.context;
        if ctx.dialect.is_some_and(|d| d != dialect) {
            return false;
        }
        if ctx.initial && at != 0 {
            return false;
        }
        if ctx.word_final && end != word.len() {
            return false;
        }
        if let Some(set) = &ctx.before {
            match word.get(end) {
                Some(c) if set.contains(c) => {}
                _ => return false,
            }
        }
        if let Some(set) = &ctx.after {
            match at.checked_sub(1).map(|i| word[i]) {
                Some(c) if set.contains(&c) => {}
                _ => return false,
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTable {
    rules: Vec<G2pRule>,
}

impl RuleTable {
    /// Parse `pattern -> phonemes [context]` lines.
    pub fn parse(source: &str) -> Result<Self, String> {
        let mut rules = Vec::new();
        for (lineno, raw) in source.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| format!("line {}: {msg}: {raw:?}", lineno + 1);
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| err("missing `->`"))?;
            let pattern: Vec<char> = lhs.trim().chars().collect();
            if pattern.is_empty() {
                return Err(err("empty pattern"));
            }
            let (phon, ctx) = match rhs.split_once('[') {
                Some((p, c)) => {
                    let c = c.trim().strip_suffix(']').ok_or_else(|| err("unclosed `[`"))?;
                    (p, Some(c))
                }
                None => (rhs, None),
            };
            let phonemes: Vec<String> = phon
                .split_whitespace()
                .filter(|p| *p != "∅")
                .map(str::to_string)
                .collect();
            let mut context = RuleContext::default();
            for item in ctx.unwrap_or("").split_whitespace() {
                match item.split_once('=') {
                    Some(("before", v)) => context.before = Some(v.chars().collect()),
                    Some(("after", v)) => context.after = Some(v.chars().collect()),
                    Some(("dialect", v)) => {
                        context.dialect = Some(v.parse().map_err(|e: String| err(&e))?)
                    }
                    None if item == "initial" => context.initial = true,
                    None if item == "final" => context.word_final = true,
                    _ => return Err(err("unknown context")),
                }
            }
            rules.push(G2pRule {
                pattern,
                phonemes,
                context,
            });
        }
        Ok(Self { rules })
    }

    pub fn spanish() -> &'static RuleTable {
        static TABLE: OnceLock<RuleTable> = OnceLock::new();
        TABLE.get_or_init(|| RuleTable::parse(G2P_ES).expect("bundled rule table parses"))
    }

    pub fn rules(&self) -> &[G2pRule] {
        &self.rules
    }

    /// Every phoneme symbol the table can emit.
    pub fn inventory(&self) -> BTreeSet<&str> {
        self.rules
            .iter()
            .flat_map(|r| r.phonemes.iter().map(String::as_str))
            .collect()
    }

    pub fn transcribe(&self, text: &str, dialect: Dialect) -> Result<PhonemeString, TextError> {
        let word: Vec<char> = text.chars().collect();
        let mut phonemes = Vec::new();
        let mut at = 0;
        while at < word.len() {
            let rule = self
                .rules
                .iter()
                .find(|r| r.matches(&word, at, dialect))
                .ok_or_else(|| TextError::ForeignLetter {
                    word: text.to_string(),
                    letter: word[at],
                    language: Language::Es,
                })?;
            phonemes.extend(rule.phonemes.iter().cloned());
            at += rule.pattern.len();
        }
        Ok(PhonemeString { phonemes, dialect })
    }
}

pub fn to_phonemes(word: &WordForm, dialect: Dialect) -> Result<PhonemeString, TextError> {
    match word.language() {
        Language::Es => RuleTable::spanish().transcribe(word.text(), dialect),
        other => Err(TextError::UnsupportedLanguage(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::normalize;

    fn es(w: &str, d: Dialect) -> String {
        to_phonemes(&normalize(w, Language::Es).unwrap(), d)
            .unwrap()
            .joined()
    }

    // Expected values below were produced by hand-walking the rule table.
    #[test]
    fn rule_table_examples() {
        assert_eq!(es("hacer", Dialect::Castilian), "aθer");
        assert_eq!(es("queso", Dialect::Castilian), "keso");
        assert_eq!(es("hacer", Dialect::Seseo), "aser");
        assert_eq!(es("vaso", Dialect::Castilian), "baso");
        assert_eq!(es("beso", Dialect::Castilian), "beso");
    }

    #[test]
    fn silent_letters_and_digraphs() {
        assert_eq!(es("guerra", Dialect::Castilian), "gerra");
        assert_eq!(es("pingüino", Dialect::Castilian), "pingwino");
        assert_eq!(es("chico", Dialect::Castilian), "tʃiko");
        assert_eq!(es("lluvia", Dialect::Castilian), "ʝubia");
        assert_eq!(es("rosa", Dialect::Castilian), "rrosa");
        assert_eq!(es("honra", Dialect::Castilian), "onrra");
        assert_eq!(es("gente", Dialect::Castilian), "xente");
        assert_eq!(es("zapato", Dialect::Seseo), "sapato");
        assert_eq!(es("niño", Dialect::Castilian), "niɲo");
        assert_eq!(es("hoy", Dialect::Castilian), "oi");
        assert_eq!(es("hielo", Dialect::Castilian), "ʝelo");
        assert_eq!(es("taxi", Dialect::Castilian), "taksi");
    }

    #[test]
    fn english_is_unsupported() {
        let w = normalize("house", Language::En).unwrap();
        assert_eq!(
            to_phonemes(&w, Dialect::Castilian),
            Err(TextError::UnsupportedLanguage(Language::En))
        );
    }

    #[test]
    fn emitted_symbols_come_from_inventory() {
        let table = RuleTable::spanish();
        let inv = table.inventory();
        let p = table.transcribe("pingüinoschicharrón", Dialect::Castilian).unwrap();
        assert!(p.phonemes.iter().all(|s| inv.contains(s.as_str())));
    }

    #[test]
    fn parse_errors_report_line() {
        let err = RuleTable::parse("a -> a\nb => b").unwrap_err();
        assert!(err.starts_with("line 2"), "{err}");
        assert!(RuleTable::parse("c -> k [nearby=e]").is_err());
    }
}
