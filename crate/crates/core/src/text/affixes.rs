use serde::{Deserialize, Serialize};

use super::Language;

const AFFIXES_ES: &str = include_str!("../../data/affixes_es.txt");
const AFFIXES_EN: &str = include_str!("../../data/affixes_en.txt");

/// Shortest stem left behind when stripping affixes.
pub const MIN_STEM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AffixKind {
    Prefix,
    Suffix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Affix {
    pub kind: AffixKind,
    pub text: String,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffixInventory {
    language: Language,
    affixes: Vec<Affix>,
}

impl AffixInventory {
    /// Parse `kind<TAB>affix<TAB>category` lines.
    pub fn parse(language: Language, source: &str) -> Result<Self, String> {
        let mut affixes = Vec::new();
        for (i, line) in source.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [kind, text, category] = cols[..] else {
                return Err(format!("line {}: expected three tab-separated columns", i + 1));
            };
            let kind = match kind {
                "prefix" => AffixKind::Prefix,
                "suffix" => AffixKind::Suffix,
                other => return Err(format!("line {}: unknown affix kind {other:?}", i + 1)),
            };
            affixes.push(Affix {
                kind,
                text: text.to_string(),
                category: category.to_string(),
            });
        }
        Ok(Self { language, affixes })
    }

    pub fn builtin(language: Language) -> Self {
        let src = match language {
            Language::Es => AFFIXES_ES,
            Language::En => AFFIXES_EN,
        };
        Self::parse(language, src).expect("bundled affix inventory parses")
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn suffixes(&self) -> impl Iterator<Item = &Affix> {
        self.affixes.iter().filter(|a| a.kind == AffixKind::Suffix)
    }

    pub fn prefixes(&self) -> impl Iterator<Item = &Affix> {
        self.affixes.iter().filter(|a| a.kind == AffixKind::Prefix)
    }

    pub fn suffix(&self, text: &str) -> Option<&Affix> {
        self.suffixes().find(|a| a.text == text)
    }

    pub fn is_suffix(&self, text: &str) -> bool {
        self.suffix(text).is_some()
    }

    pub fn is_prefix(&self, text: &str) -> bool {
        self.prefixes().any(|a| a.text == text)
    }

    /// Longest inventory suffix of `word` that leaves at least [`MIN_STEM`]
    /// letters.
    pub fn longest_suffix(&self, word: &str) -> Option<&Affix> {
        let n = word.chars().count();
        self.suffixes()
            .filter(|a| {
                let k = a.text.chars().count();
                n >= k + MIN_STEM && word.ends_with(a.text.as_str())
            })
            .max_by_key(|a| a.text.chars().count())
    }

    /// Number of suffixes removed by repeatedly stripping the longest match.
    pub fn morph_complexity(&self, word: &str) -> usize {
        let mut rest = word.to_string();
        let mut count = 0;
        while let Some(a) = self.longest_suffix(&rest) {
            let keep = rest.chars().count() - a.text.chars().count();
            rest = rest.chars().take(keep).collect();
            count += 1;
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_inventories_parse() {
        let es = AffixInventory::builtin(Language::Es);
        assert!(es.is_suffix("ción"));
        assert!(es.is_suffix("mente"));
        assert!(es.is_prefix("des"));
        let en = AffixInventory::builtin(Language::En);
        assert!(en.is_suffix("ing") && en.is_suffix("ment"));
    }

    #[test]
    fn morph_complexity_strips_iteratively() {
        let es = AffixInventory::builtin(Language::Es);
        // rápidamente -> rápida (mente) -> ráp (ida)
        assert_eq!(es.morph_complexity("rápidamente"), 2);
        assert_eq!(es.morph_complexity("sol"), 0);
        assert_eq!(es.morph_complexity("cantar"), 1);
        // "ar" would leave a two-letter stem
        assert_eq!(es.morph_complexity("mar"), 0);
    }

    #[test]
    fn malformed_lines_rejected() {
        assert!(AffixInventory::parse(Language::Es, "suffix\tción").is_err());
        assert!(AffixInventory::parse(Language::Es, "infix\tx\ty").is_err());
    }
}
