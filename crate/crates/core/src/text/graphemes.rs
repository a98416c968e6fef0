use serde::{Deserialize, Serialize};

use super::{Language, WordForm};

const CLUSTERS_ES: &str = include_str!("../../data/clusters_es.txt");
const CLUSTERS_EN: &str = include_str!("../../data/clusters_en.txt");

/// Multi-letter grapheme clusters for one language, longest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphemeClusterInventory {
    language: Language,
    clusters: Vec<String>,
}

/// A cluster with its letter span inside the segmented word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub text: String,
    pub start: usize,
    pub len: usize,
}

impl Cluster {
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

impl GraphemeClusterInventory {
    /// Build from explicit clusters. Single letters are ignored since they
    /// are always the fallback unit.
    pub fn new(language: Language, clusters: impl IntoIterator<Item = String>) -> Self {
        let mut clusters: Vec<String> = clusters
            .into_iter()
            .filter(|c| c.chars().count() >= 2)
            .collect();
        clusters.sort_by(|a, b| {
            b.chars()
                .count()
                .cmp(&a.chars().count())
                .then_with(|| a.cmp(b))
        });
        clusters.dedup();
        Self { language, clusters }
    }

    /// Parse the one-cluster-per-line format (`#` comments).
    pub fn parse(language: Language, source: &str) -> Self {
        Self::new(
            language,
            source
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string),
        )
    }

    pub fn builtin(language: Language) -> Self {
        match language {
            Language::Es => Self::parse(language, CLUSTERS_ES),
            Language::En => Self::parse(language, CLUSTERS_EN),
        }
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn clusters(&self) -> &[String] {
        &self.clusters
    }

    /// Longest-match, left-to-right segmentation of arbitrary text.
    pub fn segment(&self, text: &str) -> Vec<Cluster> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let hit = self.clusters.iter().find(|c| {
                let n = c.chars().count();
                i + n <= chars.len() && c.chars().eq(chars[i..i + n].iter().copied())
            });
            let len = hit.map_or(1, |c| c.chars().count());
            out.push(Cluster {
                text: chars[i..i + len].iter().collect(),
                start: i,
                len,
            });
            i += len;
        }
        out
    }
}

pub fn segment_graphemes(word: &WordForm, inventory: &GraphemeClusterInventory) -> Vec<String> {
    inventory
        .segment(word.text())
        .into_iter()
        .map(|c| c.text)
        .collect()
}
