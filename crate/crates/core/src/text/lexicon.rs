use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{normalize, to_phonemes, Dialect, Language, TextError, WordForm};

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("lexicon is empty")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub form: WordForm,
    pub frequency: u64,
    /// 1 = most frequent.
    pub rank: usize,
}

/// Frequency-ranked word list.
#[derive(Debug, Clone)]
pub struct Lexicon {
    language: Language,
    entries: Vec<LexiconEntry>,
    index: HashMap<String, usize>,
}

impl Lexicon {
    /// Build from (form, frequency) pairs. Ranks follow frequency descending;
    /// ties keep input order. Duplicate forms keep their first occurrence.
    pub fn from_counts(
        language: Language,
        counts: impl IntoIterator<Item = (WordForm, u64)>,
    ) -> Self {
        let mut seen = HashMap::new();
        let mut pairs = Vec::new();
        for (form, freq) in counts {
            if seen.insert(form.text().to_string(), ()).is_none() {
                pairs.push((form, freq));
            }
        }
        pairs.sort_by_key(|p| std::cmp::Reverse(p.1));
        let entries: Vec<LexiconEntry> = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (form, frequency))| LexiconEntry {
                form,
                frequency,
                rank: i + 1,
            })
            .collect();
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.form.text().to_string(), i))
            .collect();
        Self {
            language,
            entries,
            index,
        }
    }

    /// Parse the `form<TAB>frequency` format; `#` starts a comment line.
    pub fn parse_tsv(language: Language, source: &str) -> Result<Self, LexiconError> {
        let mut counts = Vec::new();
        for (i, raw) in source.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let malformed = |message: String| LexiconError::Malformed {
                line: i + 1,
                message,
            };
            let (form, freq) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected form<TAB>frequency".into()))?;
            let freq: u64 = freq
                .trim()
                .parse()
                .map_err(|e| malformed(format!("bad frequency {freq:?}: {e}")))?;
            let form = normalize(form, language).map_err(|e| malformed(e.to_string()))?;
            counts.push((form, freq));
        }
        if counts.is_empty() {
            return Err(LexiconError::Empty);
        }
        Ok(Self::from_counts(language, counts))
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, text: &str) -> bool {
        self.index.contains_key(text)
    }

    pub fn get(&self, text: &str) -> Option<&LexiconEntry> {
        self.index.get(text).map(|&i| &self.entries[i])
    }

    /// Phonemizations in rank order (Spanish only).
    pub fn phonemizations(&self, dialect: Dialect) -> Result<Vec<Vec<String>>, TextError> {
        self.entries
            .iter()
            .map(|e| to_phonemes(&e.form, dialect).map(|p| p.phonemes))
            .collect()
    }
}

fn hamming_one<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && a.iter().zip(b).filter(|(x, y)| x != y).count() == 1
}

/// Same-length lexicon words differing in exactly one letter, rank order.
pub fn orthographic_neighbors(word: &WordForm, lexicon: &Lexicon) -> Vec<WordForm> {
    let target = word.chars();
    lexicon
        .entries()
        .iter()
        .filter(|e| {
            let other: Vec<char> = e.form.text().chars().collect();
            hamming_one(&target, &other)
        })
        .map(|e| e.form.clone())
        .collect()
}

/// Lexicon words whose phonemizations have equal length and differ in
/// exactly one phoneme, rank order.
pub fn phonetic_neighbors(
    word: &WordForm,
    lexicon: &Lexicon,
    dialect: Dialect,
) -> Result<Vec<WordForm>, TextError> {
    let target = to_phonemes(word, dialect)?;
    let mut out = Vec::new();
    for e in lexicon.entries() {
        let p = to_phonemes(&e.form, dialect)?;
        if hamming_one(&target.phonemes, &p.phonemes) {
            out.push(e.form.clone());
        }
    }
    Ok(out)
}

/// Counts Hamming-distance-one neighbors in O(N·L) with wildcard keys:
/// every sequence is filed once per position under the sequence with that
/// position blanked out. Two sequences are neighbors iff they share a key.
#[derive(Debug, Default)]
pub struct NeighborCounter {
    symbols: HashMap<String, u32>,
    buckets: HashMap<Vec<u32>, u32>,
    members: HashSet<Vec<u32>>,
}

const BLANK: u32 = u32::MAX;
const UNSEEN: u32 = u32::MAX - 1;

impl NeighborCounter {
    pub fn new<'a, I, S>(sequences: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = &'a str>,
    {
        let mut counter = Self::default();
        for seq in sequences {
            let ids = counter.intern(seq);
            if !counter.members.insert(ids.clone()) {
                continue;
            }
            for key in Self::keys(&ids) {
                *counter.buckets.entry(key).or_default() += 1;
            }
        }
        counter
    }

    fn intern<'a>(&mut self, seq: impl IntoIterator<Item = &'a str>) -> Vec<u32> {
        seq.into_iter()
            .map(|s| {
                let next = self.symbols.len() as u32;
                *self.symbols.entry(s.to_string()).or_insert(next)
            })
            .collect()
    }

    fn keys(ids: &[u32]) -> impl Iterator<Item = Vec<u32>> + '_ {
        (0..ids.len()).map(move |pos| {
            let mut key = ids.to_vec();
            key[pos] = BLANK;
            key
        })
    }

    /// Number of indexed sequences at Hamming distance one from `seq`.
    /// `seq` itself is excluded; duplicate inputs are indexed once.
    pub fn count<'a>(&self, seq: impl IntoIterator<Item = &'a str>) -> usize {
        // Unseen symbols get a sentinel that never appears in a key, so only
        // the key blanking that position can match.
        let ids: Vec<u32> = seq
            .into_iter()
            .map(|s| self.symbols.get(s).copied().unwrap_or(UNSEEN))
            .collect();
        let indexed = self.contains_ids(&ids);
        Self::keys(&ids)
            .map(|k| {
                let n = self.buckets.get(&k).copied().unwrap_or(0) as usize;
                n - usize::from(indexed)
            })
            .sum()
    }

    fn contains_ids(&self, ids: &[u32]) -> bool {
        self.members.contains(ids)
    }
}
