//! Contextual error patterns and grapheme confusion matrices aggregated
//! from classified corpus errors.
//!
//! Each error instance becomes one pattern occurrence keyed by
//! `(type, focus, written, left, right)`: the focus is the span of grapheme
//! clusters the error touched in the correct word, `written` is what the
//! writer produced for that span, and the contexts are the neighboring
//! clusters (or the word edge). Boundary patterns keep the whole word group;
//! morphology patterns keep the affix pair.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{ErrorAnnotation, ErrorInstance, ErrorType};
use crate::text::{Cluster, GraphemeClusterInventory, Language, WordForm};

pub const BANK_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum PatternError {
    #[error("pattern bank version {0} is not supported")]
    UnsupportedVersion(u32),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Neighbor condition on one side of a pattern focus.
///
/// Serialized as `#` (word edge), `*` (anything) or the cluster text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", from = "String")]
pub enum Context {
    Boundary,
    Any,
    Cluster(String),
}

impl From<Context> for String {
    fn from(c: Context) -> String {
        match c {
            Context::Boundary => "#".into(),
            Context::Any => "*".into(),
            Context::Cluster(s) => s,
        }
    }
}

impl From<String> for Context {
    fn from(s: String) -> Self {
        match s.as_str() {
            "#" => Context::Boundary,
            "*" => Context::Any,
            _ => Context::Cluster(s),
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from(self.clone()))
    }
}

impl Context {
    fn accepts(&self, neighbor: Option<&Cluster>) -> bool {
        match (self, neighbor) {
            (Context::Any, _) => true,
            (Context::Boundary, None) => true,
            (Context::Cluster(want), Some(c)) => *want == c.text,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatternKey {
    #[serde(rename = "type")]
    pub error_type: ErrorType,
    pub focus: String,
    pub written: String,
    pub left: Context,
    pub right: Context,
}

impl fmt::Display for PatternKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}>{}[{}_{}]",
            self.error_type, self.focus, self.written, self.left, self.right
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorPattern {
    #[serde(flatten)]
    pub key: PatternKey,
    pub support: u32,
}

impl ErrorPattern {
    pub fn new(
        error_type: ErrorType,
        focus: &str,
        written: &str,
        left: Context,
        right: Context,
    ) -> Self {
        Self {
            key: PatternKey {
                error_type,
                focus: focus.into(),
                written: written.into(),
                left,
                right,
            },
            support: 1,
        }
    }

    pub fn error_type(&self) -> ErrorType {
        self.key.error_type
    }

    pub fn focus(&self) -> &str {
        &self.key.focus
    }

    pub fn written(&self) -> &str {
        &self.key.written
    }

    /// Same pattern with cluster contexts widened to `*`. Morphology
    /// patterns keep their word-edge side, which marks suffix vs prefix.
    pub fn relaxed(&self) -> Self {
        let widen = |c: &Context| match (self.error_type(), c) {
            (ErrorType::Morphology, Context::Boundary) => Context::Boundary,
            _ => Context::Any,
        };
        let mut p = self.clone();
        p.key.left = widen(&self.key.left);
        p.key.right = widen(&self.key.right);
        p
    }

    /// Boundary pattern where the writer joined words.
    pub fn is_run_on(&self) -> bool {
        self.error_type() == ErrorType::Boundary && self.key.focus.contains(' ')
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionEntry {
    pub written: String,
    pub count: u32,
}

/// Expected cluster → what writers produced instead, most frequent first
/// (ties lexicographic).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfusionMatrix(BTreeMap<String, Vec<ConfusionEntry>>);

impl ConfusionMatrix {
    fn from_counts(counts: BTreeMap<String, BTreeMap<String, u32>>) -> Self {
        let rows = counts
            .into_iter()
            .map(|(focus, row)| {
                let mut entries: Vec<ConfusionEntry> = row
                    .into_iter()
                    .map(|(written, count)| ConfusionEntry { written, count })
                    .collect();
                entries.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.written.cmp(&b.written)));
                (focus, entries)
            })
            .collect();
        Self(rows)
    }

    pub fn row(&self, cluster: &str) -> &[ConfusionEntry] {
        self.0.get(cluster).map_or(&[], Vec::as_slice)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[ConfusionEntry])> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternBank {
    pub version: u32,
    pub language: Language,
    pub fingerprint: String,
    pub patterns: Vec<ErrorPattern>,
    pub confusions: ConfusionMatrix,
    /// The annotated corpus pairs, kept so exercises can also be built
    /// directly from real misspellings.
    #[serde(default)]
    pub examples: Vec<CorpusExample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusExample {
    pub wrong: String,
    pub correct: String,
}

impl PatternBank {
    pub fn empty(language: Language) -> Self {
        Self {
            version: BANK_VERSION,
            language,
            fingerprint: fingerprint(&[]),
            patterns: Vec::new(),
            confusions: ConfusionMatrix::default(),
            examples: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Patterns at or above a support threshold.
    pub fn usable(&self, min_support: u32) -> impl Iterator<Item = &ErrorPattern> {
        self.patterns.iter().filter(move |p| p.support >= min_support)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pattern bank serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, PatternError> {
        let bank: PatternBank = serde_json::from_str(s)?;
        if bank.version != BANK_VERSION {
            return Err(PatternError::UnsupportedVersion(bank.version));
        }
        Ok(bank)
    }
}

/// SHA-256 over the `wrong\tcorrect\n` lines of the annotated corpus.
fn fingerprint(annotations: &[ErrorAnnotation]) -> String {
    let mut h = Sha256::new();
    for a in annotations {
        h.update(a.wrong.as_bytes());
        h.update(b"\t");
        h.update(a.correct.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

/// Letter-level error mapped onto the clusters of its reference word.
struct Located {
    first: usize,
    last: usize,
    instance: ErrorInstance,
}

fn is_letter_level(t: ErrorType) -> bool {
    matches!(
        t,
        ErrorType::Insertion | ErrorType::Omission | ErrorType::Substitution | ErrorType::Transposition
    )
}

fn locate(clusters: &[Cluster], inst: &ErrorInstance) -> Option<(usize, usize)> {
    let p = inst.position;
    let width = match inst.error_type {
        ErrorType::Insertion => 0,
        ErrorType::Transposition => 2,
        _ => 1,
    };
    if width == 0 {
        let idx = clusters
            .iter()
            .position(|c| p < c.end())
            .or_else(|| clusters.len().checked_sub(1))?;
        return Some((idx, idx));
    }
    let first = clusters.iter().position(|c| p < c.end())?;
    let last = clusters.iter().position(|c| p + width <= c.end())?;
    Some((first, last))
}

/// Rewrite the correct span into what the writer produced by applying the
/// given letter errors, right to left so offsets stay valid.
fn realize(span: &[char], span_start: usize, instances: &[&ErrorInstance]) -> String {
    let mut out: Vec<char> = span.to_vec();
    let mut ordered: Vec<&&ErrorInstance> = instances.iter().collect();
    ordered.sort_by(|a, b| {
        b.position
            .cmp(&a.position)
            .then_with(|| (a.error_type == ErrorType::Insertion).cmp(&(b.error_type == ErrorType::Insertion)))
    });
    for inst in ordered {
        let off = inst.position - span_start;
        let written: Vec<char> = inst.written.chars().collect();
        match inst.error_type {
            ErrorType::Substitution => {
                out.splice(off..off + 1, written);
            }
            ErrorType::Omission => {
                out.remove(off);
            }
            ErrorType::Transposition => {
                out.splice(off..off + 2, written);
            }
            ErrorType::Insertion => {
                out.splice(off..off, written);
            }
            _ => unreachable!("only letter-level errors are realized"),
        }
    }
    out.into_iter().collect()
}

fn join(clusters: &[Cluster]) -> String {
    clusters.iter().map(|c| c.text.as_str()).collect()
}

fn side(clusters: &[Cluster], idx: Option<usize>) -> Context {
    idx.and_then(|i| clusters.get(i))
        .map_or(Context::Boundary, |c| Context::Cluster(c.text.clone()))
}

fn pattern_of(clusters: &[Cluster], loc: &Located) -> PatternKey {
    let span = &clusters[loc.first..=loc.last];
    let start = span[0].start;
    let chars: Vec<char> = join(span).chars().collect();
    PatternKey {
        error_type: loc.instance.error_type,
        focus: chars.iter().collect(),
        written: realize(&chars, start, &[&loc.instance]),
        left: side(clusters, loc.first.checked_sub(1)),
        right: side(clusters, Some(loc.last + 1)),
    }
}

fn whole_word_pattern(inst: &ErrorInstance, inventory: &GraphemeClusterInventory) -> PatternKey {
    let (left, right) = match inst.error_type {
        ErrorType::Morphology if inst.position == 0 => {
            let rest: String = inst.reference.chars().skip(inst.expected.chars().count()).collect();
            (Context::Boundary, side(&inventory.segment(&rest), Some(0)))
        }
        ErrorType::Morphology => {
            let stem: String = inst.reference.chars().take(inst.position).collect();
            let clusters = inventory.segment(&stem);
            (side(&clusters, clusters.len().checked_sub(1)), Context::Boundary)
        }
        _ => (Context::Boundary, Context::Boundary),
    };
    PatternKey {
        error_type: inst.error_type,
        focus: inst.expected.clone(),
        written: inst.written.clone(),
        left,
        right,
    }
}

/// Aggregate annotations into a pattern bank.
///
/// Every instance adds one unit of support to exactly one pattern. The
/// confusion matrix merges letter-level errors that touch overlapping
/// cluster spans of the same word, so a span can record multi-edit
/// realizations such as `ou` → `euo`; each entry's count is the number of
/// instances merged into it.
pub fn extract_patterns(
    annotations: &[ErrorAnnotation],
    inventory: &GraphemeClusterInventory,
) -> PatternBank {
    let mut support: BTreeMap<PatternKey, u32> = BTreeMap::new();
    let mut confusions: BTreeMap<String, BTreeMap<String, u32>> = BTreeMap::new();

    for ann in annotations {
        // Letter-level errors grouped per reference word.
        let mut by_word: BTreeMap<(usize, &str), Vec<&ErrorInstance>> = BTreeMap::new();
        for inst in &ann.instances {
            if is_letter_level(inst.error_type) {
                by_word
                    .entry((inst.token_index, inst.reference.as_str()))
                    .or_default()
                    .push(inst);
            } else {
                *support.entry(whole_word_pattern(inst, inventory)).or_default() += 1;
            }
        }
        for ((_, reference), instances) in by_word {
            let clusters = inventory.segment(reference);
            let mut located: Vec<Located> = instances
                .into_iter()
                .filter_map(|inst| {
                    locate(&clusters, inst).map(|(first, last)| Located {
                        first,
                        last,
                        instance: inst.clone(),
                    })
                })
                .collect();
            for loc in &located {
                *support.entry(pattern_of(&clusters, loc)).or_default() += 1;
            }
            located.sort_by_key(|l| (l.first, l.last));
            let mut i = 0;
            while i < located.len() {
                let (first, mut last) = (located[i].first, located[i].last);
                let mut j = i + 1;
                while j < located.len() && located[j].first <= last {
                    last = last.max(located[j].last);
                    j += 1;
                }
                let span = &clusters[first..=last];
                let chars: Vec<char> = join(span).chars().collect();
                let group: Vec<&ErrorInstance> = located[i..j].iter().map(|l| &l.instance).collect();
                let written = realize(&chars, span[0].start, &group);
                *confusions
                    .entry(join(span))
                    .or_default()
                    .entry(written)
                    .or_default() += group.len() as u32;
                i = j;
            }
        }
    }

    PatternBank {
        version: BANK_VERSION,
        language: inventory.language(),
        fingerprint: fingerprint(annotations),
        patterns: support
            .into_iter()
            .map(|(key, support)| ErrorPattern { key, support })
            .collect(),
        confusions: ConfusionMatrix::from_counts(confusions),
        examples: annotations
            .iter()
            .map(|a| CorpusExample {
                wrong: a.wrong.clone(),
                correct: a.correct.clone(),
            })
            .collect(),
    }
}

/// Ranked clusters writers produced instead of `cluster`.
pub fn confusion_set(bank: &PatternBank, cluster: &str) -> Vec<String> {
    bank.confusions
        .row(cluster)
        .iter()
        .filter(|e| e.written != cluster)
        .map(|e| e.written.clone())
        .collect()
}

/// Cluster indices of `word` where the pattern applies.
///
/// Letter-level patterns match a run of whole clusters spelling the focus;
/// suffix patterns match a word-final affix (prefix patterns a word-initial
/// one) leaving a stem of at least three letters. Boundary patterns never
/// match single words.
pub fn match_sites(
    pattern: &ErrorPattern,
    word: &WordForm,
    inventory: &GraphemeClusterInventory,
) -> Vec<usize> {
    let clusters = inventory.segment(word.text());
    let focus = pattern.focus();
    let flen = focus.chars().count();
    let key = &pattern.key;
    let accepts = |first: usize, last: usize| {
        key.left.accepts(first.checked_sub(1).and_then(|i| clusters.get(i)))
            && key.right.accepts(clusters.get(last + 1))
    };
    match key.error_type {
        ErrorType::Boundary => Vec::new(),
        ErrorType::Morphology => {
            let n = word.len();
            if flen == 0 || n < flen + crate::text::MIN_STEM {
                return Vec::new();
            }
            let suffix_pattern = key.left != Context::Boundary;
            let site = if suffix_pattern {
                word.text().ends_with(focus).then(|| n - flen)
            } else {
                word.text().starts_with(focus).then_some(0)
            };
            let Some(start) = site else { return Vec::new() };
            let Some(idx) = clusters.iter().position(|c| c.start == start) else {
                return Vec::new();
            };
            let last = if suffix_pattern {
                clusters.len() - 1
            } else {
                match clusters.iter().position(|c| c.end() == flen) {
                    Some(l) => l,
                    None => return Vec::new(),
                }
            };
            if accepts(idx, last) {
                vec![idx]
            } else {
                Vec::new()
            }
        }
        _ => {
            let mut sites = Vec::new();
            if flen == 0 {
                return sites;
            }
            for first in 0..clusters.len() {
                let mut len = 0;
                let mut last = first;
                while last < clusters.len() && len < flen {
                    len += clusters[last].len;
                    last += 1;
                }
                if len != flen {
                    continue;
                }
                let last = last - 1;
                if join(&clusters[first..=last]) == focus && accepts(first, last) {
                    sites.push(first);
                }
            }
            sites
        }
    }
}
