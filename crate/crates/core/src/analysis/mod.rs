//! Alignment of misspelled text with its correction and classification of
//! every difference into one of six error types.

mod classify;
mod corpus;
mod distance;
mod tokens;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use classify::{classify_pair, count_errors, detect_morphology, pair_errors, Morphology};
pub(crate) use classify::link_instances;
pub use corpus::{annotate_corpus, parse_corpus, AnnotationRecord, CorpusLine};
pub use distance::{align, apply_script, damerau_distance};
pub use tokens::{align_tokens, TokenLink, MAX_GROUP};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("no words in {0:?}")]
    EmptyInput(String),
    #[error("cannot align the words of {wrong:?} with {correct:?}")]
    UnalignableTokens { wrong: String, correct: String },
    #[error("corpus line {line}: {message}")]
    MalformedCorpus { line: usize, message: String },
}

/// One step of an edit script turning the written form into the correct one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditKind {
    /// Add the missing `expected` letter.
    Insert,
    /// Drop the extra `written` letter.
    Delete,
    Substitute,
    /// Swap two adjacent letters.
    Transpose,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EditOp {
    pub kind: EditKind,
    /// Index into the correct form. Deletions point at the letter the
    /// spurious one precedes.
    pub position: usize,
    pub expected: String,
    pub written: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorType {
    Insertion,
    Omission,
    Substitution,
    Transposition,
    Boundary,
    Morphology,
}

impl ErrorType {
    pub const ALL: [ErrorType; 6] = [
        ErrorType::Insertion,
        ErrorType::Omission,
        ErrorType::Substitution,
        ErrorType::Transposition,
        ErrorType::Boundary,
        ErrorType::Morphology,
    ];

    /// Named from the writer's side: a deleted letter means the writer
    /// inserted one.
    pub fn from_edit(kind: EditKind) -> Self {
        match kind {
            EditKind::Delete => ErrorType::Insertion,
            EditKind::Insert => ErrorType::Omission,
            EditKind::Substitute => ErrorType::Substitution,
            EditKind::Transpose => ErrorType::Transposition,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorType::Insertion => "insertion",
            ErrorType::Omission => "omission",
            ErrorType::Substitution => "substitution",
            ErrorType::Transposition => "transposition",
            ErrorType::Boundary => "boundary",
            ErrorType::Morphology => "morphology",
        }
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorInstance {
    #[serde(rename = "type")]
    pub error_type: ErrorType,
    /// Letter index into `reference`.
    pub position: usize,
    pub expected: String,
    pub written: String,
    /// First reference word the error belongs to.
    pub token_index: usize,
    /// Correct spelling the position indexes into: the reference word, or
    /// the space-free join of a run-on/split group.
    pub reference: String,
}

impl ErrorInstance {
    /// For boundary errors: true when the writer joined words (*alot).
    pub fn is_run_on(&self) -> bool {
        self.error_type == ErrorType::Boundary && self.expected.contains(' ')
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorAnnotation {
    pub wrong: String,
    pub correct: String,
    pub instances: Vec<ErrorInstance>,
    pub error_count: usize,
}
