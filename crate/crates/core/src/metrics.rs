//! Dictation and reading scores: the share of words written wrong, errors
//! per word, errors per wrong word, and reading errors per word.

use serde::{Deserialize, Serialize};

use crate::analysis::{align_tokens, link_instances, pair_errors, TokenLink};
use crate::text::Language;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("the reference text has no words")]
    EmptyReference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictationScore {
    pub total_words: usize,
    pub words_with_errors: usize,
    pub total_errors: usize,
    pub rate_words_with_errors: f64,
    pub errors_per_word: f64,
    /// Undefined (null) when no word is wrong.
    pub errors_per_wrong_word: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadingScore {
    pub total_words: usize,
    pub total_errors: usize,
    pub errors_per_word: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestDelta {
    pub pre: f64,
    pub post: f64,
    pub change: f64,
}

/// Errors charged to each reference word, plus the gap counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordErrors {
    pub per_word: Vec<usize>,
    /// Transcript words with no reference counterpart. Each costs one error,
    /// charged to the preceding reference word (the following one at the
    /// start of the text).
    pub added: usize,
    /// Reference words missing from the transcript, one error each.
    pub omitted: usize,
}

/// Align a transcript with its reference and charge every error to a
/// reference word.
///
/// Letter errors count as edit operations; a wrong affix, a run-on and a
/// split each count once, charged to the first reference word of the group.
pub fn word_errors(
    reference: &[String],
    transcript: &[String],
    language: Language,
) -> Result<WordErrors, MetricsError> {
    if reference.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    let links = align_tokens(transcript, reference, true, |a, b| pair_errors(a, b, language))
        .expect("gapped alignment always succeeds");
    let mut out = WordErrors {
        per_word: vec![0; reference.len()],
        added: 0,
        omitted: 0,
    };
    let mut last_ref: Option<usize> = None;
    let mut pending_added = 0;
    for link in &links {
        let charged = match link {
            TokenLink::Added { .. } => {
                out.added += 1;
                match last_ref {
                    Some(r) => out.per_word[r] += 1,
                    None => pending_added += 1,
                }
                continue;
            }
            TokenLink::Omitted { correct } => {
                out.omitted += 1;
                out.per_word[*correct] += 1;
                *correct
            }
            TokenLink::Pair { correct, .. } | TokenLink::Split { correct, .. } => {
                out.per_word[*correct] += link_instances(link, transcript, reference, language).len();
                *correct
            }
            TokenLink::RunOn { correct, .. } => {
                out.per_word[correct.start] +=
                    link_instances(link, transcript, reference, language).len();
                correct.end - 1
            }
        };
        if last_ref.is_none() {
            out.per_word[0] += std::mem::take(&mut pending_added);
        }
        last_ref = Some(charged);
    }
    out.per_word[0] += pending_added;
    Ok(out)
}

/// Score a dictation transcript against its reference.
pub fn score_writing(
    reference: &[String],
    transcript: &[String],
    language: Language,
) -> Result<DictationScore, MetricsError> {
    let e = word_errors(reference, transcript, language)?;
    let total_words = reference.len();
    let words_with_errors = e.per_word.iter().filter(|&&n| n > 0).count();
    let total_errors: usize = e.per_word.iter().sum();
    Ok(DictationScore {
        total_words,
        words_with_errors,
        total_errors,
        rate_words_with_errors: words_with_errors as f64 / total_words as f64,
        errors_per_word: total_errors as f64 / total_words as f64,
        errors_per_wrong_word: (words_with_errors > 0)
            .then(|| total_errors as f64 / words_with_errors as f64),
    })
}

/// Score a read-aloud transcript: omitted and added words are one error
/// each; misread words count like writing errors.
pub fn score_reading(
    reference: &[String],
    spoken: &[String],
    language: Language,
) -> Result<ReadingScore, MetricsError> {
    let e = word_errors(reference, spoken, language)?;
    let total_errors: usize = e.per_word.iter().sum();
    Ok(ReadingScore {
        total_words: reference.len(),
        total_errors,
        errors_per_word: total_errors as f64 / reference.len() as f64,
    })
}

pub fn delta(pre: f64, post: f64) -> TestDelta {
    TestDelta {
        pre,
        post,
        change: post - pre,
    }
}
