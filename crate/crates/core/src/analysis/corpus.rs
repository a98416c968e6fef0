use serde::{Deserialize, Serialize};

use super::{classify_pair, AnalysisError, ErrorAnnotation, ErrorType};
use crate::text::Language;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusLine {
    pub line: usize,
    pub wrong: String,
    pub correct: String,
}

/// Parse `wrong<TAB>correct` lines. Blank lines and `#` comments are skipped.
pub fn parse_corpus(source: &str) -> Result<Vec<CorpusLine>, AnalysisError> {
    let mut out = Vec::new();
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (wrong, correct) =
            line.split_once('\t')
                .ok_or_else(|| AnalysisError::MalformedCorpus {
                    line: i + 1,
                    message: "expected wrong<TAB>correct".into(),
                })?;
        if correct.contains('\t') {
            return Err(AnalysisError::MalformedCorpus {
                line: i + 1,
                message: "more than two columns".into(),
            });
        }
        out.push(CorpusLine {
            line: i + 1,
            wrong: wrong.trim().to_string(),
            correct: correct.trim().to_string(),
        });
    }
    Ok(out)
}

/// Classify every corpus line. Lines that cannot be aligned are returned
/// separately with their error instead of aborting the run.
pub fn annotate_corpus(
    lines: &[CorpusLine],
    language: Language,
) -> (Vec<ErrorAnnotation>, Vec<(usize, AnalysisError)>) {
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for l in lines {
        match classify_pair(&l.wrong, &l.correct, language) {
            Ok(a) => ok.push(a),
            Err(e) => failed.push((l.line, e)),
        }
    }
    (ok, failed)
}

/// One line of the annotation output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub wrong: String,
    pub correct: String,
    #[serde(rename = "type")]
    pub error_type: ErrorType,
    pub position: usize,
    pub expected: String,
    pub written: String,
}

impl AnnotationRecord {
    pub fn from_annotation(a: &ErrorAnnotation) -> Vec<AnnotationRecord> {
        a.instances
            .iter()
            .map(|i| AnnotationRecord {
                wrong: a.wrong.clone(),
                correct: a.correct.clone(),
                error_type: i.error_type,
                position: i.position,
                expected: i.expected.clone(),
                written: i.written.clone(),
            })
            .collect()
    }
}
