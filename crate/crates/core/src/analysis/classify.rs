use std::sync::OnceLock;

use super::distance::{align, damerau_chars};
use super::tokens::{align_tokens, TokenLink};
use super::{AnalysisError, ErrorAnnotation, ErrorInstance, ErrorType};
use crate::text::{tokenize, AffixInventory, AffixKind, Language};

pub(crate) fn builtin_affixes(language: Language) -> &'static AffixInventory {
    static ES: OnceLock<AffixInventory> = OnceLock::new();
    static EN: OnceLock<AffixInventory> = OnceLock::new();
    match language {
        Language::Es => ES.get_or_init(|| AffixInventory::builtin(Language::Es)),
        Language::En => EN.get_or_init(|| AffixInventory::builtin(Language::En)),
    }
}

/// A wrong affix on a shared stem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphology {
    pub kind: AffixKind,
    /// Letter index of the affix in the correct word (0 for prefixes).
    pub position: usize,
    pub expected: String,
    pub written: String,
}

fn stem_threshold(a: usize, b: usize) -> usize {
    3.max(a.min(b).div_ceil(2))
}

/// Detect a wrong suffix or prefix.
///
/// The two words must share a stem of at least `max(3, ceil(min_len / 2))`
/// letters, both leftover affixes must be inventory affixes, and the affixes
/// must be at least two edits apart. The last condition keeps single-letter
/// slips (*cansión* for *canción*) in the letter categories.
pub fn detect_morphology(
    wrong: &str,
    correct: &str,
    affixes: &AffixInventory,
) -> Option<Morphology> {
    let w: Vec<char> = wrong.chars().collect();
    let c: Vec<char> = correct.chars().collect();
    if w == c {
        return None;
    }
    let threshold = stem_threshold(w.len(), c.len());
    let accept = |rw: &[char], rc: &[char], is_affix: &dyn Fn(&str) -> bool| {
        let (sw, sc): (String, String) = (rw.iter().collect(), rc.iter().collect());
        (!rw.is_empty()
            && !rc.is_empty()
            && is_affix(&sw)
            && is_affix(&sc)
            && damerau_chars(rw, rc) >= 2)
            .then_some((sw, sc))
    };

    let lcp = w.iter().zip(&c).take_while(|(a, b)| a == b).count();
    for k in (threshold..=lcp).rev() {
        if let Some((written, expected)) = accept(&w[k..], &c[k..], &|s| affixes.is_suffix(s)) {
            return Some(Morphology {
                kind: AffixKind::Suffix,
                position: k,
                expected,
                written,
            });
        }
    }

    let lcs = w
        .iter()
        .rev()
        .zip(c.iter().rev())
        .take_while(|(a, b)| a == b)
        .count();
    for k in (threshold..=lcs).rev() {
        let (pw, pc) = (&w[..w.len() - k], &c[..c.len() - k]);
        if let Some((written, expected)) = accept(pw, pc, &|s| affixes.is_prefix(s)) {
            return Some(Morphology {
                kind: AffixKind::Prefix,
                position: 0,
                expected,
                written,
            });
        }
    }
    None
}

/// Error count for one written word against one reference word.
pub fn pair_errors(wrong: &str, correct: &str, language: Language) -> usize {
    if wrong == correct {
        0
    } else if detect_morphology(wrong, correct, builtin_affixes(language)).is_some() {
        1
    } else {
        super::damerau_distance(wrong, correct)
    }
}

fn letter_instances(
    wrong: &str,
    reference: &str,
    token_index: usize,
    out: &mut Vec<ErrorInstance>,
) {
    for op in align(wrong, reference) {
        out.push(ErrorInstance {
            error_type: ErrorType::from_edit(op.kind),
            position: op.position,
            expected: op.expected,
            written: op.written,
            token_index,
            reference: reference.to_string(),
        });
    }
}

/// Errors contributed by one token link. Gap links are the caller's
/// business and yield nothing here.
pub(crate) fn link_instances(
    link: &TokenLink,
    wrong: &[String],
    correct: &[String],
    language: Language,
) -> Vec<ErrorInstance> {
    let mut out = Vec::new();
    match link {
        TokenLink::Pair { wrong: i, correct: j } => {
            let (w, c) = (&wrong[*i], &correct[*j]);
            if w == c {
                return out;
            }
            if let Some(m) = detect_morphology(w, c, builtin_affixes(language)) {
                out.push(ErrorInstance {
                    error_type: ErrorType::Morphology,
                    position: m.position,
                    expected: m.expected,
                    written: m.written,
                    token_index: *j,
                    reference: c.clone(),
                });
            } else {
                letter_instances(w, c, *j, &mut out);
            }
        }
        TokenLink::RunOn { wrong: i, correct: range } => {
            let group = &correct[range.clone()];
            let joined = group.concat();
            out.push(ErrorInstance {
                error_type: ErrorType::Boundary,
                position: group[0].chars().count(),
                expected: group.join(" "),
                written: wrong[*i].clone(),
                token_index: range.start,
                reference: joined.clone(),
            });
            letter_instances(&wrong[*i], &joined, range.start, &mut out);
        }
        TokenLink::Split { wrong: range, correct: j } => {
            let group = &wrong[range.clone()];
            out.push(ErrorInstance {
                error_type: ErrorType::Boundary,
                position: group[0].chars().count(),
                expected: correct[*j].clone(),
                written: group.join(" "),
                token_index: *j,
                reference: correct[*j].clone(),
            });
            letter_instances(&group.concat(), &correct[*j], *j, &mut out);
        }
        TokenLink::Added { .. } | TokenLink::Omitted { .. } => {}
    }
    out
}

/// Classify every difference between a written text and its correction.
///
/// Word-count mismatches become boundary errors; a wrong affix on a shared
/// stem is one morphology error; everything else comes from the letter edit
/// script, named from the writer's side (an extra letter is an insertion).
pub fn classify_pair(
    wrong: &str,
    correct: &str,
    language: Language,
) -> Result<ErrorAnnotation, AnalysisError> {
    let w = tokenize(wrong, language);
    let c = tokenize(correct, language);
    if w.is_empty() {
        return Err(AnalysisError::EmptyInput(wrong.to_string()));
    }
    if c.is_empty() {
        return Err(AnalysisError::EmptyInput(correct.to_string()));
    }
    let links = align_tokens(&w, &c, false, |a, b| pair_errors(a, b, language)).ok_or_else(
        || AnalysisError::UnalignableTokens {
            wrong: wrong.to_string(),
            correct: correct.to_string(),
        },
    )?;
    let instances: Vec<ErrorInstance> = links
        .iter()
        .flat_map(|l| link_instances(l, &w, &c, language))
        .collect();
    Ok(ErrorAnnotation {
        wrong: w.join(" "),
        correct: c.join(" "),
        error_count: instances.len(),
        instances,
    })
}

/// Boundary and morphology errors are single instances, so this is the
/// instance count.
pub fn count_errors(annotation: &ErrorAnnotation) -> usize {
    annotation.instances.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn types(w: &str, c: &str, lang: Language) -> Vec<ErrorType> {
        classify_pair(w, c, lang)
            .unwrap()
            .instances
            .iter()
            .map(|i| i.error_type)
            .collect()
    }

    #[test]
    fn canonical_fixtures() {
        use ErrorType::*;
        let en = Language::En;
        assert_eq!(types("arround", "around", en), [Insertion]);
        assert_eq!(types("emty", "empty", en), [Omission]);
        assert_eq!(types("scholl", "school", en), [Substitution]);
        assert_eq!(types("littel", "little", en), [Transposition]);
        assert_eq!(types("mis understanding", "misunderstanding", en), [Boundary]);
        assert_eq!(types("alot", "a lot", en), [Boundary]);
        assert_eq!(types("warnment", "warning", en), [Morphology]);
        let litel = classify_pair("litel", "little", en).unwrap();
        assert_eq!(count_errors(&litel), 2);
    }

    #[test]
    fn instance_details() {
        let a = classify_pair("scholl", "school", Language::En).unwrap();
        let i = &a.instances[0];
        assert_eq!((i.position, i.expected.as_str(), i.written.as_str()), (4, "o", "l"));

        let a = classify_pair("arround", "around", Language::En).unwrap();
        assert_eq!(a.instances[0].written, "r");
        assert_eq!(a.instances[0].expected, "");

        let a = classify_pair("warnment", "warning", Language::En).unwrap();
        let i = &a.instances[0];
        assert_eq!((i.position, i.expected.as_str(), i.written.as_str()), (4, "ing", "ment"));

        let a = classify_pair("alot", "a lot", Language::En).unwrap();
        assert!(a.instances[0].is_run_on());
        assert_eq!(a.error_count, 1);
    }

    #[test]
    fn identical_pair_has_no_errors() {
        let a = classify_pair("casa", "casa", Language::Es).unwrap();
        assert_eq!(count_errors(&a), 0);
    }

    #[test]
    fn boundary_and_letter_errors_count_independently() {
        let a = classify_pair("a lott", "alot", Language::En).unwrap();
        let t: Vec<_> = a.instances.iter().map(|i| i.error_type).collect();
        assert_eq!(t, [ErrorType::Boundary, ErrorType::Insertion]);
    }

    #[test]
    fn single_letter_affix_slips_are_not_morphology() {
        let es = builtin_affixes(Language::Es);
        assert_eq!(detect_morphology("cansión", "canción", es), None);
        assert_eq!(detect_morphology("comar", "comer", es), None);
        let m = detect_morphology("cantiendo", "cantando", es).unwrap();
        assert_eq!((m.expected.as_str(), m.written.as_str()), ("ando", "iendo"));
        assert_eq!(types("cansión", "canción", Language::Es), [ErrorType::Substitution]);
    }

    #[test]
    fn diacritics_are_substitutions() {
        assert_eq!(types("arbol", "árbol", Language::Es), [ErrorType::Substitution]);
    }

    #[test]
    fn errors_surface() {
        assert!(matches!(
            classify_pair("...", "casa", Language::Es),
            Err(AnalysisError::EmptyInput(_))
        ));
        assert!(matches!(
            classify_pair("sol", "el sol brilla hoy", Language::Es),
            Err(AnalysisError::UnalignableTokens { .. })
        ));
    }
}
