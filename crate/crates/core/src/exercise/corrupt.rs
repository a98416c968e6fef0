use super::{ExerciseError, ExerciseType, Solution};
use crate::analysis::ErrorType;
use crate::patterns::{match_sites, Context, ErrorPattern};
use crate::text::{GraphemeClusterInventory, WordForm};

/// A corrupted presentation of a target and the edit that repairs it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corruption {
    pub exercise_type: ExerciseType,
    pub stem: String,
    pub solution: Solution,
}

/// Apply a letter-level or suffix pattern to `target` at cluster index
/// `site`.
///
/// The focus span is replaced by what writers produced for it. Prefix
/// morphology patterns have no word-ending exercise and are rejected like
/// any other site the pattern does not match.
pub fn corrupt(
    target: &WordForm,
    pattern: &ErrorPattern,
    site: usize,
    inventory: &GraphemeClusterInventory,
) -> Result<Corruption, ExerciseError> {
    let inapplicable = || ExerciseError::InapplicablePattern {
        pattern: pattern.key.to_string(),
        site,
    };
    if !match_sites(pattern, target, inventory).contains(&site) {
        return Err(inapplicable());
    }
    let exercise_type =
        ExerciseType::for_error(pattern.error_type(), false).ok_or_else(inapplicable)?;
    let clusters = inventory.segment(target.text());
    let start = clusters[site].start;
    let chars = target.chars();
    let head: String = chars[..start].iter().collect();

    if pattern.error_type() == ErrorType::Morphology {
        if pattern.key.left == Context::Boundary {
            return Err(inapplicable());
        }
        return Ok(Corruption {
            exercise_type,
            stem: format!("{head}{}", pattern.written()),
            solution: Solution::Suffix {
                keep: start,
                text: pattern.focus().to_string(),
            },
        });
    }

    let flen = pattern.focus().chars().count();
    let tail: String = chars[start + flen..].iter().collect();
    let stem = format!("{head}{}{tail}", pattern.written());
    let solution = derive_solution(exercise_type, &stem, target.text()).ok_or_else(inapplicable)?;
    Ok(Corruption {
        exercise_type,
        stem,
        solution,
    })
}

/// Join a phrase into a run-on following a run-on pattern.
///
/// All words but the last must be the pattern's leading words; the last
/// word is free, so `de repente` also yields *dehecho* from `de hecho`.
pub fn corrupt_phrase(
    words: &[WordForm],
    pattern: &ErrorPattern,
) -> Result<Corruption, ExerciseError> {
    let inapplicable = || ExerciseError::InapplicablePattern {
        pattern: pattern.key.to_string(),
        site: 0,
    };
    if !pattern.is_run_on() || words.len() < 2 {
        return Err(inapplicable());
    }
    let lead: Vec<&str> = pattern.focus().split(' ').collect();
    if lead.len() != words.len()
        || lead[..lead.len() - 1]
            .iter()
            .zip(words)
            .any(|(p, w)| *p != w.text())
    {
        return Err(inapplicable());
    }
    let target: Vec<&str> = words.iter().map(WordForm::text).collect();
    let stem = target.concat();
    let solution = derive_solution(ExerciseType::SplitWords, &stem, &target.join(" "))
        .ok_or_else(inapplicable)?;
    Ok(Corruption {
        exercise_type: ExerciseType::SplitWords,
        stem,
        solution,
    })
}

/// The canonical edit of the given exercise type that turns `stem` into
/// `target`, if there is one.
///
/// Letter exercises use the differing middle left after stripping the
/// common prefix and suffix; word endings keep the common prefix.
pub fn derive_solution(kind: ExerciseType, stem: &str, target: &str) -> Option<Solution> {
    let s: Vec<char> = stem.chars().collect();
    let t: Vec<char> = target.chars().collect();
    if s == t {
        return None;
    }
    let lcp = s.iter().zip(&t).take_while(|(a, b)| a == b).count();
    match kind {
        ExerciseType::SplitWords => {
            if s.contains(&' ') || t.first() == Some(&' ') || t.last() == Some(&' ') {
                return None;
            }
            let mut at = Vec::new();
            let mut letters = 0;
            for c in &t {
                if *c == ' ' {
                    if at.last() == Some(&letters) {
                        return None;
                    }
                    at.push(letters);
                } else {
                    letters += 1;
                }
            }
            let joined: Vec<char> = t.iter().copied().filter(|c| *c != ' ').collect();
            (joined == s && !at.is_empty()).then_some(Solution::Split { at })
        }
        ExerciseType::ReorderLetters => {
            if s.len() != t.len() {
                return None;
            }
            let mut used = vec![false; s.len()];
            let mut order = Vec::with_capacity(t.len());
            for c in &t {
                let i = (0..s.len()).find(|&i| !used[i] && s[i] == *c)?;
                used[i] = true;
                order.push(i);
            }
            Some(Solution::Reorder { order })
        }
        ExerciseType::WordEnding => Some(Solution::Suffix {
            keep: lcp,
            text: t[lcp..].iter().collect(),
        }),
        ExerciseType::AddLetter | ExerciseType::RemoveLetter | ExerciseType::ChangeLetter => {
            let max_suffix = s.len().min(t.len()) - lcp;
            let lcs = s
                .iter()
                .rev()
                .zip(t.iter().rev())
                .take_while(|(a, b)| a == b)
                .count()
                .min(max_suffix);
            let sm: String = s[lcp..s.len() - lcs].iter().collect();
            let tm: String = t[lcp..t.len() - lcs].iter().collect();
            match (kind, sm.is_empty(), tm.is_empty()) {
                (ExerciseType::AddLetter, true, false) => Some(Solution::Insert { at: lcp, text: tm }),
                (ExerciseType::RemoveLetter, false, true) => Some(Solution::Delete {
                    at: lcp,
                    len: sm.chars().count(),
                }),
                (ExerciseType::ChangeLetter, false, false) => Some(Solution::Replace {
                    at: lcp,
                    len: sm.chars().count(),
                    text: tm,
                }),
                _ => None,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{normalize, Language};

    fn en(w: &str) -> WordForm {
        normalize(w, Language::En).unwrap()
    }

    fn pat(t: ErrorType, focus: &str, written: &str) -> ErrorPattern {
        ErrorPattern::new(t, focus, written, Context::Any, Context::Any)
    }

    #[test]
    fn run_on_phrase_splits_after_first_word() {
        let p = ErrorPattern::new(
            ErrorType::Boundary,
            "a lot",
            "alot",
            Context::Boundary,
            Context::Boundary,
        );
        let c = corrupt_phrase(&[en("a"), en("lot")], &p).unwrap();
        assert_eq!(c.stem, "alot");
        assert_eq!(c.solution, Solution::Split { at: vec![1] });
        assert_eq!(c.exercise_type, ExerciseType::SplitWords);
        assert!(corrupt_phrase(&[en("the"), en("lot")], &p).is_err());
    }

    #[test]
    fn omission_of_a_cluster_removes_it() {
        let inv = GraphemeClusterInventory::builtin(Language::En);
        let p = pat(ErrorType::Omission, "eou", "");
        let word = en("gorgeous");
        let site = match_sites(&p, &word, &inv)[0];
        let c = corrupt(&word, &p, site, &inv).unwrap();
        assert_eq!(c.stem, "gorgs");
        assert_eq!(c.exercise_type, ExerciseType::AddLetter);
        assert_eq!(c.solution, Solution::Insert { at: 4, text: "eou".into() });
    }

    #[test]
    fn letter_patterns_round_trip() {
        let inv = GraphemeClusterInventory::builtin(Language::En);
        let cases = [
            (pat(ErrorType::Insertion, "r", "rr"), "around", "arround"),
            (pat(ErrorType::Substitution, "oo", "ol"), "school", "scholl"),
            (pat(ErrorType::Transposition, "le", "el"), "little", "littel"),
        ];
        for (p, word, stem) in cases {
            let w = en(word);
            let site = match_sites(&p, &w, &inv)[0];
            let c = corrupt(&w, &p, site, &inv).unwrap();
            assert_eq!(c.stem, stem);
            assert_eq!(c.solution.apply(&c.stem).as_deref(), Some(word));
        }
    }

    #[test]
    fn absent_focus_is_inapplicable() {
        let inv = GraphemeClusterInventory::builtin(Language::En);
        let p = pat(ErrorType::Omission, "eou", "");
        assert!(matches!(
            corrupt(&en("little"), &p, 0, &inv),
            Err(ExerciseError::InapplicablePattern { .. })
        ));
    }

    #[test]
    fn suffix_pattern_replaces_the_ending() {
        let inv = GraphemeClusterInventory::builtin(Language::En);
        let p = ErrorPattern::new(
            ErrorType::Morphology,
            "ing",
            "ment",
            Context::Any,
            Context::Boundary,
        );
        let w = en("warning");
        let site = match_sites(&p, &w, &inv)[0];
        let c = corrupt(&w, &p, site, &inv).unwrap();
        assert_eq!(c.stem, "warnment");
        assert_eq!(c.solution, Solution::Suffix { keep: 4, text: "ing".into() });
    }

    #[test]
    fn derived_edits_for_doubled_letters() {
        assert_eq!(
            derive_solution(ExerciseType::AddLetter, "pero", "perro"),
            Some(Solution::Insert { at: 3, text: "r".into() })
        );
        assert_eq!(
            derive_solution(ExerciseType::RemoveLetter, "perrro", "perro"),
            Some(Solution::Delete { at: 4, len: 1 })
        );
        assert_eq!(derive_solution(ExerciseType::AddLetter, "perrro", "perro"), None);
        assert_eq!(
            derive_solution(ExerciseType::SplitWords, "alomejor", "a lo mejor"),
            Some(Solution::Split { at: vec![1, 3] })
        );
    }
}
