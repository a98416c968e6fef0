use rand::seq::SliceRandom;
use rand::Rng;

use super::ExerciseError;
use crate::analysis::damerau_distance;
use crate::patterns::{confusion_set, PatternBank};
use crate::text::{AffixInventory, Language};

/// Letters that sound alike. The occlusives come first for every language;
/// the rest are Spanish spellings of one sound (or near sounds).
const OCCLUSIVES: &[&str] = &["d", "b", "p", "g", "t"];
const PHONETIC_ES: &[&[&str]] = &[
    &["b", "v"],
    &["c", "qu", "k"],
    &["c", "z", "s"],
    &["g", "j"],
    &["ll", "y"],
    &["r", "rr"],
    &["i", "y"],
];
const VISUAL: &[&[&str]] = &[&["b", "d", "p", "q"], &["m", "n"], &["u", "v"]];

fn classmates<'a>(solution: &str, classes: &[&'a [&'a str]]) -> Vec<&'a str> {
    classes
        .iter()
        .filter(|c| c.contains(&solution))
        .flat_map(|c| c.iter().copied())
        .collect()
}

/// Pick `k` wrong options for a letter exercise.
///
/// Candidates are drawn in rank order from the corpus confusion set, the
/// sound-alike classes, the look-alike classes, and finally a shuffle of
/// the alphabet. `safe` vets each candidate (callers reject options that
/// would spell a real word).
pub fn select_distractors<R: Rng + ?Sized>(
    solution: &str,
    bank: &PatternBank,
    k: usize,
    rng: &mut R,
    mut safe: impl FnMut(&str) -> bool,
) -> Result<Vec<String>, ExerciseError> {
    if k == 0 {
        return Err(ExerciseError::NoDistractorsRequested);
    }
    let mut phonetic = vec![OCCLUSIVES];
    if bank.language == Language::Es {
        phonetic.extend_from_slice(PHONETIC_ES);
    }
    let ranked = confusion_set(bank, solution)
        .into_iter()
        .chain(classmates(solution, &phonetic).into_iter().map(String::from))
        .chain(classmates(solution, VISUAL).into_iter().map(String::from));

    let mut out: Vec<String> = Vec::with_capacity(k);
    let mut consider = |cand: String, out: &mut Vec<String>| {
        if out.len() < k && !cand.is_empty() && cand != solution && !out.contains(&cand) && safe(&cand) {
            out.push(cand);
        }
    };
    for cand in ranked {
        consider(cand, &mut out);
    }
    if out.len() < k {
        let mut letters = bank.language.alphabet().to_vec();
        letters.shuffle(rng);
        for l in letters {
            consider(l.to_string(), &mut out);
        }
    }
    if out.len() < k {
        return Err(ExerciseError::InsufficientDistractors {
            solution: solution.to_string(),
            wanted: k,
            found: out.len(),
        });
    }
    Ok(out)
}

/// Wrong endings for a word-ending exercise.
///
/// The corpus's wrong suffix comes first, then inventory suffixes of the
/// same grammatical category, then the rest by edit distance to the
/// correct one (inventory order breaks ties).
pub fn suffix_distractors(
    solution: &str,
    written: &str,
    affixes: &AffixInventory,
    k: usize,
    mut safe: impl FnMut(&str) -> bool,
) -> Result<Vec<String>, ExerciseError> {
    if k == 0 {
        return Err(ExerciseError::NoDistractorsRequested);
    }
    let category = affixes.suffix(solution).map(|a| a.category.clone());
    let mut same = Vec::new();
    let mut other = Vec::new();
    for a in affixes.suffixes() {
        if Some(&a.category) == category.as_ref() {
            same.push(a.text.clone());
        } else {
            other.push(a.text.clone());
        }
    }
    other.sort_by_key(|s| damerau_distance(s, solution));

    let mut out = Vec::with_capacity(k);
    for cand in std::iter::once(written.to_string()).chain(same).chain(other) {
        if out.len() == k {
            break;
        }
        if !cand.is_empty() && cand != solution && !out.contains(&cand) && safe(&cand) {
            out.push(cand);
        }
    }
    if out.len() < k {
        return Err(ExerciseError::InsufficientDistractors {
            solution: solution.to_string(),
            wanted: k,
            found: out.len(),
        });
    }
    Ok(out)
}
