//! Exercise synthesis: corrupt frequent words with corpus error patterns,
//! pick distractors, grade difficulty and assemble seeded exercise banks.
//!
//! Every exercise carries its `solution` as an edit on the stem; an answer
//! is correct exactly when applying it reconstructs the target.

mod bank;
mod corrupt;
mod difficulty;
mod distractors;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::ErrorType;
use crate::patterns::PatternKey;
use crate::text::{Language, TextError};

pub use bank::{generate_bank, generate_bank_lenient, BankConfig, ExerciseBank, Quotas, Shortfall};
pub use corrupt::{corrupt, corrupt_phrase, derive_solution, Corruption};
pub use difficulty::{
    assign_level, difficulty, DifficultyModel, DifficultyProfile, DifficultyWeights,
    LevelThresholds,
};
pub use distractors::{select_distractors, suffix_distractors};

/// Bank file format version.
pub const EXERCISE_BANK_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ExerciseError {
    #[error("pattern {pattern} does not apply at site {site}")]
    InapplicablePattern { pattern: String, site: usize },
    #[error("only {found} safe distractors for {solution:?}, {wanted} requested")]
    InsufficientDistractors {
        solution: String,
        wanted: usize,
        found: usize,
    },
    #[error("at least one distractor must be requested")]
    NoDistractorsRequested,
    #[error("{0:?} is not in the lexicon")]
    WordNotInLexicon(String),
    #[error("lexicon language {lexicon} does not match pattern bank language {patterns}")]
    LanguageMismatch {
        lexicon: Language,
        patterns: Language,
    },
    #[error("quota unreachable: {}", describe_shortfalls(.0))]
    QuotaUnreachable(Vec<Shortfall>),
    #[error("exercise bank version {0} is not supported")]
    UnsupportedVersion(u32),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn describe_shortfalls(s: &[Shortfall]) -> String {
    s.iter()
        .map(|s| format!("{}/{} {} of {}", s.exercise_type, s.level, s.produced, s.wanted))
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExerciseType {
    AddLetter,
    RemoveLetter,
    ChangeLetter,
    ReorderLetters,
    SplitWords,
    WordEnding,
}

impl ExerciseType {
    pub const ALL: [ExerciseType; 6] = [
        ExerciseType::AddLetter,
        ExerciseType::RemoveLetter,
        ExerciseType::ChangeLetter,
        ExerciseType::ReorderLetters,
        ExerciseType::SplitWords,
        ExerciseType::WordEnding,
    ];

    /// The exercise that trains against an error type. Only run-on
    /// boundary errors have one (split-word errors do not).
    pub fn for_error(error: ErrorType, run_on: bool) -> Option<Self> {
        Some(match error {
            ErrorType::Omission => ExerciseType::AddLetter,
            ErrorType::Insertion => ExerciseType::RemoveLetter,
            ErrorType::Substitution => ExerciseType::ChangeLetter,
            ErrorType::Transposition => ExerciseType::ReorderLetters,
            ErrorType::Boundary if run_on => ExerciseType::SplitWords,
            ErrorType::Boundary => return None,
            ErrorType::Morphology => ExerciseType::WordEnding,
        })
    }

    pub fn error_type(self) -> ErrorType {
        match self {
            ExerciseType::AddLetter => ErrorType::Omission,
            ExerciseType::RemoveLetter => ErrorType::Insertion,
            ExerciseType::ChangeLetter => ErrorType::Substitution,
            ExerciseType::ReorderLetters => ErrorType::Transposition,
            ExerciseType::SplitWords => ErrorType::Boundary,
            ExerciseType::WordEnding => ErrorType::Morphology,
        }
    }

    /// Multiple-choice types.
    pub fn has_choices(self) -> bool {
        matches!(
            self,
            ExerciseType::AddLetter | ExerciseType::ChangeLetter | ExerciseType::WordEnding
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ExerciseType::AddLetter => "add_letter",
            ExerciseType::RemoveLetter => "remove_letter",
            ExerciseType::ChangeLetter => "change_letter",
            ExerciseType::ReorderLetters => "reorder_letters",
            ExerciseType::SplitWords => "split_words",
            ExerciseType::WordEnding => "word_ending",
        }
    }
}

impl fmt::Display for ExerciseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DifficultyLevel {
    #[default]
    Initial,
    Easy,
    Medium,
    Hard,
    Expert,
}

impl DifficultyLevel {
    pub const ALL: [DifficultyLevel; 5] = [
        DifficultyLevel::Initial,
        DifficultyLevel::Easy,
        DifficultyLevel::Medium,
        DifficultyLevel::Hard,
        DifficultyLevel::Expert,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// One step up, clamped at Expert.
    pub fn up(self) -> Self {
        Self::from_index(self.index() + 1).unwrap_or(self)
    }

    /// One step down, clamped at Initial.
    pub fn down(self) -> Self {
        self.index().checked_sub(1).and_then(Self::from_index).unwrap_or(self)
    }

    pub fn name(self) -> &'static str {
        match self {
            DifficultyLevel::Initial => "initial",
            DifficultyLevel::Easy => "easy",
            DifficultyLevel::Medium => "medium",
            DifficultyLevel::Hard => "hard",
            DifficultyLevel::Expert => "expert",
        }
    }
}

impl fmt::Display for DifficultyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DifficultyLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|l| l.name() == s.trim().to_lowercase())
            .ok_or_else(|| format!("unknown difficulty level {s:?}"))
    }
}

/// An edit on the stem. Offsets count letters (Unicode scalar values).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Solution {
    /// Put `text` before letter `at`.
    Insert { at: usize, text: String },
    /// Remove `len` letters starting at `at`.
    Delete { at: usize, len: usize },
    /// Replace `len` letters starting at `at` with `text`.
    Replace { at: usize, len: usize, text: String },
    /// Letter `k` of the answer is letter `order[k]` of the stem.
    Reorder { order: Vec<usize> },
    /// Put a space before each listed letter index.
    Split { at: Vec<usize> },
    /// Keep the first `keep` letters and append `text`.
    Suffix { keep: usize, text: String },
}

impl Solution {
    /// The edited stem, or `None` when the edit does not fit it.
    pub fn apply(&self, stem: &str) -> Option<String> {
        let s: Vec<char> = stem.chars().collect();
        let n = s.len();
        let out = match self {
            Solution::Insert { at, text } => {
                (*at <= n && !text.is_empty()).then_some(())?;
                format!("{}{}{}", collect(&s[..*at]), text, collect(&s[*at..]))
            }
            Solution::Delete { at, len } => {
                (*len > 0 && at + len <= n).then_some(())?;
                format!("{}{}", collect(&s[..*at]), collect(&s[at + len..]))
            }
            Solution::Replace { at, len, text } => {
                (at + len <= n).then_some(())?;
                format!("{}{}{}", collect(&s[..*at]), text, collect(&s[at + len..]))
            }
            Solution::Reorder { order } => {
                let mut seen = vec![false; n];
                (order.len() == n).then_some(())?;
                let mut out = String::with_capacity(stem.len());
                for &i in order {
                    if i >= n || std::mem::replace(&mut seen[i], true) {
                        return None;
                    }
                    out.push(s[i]);
                }
                out
            }
            Solution::Split { at } => {
                let ok = !at.is_empty()
                    && at.windows(2).all(|w| w[0] < w[1])
                    && at[0] > 0
                    && at[at.len() - 1] < n;
                ok.then_some(())?;
                let mut out = String::with_capacity(stem.len() + at.len());
                for (i, c) in s.iter().enumerate() {
                    if at.contains(&i) {
                        out.push(' ');
                    }
                    out.push(*c);
                }
                out
            }
            Solution::Suffix { keep, text } => {
                (*keep <= n).then_some(())?;
                format!("{}{}", collect(&s[..*keep]), text)
            }
        };
        Some(out)
    }

    /// The text a multiple-choice answer supplies.
    pub fn choice_text(&self) -> Option<&str> {
        match self {
            Solution::Insert { text, .. }
            | Solution::Replace { text, .. }
            | Solution::Suffix { text, .. } => Some(text),
            _ => None,
        }
    }

    /// Same edit with a different supplied text.
    pub fn with_choice(&self, choice: &str) -> Option<Solution> {
        let mut s = self.clone();
        match &mut s {
            Solution::Insert { text, .. }
            | Solution::Replace { text, .. }
            | Solution::Suffix { text, .. } => *text = choice.to_string(),
            _ => return None,
        }
        Some(s)
    }

    /// Where a multiple-choice answer goes, as shown to the player.
    pub fn slot(&self) -> Option<Slot> {
        match self {
            Solution::Insert { at, .. } => Some(Slot { at: *at, len: 0 }),
            Solution::Replace { at, len, .. } => Some(Slot { at: *at, len: *len }),
            Solution::Suffix { keep, .. } => Some(Slot { at: *keep, len: 0 }),
            _ => None,
        }
    }
}

fn collect(c: &[char]) -> String {
    c.iter().collect()
}

/// The highlighted part of the stem a choice fills: `len` letters from
/// `at` (zero for a gap). For word endings everything from `at` on is
/// replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub at: usize,
    pub len: usize,
}

/// What a player submits: one of the offered choices, or a direct edit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Response {
    Choice { choice: String },
    Edit(Solution),
}

/// Where an exercise came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    /// A corpus pattern applied to a lexicon word.
    Pattern,
    /// A misspelling taken verbatim from the corpus.
    Corpus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exercise {
    pub id: String,
    #[serde(rename = "type")]
    pub exercise_type: ExerciseType,
    pub language: Language,
    /// The correct word, or the correct phrase for split exercises.
    pub target: String,
    pub stem: String,
    pub choices: Vec<String>,
    pub solution: Solution,
    pub level: DifficultyLevel,
    pub provenance: PatternKey,
    pub origin: Origin,
    pub profile: DifficultyProfile,
}

impl Exercise {
    /// Correct iff the response rebuilds the target exactly.
    pub fn judge(&self, response: &Response) -> bool {
        let edit = match response {
            Response::Choice { choice } => {
                if !self.choices.iter().any(|c| c == choice) {
                    return false;
                }
                match self.solution.with_choice(choice) {
                    Some(e) => e,
                    None => return false,
                }
            }
            Response::Edit(e) => e.clone(),
        };
        edit.apply(&self.stem).as_deref() == Some(self.target.as_str())
    }

    /// The exercise as sent to players: no solution, no target.
    pub fn prompt(&self) -> ExercisePrompt {
        ExercisePrompt {
            id: self.id.clone(),
            exercise_type: self.exercise_type,
            language: self.language,
            level: self.level,
            stem: self.stem.clone(),
            choices: self.choices.clone(),
            slot: self.solution.slot(),
        }
    }
}

/// Answer-free view of an exercise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExercisePrompt {
    pub id: String,
    #[serde(rename = "type")]
    pub exercise_type: ExerciseType,
    pub language: Language,
    pub level: DifficultyLevel,
    pub stem: String,
    pub choices: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slot: Option<Slot>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solutions_apply() {
        let cases = [
            (Solution::Insert { at: 2, text: "p".into() }, "emty", "empty"),
            (Solution::Delete { at: 2, len: 1 }, "arround", "around"),
            (Solution::Replace { at: 4, len: 1, text: "o".into() }, "scholl", "school"),
            (Solution::Reorder { order: vec![0, 1, 2, 3, 5, 4] }, "littel", "little"),
            (Solution::Split { at: vec![1] }, "alot", "a lot"),
            (Solution::Suffix { keep: 4, text: "ing".into() }, "warnment", "warning"),
        ];
        for (sol, stem, target) in cases {
            assert_eq!(sol.apply(stem).as_deref(), Some(target), "{sol:?}");
        }
    }

    #[test]
    fn out_of_range_edits_do_not_apply() {
        assert_eq!(Solution::Delete { at: 4, len: 1 }.apply("casa"), None);
        assert_eq!(Solution::Split { at: vec![0] }.apply("alot"), None);
        assert_eq!(Solution::Split { at: vec![2, 1] }.apply("alot"), None);
        assert_eq!(Solution::Reorder { order: vec![0, 0] }.apply("ab"), None);
        assert_eq!(Solution::Insert { at: 1, text: String::new() }.apply("ab"), None);
    }

    #[test]
    fn multibyte_offsets_count_letters() {
        let s = Solution::Replace { at: 2, len: 1, text: "ñ".into() };
        assert_eq!(s.apply("nino").as_deref(), Some("niño"));
        let s = Solution::Insert { at: 3, text: "o".into() };
        assert_eq!(s.apply("añs").as_deref(), Some("añso"));
    }

    #[test]
    fn solution_json_is_tagged() {
        let s = Solution::Split { at: vec![1] };
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"kind":"split","at":[1]}"#);
        let r: Response = serde_json::from_str(r#"{"choice":"b"}"#).unwrap();
        assert_eq!(r, Response::Choice { choice: "b".into() });
        let r: Response = serde_json::from_str(r#"{"kind":"split","at":[1]}"#).unwrap();
        assert_eq!(r, Response::Edit(s));
    }

    #[test]
    fn levels_step_and_clamp() {
        assert_eq!(DifficultyLevel::Initial.down(), DifficultyLevel::Initial);
        assert_eq!(DifficultyLevel::Easy.up(), DifficultyLevel::Medium);
        assert_eq!(DifficultyLevel::Expert.up(), DifficultyLevel::Expert);
        assert!(DifficultyLevel::Initial < DifficultyLevel::Expert);
        assert_eq!("Hard".parse::<DifficultyLevel>(), Ok(DifficultyLevel::Hard));
    }

    #[test]
    fn types_map_to_errors_both_ways() {
        for t in ExerciseType::ALL {
            let e = t.error_type();
            assert_eq!(ExerciseType::for_error(e, true), Some(t));
        }
        assert_eq!(ExerciseType::for_error(ErrorType::Boundary, false), None);
    }
}
