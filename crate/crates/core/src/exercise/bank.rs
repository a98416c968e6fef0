use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::corrupt::{corrupt, corrupt_phrase, derive_solution};
use super::difficulty::{assign_level, DifficultyModel, DifficultyWeights, LevelThresholds};
use super::distractors::{select_distractors, suffix_distractors};
use super::{
    DifficultyLevel, Exercise, ExerciseError, ExerciseType, Origin, Solution,
    EXERCISE_BANK_VERSION,
};
use crate::analysis::{classify_pair, ErrorType};
use crate::patterns::{extract_patterns, ErrorPattern, PatternBank, PatternKey};
use crate::text::{
    normalize, AffixInventory, Dialect, GraphemeClusterInventory, Language, Lexicon, WordForm,
};

/// Shortest lexicon word used as a target.
const MIN_TARGET_LEN: usize = 3;

/// Requested exercise counts per (type, level) cell.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Quotas(BTreeMap<(ExerciseType, DifficultyLevel), usize>);

impl Quotas {
    /// The same count in every cell.
    pub fn uniform(per_cell: usize) -> Self {
        let mut q = Self::default();
        for t in ExerciseType::ALL {
            for l in DifficultyLevel::ALL {
                q.set(t, l, per_cell);
            }
        }
        q
    }

    /// `per_level` exercises per level, split as evenly as possible over
    /// the six types (earlier types take the remainder).
    pub fn per_level(per_level: usize) -> Self {
        let mut q = Self::default();
        let n = ExerciseType::ALL.len();
        for l in DifficultyLevel::ALL {
            for (i, t) in ExerciseType::ALL.into_iter().enumerate() {
                q.set(t, l, per_level / n + usize::from(i < per_level % n));
            }
        }
        q
    }

    pub fn set(&mut self, t: ExerciseType, l: DifficultyLevel, n: usize) {
        self.0.insert((t, l), n);
    }

    pub fn get(&self, t: ExerciseType, l: DifficultyLevel) -> usize {
        self.0.get(&(t, l)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }
}

#[derive(Debug, Clone)]
pub struct BankConfig {
    pub quotas: Quotas,
    pub seed: u64,
    pub dialect: Dialect,
    /// Patterns seen fewer times are ignored.
    pub min_support: u32,
    /// Wrong options per letter exercise.
    pub letter_distractors: usize,
    /// Options per word-ending exercise, the correct one included.
    pub ending_choices: usize,
    /// Largest share of each cell taken verbatim from the corpus.
    pub corpus_share: f64,
    pub weights: DifficultyWeights,
}

impl BankConfig {
    pub fn new(quotas: Quotas, seed: u64) -> Self {
        Self {
            quotas,
            seed,
            dialect: Dialect::default(),
            min_support: 1,
            letter_distractors: 3,
            ending_choices: 3,
            corpus_share: 0.4,
            weights: DifficultyWeights::default(),
        }
    }
}

/// A cell that could not be filled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shortfall {
    pub exercise_type: ExerciseType,
    pub level: DifficultyLevel,
    pub wanted: usize,
    pub produced: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExerciseBank {
    pub version: u32,
    pub language: Language,
    pub seed: u64,
    pub exercises: Vec<Exercise>,
}

impl ExerciseBank {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("exercise bank serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ExerciseError> {
        let bank: ExerciseBank = serde_json::from_str(s)?;
        if bank.version != EXERCISE_BANK_VERSION {
            return Err(ExerciseError::UnsupportedVersion(bank.version));
        }
        Ok(bank)
    }

    pub fn get(&self, id: &str) -> Option<&Exercise> {
        self.exercises
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.exercises[i])
    }
}

/// A corrupted target waiting for validation and choices.
struct Candidate {
    exercise_type: ExerciseType,
    target: String,
    stem: String,
    solution: Solution,
    provenance: PatternKey,
    origin: Origin,
    /// Lexicon word whose profile grades the exercise.
    graded_by: String,
}

/// Build a bank that fills every quota cell or fails with the shortfall.
///
/// Targets come from two sources: corpus misspellings used verbatim
/// (at most `corpus_share` of each cell) and corpus patterns applied to
/// lexicon words. Every exercise must survive the closed-loop check:
/// classifying its stem against its target yields exactly the error the
/// exercise trains (reordering exercises at Hard and Expert carry a second
/// transposition and are exempt). Levels are composite quintiles over the
/// words in each exercise type's candidate pool.
pub fn generate_bank(
    lexicon: &Lexicon,
    patterns: &PatternBank,
    config: &BankConfig,
) -> Result<ExerciseBank, ExerciseError> {
    let (bank, shortfalls) = generate_bank_lenient(lexicon, patterns, config)?;
    if shortfalls.is_empty() {
        Ok(bank)
    } else {
        Err(ExerciseError::QuotaUnreachable(shortfalls))
    }
}

/// Like [`generate_bank`], but returns whatever could be built together
/// with the unfilled cells.
pub fn generate_bank_lenient(
    lexicon: &Lexicon,
    patterns: &PatternBank,
    config: &BankConfig,
) -> Result<(ExerciseBank, Vec<Shortfall>), ExerciseError> {
    let language = lexicon.language();
    if patterns.language != language {
        return Err(ExerciseError::LanguageMismatch {
            lexicon: language,
            patterns: patterns.language,
        });
    }
    let model = DifficultyModel::build(lexicon, config.dialect, config.weights);
    let inventory = GraphemeClusterInventory::builtin(language);
    let affixes = AffixInventory::builtin(language);

    let mut seen = HashSet::new();
    let mut pool: Vec<Candidate> = Vec::new();
    for c in corpus_candidates(lexicon, patterns, &inventory)
        .into_iter()
        .chain(pattern_candidates(lexicon, patterns, config.min_support, &inventory))
    {
        if seen.insert((c.exercise_type, c.target.clone(), c.stem.clone())) {
            pool.push(c);
        }
    }

    // Quintiles per exercise type: an Initial word-ending exercise is the
    // easiest word-ending exercise, even though suffixed words are long.
    let mut graded: BTreeMap<ExerciseType, BTreeMap<&str, f64>> = BTreeMap::new();
    for c in &pool {
        let p = model.profile(&c.graded_by)?;
        graded
            .entry(c.exercise_type)
            .or_default()
            .insert(c.graded_by.as_str(), p.composite);
    }
    let thresholds: BTreeMap<ExerciseType, LevelThresholds> = graded
        .into_iter()
        .map(|(t, words)| {
            let values: Vec<f64> = words.into_values().collect();
            (t, LevelThresholds::from_composites(&values))
        })
        .collect();

    let mut cells: BTreeMap<(ExerciseType, DifficultyLevel), Vec<&Candidate>> = BTreeMap::new();
    for c in &pool {
        let level = assign_level(model.profile(&c.graded_by)?, &thresholds[&c.exercise_type]);
        cells.entry((c.exercise_type, level)).or_default().push(c);
    }

    let ctx = CellContext {
        lexicon,
        patterns,
        affixes: &affixes,
        model: &model,
        config,
    };
    let mut exercises = Vec::with_capacity(config.quotas.total());
    let mut shortfalls = Vec::new();
    for (stream, t) in ExerciseType::ALL.into_iter().enumerate() {
        for l in DifficultyLevel::ALL {
            let wanted = config.quotas.get(t, l);
            if wanted == 0 {
                continue;
            }
            // One independent stream per cell keeps cells reproducible on
            // their own.
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream((stream * DifficultyLevel::ALL.len() + l.index()) as u64);
            let candidates = cells.get(&(t, l)).map_or(&[][..], Vec::as_slice);
            let filled = ctx.fill(t, l, candidates, wanted, &mut rng);
            if filled.len() < wanted {
                shortfalls.push(Shortfall {
                    exercise_type: t,
                    level: l,
                    wanted,
                    produced: filled.len(),
                });
            }
            exercises.extend(filled);
        }
    }
    exercises.sort_by(|a, b| a.id.cmp(&b.id));
    Ok((
        ExerciseBank {
            version: EXERCISE_BANK_VERSION,
            language,
            seed: config.seed,
            exercises,
        },
        shortfalls,
    ))
}

struct CellContext<'a> {
    lexicon: &'a Lexicon,
    patterns: &'a PatternBank,
    affixes: &'a AffixInventory,
    model: &'a DifficultyModel,
    config: &'a BankConfig,
}

impl CellContext<'_> {
    fn fill(
        &self,
        t: ExerciseType,
        level: DifficultyLevel,
        candidates: &[&Candidate],
        wanted: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<Exercise> {
        let mut corpus: Vec<&Candidate> =
            candidates.iter().copied().filter(|c| c.origin == Origin::Corpus).collect();
        let mut applied: Vec<&Candidate> =
            candidates.iter().copied().filter(|c| c.origin == Origin::Pattern).collect();
        corpus.shuffle(rng);
        applied.shuffle(rng);
        let corpus_cap = (wanted as f64 * self.config.corpus_share).floor() as usize;

        let mut out = Vec::with_capacity(wanted);
        let mut targets = HashSet::new();
        let mut used = HashSet::new();
        let mut from_corpus = 0;
        // First pass keeps targets distinct within the cell; the second
        // allows a target to reappear with another corruption.
        for distinct_targets in [true, false] {
            for (i, c) in corpus.iter().chain(&applied).enumerate() {
                if out.len() == wanted {
                    return out;
                }
                let is_corpus = c.origin == Origin::Corpus;
                if used.contains(&i)
                    || (is_corpus && from_corpus == corpus_cap)
                    || (distinct_targets && targets.contains(c.target.as_str()))
                {
                    continue;
                }
                if let Some(e) = self.finish(c, t, level, rng) {
                    used.insert(i);
                    targets.insert(c.target.as_str());
                    from_corpus += usize::from(is_corpus);
                    out.push(e);
                }
            }
        }
        out
    }

    /// Validate a candidate and dress it as an exercise.
    fn finish(
        &self,
        c: &Candidate,
        t: ExerciseType,
        level: DifficultyLevel,
        rng: &mut ChaCha8Rng,
    ) -> Option<Exercise> {
        let language = self.lexicon.language();
        if !closed_loop(&c.stem, &c.target, t.error_type(), language) {
            return None;
        }
        let (stem, solution) =
            if t == ExerciseType::ReorderLetters && level >= DifficultyLevel::Hard {
                self.second_swap(c, rng)?
            } else {
                (c.stem.clone(), c.solution.clone())
            };

        let mut choices = Vec::new();
        if let Some(answer) = solution.choice_text() {
            let safe = |d: &str| {
                solution
                    .with_choice(d)
                    .and_then(|s| s.apply(&stem))
                    .is_some_and(|built| {
                        built != c.target && built != stem && !self.lexicon.contains(&built)
                    })
            };
            let distractors = if t == ExerciseType::WordEnding {
                suffix_distractors(
                    answer,
                    &c.provenance.written,
                    self.affixes,
                    self.config.ending_choices.saturating_sub(1),
                    safe,
                )
            } else {
                select_distractors(answer, self.patterns, self.config.letter_distractors, rng, safe)
            };
            choices = distractors.ok()?;
            choices.push(answer.to_string());
            choices.shuffle(rng);
        }

        let profile = self.model.profile(&c.graded_by).ok()?.clone();
        Some(Exercise {
            id: exercise_id(t, &c.target, &stem),
            exercise_type: t,
            language,
            target: c.target.clone(),
            stem,
            choices,
            solution,
            level,
            provenance: c.provenance.clone(),
            origin: c.origin,
            profile,
        })
    }

    /// Add one more adjacent swap away from the first one.
    fn second_swap(&self, c: &Candidate, rng: &mut ChaCha8Rng) -> Option<(String, Solution)> {
        let s: Vec<char> = c.stem.chars().collect();
        let t: Vec<char> = c.target.chars().collect();
        let touched: Vec<usize> = (0..s.len()).filter(|&i| s[i] != t[i]).collect();
        let (lo, hi) = (*touched.first()?, *touched.last()?);
        let options: Vec<usize> = (0..s.len().saturating_sub(1))
            .filter(|&i| (i + 1 < lo || i > hi + 1) && s[i] != s[i + 1])
            .filter(|&i| {
                let mut v = s.clone();
                v.swap(i, i + 1);
                !self.lexicon.contains(&v.iter().collect::<String>())
            })
            .collect();
        if options.is_empty() {
            return None;
        }
        let i = options[rng.random_range(0..options.len())];
        let mut v = s;
        v.swap(i, i + 1);
        let stem: String = v.into_iter().collect();
        let solution = derive_solution(ExerciseType::ReorderLetters, &stem, &c.target)?;
        Some((stem, solution))
    }
}

fn closed_loop(stem: &str, target: &str, expected: ErrorType, language: Language) -> bool {
    classify_pair(stem, target, language)
        .map(|a| a.instances.len() == 1 && a.instances[0].error_type == expected)
        .unwrap_or(false)
}

/// Content hash of (type, target, stem).
fn exercise_id(t: ExerciseType, target: &str, stem: &str) -> String {
    let mut h = Sha256::new();
    for part in [t.name(), target, stem] {
        h.update(part.as_bytes());
        h.update([0u8]);
    }
    hex::encode(&h.finalize()[..8])
}

/// Corpus misspellings with exactly one trainable error.
fn corpus_candidates(
    lexicon: &Lexicon,
    patterns: &PatternBank,
    inventory: &GraphemeClusterInventory,
) -> Vec<Candidate> {
    let language = lexicon.language();
    let mut out = Vec::new();
    for ex in &patterns.examples {
        let Ok(ann) = classify_pair(&ex.wrong, &ex.correct, language) else {
            continue;
        };
        let [inst] = ann.instances.as_slice() else {
            continue;
        };
        let Some(t) = ExerciseType::for_error(inst.error_type, inst.is_run_on()) else {
            continue;
        };
        let (stem, target) = (ann.wrong.clone(), ann.correct.clone());
        let solution = match t {
            ExerciseType::WordEnding if inst.position > 0 => Solution::Suffix {
                keep: inst.position,
                text: inst.expected.clone(),
            },
            ExerciseType::WordEnding => continue,
            _ => match derive_solution(t, &stem, &target) {
                Some(s) => s,
                None => continue,
            },
        };
        let graded_by = target.rsplit(' ').next().unwrap_or_default().to_string();
        if lexicon.contains(&stem) || !lexicon.contains(&graded_by) {
            continue;
        }
        let Some(provenance) = extract_patterns(std::slice::from_ref(&ann), inventory)
            .patterns
            .into_iter()
            .next()
            .map(|p| p.key)
        else {
            continue;
        };
        out.push(Candidate {
            exercise_type: t,
            target,
            stem,
            solution,
            provenance,
            origin: Origin::Corpus,
            graded_by,
        });
    }
    out
}

/// Relaxed corpus patterns applied to every lexicon word they match.
fn pattern_candidates(
    lexicon: &Lexicon,
    patterns: &PatternBank,
    min_support: u32,
    inventory: &GraphemeClusterInventory,
) -> Vec<Candidate> {
    // Relaxing merges patterns that differed only in context.
    let mut relaxed: BTreeMap<PatternKey, ErrorPattern> = BTreeMap::new();
    for p in patterns.usable(min_support) {
        let r = if p.is_run_on() { p.clone() } else { p.relaxed() };
        relaxed
            .entry(r.key.clone())
            .and_modify(|e| e.support += p.support)
            .or_insert(r);
    }
    let words: Vec<&WordForm> = lexicon
        .entries()
        .iter()
        .map(|e| &e.form)
        .filter(|w| w.len() >= MIN_TARGET_LEN)
        .collect();

    let mut out = Vec::new();
    for p in relaxed.values() {
        let Some(t) = ExerciseType::for_error(p.error_type(), p.is_run_on()) else {
            continue;
        };
        if t == ExerciseType::SplitWords {
            run_on_candidates(lexicon, p, &words, &mut out);
            continue;
        }
        for w in &words {
            if !w.text().contains(p.focus()) {
                continue;
            }
            for site in crate::patterns::match_sites(p, w, inventory) {
                let Ok(c) = corrupt(w, p, site, inventory) else {
                    continue;
                };
                if lexicon.contains(&c.stem) {
                    continue;
                }
                out.push(Candidate {
                    exercise_type: t,
                    target: w.text().to_string(),
                    stem: c.stem,
                    solution: c.solution,
                    provenance: p.key.clone(),
                    origin: Origin::Pattern,
                    graded_by: w.text().to_string(),
                });
            }
        }
    }
    out
}

/// Keep the pattern's leading words and vary the last one.
fn run_on_candidates(
    lexicon: &Lexicon,
    pattern: &ErrorPattern,
    words: &[&WordForm],
    out: &mut Vec<Candidate>,
) {
    let language = lexicon.language();
    let lead: Option<Vec<WordForm>> = pattern
        .focus()
        .split(' ')
        .collect::<Vec<_>>()
        .split_last()
        .map(|(_, lead)| lead.iter().filter_map(|w| normalize(w, language).ok()).collect());
    let Some(lead) = lead else { return };
    for w in words {
        let mut phrase = lead.clone();
        phrase.push((*w).clone());
        let Ok(c) = corrupt_phrase(&phrase, pattern) else {
            continue;
        };
        if lexicon.contains(&c.stem) {
            continue;
        }
        out.push(Candidate {
            exercise_type: ExerciseType::SplitWords,
            target: phrase.iter().map(WordForm::text).collect::<Vec<_>>().join(" "),
            stem: c.stem,
            solution: c.solution,
            provenance: pattern.key.clone(),
            origin: Origin::Pattern,
            graded_by: w.text().to_string(),
        });
    }
}
