//! Browser bindings for three read-only operations: classifying a
//! misspelling, transcribing Spanish to phonemes, and profiling how hard a
//! Spanish word is to spell. Every function returns a JSON string (or an
//! error message) so the page needs nothing beyond `JSON.parse`.

use std::cell::OnceCell;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use lexdrill_core::analysis::{classify_pair, damerau_distance, ErrorInstance};
use lexdrill_core::exercise::{
    assign_level, DifficultyLevel, DifficultyModel, DifficultyProfile, DifficultyWeights,
    LevelThresholds,
};
use lexdrill_core::text::{normalize, to_phonemes, tokenize, Dialect, Language, Lexicon};

const ES_LEXICON: &str = include_str!("../../../data/es_freq.tsv");

fn parse<T: std::str::FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| e.to_string())
}

fn to_json(value: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Classification {
    wrong: String,
    correct: String,
    distance: usize,
    error_count: usize,
    instances: Vec<ErrorInstance>,
}

/// Classify every error in `wrong` against its correction `correct`.
/// `language` is `es` or `en`.
#[wasm_bindgen]
pub fn classify(wrong: &str, correct: &str, language: &str) -> Result<String, String> {
    let language: Language = parse(language)?;
    let a = classify_pair(wrong, correct, language).map_err(|e| e.to_string())?;
    to_json(&Classification {
        distance: damerau_distance(&a.wrong, &a.correct),
        wrong: a.wrong,
        correct: a.correct,
        error_count: a.error_count,
        instances: a.instances,
    })
}

#[derive(Serialize)]
struct Transcription {
    word: String,
    phonemes: Vec<String>,
}

/// Phonemes of each word of a Spanish text. `dialect` is `castilian` or
/// `seseo`.
#[wasm_bindgen]
pub fn phonemize(text: &str, dialect: &str) -> Result<String, String> {
    let dialect: Dialect = parse(dialect)?;
    let words = tokenize(text, Language::Es);
    if words.is_empty() {
        return Err("no Spanish words in the input".into());
    }
    let out = words
        .iter()
        .map(|w| {
            let form = normalize(w, Language::Es).map_err(|e| e.to_string())?;
            let p = to_phonemes(&form, dialect).map_err(|e| e.to_string())?;
            Ok(Transcription {
                word: form.text().to_string(),
                phonemes: p.phonemes,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    to_json(&out)
}

struct Model {
    lexicon: Lexicon,
    dialect: Dialect,
    difficulty: DifficultyModel,
    thresholds: LevelThresholds,
}

impl Model {
    fn build(dialect: Dialect) -> Self {
        let lexicon = Lexicon::parse_tsv(Language::Es, ES_LEXICON).expect("bundled lexicon parses");
        let difficulty = DifficultyModel::build(&lexicon, dialect, DifficultyWeights::default());
        let composites: Vec<f64> = lexicon
            .entries()
            .iter()
            .filter_map(|e| difficulty.profile(e.form.text()).ok())
            .map(|p| p.composite)
            .collect();
        Model {
            thresholds: LevelThresholds::from_composites(&composites),
            lexicon,
            dialect,
            difficulty,
        }
    }
}

thread_local! {
    static MODELS: [OnceCell<Model>; 2] = const { [OnceCell::new(), OnceCell::new()] };
}

#[derive(Serialize)]
struct Difficulty<'a> {
    word: String,
    level: DifficultyLevel,
    profile: &'a DifficultyProfile,
    lexicon_size: usize,
    dialect: Dialect,
}

/// Difficulty profile and level of a word from the bundled Spanish
/// frequency list. The model is built on first use for each dialect.
#[wasm_bindgen]
pub fn word_difficulty(word: &str, dialect: &str) -> Result<String, String> {
    let dialect: Dialect = parse(dialect)?;
    let form = normalize(word, Language::Es).map_err(|e| e.to_string())?;
    MODELS.with(|models| {
        let slot = match dialect {
            Dialect::Castilian => &models[0],
            Dialect::Seseo => &models[1],
        };
        let model = slot.get_or_init(|| Model::build(dialect));
        let profile = model.difficulty.profile(form.text()).map_err(|e| e.to_string())?;
        to_json(&Difficulty {
            word: form.text().to_string(),
            level: assign_level(profile, &model.thresholds),
            profile,
            lexicon_size: model.lexicon.len(),
            dialect: model.dialect,
        })
    })
}
