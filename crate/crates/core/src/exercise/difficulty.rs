use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{DifficultyLevel, ExerciseError};
use crate::text::{AffixInventory, Dialect, Language, Lexicon, NeighborCounter, WordForm};

/// The five word properties that make an exercise harder, plus their
/// weighted combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifficultyProfile {
    pub frequency_rank: usize,
    pub length: usize,
    pub ortho_neighbors: usize,
    pub phon_neighbors: usize,
    pub morph_complexity: usize,
    /// Weighted mean of the min-max-normalized components, in [0, 1].
    pub composite: f64,
}

/// Component weights for the composite score (equal by default).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifficultyWeights {
    pub rank: f64,
    pub length: f64,
    pub ortho: f64,
    pub phon: f64,
    pub morph: f64,
}

impl Default for DifficultyWeights {
    fn default() -> Self {
        Self {
            rank: 1.0,
            length: 1.0,
            ortho: 1.0,
            phon: 1.0,
            morph: 1.0,
        }
    }
}

impl DifficultyWeights {
    fn as_array(&self) -> [f64; 5] {
        [self.rank, self.length, self.ortho, self.phon, self.morph]
    }
}

/// Profiles for every lexicon word, normalized over the whole lexicon.
#[derive(Debug, Clone)]
pub struct DifficultyModel {
    profiles: HashMap<String, DifficultyProfile>,
}

impl DifficultyModel {
    /// Neighbor counts use the wildcard index, so building is linear in
    /// the lexicon size. English has no phoneme rules; its phonetic
    /// component is zero for every word.
    pub fn build(lexicon: &Lexicon, dialect: Dialect, weights: DifficultyWeights) -> Self {
        let entries = lexicon.entries();
        let letters: Vec<Vec<String>> = entries
            .iter()
            .map(|e| e.form.chars().iter().map(char::to_string).collect())
            .collect();
        let ortho = NeighborCounter::new(letters.iter().map(|w| w.iter().map(String::as_str)));

        let phonemes: Option<Vec<Vec<String>>> = match lexicon.language() {
            Language::Es => lexicon.phonemizations(dialect).ok(),
            Language::En => None,
        };
        let phon = phonemes
            .as_ref()
            .map(|p| NeighborCounter::new(p.iter().map(|w| w.iter().map(String::as_str))));

        let affixes = AffixInventory::builtin(lexicon.language());
        let raw: Vec<[usize; 5]> = entries
            .iter()
            .enumerate()
            .map(|(i, e)| {
                [
                    e.rank,
                    e.form.len(),
                    ortho.count(letters[i].iter().map(String::as_str)),
                    match (&phon, &phonemes) {
                        (Some(c), Some(p)) => c.count(p[i].iter().map(String::as_str)),
                        _ => 0,
                    },
                    affixes.morph_complexity(e.form.text()),
                ]
            })
            .collect();

        let mut lo = [usize::MAX; 5];
        let mut hi = [0usize; 5];
        for r in &raw {
            for k in 0..5 {
                lo[k] = lo[k].min(r[k]);
                hi[k] = hi[k].max(r[k]);
            }
        }
        let w = weights.as_array();
        let wsum: f64 = w.iter().sum();
        let profiles = entries
            .iter()
            .zip(&raw)
            .map(|(e, r)| {
                let composite = if wsum > 0.0 {
                    (0..5)
                        .map(|k| w[k] * normalized(r[k], lo[k], hi[k]))
                        .sum::<f64>()
                        / wsum
                } else {
                    0.0
                };
                let profile = DifficultyProfile {
                    frequency_rank: r[0],
                    length: r[1],
                    ortho_neighbors: r[2],
                    phon_neighbors: r[3],
                    morph_complexity: r[4],
                    composite,
                };
                (e.form.text().to_string(), profile)
            })
            .collect();
        Self { profiles }
    }

    pub fn profile(&self, word: &str) -> Result<&DifficultyProfile, ExerciseError> {
        self.profiles
            .get(word)
            .ok_or_else(|| ExerciseError::WordNotInLexicon(word.to_string()))
    }
}

fn normalized(x: usize, lo: usize, hi: usize) -> f64 {
    if hi == lo {
        0.0
    } else {
        (x - lo) as f64 / (hi - lo) as f64
    }
}

/// Profile of one lexicon word with equal weights.
pub fn difficulty(
    target: &WordForm,
    lexicon: &Lexicon,
    dialect: Dialect,
) -> Result<DifficultyProfile, ExerciseError> {
    if !lexicon.contains(target.text()) {
        return Err(ExerciseError::WordNotInLexicon(target.text().to_string()));
    }
    DifficultyModel::build(lexicon, dialect, DifficultyWeights::default())
        .profile(target.text())
        .cloned()
}

/// Quintile cut points over a set of composite scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelThresholds {
    /// 20th, 40th, 60th and 80th percentiles (nearest rank).
    pub cuts: [f64; 4],
}

impl LevelThresholds {
    pub fn from_composites(values: &[f64]) -> Self {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        let mut cuts = [0.0; 4];
        if !v.is_empty() {
            for (q, cut) in cuts.iter_mut().enumerate() {
                let rank = ((q + 1) * v.len()).div_ceil(5).max(1);
                *cut = v[rank - 1];
            }
        }
        Self { cuts }
    }
}

/// Level by quintile; a score equal to a cut point takes the easier level.
pub fn assign_level(profile: &DifficultyProfile, thresholds: &LevelThresholds) -> DifficultyLevel {
    let above = thresholds
        .cuts
        .iter()
        .filter(|c| profile.composite > **c)
        .count();
    DifficultyLevel::ALL[above]
}
