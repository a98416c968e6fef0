mod common;

use std::sync::OnceLock;

use lexdrill_core::text::{
    orthographic_neighbors, phonetic_neighbors, segment_graphemes, to_phonemes, Dialect,
    GraphemeClusterInventory, Language, Lexicon, NeighborCounter,
};
use proptest::prelude::*;

fn small_lexicon(language: Language, n: usize) -> Lexicon {
    let full = common::lexicon(language);
    Lexicon::from_counts(
        language,
        full.entries().iter().take(n).map(|e| (e.form.clone(), e.frequency)),
    )
}

/// Brute-force count of equal-length sequences differing in one place.
fn brute_neighbors<T: PartialEq>(target: &[T], all: &[Vec<T>]) -> usize {
    all.iter()
        .filter(|o| o.len() == target.len() && o.iter().zip(target).filter(|(a, b)| a != b).count() == 1)
        .count()
}

#[test]
fn segmentation_round_trips_every_lexicon_word() {
    for lang in [Language::Es, Language::En] {
        let inv = GraphemeClusterInventory::builtin(lang);
        for e in common::lexicon(lang).entries() {
            assert_eq!(segment_graphemes(&e.form, &inv).concat(), e.form.text());
        }
    }
}

#[test]
fn neighbor_counter_matches_brute_force() {
    let lex = small_lexicon(Language::Es, 1000);
    let words: Vec<Vec<char>> = lex.entries().iter().map(|e| e.form.chars()).collect();
    let strings: Vec<Vec<String>> = words
        .iter()
        .map(|w| w.iter().map(|c| c.to_string()).collect())
        .collect();
    let counter = NeighborCounter::new(strings.iter().map(|w| w.iter().map(String::as_str)));
    for ((e, w), s) in lex.entries().iter().zip(&words).zip(&strings) {
        let fast = counter.count(s.iter().map(String::as_str));
        assert_eq!(fast, brute_neighbors(w, &words), "{}", e.form);
        assert_eq!(orthographic_neighbors(&e.form, &lex).len(), fast, "{}", e.form);
    }
}

#[test]
fn phonetic_neighbors_match_brute_force() {
    let lex = small_lexicon(Language::Es, 400);
    let phon: Vec<Vec<String>> = lex
        .entries()
        .iter()
        .map(|e| to_phonemes(&e.form, Dialect::Castilian).unwrap().phonemes)
        .collect();
    for (e, p) in lex.entries().iter().zip(&phon) {
        let found = phonetic_neighbors(&e.form, &lex, Dialect::Castilian).unwrap();
        assert_eq!(found.len(), brute_neighbors(p, &phon), "{}", e.form);
    }
}

#[test]
fn orthographic_neighbors_are_symmetric() {
    let lex = small_lexicon(Language::En, 1000);
    for e in lex.entries() {
        for n in orthographic_neighbors(&e.form, &lex) {
            let back = orthographic_neighbors(&n, &lex);
            assert!(back.contains(&e.form), "{} / {}", e.form, n);
        }
    }
}

fn es_lexicon() -> &'static Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(|| common::lexicon(Language::Es))
}

proptest! {
    #[test]
    fn g2p_is_deterministic(i in 0usize..8000, seseo in any::<bool>()) {
        let lex = es_lexicon();
        let w = &lex.entries()[i % lex.len()].form;
        let d = if seseo { Dialect::Seseo } else { Dialect::Castilian };
        prop_assert_eq!(to_phonemes(w, d).unwrap(), to_phonemes(w, d).unwrap());
    }
}
