mod common;

use std::sync::OnceLock;

use lexdrill_core::metrics::{score_reading, score_writing};
use lexdrill_core::text::{Language, Lexicon};
use proptest::prelude::*;

fn es_lexicon() -> &'static Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(|| common::lexicon(Language::Es))
}

/// A reference text of lexicon words and a transcript with random
/// misspellings, dropped words, added words and joined words.
fn texts() -> impl Strategy<Value = (Vec<String>, Vec<String>)> {
    prop::collection::vec((0usize..3000, 0u8..10, 0usize..3000), 1..12).prop_map(|spec| {
        let lex = es_lexicon();
        let mut reference = Vec::new();
        let mut transcript: Vec<String> = Vec::new();
        for (i, action, j) in spec {
            let w = lex.entries()[i].form.text().to_string();
            reference.push(w.clone());
            match action {
                0 => {}
                1 => transcript.push(w.chars().skip(1).collect::<String>().max("x".into())),
                2 => {
                    transcript.push(w);
                    transcript.push(lex.entries()[j].form.text().to_string());
                }
                3 => match transcript.last_mut() {
                    Some(prev) => prev.push_str(&w),
                    None => transcript.push(w),
                },
                4 => transcript.push(format!("{w}{w}")),
                _ => transcript.push(w),
            }
        }
        (reference, transcript)
    })
}

proptest! {
    #[test]
    fn writing_rates_are_consistent((reference, transcript) in texts()) {
        let s = score_writing(&reference, &transcript, Language::Es).unwrap();
        prop_assert!(s.rate_words_with_errors <= s.errors_per_word + 1e-12);
        prop_assert!(s.words_with_errors <= s.total_words);
        match s.errors_per_wrong_word {
            Some(r) => prop_assert!(r >= 1.0),
            None => prop_assert_eq!(s.total_errors, 0),
        }
        let r = score_reading(&reference, &transcript, Language::Es).unwrap();
        prop_assert_eq!(r.total_errors, s.total_errors);
    }

    #[test]
    fn a_perfect_copy_scores_zero((reference, _) in texts()) {
        let s = score_writing(&reference, &reference, Language::Es).unwrap();
        prop_assert_eq!(s.total_errors, 0);
        prop_assert_eq!(s.rate_words_with_errors, 0.0);
        prop_assert_eq!(s.errors_per_word, 0.0);
        prop_assert_eq!(s.errors_per_wrong_word, None);
    }
}
