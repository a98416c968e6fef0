//! Fixture loaders shared by the integration tests.
#![allow(dead_code)]

use lexdrill_core::analysis::{annotate_corpus, parse_corpus, ErrorAnnotation};
use lexdrill_core::patterns::{extract_patterns, PatternBank};
use lexdrill_core::text::{GraphemeClusterInventory, Language, Lexicon};

pub fn data(name: &str) -> String {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn tag(language: Language) -> &'static str {
    match language {
        Language::Es => "es",
        Language::En => "en",
    }
}

pub fn lexicon(language: Language) -> Lexicon {
    Lexicon::parse_tsv(language, &data(&format!("{}_freq.tsv", tag(language)))).unwrap()
}

pub fn annotations(language: Language) -> Vec<ErrorAnnotation> {
    let lines = parse_corpus(&data(&format!("corpus_{}.tsv", tag(language)))).unwrap();
    let (ok, failed) = annotate_corpus(&lines, language);
    assert!(failed.is_empty(), "{failed:?}");
    ok
}

pub fn patterns(language: Language) -> PatternBank {
    extract_patterns(&annotations(language), &GraphemeClusterInventory::builtin(language))
}
