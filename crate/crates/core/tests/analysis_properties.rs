mod common;

use std::sync::OnceLock;

use lexdrill_core::analysis::{align, apply_script, classify_pair, damerau_distance, ErrorType};
use lexdrill_core::text::{Language, Lexicon};
use proptest::prelude::*;

fn es_lexicon() -> &'static Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(|| common::lexicon(Language::Es))
}

#[derive(Debug, Clone)]
enum Mutation {
    Insert(usize, char),
    Delete(usize),
    Substitute(usize, char),
    Swap(usize),
}

fn mutation() -> impl Strategy<Value = Mutation> {
    let letter = prop::sample::select("abcdeilmnorstuvzñá".chars().collect::<Vec<_>>());
    prop_oneof![
        (any::<usize>(), letter.clone()).prop_map(|(i, c)| Mutation::Insert(i, c)),
        any::<usize>().prop_map(Mutation::Delete),
        (any::<usize>(), letter).prop_map(|(i, c)| Mutation::Substitute(i, c)),
        any::<usize>().prop_map(Mutation::Swap),
    ]
}

fn mutate(word: &str, muts: &[Mutation]) -> String {
    let mut w: Vec<char> = word.chars().collect();
    for m in muts {
        let n = w.len();
        match *m {
            Mutation::Insert(i, c) => w.insert(i % (n + 1), c),
            Mutation::Delete(i) if n > 1 => {
                w.remove(i % n);
            }
            Mutation::Substitute(i, c) if n > 0 => w[i % n] = c,
            Mutation::Swap(i) if n > 1 => w.swap(i % (n - 1), i % (n - 1) + 1),
            _ => {}
        }
    }
    w.into_iter().collect()
}

proptest! {
    #[test]
    fn distance_is_a_sane_metric(a in "[a-e]{0,8}", b in "[a-e]{0,8}") {
        let d = damerau_distance(&a, &b);
        prop_assert_eq!(d, damerau_distance(&b, &a));
        prop_assert_eq!(damerau_distance(&a, &a), 0);
        prop_assert!(d <= a.len() + b.len());
        prop_assert_eq!(d == 0, a == b);
    }

    #[test]
    fn scripts_replay_on_mutated_lexicon_words(
        i in 0usize..5000,
        muts in prop::collection::vec(mutation(), 1..4),
    ) {
        let correct = es_lexicon().entries()[i].form.text().to_string();
        let wrong = mutate(&correct, &muts);
        let ops = align(&wrong, &correct);
        prop_assert_eq!(apply_script(&wrong, &ops), correct.clone());
        prop_assert_eq!(ops.len(), damerau_distance(&wrong, &correct));
    }

    /// Every edit becomes one instance, unless a morphology instance
    /// absorbs the whole pair.
    #[test]
    fn every_edit_is_classified(
        i in 0usize..5000,
        muts in prop::collection::vec(mutation(), 1..4),
    ) {
        let correct = es_lexicon().entries()[i].form.text().to_string();
        let wrong = mutate(&correct, &muts);
        prop_assume!(wrong != correct);
        let ann = classify_pair(&wrong, &correct, Language::Es).unwrap();
        prop_assert_eq!(ann.error_count, ann.instances.len());
        if ann.instances.iter().any(|x| x.error_type == ErrorType::Morphology) {
            prop_assert_eq!(ann.instances.len(), 1);
        } else {
            prop_assert_eq!(ann.instances.len(), align(&wrong, &correct).len());
        }
        for inst in &ann.instances {
            prop_assert!(inst.position <= inst.reference.chars().count());
            prop_assert!(inst.expected != inst.written);
        }
    }
}
