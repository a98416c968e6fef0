use lexdrill_wasm::{classify, phonemize, word_difficulty};
use serde_json::Value;

fn json(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn classify_reports_instances() {
    let v = json(classify("litel", "little", "en"));
    assert_eq!(v["error_count"], 2);
    assert_eq!(v["distance"], 2);
    let types: Vec<&str> = v["instances"].as_array().unwrap().iter().map(|i| i["type"].as_str().unwrap()).collect();
    assert!(types.contains(&"omission") && types.contains(&"transposition"), "{types:?}");

    let v = json(classify("vurro", "burro", "es"));
    assert_eq!(v["instances"][0]["type"], "substitution");
    assert!(classify("", "burro", "es").is_err());
    assert!(classify("a", "b", "fr").is_err());
}

#[test]
fn phonemize_follows_the_dialect() {
    let v = json(phonemize("Cielo, zapato", "castilian"));
    assert_eq!(v[0]["word"], "cielo");
    assert_eq!(v[0]["phonemes"][0], "θ");
    assert_eq!(v[1]["phonemes"][0], "θ");
    let v = json(phonemize("cielo", "seseo"));
    assert_eq!(v[0]["phonemes"][0], "s");
    assert!(phonemize("...", "castilian").is_err());
    assert!(phonemize("cielo", "rioplatense").is_err());
}

#[test]
fn difficulty_orders_common_before_rare() {
    let common = json(word_difficulty("casa", "castilian"));
    assert_eq!(common["word"], "casa");
    assert!(common["lexicon_size"].as_u64().unwrap() >= 5000);
    let rare = json(word_difficulty("desafortunadamente", "castilian"));
    let c = common["profile"]["composite"].as_f64().unwrap();
    let r = rare["profile"]["composite"].as_f64().unwrap();
    assert!(c < r, "{c} vs {r}");
    // dense neighborhoods count as hard, so a short common word need not be easy
    let levels = ["initial", "easy", "medium", "hard", "expert"];
    assert!(levels.contains(&common["level"].as_str().unwrap()));
    // 133rd entry of the frequency list
    assert_eq!(common["profile"]["frequency_rank"], 133);
    assert!(word_difficulty("qwxz", "castilian").is_err());
}
