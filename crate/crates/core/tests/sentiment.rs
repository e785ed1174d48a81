use culturomics_core::analytics::SentimentAnalyzer;
use proptest::prelude::*;
use serde::Deserialize;
use std::sync::LazyLock;

static ANALYZER: LazyLock<SentimentAnalyzer> = LazyLock::new(SentimentAnalyzer::default);

#[derive(Deserialize)]
struct Golden {
    text: String,
    compound: f64,
}

#[test]
fn matches_reference_scores() {
    let analyzer = SentimentAnalyzer::default();
    let golden: Vec<Golden> = include_str!("fixtures/sentiment_golden.jsonl")
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(golden.len(), 50);
    for g in &golden {
        let got = analyzer.score(&g.text).0;
        assert!(
            (got - g.compound).abs() < 1e-6,
            "{:?}: {got} vs {}",
            g.text,
            g.compound
        );
    }
}

#[test]
fn out_of_lexicon_is_zero() {
    let a = SentimentAnalyzer::default();
    for text in [
        "",
        "Rhinolophus affinis roosts in limestone caves.",
        "12 34 56",
        "...",
    ] {
        assert_eq!(a.score(text).0, 0.0, "{text:?}");
    }
}

proptest! {
    #[test]
    fn bounded_on_arbitrary_text(text in any::<String>()) {
        let s = ANALYZER.score(&text).0;
        prop_assert!((-1.0..=1.0).contains(&s));
    }

    #[test]
    fn bounded_on_lexicon_heavy_text(words in proptest::collection::vec(
        proptest::sample::select(vec!["good", "GREAT", "not", "bad", "very", "!!!", "but", "never", "so", "least", "no", "😁", "kind", "of"]),
        0..40,
    )) {
        let s = ANALYZER.score(&words.join(" ")).0;
        prop_assert!((-1.0..=1.0).contains(&s));
    }
}
