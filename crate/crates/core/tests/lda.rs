use culturomics_core::relevance::{lda_fit, lda_fit_observed, prepare_corpus, LdaConfig};
use culturomics_core::text::Stopwords;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// 500 documents, alternating between two disjoint 50-word vocabularies.
fn two_theme_corpus(seed: u64) -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..500)
        .map(|d| {
            let theme = if d % 2 == 0 { "cave" } else { "court" };
            (0..40)
                .map(|_| format!("{theme}{}", rng.random_range(0..50)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

#[test]
fn two_themes_are_recovered() {
    let corpus = prepare_corpus(&two_theme_corpus(3), &Stopwords::default(), 2).unwrap();
    let total = corpus.token_count() as u64;
    let cfg = LdaConfig {
        topics: 2,
        iterations: 150,
        seed: 11,
        ..LdaConfig::default()
    };
    let started = std::time::Instant::now();
    let model = lda_fit_observed(&corpus, &cfg, |_, m| {
        assert_eq!(m.topic_totals().iter().sum::<u64>(), total)
    })
    .unwrap();
    assert!(started.elapsed().as_secs() < 60);
    let top = model.top_words(10);
    let mut themes = Vec::new();
    for words in &top.topics {
        let cave = words.iter().filter(|w| w.starts_with("cave")).count();
        let purity = cave.max(words.len() - cave) as f64 / words.len() as f64;
        assert!(purity >= 0.9, "{words:?}");
        themes.push(cave > words.len() / 2);
    }
    assert_ne!(themes[0], themes[1]);
}

#[test]
fn same_seed_same_counts() {
    let corpus = prepare_corpus(&two_theme_corpus(4)[..100], &Stopwords::default(), 2).unwrap();
    let cfg = LdaConfig {
        topics: 4,
        iterations: 20,
        seed: 99,
        ..LdaConfig::default()
    };
    let a = lda_fit(&corpus, &cfg).unwrap();
    let b = lda_fit(&corpus, &cfg).unwrap();
    assert_eq!(a, b);
    let c = lda_fit(&corpus, &LdaConfig { seed: 100, ..cfg }).unwrap();
    assert_ne!(a.doc_topic_counts, c.doc_topic_counts);
}
