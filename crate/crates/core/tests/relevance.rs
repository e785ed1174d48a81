use culturomics_core::relevance::{
    classify_titles, decide_relevance, KeywordScorer, TopicSchema, TopicScores, RELEVANCE_THRESHOLD,
};

fn above(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1)
}

fn below(x: f64) -> f64 {
    f64::from_bits(x.to_bits() - 1)
}

#[test]
fn boundary_for_every_label() {
    let schema = TopicSchema::standard();
    let t = RELEVANCE_THRESHOLD;
    assert_eq!(t, 0.5);
    for (i, label) in schema.labels().iter().enumerate() {
        let relevant = schema.is_relevant(label);
        for (value, over) in [
            (0.0, false),
            (below(t), false),
            (t, false),
            (above(t), true),
            (1.0, true),
        ] {
            let mut s = TopicScores::zeros(schema.len());
            s.0[i] = value;
            assert_eq!(
                decide_relevance(&s, &schema, t).unwrap(),
                relevant && over,
                "{label} at {value}"
            );

            // Every other label just at the threshold changes nothing.
            let mut s = TopicScores(vec![t; schema.len()]);
            s.0[i] = value;
            assert_eq!(
                decide_relevance(&s, &schema, t).unwrap(),
                relevant && over,
                "{label} among ties"
            );

            // Irrelevant labels fully on change nothing either.
            let mut s = TopicScores::zeros(schema.len());
            for l in schema.irrelevant() {
                s.0[schema.index_of(l).unwrap()] = 1.0;
            }
            if relevant {
                s.0[i] = value;
            }
            assert_eq!(
                decide_relevance(&s, &schema, t).unwrap(),
                relevant && over,
                "{label} with noise"
            );
        }
    }
}

#[test]
fn fallback_scorer_contract() {
    let schema = TopicSchema::standard();
    let titles: Vec<String> = [
        "Bats found roosting in church attic",
        "Home team wins the championship final",
        "Stock market falls as oil price rises",
        "",
        "Fruit bat virus study published by scientists",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let scorer = KeywordScorer::default();
    let a = classify_titles(&titles, &schema, &scorer, 2).unwrap();
    let b = classify_titles(&titles, &schema, &scorer, 100).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), titles.len());
    for row in &a {
        assert_eq!(row.0.len(), 23);
        assert!(row.0.iter().all(|v| (0.0..=1.0).contains(v)));
    }
    assert!(a[3].0.iter().all(|&v| v == 0.0));
    assert!(a[1].0[schema.index_of("sports").unwrap()] > 0.5);
    assert!(!decide_relevance(&a[1], &schema, 0.5).unwrap());
}
