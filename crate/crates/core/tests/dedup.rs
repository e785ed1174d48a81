use chrono::{TimeDelta, TimeZone, Utc};
use culturomics_core::postprocess::{
    cosine, mark_syndication, tfidf_vectors, DatedVector, SyndicationConfig,
    DEFAULT_SIMILARITY_THRESHOLD,
};
use culturomics_core::text::Stopwords;
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

const WORDS: &[&str] = &[
    "bat",
    "cave",
    "colony",
    "roost",
    "virus",
    "farmer",
    "orchard",
    "fruit",
    "night",
    "wing",
    "forest",
    "island",
    "ranger",
    "survey",
    "habitat",
    "mango",
    "pollen",
    "nectar",
    "insect",
    "moth",
    "bridge",
    "attic",
    "church",
    "winter",
    "summer",
    "rescue",
    "vet",
    "study",
    "scientist",
    "sound",
    "signal",
    "radar",
    "wind",
    "turbine",
    "storm",
    "river",
    "valley",
    "village",
    "market",
    "law",
    "police",
    "court",
    "school",
    "museum",
    "festival",
    "harvest",
];

struct Article {
    url: String,
    at: chrono::DateTime<Utc>,
    text: String,
}

/// 200 articles: 120 originals and 80 copies of an earlier article with
/// 2-10% of the words replaced, published within 30 days of the source.
fn corpus(seed: u64) -> Vec<Article> {
    let mut rng = StdRng::seed_from_u64(seed);
    let t0 = Utc.with_ymd_and_hms(2020, 1, 1, 0, 0, 0).unwrap();
    let mut out: Vec<Article> = Vec::new();
    for i in 0..200 {
        let at = t0 + TimeDelta::hours(rng.random_range(0..24 * 400));
        let url = format!("https://news{i}.example/a");
        if i >= 120 {
            let src = &out[rng.random_range(0..120)];
            let mut words: Vec<String> = src.text.split(' ').map(String::from).collect();
            let edits = (words.len() as f64 * rng.random_range(0.02..0.10)).ceil() as usize;
            for _ in 0..edits {
                let k = rng.random_range(0..words.len());
                words[k] = WORDS.choose(&mut rng).unwrap().to_string();
            }
            let at = src.at + TimeDelta::hours(rng.random_range(1..24 * 30));
            out.push(Article {
                url,
                at,
                text: words.join(" "),
            });
        } else {
            let text = (0..150)
                .map(|_| *WORDS.choose(&mut rng).unwrap())
                .collect::<Vec<_>>()
                .join(" ");
            out.push(Article { url, at, text });
        }
    }
    out
}

#[test]
fn matches_brute_force() {
    for seed in 0..3 {
        let arts = corpus(seed);
        let vectors = tfidf_vectors(
            &arts.iter().map(|a| a.text.as_str()).collect::<Vec<_>>(),
            &Stopwords::default(),
        );
        let dated: Vec<DatedVector> = arts
            .iter()
            .zip(&vectors)
            .map(|(a, v)| DatedVector {
                url: a.url.clone(),
                published_at: a.at,
                vector: v.clone(),
            })
            .collect();
        let cfg = SyndicationConfig::default();
        let verdicts = mark_syndication(&dated, &cfg);
        assert_eq!(verdicts.len(), 200);

        // Oracle: all pairs, earliest qualifying predecessor.
        let mut order: Vec<usize> = (0..200).collect();
        order.sort_by(|&a, &b| {
            arts[a]
                .at
                .cmp(&arts[b].at)
                .then_with(|| arts[a].url.cmp(&arts[b].url))
        });
        for (pos, &i) in order.iter().enumerate() {
            let expected = order[..pos]
                .iter()
                .find(|&&j| {
                    arts[i].at - arts[j].at <= cfg.window
                        && cosine(&vectors[i], &vectors[j]) > DEFAULT_SIMILARITY_THRESHOLD
                })
                .map(|&j| arts[j].url.clone());
            let v = &verdicts[pos];
            assert_eq!(v.url, arts[i].url);
            assert_eq!(v.duplicate_of, expected, "seed {seed} article {i}");
            assert_eq!(v.is_original, v.duplicate_of.is_none());
        }
        let copies = verdicts.iter().filter(|v| !v.is_original).count();
        assert!(copies >= 60, "only {copies} copies flagged");
    }
}
