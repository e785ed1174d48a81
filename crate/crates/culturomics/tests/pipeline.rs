mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use common::mini_dir;
use culturomics::config::PipelineConfig;
use culturomics::pipeline::{
    ClassifiedRecord, ExportFormat, FunnelRow, Pipeline, Stage, StageRecord,
};
use culturomics::store::read_jsonl;
use culturomics::Error;
use serde::Deserialize;

#[derive(Deserialize)]
struct Expected {
    funnel: Vec<FunnelRow>,
    rejected_posts: usize,
}

fn config(out: &Path) -> PipelineConfig {
    let mut c = PipelineConfig::load(&mini_dir().join("config.toml")).unwrap();
    c.output_dir = out.to_path_buf();
    c
}

fn expected() -> Expected {
    serde_json::from_str(&fs::read_to_string(mini_dir().join("expected_funnel.json")).unwrap())
        .unwrap()
}

/// Every output file that should be identical between equivalent runs.
/// The stage log and report carry wall-clock timestamps and are left out.
fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    for sub in ["stages", "taxonomy", "analytics", "exports"] {
        for e in fs::read_dir(root.join(sub)).unwrap() {
            let p = e.unwrap().path();
            if p.is_file() {
                out.insert(
                    p.strip_prefix(root).unwrap().to_path_buf(),
                    fs::read(&p).unwrap(),
                );
            }
        }
    }
    out
}

#[test]
fn mini_corpus_funnel_matches_design() {
    let dir = tempfile::tempdir().unwrap();
    let report = Pipeline::new(config(dir.path()))
        .unwrap()
        .run_all()
        .unwrap();
    let want = expected();
    assert_eq!(report.funnel, want.funnel);
    assert_eq!(report.rejected_posts, want.rejected_posts);
    for row in &report.funnel {
        assert_eq!(
            row.relevant + row.irrelevant,
            row.queried,
            "{}",
            row.taxon_id
        );
        assert_eq!(
            row.scraped + row.full_text_unavailable,
            row.relevant,
            "{}",
            row.taxon_id
        );
        assert_eq!(
            row.original + row.syndicated,
            row.scraped,
            "{}",
            row.taxon_id
        );
        assert!(row.analyzed <= row.original);
    }
    let funnel_csv = fs::read_to_string(dir.path().join("exports/funnel.csv")).unwrap();
    assert_eq!(funnel_csv.lines().count(), 4);
    for name in [
        "volume_by_country.csv",
        "series.csv",
        "breakpoints.csv",
        "cooccurrence.csv",
        "manifest.json",
    ] {
        assert!(dir.path().join("exports").join(name).exists(), "{name}");
    }
}

#[test]
fn interrupted_run_resumes_to_identical_outputs() {
    let clean = tempfile::tempdir().unwrap();
    Pipeline::new(config(clean.path()))
        .unwrap()
        .run_all()
        .unwrap();

    let dir = tempfile::tempdir().unwrap();
    let p = Pipeline::new(config(dir.path())).unwrap();
    p.run(&[Stage::Taxonomy, Stage::Retrieve, Stage::Classify])
        .unwrap();
    // Simulate a crash halfway through classification: half the records
    // written, a torn last line, and the stage not marked complete.
    let classified = dir.path().join("stages/classified.jsonl");
    let text = fs::read_to_string(&classified).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let mut cut = lines[..lines.len() / 2].join("\n");
    cut.push_str("\n{\"taxon_id\":\"lion\",\"url\":\"https://");
    fs::write(&classified, cut).unwrap();
    fs::write(
        dir.path().join("manifest.json"),
        r#"{"completed":["taxonomy","retrieve"]}"#,
    )
    .unwrap();

    let report = p.run_all().unwrap();
    assert_eq!(report.funnel, expected().funnel);
    assert_eq!(snapshot(dir.path()), snapshot(clean.path()));

    let log: Vec<StageRecord> = read_jsonl(&dir.path().join("stage_log.jsonl")).unwrap();
    let keys: BTreeSet<_> = log
        .iter()
        .map(|r| (r.stage, r.taxon_id.clone(), r.url.clone()))
        .collect();
    assert_eq!(keys.len(), log.len(), "stage log has duplicates");
    let c: Vec<ClassifiedRecord> = read_jsonl(&classified).unwrap();
    assert_eq!(c.len(), lines.len());
}

#[test]
fn rerun_is_a_no_op() {
    let dir = tempfile::tempdir().unwrap();
    let p = Pipeline::new(config(dir.path())).unwrap();
    p.run_all().unwrap();
    let before = snapshot(dir.path());
    let log_before = fs::read(dir.path().join("stage_log.jsonl")).unwrap();
    p.run_all().unwrap();
    assert_eq!(snapshot(dir.path()), before);
    assert_eq!(
        fs::read(dir.path().join("stage_log.jsonl")).unwrap(),
        log_before
    );
}

#[test]
fn stages_need_their_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let p = Pipeline::new(config(dir.path())).unwrap();
    match p.run(&[Stage::Analyze]) {
        Err(Error::Dependency { stage, missing }) => {
            assert_eq!(stage, "analyze");
            assert_eq!(missing, "dedup");
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        p.run(&[Stage::Retrieve]),
        Err(Error::Dependency { .. })
    ));
    // Listing the prerequisite in the same run is enough.
    p.run(&[Stage::Retrieve, Stage::Taxonomy]).unwrap();
    assert_eq!(
        p.completed().unwrap(),
        [Stage::Taxonomy, Stage::Retrieve].into()
    );
}

#[test]
fn json_export_and_unwritable_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = Pipeline::new(config(dir.path()))
        .unwrap()
        .with_export_format(ExportFormat::Json);
    p.run_all().unwrap();
    let rows: Vec<FunnelRow> =
        serde_json::from_str(&fs::read_to_string(dir.path().join("exports/funnel.json")).unwrap())
            .unwrap();
    assert_eq!(rows, expected().funnel);

    let file = dir.path().join("plain-file");
    fs::write(&file, "x").unwrap();
    let r = Pipeline::new(config(&file.join("out")));
    assert!(matches!(r, Err(Error::Io { .. })), "{:?}", r.err());
}
