//! Export tables. Rows are sorted before writing so identical inputs give
//! byte-identical files.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use culturomics_core::Timestamp;
use serde::{Deserialize, Serialize};

use crate::store::{write_atomic, write_json};
use crate::{Error, Result};

pub const EXPORT_SCHEMA_VERSION: u32 = 1;

/// A row type with its column names in field order.
pub trait TableRow: Serialize {
    const COLUMNS: &'static [&'static str];
}

macro_rules! table_row {
    ($t:ty, [$($c:literal),* $(,)?]) => {
        impl TableRow for $t {
            const COLUMNS: &'static [&'static str] = &[$($c),*];
        }
    };
}

table_row!(
    FunnelRow,
    [
        "taxon_id",
        "queried",
        "relevant",
        "irrelevant",
        "scraped",
        "full_text_unavailable",
        "original",
        "syndicated",
        "analyzed",
        "posts",
        "posts_analyzed",
    ]
);
table_row!(CountryRow, ["taxon_id", "month", "country", "count"]);
table_row!(
    SeriesRow,
    [
        "taxon_id",
        "source",
        "metric",
        "bin_start",
        "bin_width_days",
        "value",
        "n"
    ]
);
table_row!(
    BreakpointRow,
    [
        "taxon_id",
        "source",
        "metric",
        "index",
        "bin_start",
        "pre_mean",
        "post_mean",
        "p_value",
        "significant",
    ]
);
table_row!(CooccurrenceRow, ["taxon_id", "label_i", "label_j", "count"]);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Usage(format!(
                "unknown export format {other:?}; expected csv or json"
            ))),
        }
    }
}

impl ExportFormat {
    fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// Article counts per stage for one taxon.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FunnelRow {
    pub taxon_id: String,
    pub queried: u64,
    pub relevant: u64,
    pub irrelevant: u64,
    pub scraped: u64,
    pub full_text_unavailable: u64,
    pub original: u64,
    pub syndicated: u64,
    pub analyzed: u64,
    pub posts: u64,
    pub posts_analyzed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CountryRow {
    pub taxon_id: String,
    pub month: String,
    pub country: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub taxon_id: String,
    pub source: String,
    pub metric: String,
    pub bin_start: Timestamp,
    pub bin_width_days: f64,
    pub value: f64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakpointRow {
    pub taxon_id: String,
    pub source: String,
    pub metric: String,
    /// Position within the series as exported.
    pub index: usize,
    pub bin_start: Timestamp,
    pub pre_mean: f64,
    pub post_mean: f64,
    pub p_value: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CooccurrenceRow {
    pub taxon_id: String,
    pub label_i: String,
    pub label_j: String,
    pub count: u64,
}

/// Everything the analytics stage computes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalyticsResults {
    pub series: Vec<SeriesRow>,
    pub breakpoints: Vec<BreakpointRow>,
    pub country: Vec<CountryRow>,
    pub cooccurrence: Vec<CooccurrenceRow>,
    /// Number of series tested, the Bonferroni family size.
    pub tests: usize,
}

fn table<T: TableRow>(path: &Path, rows: &[T], format: ExportFormat) -> Result<()> {
    match format {
        ExportFormat::Json => write_json(path, rows),
        ExportFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(true)
                .from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| Error::Format {
                    path: path.into(),
                    line: 0,
                    reason: e.to_string(),
                })?;
            }
            let mut bytes = w.into_inner().map_err(|e| Error::Io {
                path: path.into(),
                source: e.into_error(),
            })?;
            // The csv crate writes headers with the first row.
            if rows.is_empty() {
                bytes = format!("{}\n", T::COLUMNS.join(",")).into_bytes();
            }
            write_atomic(path, &bytes)
        }
    }
}

#[derive(Serialize)]
struct ExportManifest<'a> {
    schema_version: u32,
    format: &'a str,
    files: Vec<String>,
}

/// Write the export tables into `dir`; returns the written paths.
pub fn write_exports(
    dir: &Path,
    format: ExportFormat,
    funnel: &[FunnelRow],
    results: &AnalyticsResults,
) -> Result<Vec<PathBuf>> {
    let ext = format.extension();
    let mut written = Vec::new();
    let mut put = |name: &str, f: &dyn Fn(&Path) -> Result<()>| -> Result<()> {
        let p = dir.join(format!("{name}.{ext}"));
        f(&p)?;
        written.push(p);
        Ok(())
    };
    put("funnel", &|p| table(p, funnel, format))?;
    put("volume_by_country", &|p| table(p, &results.country, format))?;
    put("series", &|p| table(p, &results.series, format))?;
    put("breakpoints", &|p| table(p, &results.breakpoints, format))?;
    put("cooccurrence", &|p| table(p, &results.cooccurrence, format))?;
    let files = written
        .iter()
        .filter_map(|p| p.file_name())
        .map(|n| n.to_string_lossy().into_owned())
        .collect();
    let manifest = dir.join("manifest.json");
    write_json(
        &manifest,
        &ExportManifest {
            schema_version: EXPORT_SCHEMA_VERSION,
            format: ext,
            files,
        },
    )?;
    written.push(manifest);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_tables_keep_headers() {
        let dir = tempfile::tempdir().unwrap();
        let files = write_exports(
            dir.path(),
            ExportFormat::Csv,
            &[],
            &AnalyticsResults::default(),
        )
        .unwrap();
        assert_eq!(files.len(), 6);
        let funnel = std::fs::read_to_string(dir.path().join("funnel.csv")).unwrap();
        assert!(funnel.starts_with("taxon_id,queried,relevant,irrelevant"));
        let bp = std::fs::read_to_string(dir.path().join("breakpoints.csv")).unwrap();
        assert_eq!(bp.lines().count(), 1);
    }

    #[test]
    fn rows_match_headers() {
        let dir = tempfile::tempdir().unwrap();
        let row = FunnelRow {
            taxon_id: "lion".into(),
            queried: 3,
            relevant: 2,
            irrelevant: 1,
            ..Default::default()
        };
        write_exports(
            dir.path(),
            ExportFormat::Csv,
            &[row],
            &AnalyticsResults::default(),
        )
        .unwrap();
        let text = std::fs::read_to_string(dir.path().join("funnel.csv")).unwrap();
        assert_eq!(text.lines().next().unwrap(), FunnelRow::COLUMNS.join(","));
        assert_eq!(text.lines().nth(1), Some("lion,3,2,1,0,0,0,0,0,0,0"));
    }

    #[test]
    fn format_parsing() {
        assert_eq!("json".parse::<ExportFormat>().unwrap(), ExportFormat::Json);
        assert!(matches!(
            "xml".parse::<ExportFormat>(),
            Err(Error::Usage(_))
        ));
    }
}
