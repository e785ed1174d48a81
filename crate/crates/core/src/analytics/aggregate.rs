//! Counts and mean sentiment by month, country and time bin.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use chrono::{Datelike, TimeDelta};
use serde::{Deserialize, Serialize};

use crate::Timestamp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    News,
    Posts,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::News => "news",
            Source::Posts => "posts",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VolumeCell {
    /// `YYYY-MM`.
    pub month: String,
    /// Empty when unknown.
    pub country: String,
    pub count: u64,
}

/// Record counts per (month, country), sorted by month then country.
pub fn month_country_counts<'a, I>(records: I) -> Vec<VolumeCell>
where
    I: IntoIterator<Item = (Timestamp, Option<&'a str>)>,
{
    let mut cells: BTreeMap<(String, String), u64> = BTreeMap::new();
    for (t, country) in records {
        let month = alloc::format!("{:04}-{:02}", t.year(), t.month());
        *cells
            .entry((month, String::from(country.unwrap_or(""))))
            .or_default() += 1;
    }
    cells
        .into_iter()
        .map(|((month, country), count)| VolumeCell {
            month,
            country,
            count,
        })
        .collect()
}

/// Time bins `[start + k·stride, start + k·stride + width)` for every `k`
/// whose bin starts before `end`. Tumbling when `stride == width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinSpec {
    pub start: Timestamp,
    pub end: Timestamp,
    pub width: TimeDelta,
    pub stride: TimeDelta,
}

impl BinSpec {
    pub fn two_weeks(start: Timestamp, end: Timestamp) -> Self {
        Self {
            start,
            end,
            width: TimeDelta::weeks(2),
            stride: TimeDelta::weeks(2),
        }
    }

    pub fn bin_count(&self) -> usize {
        let span = (self.end - self.start).num_seconds();
        let stride = self.stride.num_seconds().max(1);
        if span <= 0 {
            0
        } else {
            ((span + stride - 1) / stride) as usize
        }
    }

    pub fn bin_start(&self, k: usize) -> Timestamp {
        self.start + self.stride * k as i32
    }

    /// Indices of the bins containing `t`.
    pub fn bins_of(&self, t: Timestamp) -> impl Iterator<Item = usize> + '_ {
        let off = (t - self.start).num_seconds();
        let stride = self.stride.num_seconds().max(1);
        let width = self.width.num_seconds();
        let hi = if off < 0 { -1 } else { off / stride };
        let lo = if off < 0 {
            0
        } else {
            ((off - width).div_euclid(stride) + 1).max(0)
        };
        let n = self.bin_count() as i64;
        (lo..=hi.min(n - 1))
            .filter(move |&k| off >= 0 && off - k * stride < width)
            .map(|k| k as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub taxon_id: String,
    pub source: Source,
    pub bin_start: Timestamp,
    pub bin_width_secs: i64,
    /// Count, normalized count or mean sentiment.
    pub value: f64,
    pub n: u64,
}

/// Record counts for every bin, empty bins included. With `normalize`
/// each value is divided by the series maximum.
pub fn volume_series<I>(
    taxon_id: &str,
    source: Source,
    times: I,
    bins: &BinSpec,
    normalize: bool,
) -> Vec<SeriesPoint>
where
    I: IntoIterator<Item = Timestamp>,
{
    let mut counts = alloc::vec![0u64; bins.bin_count()];
    for t in times {
        for k in bins.bins_of(t) {
            counts[k] += 1;
        }
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| SeriesPoint {
            taxon_id: taxon_id.into(),
            source,
            bin_start: bins.bin_start(k),
            bin_width_secs: bins.width.num_seconds(),
            value: if normalize && max > 0 {
                c as f64 / max as f64
            } else {
                c as f64
            },
            n: c,
        })
        .collect()
}

/// Mean score per bin; bins without scores are omitted.
pub fn sentiment_series<I>(
    taxon_id: &str,
    source: Source,
    scored: I,
    bins: &BinSpec,
) -> Vec<SeriesPoint>
where
    I: IntoIterator<Item = (Timestamp, f64)>,
{
    let mut acc = alloc::vec![(0.0f64, 0u64); bins.bin_count()];
    for (t, s) in scored {
        for k in bins.bins_of(t) {
            acc[k].0 += s;
            acc[k].1 += 1;
        }
    }
    acc.iter()
        .enumerate()
        .filter(|(_, (_, n))| *n > 0)
        .map(|(k, &(sum, n))| SeriesPoint {
            taxon_id: taxon_id.into(),
            source,
            bin_start: bins.bin_start(k),
            bin_width_secs: bins.width.num_seconds(),
            value: sum / n as f64,
            n,
        })
        .collect()
}

/// Article score as the mean of its snippet scores.
pub fn article_sentiment(snippet_scores: &[f64]) -> Option<f64> {
    if snippet_scores.is_empty() {
        None
    } else {
        Some(snippet_scores.iter().sum::<f64>() / snippet_scores.len() as f64)
    }
}
