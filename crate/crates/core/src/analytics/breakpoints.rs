//! Penalized mean-shift changepoint detection.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::stats::welch_t_test;
use crate::{Error, Result};

pub const MIN_SERIES_LEN: usize = 4;

/// What the values of a series measure; counts are variance-stabilized
/// before segmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Counts,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Penalty {
    /// `p · ln(n)`.
    Bic {
        p: f64,
    },
    Fixed {
        value: f64,
    },
}

impl Penalty {
    pub fn value(&self, n: usize) -> f64 {
        match *self {
            Penalty::Bic { p } => p * libm::log(n as f64),
            Penalty::Fixed { value } => value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakpointConfig {
    pub penalty: Penalty,
    pub min_segment: usize,
    /// Nominal per-test level before family-wise correction.
    pub alpha: f64,
}

impl Default for BreakpointConfig {
    fn default() -> Self {
        Self {
            penalty: Penalty::Bic { p: 3.0 },
            min_segment: 2,
            alpha: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub series_key: String,
    /// First bin of the new segment.
    pub index: usize,
    pub pre_mean: f64,
    pub post_mean: f64,
    pub p_value: f64,
    pub significant: bool,
}

/// Anscombe transform `2 √(x + 3/8)`; Poisson counts come out with
/// variance close to 1.
pub fn anscombe(x: f64) -> f64 {
    2.0 * libm::sqrt(x.max(0.0) + 0.375)
}

/// Noise variance from first differences, `var(Δx) / 2`, floored at 1e-8.
/// Robust to a small number of mean shifts.
pub fn difference_variance(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 1e-8;
    }
    let d: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let m = d.iter().sum::<f64>() / d.len() as f64;
    let v = d.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / d.len() as f64;
    (v / 2.0).max(1e-8)
}

/// Normal mean-change segment cost `Σ (x - x̄)² / σ²` over prefix sums.
#[derive(Debug, Clone)]
pub struct MeanCost {
    s1: Vec<f64>,
    s2: Vec<f64>,
    inv_var: f64,
}

impl MeanCost {
    pub fn new(x: &[f64], variance: f64) -> Self {
        let mut s1 = vec![0.0; x.len() + 1];
        let mut s2 = vec![0.0; x.len() + 1];
        for (i, v) in x.iter().enumerate() {
            s1[i + 1] = s1[i] + v;
            s2[i + 1] = s2[i] + v * v;
        }
        Self {
            s1,
            s2,
            inv_var: 1.0 / variance,
        }
    }

    pub fn len(&self) -> usize {
        self.s1.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cost of `x[a..b]`.
    pub fn cost(&self, a: usize, b: usize) -> f64 {
        let m = (b - a) as f64;
        let s = self.s1[b] - self.s1[a];
        ((self.s2[b] - self.s2[a]) - s * s / m) * self.inv_var
    }

    /// Total penalized cost of the segmentation starting new segments at
    /// `changepoints`.
    pub fn penalized(&self, changepoints: &[usize], penalty: f64) -> f64 {
        let mut bounds = vec![0];
        bounds.extend_from_slice(changepoints);
        bounds.push(self.len());
        bounds
            .windows(2)
            .map(|w| self.cost(w[0], w[1]))
            .sum::<f64>()
            + penalty * changepoints.len() as f64
    }
}

fn backtrack(last: &[usize], n: usize) -> Vec<usize> {
    let mut cps = Vec::new();
    let mut t = n;
    while last[t] > 0 {
        t = last[t];
        cps.push(t);
    }
    cps.reverse();
    cps
}

/// Optimal partitioning by full O(n²) dynamic programming. Ties go to the
/// earliest last changepoint.
pub fn optimal_partition(cost: &MeanCost, penalty: f64, min_segment: usize) -> Vec<usize> {
    let n = cost.len();
    let ms = min_segment.max(1);
    let mut f = vec![f64::INFINITY; n + 1];
    let mut last = vec![0usize; n + 1];
    f[0] = -penalty;
    for t in ms..=n {
        for s in (0..=t - ms).filter(|&s| s == 0 || s >= ms) {
            let c = f[s] + cost.cost(s, t) + penalty;
            if c < f[t] {
                f[t] = c;
                last[t] = s;
            }
        }
    }
    backtrack(&last, n)
}

/// Pruned exact linear time search. Produces the same segmentation as
/// [`optimal_partition`]; a candidate found dominated at time `t` is
/// dropped once `t + min_segment` is reached, when `t` itself becomes a
/// feasible changepoint for every later end.
pub fn pelt(cost: &MeanCost, penalty: f64, min_segment: usize) -> Vec<usize> {
    let n = cost.len();
    let ms = min_segment.max(1);
    let mut f = vec![f64::INFINITY; n + 1];
    let mut last = vec![0usize; n + 1];
    f[0] = -penalty;
    // (candidate, time at which it was first dominated)
    let mut cands: Vec<(usize, Option<usize>)> = Vec::new();
    for t in ms..=n {
        let s_new = t - ms;
        if s_new == 0 || s_new >= ms {
            cands.push((s_new, None));
        }
        let mut vals = Vec::with_capacity(cands.len());
        for &(s, _) in &cands {
            let c = f[s] + cost.cost(s, t) + penalty;
            vals.push(f[s] + cost.cost(s, t));
            if c < f[t] {
                f[t] = c;
                last[t] = s;
            }
        }
        for (cand, v) in cands.iter_mut().zip(vals) {
            if cand.1.is_none() && v > f[t] {
                cand.1 = Some(t);
            }
        }
        cands.retain(|&(_, dead)| dead.is_none_or(|d| t + 1 < d + ms));
    }
    backtrack(&last, n)
}

/// Segment, then test each changepoint by comparing the raw values of its
/// two adjacent segments. `significant` is the uncorrected `p < alpha`.
pub fn detect_breakpoints(
    series_key: &str,
    values: &[f64],
    kind: SeriesKind,
    config: &BreakpointConfig,
) -> Result<Vec<Breakpoint>> {
    let n = values.len();
    if n < MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort(n));
    }
    let work: Vec<f64> = match kind {
        SeriesKind::Counts => values.iter().map(|&v| anscombe(v)).collect(),
        SeriesKind::Continuous => values.to_vec(),
    };
    let cost = MeanCost::new(&work, difference_variance(&work));
    let cps = pelt(&cost, config.penalty.value(n), config.min_segment);
    let mut bounds = vec![0];
    bounds.extend_from_slice(&cps);
    bounds.push(n);
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    Ok((1..bounds.len() - 1)
        .map(|k| {
            let pre = &values[bounds[k - 1]..bounds[k]];
            let post = &values[bounds[k]..bounds[k + 1]];
            let p_value = welch_t_test(pre, post).map_or(1.0, |w| w.p_value);
            Breakpoint {
                series_key: series_key.into(),
                index: bounds[k],
                pre_mean: mean(pre),
                post_mean: mean(post),
                p_value,
                significant: p_value < config.alpha,
            }
        })
        .collect())
}

/// Bonferroni: significant iff `p < alpha / tests`. Zero tests leaves the
/// flags untouched.
pub fn correct_significance(breakpoints: &mut [Breakpoint], alpha: f64, tests: usize) {
    if tests == 0 {
        return;
    }
    let level = alpha / tests as f64;
    for b in breakpoints {
        b.significant = b.p_value < level;
    }
}
