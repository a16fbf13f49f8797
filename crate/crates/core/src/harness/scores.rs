use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::report::ReportSummary;
use crate::classify::DataClass;
use crate::error::{Error, Result};

/// Datasets per collection when comparing consistency.
pub const CONSISTENCY_SAMPLE: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    HigherBetter,
    LowerBetter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Metric {
    VisualQuality,
    Stability,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::VisualQuality, Metric::Stability];

    pub fn direction(self) -> Direction {
        match self {
            Metric::VisualQuality => Direction::HigherBetter,
            Metric::Stability => Direction::LowerBetter,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::VisualQuality => "visual_quality",
            Metric::Stability => "stability",
        }
    }

    pub fn value(self, s: &ReportSummary) -> Option<f64> {
        match self {
            Metric::VisualQuality => Some(s.mean_rho),
            Metric::Stability => s.mean_sigma,
        }
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Scores each value against the best (0) and the median (0.5), linearly,
/// capped at 1. When the median equals the best, values at the best score 0
/// and all others 1.
pub fn relative_scores(values: &BTreeMap<String, f64>, direction: Direction) -> Result<BTreeMap<String, f64>> {
    if values.is_empty() {
        return Err(Error::InvalidRequest("no values to score".into()));
    }
    if let Some((k, v)) = values.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::InvalidRequest(format!("non-finite value {v} for {k}")));
    }
    let mut sorted: Vec<f64> = values.values().copied().collect();
    sorted.sort_by(f64::total_cmp);
    let best = match direction {
        Direction::HigherBetter => sorted[sorted.len() - 1],
        Direction::LowerBetter => sorted[0],
    };
    let spread = (median(&sorted) - best).abs();
    Ok(values
        .iter()
        .map(|(k, &x)| {
            let score = if spread == 0.0 {
                if x == best {
                    0.0
                } else {
                    1.0
                }
            } else {
                (0.5 * (x - best).abs() / spread).min(1.0)
            };
            (k.clone(), score)
        })
        .collect())
}

/// Dataset -> algorithm -> relative score.
pub type ScoreTable = BTreeMap<String, BTreeMap<String, f64>>;

/// Relative scores of every dataset with at least two measured algorithms.
pub fn relative_score_table(summaries: &[ReportSummary], metric: Metric) -> ScoreTable {
    let mut values: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for s in summaries {
        if let Some(v) = metric.value(s).filter(|v| v.is_finite()) {
            values.entry(s.dataset.clone()).or_default().insert(s.algorithm.clone(), v);
        }
    }
    values
        .into_iter()
        .filter(|(_, v)| v.len() >= 2)
        .filter_map(|(d, v)| Some((d, relative_scores(&v, metric.direction()).ok()?)))
        .collect()
}

/// Sum over algorithms of the population variance of their scores across the
/// collection.
pub fn consistency(collection: &[&BTreeMap<String, f64>]) -> f64 {
    let mut per_alg: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for scores in collection {
        for (a, &s) in scores.iter() {
            per_alg.entry(a).or_default().push(s);
        }
    }
    per_alg
        .values()
        .map(|v| {
            let n = v.len() as f64;
            let m = v.iter().sum::<f64>() / n;
            v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyRow {
    pub class: String,
    pub metric: Metric,
    pub datasets: usize,
    pub c: f64,
    pub c_random: f64,
    /// The class is more consistent than a random collection of equal size.
    pub consistent: bool,
}

/// Compares each class holding at least [`CONSISTENCY_SAMPLE`] datasets
/// against a random collection of the same size drawn from all datasets.
pub fn consistency_report(
    table: &ScoreTable,
    classes: &BTreeMap<String, DataClass>,
    metric: Metric,
    seed: u64,
) -> Vec<ConsistencyRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<&BTreeMap<String, f64>> = table.values().collect();
    if all.len() < CONSISTENCY_SAMPLE {
        log::warn!("only {} scored datasets; consistency needs {CONSISTENCY_SAMPLE}", all.len());
        return Vec::new();
    }
    let random: Vec<&BTreeMap<String, f64>> = all.choose_multiple(&mut rng, CONSISTENCY_SAMPLE).copied().collect();
    let c_random = consistency(&random);

    let mut by_class: BTreeMap<DataClass, Vec<&BTreeMap<String, f64>>> = BTreeMap::new();
    for (d, scores) in table {
        if let Some(c) = classes.get(d) {
            by_class.entry(*c).or_default().push(scores);
        }
    }
    by_class
        .into_iter()
        .filter(|(class, members)| {
            let enough = members.len() >= CONSISTENCY_SAMPLE;
            if !enough {
                log::info!("{class}: {} datasets, skipped for consistency", members.len());
            }
            enough
        })
        .map(|(class, members)| {
            let sample: Vec<&BTreeMap<String, f64>> =
                members.choose_multiple(&mut rng, CONSISTENCY_SAMPLE).copied().collect();
            let c = consistency(&sample);
            ConsistencyRow {
                class: class.label(),
                metric,
                datasets: members.len(),
                c,
                c_random,
                consistent: c < c_random,
            }
        })
        .collect()
}
