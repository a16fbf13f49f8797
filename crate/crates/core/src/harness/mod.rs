//! Evaluation matrix, relative scores, consistency and reports.

mod report;
mod scores;
mod svg;

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{build_baseline, BaselineResult};
use crate::error::{Error, Result};
use crate::geometry::{Layout, Rect};
use crate::layout::{layout_tree, Algorithm};
use crate::metrics::{aggregate, aspect_ratio, corner_travel, stability, MetricRecord, TransitionSample};
use crate::model::{normalize_step, NormalizedStep, TimeVaryingTree};
use crate::stateful::init_state;

pub use report::{layout_svg, render_reports, ReportSummary};
pub use scores::{
    consistency, consistency_report, relative_score_table, relative_scores, ConsistencyRow, Direction, Metric,
    ScoreTable, CONSISTENCY_SAMPLE,
};

/// Settings shared by every pair of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub rect: Rect,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    /// Worker threads; `None` uses all cores.
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rect: Rect::new(0.0, 0.0, 1000.0, 1000.0),
            algorithms: Algorithm::ALL.to_vec(),
            seed: 0,
            jobs: None,
        }
    }
}

/// Everything computed for one (dataset, algorithm) pair.
#[derive(Debug, Clone)]
pub struct PairOutcome {
    pub steps: Vec<NormalizedStep>,
    pub layouts: Vec<Layout>,
    /// Baseline for each transition `t -> t + 1`.
    pub baselines: Vec<BaselineResult>,
    /// Aspect ratios of every cell, per step.
    pub rho: Vec<Vec<f64>>,
    /// Per-rectangle samples of each transition.
    pub samples: Vec<Vec<TransitionSample>>,
    pub record: MetricRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairStatus {
    pub dataset: String,
    pub algorithm: String,
    pub seed: u64,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Transitions whose baseline hit the iteration cap.
    pub unconverged_baselines: usize,
}

/// Records of a finished run, in (dataset, algorithm) order.
#[derive(Debug, Clone, Default)]
pub struct ResultsStore {
    pub records: Vec<MetricRecord>,
    pub statuses: Vec<PairStatus>,
}

/// Stable 64-bit FNV-1a hash of a seed and a list of labels.
pub(crate) fn mix_seed(seed: u64, parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let bytes = seed
        .to_le_bytes()
        .into_iter()
        .chain(parts.iter().flat_map(|p| p.bytes().chain([0])));
    for b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Seed of one (dataset, algorithm) pair, independent of scheduling.
pub fn pair_seed(seed: u64, dataset: &str, algorithm: Algorithm) -> u64 {
    mix_seed(seed, &[dataset, algorithm.name()])
}

/// Runs `f` on a pool of `jobs` threads, or on the global pool.
pub fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Invalid(e.to_string()))?
            .install(f)),
        None => Ok(f()),
    }
}

/// Normalized steps of a dataset for the given root rectangle.
pub fn normalized_steps(tree: &TimeVaryingTree, rect: &Rect) -> Result<Vec<NormalizedStep>> {
    (0..tree.num_timesteps()).map(|t| normalize_step(tree, t, rect.area())).collect()
}

/// Layouts of every step; state-aware algorithms carry their state forward.
pub fn layouts_for(
    tree: &TimeVaryingTree,
    steps: &[NormalizedStep],
    rect: Rect,
    alg: Algorithm,
    seed: u64,
) -> Result<Vec<Layout>> {
    if !alg.is_stateful() {
        return Ok(steps.iter().map(|s| layout_tree(tree, s, rect, alg)).collect());
    }
    let Some((first, rest)) = steps.split_first() else {
        return Ok(Vec::new());
    };
    let mut state = init_state(alg, first, Arc::new(tree.clone()), rect, seed)?;
    let mut out = vec![state.current.clone()];
    for step in rest {
        state.advance(step)?;
        out.push(state.current.clone());
    }
    Ok(out)
}

/// Lays out all steps, builds every baseline and measures the pair.
pub fn evaluate_pair(tree: &TimeVaryingTree, alg: Algorithm, rect: Rect, seed: u64) -> Result<PairOutcome> {
    if !(rect.w > 0.0 && rect.h > 0.0) {
        return Err(Error::InvalidRect(format!("{}x{}", rect.w, rect.h)));
    }
    let steps = normalized_steps(tree, &rect)?;
    let layouts = layouts_for(tree, &steps, rect, alg, seed)?;
    let rho = layouts
        .iter()
        .map(|l| l.cells.values().map(aspect_ratio).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let mut baselines = Vec::with_capacity(steps.len().saturating_sub(1));
    let mut samples = Vec::with_capacity(baselines.capacity());
    for t in 1..steps.len() {
        let (prev, next) = (&layouts[t - 1], &layouts[t]);
        let base = build_baseline(prev, &steps[t - 1], &steps[t])?;
        let s = prev
            .cells
            .iter()
            .filter_map(|(id, a)| {
                let b = next.cells.get(id)?;
                let star = base.baseline.cells.get(id)?;
                let ct = corner_travel(a, b, &rect);
                let ct_baseline = corner_travel(a, star, &rect);
                Some(TransitionSample {
                    ct,
                    ct_baseline,
                    sigma: stability(ct, ct_baseline),
                })
            })
            .collect();
        samples.push(s);
        baselines.push(base);
    }
    let record = aggregate(&tree.name, alg.name(), &rho, &samples);
    Ok(PairOutcome {
        steps,
        layouts,
        baselines,
        rho,
        samples,
        record,
    })
}

/// Evaluates every (dataset, algorithm) pair in parallel. A failing pair is
/// logged and recorded in its status; the others are unaffected.
pub fn run_matrix(datasets: &[TimeVaryingTree], config: &RunConfig) -> Result<ResultsStore> {
    if !(config.rect.w > 0.0 && config.rect.h > 0.0) {
        return Err(Error::InvalidRect(format!("{}x{}", config.rect.w, config.rect.h)));
    }
    let pairs: Vec<(&TimeVaryingTree, Algorithm)> = datasets
        .iter()
        .flat_map(|d| config.algorithms.iter().map(move |&a| (d, a)))
        .collect();
    let run = || -> Vec<(Option<MetricRecord>, PairStatus)> {
        pairs
            .par_iter()
            .map(|&(tree, alg)| {
                let seed = pair_seed(config.seed, &tree.name, alg);
                let mut status = PairStatus {
                    dataset: tree.name.clone(),
                    algorithm: alg.name().to_string(),
                    seed,
                    ok: true,
                    error: None,
                    unconverged_baselines: 0,
                };
                match evaluate_pair(tree, alg, config.rect, seed) {
                    Ok(out) => {
                        status.unconverged_baselines = out.baselines.iter().filter(|b| !b.converged).count();
                        (Some(out.record), status)
                    }
                    Err(e) => {
                        log::error!("{} / {alg}: {e}", tree.name);
                        status.ok = false;
                        status.error = Some(e.to_string());
                        (None, status)
                    }
                }
            })
            .collect()
    };
    let results = in_pool(config.jobs, run)?;
    let mut store = ResultsStore::default();
    for (record, status) in results {
        store.records.extend(record);
        store.statuses.push(status);
    }
    Ok(store)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the results CSV: one row per step and a summary row per pair with
/// timestep `ALL`.
pub fn write_results_csv<W: Write>(records: &[MetricRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["dataset", "algorithm", "timestep", "mean_rho", "mean_ct", "mean_ct_baseline", "mean_sigma"])?;
    for r in records {
        for s in &r.per_step {
            out.write_record([
                r.dataset.clone(),
                r.algorithm.clone(),
                s.t.to_string(),
                s.mean_rho.to_string(),
                opt(s.mean_ct),
                opt(s.mean_ct_baseline),
                opt(s.mean_sigma),
            ])?;
        }
        out.write_record([
            r.dataset.clone(),
            r.algorithm.clone(),
            "ALL".to_string(),
            r.dataset_mean_rho.to_string(),
            opt(r.dataset_mean_ct),
            opt(r.dataset_mean_ct_baseline),
            opt(r.dataset_mean_sigma),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct ResultRow {
    dataset: String,
    algorithm: String,
    timestep: String,
    mean_rho: f64,
    mean_sigma: Option<f64>,
}

/// Dataset-level (mean ρ, mean σ) per pair, read from the `ALL` rows of a
/// results CSV.
pub fn read_summaries<R: std::io::Read>(r: R) -> Result<Vec<ReportSummary>> {
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: ResultRow = row?;
        if row.timestep == "ALL" {
            out.push(ReportSummary {
                dataset: row.dataset,
                algorithm: row.algorithm,
                mean_rho: row.mean_rho,
                mean_sigma: row.mean_sigma,
            });
        }
    }
    Ok(out)
}

pub fn summaries(records: &[MetricRecord]) -> Vec<ReportSummary> {
    records
        .iter()
        .map(|r| ReportSummary {
            dataset: r.dataset.clone(),
            algorithm: r.algorithm.clone(),
            mean_rho: r.dataset_mean_rho,
            mean_sigma: r.dataset_mean_sigma,
        })
        .collect()
}

/// JSON run manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config: RunConfig,
    /// Command-specific settings beyond the shared configuration.
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
    pub versions: BTreeMap<String, String>,
    pub pairs: Vec<PairStatus>,
}

impl Manifest {
    pub fn new(command: &str, config: RunConfig, pairs: Vec<PairStatus>) -> Self {
        let versions = BTreeMap::from([("treemap-core".to_string(), env!("CARGO_PKG_VERSION").to_string())]);
        Manifest {
            command: command.to_string(),
            config,
            parameters: BTreeMap::new(),
            versions,
            pairs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DatasetRecord, NodeRecord};

    fn tiny(name: &str) -> TimeVaryingTree {
        let leaf = |id: &str, w: Vec<f64>| NodeRecord {
            id: id.into(),
            parent: Some("r".into()),
            weights: Some(w),
        };
        TimeVaryingTree::from_record(DatasetRecord {
            name: name.into(),
            num_timesteps: 3,
            nodes: vec![
                NodeRecord {
                    id: "r".into(),
                    parent: None,
                    weights: None,
                },
                leaf("a", vec![1.0, 2.0, 2.0]),
                leaf("b", vec![2.0, 1.0, 0.0]),
                leaf("c", vec![3.0, 3.0, 1.0]),
                leaf("d", vec![0.0, 1.0, 1.0]),
            ],
        })
        .unwrap()
    }

    #[test]
    fn one_record_per_algorithm() {
        let config = RunConfig::default();
        let store = run_matrix(&[tiny("x")], &config).unwrap();
        assert_eq!(store.records.len(), 14);
        assert!(store.statuses.iter().all(|s| s.ok));
        for r in &store.records {
            assert_eq!(r.per_step.len(), 3);
            assert!(r.per_step[2].mean_sigma.is_none());
            assert!((0.0..=1.0).contains(&r.dataset_mean_rho));
            assert!(r.dataset_mean_sigma.unwrap() >= 0.0);
        }
    }

    #[test]
    fn csv_is_deterministic() {
        let config = RunConfig {
            jobs: Some(3),
            ..RunConfig::default()
        };
        let data = [tiny("x"), tiny("y")];
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_results_csv(&run_matrix(&data, &config).unwrap().records, &mut a).unwrap();
        write_results_csv(&run_matrix(&data, &config).unwrap().records, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("dataset,algorithm,timestep,mean_rho,mean_ct,mean_ct_baseline,mean_sigma\n"));
        assert_eq!(text.lines().filter(|l| l.contains(",ALL,")).count(), 28);
        let back = read_summaries(text.as_bytes()).unwrap();
        assert_eq!(back.len(), 28);
    }

    #[test]
    fn samples_skip_one_sided_leaves() {
        let out = evaluate_pair(&tiny("x"), Algorithm::Sqr, RunConfig::default().rect, 0).unwrap();
        // a, b, c alive at 0 and 1; a, c, d alive at 1 and 2.
        assert_eq!(out.samples[0].len(), 3);
        assert_eq!(out.samples[1].len(), 3);
        assert_eq!(out.baselines.len(), 2);
    }

    #[test]
    fn pair_seeds_differ() {
        assert_eq!(pair_seed(1, "a", Algorithm::Snd), pair_seed(1, "a", Algorithm::Snd));
        assert_ne!(pair_seed(1, "a", Algorithm::Snd), pair_seed(2, "a", Algorithm::Snd));
        assert_ne!(pair_seed(1, "a", Algorithm::Snd), pair_seed(1, "a", Algorithm::Sqr));
    }

    #[test]
    fn bad_rect_fails_before_work() {
        let config = RunConfig {
            rect: Rect::new(0.0, 0.0, 0.0, 10.0),
            ..RunConfig::default()
        };
        assert!(run_matrix(&[tiny("x")], &config).is_err());
    }
}
