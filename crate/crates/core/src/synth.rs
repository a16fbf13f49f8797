//! Synthetic datasets of a requested data class.
//!
//! Leaves get log-normal base weights whose spread sets the variance class.
//! Every step multiplies each base weight by independent log-normal noise,
//! whose spread sets the change class. A pool of light leaves is switched
//! on and off to produce insertions and deletions, steadily or in bursts.
//! Nesting depth follows the levels class. Candidates are classified and
//! resampled until they land in the requested class.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::classify::{classify, Change, DataClass, InsDel, Levels, Variance};
use crate::error::{Error, Result};
use crate::model::{DatasetRecord, NodeRecord, TimeVaryingTree};

pub const MAX_ATTEMPTS: usize = 100;

/// Weight of churning leaves relative to the typical base weight.
const CHURN_WEIGHT: f64 = 0.05;

pub fn generate_synthetic(class: DataClass, leaves: usize, timesteps: usize, seed: u64) -> Result<TimeVaryingTree> {
    if leaves < 2 || timesteps < 2 {
        return Err(Error::InvalidRequest(format!(
            "need at least 2 leaves and 2 time steps, got {leaves} and {timesteps}"
        )));
    }
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seeds.gen());
        let name = format!("synthetic-{}-{seed}", class.label().replace('/', ""));
        let tree = candidate(&name, class, leaves, timesteps, &mut rng)?;
        if classify(&tree) == class {
            log::debug!("{name}: accepted after {} attempts", attempt + 1);
            return Ok(tree);
        }
    }
    Err(Error::UnreachableClass(class.label(), MAX_ATTEMPTS))
}

/// One requested dataset of a suite.
#[derive(Debug)]
pub struct SuiteEntry {
    pub class: DataClass,
    pub index: usize,
    pub seed: u64,
    pub result: Result<TimeVaryingTree>,
}

/// `per_class` datasets of every class, generated in parallel. Each dataset
/// seed is derived from `seed`, the class and the index alone.
pub fn generate_suite(
    classes: &[DataClass],
    leaves: usize,
    timesteps: usize,
    per_class: usize,
    seed: u64,
) -> Vec<SuiteEntry> {
    let jobs: Vec<(DataClass, usize, u64)> = classes
        .iter()
        .flat_map(|&c| {
            (0..per_class).map(move |k| {
                let s = crate::harness::mix_seed(seed, &[&c.label(), &k.to_string()]);
                (c, k, s)
            })
        })
        .collect();
    jobs.into_par_iter()
        .map(|(class, index, seed)| SuiteEntry {
            class,
            index,
            seed,
            result: generate_synthetic(class, leaves, timesteps, seed),
        })
        .collect()
}

fn candidate(name: &str, class: DataClass, n: usize, steps: usize, rng: &mut ChaCha8Rng) -> Result<TimeVaryingTree> {
    let depth = match class.levels {
        Levels::One => 1,
        Levels::TwoThree => rng.gen_range(2..=3),
        Levels::FourPlus => rng.gen_range(4..=5),
    };
    let spread = match class.variance {
        Variance::Low => 0.3,
        Variance::High => 1.6,
    };
    let noise = match class.change {
        Change::Low => 0.02,
        Change::Regular => 0.1,
        Change::Spiky => 0.45,
    };
    let normal = Normal::<f64>::new(0.0, 1.0).expect("unit normal");

    // Churning leaves come from a light pool; the rest live throughout.
    let pool = match class.insdel {
        InsDel::Low => 0,
        InsDel::Regular => (n * 2 / 5).max(1),
        InsDel::Spiky => (n / 2).max(1),
    }
    .min(n - 1);
    let base: Vec<f64> = (0..n)
        .map(|i| {
            let w = (spread * normal.sample(rng)).exp();
            if i < pool {
                w * CHURN_WEIGHT
            } else {
                w
            }
        })
        .collect();
    let alive = churn(class.insdel, n, pool, steps, rng);

    let mut weights = vec![vec![0.0; steps]; n];
    for (i, row) in weights.iter_mut().enumerate() {
        for (t, w) in row.iter_mut().enumerate() {
            if alive[t][i] {
                *w = base[i] * (noise * normal.sample(rng)).exp();
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut nodes = vec![NodeRecord {
        id: "root".into(),
        parent: None,
        weights: None,
    }];
    let mut groups = 0;
    nest(&order, "root", 1, depth, &mut groups, &mut nodes, rng);
    for node in nodes.iter_mut() {
        if let Some(i) = node.id.strip_prefix("leaf").and_then(|s| s.parse::<usize>().ok()) {
            node.weights = Some(weights[i].clone());
        }
    }
    TimeVaryingTree::from_record(DatasetRecord {
        name: name.to_string(),
        num_timesteps: steps,
        nodes,
    })
}

/// Alive flags per step. Leaves `0..pool` churn; the rest stay alive.
fn churn(kind: InsDel, n: usize, pool: usize, steps: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<bool>> {
    let mut alive: Vec<bool> = (0..n).map(|i| i >= pool || rng.gen_bool(0.5)).collect();
    let mut out = vec![alive.clone()];
    let transitions = steps - 1;
    let forced = rng.gen_range(0..transitions);
    for t in 0..transitions {
        let count = alive.iter().filter(|a| **a).count() as f64;
        let flips = match kind {
            InsDel::Low => 0,
            InsDel::Regular => ((0.1 * count).round() as usize).max(1),
            InsDel::Spiky => {
                if t == forced || rng.gen_bool(0.2) {
                    ((0.35 * count).round() as usize).max(1)
                } else {
                    0
                }
            }
        };
        let mut on: Vec<usize> = (0..pool).filter(|&i| alive[i]).collect();
        let mut off: Vec<usize> = (0..pool).filter(|&i| !alive[i]).collect();
        on.shuffle(rng);
        off.shuffle(rng);
        let odd = flips % 2 == 1 && rng.gen_bool(0.5);
        let kill = (flips / 2 + usize::from(odd)).min(on.len());
        let revive = (flips - kill).min(off.len());
        let kill = (flips - revive).min(on.len());
        for &i in &on[..kill] {
            alive[i] = false;
        }
        for &i in &off[..revive] {
            alive[i] = true;
        }
        out.push(alive.clone());
    }
    out
}

/// Distributes `leaves` below `parent` so every leaf ends at depth `depth`.
fn nest(
    leaves: &[usize],
    parent: &str,
    level: usize,
    depth: usize,
    groups: &mut usize,
    nodes: &mut Vec<NodeRecord>,
    rng: &mut ChaCha8Rng,
) {
    if level == depth {
        let mut sorted = leaves.to_vec();
        sorted.sort_unstable();
        for i in sorted {
            nodes.push(NodeRecord {
                id: format!("leaf{i:04}"),
                parent: Some(parent.to_string()),
                weights: None,
            });
        }
        return;
    }
    let k = rng.gen_range(2..=4).min(leaves.len());
    let mut cuts: Vec<usize> = (1..leaves.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    let mut start = 0;
    for end in cuts.into_iter().chain([leaves.len()]) {
        let id = format!("group{:03}", *groups);
        *groups += 1;
        nodes.push(NodeRecord {
            id: id.clone(),
            parent: Some(parent.to_string()),
            weights: None,
        });
        nest(&leaves[start..end], &id, level + 1, depth, groups, nodes, rng);
        start = end;
    }
}
