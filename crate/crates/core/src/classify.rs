//! The four dataset features and the 54 data classes built from them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TimeVaryingTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Levels {
    One,
    TwoThree,
    FourPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Variance {
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Change {
    Low,
    Regular,
    Spiky,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum InsDel {
    Low,
    Regular,
    Spiky,
}

impl Levels {
    pub const ALL: [Levels; 3] = [Levels::One, Levels::TwoThree, Levels::FourPlus];

    pub fn label(self) -> &'static str {
        match self {
            Levels::One => "1L",
            Levels::TwoThree => "2/3L",
            Levels::FourPlus => "4+L",
        }
    }
}

impl Variance {
    pub const ALL: [Variance; 2] = [Variance::Low, Variance::High];

    pub fn label(self) -> &'static str {
        match self {
            Variance::Low => "LWV",
            Variance::High => "HWV",
        }
    }
}

impl Change {
    pub const ALL: [Change; 3] = [Change::Low, Change::Regular, Change::Spiky];

    pub fn label(self) -> &'static str {
        match self {
            Change::Low => "LWC",
            Change::Regular => "RWC",
            Change::Spiky => "SWC",
        }
    }
}

impl InsDel {
    pub const ALL: [InsDel; 3] = [InsDel::Low, InsDel::Regular, InsDel::Spiky];

    pub fn label(self) -> &'static str {
        match self {
            InsDel::Low => "LID",
            InsDel::Regular => "RID",
            InsDel::Spiky => "SID",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DataClass {
    pub levels: Levels,
    pub variance: Variance,
    pub change: Change,
    pub insdel: InsDel,
}

impl DataClass {
    pub fn new(levels: Levels, variance: Variance, change: Change, insdel: InsDel) -> Self {
        DataClass {
            levels,
            variance,
            change,
            insdel,
        }
    }

    /// All 54 classes in label order of the subclasses.
    pub fn all() -> Vec<DataClass> {
        let mut out = Vec::with_capacity(54);
        for l in Levels::ALL {
            for v in Variance::ALL {
                for c in Change::ALL {
                    for i in InsDel::ALL {
                        out.push(DataClass::new(l, v, c, i));
                    }
                }
            }
        }
        out
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DataClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-{}-{}-{}",
            self.levels.label(),
            self.variance.label(),
            self.change.label(),
            self.insdel.label()
        )
    }
}

impl FromStr for DataClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidClass(s.to_string());
        let parts: Vec<&str> = s.trim().split('-').collect();
        let [l, v, c, i] = parts.as_slice() else { return Err(bad()) };
        let find = |x: &str, labels: &[&str]| labels.iter().position(|y| y.eq_ignore_ascii_case(x));
        let l = find(l, &["1L", "2/3L", "4+L"]).ok_or_else(bad)?;
        let v = find(v, &["LWV", "HWV"]).ok_or_else(bad)?;
        let c = find(c, &["LWC", "RWC", "SWC"]).ok_or_else(bad)?;
        let i = find(i, &["LID", "RID", "SID"]).ok_or_else(bad)?;
        Ok(DataClass::new(Levels::ALL[l], Variance::ALL[v], Change::ALL[c], InsDel::ALL[i]))
    }
}

/// Raw feature values behind a classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Features {
    pub levels: usize,
    pub weight_cv: f64,
    pub change_mean: f64,
    pub change_std: f64,
    pub insdel_mean: f64,
    pub insdel_std: f64,
}

/// Population mean and standard deviation; `(0, 0)` for no values.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn levels_from_depth(depth: usize) -> Levels {
    match depth {
        0 | 1 => Levels::One,
        2 | 3 => Levels::TwoThree,
        _ => Levels::FourPlus,
    }
}

pub fn variance_from_cv(cv: f64) -> Variance {
    if cv <= 1.0 {
        Variance::Low
    } else {
        Variance::High
    }
}

pub fn change_from_stats(mean: f64, std: f64) -> Change {
    if mean < 0.05 && std < 0.05 {
        Change::Low
    } else if (0.05..0.2).contains(&mean) && std / mean <= 1.0 {
        Change::Regular
    } else {
        Change::Spiky
    }
}

pub fn insdel_from_stats(mean: f64, std: f64) -> InsDel {
    if mean < 0.05 && std < 0.05 {
        InsDel::Low
    } else if mean < 0.2 && std / mean <= 1.0 {
        InsDel::Regular
    } else {
        InsDel::Spiky
    }
}

/// Coefficient of variation of all positive leaf weights over all steps.
pub fn weight_cv(tree: &TimeVaryingTree) -> f64 {
    let weights: Vec<f64> = tree
        .leaves()
        .flat_map(|i| (0..tree.num_timesteps()).map(move |t| (i, t)))
        .map(|(i, t)| tree.leaf_weight(i, t))
        .filter(|w| *w > 0.0)
        .collect();
    let (mean, std) = mean_std(&weights);
    if mean > 0.0 {
        std / mean
    } else {
        0.0
    }
}

/// Per-transition sums of absolute relative-area differences.
pub fn weight_changes(tree: &TimeVaryingTree) -> Vec<f64> {
    let leaves: Vec<usize> = tree.leaves().collect();
    let rel = |t: usize| -> Vec<f64> {
        let total = tree.total_weight(t);
        leaves.iter().map(|&i| tree.leaf_weight(i, t) / total).collect()
    };
    (1..tree.num_timesteps())
        .map(|t| {
            let (a, b) = (rel(t - 1), rel(t));
            a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum()
        })
        .collect()
}

/// Per-transition size of the symmetric difference of the alive sets,
/// relative to the number of leaves alive before.
pub fn insdel_impacts(tree: &TimeVaryingTree) -> Vec<f64> {
    let leaves: Vec<usize> = tree.leaves().collect();
    (1..tree.num_timesteps())
        .map(|t| {
            let before = leaves.iter().filter(|&&i| tree.leaf_weight(i, t - 1) > 0.0).count();
            let flipped = leaves
                .iter()
                .filter(|&&i| (tree.leaf_weight(i, t - 1) > 0.0) != (tree.leaf_weight(i, t) > 0.0))
                .count();
            flipped as f64 / before as f64
        })
        .collect()
}

pub fn features(tree: &TimeVaryingTree) -> Features {
    let (change_mean, change_std) = mean_std(&weight_changes(tree));
    let (insdel_mean, insdel_std) = mean_std(&insdel_impacts(tree));
    Features {
        levels: tree.levels(),
        weight_cv: weight_cv(tree),
        change_mean,
        change_std,
        insdel_mean,
        insdel_std,
    }
}

pub fn levels_subclass(tree: &TimeVaryingTree) -> Levels {
    levels_from_depth(tree.levels())
}

pub fn variance_subclass(tree: &TimeVaryingTree) -> Variance {
    variance_from_cv(weight_cv(tree))
}

pub fn change_subclass(tree: &TimeVaryingTree) -> Change {
    let (m, s) = mean_std(&weight_changes(tree));
    change_from_stats(m, s)
}

pub fn insdel_subclass(tree: &TimeVaryingTree) -> InsDel {
    let (m, s) = mean_std(&insdel_impacts(tree));
    insdel_from_stats(m, s)
}

pub fn classify_features(f: &Features) -> DataClass {
    DataClass::new(
        levels_from_depth(f.levels),
        variance_from_cv(f.weight_cv),
        change_from_stats(f.change_mean, f.change_std),
        insdel_from_stats(f.insdel_mean, f.insdel_std),
    )
}

pub fn classify(tree: &TimeVaryingTree) -> DataClass {
    classify_features(&features(tree))
}

/// One row of the classification CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRow {
    pub dataset: String,
    pub levels: String,
    pub variance: String,
    pub change: String,
    pub insdel: String,
    pub label: String,
}

impl ClassificationRow {
    pub fn new(dataset: &str, class: &DataClass) -> Self {
        ClassificationRow {
            dataset: dataset.to_string(),
            levels: class.levels.label().to_string(),
            variance: class.variance.label().to_string(),
            change: class.change.label().to_string(),
            insdel: class.insdel.label().to_string(),
            label: class.label(),
        }
    }
}
