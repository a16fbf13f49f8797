use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::Rect;
use crate::model::NormalizedStep;

/// Relative tolerance on leaf areas.
pub const AREA_TOLERANCE: f64 = 1e-6;
/// Overlap and coverage tolerance, as a fraction of the root diagonal.
pub const COVERAGE_TOLERANCE: f64 = 1e-7;

/// A treemap at one time step: the input rectangle, one cell per alive leaf
/// and one rectangle per internal node with alive descendants.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Layout {
    pub root: Rect,
    pub cells: BTreeMap<String, Rect>,
    pub groups: BTreeMap<String, Rect>,
    /// Parent id of every leaf and group; the root group is not listed as a
    /// child. Empty for layouts without hierarchy information.
    pub parents: BTreeMap<String, String>,
}

impl Layout {
    pub fn new(root: Rect) -> Self {
        Layout {
            root,
            ..Default::default()
        }
    }

    /// Builds a layout from leaf cells, deriving every group rectangle as the
    /// bounding box of its descendants.
    pub fn from_cells(root: Rect, cells: BTreeMap<String, Rect>, parents: BTreeMap<String, String>) -> Self {
        let mut groups: BTreeMap<String, Rect> = BTreeMap::new();
        for (id, r) in &cells {
            let mut cur = parents.get(id);
            while let Some(p) = cur {
                groups
                    .entry(p.clone())
                    .and_modify(|g| *g = g.union(r))
                    .or_insert(*r);
                cur = parents.get(p);
            }
        }
        Layout {
            root,
            cells,
            groups,
            parents,
        }
    }

    /// Recomputes group rectangles after cells moved.
    pub fn refresh_groups(&mut self) {
        let cells = std::mem::take(&mut self.cells);
        let parents = std::mem::take(&mut self.parents);
        *self = Layout::from_cells(self.root, cells, parents);
    }

    pub fn cell_ids(&self) -> BTreeSet<&str> {
        self.cells.keys().map(String::as_str).collect()
    }

    /// Depth-ordered ancestor chain of `id`, nearest first.
    pub(crate) fn ancestors<'a>(&'a self, id: &'a str) -> Vec<&'a str> {
        let mut out = Vec::new();
        let mut cur = self.parents.get(id);
        while let Some(p) = cur {
            out.push(p.as_str());
            cur = self.parents.get(p);
        }
        out
    }

    /// Number of ancestors shared by two nodes.
    pub(crate) fn common_depth(&self, a: &str, b: &str) -> usize {
        let mut aa = self.ancestors(a);
        let mut bb = self.ancestors(b);
        aa.reverse();
        bb.reverse();
        aa.iter().zip(bb.iter()).take_while(|(x, y)| x == y).count()
    }

    pub fn to_json(&self, t: usize) -> LayoutJson {
        LayoutJson {
            t,
            cells: self
                .cells
                .iter()
                .map(|(id, r)| CellJson {
                    id: id.clone(),
                    x: r.x,
                    y: r.y,
                    w: r.w,
                    h: r.h,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellJson {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

/// Per-timestep layout record as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutJson {
    pub t: usize,
    pub cells: Vec<CellJson>,
}

impl LayoutJson {
    pub fn into_layout(self, root: Rect, parents: BTreeMap<String, String>) -> Layout {
        let cells = self
            .cells
            .into_iter()
            .map(|c| (c.id, Rect::new(c.x, c.y, c.w, c.h)))
            .collect();
        Layout::from_cells(root, cells, parents)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    /// Largest `|area - target| / target` over alive leaves.
    pub max_rel_area_error: f64,
    pub worst_leaf: Option<String>,
    /// Largest pairwise overlap area between cells.
    pub max_overlap: f64,
    /// Root area not covered by any cell.
    pub coverage_gap: f64,
    /// Largest distance a cell sticks out of the root or out of its group.
    pub max_protrusion: f64,
    /// Largest mismatch between a group's area and the sum of its children.
    pub max_group_mismatch: f64,
    pub missing: Vec<String>,
    pub unexpected: Vec<String>,
    pub passed: bool,
}

/// Checks that `layout` is an exact treemap of `step`.
pub fn validate_layout(layout: &Layout, step: &NormalizedStep) -> ValidationReport {
    let mut report = ValidationReport::default();
    let diag = layout.root.diagonal();
    let len_tol = COVERAGE_TOLERANCE * diag;
    let area_tol = len_tol * diag;

    for (id, a) in step.alive() {
        match layout.cells.get(id) {
            None => report.missing.push(id.to_string()),
            Some(r) => {
                let err = (r.area() - a).abs() / a;
                if !(err <= report.max_rel_area_error) {
                    report.max_rel_area_error = if err.is_nan() { f64::INFINITY } else { err };
                    report.worst_leaf = Some(id.to_string());
                }
            }
        }
    }
    for (id, r) in &layout.cells {
        if !step.is_alive(id) {
            report.unexpected.push(id.clone());
        }
        if !(r.w >= 0.0 && r.h >= 0.0) {
            report.max_protrusion = f64::INFINITY;
        }
        report.max_protrusion = report.max_protrusion.max(r.protrusion(&layout.root));
    }

    let mut rects: Vec<&Rect> = layout.cells.values().collect();
    rects.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut total_overlap = 0.0;
    for i in 0..rects.len() {
        let a = rects[i];
        for b in &rects[i + 1..] {
            if b.x >= a.right() {
                break;
            }
            let o = a.overlap(b);
            total_overlap += o;
            report.max_overlap = report.max_overlap.max(o);
        }
    }
    let covered: f64 = layout.cells.values().map(Rect::area).sum::<f64>() - total_overlap;
    report.coverage_gap = (layout.root.area() - covered).max(0.0);

    let mut child_area: BTreeMap<&str, f64> = BTreeMap::new();
    let mut child_of = |id: &str, r: &Rect, report: &mut ValidationReport| {
        if let Some(p) = layout.parents.get(id) {
            if let Some(g) = layout.groups.get(p) {
                report.max_protrusion = report.max_protrusion.max(r.protrusion(g));
                *child_area.entry(p.as_str()).or_default() += r.area();
            }
        }
    };
    for (id, r) in &layout.cells {
        child_of(id, r, &mut report);
    }
    for (id, r) in &layout.groups {
        child_of(id, r, &mut report);
    }
    for (g, sum) in child_area {
        let mismatch = (layout.groups[g].area() - sum).abs();
        report.max_group_mismatch = report.max_group_mismatch.max(mismatch);
    }

    report.passed = report.missing.is_empty()
        && report.unexpected.is_empty()
        && report.max_rel_area_error <= AREA_TOLERANCE
        && report.max_overlap <= area_tol
        && report.coverage_gap <= area_tol
        && report.max_protrusion <= len_tol
        && report.max_group_mismatch <= area_tol;
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(areas: &[(&str, f64)]) -> NormalizedStep {
        NormalizedStep {
            timestep: 0,
            areas: areas.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    fn layout(cells: &[(&str, Rect)]) -> Layout {
        Layout::from_cells(
            Rect::new(0.0, 0.0, 1.0, 1.0),
            cells.iter().map(|(k, r)| (k.to_string(), *r)).collect(),
            BTreeMap::new(),
        )
    }

    #[test]
    fn halves_pass() {
        let l = layout(&[("a", Rect::new(0.0, 0.0, 0.5, 1.0)), ("b", Rect::new(0.5, 0.0, 0.5, 1.0))]);
        let r = validate_layout(&l, &step(&[("a", 0.5), ("b", 0.5)]));
        assert!(r.passed);
        assert_eq!(r.max_rel_area_error, 0.0);
    }

    #[test]
    fn overlap_fails() {
        let l = layout(&[("a", Rect::new(0.0, 0.0, 0.51, 1.0)), ("b", Rect::new(0.5, 0.0, 0.5, 1.0))]);
        let r = validate_layout(&l, &step(&[("a", 0.5), ("b", 0.5)]));
        assert!(!r.passed);
        assert!((r.max_overlap - 0.01).abs() < 1e-12);
    }

    #[test]
    fn area_error_fails() {
        let l = layout(&[("a", Rect::new(0.0, 0.0, 0.49, 1.0)), ("b", Rect::new(0.49, 0.0, 0.51, 1.0))]);
        let r = validate_layout(&l, &step(&[("a", 0.5), ("b", 0.5)]));
        assert!(!r.passed);
        assert!((r.max_rel_area_error - 0.02).abs() < 1e-12);
        assert_eq!(r.worst_leaf.as_deref(), Some("a"));
    }

    #[test]
    fn gap_and_missing_fail() {
        let l = layout(&[("a", Rect::new(0.0, 0.0, 0.5, 1.0))]);
        let r = validate_layout(&l, &step(&[("a", 0.5), ("b", 0.5)]));
        assert!(!r.passed);
        assert_eq!(r.missing, vec!["b".to_string()]);
        assert!((r.coverage_gap - 0.5).abs() < 1e-12);
    }

    #[test]
    fn group_protrusion_fails() {
        let mut parents = BTreeMap::new();
        parents.insert("a".to_string(), "g".to_string());
        parents.insert("b".to_string(), "root".to_string());
        parents.insert("g".to_string(), "root".to_string());
        let mut l = Layout::from_cells(
            Rect::new(0.0, 0.0, 1.0, 1.0),
            [
                ("a".to_string(), Rect::new(0.0, 0.0, 0.5, 1.0)),
                ("b".to_string(), Rect::new(0.5, 0.0, 0.5, 1.0)),
            ]
            .into_iter()
            .collect(),
            parents,
        );
        let s = step(&[("a", 0.5), ("b", 0.5)]);
        assert!(validate_layout(&l, &s).passed);
        l.groups.insert("g".into(), Rect::new(0.0, 0.0, 0.4, 1.0));
        assert!(!validate_layout(&l, &s).passed);
    }
}
