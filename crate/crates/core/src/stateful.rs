//! State-aware algorithms: LM0, LM4 and GIT.
//!
//! A state carries the current layout forward. Each step removes vanished
//! leaves by shrinking them to zero and collapsing the sliver, places new
//! leaves by splitting an existing region, realizes the new areas without
//! changing the segment structure and, for LM4, applies a few local moves
//! that improve the mean aspect ratio.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use log::warn;

use crate::baseline::{hill_climb_realize, realize, RealizeOptions, VANISHING_AREA};
use crate::error::{Error, Result};
use crate::geometry::{Dissection, Layout, Rect, Support, BOTTOM, LEFT, RIGHT, SNAP_TOLERANCE, TOP};
use crate::layout::{layout_subtree, layout_tree, Algorithm};
use crate::metrics::aspect_ratio;
use crate::model::{NormalizedStep, TimeVaryingTree};

/// Cells with the worst aspect ratios considered for local moves.
const MOVE_FOCUS: usize = 8;

#[derive(Debug, Clone)]
pub struct LayoutState {
    pub current: Layout,
    pub algorithm: Algorithm,
    pub rng_seed: u64,
    /// Local moves allowed per step.
    pub move_budget: usize,
    tree: Arc<TimeVaryingTree>,
}

/// Lays out the first step with the algorithm's initializer: APP for LM0 and
/// LM4, SQR for GIT.
pub fn init_state(
    algorithm: Algorithm,
    first_step: &NormalizedStep,
    tree: Arc<TimeVaryingTree>,
    rect: Rect,
    rng_seed: u64,
) -> Result<LayoutState> {
    let move_budget = match algorithm {
        Algorithm::Lm0 | Algorithm::Git => 0,
        Algorithm::Lm4 => 4,
        other => return Err(Error::InvalidRequest(format!("{other} is not a state-aware algorithm"))),
    };
    Ok(LayoutState {
        current: layout_tree(&tree, first_step, rect, algorithm),
        algorithm,
        rng_seed,
        move_budget,
        tree,
    })
}

impl LayoutState {
    pub fn tree(&self) -> &TimeVaryingTree {
        &self.tree
    }

    /// Carries the layout to `next`.
    pub fn advance(&mut self, next: &NormalizedStep) -> Result<()> {
        let survivors = self.current.cells.keys().filter(|id| next.is_alive(id)).count();
        if survivors == 0 {
            self.current = layout_tree(&self.tree, next, self.current.root, self.algorithm);
            return Ok(());
        }
        self.delete(next);
        self.insert(next);
        self.current = self.retarget(&self.current, next)?;
        for _ in 0..self.move_budget {
            match self.best_move(next) {
                Some(layout) => self.current = layout,
                None => break,
            }
        }
        Ok(())
    }

    fn targets(layout: &Layout, next: &NormalizedStep) -> BTreeMap<String, f64> {
        let raw: BTreeMap<String, f64> = layout.cells.keys().map(|id| (id.clone(), next.area(id))).collect();
        let total: f64 = raw.values().sum();
        let scale = layout.root.area() / total;
        raw.into_iter().map(|(k, v)| (k, v * scale)).collect()
    }

    fn retarget(&self, layout: &Layout, next: &NormalizedStep) -> Result<Layout> {
        match hill_climb_realize(layout, &Self::targets(layout, next)) {
            Ok(res) => Ok(res.baseline),
            Err(Error::NonConvergence { iterations, residual }) => {
                warn!(
                    "{}: realization stalled after {iterations} iterations (residual {residual:e}); laying out afresh",
                    self.algorithm
                );
                Ok(layout_tree(&self.tree, next, layout.root, self.algorithm))
            }
            Err(e) => Err(e),
        }
    }

    /// Shrinks vanished leaves to slivers and removes them.
    fn delete(&mut self, next: &NormalizedStep) {
        let dead: Vec<String> = self.current.cells.keys().filter(|id| !next.is_alive(id)).cloned().collect();
        if dead.is_empty() {
            return;
        }
        let root = self.current.root;
        let area = root.area();
        if let Ok(d) = Dissection::from_layout(&self.current) {
            let vanishing = VANISHING_AREA * area;
            let alive_total: f64 = d.ids.iter().map(|id| next.area(id)).sum();
            let scale = (area - vanishing * dead.len() as f64) / alive_total;
            let targets: Vec<f64> = d
                .ids
                .iter()
                .map(|id| if next.is_alive(id) { next.area(id) * scale } else { vanishing })
                .collect();
            let real = realize(&d, &targets, &RealizeOptions::default());
            let cells = (0..d.num_cells()).map(|i| (d.ids[i].clone(), d.rect_with(&real.coords, i))).collect();
            self.current = Layout::from_cells(root, cells, self.current.parents.clone());
        }
        if let Some(layout) = without_slivers(&self.current, &dead) {
            self.current = layout;
        }
        for id in dead {
            if self.current.cells.contains_key(&id) {
                self.collapse(&id, next);
            }
        }
    }

    fn collapse(&mut self, id: &str, next: &NormalizedStep) {
        if let Some(layout) = collapsed(&self.current, id, |c| next.is_alive(c)) {
            self.current = layout;
            return;
        }
        // No sliver can be squeezed out without crushing a neighbour: lay out
        // afresh the nearest enclosing group that keeps a surviving leaf.
        let tree = Arc::clone(&self.tree);
        let keeps = |g: &str| {
            self.current
                .cells
                .keys()
                .any(|c| c != id && next.is_alive(c) && self.current.ancestors(c).contains(&g))
        };
        let (node, rect) = match self
            .current
            .ancestors(id)
            .into_iter()
            .find(|g| self.current.groups.contains_key(*g) && keeps(g))
        {
            Some(g) => (tree.index_of(g).expect("group in tree"), self.current.groups[g]),
            None => (tree.root(), self.current.root),
        };
        let mut layout = self.current.clone();
        let under: Vec<String> = layout
            .cells
            .keys()
            .filter(|c| c.as_str() == tree.node(node).id || layout.ancestors(c).contains(&tree.node(node).id.as_str()))
            .cloned()
            .collect();
        for c in under {
            layout.cells.remove(&c);
        }
        let present: BTreeSet<String> = self.current.cells.keys().cloned().collect();
        let restricted = NormalizedStep {
            timestep: next.timestep,
            areas: next
                .areas
                .iter()
                .map(|(k, v)| (k.clone(), if present.contains(k) { *v } else { 0.0 }))
                .collect(),
        };
        layout_subtree(&tree, &restricted, node, rect, self.algorithm, &mut layout);
        layout.refresh_groups();
        self.current = layout;
    }

    /// Places every leaf that is alive in `next` but has no cell yet.
    fn insert(&mut self, next: &NormalizedStep) {
        let new: Vec<String> = next
            .alive()
            .map(|(id, _)| id.to_string())
            .filter(|id| !self.current.cells.contains_key(id))
            .collect();
        for id in new {
            self.current = inserted(&self.current, &id, next);
        }
    }

    /// The move that most improves the mean aspect ratio, if any does.
    fn best_move(&self, next: &NormalizedStep) -> Option<Layout> {
        let base = mean_rho(&self.current);
        let mut best: Option<(f64, Layout)> = None;
        for cells in candidate_moves(&self.current) {
            let moved = Layout::from_cells(self.current.root, cells, self.current.parents.clone());
            let Ok(res) = hill_climb_realize(&moved, &Self::targets(&moved, next)) else {
                continue;
            };
            let score = mean_rho(&res.baseline);
            if score > base + 1e-12 && best.as_ref().map_or(true, |(b, _)| score > *b) {
                best = Some((score, res.baseline));
            }
        }
        best.map(|(_, l)| l)
    }
}

pub fn mean_rho(layout: &Layout) -> f64 {
    let n = layout.cells.len().max(1) as f64;
    layout.cells.values().map(|r| aspect_ratio(r).unwrap_or(0.0)).sum::<f64>() / n
}

/// Removes the sliver of `id` by merging the two segments on either side of
/// its thinner dimension; `None` if that would crush another live cell.
fn collapsed(layout: &Layout, id: &str, alive: impl Fn(&str) -> bool) -> Option<Layout> {
    let root = layout.root;
    let d = Dissection::from_layout(layout).ok()?;
    let i = d.index_of(id)?;
    let r = d.rect(i);
    let mut dims = [(r.w / root.w, LEFT, RIGHT), (r.h / root.h, TOP, BOTTOM)];
    dims.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, lo, hi) in dims {
        let (a, b) = (d.sides[i][lo], d.sides[i][hi]);
        let at = match (a, b) {
            (Support::Boundary, Support::Boundary) => continue,
            (Support::Boundary, _) => d.side_coord(&d.coords, i, lo),
            (_, Support::Boundary) => d.side_coord(&d.coords, i, hi),
            _ => (d.side_coord(&d.coords, i, lo) + d.side_coord(&d.coords, i, hi)) / 2.0,
        };
        let mut coords = d.coords.clone();
        for s in [a, b].into_iter().filter_map(Support::segment) {
            coords[s] = at;
        }
        let intact = (0..d.num_cells()).filter(|&j| j != i && alive(&d.ids[j])).all(|j| {
            let (old, new) = (d.rect(j), d.rect_with(&coords, j));
            new.w >= 0.5 * old.w && new.h >= 0.5 * old.h
        });
        if intact {
            let cells = (0..d.num_cells())
                .filter(|&j| j != i)
                .map(|j| (d.ids[j].clone(), d.rect_with(&coords, j)))
                .collect();
            return Some(Layout::from_cells(root, cells, layout.parents.clone()));
        }
    }
    None
}

/// Drops the given cells thinner than the snap tolerance; their neighbours
/// close the gaps.
fn without_slivers(layout: &Layout, ids: &[String]) -> Option<Layout> {
    let eps = SNAP_TOLERANCE * layout.root.diagonal();
    let mut rest = layout.clone();
    let before = rest.cells.len();
    rest.cells.retain(|c, r| !(ids.contains(c) && r.w.min(r.h) <= eps));
    if rest.cells.len() == before {
        return None;
    }
    let d = Dissection::from_layout(&rest).ok()?;
    let cells = (0..d.num_cells()).map(|j| (d.ids[j].clone(), d.rect_with(&d.coords, j))).collect();
    Some(Layout::from_cells(layout.root, cells, layout.parents.clone()))
}

/// Region of a child of some group: a leaf cell or a group rectangle, with
/// the leaves it contains.
struct Region {
    id: String,
    rect: Rect,
    leaves: Vec<String>,
}

fn regions(layout: &Layout, host: Option<&str>) -> Vec<Region> {
    let parent_of = |x: &str| layout.parents.get(x).map(String::as_str);
    let mut out: Vec<Region> = layout
        .cells
        .iter()
        .filter(|(id, _)| parent_of(id) == host)
        .map(|(id, r)| Region {
            id: id.clone(),
            rect: *r,
            leaves: vec![id.clone()],
        })
        .chain(layout.groups.iter().filter(|(g, _)| parent_of(g) == host).map(|(g, r)| Region {
            id: g.clone(),
            rect: *r,
            leaves: layout
                .cells
                .keys()
                .filter(|c| layout.ancestors(c).contains(&g.as_str()))
                .cloned()
                .collect(),
        }))
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

/// Splits the child region of the new leaf's nearest present ancestor that
/// gives the best worst-case aspect ratio.
fn inserted(layout: &Layout, id: &str, next: &NormalizedStep) -> Layout {
    let host = layout.ancestors(id).into_iter().find(|a| layout.groups.contains_key(*a));
    let mut candidates = regions(layout, host);
    if candidates.is_empty() {
        candidates = layout
            .cells
            .iter()
            .map(|(c, r)| Region {
                id: c.clone(),
                rect: *r,
                leaves: vec![c.clone()],
            })
            .collect();
    }
    let a_new = next.area(id);
    let mut best: Option<(f64, BTreeMap<String, Rect>)> = None;
    for region in &candidates {
        let a_old: f64 = region.leaves.iter().map(|c| next.area(c)).sum();
        let share = if a_old > 0.0 { a_new / (a_new + a_old) } else { 0.5 };
        let r = region.rect;
        for vertical in [true, false] {
            for first in [true, false] {
                let (slice, rest) = split_rect(&r, share, vertical, first);
                let mut score = aspect_ratio(&slice).unwrap_or(0.0);
                let mut cells = layout.cells.clone();
                for c in &region.leaves {
                    let moved = cells[c].remap(&r, &rest);
                    score = score.min(aspect_ratio(&moved).unwrap_or(0.0));
                    cells.insert(c.clone(), moved);
                }
                cells.insert(id.to_string(), slice);
                if best.as_ref().map_or(true, |(b, _)| score > *b) {
                    best = Some((score, cells));
                }
            }
        }
    }
    let (_, cells) = best.expect("at least one candidate region");
    Layout::from_cells(layout.root, cells, layout.parents.clone())
}

/// Cuts `share` of `r` off one end; `vertical` cuts perpendicular to x.
fn split_rect(r: &Rect, share: f64, vertical: bool, first: bool) -> (Rect, Rect) {
    if vertical {
        let w = r.w * share;
        if first {
            (Rect::new(r.x, r.y, w, r.h), Rect::from_sides(r.x + w, r.y, r.right(), r.bottom()))
        } else {
            (Rect::from_sides(r.right() - w, r.y, r.right(), r.bottom()), Rect::from_sides(r.x, r.y, r.right() - w, r.bottom()))
        }
    } else {
        let (a, b) = split_rect(&r.transposed(), share, true, first);
        (a.transposed(), b.transposed())
    }
}

/// Cell maps after every flip or stretch involving one of the cells with the
/// worst aspect ratio and an adjacent sibling leaf.
fn candidate_moves(layout: &Layout) -> Vec<BTreeMap<String, Rect>> {
    let eps = 1e-9 * layout.root.diagonal();
    let mut worst: Vec<(&String, f64)> = layout
        .cells
        .iter()
        .map(|(id, r)| (id, aspect_ratio(r).unwrap_or(0.0)))
        .collect();
    worst.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(b.0)));
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (a, _) in worst.into_iter().take(MOVE_FOCUS) {
        let parent = layout.parents.get(a);
        for (c, _) in layout.cells.iter() {
            if c == a || layout.parents.get(c) != parent {
                continue;
            }
            let pair = if a < c { (a.clone(), c.clone()) } else { (c.clone(), a.clone()) };
            if !seen.insert(pair) {
                continue;
            }
            let (ra, rc) = (layout.cells[a], layout.cells[c]);
            for (na, nc) in moves(&ra, &rc, eps) {
                let mut cells = layout.cells.clone();
                cells.insert(a.clone(), na);
                cells.insert(c.clone(), nc);
                out.push(cells);
            }
        }
    }
    out
}

/// Flips and stretches of two adjacent rectangles.
fn moves(a: &Rect, c: &Rect, eps: f64) -> Vec<(Rect, Rect)> {
    let near = |x: f64, y: f64| (x - y).abs() <= eps;
    if near(a.right(), c.x) {
        side_by_side(a, c, eps)
    } else if near(c.right(), a.x) {
        side_by_side(c, a, eps).into_iter().map(|(l, r)| (r, l)).collect()
    } else if near(a.bottom(), c.y) || near(c.bottom(), a.y) {
        moves(&a.transposed(), &c.transposed(), eps)
            .into_iter()
            .map(|(x, y)| (x.transposed(), y.transposed()))
            .collect()
    } else {
        Vec::new()
    }
}

/// Moves for `l` directly left of `r`.
fn side_by_side(l: &Rect, r: &Rect, eps: f64) -> Vec<(Rect, Rect)> {
    let near = |x: f64, y: f64| (x - y).abs() <= eps;
    let (top, bottom) = (near(l.y, r.y), near(l.bottom(), r.bottom()));
    if top && bottom {
        // Flip: the union is re-split by a horizontal cut.
        let u = l.union(r);
        let h = u.h * l.area() / (l.area() + r.area());
        return vec![(Rect::new(u.x, u.y, u.w, h), Rect::from_sides(u.x, u.y + h, u.right(), u.bottom()))];
    }
    if top {
        if l.h < r.h {
            vec![(
                Rect::from_sides(l.x, l.y, r.right(), l.bottom()),
                Rect::from_sides(r.x, l.bottom(), r.right(), r.bottom()),
            )]
        } else {
            vec![(
                Rect::from_sides(l.x, r.bottom(), l.right(), l.bottom()),
                Rect::from_sides(l.x, r.y, r.right(), r.bottom()),
            )]
        }
    } else if bottom {
        if l.h < r.h {
            vec![(
                Rect::from_sides(l.x, l.y, r.right(), l.bottom()),
                Rect::from_sides(r.x, r.y, r.right(), l.y),
            )]
        } else {
            vec![(
                Rect::from_sides(l.x, l.y, l.right(), r.y),
                Rect::from_sides(l.x, r.y, r.right(), r.bottom()),
            )]
        }
    } else {
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{order_equivalent, validate_layout};
    use crate::model::{normalize_step, DatasetRecord, NodeRecord};

    fn dataset(groups: &[(&str, &str)], leaves: &[(&str, &str, &[f64])]) -> Arc<TimeVaryingTree> {
        let t = leaves[0].2.len();
        let mut nodes = vec![NodeRecord {
            id: "root".into(),
            parent: None,
            weights: None,
        }];
        for (id, parent) in groups {
            nodes.push(NodeRecord {
                id: id.to_string(),
                parent: Some(parent.to_string()),
                weights: None,
            });
        }
        for (id, parent, w) in leaves {
            nodes.push(NodeRecord {
                id: id.to_string(),
                parent: Some(parent.to_string()),
                weights: Some(w.to_vec()),
            });
        }
        let rec = DatasetRecord {
            name: "t".into(),
            num_timesteps: t,
            nodes,
        };
        Arc::new(TimeVaryingTree::from_record(rec).unwrap())
    }

    fn run(alg: Algorithm, tree: &Arc<TimeVaryingTree>, rect: Rect) -> Vec<Layout> {
        let steps: Vec<_> = (0..tree.num_timesteps())
            .map(|t| normalize_step(tree, t, rect.area()).unwrap())
            .collect();
        let mut state = init_state(alg, &steps[0], Arc::clone(tree), rect, 0).unwrap();
        let mut out = vec![state.current.clone()];
        for (t, s) in steps.iter().enumerate().skip(1) {
            state.advance(s).unwrap();
            let report = validate_layout(&state.current, s);
            assert!(report.passed, "{alg} step {t}: {report:?}");
            out.push(state.current.clone());
        }
        out
    }

    fn nested() -> Arc<TimeVaryingTree> {
        dataset(
            &[("g1", "root"), ("g2", "root")],
            &[
                ("a", "g1", &[3.0, 2.5, 2.0, 2.2]),
                ("b", "g1", &[1.0, 1.5, 1.8, 1.1]),
                ("c", "g2", &[2.0, 2.0, 3.0, 2.6]),
                ("d", "g2", &[1.0, 0.7, 0.5, 0.9]),
                ("e", "root", &[4.0, 4.4, 3.1, 3.3]),
            ],
        )
    }

    #[test]
    fn initial_layouts_delegate() {
        let tree = nested();
        let rect = Rect::new(0.0, 0.0, 100.0, 60.0);
        let step = normalize_step(&tree, 0, rect.area()).unwrap();
        let lm0 = init_state(Algorithm::Lm0, &step, Arc::clone(&tree), rect, 0).unwrap();
        let lm4 = init_state(Algorithm::Lm4, &step, Arc::clone(&tree), rect, 0).unwrap();
        let git = init_state(Algorithm::Git, &step, Arc::clone(&tree), rect, 0).unwrap();
        assert_eq!(lm0.current, layout_tree(&tree, &step, rect, Algorithm::App));
        assert_eq!(lm4.current, lm0.current);
        assert_eq!(git.current, layout_tree(&tree, &step, rect, Algorithm::Sqr));
        assert!(init_state(Algorithm::Sqr, &step, tree, rect, 0).is_err());
    }

    #[test]
    fn weight_changes_stay_order_equivalent() {
        let tree = nested();
        let rect = Rect::new(0.0, 0.0, 100.0, 60.0);
        for alg in [Algorithm::Lm0, Algorithm::Git] {
            let layouts = run(alg, &tree, rect);
            for w in layouts.windows(2) {
                assert!(order_equivalent(&w[0], &w[1]).unwrap(), "{alg}");
            }
        }
    }

    #[test]
    fn insertions_and_deletions_stay_valid() {
        let tree = dataset(
            &[("g1", "root"), ("g2", "root"), ("g3", "g2")],
            &[
                ("a", "g1", &[3.0, 0.0, 0.0, 2.0, 2.0]),
                ("b", "g1", &[1.0, 1.5, 0.0, 0.0, 1.0]),
                ("c", "g2", &[2.0, 2.0, 3.0, 2.6, 0.0]),
                ("d", "g3", &[0.0, 0.7, 0.5, 0.9, 1.0]),
                ("e", "g3", &[0.0, 0.0, 0.5, 0.9, 1.0]),
                ("f", "root", &[4.0, 4.4, 3.1, 0.0, 3.0]),
            ],
        );
        let rect = Rect::new(0.0, 0.0, 100.0, 60.0);
        for alg in [Algorithm::Lm0, Algorithm::Lm4, Algorithm::Git] {
            let layouts = run(alg, &tree, rect);
            assert_eq!(layouts[1].cell_ids(), ["b", "c", "d", "f"].into_iter().collect());
            assert_eq!(layouts[4].cell_ids(), ["a", "b", "d", "e", "f"].into_iter().collect());
        }
    }

    #[test]
    fn deletions_move_less_than_a_relayout() {
        let w: [&[f64]; 9] = [
            &[1.0, 1.0, 1.0],
            &[2.0, 2.0, 2.0],
            &[0.2, 0.0, 0.0],
            &[0.2, 0.0, 0.2],
            &[0.8, 0.8, 0.8],
            &[1.1, 1.1, 1.1],
            &[0.15, 0.15, 0.0],
            &[1.3, 1.3, 1.3],
            &[0.7, 0.7, 0.7],
        ];
        let names = ["a", "b", "c", "d", "e", "f", "g", "h", "i"];
        let leaves: Vec<(&str, &str, &[f64])> = names.iter().zip(w).map(|(n, w)| (*n, "root", w)).collect();
        let tree = dataset(&[], &leaves);
        let rect = Rect::new(0.0, 0.0, 100.0, 100.0);
        let travel = |a: &Layout, b: &Layout| {
            let common: Vec<_> = b.cells.keys().filter(|id| a.cells.contains_key(*id)).collect();
            let sum: f64 = common.iter().map(|id| crate::metrics::corner_travel(&a.cells[*id], &b.cells[*id], &rect)).sum();
            sum / common.len() as f64
        };
        for (alg, initial) in [(Algorithm::Lm0, Algorithm::App), (Algorithm::Git, Algorithm::Sqr)] {
            let layouts = run(alg, &tree, rect);
            for t in 1..layouts.len() {
                let step = normalize_step(&tree, t, rect.area()).unwrap();
                let afresh = layout_tree(&tree, &step, rect, initial);
                let (kept, fresh) = (travel(&layouts[t - 1], &layouts[t]), travel(&layouts[t - 1], &afresh));
                assert!(kept < 0.06 && kept < fresh, "{alg} t={t}: {kept} vs {fresh}");
            }
        }
    }

    #[test]
    fn slivers_are_dropped() {
        let cells = BTreeMap::from([
            ("a".to_string(), Rect::new(0.0, 0.0, 50.0, 10.0)),
            ("x".to_string(), Rect::new(50.0, 0.0, 1e-12, 10.0)),
            ("b".to_string(), Rect::new(50.0 + 1e-12, 0.0, 50.0 - 1e-12, 10.0)),
        ]);
        let layout = Layout::from_cells(Rect::new(0.0, 0.0, 100.0, 10.0), cells, BTreeMap::new());
        let out = without_slivers(&layout, &["x".to_string()]).unwrap();
        assert_eq!(out.cell_ids(), ["a", "b"].into_iter().collect());
        assert_eq!(out.cells["a"].right(), out.cells["b"].x);
        assert!(without_slivers(&layout, &["a".to_string()]).is_none());
    }

    #[test]
    fn moves_fix_a_sliver() {
        let tree = dataset(
            &[],
            &[("a", "root", &[0.5, 0.1]), ("b", "root", &[0.25, 0.45]), ("c", "root", &[0.25, 0.45])],
        );
        let rect = Rect::new(0.0, 0.0, 1.0, 1.0);
        let lm0 = run(Algorithm::Lm0, &tree, rect);
        let lm4 = run(Algorithm::Lm4, &tree, rect);
        assert!((lm0[1].cells["a"].w - 0.1).abs() < 1e-9);
        assert!(mean_rho(&lm4[1]) > mean_rho(&lm0[1]) + 0.05);
    }

    #[test]
    fn deterministic() {
        let tree = nested();
        let rect = Rect::new(0.0, 0.0, 100.0, 60.0);
        assert_eq!(run(Algorithm::Lm4, &tree, rect), run(Algorithm::Lm4, &tree, rect));
    }

    #[test]
    fn stretch_keeps_the_union() {
        let l = Rect::new(0.0, 0.0, 1.0, 1.0);
        let r = Rect::new(1.0, 0.0, 1.0, 2.0);
        for (a, c) in moves(&l, &r, 1e-12).into_iter().chain(moves(&r, &l, 1e-12).into_iter().map(|(x, y)| (y, x))) {
            assert!((a.area() + c.area() - 3.0).abs() < 1e-12);
            assert_eq!(a.overlap(&c), 0.0);
            assert_eq!(a.union(&c), l.union(&r));
        }
        let flips = moves(&l, &Rect::new(1.0, 0.0, 3.0, 1.0), 1e-12);
        assert_eq!(flips, vec![(Rect::new(0.0, 0.0, 4.0, 0.25), Rect::new(0.0, 0.25, 4.0, 0.75))]);
    }
}
