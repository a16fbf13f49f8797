//! Order-preserving area realization and the baseline treemap.
//!
//! The realizer moves maximal segments only, so the combinatorial structure
//! of the layout never changes. Each iteration sweeps every segment once,
//! balancing the achieved-to-target area ratios on its two sides, and then
//! takes a damped Gauss-Newton step on all segments jointly.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{CellJson, Dissection, Layout, Orientation, Rect, Support, BOTTOM, LEFT, RIGHT, TOP};
use crate::model::NormalizedStep;

/// Target given to cells that vanish, as a fraction of the root area.
pub const VANISHING_AREA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizeOptions {
    /// Maximum relative area error at convergence.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Errors of targets below `floor * area(R)` are measured against that
    /// floor instead of the target itself.
    pub floor: f64,
    /// Shuffles the segment sweep order; `None` sweeps in canonical order.
    pub shuffle: Option<u64>,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        RealizeOptions {
            tolerance: 1e-9,
            max_iterations: 10_000,
            floor: 1e-6,
            shuffle: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub coords: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub max_rel_error: f64,
}

struct Problem<'a> {
    d: &'a Dissection,
    targets: &'a [f64],
    denom: Vec<f64>,
    /// Cells on the low and high side of every segment.
    inc: Vec<(Vec<usize>, Vec<usize>)>,
}

impl Problem<'_> {
    fn sides(&self, coords: &[f64], i: usize) -> [f64; 4] {
        [TOP, BOTTOM, LEFT, RIGHT].map(|k| self.d.side_coord(coords, i, k))
    }

    fn area(&self, coords: &[f64], i: usize) -> f64 {
        let [t, b, l, r] = self.sides(coords, i);
        (r - l) * (b - t)
    }

    fn max_error(&self, coords: &[f64]) -> f64 {
        (0..self.d.num_cells())
            .map(|i| (self.area(coords, i) - self.targets[i]).abs() / self.denom[i])
            .fold(0.0, f64::max)
    }

    fn merit(&self, coords: &[f64]) -> f64 {
        (0..self.d.num_cells())
            .map(|i| ((self.area(coords, i) - self.targets[i]) / self.denom[i]).powi(2))
            .sum()
    }

    /// Extent of cell `i` across segment orientation `o` (height for
    /// vertical segments, width for horizontal ones) and its size along it.
    fn across(&self, coords: &[f64], i: usize, o: Orientation) -> (f64, f64) {
        let [t, b, l, r] = self.sides(coords, i);
        match o {
            Orientation::Vertical => (b - t, r - l),
            Orientation::Horizontal => (r - l, b - t),
        }
    }

    /// Places segment `s` so that the ratio of achieved to target area is
    /// the same for the cells on both of its sides.
    fn relax(&self, coords: &mut [f64], s: usize) {
        let o = self.d.orientation[s];
        let (low, high) = &self.inc[s];
        let side = |cells: &[usize]| {
            let (mut area, mut target, mut span, mut room) = (0.0, 0.0, 0.0, f64::INFINITY);
            for &i in cells {
                let (g, size) = self.across(coords, i, o);
                area += g * size;
                target += self.targets[i];
                span += g;
                room = room.min(size);
            }
            (area, target, span, room)
        };
        let (al, tl, gl, lo_room) = side(low);
        let (ah, th, gh, hi_room) = side(high);
        let den = gl * th + gh * tl;
        if den > 0.0 {
            let step = ((ah * tl - al * th) / den).clamp(-0.9 * lo_room, 0.9 * hi_room);
            coords[s] += step;
        }
    }

    /// Rows of the area Jacobian: `(segment, d area / d coord)` pairs.
    fn jacobian(&self, coords: &[f64]) -> Vec<Vec<(usize, f64)>> {
        (0..self.d.num_cells())
            .map(|i| {
                let [t, b, l, r] = self.sides(coords, i);
                let (w, h) = (r - l, b - t);
                let mut row = Vec::with_capacity(4);
                for (k, coef) in [(TOP, -w), (BOTTOM, w), (LEFT, -h), (RIGHT, h)] {
                    if let Support::Segment(s) = self.d.sides[i][k] {
                        row.push((s, coef));
                    }
                }
                row
            })
            .collect()
    }

    fn newton(&self, coords: &mut Vec<f64>) {
        let m = self.d.num_segments();
        let jac = self.jacobian(coords);
        let rhs: Vec<f64> = (0..self.d.num_cells())
            .map(|i| self.targets[i] - self.area(coords, i))
            .collect();
        let Some(step) = cgls(&jac, m, &rhs) else { return };

        // Largest step keeping every cell at least 5% of its current size.
        let mut alpha: f64 = 1.0;
        for i in 0..self.d.num_cells() {
            let [t, b, l, r] = self.sides(coords, i);
            let delta = |k: usize| self.d.sides[i][k].segment().map_or(0.0, |s| step[s]);
            for (size, change) in [(b - t, delta(BOTTOM) - delta(TOP)), (r - l, delta(RIGHT) - delta(LEFT))] {
                if change < 0.0 {
                    alpha = alpha.min(0.95 * size / -change);
                }
            }
        }
        let current = self.merit(coords);
        let mut trial = coords.clone();
        for _ in 0..40 {
            for (c, (x, dx)) in trial.iter_mut().zip(coords.iter().zip(&step)) {
                *c = x + alpha * dx;
            }
            if self.merit(&trial) < current {
                *coords = trial;
                return;
            }
            alpha *= 0.5;
        }
    }
}

/// Least-squares solution of `J x = b` by conjugate gradients on the normal
/// equations, with Jacobi column scaling.
fn cgls(jac: &[Vec<(usize, f64)>], m: usize, b: &[f64]) -> Option<Vec<f64>> {
    let mut scale = vec![0.0; m];
    for row in jac {
        for &(s, v) in row {
            scale[s] += v * v;
        }
    }
    for s in scale.iter_mut() {
        *s = if *s > 0.0 { 1.0 / s.sqrt() } else { 0.0 };
    }
    let apply = |x: &[f64]| -> Vec<f64> {
        jac.iter()
            .map(|row| row.iter().map(|&(s, v)| v * scale[s] * x[s]).sum())
            .collect()
    };
    let apply_t = |y: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; m];
        for (row, yi) in jac.iter().zip(y) {
            for &(s, v) in row {
                out[s] += v * scale[s] * yi;
            }
        }
        out
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut x = vec![0.0; m];
    let mut r = b.to_vec();
    let mut s = apply_t(&r);
    let mut p = s.clone();
    let mut gamma = dot(&s, &s);
    let gamma0 = gamma;
    if !(gamma0 > 0.0) {
        return None;
    }
    for _ in 0..(3 * m + 50) {
        let q = apply(&p);
        let qq = dot(&q, &q);
        if !(qq > 0.0) {
            break;
        }
        let a = gamma / qq;
        for (xi, pi) in x.iter_mut().zip(&p) {
            *xi += a * pi;
        }
        for (ri, qi) in r.iter_mut().zip(&q) {
            *ri -= a * qi;
        }
        s = apply_t(&r);
        let next = dot(&s, &s);
        if next <= 1e-28 * gamma0 {
            break;
        }
        let beta = next / gamma;
        for (pi, si) in p.iter_mut().zip(&s) {
            *pi = si + beta * *pi;
        }
        gamma = next;
    }
    Some(x.iter().zip(&scale).map(|(xi, si)| xi * si).collect())
}

/// Moves the segments of `d` until every cell area matches `targets`
/// (indexed like `d.ids`).
pub fn realize(d: &Dissection, targets: &[f64], opts: &RealizeOptions) -> Realization {
    let floor = opts.floor * d.root.area();
    let problem = Problem {
        d,
        targets,
        denom: targets.iter().map(|t| t.max(floor)).collect(),
        inc: d.incidence(),
    };
    let mut order: Vec<usize> = (0..d.num_segments()).collect();
    order.sort_by(|&a, &b| {
        d.orientation[a]
            .cmp(&d.orientation[b])
            .then(d.coords[a].total_cmp(&d.coords[b]))
            .then(a.cmp(&b))
    });
    let mut rng = opts.shuffle.map(ChaCha8Rng::seed_from_u64);

    let mut coords = d.coords.clone();
    let mut err = problem.max_error(&coords);
    let mut iterations = 0;
    while err > opts.tolerance && iterations < opts.max_iterations {
        iterations += 1;
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        for &s in &order {
            problem.relax(&mut coords, s);
        }
        problem.newton(&mut coords);
        err = problem.max_error(&coords);
    }
    Realization {
        coords,
        iterations,
        converged: err <= opts.tolerance,
        max_rel_error: err,
    }
}

/// Result of realizing new areas on an existing layout.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    /// Cells of the leaves that have positive target area.
    pub baseline: Layout,
    /// Rectangles that absorb inserted area; not part of any leaf.
    pub walls: Vec<Rect>,
    /// Leaves whose area was driven to zero.
    pub deleted: Vec<String>,
    pub converged: bool,
    pub max_rel_area_error: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WallJson {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineJson {
    pub t: usize,
    pub cells: Vec<CellJson>,
    pub walls: Vec<WallJson>,
    pub deleted: Vec<String>,
    pub converged: bool,
    pub iterations: usize,
    pub max_rel_area_error: f64,
}

impl BaselineResult {
    pub fn to_json(&self, t: usize) -> BaselineJson {
        BaselineJson {
            t,
            cells: self.baseline.to_json(t).cells,
            walls: self
                .walls
                .iter()
                .map(|r| WallJson {
                    x: r.x,
                    y: r.y,
                    w: r.w,
                    h: r.h,
                })
                .collect(),
            deleted: self.deleted.clone(),
            converged: self.converged,
            iterations: self.iterations,
            max_rel_area_error: self.max_rel_area_error,
        }
    }
}

/// Realizes `targets` on `layout` without changing its segment structure.
/// Targets of zero are replaced by a vanishing positive area and the
/// corresponding cells are reported as deleted.
pub fn hill_climb_realize(layout: &Layout, targets: &BTreeMap<String, f64>) -> Result<BaselineResult> {
    hill_climb_realize_with(layout, targets, &RealizeOptions::default())
}

pub fn hill_climb_realize_with(
    layout: &Layout,
    targets: &BTreeMap<String, f64>,
    opts: &RealizeOptions,
) -> Result<BaselineResult> {
    let have: BTreeSet<&str> = layout.cells.keys().map(String::as_str).collect();
    let want: BTreeSet<&str> = targets.keys().map(String::as_str).collect();
    if have != want {
        return Err(Error::LeafMismatch);
    }
    let d = Dissection::from_layout(layout)?;
    let area = layout.root.area();
    let raw: Vec<f64> = d.ids.iter().map(|id| targets[id]).collect();
    if let Some(t) = raw.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidRequest(format!("target area {t}")));
    }
    let total: f64 = raw.iter().sum();
    if (total - area).abs() > 1e-6 * area {
        return Err(Error::InvalidRequest(format!(
            "targets sum to {total} but the root has area {area}"
        )));
    }
    let deleted: Vec<usize> = (0..raw.len()).filter(|&i| raw[i] == 0.0).collect();
    let vanishing = VANISHING_AREA * area;
    let alive_total: f64 = raw.iter().sum();
    let scale = (area - vanishing * deleted.len() as f64) / alive_total;
    let scaled: Vec<f64> = raw.iter().map(|&t| if t == 0.0 { vanishing } else { t * scale }).collect();

    let real = realize(&d, &scaled, opts);
    if !real.converged {
        return Err(Error::NonConvergence {
            iterations: real.iterations,
            residual: real.max_rel_error,
        });
    }
    let mut cells = BTreeMap::new();
    let mut deleted_ids = Vec::new();
    for (i, id) in d.ids.iter().enumerate() {
        if raw[i] == 0.0 {
            deleted_ids.push(id.clone());
        } else {
            cells.insert(id.clone(), d.rect_with(&real.coords, i));
        }
    }
    Ok(BaselineResult {
        baseline: Layout::from_cells(layout.root, cells, layout.parents.clone()),
        walls: Vec::new(),
        deleted: deleted_ids,
        converged: true,
        max_rel_area_error: max_rel_error(&d, &real.coords, &scaled, &|i| raw[i] > 0.0),
        iterations: real.iterations,
    })
}

fn max_rel_error(d: &Dissection, coords: &[f64], targets: &[f64], keep: &dyn Fn(usize) -> bool) -> f64 {
    (0..d.num_cells())
        .filter(|&i| keep(i))
        .map(|i| (d.rect_with(coords, i).area() - targets[i]).abs() / targets[i])
        .fold(0.0, f64::max)
}

/// Builds the baseline T* for the transition `prev_step -> next_step` from
/// the layout `prev` of `prev_step`.
pub fn build_baseline(prev: &Layout, prev_step: &NormalizedStep, next_step: &NormalizedStep) -> Result<BaselineResult> {
    build_baseline_with(prev, prev_step, next_step, &RealizeOptions::default())
}

pub fn build_baseline_with(
    prev: &Layout,
    prev_step: &NormalizedStep,
    next_step: &NormalizedStep,
    opts: &RealizeOptions,
) -> Result<BaselineResult> {
    for id in prev.cells.keys() {
        if !prev_step.is_alive(id) {
            return Err(Error::InvalidRequest(format!("cell `{id}` is not alive in the previous step")));
        }
    }
    let area = prev.root.area();
    let inserted: f64 = next_step
        .alive()
        .filter(|(id, _)| !prev.cells.contains_key(*id))
        .map(|(_, a)| a)
        .sum();
    let survivors: Vec<&String> = prev.cells.keys().filter(|id| next_step.is_alive(id)).collect();
    let deleted: Vec<String> = prev.cells.keys().filter(|id| !next_step.is_alive(id)).cloned().collect();
    if survivors.is_empty() {
        return Ok(BaselineResult {
            baseline: Layout::from_cells(prev.root, BTreeMap::new(), prev.parents.clone()),
            walls: Vec::new(),
            deleted,
            converged: true,
            max_rel_area_error: 0.0,
            iterations: 0,
        });
    }
    let targets: BTreeMap<String, f64> = prev
        .cells
        .keys()
        .map(|id| (id.clone(), next_step.area(id)))
        .collect();
    if inserted <= 0.0 {
        let scale = area / targets.values().sum::<f64>();
        let targets = targets.into_iter().map(|(k, v)| (k, v * scale)).collect();
        return hill_climb_realize_with(prev, &targets, opts);
    }

    let d = Dissection::from_layout(prev)?;
    if d.num_segments() == 0 {
        // A single cell has no wall to thicken: it shrinks about its centre.
        let (id, r) = prev.cells.iter().next().expect("one cell");
        let k = (next_step.area(id) / r.area()).sqrt();
        let (cx, cy) = r.center();
        let cell = Rect::new(cx - r.w * k / 2.0, cy - r.h * k / 2.0, r.w * k, r.h * k);
        return Ok(BaselineResult {
            baseline: Layout::from_cells(prev.root, BTreeMap::from([(id.clone(), cell)]), prev.parents.clone()),
            walls: Vec::new(),
            deleted,
            converged: true,
            max_rel_area_error: 0.0,
            iterations: 0,
        });
    }

    let walled = thicken(&d);
    let n = d.num_cells();
    let lengths = segment_lengths(&d);
    let tau = inserted / lengths.iter().sum::<f64>();
    let vanishing = VANISHING_AREA * area;
    let mut wanted: Vec<f64> = d.ids.iter().map(|id| targets[id]).collect();
    let alive_total: f64 = wanted.iter().filter(|t| **t > 0.0).sum();
    let n_dead = wanted.iter().filter(|t| **t == 0.0).count() as f64;
    let scale = (area - inserted - vanishing * n_dead) / alive_total;
    for t in wanted.iter_mut() {
        *t = if *t == 0.0 { vanishing } else { *t * scale };
    }
    wanted.extend(lengths.iter().map(|len| tau * len));

    let real = realize(&walled, &wanted, opts);
    if !real.converged {
        return Err(Error::NonConvergence {
            iterations: real.iterations,
            residual: real.max_rel_error,
        });
    }
    let cells: BTreeMap<String, Rect> = (0..n)
        .filter(|&i| next_step.is_alive(&d.ids[i]))
        .map(|i| (d.ids[i].clone(), walled.rect_with(&real.coords, i)))
        .collect();
    let walls = (n..walled.num_cells()).map(|i| walled.rect_with(&real.coords, i)).collect();
    Ok(BaselineResult {
        baseline: Layout::from_cells(prev.root, cells, prev.parents.clone()),
        walls,
        deleted,
        converged: true,
        max_rel_area_error: max_rel_error(&walled, &real.coords, &wanted, &|i| {
            i >= n || next_step.is_alive(&d.ids[i])
        }),
        iterations: real.iterations,
    })
}

fn segment_lengths(d: &Dissection) -> Vec<f64> {
    segment_span(d).into_iter().map(|(a, b)| b - a).collect()
}

/// Replaces every segment by two parallel copies with a wall cell between
/// them. Segment `s` becomes `2s` (low side) and `2s + 1` (high side); wall
/// `s` is cell `n + s`. A wall ends on the facing copy of the segment its
/// end rests on, so the wall of a through-segment is continuous.
fn thicken(d: &Dissection) -> Dissection {
    let n = d.num_cells();
    let m = d.num_segments();
    let lo = |s: usize| Support::Segment(2 * s);
    let hi = |s: usize| Support::Segment(2 * s + 1);

    let mut min_size = f64::INFINITY;
    let mut sides = Vec::with_capacity(n + m);
    let mut ends = vec![[Support::Boundary; 2]; m];
    for i in 0..n {
        let r = d.rect(i);
        min_size = min_size.min(r.w).min(r.h);
        let mut out = d.sides[i];
        for (k, side) in out.iter_mut().enumerate() {
            if let Support::Segment(s) = *side {
                *side = if k == BOTTOM || k == RIGHT { lo(s) } else { hi(s) };
            }
        }
        sides.push(out);
    }
    for (s, (start, end)) in segment_span(d).into_iter().enumerate() {
        ends[s] = [end_support(d, s, start, true), end_support(d, s, end, false)];
    }
    for s in 0..m {
        let [a, b] = ends[s];
        let a = a.segment().map_or(Support::Boundary, hi);
        let b = b.segment().map_or(Support::Boundary, lo);
        sides.push(match d.orientation[s] {
            Orientation::Horizontal => [lo(s), hi(s), a, b],
            Orientation::Vertical => [a, b, lo(s), hi(s)],
        });
    }
    let gap = 0.05 * min_size;
    let mut coords = Vec::with_capacity(2 * m);
    let mut orientation = Vec::with_capacity(2 * m);
    for s in 0..m {
        coords.push(d.coords[s] - gap / 2.0);
        coords.push(d.coords[s] + gap / 2.0);
        orientation.push(d.orientation[s]);
        orientation.push(d.orientation[s]);
    }
    let mut ids = d.ids.clone();
    ids.extend((0..m).map(|s| format!("wall:{s}")));
    Dissection {
        root: d.root,
        orientation,
        coords,
        ids,
        sides,
    }
}

/// Start and end of every segment along its own direction.
fn segment_span(d: &Dissection) -> Vec<(f64, f64)> {
    let mut span = vec![(f64::INFINITY, f64::NEG_INFINITY); d.num_segments()];
    for i in 0..d.num_cells() {
        let r = d.rect(i);
        for (k, s) in d.sides[i].iter().enumerate() {
            if let Support::Segment(s) = *s {
                let (a, b) = if k == TOP || k == BOTTOM { (r.x, r.right()) } else { (r.y, r.bottom()) };
                span[s].0 = span[s].0.min(a);
                span[s].1 = span[s].1.max(b);
            }
        }
    }
    span
}

/// The perpendicular support at position `at` of segment `s`: the side of
/// an incident cell that starts (or ends) there.
fn end_support(d: &Dissection, s: usize, at: f64, start: bool) -> Support {
    let horizontal = d.orientation[s] == Orientation::Horizontal;
    let eps = 1e-9 * d.root.diagonal();
    for i in 0..d.num_cells() {
        if !d.sides[i].contains(&Support::Segment(s)) {
            continue;
        }
        let r = d.rect(i);
        let (k, pos) = match (horizontal, start) {
            (true, true) => (LEFT, r.x),
            (true, false) => (RIGHT, r.right()),
            (false, true) => (TOP, r.y),
            (false, false) => (BOTTOM, r.bottom()),
        };
        if (pos - at).abs() <= eps {
            return d.sides[i][k];
        }
    }
    Support::Boundary
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn unit() -> Rect {
        Rect::new(0.0, 0.0, 1.0, 1.0)
    }

    fn halves() -> Layout {
        let cells = BTreeMap::from([
            ("a".to_string(), Rect::new(0.0, 0.0, 0.5, 1.0)),
            ("b".to_string(), Rect::new(0.5, 0.0, 0.5, 1.0)),
        ]);
        Layout::from_cells(unit(), cells, BTreeMap::new())
    }

    fn step(areas: &[(&str, f64)]) -> NormalizedStep {
        NormalizedStep {
            timestep: 0,
            areas: areas.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    /// Random guillotine layout with `n` cells.
    pub(crate) fn guillotine(n: usize, root: Rect, rng: &mut impl Rng) -> Layout {
        let mut rects = vec![root];
        while rects.len() < n {
            let k = rng.gen_range(0..rects.len());
            let r = rects.swap_remove(k);
            let f = rng.gen_range(0.2..0.8);
            let (a, b) = if rng.gen_bool(0.5) {
                (Rect::new(r.x, r.y, r.w * f, r.h), Rect::from_sides(r.x + r.w * f, r.y, r.right(), r.bottom()))
            } else {
                (Rect::new(r.x, r.y, r.w, r.h * f), Rect::from_sides(r.x, r.y + r.h * f, r.right(), r.bottom()))
            };
            rects.push(a);
            rects.push(b);
        }
        let cells = rects.into_iter().enumerate().map(|(i, r)| (format!("c{i}"), r)).collect();
        Layout::from_cells(root, cells, BTreeMap::new())
    }

    #[test]
    fn single_cut_moves() {
        let targets = BTreeMap::from([("a".to_string(), 0.25), ("b".to_string(), 0.75)]);
        let res = hill_climb_realize(&halves(), &targets).unwrap();
        assert!((res.baseline.cells["a"].right() - 0.25).abs() < 1e-9);
        assert!(res.max_rel_area_error <= 1e-6);
    }

    #[test]
    fn fixed_point_takes_no_iterations() {
        let targets = BTreeMap::from([("a".to_string(), 0.5), ("b".to_string(), 0.5)]);
        let res = hill_climb_realize(&halves(), &targets).unwrap();
        assert_eq!(res.iterations, 0);
        assert_eq!(res.baseline.cells, halves().cells);
    }

    #[test]
    fn random_guillotine_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let layout = guillotine(100, Rect::new(0.0, 0.0, 1000.0, 1000.0), &mut rng);
        let raw: Vec<f64> = (0..100).map(|_| rng.gen_range(0.1..10.0)).collect();
        let total: f64 = raw.iter().sum();
        let targets: BTreeMap<String, f64> =
            layout.cells.keys().zip(&raw).map(|(k, v)| (k.clone(), v / total * 1e6)).collect();
        let res = hill_climb_realize(&layout, &targets).unwrap();
        assert!(res.max_rel_area_error <= 1e-6);
        for (id, r) in &res.baseline.cells {
            assert!((r.area() - targets[id]).abs() <= 1e-6 * targets[id]);
        }
        assert!(crate::geometry::order_equivalent(&layout, &res.baseline).unwrap());
    }

    #[test]
    fn unchanged_step_is_identity() {
        let s = step(&[("a", 0.5), ("b", 0.5)]);
        let res = build_baseline(&halves(), &s, &s).unwrap();
        assert_eq!(res.baseline.cells, halves().cells);
        assert!(res.walls.is_empty());
    }

    #[test]
    fn insertion_thickens_the_cut() {
        let prev = step(&[("a", 0.5), ("b", 0.5)]);
        let next = step(&[("a", 0.45), ("b", 0.45), ("n", 0.1)]);
        let res = build_baseline(&halves(), &prev, &next).unwrap();
        let a = res.baseline.cells["a"];
        let b = res.baseline.cells["b"];
        assert!((a.w - 0.45).abs() < 1e-9 && (a.h - 1.0).abs() < 1e-12);
        assert!((b.x - 0.55).abs() < 1e-9 && (b.w - 0.45).abs() < 1e-9);
        assert_eq!(res.walls.len(), 1);
        assert!((res.walls[0].w - 0.1).abs() < 1e-9 && (res.walls[0].x - 0.45).abs() < 1e-9);
    }

    #[test]
    fn walls_at_junctions_tile_the_root() {
        // Vertical cut with the right half cut horizontally.
        let cells = BTreeMap::from([
            ("a".to_string(), Rect::new(0.0, 0.0, 0.5, 1.0)),
            ("b".to_string(), Rect::new(0.5, 0.0, 0.5, 0.4)),
            ("c".to_string(), Rect::new(0.5, 0.4, 0.5, 0.6)),
        ]);
        let layout = Layout::from_cells(unit(), cells, BTreeMap::new());
        let prev = step(&[("a", 0.5), ("b", 0.2), ("c", 0.3)]);
        let next = step(&[("a", 0.4), ("b", 0.2), ("c", 0.25), ("n", 0.15)]);
        let res = build_baseline(&layout, &prev, &next).unwrap();
        assert_eq!(res.walls.len(), 2);
        let covered: f64 = res.baseline.cells.values().chain(&res.walls).map(Rect::area).sum();
        assert!((covered - 1.0).abs() < 1e-9);
        let all: Vec<Rect> = res.baseline.cells.values().chain(&res.walls).copied().collect();
        for (i, p) in all.iter().enumerate() {
            assert!(p.protrusion(&unit()) < 1e-12);
            for q in &all[i + 1..] {
                assert!(p.overlap(q) < 1e-12);
            }
        }
        // Walls take area in proportion to the length of their segment.
        let vertical = res.walls.iter().find(|w| w.h > w.w).unwrap();
        let horizontal = res.walls.iter().find(|w| w.w > w.h).unwrap();
        assert!((vertical.area() - 0.1).abs() < 1e-9);
        assert!((horizontal.area() - 0.05).abs() < 1e-9);
        assert!((res.baseline.cells["c"].area() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn deletion_collapses_the_cell() {
        let cells = BTreeMap::from([
            ("a".to_string(), Rect::new(0.0, 0.0, 0.5, 1.0)),
            ("b".to_string(), Rect::new(0.5, 0.0, 0.5, 0.5)),
            ("c".to_string(), Rect::new(0.5, 0.5, 0.5, 0.5)),
        ]);
        let layout = Layout::from_cells(unit(), cells, BTreeMap::new());
        let prev = step(&[("a", 0.5), ("b", 0.25), ("c", 0.25)]);
        let next = step(&[("a", 0.6), ("b", 0.4)]);
        let res = build_baseline(&layout, &prev, &next).unwrap();
        assert_eq!(res.deleted, vec!["c".to_string()]);
        assert!((res.baseline.cells["a"].area() - 0.6).abs() < 1e-9);
        assert!((res.baseline.cells["b"].area() - 0.4).abs() < 1e-9);
        assert!(!res.baseline.cells.contains_key("c"));
    }

    #[test]
    fn shuffled_sweeps_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let layout = guillotine(60, unit(), &mut rng);
        let d = Dissection::from_layout(&layout).unwrap();
        let raw: Vec<f64> = (0..60).map(|_| rng.gen_range(0.5..2.0)).collect();
        let total: f64 = raw.iter().sum();
        let targets: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let base = realize(&d, &targets, &RealizeOptions::default());
        for seed in 0..10 {
            let opts = RealizeOptions {
                shuffle: Some(seed),
                ..Default::default()
            };
            let other = realize(&d, &targets, &opts);
            assert!(other.converged);
            for (a, b) in base.coords.iter().zip(&other.coords) {
                assert!((a - b).abs() <= 1e-4 * 2f64.sqrt());
            }
        }
    }
}
