//! Stateless treemap algorithms and the hierarchy driver.
//!
//! Every algorithm partitions one rectangle among an ordered list of items
//! whose areas sum to the rectangle's area. [`layout_tree`] applies an
//! algorithm top-down, laying out each internal node's alive children inside
//! the node's rectangle.

mod approx;
mod curve;
mod pivot;
mod slice;
mod spiral;
mod split;
mod squarified;
mod strip;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use curve::Curve;
pub use pivot::{pivot_index, PivotRule};

use crate::error::{Error, Result};
use crate::geometry::{Layout, Rect};
use crate::model::{NormalizedStep, TimeVaryingTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Algorithm {
    Snd,
    Sqr,
    App,
    Pbm,
    Pbz,
    Pbs,
    Str,
    Spl,
    Spi,
    Hil,
    Moo,
    Lm0,
    Lm4,
    Git,
}

impl Algorithm {
    pub const ALL: [Algorithm; 14] = [
        Algorithm::Snd,
        Algorithm::Sqr,
        Algorithm::App,
        Algorithm::Pbm,
        Algorithm::Pbz,
        Algorithm::Pbs,
        Algorithm::Str,
        Algorithm::Spl,
        Algorithm::Spi,
        Algorithm::Hil,
        Algorithm::Moo,
        Algorithm::Lm0,
        Algorithm::Lm4,
        Algorithm::Git,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Snd => "SND",
            Algorithm::Sqr => "SQR",
            Algorithm::App => "APP",
            Algorithm::Pbm => "PBM",
            Algorithm::Pbz => "PBZ",
            Algorithm::Pbs => "PBS",
            Algorithm::Str => "STR",
            Algorithm::Spl => "SPL",
            Algorithm::Spi => "SPI",
            Algorithm::Hil => "HIL",
            Algorithm::Moo => "MOO",
            Algorithm::Lm0 => "LM0",
            Algorithm::Lm4 => "LM4",
            Algorithm::Git => "GIT",
        }
    }

    /// State-aware algorithms carry the previous layout forward.
    pub fn is_stateful(self) -> bool {
        matches!(self, Algorithm::Lm0 | Algorithm::Lm4 | Algorithm::Git)
    }

    /// Unordered algorithms may sort their input by weight.
    pub fn is_unordered(self) -> bool {
        matches!(self, Algorithm::Sqr | Algorithm::App)
    }

    /// Parses `ALL` or a comma-separated list of names.
    pub fn parse_list(s: &str) -> Result<Vec<Algorithm>> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(Self::ALL.to_vec());
        }
        s.split(',').map(|p| p.trim().parse()).collect()
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

/// One rectangle to partition among ordered items.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutRequest {
    pub rect: Rect,
    pub items: Vec<(String, f64)>,
}

impl LayoutRequest {
    pub fn new(rect: Rect, items: Vec<(String, f64)>) -> Result<Self> {
        let req = LayoutRequest { rect, items };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rect.w > 0.0 && self.rect.h > 0.0) {
            return Err(Error::InvalidRequest(format!("rectangle {:?} has no area", self.rect)));
        }
        if self.items.is_empty() {
            return Err(Error::InvalidRequest("no items".into()));
        }
        if let Some((id, a)) = self.items.iter().find(|(_, a)| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidRequest(format!("item `{id}` has area {a}")));
        }
        let total: f64 = self.items.iter().map(|(_, a)| a).sum();
        let rel = (total - self.rect.area()).abs() / self.rect.area();
        if rel > 1e-9 {
            return Err(Error::InvalidRequest(format!(
                "areas sum to {total} but the rectangle has area {}",
                self.rect.area()
            )));
        }
        Ok(())
    }

    fn areas(&self) -> Vec<f64> {
        self.items.iter().map(|(_, a)| *a).collect()
    }

    fn attach(&self, rects: Vec<Rect>) -> Vec<(String, Rect)> {
        self.items.iter().map(|(id, _)| id.clone()).zip(rects).collect()
    }
}

pub fn slice_and_dice(req: &LayoutRequest, depth: usize) -> Result<Vec<(String, Rect)>> {
    req.validate()?;
    Ok(req.attach(slice::slice_and_dice(&req.rect, &req.areas(), depth)))
}

pub fn squarified(req: &LayoutRequest) -> Result<Vec<(String, Rect)>> {
    req.validate()?;
    Ok(req.attach(squarified::squarified(&req.rect, &req.areas())))
}

pub fn approximation(req: &LayoutRequest) -> Result<Vec<(String, Rect)>> {
    req.validate()?;
    Ok(req.attach(approx::approximation(&req.rect, &req.areas())))
}

pub fn strip(req: &LayoutRequest) -> Result<Vec<(String, Rect)>> {
    req.validate()?;
    Ok(req.attach(strip::strip(&req.rect, &req.areas())))
}

pub fn split(req: &LayoutRequest) -> Result<Vec<(String, Rect)>> {
    req.validate()?;
    Ok(req.attach(split::split(&req.rect, &req.areas())))
}

pub fn pivot(req: &LayoutRequest, rule: PivotRule) -> Result<Vec<(String, Rect)>> {
    req.validate()?;
    Ok(req.attach(pivot::pivot(&req.rect, &req.areas(), rule)))
}

pub fn spiral(req: &LayoutRequest) -> Result<Vec<(String, Rect)>> {
    req.validate()?;
    Ok(req.attach(spiral::spiral(&req.rect, &req.areas())))
}

pub fn space_filling(req: &LayoutRequest, curve: Curve) -> Result<Vec<(String, Rect)>> {
    req.validate()?;
    Ok(req.attach(curve::space_filling(&req.rect, &req.areas(), curve)))
}

/// Partitions `rect` among `areas` with a stateless algorithm. Areas are
/// rescaled to the rectangle's area first.
pub fn partition(alg: Algorithm, rect: &Rect, areas: &[f64], depth: usize) -> Vec<Rect> {
    let total: f64 = areas.iter().sum();
    let scaled: Vec<f64> = areas.iter().map(|a| a / total * rect.area()).collect();
    match alg {
        Algorithm::Snd => slice::slice_and_dice(rect, &scaled, depth),
        Algorithm::Sqr | Algorithm::Git => squarified::squarified(rect, &scaled),
        Algorithm::App | Algorithm::Lm0 | Algorithm::Lm4 => approx::approximation(rect, &scaled),
        Algorithm::Pbm => pivot::pivot(rect, &scaled, PivotRule::Middle),
        Algorithm::Pbz => pivot::pivot(rect, &scaled, PivotRule::Size),
        Algorithm::Pbs => pivot::pivot(rect, &scaled, PivotRule::Split),
        Algorithm::Str => strip::strip(rect, &scaled),
        Algorithm::Spl => split::split(rect, &scaled),
        Algorithm::Spi => spiral::spiral(rect, &scaled),
        Algorithm::Hil => curve::space_filling(rect, &scaled, Curve::Hilbert),
        Algorithm::Moo => curve::space_filling(rect, &scaled, Curve::Moore),
    }
}

/// Lays out one normalized time step from scratch, level by level.
///
/// State-aware algorithms map to their initializer (APP for LM0/LM4, SQR for
/// GIT); use [`crate::stateful`] to carry layouts across steps.
pub fn layout_tree(tree: &TimeVaryingTree, step: &NormalizedStep, rect: Rect, alg: Algorithm) -> Layout {
    let mut weights = vec![0.0; tree.nodes().len()];
    fill(tree, tree.root(), step, &mut weights);
    let mut layout = Layout::new(rect);
    layout.parents = tree.parent_map();
    place(tree, tree.root(), rect, 0, &weights, alg, &mut layout);
    layout
}

/// Lays out the subtree rooted at node `i` inside `rect`, inserting its
/// cells and groups into `layout`.
pub(crate) fn layout_subtree(
    tree: &TimeVaryingTree,
    step: &NormalizedStep,
    i: usize,
    rect: Rect,
    alg: Algorithm,
    layout: &mut Layout,
) {
    let mut weights = vec![0.0; tree.nodes().len()];
    fill(tree, tree.root(), step, &mut weights);
    place(tree, i, rect, tree.node(i).depth, &weights, alg, layout);
}

fn fill(tree: &TimeVaryingTree, i: usize, step: &NormalizedStep, out: &mut [f64]) -> f64 {
    let node = tree.node(i);
    let w = if node.is_leaf() {
        step.area(&node.id)
    } else {
        node.children.iter().map(|&c| fill(tree, c, step, out)).sum()
    };
    out[i] = w;
    w
}

fn place(
    tree: &TimeVaryingTree,
    i: usize,
    rect: Rect,
    depth: usize,
    weights: &[f64],
    alg: Algorithm,
    layout: &mut Layout,
) {
    let node = tree.node(i);
    if node.is_leaf() {
        layout.cells.insert(node.id.clone(), rect);
        return;
    }
    layout.groups.insert(node.id.clone(), rect);
    let alive: Vec<usize> = node.children.iter().copied().filter(|&c| weights[c] > 0.0).collect();
    let areas: Vec<f64> = alive.iter().map(|&c| weights[c]).collect();
    let rects = partition(alg, &rect, &areas, depth);
    for (c, r) in alive.into_iter().zip(rects) {
        place(tree, c, r, depth + 1, weights, alg, layout);
    }
}

/// Fills `rect` with consecutive slices proportional to `areas`, cutting
/// perpendicular to the x axis when `vertical_cuts` is set.
pub(crate) fn slices(rect: &Rect, areas: &[f64], vertical_cuts: bool) -> Vec<Rect> {
    let total: f64 = areas.iter().sum();
    let n = areas.len();
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    let (start, len) = if vertical_cuts { (rect.x, rect.w) } else { (rect.y, rect.h) };
    let end = start + len;
    let mut lo = start;
    for (k, a) in areas.iter().enumerate() {
        acc += a;
        let hi = if k + 1 == n { end } else { start + len * (acc / total) };
        out.push(if vertical_cuts {
            Rect::from_sides(lo, rect.y, hi, rect.bottom())
        } else {
            Rect::from_sides(rect.x, lo, rect.right(), hi)
        });
        lo = hi;
    }
    out
}

/// Splits `rect` in two along its longer side, the first part receiving
/// `first / (first + second)` of the area.
pub(crate) fn bisect(rect: &Rect, first: f64, second: f64) -> (Rect, Rect) {
    let r = slices(rect, &[first, second], rect.is_wide());
    (r[0], r[1])
}

/// Sum of a slice.
pub(crate) fn sum(a: &[f64]) -> f64 {
    a.iter().sum()
}

/// One layout per time step; state-aware algorithms carry their state
/// across steps.
pub fn layout_all_steps(tree: &TimeVaryingTree, rect: Rect, alg: Algorithm) -> Result<Vec<Layout>> {
    let steps = (0..tree.num_timesteps())
        .map(|t| crate::model::normalize_step(tree, t, rect.area()))
        .collect::<Result<Vec<_>>>()?;
    if !alg.is_stateful() {
        return Ok(steps.iter().map(|s| layout_tree(tree, s, rect, alg)).collect());
    }
    let tree = std::sync::Arc::new(tree.clone());
    let mut state = crate::stateful::init_state(alg, &steps[0], tree, rect, 0)?;
    let mut out = vec![state.current.clone()];
    for step in &steps[1..] {
        state.advance(step)?;
        out.push(state.current.clone());
    }
    Ok(out)
}

