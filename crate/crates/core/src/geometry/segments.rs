//! Maximal segments of a rectangular layout and the partial orders on them.
//!
//! Coordinates are first snapped to clusters (within `1e-9` of the root
//! diagonal) so that all combinatorial decisions are made on integer grid
//! indices. Where two lines cross, only one of them can be a single maximal
//! segment for the layout to stay generic; the line bounding the larger
//! hierarchy group passes through, and in a flat region the vertical line
//! wins. The four sides of the root are not segments.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::{Layout, Rect};
use crate::error::{Error, Result};

/// Relative snapping tolerance (fraction of the root diagonal).
pub const SNAP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

/// What a cell side (or a segment end) rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Support {
    Boundary,
    Segment(usize),
}

impl Support {
    pub fn segment(self) -> Option<usize> {
        match self {
            Support::Segment(s) => Some(s),
            Support::Boundary => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalSegment {
    pub orientation: Orientation,
    /// y for horizontal segments, x for vertical ones.
    pub coord: f64,
    pub start: f64,
    pub end: f64,
    /// Perpendicular supports of the two ends (left/top first).
    pub ends: [Support; 2],
    pub incident: BTreeSet<(String, Side)>,
}

impl MaximalSegment {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

/// Sides of one cell, in top, bottom, left, right order.
pub type CellSides = [Support; 4];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentGraph {
    pub segments: Vec<MaximalSegment>,
    /// `(a, b)`: some cell has its bottom on `a` and its top on `b`.
    pub order_h: BTreeSet<(usize, usize)>,
    /// `(a, b)`: some cell has its left side on `a` and its right side on `b`.
    pub order_v: BTreeSet<(usize, usize)>,
    pub cell_sides: BTreeMap<String, CellSides>,
}

/// Sorted cluster representatives for one axis.
struct Axis {
    values: Vec<f64>,
}

impl Axis {
    fn new(mut raw: Vec<f64>, eps: f64) -> Self {
        raw.sort_by(f64::total_cmp);
        let mut values: Vec<f64> = Vec::new();
        let mut last = f64::NEG_INFINITY;
        for v in raw {
            if v - last > eps {
                values.push(v);
            }
            last = v;
        }
        Axis { values }
    }

    fn index(&self, v: f64) -> usize {
        match self.values.binary_search_by(|p| p.total_cmp(&v)) {
            Ok(i) => i,
            Err(i) => {
                // Nearest representative not above v.
                if i == 0 {
                    0
                } else if i == self.values.len() || v - self.values[i - 1] <= self.values[i] - v {
                    i - 1
                } else {
                    i
                }
            }
        }
    }
}

/// Grid indices of a cell's left, top, right, bottom.
#[derive(Clone, Copy)]
struct GridCell {
    l: usize,
    t: usize,
    r: usize,
    b: usize,
}

/// A line candidate before splitting at crossings: `lo..hi` along the line.
#[derive(Clone, Debug)]
struct Piece {
    line: usize,
    lo: usize,
    hi: usize,
}

fn union_intervals(mut iv: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    iv.sort();
    let mut out: Vec<(usize, usize)> = Vec::new();
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Extracts the interior maximal segments, incidences and partial orders.
pub fn maximal_segments(layout: &Layout) -> Result<SegmentGraph> {
    let root = layout.root;
    if !(root.area() > 0.0) {
        return Err(Error::Degenerate("zero-area root".into()));
    }
    let eps = SNAP_TOLERANCE * root.diagonal();
    let ids: Vec<&String> = layout.cells.keys().collect();
    let rects: Vec<&Rect> = layout.cells.values().collect();

    let mut xs = vec![root.x, root.right()];
    let mut ys = vec![root.y, root.bottom()];
    for r in &rects {
        xs.extend([r.x, r.right()]);
        ys.extend([r.y, r.bottom()]);
    }
    let xa = Axis::new(xs, eps);
    let ya = Axis::new(ys, eps);
    let (x0, x1) = (xa.index(root.x), xa.index(root.right()));
    let (y0, y1) = (ya.index(root.y), ya.index(root.bottom()));

    let grid: Vec<GridCell> = rects
        .iter()
        .map(|r| GridCell {
            l: xa.index(r.x),
            t: ya.index(r.y),
            r: xa.index(r.right()),
            b: ya.index(r.bottom()),
        })
        .collect();

    // Cells whose corner sits at a grid point: (corner, x, y) -> cell.
    // Corner codes: 0 TL, 1 TR, 2 BR, 3 BL of the cell.
    let mut corner: HashMap<(u8, usize, usize), usize> = HashMap::new();
    for (i, g) in grid.iter().enumerate() {
        if g.l == g.r || g.t == g.b {
            continue;
        }
        corner.insert((0, g.l, g.t), i);
        corner.insert((1, g.r, g.t), i);
        corner.insert((2, g.r, g.b), i);
        corner.insert((3, g.l, g.b), i);
    }

    let mut h_iv: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    let mut v_iv: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for g in grid.iter().filter(|g| g.l < g.r && g.t < g.b) {
        for y in [g.t, g.b] {
            if y != y0 && y != y1 {
                h_iv.entry(y).or_default().push((g.l, g.r));
            }
        }
        for x in [g.l, g.r] {
            if x != x0 && x != x1 {
                v_iv.entry(x).or_default().push((g.t, g.b));
            }
        }
    }
    let mut h_pieces: Vec<Piece> = Vec::new();
    for (y, iv) in h_iv {
        for (lo, hi) in union_intervals(iv) {
            h_pieces.push(Piece { line: y, lo, hi });
        }
    }
    let mut v_pieces: Vec<Piece> = Vec::new();
    for (x, iv) in v_iv {
        for (lo, hi) in union_intervals(iv) {
            v_pieces.push(Piece { line: x, lo, hi });
        }
    }

    // Crossings: interior point of both a horizontal and a vertical piece.
    let mut h_cuts: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); h_pieces.len()];
    let mut v_cuts: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); v_pieces.len()];
    let mut v_by_line: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, p) in v_pieces.iter().enumerate() {
        v_by_line.entry(p.line).or_default().push(i);
    }
    for (hi_idx, h) in h_pieces.iter().enumerate() {
        for (_, vs) in v_by_line.range(h.lo + 1..h.hi) {
            for &vi in vs {
                let v = &v_pieces[vi];
                if v.lo < h.line && h.line < v.hi {
                    let (x, y) = (v.line, h.line);
                    if horizontal_passes(layout, &ids, &corner, x, y) {
                        v_cuts[vi].insert(y);
                    } else {
                        h_cuts[hi_idx].insert(x);
                    }
                }
            }
        }
    }

    let mut segments: Vec<MaximalSegment> = Vec::new();
    let mut h_lookup: BTreeMap<usize, Vec<(usize, usize, usize)>> = BTreeMap::new();
    let mut v_lookup: BTreeMap<usize, Vec<(usize, usize, usize)>> = BTreeMap::new();
    let mut emit = |pieces: &[Piece], cuts: &[BTreeSet<usize>], o: Orientation, lookup: &mut BTreeMap<usize, Vec<(usize, usize, usize)>>| {
        for (p, cut) in pieces.iter().zip(cuts) {
            let mut bounds = vec![p.lo];
            bounds.extend(cut.iter().copied());
            bounds.push(p.hi);
            for w in bounds.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let (coord, start, end) = match o {
                    Orientation::Horizontal => (ya.values[p.line], xa.values[lo], xa.values[hi]),
                    Orientation::Vertical => (xa.values[p.line], ya.values[lo], ya.values[hi]),
                };
                lookup.entry(p.line).or_default().push((lo, hi, segments.len()));
                segments.push(MaximalSegment {
                    orientation: o,
                    coord,
                    start,
                    end,
                    ends: [Support::Boundary; 2],
                    incident: BTreeSet::new(),
                });
            }
        }
    };
    emit(&h_pieces, &h_cuts, Orientation::Horizontal, &mut h_lookup);
    emit(&v_pieces, &v_cuts, Orientation::Vertical, &mut v_lookup);

    let find = |lookup: &BTreeMap<usize, Vec<(usize, usize, usize)>>, line: usize, lo: usize, hi: usize| -> Option<usize> {
        lookup
            .get(&line)?
            .iter()
            .find(|(a, b, _)| *a <= lo && hi <= *b)
            .map(|(_, _, s)| *s)
    };
    // The segment through grid point `pos` on `line`, for segment ends.
    let through = |lookup: &BTreeMap<usize, Vec<(usize, usize, usize)>>, line: usize, pos: usize| -> Option<usize> {
        lookup
            .get(&line)?
            .iter()
            .find(|(a, b, _)| *a < pos && pos < *b)
            .or_else(|| lookup.get(&line)?.iter().find(|(a, b, _)| *a <= pos && pos <= *b))
            .map(|(_, _, s)| *s)
    };

    for (line, list) in &h_lookup {
        for &(lo, hi, s) in list {
            let a = if lo == x0 { None } else { through(&v_lookup, lo, *line) };
            let b = if hi == x1 { None } else { through(&v_lookup, hi, *line) };
            segments[s].ends = [a.map_or(Support::Boundary, Support::Segment), b.map_or(Support::Boundary, Support::Segment)];
        }
    }
    for (line, list) in &v_lookup {
        for &(lo, hi, s) in list {
            let a = if lo == y0 { None } else { through(&h_lookup, lo, *line) };
            let b = if hi == y1 { None } else { through(&h_lookup, hi, *line) };
            segments[s].ends = [a.map_or(Support::Boundary, Support::Segment), b.map_or(Support::Boundary, Support::Segment)];
        }
    }

    let mut cell_sides = BTreeMap::new();
    let mut order_h = BTreeSet::new();
    let mut order_v = BTreeSet::new();
    for (i, g) in grid.iter().enumerate() {
        if g.l == g.r || g.t == g.b {
            return Err(Error::Degenerate(format!("cell `{}` has zero extent", ids[i])));
        }
        let side = |on_boundary: bool, found: Option<usize>, what: &str| -> Result<Support> {
            if on_boundary {
                Ok(Support::Boundary)
            } else {
                found.map(Support::Segment).ok_or_else(|| {
                    Error::Degenerate(format!("{what} side of `{}` is not on a segment", ids[i]))
                })
            }
        };
        let top = side(g.t == y0, find(&h_lookup, g.t, g.l, g.r), "top")?;
        let bottom = side(g.b == y1, find(&h_lookup, g.b, g.l, g.r), "bottom")?;
        let left = side(g.l == x0, find(&v_lookup, g.l, g.t, g.b), "left")?;
        let right = side(g.r == x1, find(&v_lookup, g.r, g.t, g.b), "right")?;
        let id = ids[i];
        for (sup, s) in [(top, Side::Top), (bottom, Side::Bottom), (left, Side::Left), (right, Side::Right)] {
            if let Support::Segment(k) = sup {
                segments[k].incident.insert((id.clone(), s));
            }
        }
        if let (Support::Segment(t), Support::Segment(b)) = (top, bottom) {
            order_h.insert((b, t));
        }
        if let (Support::Segment(l), Support::Segment(r)) = (left, right) {
            order_v.insert((l, r));
        }
        cell_sides.insert(id.clone(), [top, bottom, left, right]);
    }

    Ok(SegmentGraph {
        segments,
        order_h,
        order_v,
        cell_sides,
    })
}

/// Decides which line survives as one segment at a crossing.
fn horizontal_passes(
    layout: &Layout,
    ids: &[&String],
    corner: &HashMap<(u8, usize, usize), usize>,
    x: usize,
    y: usize,
) -> bool {
    if layout.parents.is_empty() {
        return false;
    }
    // Cells around the crossing, named by their quadrant.
    let tl = corner.get(&(2, x, y));
    let tr = corner.get(&(3, x, y));
    let br = corner.get(&(0, x, y));
    let bl = corner.get(&(1, x, y));
    let (Some(&tl), Some(&tr), Some(&br), Some(&bl)) = (tl, tr, br, bl) else {
        return false;
    };
    let d = |a: usize, b: usize| layout.common_depth(ids[a], ids[b]);
    let across_h = d(tl, bl).max(d(tr, br));
    d(tl, tr) > across_h || d(bl, br) > across_h
}

/// Whether two layouts over the same leaves have isomorphic segment orders.
pub fn order_equivalent(a: &Layout, b: &Layout) -> Result<bool> {
    if a.cell_ids() != b.cell_ids() {
        return Err(Error::LeafMismatch);
    }
    let ga = maximal_segments(a)?;
    let gb = maximal_segments(b)?;
    Ok(graphs_equivalent(&ga, &gb))
}

/// Order-equivalence on already extracted segment graphs.
pub fn graphs_equivalent(ga: &SegmentGraph, gb: &SegmentGraph) -> bool {
    if ga.segments.len() != gb.segments.len() {
        return false;
    }
    // Incidence sets identify segments uniquely, which forces the bijection.
    let key = |s: &MaximalSegment| (s.orientation, s.incident.clone());
    let index_b: HashMap<_, usize> = gb.segments.iter().enumerate().map(|(i, s)| (key(s), i)).collect();
    let mut map = Vec::with_capacity(ga.segments.len());
    for s in &ga.segments {
        match index_b.get(&key(s)) {
            Some(&j) => map.push(j),
            None => return false,
        }
    }
    let remap = |edges: &BTreeSet<(usize, usize)>| -> BTreeSet<(usize, usize)> {
        edges.iter().map(|&(x, y)| (map[x], map[y])).collect()
    };
    remap(&ga.order_h) == gb.order_h && remap(&ga.order_v) == gb.order_v
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn unit(cells: &[(&str, (f64, f64, f64, f64))]) -> Layout {
        Layout::from_cells(
            Rect::new(0.0, 0.0, 1.0, 1.0),
            cells
                .iter()
                .map(|(k, (x, y, w, h))| (k.to_string(), Rect::new(*x, *y, *w, *h)))
                .collect(),
            BTreeMap::new(),
        )
    }

    #[test]
    fn single_vertical_cut() {
        let l = unit(&[("a", (0.0, 0.0, 0.4, 1.0)), ("b", (0.4, 0.0, 0.6, 1.0))]);
        let g = maximal_segments(&l).unwrap();
        assert_eq!(g.segments.len(), 1);
        assert_eq!(g.segments[0].orientation, Orientation::Vertical);
        assert!(g.order_h.is_empty() && g.order_v.is_empty());
        assert_eq!(g.segments[0].ends, [Support::Boundary, Support::Boundary]);
    }

    #[test]
    fn t_junction() {
        let l = unit(&[
            ("a", (0.0, 0.0, 0.5, 1.0)),
            ("b", (0.5, 0.0, 0.5, 0.3)),
            ("c", (0.5, 0.3, 0.5, 0.7)),
        ]);
        let g = maximal_segments(&l).unwrap();
        assert_eq!(g.segments.len(), 2);
        let h = g.segments.iter().position(|s| s.orientation == Orientation::Horizontal).unwrap();
        let v = 1 - h;
        let inc: Vec<_> = g.segments[h].incident.iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(inc, vec!["b", "c"]);
        assert_eq!(g.segments[h].ends, [Support::Segment(v), Support::Boundary]);
    }

    #[test]
    fn slice_and_dice_grid() {
        let l = unit(&[
            ("a", (0.0, 0.0, 0.5, 0.4)),
            ("b", (0.0, 0.4, 0.5, 0.6)),
            ("c", (0.5, 0.0, 0.5, 0.7)),
            ("d", (0.5, 0.7, 0.5, 0.3)),
        ]);
        let g = maximal_segments(&l).unwrap();
        let nv = g.segments.iter().filter(|s| s.orientation == Orientation::Vertical).count();
        assert_eq!((g.segments.len(), nv), (3, 1));
        assert!(g.order_h.is_empty());
        assert!(g.order_v.is_empty());
    }

    #[test]
    fn aligned_cross_splits_horizontal_in_flat_layout() {
        let l = unit(&[
            ("a", (0.0, 0.0, 0.5, 0.5)),
            ("b", (0.0, 0.5, 0.5, 0.5)),
            ("c", (0.5, 0.0, 0.5, 0.5)),
            ("d", (0.5, 0.5, 0.5, 0.5)),
        ]);
        let g = maximal_segments(&l).unwrap();
        let nv = g.segments.iter().filter(|s| s.orientation == Orientation::Vertical).count();
        assert_eq!((g.segments.len(), nv), (3, 1));
    }

    #[test]
    fn aligned_cross_respects_groups() {
        let mut l = unit(&[
            ("a", (0.0, 0.0, 0.5, 0.5)),
            ("b", (0.5, 0.0, 0.5, 0.5)),
            ("c", (0.0, 0.5, 0.5, 0.5)),
            ("d", (0.5, 0.5, 0.5, 0.5)),
        ]);
        for (c, p) in [("a", "top"), ("b", "top"), ("c", "bot"), ("d", "bot"), ("top", "r"), ("bot", "r")] {
            l.parents.insert(c.into(), p.into());
        }
        let g = maximal_segments(&l).unwrap();
        let nh = g.segments.iter().filter(|s| s.orientation == Orientation::Horizontal).count();
        assert_eq!((g.segments.len(), nh), (3, 1));
    }

    #[test]
    fn cell_above_and_below() {
        // Three horizontal bands: the middle one has both sides on interior segments.
        let l = unit(&[
            ("a", (0.0, 0.0, 1.0, 0.2)),
            ("b", (0.0, 0.2, 1.0, 0.5)),
            ("c", (0.0, 0.7, 1.0, 0.3)),
        ]);
        let g = maximal_segments(&l).unwrap();
        assert_eq!(g.segments.len(), 2);
        assert_eq!(g.order_h.len(), 1);
        let (lo, hi) = *g.order_h.iter().next().unwrap();
        assert!(g.segments[lo].coord > g.segments[hi].coord);
    }

    #[test]
    fn equivalence_examples() {
        // A pinwheel and a moved pinwheel are order-equivalent; a guillotine
        // layout of the same leaves is not.
        let pin = |p: f64, q: f64| {
            unit(&[
                ("n", (0.0, 0.0, p, q)),
                ("e", (p, 0.0, 1.0 - p, 1.0 - q)),
                ("s", (1.0 - p, 1.0 - q, p, q)),
                ("w", (0.0, q, 1.0 - p, 1.0 - q)),
                ("c", (1.0 - p, q, 2.0 * p - 1.0, 1.0 - 2.0 * q)),
            ])
        };
        let left = pin(0.6, 0.3);
        let middle = pin(0.7, 0.25);
        assert!(order_equivalent(&left, &left).unwrap());
        assert!(order_equivalent(&left, &middle).unwrap());
        assert!(order_equivalent(&middle, &left).unwrap());
        let right = unit(&[
            ("n", (0.0, 0.0, 0.6, 0.3)),
            ("w", (0.0, 0.3, 0.6, 0.7)),
            ("e", (0.6, 0.0, 0.4, 0.4)),
            ("c", (0.6, 0.4, 0.4, 0.3)),
            ("s", (0.6, 0.7, 0.4, 0.3)),
        ]);
        assert!(!order_equivalent(&left, &right).unwrap());
        let other = unit(&[("n", (0.0, 0.0, 1.0, 1.0))]);
        assert!(order_equivalent(&left, &other).is_err());
    }

    #[test]
    fn degenerate_root() {
        let l = Layout::new(Rect::new(0.0, 0.0, 0.0, 1.0));
        assert!(maximal_segments(&l).is_err());
    }
}
