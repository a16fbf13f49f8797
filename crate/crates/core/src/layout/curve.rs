//! Hilbert and Moore layouts.
//!
//! The ordered list is split into four consecutive runs of near-equal weight
//! that are placed in the quadrants in the order the curve visits them.
//! Orientations are elements of the square's symmetry group, stored as 2x2
//! integer matrices acting on centered quadrant coordinates `(±1, ±1)` with
//! y pointing up.

use super::slices;
use crate::geometry::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    Hilbert,
    Moore,
}

type Mat = [[i8; 2]; 2];

const IDENTITY: Mat = [[1, 0], [0, 1]];
const TRANSPOSE: Mat = [[0, 1], [1, 0]];
const ANTI_TRANSPOSE: Mat = [[0, -1], [-1, 0]];
const ROT_CCW: Mat = [[0, -1], [1, 0]];
const ROT_CW: Mat = [[0, 1], [-1, 0]];

/// First-order motif: bottom-left, top-left, top-right, bottom-right.
const BASE: [(i8, i8); 4] = [(-1, -1), (-1, 1), (1, 1), (1, -1)];
/// Sub-curve orientations relative to the parent, per visited quadrant.
const HILBERT_SUB: [Mat; 4] = [TRANSPOSE, IDENTITY, IDENTITY, ANTI_TRANSPOSE];
/// The Moore curve is a loop of four Hilbert curves.
const MOORE_SUB: [Mat; 4] = [ROT_CCW, ROT_CCW, ROT_CW, ROT_CW];

fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut m = [[0i8; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

fn apply(m: &Mat, (u, v): (i8, i8)) -> (i8, i8) {
    (m[0][0] * u + m[0][1] * v, m[1][0] * u + m[1][1] * v)
}

/// Quadrant (`right`, `top`) visited k-th by a curve in orientation `m`.
pub(crate) fn visit(m: &Mat, k: usize) -> (bool, bool) {
    let (u, v) = apply(m, BASE[k]);
    (u > 0, v > 0)
}

pub(crate) fn space_filling(rect: &Rect, areas: &[f64], curve: Curve) -> Vec<Rect> {
    let mut out = vec![*rect; areas.len()];
    let sub = match curve {
        Curve::Hilbert => &HILBERT_SUB,
        Curve::Moore => &MOORE_SUB,
    };
    recurse(rect, areas, 0, &IDENTITY, sub, &mut out);
    out
}

/// Boundaries of four consecutive runs with totals close to quarters.
fn quarter_bounds(areas: &[f64]) -> [usize; 5] {
    let n = areas.len();
    let total: f64 = areas.iter().sum();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + areas[i];
    }
    let mut b = [0, 0, 0, 0, n];
    let need = usize::from(n >= 4);
    for k in 1..4 {
        let lo = b[k - 1] + need;
        let hi = n - need * (4 - k);
        let target = total * k as f64 / 4.0;
        let mut best = lo;
        for j in lo..=hi {
            if (prefix[j] - target).abs() < (prefix[best] - target).abs() {
                best = j;
            }
        }
        b[k] = best;
    }
    if b.windows(2).any(|w| w[1] - w[0] == n) {
        // Everything landed in one run; halve instead.
        b = [0, n / 2, n / 2, n, n];
    }
    b
}

fn recurse(rect: &Rect, areas: &[f64], offset: usize, orient: &Mat, sub: &[Mat; 4], out: &mut [Rect]) {
    match areas.len() {
        0 => return,
        1 => {
            out[offset] = *rect;
            return;
        }
        _ => {}
    }
    let b = quarter_bounds(areas);
    let runs: Vec<(usize, usize, f64, (bool, bool))> = (0..4)
        .map(|k| (b[k], b[k + 1], areas[b[k]..b[k + 1]].iter().sum(), visit(orient, k)))
        .collect();
    let sum_where = |f: &dyn Fn(bool, bool) -> bool| -> f64 {
        runs.iter().filter(|r| f(r.3 .0, r.3 .1)).map(|r| r.2).sum()
    };
    let mut quads = [*rect; 4];
    // Index quadrants by (right, top) as 2 * right + top.
    let qi = |right: bool, top: bool| 2 * usize::from(right) + usize::from(top);
    if rect.is_wide() {
        let left = sum_where(&|r, _| !r);
        let right = sum_where(&|r, _| r);
        let cols = split_two(rect, left, right, true);
        for (ri, col) in [(false, cols.0), (true, cols.1)] {
            let top = sum_where(&|r, t| r == ri && t);
            let bottom = sum_where(&|r, t| r == ri && !t);
            let (t, bo) = split_two(&col, top, bottom, false);
            quads[qi(ri, true)] = t;
            quads[qi(ri, false)] = bo;
        }
    } else {
        let top = sum_where(&|_, t| t);
        let bottom = sum_where(&|_, t| !t);
        let rows = split_two(rect, top, bottom, false);
        for (ti, row) in [(true, rows.0), (false, rows.1)] {
            let left = sum_where(&|r, t| t == ti && !r);
            let right = sum_where(&|r, t| t == ti && r);
            let (l, r) = split_two(&row, left, right, true);
            quads[qi(false, ti)] = l;
            quads[qi(true, ti)] = r;
        }
    }
    for (k, (lo, hi, _, (right, top))) in runs.into_iter().enumerate() {
        let child = mul(orient, &sub[k]);
        let next_sub = &HILBERT_SUB;
        recurse(&quads[qi(right, top)], &areas[lo..hi], offset + lo, &child, next_sub, out);
    }
}

/// Two proportional parts; an empty part leaves the other the whole rect.
fn split_two(rect: &Rect, a: f64, b: f64, vertical_cuts: bool) -> (Rect, Rect) {
    if a <= 0.0 {
        return (*rect, *rect);
    }
    if b <= 0.0 {
        return (*rect, *rect);
    }
    let r = slices(rect, &[a, b], vertical_cuts);
    (r[0], r[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Rect {
        Rect::new(0.0, 0.0, 1.0, 1.0)
    }

    #[test]
    fn hilbert_visits_bl_tl_tr_br() {
        let r = space_filling(&unit(), &[0.25; 4], Curve::Hilbert);
        // Screen coordinates: top has y = 0.
        assert_eq!((r[0].x, r[0].y), (0.0, 0.5));
        assert_eq!((r[1].x, r[1].y), (0.0, 0.0));
        assert_eq!((r[2].x, r[2].y), (0.5, 0.0));
        assert_eq!((r[3].x, r[3].y), (0.5, 0.5));
    }

    #[test]
    fn moore_first_and_last_adjacent() {
        let r = space_filling(&unit(), &[0.25; 4], Curve::Moore);
        assert!((r[0].right() - r[3].x).abs() < 1e-15);
        assert_eq!(r[0].y, r[3].y);
    }

    #[test]
    fn sixteen_cells_follow_a_connected_path() {
        // Equal weights give a 4x4 grid; consecutive cells must share an edge.
        for curve in [Curve::Hilbert, Curve::Moore] {
            let r = space_filling(&unit(), &[1.0 / 16.0; 16], curve);
            for w in r.windows(2) {
                let (a, b) = (w[0].center(), w[1].center());
                let d = (a.0 - b.0).abs() + (a.1 - b.1).abs();
                assert!((d - 0.25).abs() < 1e-12, "{curve:?}: jump {d}");
            }
            if curve == Curve::Moore {
                let (a, b) = (r[0].center(), r[15].center());
                assert!(((a.0 - b.0).abs() + (a.1 - b.1).abs() - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn small_lists() {
        assert_eq!(space_filling(&unit(), &[1.0], Curve::Hilbert), vec![unit()]);
        let r = space_filling(&unit(), &[0.5, 0.5], Curve::Hilbert);
        assert!((r[0].area() - 0.5).abs() < 1e-15 && (r[1].area() - 0.5).abs() < 1e-15);
        assert_ne!(r[0], r[1]);
    }
}
