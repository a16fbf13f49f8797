use super::{slices, sum};
use crate::geometry::Rect;
use crate::metrics::aspect_ratio;

/// How the pivot item is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// The middle item (PBM).
    Middle,
    /// The largest item, earliest on ties (PBZ).
    Size,
    /// The item that best balances the weight before and after it (PBS).
    Split,
}

pub fn pivot_index(areas: &[f64], rule: PivotRule) -> usize {
    match rule {
        PivotRule::Middle => areas.len() / 2,
        PivotRule::Size => {
            let mut best = 0;
            for (i, a) in areas.iter().enumerate() {
                if *a > areas[best] {
                    best = i;
                }
            }
            best
        }
        PivotRule::Split => {
            let total = sum(areas);
            let mut before = 0.0;
            let mut best = (f64::INFINITY, 0);
            for (i, a) in areas.iter().enumerate() {
                let after = total - before - a;
                let d = (before - after).abs();
                if d < best.0 {
                    best = (d, i);
                }
                before += a;
            }
            best.1
        }
    }
}

/// Ordered pivot layout. Lists of at most three items become proportional
/// strips across the longer side.
pub(crate) fn pivot(rect: &Rect, areas: &[f64], rule: PivotRule) -> Vec<Rect> {
    let mut out = vec![*rect; areas.len()];
    recurse(rect, areas, rule, 0, &mut out);
    out
}

fn recurse(rect: &Rect, areas: &[f64], rule: PivotRule, offset: usize, out: &mut [Rect]) {
    let n = areas.len();
    if n == 0 {
        return;
    }
    if n <= 3 {
        for (k, r) in slices(rect, areas, rect.is_wide()).into_iter().enumerate() {
            out[offset + k] = r;
        }
        return;
    }
    // Work in a wide frame; tall rectangles are transposed in and out.
    let tall = !rect.is_wide();
    let frame = if tall { rect.transposed() } else { *rect };
    let p = pivot_index(areas, rule);
    let total = sum(areas);
    let s1 = sum(&areas[..p]);
    let (r1, rest) = if p == 0 {
        (None, frame)
    } else {
        let r = slices(&frame, &[s1, total - s1], true);
        (Some(r[0]), r[1])
    };
    let tail = &areas[p + 1..];
    let tail_total = total - s1 - areas[p];
    // Choose how many items after the pivot share its column so the pivot is
    // as square as possible.
    let mut best: Option<(f64, usize, Rect, Option<Rect>, Option<Rect>)> = None;
    for q in 0..=tail.len() {
        let s2 = sum(&tail[..q]);
        let s3 = tail_total - s2;
        let (column, r3) = if q == tail.len() {
            (rest, None)
        } else {
            let r = slices(&rest, &[areas[p] + s2, s3], true);
            (r[0], Some(r[1]))
        };
        let (rp, r2) = if q == 0 {
            (column, None)
        } else {
            let r = slices(&column, &[areas[p], s2], false);
            (r[0], Some(r[1]))
        };
        let score = aspect_ratio(&rp).unwrap_or(0.0);
        if best.as_ref().map_or(true, |b| score > b.0) {
            best = Some((score, q, rp, r2, r3));
        }
    }
    let (_, q, rp, r2, r3) = best.expect("at least one split");
    let back = |r: Rect| if tall { r.transposed() } else { r };
    out[offset + p] = back(rp);
    if let Some(r1) = r1 {
        recurse(&back(r1), &areas[..p], rule, offset, out);
    }
    if let Some(r2) = r2 {
        recurse(&back(r2), &tail[..q], rule, offset + p + 1, out);
    }
    if let Some(r3) = r3 {
        recurse(&back(r3), &tail[q..], rule, offset + p + 1 + q, out);
    }
}
