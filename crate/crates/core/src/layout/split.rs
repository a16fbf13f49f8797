use super::{bisect, sum};
use crate::geometry::Rect;

/// Ordered split layout: cut the list where the two halves' totals differ
/// least, cut the rectangle across its longer side, recurse.
pub(crate) fn split(rect: &Rect, areas: &[f64]) -> Vec<Rect> {
    let mut out = vec![*rect; areas.len()];
    recurse(rect, areas, 0, &mut out);
    out
}

fn recurse(rect: &Rect, areas: &[f64], offset: usize, out: &mut [Rect]) {
    match areas.len() {
        0 => {}
        1 => out[offset] = *rect,
        n => {
            let total = sum(areas);
            let mut acc = 0.0;
            let mut best = (f64::INFINITY, 1);
            for k in 1..n {
                acc += areas[k - 1];
                let diff = (2.0 * acc - total).abs();
                if diff < best.0 {
                    best = (diff, k);
                }
            }
            let k = best.1;
            let (a, b) = bisect(rect, sum(&areas[..k]), sum(&areas[k..]));
            recurse(&a, &areas[..k], offset, out);
            recurse(&b, &areas[k..], offset + k, out);
        }
    }
}
