use super::{bisect, sum};
use crate::geometry::Rect;

/// Bounded-aspect-ratio layout in the spirit of Nagamochi and Abe.
///
/// Items are sorted by decreasing area. A dominant item (at least 2/3 of the
/// total) gets a strip of its own across the longer dimension; otherwise the
/// sorted list is split at the first prefix reaching 1/3 of the total, which
/// leaves both parts with at least 1/3, and the rectangle is cut
/// perpendicular to its longer side.
pub(crate) fn approximation(rect: &Rect, areas: &[f64]) -> Vec<Rect> {
    let mut order: Vec<usize> = (0..areas.len()).collect();
    order.sort_by(|&a, &b| areas[b].total_cmp(&areas[a]));
    let mut out = vec![*rect; areas.len()];
    recurse(rect, areas, &order, &mut out);
    out
}

fn recurse(rect: &Rect, areas: &[f64], order: &[usize], out: &mut [Rect]) {
    match order {
        [] => {}
        [only] => out[*only] = *rect,
        _ => {
            let sorted: Vec<f64> = order.iter().map(|&i| areas[i]).collect();
            let total = sum(&sorted);
            let k = if sorted[0] >= 2.0 / 3.0 * total {
                1
            } else {
                let mut acc = 0.0;
                let mut k = 0;
                while k < sorted.len() {
                    acc += sorted[k];
                    k += 1;
                    if acc >= total / 3.0 {
                        break;
                    }
                }
                k.min(sorted.len() - 1)
            };
            let (a, b) = bisect(rect, sum(&sorted[..k]), sum(&sorted[k..]));
            recurse(&a, areas, &order[..k], out);
            recurse(&b, areas, &order[k..], out);
        }
    }
}
