use crate::geometry::Rect;

/// Worst aspect ratio (as max side / min side) of a row of total `sum`
/// laid along a side of length `side`.
fn worst(sum: f64, max: f64, min: f64, side: f64) -> f64 {
    let s2 = side * side;
    let sum2 = sum * sum;
    (s2 * max / sum2).max(sum2 / (s2 * min))
}

/// Squarified treemap: sort by decreasing area, then greedily fill rows
/// along the shorter side of the remaining rectangle while the row's worst
/// aspect ratio does not get worse.
pub(crate) fn squarified(rect: &Rect, areas: &[f64]) -> Vec<Rect> {
    let mut order: Vec<usize> = (0..areas.len()).collect();
    // Stable: ties keep input order.
    order.sort_by(|&a, &b| areas[b].total_cmp(&areas[a]));
    let mut out = vec![*rect; areas.len()];
    let mut remaining = *rect;
    let mut start = 0;
    while start < order.len() {
        let side = remaining.w.min(remaining.h);
        let first = areas[order[start]];
        let (mut sum, mut max, mut min) = (first, first, first);
        let mut end = start + 1;
        while end < order.len() {
            let a = areas[order[end]];
            let (s2, mx2, mn2) = (sum + a, max.max(a), min.min(a));
            if worst(s2, mx2, mn2, side) <= worst(sum, max, min, side) {
                sum = s2;
                max = mx2;
                min = mn2;
                end += 1;
            } else {
                break;
            }
        }
        let row_areas: Vec<f64> = order[start..end].iter().map(|&i| areas[i]).collect();
        let rest: f64 = order[end..].iter().map(|&i| areas[i]).sum();
        let (row, rem) = if end == order.len() {
            (remaining, remaining)
        } else if remaining.is_wide() {
            // Column on the left spanning the full height.
            let r = super::slices(&remaining, &[sum, rest], true);
            (r[0], r[1])
        } else {
            let r = super::slices(&remaining, &[sum, rest], false);
            (r[0], r[1])
        };
        // Items run along the row's long side.
        let cells = super::slices(&row, &row_areas, !remaining.is_wide());
        for (k, &i) in order[start..end].iter().enumerate() {
            out[i] = cells[k];
        }
        remaining = rem;
        start = end;
    }
    out
}
