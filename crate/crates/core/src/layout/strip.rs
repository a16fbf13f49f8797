use super::slices;
use crate::geometry::Rect;

/// Mean of `max(l/t, t/l)` over items laid in a strip of the given length.
pub(crate) fn mean_aspect(items: &[f64], length: f64) -> f64 {
    let thickness = items.iter().sum::<f64>() / length;
    let total: f64 = items
        .iter()
        .map(|a| {
            let l = a / thickness;
            (l / thickness).max(thickness / l)
        })
        .sum();
    total / items.len() as f64
}

/// Greedy strip admission: number of items from the front of `items` that
/// form the next strip of the given length.
pub(crate) fn admit(items: &[f64], length: f64) -> usize {
    let mut k = 1;
    let mut current = mean_aspect(&items[..1], length);
    while k < items.len() {
        let next = mean_aspect(&items[..k + 1], length);
        if next > current {
            break;
        }
        current = next;
        k += 1;
    }
    k
}

/// Ordered strip layout: full-width strips stacked top to bottom, items
/// left to right inside each strip.
pub(crate) fn strip(rect: &Rect, areas: &[f64]) -> Vec<Rect> {
    let mut strips = Vec::new();
    let mut i = 0;
    while i < areas.len() {
        let k = admit(&areas[i..], rect.w);
        strips.push(i..i + k);
        i += k;
    }
    let strip_areas: Vec<f64> = strips.iter().map(|r| areas[r.clone()].iter().sum()).collect();
    let rows = slices(rect, &strip_areas, false);
    let mut out = Vec::with_capacity(areas.len());
    for (range, row) in strips.into_iter().zip(rows) {
        out.extend(slices(&row, &areas[range], true));
    }
    out
}
