use super::slices;
use crate::geometry::Rect;

/// Vertical cuts (side-by-side slices) at even depth, horizontal at odd.
pub(crate) fn slice_and_dice(rect: &Rect, areas: &[f64], depth: usize) -> Vec<Rect> {
    slices(rect, areas, depth % 2 == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_depth_slices_vertically() {
        let unit = Rect::new(0.0, 0.0, 1.0, 1.0);
        let r = slice_and_dice(&unit, &[1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0], 0);
        let widths: Vec<f64> = r.iter().map(|c| c.w).collect();
        for (w, e) in widths.iter().zip([1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0]) {
            assert!((w - e).abs() < 1e-15);
        }
        assert!(r.iter().all(|c| c.h == 1.0 && c.y == 0.0));
        assert!(r[0].x < r[1].x && r[1].x < r[2].x);
    }

    #[test]
    fn odd_depth_slices_horizontally() {
        let unit = Rect::new(0.0, 0.0, 1.0, 1.0);
        let r = slice_and_dice(&unit, &[1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0], 1);
        for (c, e) in r.iter().zip([1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0]) {
            assert!((c.h - e).abs() < 1e-15);
            assert_eq!(c.w, 1.0);
        }
        assert_eq!(slice_and_dice(&unit, &[1.0], 3), vec![unit]);
    }
}
