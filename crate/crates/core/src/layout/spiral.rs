use super::slices;
use super::strip::admit;
use crate::geometry::Rect;

/// Ordered spiral layout: strips go along the top (east), right (south),
/// bottom (west) and left (north) of the remaining rectangle in turn, with
/// the same admission rule as the strip layout.
pub(crate) fn spiral(rect: &Rect, areas: &[f64]) -> Vec<Rect> {
    let mut out = Vec::with_capacity(areas.len());
    let mut remaining = *rect;
    let mut i = 0;
    let mut dir = 0usize;
    while i < areas.len() {
        let horizontal = dir % 2 == 0;
        let length = if horizontal { remaining.w } else { remaining.h };
        let k = admit(&areas[i..], length);
        let strip_area: f64 = areas[i..i + k].iter().sum();
        let rest: f64 = areas[i + k..].iter().sum();
        let (band, rem) = if i + k == areas.len() {
            (remaining, remaining)
        } else {
            match dir % 4 {
                0 => {
                    let r = slices(&remaining, &[strip_area, rest], false);
                    (r[0], r[1])
                }
                1 => {
                    let r = slices(&remaining, &[rest, strip_area], true);
                    (r[1], r[0])
                }
                2 => {
                    let r = slices(&remaining, &[rest, strip_area], false);
                    (r[1], r[0])
                }
                _ => {
                    let r = slices(&remaining, &[strip_area, rest], true);
                    (r[0], r[1])
                }
            }
        };
        let mut cells = slices(&band, &areas[i..i + k], horizontal);
        // West strips run right to left, north strips bottom to top.
        if dir % 4 >= 2 {
            let reversed: Vec<f64> = areas[i..i + k].iter().rev().copied().collect();
            cells = slices(&band, &reversed, horizontal);
            cells.reverse();
        }
        out.extend(cells);
        remaining = rem;
        i += k;
        dir += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_item() {
        let rect = Rect::new(0.0, 0.0, 2.0, 1.0);
        assert_eq!(spiral(&rect, &[2.0]), vec![rect]);
    }

    #[test]
    fn first_strip_runs_along_the_top() {
        let r = spiral(&Rect::new(0.0, 0.0, 1.0, 1.0), &[0.25; 4]);
        assert_eq!((r[0].y, r[1].y), (0.0, 0.0));
        assert!((r[0].h - 0.5).abs() < 1e-15);
        // The second strip is the right column of what remains.
        assert!(r[2].x >= r[3].x || r[2].y <= r[3].y);
    }

    #[test]
    fn strips_turn_clockwise() {
        let areas = vec![1.0; 16];
        let r = spiral(&Rect::new(0.0, 0.0, 4.0, 4.0), &areas);
        // Successive strips: top, right, bottom, left of the shrinking rectangle.
        let top = r[0];
        assert_eq!(top.y, 0.0);
        let last_top = r.iter().rposition(|c| c.y == 0.0).unwrap();
        let right = r[last_top + 1];
        assert!((right.right() - 4.0).abs() < 1e-12);
        assert!(right.y > 0.0);
    }
}
