use serde::{Deserialize, Serialize};

/// Axis-aligned rectangle in screen coordinates: `(x, y)` is the top-left
/// corner and `y` grows downward.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Rect { x, y, w, h }
    }

    pub fn from_sides(left: f64, top: f64, right: f64, bottom: f64) -> Self {
        Rect::new(left, top, right - left, bottom - top)
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn diagonal(&self) -> f64 {
        self.w.hypot(self.h)
    }

    pub fn is_wide(&self) -> bool {
        self.w >= self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    /// Corners in TL, TR, BR, BL order.
    pub fn corners(&self) -> [(f64, f64); 4] {
        [
            (self.x, self.y),
            (self.right(), self.y),
            (self.right(), self.bottom()),
            (self.x, self.bottom()),
        ]
    }

    /// Area of the intersection with `other` (zero when disjoint).
    pub fn overlap(&self, other: &Rect) -> f64 {
        let w = self.right().min(other.right()) - self.x.max(other.x);
        let h = self.bottom().min(other.bottom()) - self.y.max(other.y);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }

    /// Largest distance by which `self` sticks out of `outer`.
    pub fn protrusion(&self, outer: &Rect) -> f64 {
        [
            outer.x - self.x,
            outer.y - self.y,
            self.right() - outer.right(),
            self.bottom() - outer.bottom(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Smallest rectangle containing both.
    pub fn union(&self, other: &Rect) -> Rect {
        Rect::from_sides(
            self.x.min(other.x),
            self.y.min(other.y),
            self.right().max(other.right()),
            self.bottom().max(other.bottom()),
        )
    }

    /// Maps `self`, given in the frame of `from`, into the frame `to`.
    pub fn remap(&self, from: &Rect, to: &Rect) -> Rect {
        let sx = to.w / from.w;
        let sy = to.h / from.h;
        Rect::from_sides(
            to.x + (self.x - from.x) * sx,
            to.y + (self.y - from.y) * sy,
            to.x + (self.right() - from.x) * sx,
            to.y + (self.bottom() - from.y) * sy,
        )
    }

    pub fn transposed(&self) -> Rect {
        Rect::new(self.y, self.x, self.h, self.w)
    }
}
