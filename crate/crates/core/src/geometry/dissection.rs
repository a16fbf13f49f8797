use std::collections::BTreeMap;

use super::segments::{maximal_segments, Orientation, SegmentGraph, Support};
use super::{Layout, Rect};
use crate::error::Result;

/// Combinatorial view of a layout: every cell is pinned to the segments its
/// sides rest on, and only segment coordinates are free. Moving a segment
/// moves every cell side on it, so any coordinate assignment that keeps all
/// cells non-degenerate is order-equivalent to the original.
#[derive(Debug, Clone, PartialEq)]
pub struct Dissection {
    pub root: Rect,
    pub orientation: Vec<Orientation>,
    pub coords: Vec<f64>,
    pub ids: Vec<String>,
    /// Top, bottom, left, right.
    pub sides: Vec<[Support; 4]>,
}

pub const TOP: usize = 0;
pub const BOTTOM: usize = 1;
pub const LEFT: usize = 2;
pub const RIGHT: usize = 3;

impl Dissection {
    pub fn from_layout(layout: &Layout) -> Result<Self> {
        let graph = maximal_segments(layout)?;
        Ok(Self::from_graph(layout.root, &graph))
    }

    pub fn from_graph(root: Rect, graph: &SegmentGraph) -> Self {
        let (ids, sides) = graph
            .cell_sides
            .iter()
            .map(|(id, s)| (id.clone(), *s))
            .unzip();
        Dissection {
            root,
            orientation: graph.segments.iter().map(|s| s.orientation).collect(),
            coords: graph.segments.iter().map(|s| s.coord).collect(),
            ids,
            sides,
        }
    }

    pub fn num_cells(&self) -> usize {
        self.ids.len()
    }

    pub fn num_segments(&self) -> usize {
        self.coords.len()
    }

    /// Coordinate of side `k` of cell `i` under the given segment coordinates.
    #[inline]
    pub fn side_coord(&self, coords: &[f64], i: usize, k: usize) -> f64 {
        match self.sides[i][k] {
            Support::Segment(s) => coords[s],
            Support::Boundary => match k {
                TOP => self.root.y,
                BOTTOM => self.root.bottom(),
                LEFT => self.root.x,
                _ => self.root.right(),
            },
        }
    }

    pub fn rect_with(&self, coords: &[f64], i: usize) -> Rect {
        Rect::from_sides(
            self.side_coord(coords, i, LEFT),
            self.side_coord(coords, i, TOP),
            self.side_coord(coords, i, RIGHT),
            self.side_coord(coords, i, BOTTOM),
        )
    }

    pub fn rect(&self, i: usize) -> Rect {
        self.rect_with(&self.coords, i)
    }

    pub fn areas(&self) -> Vec<f64> {
        (0..self.num_cells()).map(|i| self.rect(i).area()).collect()
    }

    pub fn cells(&self) -> BTreeMap<String, Rect> {
        self.ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), self.rect(i)))
            .collect()
    }

    pub fn to_layout(&self, parents: BTreeMap<String, String>) -> Layout {
        Layout::from_cells(self.root, self.cells(), parents)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// For every segment, the cells on its low side (left/above) and its high
    /// side (right/below).
    pub fn incidence(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut inc = vec![(Vec::new(), Vec::new()); self.num_segments()];
        for (i, sides) in self.sides.iter().enumerate() {
            for (k, s) in sides.iter().enumerate() {
                if let Support::Segment(s) = s {
                    // A cell whose bottom/right lies on the segment is on its low side.
                    if k == BOTTOM || k == RIGHT {
                        inc[*s].0.push(i);
                    } else {
                        inc[*s].1.push(i);
                    }
                }
            }
        }
        inc
    }
}
