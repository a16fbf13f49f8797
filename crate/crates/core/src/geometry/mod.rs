//! Rectangles, layouts, maximal segments and order-equivalence.

mod dissection;
mod layout;
mod rect;
pub mod segments;

pub use dissection::{Dissection, BOTTOM, LEFT, RIGHT, TOP};
pub use layout::{
    validate_layout, CellJson, Layout, LayoutJson, ValidationReport, AREA_TOLERANCE, COVERAGE_TOLERANCE,
};
pub use rect::Rect;
pub use segments::{
    graphs_equivalent, maximal_segments, order_equivalent, CellSides, MaximalSegment, Orientation, SegmentGraph,
    Side, Support, SNAP_TOLERANCE,
};
