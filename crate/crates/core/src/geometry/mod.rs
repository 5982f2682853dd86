//! Planar regions and the offset-based operations the rest of the crate is built on.

mod boolean;
mod inscribed;
mod offset;
mod point;
mod polygon;

pub use boolean::{difference, fill_positive, intersection, symmetric_difference, union, union_all};
pub use inscribed::{max_inscribed_circle, max_inscribed_radius, polygon_inscribed, InscribedCircle};
pub use offset::{arc_step, offset_region, opening};
pub use point::{closest_on_segment, dist_to_segment, segments_intersect, turn_angle, Point};
pub use polygon::{
    convex_hull, dedup_ring, min_area_rect, point_in_ring, region_metrics, ring_edges, ring_length,
    signed_area, BBox, OrientedRect, PolygonWithHoles, Region, RegionMetrics, Ring,
};

/// Vertices closer than this are merged.
pub const SNAP_EPS: f64 = 1e-6;
/// Default chordal tolerance for flattened arcs, in mm.
pub const DEFAULT_TOL: f64 = 0.01;
