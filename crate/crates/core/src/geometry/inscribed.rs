use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::point::Point;
use super::polygon::{PolygonWithHoles, Region};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InscribedCircle {
    pub center: Point,
    pub radius: f64,
}

struct Cell {
    c: Point,
    h: f64,
    d: f64,
    max: f64,
}

impl Cell {
    fn new(c: Point, h: f64, poly: &PolygonWithHoles) -> Self {
        let d = signed_dist(c, poly);
        Cell {
            c,
            h,
            d,
            max: d + h * std::f64::consts::SQRT_2,
        }
    }
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.max == o.max
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        self.max.total_cmp(&o.max)
    }
}

fn signed_dist(p: Point, poly: &PolygonWithHoles) -> f64 {
    let d = poly.boundary_distance(p);
    if poly.contains(p) {
        d
    } else {
        -d
    }
}

fn area_centroid(ring: &[Point]) -> Option<Point> {
    let n = ring.len();
    let (mut a, mut c) = (0.0, Point::default());
    for i in 0..n {
        let (p, q) = (ring[i], ring[(i + 1) % n]);
        let w = p.cross(q);
        a += w;
        c += (p + q) * w;
    }
    (a.abs() > 0.0).then(|| c / (3.0 * a))
}

/// Largest inscribed circle of one polygon, found by a best-first quadtree
/// search over the signed boundary distance; the radius is within `tol` of
/// the optimum.
pub fn polygon_inscribed(poly: &PolygonWithHoles, tol: f64) -> InscribedCircle {
    let bb = poly.bbox();
    let size = bb.width().min(bb.height());
    if !(size > 0.0) {
        return InscribedCircle {
            center: bb.center(),
            radius: 0.0,
        };
    }
    let h = size / 2.0;
    let mut heap = BinaryHeap::new();
    let mut x = bb.min.x;
    while x < bb.max.x {
        let mut y = bb.min.y;
        while y < bb.max.y {
            heap.push(Cell::new(Point::new(x + h, y + h), h, poly));
            y += size;
        }
        x += size;
    }
    let mut best = Cell::new(bb.center(), 0.0, poly);
    if let Some(c) = area_centroid(&poly.outer) {
        let cell = Cell::new(c, 0.0, poly);
        if cell.d > best.d {
            best = cell;
        }
    }
    while let Some(cell) = heap.pop() {
        if cell.d > best.d {
            best = Cell { h: 0.0, ..cell };
        }
        if cell.max - best.d <= tol {
            continue;
        }
        let h = cell.h / 2.0;
        for (dx, dy) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
            heap.push(Cell::new(cell.c + Point::new(dx * h, dy * h), h, poly));
        }
    }
    InscribedCircle {
        center: best.c,
        radius: best.d.max(0.0),
    }
}

/// Largest disk contained in the region (over all components).
pub fn max_inscribed_circle(region: &Region, tol: f64) -> Result<InscribedCircle> {
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    Ok(region
        .parts
        .iter()
        .map(|p| polygon_inscribed(p, tol))
        .max_by(|a, b| a.radius.total_cmp(&b.radius))
        .expect("non-empty region"))
}

pub fn max_inscribed_radius(region: &Region, tol: f64) -> Result<f64> {
    max_inscribed_circle(region, tol).map(|c| c.radius)
}
