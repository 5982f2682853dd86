use serde::{Deserialize, Serialize};

use super::point::{dist_to_segment, segments_intersect, Point};
use super::SNAP_EPS;
use crate::error::{Error, Result};

/// A closed loop of vertices; the closing edge is implicit.
pub type Ring = Vec<Point>;

pub fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    let mut a = 0.0;
    for i in 0..n {
        a += ring[i].cross(ring[(i + 1) % n]);
    }
    0.5 * a
}

pub fn ring_length(ring: &[Point]) -> f64 {
    let n = ring.len();
    (0..n).map(|i| ring[i].dist(ring[(i + 1) % n])).sum()
}

/// Crossing-number test; points on the boundary may go either way.
pub fn point_in_ring(ring: &[Point], p: Point) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn ring_edges(ring: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    let n = ring.len();
    (0..n).map(move |i| (ring[i], ring[(i + 1) % n]))
}

/// Drops consecutive vertices closer than the snap tolerance, including across the seam.
pub fn dedup_ring(ring: &[Point]) -> Ring {
    let mut out: Ring = Vec::with_capacity(ring.len());
    for &p in ring {
        if out.last().is_none_or(|q| q.dist(p) > SNAP_EPS) {
            out.push(p);
        }
    }
    while out.len() > 1 && out[0].dist(out[out.len() - 1]) <= SNAP_EPS {
        out.pop();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn empty() -> Self {
        BBox {
            min: Point::new(f64::INFINITY, f64::INFINITY),
            max: Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn include(&mut self, p: Point) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point {
        (self.min + self.max) * 0.5
    }
}

/// Outer loop counter-clockwise, holes clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonWithHoles {
    pub outer: Ring,
    #[serde(default)]
    pub holes: Vec<Ring>,
}

impl PolygonWithHoles {
    /// Builds a polygon, fixing loop orientation and dropping duplicate vertices.
    pub fn new(outer: Ring, holes: Vec<Ring>) -> Self {
        let mut p = PolygonWithHoles { outer, holes };
        p.normalize();
        p
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self::new(
            vec![
                Point::new(x0, y0),
                Point::new(x1, y0),
                Point::new(x1, y1),
                Point::new(x0, y1),
            ],
            vec![],
        )
    }

    pub fn normalize(&mut self) {
        self.outer = dedup_ring(&self.outer);
        if signed_area(&self.outer) < 0.0 {
            self.outer.reverse();
        }
        for h in &mut self.holes {
            *h = dedup_ring(h);
            if signed_area(h) > 0.0 {
                h.reverse();
            }
        }
    }

    pub fn loops(&self) -> impl Iterator<Item = &Ring> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    pub fn area(&self) -> f64 {
        self.loops().map(|r| signed_area(r)).sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.loops().map(|r| ring_length(r)).sum()
    }

    pub fn contains(&self, p: Point) -> bool {
        point_in_ring(&self.outer, p) && !self.holes.iter().any(|h| point_in_ring(h, p))
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        let mut d = f64::INFINITY;
        for r in self.loops() {
            for (a, b) in ring_edges(r) {
                d = d.min(dist_to_segment(p, a, b));
            }
        }
        d
    }

    pub fn bbox(&self) -> BBox {
        let mut b = BBox::empty();
        for &p in &self.outer {
            b.include(p);
        }
        b
    }

    /// Checks loop sizes, simplicity, hole placement and finiteness.
    pub fn validate(&self, part: usize) -> Result<()> {
        let bad = |ring: usize, reason: &str| Error::InvalidLoop {
            part,
            ring,
            reason: reason.to_string(),
        };
        for (i, r) in self.loops().enumerate() {
            if r.iter().any(|p| !p.is_finite()) {
                return Err(bad(i, "non-finite coordinate"));
            }
            if dedup_ring(r).len() < 3 {
                return Err(bad(i, "fewer than 3 distinct vertices"));
            }
            if signed_area(r).abs() <= SNAP_EPS * SNAP_EPS {
                return Err(bad(i, "zero area"));
            }
            if self_intersects(r) {
                return Err(bad(i, "self-intersecting"));
            }
        }
        for (k, h) in self.holes.iter().enumerate() {
            if !h.iter().all(|&p| point_in_ring(&self.outer, p)) {
                return Err(bad(k + 1, "hole not inside outer loop"));
            }
            if rings_cross(&self.outer, h) {
                return Err(bad(k + 1, "hole touches outer loop"));
            }
            for (m, g) in self.holes.iter().enumerate().skip(k + 1) {
                if rings_cross(h, g) || point_in_ring(h, g[0]) || point_in_ring(g, h[0]) {
                    return Err(bad(m + 1, "overlapping holes"));
                }
            }
        }
        Ok(())
    }
}

fn self_intersects(r: &[Point]) -> bool {
    let n = r.len();
    for i in 0..n {
        let (a, b) = (r[i], r[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (r[j], r[(j + 1) % n]);
            if segments_intersect(a, b, c, d, SNAP_EPS) {
                return true;
            }
        }
    }
    false
}

fn rings_cross(a: &[Point], b: &[Point]) -> bool {
    ring_edges(a).any(|(p, q)| ring_edges(b).any(|(r, s)| segments_intersect(p, q, r, s, SNAP_EPS)))
}

/// A possibly disconnected planar region.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Region {
    pub parts: Vec<PolygonWithHoles>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionMetrics {
    pub area: f64,
    pub perimeter: f64,
    pub component_count: usize,
}

impl Region {
    pub fn empty() -> Self {
        Region { parts: vec![] }
    }

    pub fn from_part(p: PolygonWithHoles) -> Self {
        Region { parts: vec![p] }
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self::from_part(PolygonWithHoles::rect(x0, y0, x1, y1))
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.parts.iter().map(|p| p.area()).sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.parts.iter().map(|p| p.perimeter()).sum()
    }

    pub fn metrics(&self) -> RegionMetrics {
        RegionMetrics {
            area: self.area(),
            perimeter: self.perimeter(),
            component_count: self.parts.len(),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.parts.iter().any(|q| q.contains(p))
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.parts
            .iter()
            .map(|q| q.boundary_distance(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn loops(&self) -> impl Iterator<Item = &Ring> {
        self.parts.iter().flat_map(|p| p.loops())
    }

    pub fn bbox(&self) -> BBox {
        let mut b = BBox::empty();
        for p in &self.parts {
            for &v in &p.outer {
                b.include(v);
            }
        }
        b
    }

    pub fn normalize(&mut self) {
        for p in &mut self.parts {
            p.normalize();
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.parts.iter().enumerate() {
            p.validate(i)?;
        }
        Ok(())
    }

    pub fn map_points(&self, f: impl Fn(Point) -> Point) -> Region {
        Region {
            parts: self
                .parts
                .iter()
                .map(|p| PolygonWithHoles {
                    outer: p.outer.iter().map(|&v| f(v)).collect(),
                    holes: p
                        .holes
                        .iter()
                        .map(|h| h.iter().map(|&v| f(v)).collect())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn rotate(&self, theta: f64) -> Region {
        self.map_points(|p| p.rotate(theta))
    }

    pub fn translate(&self, d: Point) -> Region {
        self.map_points(|p| p + d)
    }

    /// Sorted x-intervals where the horizontal line at `y` lies inside the region.
    pub fn scanline(&self, y: f64) -> Vec<(f64, f64)> {
        let mut xs = Vec::new();
        for r in self.loops() {
            for (a, b) in ring_edges(r) {
                if (a.y > y) != (b.y > y) {
                    xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.chunks_exact(2).map(|c| (c[0], c[1])).collect()
    }
}

pub fn region_metrics(r: &Region) -> RegionMetrics {
    r.metrics()
}

/// Andrew's monotone chain; counter-clockwise, no repeated end point.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 {
            let n = lower.len();
            if (lower[n - 1] - lower[n - 2]).cross(p - lower[n - 2]) <= 0.0 {
                lower.pop();
            } else {
                break;
            }
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 {
            let n = upper.len();
            if (upper[n - 1] - upper[n - 2]).cross(p - upper[n - 2]) <= 0.0 {
                upper.pop();
            } else {
                break;
            }
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Minimum-area enclosing rectangle, found by testing each hull edge direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    /// Unit vector along the first side.
    pub axis: Point,
    pub corners: [Point; 4],
    pub extent_u: f64,
    pub extent_v: f64,
}

impl OrientedRect {
    pub fn area(&self) -> f64 {
        self.extent_u * self.extent_v
    }

    /// Direction angle of the longer side, in [0, pi).
    pub fn long_axis_angle(&self) -> f64 {
        let dir = if self.extent_u >= self.extent_v {
            self.axis
        } else {
            self.axis.perp()
        };
        dir.angle().rem_euclid(std::f64::consts::PI)
    }

    /// Sides as segments, counter-clockwise.
    pub fn sides(&self) -> [(Point, Point); 4] {
        let c = self.corners;
        [(c[0], c[1]), (c[1], c[2]), (c[2], c[3]), (c[3], c[0])]
    }
}

pub fn min_area_rect(points: &[Point]) -> Option<OrientedRect> {
    let hull = convex_hull(points);
    if hull.len() < 3 {
        return None;
    }
    let mut best: Option<OrientedRect> = None;
    for i in 0..hull.len() {
        let axis = (hull[(i + 1) % hull.len()] - hull[i]).normalized();
        let perp = axis.perp();
        let (mut u0, mut u1, mut v0, mut v1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &p in &hull {
            let (u, v) = (p.dot(axis), p.dot(perp));
            u0 = u0.min(u);
            u1 = u1.max(u);
            v0 = v0.min(v);
            v1 = v1.max(v);
        }
        let at = |u: f64, v: f64| axis * u + perp * v;
        let rect = OrientedRect {
            axis,
            corners: [at(u0, v0), at(u1, v0), at(u1, v1), at(u0, v1)],
            extent_u: u1 - u0,
            extent_v: v1 - v0,
        };
        if best.is_none_or(|b| rect.area() < b.area() - 1e-12) {
            best = Some(rect);
        }
    }
    best
}
