//! Ways of getting the tool down to depth at the start of a path.

use std::f64::consts::PI;

use super::{Intent, Move, Point3};
use crate::error::{Error, Result};
use crate::geometry::{dist_to_segment, polygon_inscribed, Point, Region, DEFAULT_TOL};
use crate::pocket::Closure;
use crate::selection::{PlungeStyle, Tool};

/// Helix descent angle for helical plunging.
const HELIX_ANGLE_DEG: f64 = 3.0;
/// Descent angle for linear ramping.
const RAMP_ANGLE_DEG: f64 = 2.0;
/// A helix narrower than this fraction of the tool diameter is refused.
const MIN_HELIX_FRACTION: f64 = 0.05;

fn deepest_point(zone: &Region, near: Point) -> Result<(Point, f64)> {
    if zone.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let part = zone
        .parts
        .iter()
        .find(|p| p.contains(near))
        .or_else(|| {
            zone.parts
                .iter()
                .min_by(|a, b| a.boundary_distance(near).total_cmp(&b.boundary_distance(near)))
        })
        .expect("non-empty zone");
    let c = polygon_inscribed(part, DEFAULT_TOL);
    Ok((c.center, c.radius))
}

fn plunge(zone: &Region, tool: &Tool, first: Point, depth: f64) -> Result<Vec<Move>> {
    let (c, mir) = deepest_point(zone, first)?;
    let r = tool.radius();
    let mut moves = Vec::new();
    let end = match tool.plunge {
        PlungeStyle::Axial => {
            moves.push(Move::line(Point3::at(c, 0.0), Point3::at(c, -depth), Intent::Entry));
            c
        }
        style => {
            let rho = (mir - r).min(r);
            let required = MIN_HELIX_FRACTION * tool.diameter;
            if rho < required {
                return Err(Error::NoPlungeRoom {
                    available: rho.max(0.0),
                    required,
                });
            }
            if style == PlungeStyle::Helical {
                let pitch = 2.0 * PI * rho * HELIX_ANGLE_DEG.to_radians().tan();
                let turns = (depth / pitch).ceil().max(1.0) as usize;
                let h = c + Point::new(rho, 0.0);
                for k in 0..turns {
                    let z0 = -depth * k as f64 / turns as f64;
                    let z1 = -depth * (k + 1) as f64 / turns as f64;
                    moves.push(Move::arc(Point3::at(h, z0), Point3::at(h, z1), c, true, Intent::Entry));
                }
                // Flat turn to clean up the helix floor.
                moves.push(Move::arc(Point3::at(h, -depth), Point3::at(h, -depth), c, true, Intent::Entry));
                h
            } else {
                let a = c - Point::new(rho, 0.0);
                let b = c + Point::new(rho, 0.0);
                let drop = 2.0 * rho * RAMP_ANGLE_DEG.to_radians().tan();
                let legs = (depth / drop).ceil().max(1.0) as usize;
                for k in 0..legs {
                    let (p, q) = if k % 2 == 0 { (a, b) } else { (b, a) };
                    let z0 = -depth * k as f64 / legs as f64;
                    let z1 = -depth * (k + 1) as f64 / legs as f64;
                    moves.push(Move::line(Point3::at(p, z0), Point3::at(q, z1), Intent::Entry));
                }
                if legs % 2 == 0 {
                    a
                } else {
                    b
                }
            }
        }
    };
    if end.dist(first) > 1e-9 {
        moves.push(Move::line(Point3::at(end, -depth), Point3::at(first, -depth), Intent::Link));
    }
    Ok(moves)
}

/// Clearance between the tool and an open edge when descending beside it.
const FLANK_CLEARANCE: f64 = 1.0;

fn flank(tool: &Tool, first: &Move, open_edges: &[(Point, Point)], zone: &Region, depth: f64) -> Vec<Move> {
    let p = first.start.xy();
    let t = first.tangent_xy(false);
    let rho = tool.radius();
    // Come in from the side facing the open edges (or outside the zone).
    let score = |m: Point| {
        let q = p + m * (2.0 * rho);
        let edge = open_edges
            .iter()
            .map(|&(a, b)| dist_to_segment(q, a, b))
            .fold(f64::INFINITY, f64::min);
        if edge.is_finite() {
            edge
        } else if zone.contains(q) {
            1.0
        } else {
            0.0
        }
    };
    let m = if score(t.perp()) <= score(-t.perp()) { t.perp() } else { -t.perp() };
    let c = p + m * rho;
    let s = c - t * rho;
    let mut s0 = s + m * (2.0 * rho);
    // The descent must clear the nearest open edge by the tool radius.
    if let Some(&(a, b)) = open_edges
        .iter()
        .min_by(|x, y| dist_to_segment(s, x.0, x.1).total_cmp(&dist_to_segment(s, y.0, y.1)))
    {
        let mut n = (b - a).perp().normalized();
        if n.dot((a + b) * 0.5 - zone.bbox().center()) < 0.0 {
            n = -n;
        }
        if n.dot(s0 - a) < rho + FLANK_CLEARANCE {
            s0 = s + n * (rho + FLANK_CLEARANCE - n.dot(s - a));
        }
    }
    vec![
        Move::line(Point3::at(s0, 0.0), Point3::at(s0, -depth), Intent::Entry),
        Move::line(Point3::at(s0, -depth), Point3::at(s, -depth), Intent::Entry),
        Move::arc(Point3::at(s, -depth), Point3::at(p, -depth), c, t.cross(m) > 0.0, Intent::Entry),
    ]
}

/// Entry moves ending at the start of `first` (already at depth `depth`).
/// Closed pockets plunge at the deepest inscribed point of the zone; open
/// pockets come in from outside along a quarter circle tangent to the first cut.
pub fn entry_moves(
    zone: &Region,
    closure: Closure,
    open_edges: &[(Point, Point)],
    tool: &Tool,
    spiral_plunge: bool,
    first: &Move,
    depth: f64,
) -> Result<Vec<Move>> {
    if closure == Closure::Closed || spiral_plunge {
        plunge(zone, tool, first.start.xy(), depth)
    } else {
        Ok(flank(tool, first, open_edges, zone, depth))
    }
}
