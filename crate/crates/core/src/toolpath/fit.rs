//! Recovers circular arcs from flattened polylines so paths can use G2/G3.

use super::{Intent, Move, Point3};
use crate::geometry::{turn_angle, Point};

/// Arcs flatter than this are left as lines.
const MAX_FIT_RADIUS: f64 = 1000.0;
/// Largest turn at a single vertex inside a fitted arc.
const MAX_VERTEX_TURN: f64 = 0.7;
const MIN_ARC_SEGMENTS: usize = 3;

fn circumcenter(a: Point, b: Point, c: Point) -> Option<Point> {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if d.abs() < 1e-12 {
        return None;
    }
    let (a2, b2, c2) = (a.norm_sq(), b.norm_sq(), c.norm_sq());
    Some(Point::new(
        (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
        (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d,
    ))
}

/// One piece of a fitted polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Line(Point, Point),
    Arc {
        start: Point,
        end: Point,
        center: Point,
        ccw: bool,
    },
}

fn fits(pts: &[Point], i: usize, j: usize, tol: f64) -> Option<(Point, bool)> {
    let m = (i + j) / 2;
    let c = circumcenter(pts[i], pts[m], pts[j])?;
    let r = c.dist(pts[i]);
    if r > MAX_FIT_RADIUS {
        return None;
    }
    let mut total = 0.0;
    let mut sign = 0.0;
    for k in i + 1..j {
        let t = turn_angle(pts[k] - pts[k - 1], pts[k + 1] - pts[k]);
        if t.abs() > MAX_VERTEX_TURN || t.abs() < 1e-9 {
            return None;
        }
        if sign == 0.0 {
            sign = t.signum();
        } else if t.signum() != sign {
            return None;
        }
        total += t.abs();
    }
    if total > 1.9 * std::f64::consts::PI {
        return None;
    }
    for k in i..=j {
        if (c.dist(pts[k]) - r).abs() > tol {
            return None;
        }
        if k < j {
            // Chords must not bulge away from the arc by more than the tolerance.
            let mid = (pts[k] + pts[k + 1]) * 0.5;
            if r - c.dist(mid) > 2.0 * tol {
                return None;
            }
        }
    }
    Some((c, sign > 0.0))
}

/// Splits an open polyline into lines and arcs; arc vertices stay within `tol`.
pub fn fit_arcs(pts: &[Point], tol: f64) -> Vec<Piece> {
    let n = pts.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i + 1 < n {
        let mut best: Option<(usize, Point, bool)> = None;
        let mut j = i + MIN_ARC_SEGMENTS;
        while j < n {
            match fits(pts, i, j, tol) {
                Some((c, ccw)) => best = Some((j, c, ccw)),
                None => break,
            }
            j += 1;
        }
        match best {
            Some((j, c, ccw)) => {
                out.push(Piece::Arc {
                    start: pts[i],
                    end: pts[j],
                    center: c,
                    ccw,
                });
                i = j;
            }
            None => {
                out.push(Piece::Line(pts[i], pts[i + 1]));
                i += 1;
            }
        }
    }
    out
}

/// Moves following a closed ring from `ring[0]` back to it at height `z`.
pub fn ring_moves(ring: &[Point], z: f64, tol: f64, intent: Intent) -> Vec<Move> {
    let mut pts = ring.to_vec();
    pts.push(ring[0]);
    pieces_to_moves(&fit_arcs(&pts, tol), z, intent)
}

pub(crate) fn pieces_to_moves(pieces: &[Piece], z: f64, intent: Intent) -> Vec<Move> {
    pieces
        .iter()
        .map(|p| match *p {
            Piece::Line(a, b) => Move::line(Point3::at(a, z), Point3::at(b, z), intent),
            Piece::Arc { start, end, center, ccw } => {
                Move::arc(Point3::at(start, z), Point3::at(end, z), center, ccw, intent)
            }
        })
        .collect()
}
