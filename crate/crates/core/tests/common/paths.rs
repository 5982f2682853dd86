use std::f64::consts::PI;

use pocketforge_core::geometry::Point;
use pocketforge_core::selection::{PlungeStyle, Tool};
use pocketforge_core::toolpath::{Intent, Move, Point3, Toolpath};
use rand::Rng;

pub fn tool(d: f64) -> Tool {
    Tool {
        diameter: d,
        flutes: 2,
        vc_mm_s: 100.0,
        plunge: PlungeStyle::Helical,
    }
}

pub fn line_path(points: &[(f64, f64)], feed: f64) -> Toolpath {
    let moves = points
        .windows(2)
        .map(|w| Move::line(Point3::new(w[0].0, w[0].1, 0.0), Point3::new(w[1].0, w[1].1, 0.0), Intent::Cut))
        .collect();
    Toolpath::new(tool(10.0), feed, moves)
}

/// Mixed lines and arcs with random junction angles, some tangent.
pub fn random_path(rng: &mut impl Rng, feed: f64) -> Toolpath {
    let n = rng.gen_range(3..40);
    let mut p = Point::new(0.0, 0.0);
    let mut heading: f64 = rng.gen_range(-PI..PI);
    let mut moves = Vec::new();
    for _ in 0..n {
        if rng.gen_bool(0.6) {
            heading += rng.gen_range(-PI..PI);
        }
        let dir = Point::from_angle(heading);
        if rng.gen_bool(0.6) {
            let l = rng.gen_range(0.2..25.0);
            let q = p + dir * l;
            moves.push(Move::line(Point3::at(p, 0.0), Point3::at(q, 0.0), Intent::Cut));
            p = q;
        } else {
            let r = rng.gen_range(0.5..30.0);
            let sweep = rng.gen_range(0.1..3.0);
            let ccw = rng.gen_bool(0.5);
            let sgn = if ccw { 1.0 } else { -1.0 };
            let c = p + dir.perp() * (sgn * r);
            let q = c + (p - c).rotate(sgn * sweep);
            moves.push(Move::arc(Point3::at(p, 0.0), Point3::at(q, 0.0), c, ccw, Intent::Cut));
            heading += sgn * sweep;
            p = q;
        }
    }
    Toolpath::new(tool(10.0), feed, moves)
}
