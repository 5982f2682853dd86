use super::boolean::fill_positive;
use super::point::{turn_angle, Point};
use super::polygon::{dedup_ring, signed_area, Region};
use super::SNAP_EPS;
use crate::error::{Error, Result};

/// Angular step that keeps chords of a radius-`r` arc within `tol` of the arc.
pub fn arc_step(r: f64, tol: f64) -> f64 {
    if tol >= r {
        std::f64::consts::FRAC_PI_2
    } else {
        (2.0 * (1.0 - tol / r).acos()).min(std::f64::consts::FRAC_PI_2)
    }
}

fn check_input(region: &Region, tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    for (i, part) in region.parts.iter().enumerate() {
        for (j, ring) in part.loops().enumerate() {
            if ring.iter().any(|p| !p.is_finite()) {
                return Err(Error::InvalidLoop {
                    part: i,
                    ring: j,
                    reason: "non-finite coordinate".into(),
                });
            }
            let r = dedup_ring(ring);
            if r.len() < 3 || signed_area(&r).abs() <= SNAP_EPS * SNAP_EPS {
                return Err(Error::InvalidLoop {
                    part: i,
                    ring: j,
                    reason: "degenerate loop".into(),
                });
            }
        }
    }
    Ok(())
}

/// Raw offset curve of one loop that has the region on its left.
///
/// Segments are shifted along their outward normal. Where consecutive shifted
/// segments separate, they are joined by an arc around the vertex; where they
/// overlap, they are joined through the vertex itself so that the winding
/// number of the spurious loops stays non-positive.
fn raw_offset_loop(ring: &[Point], delta: f64, tol: f64) -> Vec<Point> {
    let n = ring.len();
    let mut out = Vec::with_capacity(n * 4);
    let normal = |a: Point, b: Point| {
        let d = (b - a).normalized();
        Point::new(d.y, -d.x)
    };
    let r = delta.abs();
    // Outward joins use inscribed chords and inward joins use tangent
    // polygons, so both approximations stay inside the exact offset.
    let step = if delta > 0.0 {
        arc_step(r, tol)
    } else {
        (2.0 * (r / (r + tol)).acos()).min(std::f64::consts::FRAC_PI_2)
    };
    for i in 0..n {
        let prev = ring[(i + n - 1) % n];
        let v = ring[i];
        let next = ring[(i + 1) % n];
        let n_in = normal(prev, v);
        let n_out = normal(v, next);
        let phi = turn_angle(v - prev, next - v);
        let p1 = v + n_in * delta;
        let p2 = v + n_out * delta;
        out.push(p1);
        if phi.abs() < 1e-12 {
            continue;
        }
        if (phi > 0.0) == (delta > 0.0) {
            let k = (phi.abs() / step).ceil().max(1.0) as usize;
            let h = phi / k as f64;
            if delta > 0.0 {
                for s in 1..k {
                    out.push(v + (n_in * delta).rotate(h * s as f64));
                }
            } else {
                let scale = 1.0 / (h / 2.0).cos();
                for s in 0..k {
                    out.push(v + (n_in * (delta * scale)).rotate(h * (s as f64 + 0.5)));
                }
            }
        } else {
            out.push(v);
        }
        out.push(p2);
    }
    out
}

/// Offsets every boundary loop by `delta` (positive grows the region) and
/// resolves the result with the positive winding rule. Rounded joins are
/// flattened with chords that stay within `tol` of the exact arc.
pub fn offset_region(region: &Region, delta: f64, tol: f64) -> Result<Region> {
    check_input(region, tol)?;
    if !delta.is_finite() {
        return Err(Error::invalid("offset distance must be finite"));
    }
    if region.is_empty() {
        return Ok(Region::empty());
    }
    let loops: Vec<Vec<Point>> = region
        .loops()
        .map(|r| {
            let r = dedup_ring(r);
            if delta == 0.0 {
                r
            } else {
                raw_offset_loop(&r, delta, tol)
            }
        })
        .collect();
    Ok(fill_positive(&loops))
}

/// Morphological opening by a disk of diameter `d`: the part of the region a
/// cutter of that diameter can sweep without leaving it.
pub fn opening(region: &Region, d: f64, tol: f64) -> Result<Region> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::invalid(format!("opening diameter must be >= 0, got {d}")));
    }
    if d == 0.0 {
        return offset_region(region, 0.0, tol);
    }
    let eroded = offset_region(region, -d / 2.0, tol)?;
    offset_region(&eroded, d / 2.0, tol)
}
