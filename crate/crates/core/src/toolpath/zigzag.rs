//! Direction-parallel clearing: alternating passes plus a closing contour.

use super::spiral::{chain_rings, join_families};
use super::{Intent, Move, Point3, StrategyParams, Toolpath};
use crate::error::Result;
use crate::geometry::{max_inscribed_circle, min_area_rect, offset_region, Point, Region, DEFAULT_TOL};
use crate::selection::Tool;

/// Scanlines are pulled this far inside the band so edges lying exactly on a
/// scanline still produce an interval.
const EDGE_INSET: f64 = 1e-5;

#[derive(Debug, Clone, Copy)]
struct Pass {
    line: usize,
    x0: f64,
    x1: f64,
    y: f64,
}

fn scan_passes(band: &Region, stepover: f64) -> Vec<Pass> {
    let bb = band.bbox();
    let h = bb.height();
    if h <= 2.0 * EDGE_INSET {
        let y = bb.center().y;
        return band
            .scanline(y)
            .into_iter()
            .map(|(x0, x1)| Pass { line: 0, x0, x1, y })
            .collect();
    }
    let n = (h / stepover + 1e-9).floor() as usize + 1;
    let mut out = Vec::new();
    for k in 0..n {
        let y = if n == 1 {
            bb.center().y
        } else {
            bb.min.y + (k as f64 * stepover).clamp(EDGE_INSET, h - EDGE_INSET)
        };
        for (x0, x1) in band.scanline(y) {
            if x1 - x0 > 1e-9 {
                out.push(Pass { line: k, x0, x1, y });
            }
        }
    }
    out
}

/// Greedy boustrophedon starting from the first or last scanline, whichever
/// is nearer `start`: continue on the next scanline with an overlapping
/// interval, otherwise jump to the nearest unused pass end.
fn chain_passes(passes: &[Pass], start: Point) -> Vec<Move> {
    let first = passes.iter().map(|p| p.line).min().unwrap_or(0);
    let last = passes.iter().map(|p| p.line).max().unwrap_or(0);
    let nearest_on = |line: usize| {
        passes
            .iter()
            .filter(|p| p.line == line)
            .map(|p| Point::new(p.x0, p.y).dist(start).min(Point::new(p.x1, p.y).dist(start)))
            .fold(f64::INFINITY, f64::min)
    };
    let flipped: Vec<Pass>;
    let passes = if nearest_on(last) < nearest_on(first) {
        flipped = passes.iter().map(|p| Pass { line: first + last - p.line, ..*p }).collect();
        &flipped[..]
    } else {
        passes
    };
    let first_line = |j: usize| passes[j].line == first;
    let mut used = vec![false; passes.len()];
    let mut moves: Vec<Move> = Vec::new();
    let mut here = start;
    let ends = |p: &Pass| (Point::new(p.x0, p.y), Point::new(p.x1, p.y));
    let mut current: Option<usize> = None;
    for _ in 0..passes.len() {
        let next = current.and_then(|c| {
            let cp = passes[c];
            (0..passes.len())
                .filter(|&j| !used[j] && passes[j].line == cp.line + 1 && passes[j].x0 < cp.x1 && passes[j].x1 > cp.x0)
                .min_by(|&a, &b| {
                    let da = ends(&passes[a]).0.dist(here).min(ends(&passes[a]).1.dist(here));
                    let db = ends(&passes[b]).0.dist(here).min(ends(&passes[b]).1.dist(here));
                    da.total_cmp(&db)
                })
        });
        let j = match next {
            Some(j) => j,
            None => match (0..passes.len()).filter(|&j| !used[j] && (current.is_some() || first_line(j))).min_by(|&a, &b| {
                let da = ends(&passes[a]).0.dist(here).min(ends(&passes[a]).1.dist(here));
                let db = ends(&passes[b]).0.dist(here).min(ends(&passes[b]).1.dist(here));
                da.total_cmp(&db)
            }) {
                Some(j) => j,
                None => break,
            },
        };
        used[j] = true;
        let (a, b) = ends(&passes[j]);
        let (from, to) = if a.dist(here) <= b.dist(here) { (a, b) } else { (b, a) };
        if !moves.is_empty() && here.dist(from) > 1e-9 {
            moves.push(Move::line(Point3::at(here, 0.0), Point3::at(from, 0.0), Intent::Link));
        }
        moves.push(Move::line(Point3::at(from, 0.0), Point3::at(to, 0.0), Intent::Cut));
        here = to;
        current = Some(j);
    }
    moves
}

fn rotate_moves(moves: &mut [Move], theta: f64) {
    for m in moves {
        m.start = Point3::at(m.start.xy().rotate(theta), m.start.z);
        m.end = Point3::at(m.end.xy().rotate(theta), m.end.z);
        m.center = m.center.map(|c| c.rotate(theta));
    }
}

pub(crate) fn zigzag_families(zone: &Region, tool: &Tool, params: &StrategyParams, hint: Point) -> Result<Vec<Vec<Move>>> {
    params.validate(tool)?;
    if zone.is_empty() {
        return Ok(vec![]);
    }
    let tol = DEFAULT_TOL;
    let band = offset_region(zone, -tool.radius(), tol)?;
    let mut families = Vec::new();
    if band.is_empty() {
        // Narrower than the tool: a single pass along the medial axis.
        let c = max_inscribed_circle(zone, tol)?;
        let core = offset_region(zone, -(c.radius - (0.5 * c.radius).min(0.1)), tol)?;
        for part in core.parts {
            let theta = min_area_rect(&part.outer).map_or(params.zigzag_direction, |r| r.long_axis_angle());
            let region = Region::from_part(part).rotate(-theta);
            let y = region.bbox().center().y;
            let passes: Vec<Pass> = region
                .scanline(y)
                .into_iter()
                .map(|(x0, x1)| Pass { line: 0, x0, x1, y })
                .collect();
            let mut moves = chain_passes(&passes, hint.rotate(-theta));
            rotate_moves(&mut moves, theta);
            if !moves.is_empty() {
                families.push(moves);
            }
        }
        return Ok(families);
    }
    // Passes at theta and theta + pi are the same lines.
    let theta = params.zigzag_direction.rem_euclid(std::f64::consts::PI);
    let mut here = hint;
    let mut parts: Vec<Region> = band.parts.iter().cloned().map(Region::from_part).collect();
    while !parts.is_empty() {
        let k = (0..parts.len())
            .min_by(|&a, &b| parts[a].boundary_distance(here).total_cmp(&parts[b].boundary_distance(here)))
            .expect("non-empty");
        let part = parts.remove(k);
        let rotated = part.rotate(-theta);
        let passes = scan_passes(&rotated, params.stepover);
        let mut moves = chain_passes(&passes, here.rotate(-theta));
        rotate_moves(&mut moves, theta);
        let end = moves.last().map_or(here, |m| m.end.xy());
        let contour = chain_rings(&part.loops().cloned().collect::<Vec<_>>(), end, 0.0, 1.5 * tol);
        if let (Some(last), Some(first)) = (moves.last(), contour.first()) {
            if last.end.dist(first.start) > 1e-9 {
                moves.push(Move::line(last.end, first.start, Intent::Link));
            }
        }
        moves.extend(contour);
        if let Some(m) = moves.last() {
            here = m.end.xy();
        }
        families.push(moves);
    }
    Ok(families)
}

/// Passes every `stepover` along `zigzag_direction` inside the zone shrunk by
/// the tool radius, then one pass around that band's boundary.
pub fn zigzag_path(zone: &Region, tool: &Tool, params: &StrategyParams) -> Result<Toolpath> {
    let bb = zone.bbox();
    let hint = if bb.is_empty() { Point::default() } else { bb.min };
    let fams = zigzag_families(zone, tool, params, hint)?;
    Ok(Toolpath::new(tool.clone(), tool.vc_mm_s, join_families(fams)))
}
