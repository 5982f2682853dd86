//! Contour-parallel clearing: rings at successive offsets of the zone.

use super::fit::ring_moves;
use super::{Intent, Move, Point3, StrategyParams, Toolpath};
use crate::error::Result;
use crate::geometry::{
    closest_on_segment, difference, max_inscribed_circle, offset_region, polygon_inscribed, PolygonWithHoles, Region, Ring,
    DEFAULT_TOL,
};
use crate::geometry::Point;
use crate::selection::Tool;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RingOrder {
    /// Innermost rings first, finishing on the boundary ring.
    CenterOut,
    /// Boundary ring first.
    OutsideIn,
}

struct Node {
    poly: PolygonWithHoles,
    children: Vec<usize>,
    /// Deepest level reached below this node.
    depth: usize,
}

/// Offset levels of the zone arranged as a containment forest.
fn ring_forest(zone: &Region, tool: &Tool, stepover: f64, tol: f64) -> Result<(Vec<Node>, Vec<usize>)> {
    let r = tool.radius();
    let mut nodes: Vec<Node> = Vec::new();
    let mut roots = Vec::new();
    let mut prev: Vec<usize> = Vec::new();
    for k in 0.. {
        let level = offset_region(zone, -(r + k as f64 * stepover), tol)?;
        if level.is_empty() || k > 100_000 {
            break;
        }
        let mut cur = Vec::new();
        for part in level.parts {
            let idx = nodes.len();
            let probe = part.outer[0];
            let parent = prev
                .iter()
                .copied()
                .find(|&p| nodes[p].poly.contains(probe))
                .or_else(|| {
                    prev.iter()
                        .copied()
                        .min_by(|&a, &b| nodes[a].poly.boundary_distance(probe).total_cmp(&nodes[b].poly.boundary_distance(probe)))
                });
            nodes.push(Node {
                poly: part,
                children: vec![],
                depth: 0,
            });
            match parent {
                Some(p) => nodes[p].children.push(idx),
                None => roots.push(idx),
            }
            cur.push(idx);
        }
        prev = cur;
    }
    // Where a level narrows to a half-width between r and the stepover, the
    // next level vanishes and leaves a strip down the middle uncut. Such
    // strips get a ring half a stepover in, which is within r of every point.
    let levels = nodes.len();
    let mut thinned = vec![false; levels];
    for i in 0..levels {
        let p = Region::from_part(nodes[i].poly.clone());
        let half = offset_region(&p, -0.5 * stepover, tol)?;
        if half.is_empty() {
            continue;
        }
        let wide = offset_region(&offset_region(&p, -stepover, tol)?, 0.5 * stepover, tol)?;
        for part in difference(&half, &wide).parts {
            if polygon_inscribed(&part, tol).radius <= r - 0.5 * stepover + tol {
                continue;
            }
            let idx = nodes.len();
            nodes.push(Node {
                poly: part,
                children: vec![],
                depth: 0,
            });
            nodes[i].children.push(idx);
            thinned[i] = true;
        }
    }
    // Leaves get one more pass close to their medial point.
    let leaves: Vec<usize> = (0..levels)
        .filter(|&i| nodes[i].children.is_empty() && !thinned[i])
        .collect();
    for leaf in leaves {
        let mir = polygon_inscribed(&nodes[leaf].poly, tol).radius;
        if mir <= 2.0 * tol {
            continue;
        }
        let delta = (0.5 * mir).min(0.1);
        let core = offset_region(&Region::from_part(nodes[leaf].poly.clone()), -(mir - delta), tol)?;
        for part in core.parts {
            let idx = nodes.len();
            nodes.push(Node {
                poly: part,
                children: vec![],
                depth: 0,
            });
            nodes[leaf].children.push(idx);
        }
    }
    fn fill_depth(nodes: &mut [Node], i: usize) -> usize {
        let kids = nodes[i].children.clone();
        let d = kids.iter().map(|&c| fill_depth(nodes, c) + 1).max().unwrap_or(0);
        nodes[i].depth = d;
        d
    }
    for &r in &roots {
        fill_depth(&mut nodes, r);
    }
    Ok((nodes, roots))
}

/// Rings of one root in outside-in order; the deepest subtree is visited last.
fn preorder(nodes: &[Node], i: usize, out: &mut Vec<Ring>) {
    out.extend(nodes[i].poly.loops().cloned());
    let mut kids = nodes[i].children.clone();
    kids.sort_by_key(|&c| nodes[c].depth);
    for c in kids {
        preorder(nodes, c, out);
    }
}

/// Rotates `ring` so it starts at the point closest to `target`.
pub(crate) fn start_ring_near(ring: &[Point], target: Point) -> Ring {
    let n = ring.len();
    let mut best = (f64::INFINITY, 0, ring[0], 0.0);
    for i in 0..n {
        let (q, t) = closest_on_segment(target, ring[i], ring[(i + 1) % n]);
        let d = q.dist(target);
        if d < best.0 - 1e-12 {
            best = (d, i, q, t);
        }
    }
    let (_, i, q, _) = best;
    let mut out = Vec::with_capacity(n + 1);
    let next = (i + 1) % n;
    let on_vertex = if q.dist(ring[i]) < 1e-6 {
        Some(i)
    } else if q.dist(ring[next]) < 1e-6 {
        Some(next)
    } else {
        None
    };
    match on_vertex {
        Some(v) => {
            for k in 0..n {
                out.push(ring[(v + k) % n]);
            }
        }
        None => {
            out.push(q);
            for k in 0..n {
                out.push(ring[(next + k) % n]);
            }
        }
    }
    out
}

/// Chains rings into one move list, starting each ring just ahead of where the
/// previous one ended.
pub(crate) fn chain_rings(rings: &[Ring], start_hint: Point, lead: f64, tol: f64) -> Vec<Move> {
    let mut moves: Vec<Move> = Vec::new();
    let mut cur: Option<(Point, Point)> = None;
    for ring in rings {
        if ring.len() < 3 {
            continue;
        }
        let target = match cur {
            Some((p, t)) => p + t * lead,
            None => start_hint,
        };
        let ring = start_ring_near(ring, target);
        let rm = ring_moves(&ring, 0.0, tol, Intent::Cut);
        if rm.is_empty() {
            continue;
        }
        if let Some((p, _)) = cur {
            if p.dist(ring[0]) > 1e-9 {
                moves.push(Move::line(Point3::at(p, 0.0), Point3::at(ring[0], 0.0), Intent::Link));
            }
        }
        let last = rm[rm.len() - 1];
        cur = Some((last.end.xy(), last.tangent_xy(true)));
        moves.extend(rm);
    }
    moves
}

/// Move lists for each connected part of the zone, at z = 0.
pub(crate) fn spiral_families(
    zone: &Region,
    tool: &Tool,
    params: &StrategyParams,
    hint: Point,
    order: RingOrder,
) -> Result<Vec<Vec<Move>>> {
    params.validate(tool)?;
    if zone.is_empty() {
        return Ok(vec![]);
    }
    let tol = DEFAULT_TOL;
    let (nodes, mut roots) = ring_forest(zone, tool, params.stepover, tol)?;
    let mut families = Vec::new();
    let mut here = hint;
    while !roots.is_empty() {
        let (k, _) = roots
            .iter()
            .enumerate()
            .map(|(k, &r)| (k, nodes[r].poly.boundary_distance(here) * if nodes[r].poly.contains(here) { 0.0 } else { 1.0 }))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        let root = roots.remove(k);
        let mut rings = Vec::new();
        preorder(&nodes, root, &mut rings);
        let start = match order {
            RingOrder::OutsideIn => here,
            RingOrder::CenterOut => {
                rings.reverse();
                let part = Region::from_part(nodes[root].poly.clone());
                max_inscribed_circle(&part, tol).map(|c| c.center).unwrap_or(here)
            }
        };
        let moves = chain_rings(&rings, start, params.stepover, 1.5 * tol);
        if let Some(m) = moves.last() {
            here = m.end.xy();
        }
        if !moves.is_empty() {
            families.push(moves);
        }
    }
    Ok(families)
}

pub(crate) fn join_families(families: Vec<Vec<Move>>) -> Vec<Move> {
    let mut out: Vec<Move> = Vec::new();
    for fam in families {
        if let (Some(last), Some(first)) = (out.last(), fam.first()) {
            if last.end.dist(first.start) > 1e-9 {
                out.push(Move::line(last.end, first.start, Intent::Link));
            }
        }
        out.extend(fam);
    }
    out
}

/// Contour-parallel path over the zone with rings every `stepover`, joined by
/// straight links. Order follows the entry kind: a plunge starts at the
/// centre and works outwards; a flank entry starts on the boundary ring.
pub fn spiral_path(zone: &Region, tool: &Tool, params: &StrategyParams) -> Result<Toolpath> {
    let order = match params.entry {
        super::EntryKind::SpiralPlunge => RingOrder::CenterOut,
        super::EntryKind::TangentialFlank => RingOrder::OutsideIn,
    };
    let hint = zone.bbox().center();
    let hint = if hint.x.is_finite() { hint } else { Point::default() };
    let fams = spiral_families(zone, tool, params, hint, order)?;
    Ok(Toolpath::new(tool.clone(), tool.vc_mm_s, join_families(fams)))
}
