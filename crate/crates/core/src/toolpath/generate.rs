use serde::{Deserialize, Serialize};

use super::spiral::{spiral_families, RingOrder};
use super::zigzag::zigzag_families;
use super::{
    cornerize, discretize_arcs, entry_moves, hsm_links, EntryKind, Intent, LinkStyle, Mode, Move, Point3,
    StrategyParams, Toolpath,
};
use crate::error::Result;
use crate::geometry::{max_inscribed_circle, Point, Region, DEFAULT_TOL};
use crate::pocket::Closure;
use crate::selection::Tool;

/// What the generator needs to know about the pocket around a zone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathContext {
    pub closure: Closure,
    #[serde(default)]
    pub open_edges: Vec<(Point, Point)>,
    pub depth: f64,
}

fn start_hint(zone: &Region, ctx: &PathContext, plunge: bool) -> Point {
    if !plunge {
        if let Some(&(a, b)) = ctx
            .open_edges
            .iter()
            .max_by(|x, y| x.0.dist(x.1).total_cmp(&y.0.dist(y.1)))
        {
            return (a + b) * 0.5;
        }
    }
    max_inscribed_circle(zone, DEFAULT_TOL).map_or(zone.bbox().center(), |c| c.center)
}

/// Full machining path for one zone: clearing pattern, link style, corner
/// rounding, entries at depth, retracts between separate parts of the zone,
/// and optional arc discretization.
pub fn generate(zone: &Region, tool: &Tool, feed: f64, params: &StrategyParams, ctx: &PathContext) -> Result<Toolpath> {
    params.validate(tool)?;
    let mut path = Toolpath::new(tool.clone(), feed, vec![]);
    if zone.is_empty() {
        return Ok(path);
    }
    let plunge = params.entry == EntryKind::SpiralPlunge || ctx.closure == Closure::Closed;
    let hint = start_hint(zone, ctx, plunge);
    let families = match params.mode {
        Mode::Spiral => {
            let order = if plunge { RingOrder::CenterOut } else { RingOrder::OutsideIn };
            spiral_families(zone, tool, params, hint, order)?
        }
        Mode::Zigzag => zigzag_families(zone, tool, params, hint)?,
    };
    let depth = ctx.depth;
    let mut moves: Vec<Move> = Vec::new();
    for fam in families {
        let fam: Vec<Move> = fam.into_iter().map(|m| m.with_z(-depth)).collect();
        let mut fp = Toolpath::new(tool.clone(), feed, fam);
        if params.links == LinkStyle::Hsm {
            fp = hsm_links(&fp, LinkStyle::Hsm, params.stepover, Some(zone));
        }
        fp = cornerize(&fp, params.corner_radius);
        let Some(first) = fp.moves.first() else { continue };
        let entry = entry_moves(zone, ctx.closure, &ctx.open_edges, tool, plunge, first, depth)?;
        if let Some(last) = moves.last().copied() {
            let top = Point3::at(last.end.xy(), 0.0);
            moves.push(Move::line(last.end, top, Intent::Exit));
            if let Some(e) = entry.first() {
                if top.dist(e.start) > 1e-9 {
                    moves.push(Move::line(top, e.start, Intent::Link));
                }
            }
        }
        moves.extend(entry);
        moves.extend(fp.moves);
        path.flags.extend(fp.flags);
    }
    if let Some(last) = moves.last().copied() {
        moves.push(Move::line(last.end, Point3::at(last.end.xy(), 0.0), Intent::Exit));
    }
    path.moves = moves;
    if let Some(tol) = params.chord_tol {
        path = discretize_arcs(&path, tol);
    }
    path.check_continuity()?;
    Ok(path)
}
