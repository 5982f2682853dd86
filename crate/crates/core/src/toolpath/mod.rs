//! Toolpath representation and generators.

mod corner;
mod discretize;
mod entry;
mod fit;
mod gcode;
mod generate;
mod links;
mod spiral;
mod zigzag;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::selection::Tool;

pub use corner::cornerize;
pub use discretize::{chord_count, discretize_arcs};
pub use entry::entry_moves;
pub use fit::{fit_arcs, ring_moves};
pub use gcode::to_gcode;
pub use generate::{generate, PathContext};
pub use links::{biarc, hsm_links};
pub use spiral::spiral_path;
pub use zigzag::zigzag_path;

/// Links join two cut moves are only blended when not longer than this many stepovers.
pub const HSM_MAX_LINK_STEPOVERS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn at(p: Point, z: f64) -> Self {
        Point3::new(p.x, p.y, z)
    }

    pub fn xy(self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn dist(self, o: Point3) -> f64 {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2) + (self.z - o.z).powi(2)).sqrt()
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        [p.x, p.y, p.z]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Line,
    ArcCw,
    ArcCcw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intent {
    Cut,
    Entry,
    Link,
    Exit,
}

impl Intent {
    pub const ALL: [Intent; 4] = [Intent::Cut, Intent::Entry, Intent::Link, Intent::Exit];

    pub fn name(self) -> &'static str {
        match self {
            Intent::Cut => "cut",
            Intent::Entry => "entry",
            Intent::Link => "link",
            Intent::Exit => "exit",
        }
    }
}

/// One NC block. Arcs lie in the XY plane and may descend along z (helix);
/// an arc whose start and end coincide in XY is a full turn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub start: Point3,
    pub end: Point3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Point>,
    pub intent: Intent,
}

impl Move {
    pub fn line(start: Point3, end: Point3, intent: Intent) -> Self {
        Move {
            kind: MoveKind::Line,
            start,
            end,
            center: None,
            intent,
        }
    }

    pub fn arc(start: Point3, end: Point3, center: Point, ccw: bool, intent: Intent) -> Self {
        Move {
            kind: if ccw { MoveKind::ArcCcw } else { MoveKind::ArcCw },
            start,
            end,
            center: Some(center),
            intent,
        }
    }

    pub fn is_arc(&self) -> bool {
        self.kind != MoveKind::Line
    }

    pub fn is_ccw(&self) -> bool {
        self.kind == MoveKind::ArcCcw
    }

    pub fn radius(&self) -> f64 {
        self.center.map_or(f64::INFINITY, |c| c.dist(self.start.xy()))
    }

    /// Unsigned swept angle of an arc, in (0, 2pi].
    pub fn sweep(&self) -> f64 {
        let Some(c) = self.center else { return 0.0 };
        let a0 = (self.start.xy() - c).angle();
        let a1 = (self.end.xy() - c).angle();
        let mut s = if self.is_ccw() { a1 - a0 } else { a0 - a1 };
        s = s.rem_euclid(2.0 * PI);
        if s < 1e-12 {
            s = 2.0 * PI;
        }
        s
    }

    pub fn xy_length(&self) -> f64 {
        match self.kind {
            MoveKind::Line => self.start.xy().dist(self.end.xy()),
            _ => self.radius() * self.sweep(),
        }
    }

    pub fn length(&self) -> f64 {
        match self.kind {
            MoveKind::Line => self.start.dist(self.end),
            _ => self.xy_length().hypot(self.end.z - self.start.z),
        }
    }

    /// Position at fraction `t` of the move.
    pub fn point_at(&self, t: f64) -> Point3 {
        let z = self.start.z + (self.end.z - self.start.z) * t;
        match (self.kind, self.center) {
            (MoveKind::Line, _) | (_, None) => {
                Point3::at(self.start.xy().lerp(self.end.xy(), t), z)
            }
            (_, Some(c)) => {
                let sgn = if self.is_ccw() { 1.0 } else { -1.0 };
                let p = c + (self.start.xy() - c).rotate(sgn * self.sweep() * t);
                Point3::at(p, z)
            }
        }
    }

    /// Unit tangent at fraction `t`, as (dx, dy, dz).
    pub fn tangent_at(&self, t: f64) -> [f64; 3] {
        let dz = self.end.z - self.start.z;
        let v = match (self.kind, self.center) {
            (MoveKind::Line, _) | (_, None) => {
                let d = self.end.xy() - self.start.xy();
                [d.x, d.y, dz]
            }
            (_, Some(c)) => {
                let r = self.point_at(t).xy() - c;
                let sgn = if self.is_ccw() { 1.0 } else { -1.0 };
                let tan = r.perp() * (sgn * self.sweep());
                [tan.x, tan.y, dz]
            }
        };
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n == 0.0 {
            [0.0; 3]
        } else {
            [v[0] / n, v[1] / n, v[2] / n]
        }
    }

    /// XY unit tangent at the start or end.
    pub fn tangent_xy(&self, at_end: bool) -> Point {
        let t = self.tangent_at(if at_end { 1.0 } else { 0.0 });
        Point::new(t[0], t[1]).normalized()
    }

    pub fn with_z(mut self, dz: f64) -> Self {
        self.start.z += dz;
        self.end.z += dz;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Spiral,
    Zigzag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkStyle {
    Classic,
    Hsm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    TangentialFlank,
    SpiralPlunge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyParams {
    pub mode: Mode,
    pub stepover: f64,
    /// Pass direction for zigzag, radians from +x.
    #[serde(default)]
    pub zigzag_direction: f64,
    pub links: LinkStyle,
    #[serde(default)]
    pub corner_radius: f64,
    pub entry: EntryKind,
    /// When set, arcs are replaced by chords within this tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chord_tol: Option<f64>,
}

impl StrategyParams {
    pub fn spiral(stepover: f64) -> Self {
        StrategyParams {
            mode: Mode::Spiral,
            stepover,
            zigzag_direction: 0.0,
            links: LinkStyle::Classic,
            corner_radius: 0.0,
            entry: EntryKind::SpiralPlunge,
            chord_tol: None,
        }
    }

    pub fn zigzag(stepover: f64, direction: f64) -> Self {
        StrategyParams {
            mode: Mode::Zigzag,
            zigzag_direction: direction,
            ..Self::spiral(stepover)
        }
    }

    pub fn validate(&self, tool: &Tool) -> Result<()> {
        if !(self.stepover > 0.0 && self.stepover.is_finite()) {
            return Err(Error::invalid(format!("stepover must be positive, got {}", self.stepover)));
        }
        if self.stepover > tool.diameter + 1e-9 {
            return Err(Error::StepoverTooLarge {
                stepover: self.stepover,
                diameter: tool.diameter,
            });
        }
        if !(self.corner_radius >= 0.0 && self.corner_radius.is_finite()) {
            return Err(Error::invalid("corner radius must be >= 0"));
        }
        if let Some(t) = self.chord_tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::invalid("chord tolerance must be positive"));
            }
        }
        if !self.zigzag_direction.is_finite() {
            return Err(Error::invalid("zigzag direction must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Toolpath {
    pub tool: Tool,
    /// Programmed feed, mm/s.
    pub feed: f64,
    pub moves: Vec<Move>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

/// Largest gap tolerated between consecutive moves.
pub const CONTINUITY_EPS: f64 = 1e-6;

impl Toolpath {
    pub fn new(tool: Tool, feed: f64, moves: Vec<Move>) -> Self {
        Toolpath {
            tool,
            feed,
            moves,
            flags: vec![],
        }
    }

    pub fn check_continuity(&self) -> Result<()> {
        for (i, w) in self.moves.windows(2).enumerate() {
            let gap = w[0].end.dist(w[1].start);
            if gap > CONTINUITY_EPS {
                return Err(Error::Discontinuous { index: i + 1, gap });
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.tool.validate()?;
        if !(self.feed > 0.0 && self.feed.is_finite()) {
            return Err(Error::invalid("feed must be positive"));
        }
        for (i, m) in self.moves.iter().enumerate() {
            let pts = [m.start.x, m.start.y, m.start.z, m.end.x, m.end.y, m.end.z];
            if pts.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("move {i} has a non-finite coordinate")));
            }
            if m.is_arc() {
                let Some(c) = m.center else {
                    return Err(Error::invalid(format!("arc move {i} has no centre")));
                };
                let (r0, r1) = (c.dist(m.start.xy()), c.dist(m.end.xy()));
                if (r0 - r1).abs() > 1e-6 * r0.max(1.0) || r0 <= 0.0 {
                    return Err(Error::invalid(format!("arc move {i} has inconsistent radii {r0} / {r1}")));
                }
            }
        }
        self.check_continuity()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLength {
    pub total: f64,
    pub cut: f64,
}

pub fn path_length(p: &Toolpath) -> PathLength {
    let mut out = PathLength { total: 0.0, cut: 0.0 };
    for m in &p.moves {
        let l = m.length();
        out.total += l;
        if m.intent == Intent::Cut {
            out.cut += l;
        }
    }
    out
}

/// Default histogram bin edges for segment lengths, mm.
pub const DEFAULT_BIN_EDGES: [f64; 10] = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, f64::INFINITY];

/// Counts of move lengths per bin `[edges[i], edges[i+1])`.
pub fn segment_histogram(p: &Toolpath, edges: &[f64]) -> Vec<usize> {
    let mut counts = vec![0; edges.len().saturating_sub(1)];
    for m in &p.moves {
        let l = m.length();
        if let Some(i) = edges.windows(2).position(|w| l >= w[0] && l < w[1]) {
            counts[i] += 1;
        }
    }
    counts
}

/// Share of line moves shorter than `cutoff`.
pub fn short_segment_ratio(p: &Toolpath, cutoff: f64) -> f64 {
    let lines: Vec<f64> = p
        .moves
        .iter()
        .filter(|m| m.kind == MoveKind::Line)
        .map(|m| m.length())
        .collect();
    if lines.is_empty() {
        return 0.0;
    }
    lines.iter().filter(|&&l| l < cutoff).count() as f64 / lines.len() as f64
}

#[cfg(test)]
/// Move list through `points`, closing back to the first one.
pub(crate) fn polyline_moves(points: &[Point], z: f64, intent: Intent) -> Vec<Move> {
    (0..points.len())
        .map(|i| {
            Move::line(
                Point3::at(points[i], z),
                Point3::at(points[(i + 1) % points.len()], z),
                intent,
            )
        })
        .collect()
}
