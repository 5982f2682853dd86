//! File artifacts: schema-tagged JSON documents, SVG previews, CSV tables.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Region};
use crate::kinematics::{MachineParams, SimResult};
use crate::pocket::PocketClass;
use crate::selection::{Decomposition, Tool};
use crate::toolpath::{discretize_arcs, Intent, PathLength, Toolpath};

pub const SCHEMA: &str = "pocketforge/1";

/// A JSON output: `{"schema": "pocketforge/1", "command": ..., <body fields>}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub schema: String,
    pub command: String,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Document<T> {
    pub fn new(command: &str, body: T) -> Self {
        Document {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            body,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOut {
    pub class: PocketClass,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub promoted: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeOut {
    pub class: PocketClass,
    pub machinable_area: f64,
    pub reserved_area: f64,
    pub decomposition: Decomposition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathgenOut {
    pub tool: Tool,
    pub zone: Region,
    pub length: PathLength,
    pub toolpath: Toolpath,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateOut {
    pub machine: MachineParams,
    /// Programmed feed, mm/s.
    pub feed: f64,
    pub result: SimResult,
}

/// Parses a feed such as `10 m/min`, `2500mm/min` or `166.7 mm/s` into mm/s.
pub fn parse_feed(s: &str) -> Result<f64> {
    let s = s.trim();
    let split = s
        .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-' || c == '+' || c == 'e' || c == 'E'))
        .ok_or_else(|| Error::invalid(format!("feed '{s}' needs a unit (mm/min, m/min or mm/s)")))?;
    let (num, unit) = s.split_at(split);
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("feed '{s}' has no valid number")))?;
    let scale = match unit.trim() {
        "mm/min" => 1.0 / 60.0,
        "m/min" => 1000.0 / 60.0,
        "mm/s" => 1.0,
        u => return Err(Error::invalid(format!("unknown feed unit '{u}'"))),
    };
    let f = v * scale;
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::invalid(format!("feed must be positive, got '{s}'")));
    }
    Ok(f)
}

pub fn profile_csv(sim: &SimResult) -> String {
    let mut s = String::from("s_mm,v_mm_s\n");
    for (x, v) in &sim.profile {
        let _ = writeln!(s, "{x:.4},{v:.4}");
    }
    s
}

pub fn histogram_csv(sim: &SimResult) -> String {
    let mut s = String::from("min_mm,max_mm,count\n");
    for b in &sim.histogram {
        let max = b.max_mm.map_or(String::new(), |m| m.to_string());
        let _ = writeln!(s, "{},{max},{}", b.min_mm, b.count);
    }
    s
}

struct Canvas {
    min: Point,
    max: Point,
}

impl Canvas {
    fn new<'a>(points: impl Iterator<Item = &'a Point>) -> Self {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min = Point::new(min.x.min(p.x), min.y.min(p.y));
            max = Point::new(max.x.max(p.x), max.y.max(p.y));
        }
        if !min.x.is_finite() {
            min = Point::new(0.0, 0.0);
            max = Point::new(1.0, 1.0);
        }
        let pad = 0.05 * (max.x - min.x).max(max.y - min.y).max(1.0);
        Canvas {
            min: min - Point::new(pad, pad),
            max: max + Point::new(pad, pad),
        }
    }

    fn open(&self, s: &mut String) {
        let (w, h) = (self.max.x - self.min.x, self.max.y - self.min.y);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.3} {:.3} {w:.3} {h:.3}" width="{:.0}mm" height="{:.0}mm">"#,
            self.min.x, -self.max.y, w, h
        );
        // Drawing coordinates are y-up.
        let _ = writeln!(s, r#"<g transform="scale(1,-1)" fill="none" stroke-linejoin="round">"#);
    }

    fn close(s: &mut String) {
        s.push_str("</g>\n</svg>\n");
    }
}

fn region_path(r: &Region) -> String {
    let mut d = String::new();
    for ring in r.loops() {
        for (i, p) in ring.iter().enumerate() {
            let _ = write!(d, "{}{:.4},{:.4} ", if i == 0 { "M" } else { "L" }, p.x, p.y);
        }
        d.push_str("Z ");
    }
    d.trim_end().to_string()
}

const ZONE_COLORS: [&str; 6] = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2"];

/// Outline of the pocket plus one filled region per labelled zone.
pub fn zones_svg(outline: &Region, zones: &[(String, Region)]) -> String {
    let canvas = Canvas::new(outline.loops().flatten());
    let mut s = String::new();
    canvas.open(&mut s);
    let w = 0.004 * (canvas.max.x - canvas.min.x).max(canvas.max.y - canvas.min.y);
    for (k, (label, z)) in zones.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<path class="zone" data-label="{label}" d="{}" fill="{}" fill-opacity="0.5" fill-rule="evenodd" stroke="none"/>"#,
            region_path(z),
            ZONE_COLORS[k % ZONE_COLORS.len()]
        );
    }
    let _ = writeln!(s, r##"<path class="outline" d="{}" stroke="#333" stroke-width="{w:.4}"/>"##, region_path(outline));
    Canvas::close(&mut s);
    s
}

/// Zone outline underneath one path element per move intent.
pub fn toolpath_svg(zone: &Region, path: &Toolpath) -> String {
    let flat = discretize_arcs(path, 0.05);
    let pts: Vec<Point> = zone
        .loops()
        .flatten()
        .copied()
        .chain(flat.moves.iter().flat_map(|m| [m.start.xy(), m.end.xy()]))
        .collect();
    let canvas = Canvas::new(pts.iter());
    let mut s = String::new();
    canvas.open(&mut s);
    let w = 0.003 * (canvas.max.x - canvas.min.x).max(canvas.max.y - canvas.min.y);
    let _ = writeln!(
        s,
        r##"<path class="zone" d="{}" fill="#ddd" fill-rule="evenodd" stroke="#999" stroke-width="{w:.4}"/>"##,
        region_path(zone)
    );
    for (intent, color) in [
        (Intent::Cut, "#1f77b4"),
        (Intent::Entry, "#2ca02c"),
        (Intent::Link, "#ff7f0e"),
        (Intent::Exit, "#d62728"),
    ] {
        let mut d = String::new();
        let mut last: Option<Point> = None;
        for m in flat.moves.iter().filter(|m| m.intent == intent) {
            let (a, b) = (m.start.xy(), m.end.xy());
            if last.is_none_or(|l| l.dist(a) > 1e-9) {
                let _ = write!(d, "M{:.4},{:.4} ", a.x, a.y);
            }
            let _ = write!(d, "L{:.4},{:.4} ", b.x, b.y);
            last = Some(b);
        }
        if !d.is_empty() {
            let _ = writeln!(
                s,
                r#"<path class="{}" d="{}" stroke="{color}" stroke-width="{w:.4}"/>"#,
                intent.name(),
                d.trim_end()
            );
        }
    }
    Canvas::close(&mut s);
    s
}
