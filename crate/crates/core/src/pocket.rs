//! Pocket description, topological classification and pre-processing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    difference, intersection, min_area_rect, offset_region, signed_area, union_all, Point,
    PolygonWithHoles, Region, DEFAULT_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FloorKind {
    #[default]
    Flat,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallKind {
    #[default]
    Perpendicular,
    Drafted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    Closed,
    Open,
    Corner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    ThinWall,
    HautDAile,
    Raidisseur,
}

/// A feature that must not be machined, with a guard band around it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecificEntity {
    pub kind: EntityKind,
    pub footprint: Region,
    /// Falls back to the caller's default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard_margin: Option<f64>,
}

/// Extra information attached to a hole of the pocket boundary.
///
/// Holes without an entry are ordinary islands. A negative island encloses a
/// depression below the pocket floor; once promoted to its own pocket the
/// hole stays in the parent boundary but no longer counts as an island.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Island {
    pub hole: usize,
    #[serde(default)]
    pub negative: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<f64>,
    /// The depression reaches below the parent floor.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub below_floor: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub promoted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pocket {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub boundary: PolygonWithHoles,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub islands: Vec<Island>,
    /// Indices of outer-loop edges (edge i joins vertex i to vertex i+1) that
    /// are not bounded by a wall.
    #[serde(default)]
    pub open_edges: Vec<usize>,
    pub depth: f64,
    #[serde(default)]
    pub floor: FloorKind,
    #[serde(default)]
    pub wall: WallKind,
    #[serde(default, rename = "entities", skip_serializing_if = "Vec::is_empty")]
    pub specific_entities: Vec<SpecificEntity>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PocketClass {
    pub closure: Closure,
    pub floor: FloorKind,
    pub wall: WallKind,
    pub has_islands: bool,
    pub has_specific: bool,
}

impl Pocket {
    pub fn new(boundary: PolygonWithHoles, depth: f64) -> Self {
        Pocket {
            name: None,
            boundary,
            islands: vec![],
            open_edges: vec![],
            depth,
            floor: FloorKind::Flat,
            wall: WallKind::Perpendicular,
            specific_entities: vec![],
        }
    }

    /// Normalises loop orientation and checks geometry and attributes.
    pub fn validate(&mut self) -> Result<()> {
        self.boundary.normalize();
        self.boundary.validate(0)?;
        if !(self.depth > 0.0 && self.depth.is_finite()) {
            return Err(Error::invalid(format!("pocket depth must be positive, got {}", self.depth)));
        }
        let n = self.boundary.outer.len();
        if let Some(&e) = self.open_edges.iter().find(|&&e| e >= n) {
            return Err(Error::invalid(format!("open edge {e} out of range (outer loop has {n} edges)")));
        }
        self.open_edges.sort_unstable();
        self.open_edges.dedup();
        for isl in &self.islands {
            if isl.hole >= self.boundary.holes.len() {
                return Err(Error::invalid(format!("island refers to missing hole {}", isl.hole)));
            }
            if let Some(d) = isl.depth {
                if !(d > 0.0 && d.is_finite()) {
                    return Err(Error::invalid(format!("island depth must be positive, got {d}")));
                }
            }
        }
        for (i, e) in self.specific_entities.iter_mut().enumerate() {
            e.footprint.normalize();
            e.footprint.validate().map_err(|err| Error::invalid(format!("entity {i}: {err}")))?;
            if let Some(m) = e.guard_margin {
                if !(m >= 0.0 && m.is_finite()) {
                    return Err(Error::invalid(format!("entity {i}: guard margin must be >= 0")));
                }
            }
        }
        Ok(())
    }

    fn island(&self, hole: usize) -> Option<&Island> {
        self.islands.iter().find(|i| i.hole == hole)
    }

    /// The area to clear: boundary minus every hole.
    pub fn region(&self) -> Region {
        Region::from_part(self.boundary.clone())
    }

    pub fn open_edge_segments(&self) -> Vec<(Point, Point)> {
        let o = &self.boundary.outer;
        self.open_edges
            .iter()
            .map(|&i| (o[i], o[(i + 1) % o.len()]))
            .collect()
    }
}

/// Open edges form a corner when they make one contiguous run of the outer
/// loop whose edges lie on exactly two adjacent sides of the minimum-area
/// bounding rectangle.
fn is_corner(p: &Pocket) -> bool {
    let outer = &p.boundary.outer;
    let n = outer.len();
    let open: Vec<bool> = (0..n).map(|i| p.open_edges.contains(&i)).collect();
    let runs = (0..n).filter(|&i| open[i] && !open[(i + n - 1) % n]).count();
    if runs != 1 {
        return false;
    }
    let Some(rect) = min_area_rect(outer) else {
        return false;
    };
    let scale = rect.extent_u.max(rect.extent_v);
    let eps = 1e-6 * scale.max(1.0);
    let on_side = |a: Point, (s0, s1): (Point, Point)| {
        let d = (s1 - s0).normalized();
        (a - s0).cross(d).abs() <= eps
    };
    let mut sides = [false; 4];
    for (i, &is_open) in open.iter().enumerate() {
        if !is_open {
            continue;
        }
        let (a, b) = (outer[i], outer[(i + 1) % n]);
        let mut hit = false;
        for (k, s) in rect.sides().into_iter().enumerate() {
            if on_side(a, s) && on_side(b, s) {
                sides[k] = true;
                hit = true;
            }
        }
        if !hit {
            return false;
        }
    }
    let used: Vec<usize> = (0..4).filter(|&k| sides[k]).collect();
    used.len() == 2 && ((used[1] - used[0]) == 1 || (used[0] == 0 && used[1] == 3))
}

pub fn classify_pocket(p: &Pocket) -> PocketClass {
    let closure = if p.open_edges.is_empty() {
        Closure::Closed
    } else if is_corner(p) {
        Closure::Corner
    } else {
        Closure::Open
    };
    let has_islands = (0..p.boundary.holes.len()).any(|h| p.island(h).is_none_or(|i| !i.promoted));
    PocketClass {
        closure,
        floor: p.floor,
        wall: p.wall,
        has_islands,
        has_specific: !p.specific_entities.is_empty(),
    }
}

/// Splits every negative island off as a pocket of its own. The parent keeps
/// the loop as a hole, marked as promoted.
pub fn promote_negative_islands(p: &Pocket) -> Result<(Pocket, Vec<Pocket>)> {
    let mut parent = p.clone();
    let mut promoted = Vec::new();
    for isl in parent.islands.iter_mut() {
        if !isl.negative || isl.promoted {
            continue;
        }
        if isl.below_floor && isl.depth.is_none() {
            return Err(Error::invalid(format!(
                "negative island on hole {} reaches below the floor but has no explicit depth",
                isl.hole
            )));
        }
        let mut ring = p
            .boundary
            .holes
            .get(isl.hole)
            .ok_or_else(|| Error::invalid(format!("island refers to missing hole {}", isl.hole)))?
            .clone();
        if signed_area(&ring) < 0.0 {
            ring.reverse();
        }
        let boundary = PolygonWithHoles::new(ring, vec![]);
        let footprint = Region::from_part(boundary.clone());
        let entities = p
            .specific_entities
            .iter()
            .filter(|e| !intersection(&e.footprint, &footprint).is_empty())
            .cloned()
            .collect();
        let mut child = Pocket::new(boundary, isl.depth.unwrap_or(p.depth));
        child.name = p.name.as_ref().map(|n| format!("{n}.island{}", isl.hole));
        child.specific_entities = entities;
        promoted.push(child);
        isl.negative = false;
        isl.promoted = true;
    }
    Ok((parent, promoted))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskedPocket {
    pub machinable: Region,
    pub reserved: Region,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Removes specific-entity footprints, grown by their guard margins, from the
/// pocket area. `default_margin` applies to entities without their own.
pub fn mask_specific_entities(p: &Pocket, default_margin: f64) -> Result<MaskedPocket> {
    let area = p.region();
    let guards: Vec<Region> = p
        .specific_entities
        .iter()
        .map(|e| {
            let m = e.guard_margin.unwrap_or(default_margin);
            if m > 0.0 {
                offset_region(&e.footprint, m, DEFAULT_TOL)
            } else {
                Ok(e.footprint.clone())
            }
        })
        .collect::<Result<_>>()?;
    let reserved = intersection(&union_all(guards.iter()), &area);
    let machinable = difference(&area, &reserved);
    let mut warnings = Vec::new();
    if machinable.is_empty() && !area.is_empty() {
        warnings.push("reserved zones cover the whole pocket; nothing left to machine".to_string());
    }
    Ok(MaskedPocket {
        machinable,
        reserved,
        warnings,
    })
}
