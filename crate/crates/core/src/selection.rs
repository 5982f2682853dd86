//! Cutter catalog, diameter bounds and the dichotomy that picks a tool set.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{difference, max_inscribed_radius, offset_region, opening, union_all, Region, DEFAULT_TOL};
use crate::toolpath::{path_length, spiral_path, StrategyParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlungeStyle {
    #[default]
    Helical,
    Ramp,
    Axial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub diameter: f64,
    pub flutes: u32,
    /// Feed along the path, mm/s.
    pub vc_mm_s: f64,
    #[serde(default)]
    pub plunge: PlungeStyle,
}

impl Tool {
    pub fn radius(&self) -> f64 {
        self.diameter / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.diameter > 0.0 && self.diameter.is_finite()) {
            return Err(Error::invalid(format!("tool diameter must be positive, got {}", self.diameter)));
        }
        if !(self.vc_mm_s > 0.0 && self.vc_mm_s.is_finite()) {
            return Err(Error::invalid(format!("tool feed must be positive, got {}", self.vc_mm_s)));
        }
        if self.flutes == 0 {
            return Err(Error::invalid("tool must have at least one flute"));
        }
        Ok(())
    }
}

pub fn validate_catalog(catalog: &[Tool]) -> Result<()> {
    if catalog.is_empty() {
        return Err(Error::invalid("tool catalog is empty"));
    }
    catalog.iter().try_for_each(Tool::validate)
}

/// Largest catalog tool whose diameter does not exceed `d`.
pub fn snap_to_catalog(catalog: &[Tool], d: f64) -> Option<&Tool> {
    catalog
        .iter()
        .filter(|t| t.diameter <= d + 1e-9)
        .max_by(|a, b| a.diameter.total_cmp(&b.diameter))
}

/// `d0`: largest cutter that clears the region in one connected sweep.
/// `dx`: largest cutter that fits anywhere in it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiameterBounds {
    pub d0: f64,
    pub dx: f64,
}

impl DiameterBounds {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.d0 + self.dx)
    }
}

/// Bisection resolution for `d0`, mm.
pub const D0_RESOLUTION: f64 = 0.1;

fn single_sweep_possible(part: &Region, d: f64) -> Result<bool> {
    let e = offset_region(part, -d / 2.0, DEFAULT_TOL)?;
    Ok(e.parts.len() == 1)
}

pub fn diameter_bounds(machinable: &Region) -> Result<DiameterBounds> {
    if machinable.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let dx = 2.0 * max_inscribed_radius(machinable, DEFAULT_TOL)?;
    let mut d0 = f64::INFINITY;
    for part in &machinable.parts {
        let part = Region::from_part(part.clone());
        let mut hi = 2.0 * max_inscribed_radius(&part, DEFAULT_TOL)? + DEFAULT_TOL;
        let mut lo = 0.0;
        while hi - lo > D0_RESOLUTION / 2.0 {
            let mid = 0.5 * (lo + hi);
            if single_sweep_possible(&part, mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        d0 = d0.min(lo);
    }
    Ok(DiameterBounds { d0: d0.min(dx), dx })
}

/// Time to cover `length` mm at the tool's feed.
pub fn removal_time(length: f64, tool: &Tool) -> f64 {
    length / tool.vc_mm_s
}

pub fn mrr(volume: f64, time: f64) -> Result<f64> {
    if !(volume >= 0.0 && time >= 0.0) {
        return Err(Error::invalid("volume and time must be non-negative"));
    }
    if time == 0.0 {
        return if volume == 0.0 { Ok(0.0) } else { Err(Error::ZeroTime) };
    }
    Ok(volume / time)
}

/// One evaluated candidate diameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterStep {
    pub diameter: f64,
    /// Catalog tool whose feed the candidate is evaluated with.
    pub catalog_diameter: f64,
    pub zone_area: f64,
    pub path_length: f64,
    pub time: f64,
    pub volume: f64,
    pub mrr: f64,
}

/// Outcome of comparing an interval midpoint with its lower end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub iteration: usize,
    pub lo: f64,
    pub hi: f64,
    pub mid: f64,
    pub ratio: f64,
    pub kept_upper: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolZone {
    pub tool: Tool,
    pub zone: Region,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub bounds: DiameterBounds,
    pub steps: Vec<DiameterStep>,
    pub decisions: Vec<Decision>,
    /// Largest tool first.
    pub chosen: Vec<ToolZone>,
    pub residual: Region,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DichotomyParams {
    /// A midpoint is kept when its MRR exceeds the lower end's by more than this fraction.
    pub threshold: f64,
    /// Intervals narrower than this are not split further.
    pub min_interval: f64,
    /// Stepover as a fraction of the candidate diameter.
    pub stepover_ratio: f64,
}

impl DichotomyParams {
    pub fn for_catalog(catalog: &[Tool]) -> Self {
        let mut ds: Vec<f64> = catalog.iter().map(|t| t.diameter).collect();
        ds.sort_by(f64::total_cmp);
        ds.dedup();
        let gap = ds.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        DichotomyParams {
            threshold: 0.05,
            min_interval: if gap.is_finite() { gap } else { 1.0 },
            stepover_ratio: 0.5,
        }
    }
}

/// Clears the zone reachable by a cutter of diameter `d` with a spiral at
/// half-diameter stepover and measures its removal rate.
pub fn evaluate_diameter(
    machinable: &Region,
    depth: f64,
    d: f64,
    catalog: &[Tool],
    stepover_ratio: f64,
) -> Result<DiameterStep> {
    let snapped = snap_to_catalog(catalog, d).ok_or(Error::NoInsertableTool { max_diameter: d })?;
    let zone = opening(machinable, d, DEFAULT_TOL)?;
    let tool = Tool {
        diameter: d,
        ..snapped.clone()
    };
    let params = StrategyParams::spiral(stepover_ratio * d);
    let path = spiral_path(&zone, &tool, &params)?;
    let length = path_length(&path).total;
    let time = removal_time(length, &tool);
    let zone_area = zone.area();
    let volume = zone_area * depth;
    Ok(DiameterStep {
        diameter: d,
        catalog_diameter: snapped.diameter,
        zone_area,
        path_length: length,
        time,
        volume,
        mrr: mrr(volume, time)?,
    })
}

/// Assigns each tool, largest first, what it can reach and larger tools have not.
pub fn assign_zones(machinable: &Region, tools: &[Tool]) -> Result<(Vec<ToolZone>, Region)> {
    let mut sorted: Vec<Tool> = tools.to_vec();
    sorted.sort_by(|a, b| b.diameter.total_cmp(&a.diameter));
    let mut covered = Region::empty();
    let mut out = Vec::with_capacity(sorted.len());
    for tool in sorted {
        let reach = opening(machinable, tool.diameter, DEFAULT_TOL)?;
        let zone = difference(&reach, &covered);
        covered = union_all([&covered, &reach]);
        out.push(ToolZone { tool, zone });
    }
    let residual = difference(machinable, &covered);
    Ok((out, residual))
}

pub fn dichotomy_decompose(
    machinable: &Region,
    depth: f64,
    bounds: DiameterBounds,
    catalog: &[Tool],
    params: DichotomyParams,
) -> Result<Decomposition> {
    validate_catalog(catalog)?;
    if !(depth > 0.0) {
        return Err(Error::invalid("depth must be positive"));
    }
    if snap_to_catalog(catalog, bounds.dx).is_none() {
        return Err(Error::NoInsertableTool { max_diameter: bounds.dx });
    }
    // With no catalog tool below d0 the smallest tool becomes the lower end.
    let smallest = catalog.iter().map(|t| t.diameter).fold(f64::INFINITY, f64::min);
    let lo0 = if snap_to_catalog(catalog, bounds.d0).is_some() {
        bounds.d0
    } else {
        smallest
    };
    let eval = |d: f64| evaluate_diameter(machinable, depth, d, catalog, params.stepover_ratio);
    let first = eval(lo0)?;
    let mut steps = vec![first.clone()];
    let mut decisions = Vec::new();
    let mut retained = vec![lo0];
    let has_tool_inside = |lo: f64, hi: f64| catalog.iter().any(|t| t.diameter > lo + 1e-9 && t.diameter < hi - 1e-9);

    let mut level: VecDeque<(f64, f64, f64)> = VecDeque::from([(lo0, bounds.dx, first.mrr)]);
    let mut iteration = 0;
    while !level.is_empty() && iteration < 64 {
        let work: Vec<(f64, f64, f64)> = level
            .drain(..)
            .filter(|&(lo, hi, _)| hi - lo >= params.min_interval && has_tool_inside(lo, hi))
            .collect();
        if work.is_empty() {
            break;
        }
        let evaluated: Vec<Result<DiameterStep>> = work.par_iter().map(|&(lo, hi, _)| eval(0.5 * (lo + hi))).collect();
        for (&(lo, hi, mrr_lo), step) in work.iter().zip(evaluated) {
            let step = step?;
            let mid = step.diameter;
            let ratio = if mrr_lo > 0.0 { step.mrr / mrr_lo } else { f64::INFINITY };
            let kept_upper = ratio > 1.0 + params.threshold;
            decisions.push(Decision {
                iteration,
                lo,
                hi,
                mid,
                ratio,
                kept_upper,
            });
            level.push_back((lo, mid, mrr_lo));
            if kept_upper {
                retained.push(mid);
                level.push_back((mid, hi, step.mrr));
            }
            steps.push(step);
        }
        iteration += 1;
    }

    let mut tools: Vec<Tool> = Vec::new();
    for d in retained {
        if let Some(t) = snap_to_catalog(catalog, d) {
            if !tools.iter().any(|u| u.diameter == t.diameter) {
                tools.push(t.clone());
            }
        }
    }
    let (chosen, residual) = assign_zones(machinable, &tools)?;
    Ok(Decomposition {
        bounds,
        steps,
        decisions,
        chosen,
        residual,
    })
}
