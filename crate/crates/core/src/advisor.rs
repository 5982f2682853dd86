//! Strategy enumeration and ranking by simulated time.

use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    intersection, max_inscribed_radius, min_area_rect, offset_region, opening, Point, Region, DEFAULT_TOL,
};
use crate::kinematics::{simulate, MachineParams, SimResult};
use crate::pocket::{
    classify_pocket, mask_specific_entities, promote_negative_islands, Closure, Pocket, PocketClass,
};
use crate::selection::{diameter_bounds, dichotomy_decompose, validate_catalog, DichotomyParams, Decomposition, Tool};
use crate::toolpath::{
    generate, short_segment_ratio, EntryKind, LinkStyle, Mode, PathContext, StrategyParams, Toolpath,
};

pub const FLAG_CORNER_FEED: &str = "feed not sustainable in corner";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerRounding {
    None,
    /// Radius from feed and acceleration, see [`recommended_corner_radius`].
    Recommended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverrideAction {
    /// Never recommend a matching candidate.
    Exclude,
    /// Recommend the fastest matching candidate.
    Prefer,
}

/// Conditions are ANDed; absent fields match anything.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleMatch {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<Closure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub links: Option<LinkStyle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounded: Option<bool>,
}

impl RuleMatch {
    fn matches(&self, closure: Closure, p: &StrategyParams) -> bool {
        self.closure.is_none_or(|c| c == closure)
            && self.mode.is_none_or(|m| m == p.mode)
            && self.links.is_none_or(|l| l == p.links)
            && self.rounded.is_none_or(|r| r == (p.corner_radius > 0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Override {
    #[serde(rename = "match")]
    pub when: RuleMatch,
    pub action: OverrideAction,
    #[serde(default)]
    pub note: String,
}

/// The advisor's knowledge base. Every field has a default so a rule file
/// only needs the entries it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Rules {
    pub modes: Vec<Mode>,
    pub links: Vec<LinkStyle>,
    pub corner_rounding: Vec<CornerRounding>,
    pub entry_closed: EntryKind,
    pub entry_open: EntryKind,
    /// Stepover as a fraction of tool diameter.
    pub stepover_ratio: f64,
    /// Line moves shorter than this count as short segments, mm.
    pub short_segment_mm: f64,
    /// Smallest recommended corner radius, mm.
    pub r_min: f64,
    /// When set, arcs are simulated as chords within this tolerance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chord_tol: Option<f64>,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<Override>,
}

impl Default for Rules {
    fn default() -> Self {
        Rules {
            modes: vec![Mode::Spiral, Mode::Zigzag],
            links: vec![LinkStyle::Classic, LinkStyle::Hsm],
            corner_rounding: vec![CornerRounding::None, CornerRounding::Recommended],
            entry_closed: EntryKind::SpiralPlunge,
            entry_open: EntryKind::TangentialFlank,
            stepover_ratio: 0.5,
            short_segment_mm: 2.0,
            r_min: 0.5,
            chord_tol: None,
            threshold: 0.05,
            overrides: vec![],
        }
    }
}

impl Rules {
    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() || self.links.is_empty() || self.corner_rounding.is_empty() {
            return Err(Error::invalid("rules must allow at least one mode, link style and corner option"));
        }
        if !(self.stepover_ratio > 0.0 && self.stepover_ratio <= 1.0) {
            return Err(Error::invalid("stepover_ratio must be in (0, 1]"));
        }
        if !(self.r_min >= 0.0 && self.short_segment_mm >= 0.0 && self.threshold >= 0.0) {
            return Err(Error::invalid("r_min, short_segment_mm and threshold must be non-negative"));
        }
        if let Some(t) = self.chord_tol {
            if !(t > 0.0) {
                return Err(Error::invalid("chord_tol must be positive"));
            }
        }
        Ok(())
    }

    pub fn entry_for(&self, closure: Closure) -> EntryKind {
        if closure == Closure::Closed {
            self.entry_closed
        } else {
            self.entry_open
        }
    }
}

/// Corner radius at which the programmed feed needs no more than `a_max`,
/// at least `r_min`, clipped to `clearance`. The flag is set when clipped.
pub fn recommended_corner_radius(vf: f64, machine: &MachineParams, clearance: f64, r_min: f64) -> (f64, bool) {
    let r = (vf * vf / machine.a_max).max(r_min);
    if r > clearance {
        (clearance.max(0.0), true)
    } else {
        (r, false)
    }
}

/// Direction of the longest extent of the zone, radians.
pub fn long_axis(zone: &Region) -> f64 {
    let pts: Vec<Point> = zone.parts.iter().flat_map(|p| p.outer.iter().copied()).collect();
    min_area_rect(&pts).map_or(0.0, |r| r.long_axis_angle())
}

/// Largest fillet that fits where the tool centre can go.
pub fn corner_clearance(zone: &Region, tool: &Tool) -> f64 {
    offset_region(zone, -tool.radius(), DEFAULT_TOL)
        .and_then(|c| max_inscribed_radius(&c, DEFAULT_TOL))
        .unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub params: StrategyParams,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

/// Every combination of mode, link style and corner rounding allowed by the
/// rules, with the entry fixed by the pocket's closure.
pub fn enumerate_strategies(
    class: &PocketClass,
    zone: &Region,
    tool: &Tool,
    machine: &MachineParams,
    vf: f64,
    rules: &Rules,
) -> Vec<Candidate> {
    let direction = long_axis(zone);
    let (r_star, clipped) = recommended_corner_radius(vf, machine, corner_clearance(zone, tool), rules.r_min);
    let mut out = Vec::new();
    for &mode in &rules.modes {
        for &links in &rules.links {
            for &rounding in &rules.corner_rounding {
                let mut flags = Vec::new();
                let corner_radius = match rounding {
                    CornerRounding::None => 0.0,
                    CornerRounding::Recommended => {
                        if clipped {
                            flags.push(FLAG_CORNER_FEED.to_string());
                        }
                        r_star
                    }
                };
                out.push(Candidate {
                    params: StrategyParams {
                        mode,
                        stepover: rules.stepover_ratio * tool.diameter,
                        zigzag_direction: if mode == Mode::Zigzag { direction } else { 0.0 },
                        links,
                        corner_radius,
                        entry: rules.entry_for(class.closure),
                        chord_tol: rules.chord_tol,
                    },
                    flags,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedStrategy {
    /// Position in the enumeration.
    pub index: usize,
    pub params: StrategyParams,
    pub sim: SimResult,
    pub short_segment_ratio: f64,
    pub move_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedStrategy {
    pub index: usize,
    pub params: StrategyParams,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub tool: Tool,
    /// Programmed feed, mm/s.
    pub feed: f64,
    pub ranked: Vec<RankedStrategy>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failed: Vec<FailedStrategy>,
    pub recommended: StrategyParams,
    pub recommended_index: usize,
    pub rationale: Vec<String>,
}

/// Generates and simulates every candidate, then sorts by time, short-segment
/// ratio and enumeration order.
pub fn rank(
    zone: &Region,
    candidates: &[Candidate],
    tool: &Tool,
    machine: &MachineParams,
    vf: f64,
    ctx: &PathContext,
    rules: &Rules,
) -> Result<StrategyReport> {
    if candidates.is_empty() {
        return Err(Error::invalid("no candidate strategies"));
    }
    let run = |c: &Candidate| -> Result<(Toolpath, SimResult)> {
        let path = generate(zone, tool, vf, &c.params, ctx)?;
        let sim = simulate(&path, machine, vf)?;
        Ok((path, sim))
    };
    let results: Vec<Result<(Toolpath, SimResult)>> = candidates.par_iter().map(run).collect();
    let mut ranked = Vec::new();
    let mut failed = Vec::new();
    for (index, (c, res)) in candidates.iter().zip(results).enumerate() {
        match res {
            Ok((path, sim)) => {
                let mut flags = c.flags.clone();
                flags.extend(path.flags.iter().cloned());
                flags.dedup();
                ranked.push(RankedStrategy {
                    index,
                    params: c.params.clone(),
                    sim,
                    short_segment_ratio: short_segment_ratio(&path, rules.short_segment_mm),
                    move_count: path.moves.len(),
                    flags,
                });
            }
            Err(e) => failed.push(FailedStrategy {
                index,
                params: c.params.clone(),
                error: e.to_string(),
            }),
        }
    }
    if ranked.is_empty() {
        return Err(Error::NoViableStrategy(
            failed.iter().map(|f| format!("candidate {}: {}", f.index, f.error)).collect(),
        ));
    }
    ranked.sort_by(|a, b| {
        a.sim
            .time
            .total_cmp(&b.sim.time)
            .then(a.short_segment_ratio.total_cmp(&b.short_segment_ratio))
            .then(a.index.cmp(&b.index))
    });

    let mut rationale = vec![format!(
        "entry: {} pocket uses {}",
        closure_name(ctx.closure),
        entry_name(rules.entry_for(ctx.closure))
    )];
    let allowed = |r: &RankedStrategy| {
        !rules
            .overrides
            .iter()
            .any(|o| o.action == OverrideAction::Exclude && o.when.matches(ctx.closure, &r.params))
    };
    let preferred = rules
        .overrides
        .iter()
        .filter(|o| o.action == OverrideAction::Prefer)
        .find_map(|o| {
            ranked
                .iter()
                .find(|r| allowed(r) && o.when.matches(ctx.closure, &r.params))
                .map(|r| (r, o))
        });
    let pick = match preferred {
        Some((r, o)) => {
            rationale.push(format!("override: preferred candidate {} ({})", r.index, o.note));
            r
        }
        None => match ranked.iter().find(|r| allowed(r)) {
            Some(r) => {
                if r.index != ranked[0].index {
                    rationale.push(format!(
                        "override: candidate {} excluded by rule, next fastest is {}",
                        ranked[0].index, r.index
                    ));
                }
                rationale.push(format!("time: lowest simulated time {:.3} s", r.sim.time));
                r
            }
            None => {
                rationale.push("override: every candidate excluded, falling back to the fastest".to_string());
                &ranked[0]
            }
        },
    };
    if ranked.iter().filter(|r| r.sim.time == pick.sim.time).count() > 1 {
        rationale.push("tie: broken by short-segment ratio, then enumeration order".to_string());
    }
    if pick.flags.iter().any(|f| f == FLAG_CORNER_FEED) {
        rationale.push(format!("corners: {FLAG_CORNER_FEED}, radius clipped to the available clearance"));
    }
    Ok(StrategyReport {
        tool: tool.clone(),
        feed: vf,
        recommended: pick.params.clone(),
        recommended_index: pick.index,
        ranked,
        failed,
        rationale,
    })
}

fn closure_name(c: Closure) -> &'static str {
    match c {
        Closure::Closed => "closed",
        Closure::Open => "open",
        Closure::Corner => "corner",
    }
}

fn entry_name(e: EntryKind) -> &'static str {
    match e {
        EntryKind::TangentialFlank => "tangential_flank",
        EntryKind::SpiralPlunge => "spiral_plunge",
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Spiral => "spiral",
        Mode::Zigzag => "zigzag",
    }
}

fn link_name(l: LinkStyle) -> &'static str {
    match l {
        LinkStyle::Classic => "classic",
        LinkStyle::Hsm => "hsm",
    }
}

/// Region a tool clears for its assigned zone: reachable area near the zone,
/// opened so the tool fits everywhere.
pub fn tool_path_zone(machinable: &Region, zone: &Region, d: f64) -> Result<Region> {
    if zone.is_empty() {
        return Ok(Region::empty());
    }
    let reach = opening(machinable, d, DEFAULT_TOL)?;
    let near = offset_region(zone, d, DEFAULT_TOL)?;
    opening(&intersection(&reach, &near), d, DEFAULT_TOL)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PocketAdvice {
    pub class: PocketClass,
    pub decomposition: Decomposition,
    pub tools: Vec<StrategyReport>,
    /// Names of negative islands split off as separate pockets.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub promoted: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Full pipeline for one pocket: mask reserved features, pick tools by the
/// diameter dichotomy, then rank strategies for each tool's zone. `feed`
/// overrides each tool's own feed.
pub fn advise_pocket(
    pocket: &Pocket,
    catalog: &[Tool],
    machine: &MachineParams,
    feed: Option<f64>,
    rules: &Rules,
) -> Result<PocketAdvice> {
    validate_catalog(catalog)?;
    machine.validate()?;
    rules.validate()?;
    let mut pocket = pocket.clone();
    pocket.validate()?;
    let (parent, children) = promote_negative_islands(&pocket)?;
    let class = classify_pocket(&parent);
    let smallest = catalog.iter().map(|t| t.radius()).fold(f64::INFINITY, f64::min);
    let masked = mask_specific_entities(&parent, smallest)?;
    let bounds = diameter_bounds(&masked.machinable)?;
    let params = DichotomyParams {
        threshold: rules.threshold,
        ..DichotomyParams::for_catalog(catalog)
    };
    let decomposition = dichotomy_decompose(&masked.machinable, parent.depth, bounds, catalog, params)?;
    let ctx = PathContext {
        closure: class.closure,
        open_edges: parent.open_edge_segments(),
        depth: parent.depth,
    };
    let mut tools = Vec::new();
    let mut warnings = masked.warnings.clone();
    for tz in &decomposition.chosen {
        let zone = tool_path_zone(&masked.machinable, &tz.zone, tz.tool.diameter)?;
        if zone.is_empty() {
            warnings.push(format!("tool {} has nothing left to machine", tz.tool.diameter));
            continue;
        }
        let vf = feed.unwrap_or(tz.tool.vc_mm_s);
        let candidates = enumerate_strategies(&class, &zone, &tz.tool, machine, vf, rules);
        tools.push(rank(&zone, &candidates, &tz.tool, machine, vf, &ctx, rules)?);
    }
    Ok(PocketAdvice {
        class,
        decomposition,
        tools,
        promoted: children
            .iter()
            .enumerate()
            .map(|(i, c)| c.name.clone().unwrap_or_else(|| format!("island{i}")))
            .collect(),
        warnings,
    })
}

/// Markdown summary: ranking table and a mode x link-style time matrix.
pub fn report_markdown(title: &str, advice: &PocketAdvice) -> String {
    let mut s = String::new();
    let c = &advice.class;
    let _ = writeln!(s, "# {title}\n");
    let _ = writeln!(
        s,
        "Class: {}, floor {}, wall {}, islands: {}, specific entities: {}\n",
        closure_name(c.closure),
        format!("{:?}", c.floor).to_lowercase(),
        format!("{:?}", c.wall).to_lowercase(),
        c.has_islands,
        c.has_specific
    );
    let b = &advice.decomposition.bounds;
    let _ = writeln!(s, "Diameter bounds: D0 = {:.1} mm, Dx = {:.1} mm\n", b.d0, b.dx);
    for w in &advice.warnings {
        let _ = writeln!(s, "> warning: {w}\n");
    }
    for rep in &advice.tools {
        let _ = writeln!(s, "## Tool {} mm at {:.1} mm/s\n", rep.tool.diameter, rep.feed);
        let _ = writeln!(s, "| rank | mode | links | corner r (mm) | time (s) | CAM time (s) | short segments | flags |");
        let _ = writeln!(s, "|---|---|---|---|---|---|---|---|");
        for (k, r) in rep.ranked.iter().enumerate() {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {:.2} | {:.3} | {:.3} | {:.1}% | {} |",
                k + 1,
                mode_name(r.params.mode),
                link_name(r.params.links),
                r.params.corner_radius,
                r.sim.time,
                r.sim.cam_time,
                100.0 * r.short_segment_ratio,
                r.flags.join("; ")
            );
        }
        let _ = writeln!(s, "\nTime by mode and link style (s, sharp / rounded corners):\n");
        let _ = writeln!(s, "| mode | classic | hsm |");
        let _ = writeln!(s, "|---|---|---|");
        for mode in [Mode::Spiral, Mode::Zigzag] {
            let cell = |links: LinkStyle| {
                let pick = |rounded: bool| {
                    rep.ranked
                        .iter()
                        .find(|r| r.params.mode == mode && r.params.links == links && (r.params.corner_radius > 0.0) == rounded)
                        .map_or("-".to_string(), |r| format!("{:.3}", r.sim.time))
                };
                format!("{} / {}", pick(false), pick(true))
            };
            let _ = writeln!(s, "| {} | {} | {} |", mode_name(mode), cell(LinkStyle::Classic), cell(LinkStyle::Hsm));
        }
        let _ = writeln!(s, "\nRecommended: candidate {}.", rep.recommended_index);
        for line in &rep.rationale {
            let _ = writeln!(s, "- {line}");
        }
        for f in &rep.failed {
            let _ = writeln!(s, "- candidate {} failed: {}", f.index, f.error);
        }
        let _ = writeln!(s);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_radius_rule() {
        let m = MachineParams::default();
        let vf = 10_000.0 / 60.0;
        let (r, clipped) = recommended_corner_radius(vf, &m, 100.0, 0.5);
        assert!((r - vf * vf / 5000.0).abs() < 1e-12 && !clipped);
        assert_eq!(recommended_corner_radius(vf, &m, 3.0, 0.5), (3.0, true));
        let fast = MachineParams { a_max: 1e12, ..m };
        assert_eq!(recommended_corner_radius(vf, &fast, 100.0, 0.5), (0.5, false));
    }

    #[test]
    fn rules_round_trip_with_defaults() {
        let r: Rules = serde_json::from_str(r#"{"chord_tol":0.01}"#).unwrap();
        assert_eq!(r.chord_tol, Some(0.01));
        assert_eq!(r.modes.len(), 2);
        let back: Rules = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
