//! Polygon booleans, backed by `i_overlay`.

use i_overlay::core::fill_rule::FillRule;
use i_overlay::core::overlay_rule::OverlayRule;
use i_overlay::core::solver::Solver;
use i_overlay::float::overlay::{FloatOverlay, OverlayOptions};

use super::point::Point;
use super::polygon::{dedup_ring, signed_area, PolygonWithHoles, Region};

type Contour = Vec<[f64; 2]>;
type Shape = Vec<Contour>;

/// Contours with an area below this are treated as numerical debris.
const MIN_AREA: f64 = 1e-9;

fn options() -> OverlayOptions<f64> {
    let mut o = OverlayOptions::default();
    o.min_output_area = MIN_AREA;
    o
}

fn ring_to_contour(r: &[Point]) -> Contour {
    r.iter().map(|&p| p.into()).collect()
}

fn to_shapes(r: &Region) -> Vec<Shape> {
    r.parts
        .iter()
        .map(|p| p.loops().map(|l| ring_to_contour(l)).collect())
        .collect()
}

fn from_shapes(shapes: Vec<Shape>) -> Region {
    let mut parts = Vec::with_capacity(shapes.len());
    for shape in shapes {
        let mut loops = shape
            .into_iter()
            .map(|c| dedup_ring(&c.into_iter().map(Point::from).collect::<Vec<_>>()))
            .filter(|r| r.len() >= 3 && signed_area(r).abs() > MIN_AREA);
        let Some(outer) = loops.next() else { continue };
        if signed_area(&outer) <= 0.0 {
            continue;
        }
        let holes = loops.collect();
        parts.push(PolygonWithHoles::new(outer, holes));
    }
    Region { parts }
}

fn binary(a: &Region, b: &Region, rule: OverlayRule) -> Region {
    let (sa, sb) = (to_shapes(a), to_shapes(b));
    if sa.is_empty() && sb.is_empty() {
        return Region::empty();
    }
    let shapes = FloatOverlay::<[f64; 2]>::from_subj_and_clip_custom(&sa, &sb, options(), Solver::AUTO)
        .overlay(rule, FillRule::NonZero);
    from_shapes(shapes)
}

pub fn union(a: &Region, b: &Region) -> Region {
    binary(a, b, OverlayRule::Union)
}

pub fn intersection(a: &Region, b: &Region) -> Region {
    if a.is_empty() || b.is_empty() {
        return Region::empty();
    }
    binary(a, b, OverlayRule::Intersect)
}

pub fn difference(a: &Region, b: &Region) -> Region {
    if a.is_empty() {
        return Region::empty();
    }
    binary(a, b, OverlayRule::Difference)
}

pub fn symmetric_difference(a: &Region, b: &Region) -> Region {
    binary(a, b, OverlayRule::Xor)
}

pub fn union_all<'a>(regions: impl IntoIterator<Item = &'a Region>) -> Region {
    let shapes: Vec<Shape> = regions.into_iter().flat_map(to_shapes).collect();
    fill(shapes, FillRule::NonZero)
}

/// Resolves arbitrary, possibly self-intersecting loops: a point belongs to the
/// result when the winding number of the loops around it is positive.
pub fn fill_positive(loops: &[Vec<Point>]) -> Region {
    let shapes: Vec<Shape> = loops.iter().map(|l| vec![ring_to_contour(l)]).collect();
    fill(shapes, FillRule::Positive)
}

fn fill(shapes: Vec<Shape>, rule: FillRule) -> Region {
    if shapes.is_empty() {
        return Region::empty();
    }
    let out = FloatOverlay::<[f64; 2]>::from_subj_custom(&shapes, options(), Solver::AUTO)
        .overlay(OverlayRule::Subject, rule);
    from_shapes(out)
}
