use pocketforge_core::geometry::{Point, Region};
use pocketforge_core::toolpath::Toolpath;

use super::raster::{rasterize, Grid, Mask};

/// Points every `step` along the moves that run at the lowest level.
pub fn floor_samples(path: &Toolpath, step: f64) -> Vec<Point> {
    let z = path.moves.iter().map(|m| m.end.z).fold(f64::INFINITY, f64::min);
    let mut pts = Vec::new();
    for m in &path.moves {
        if (m.start.z - z).abs() > 1e-9 || (m.end.z - z).abs() > 1e-9 {
            continue;
        }
        let n = (m.length() / step).ceil().max(1.0) as usize;
        pts.extend((0..=n).map(|k| m.point_at(k as f64 / n as f64).xy()));
    }
    pts
}

pub fn swept(path: &Toolpath, g: Grid) -> Mask {
    Mask::stamp_disks(g, &floor_samples(path, g.h / 2.0), path.tool.radius())
}

/// Share of the zone the tool sweeps, and swept area outside the zone.
pub fn coverage(zone: &Region, path: &Toolpath, h: f64) -> (f64, f64) {
    let g = Grid::around(zone, path.tool.radius() + 1.0, h);
    let z = rasterize(zone, g);
    let s = swept(path, g);
    (1.0 - z.and_not_area(&s) / z.area(), s.and_not_area(&z))
}
