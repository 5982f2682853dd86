use pocketforge_core::geometry::{union_all, Point, PolygonWithHoles, Region};
use rand::Rng;

pub fn poly(pts: &[(f64, f64)]) -> PolygonWithHoles {
    PolygonWithHoles::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect(), vec![])
}

pub fn square(s: f64) -> Region {
    Region::rect(0.0, 0.0, s, s)
}

/// Two `lobe` x `lobe` squares joined by a centred channel.
pub fn dumbbell(lobe: f64, channel_w: f64, channel_len: f64) -> Region {
    let y0 = (lobe - channel_w) / 2.0;
    let y1 = y0 + channel_w;
    let x1 = lobe + channel_len;
    let x2 = x1 + lobe;
    Region::from_part(poly(&[
        (0.0, 0.0),
        (lobe, 0.0),
        (lobe, y0),
        (x1, y0),
        (x1, 0.0),
        (x2, 0.0),
        (x2, lobe),
        (x1, lobe),
        (x1, y1),
        (lobe, y1),
        (lobe, lobe),
        (0.0, lobe),
    ]))
}

/// 20x20 square with its top-right 10x10 corner removed.
pub fn l_shape() -> Region {
    Region::from_part(poly(&[
        (0.0, 0.0),
        (20.0, 0.0),
        (20.0, 10.0),
        (10.0, 10.0),
        (10.0, 20.0),
        (0.0, 20.0),
    ]))
}

/// 20x20 square with a 20-long, 10-wide limb on its right side.
pub fn square_with_limb() -> Region {
    Region::from_part(poly(&[
        (0.0, 0.0),
        (40.0, 0.0),
        (40.0, 10.0),
        (20.0, 10.0),
        (20.0, 20.0),
        (0.0, 20.0),
    ]))
}

pub fn regular_polygon(n: usize, circumradius: f64, c: Point) -> Region {
    let pts = (0..n)
        .map(|k| c + Point::from_angle(2.0 * std::f64::consts::PI * k as f64 / n as f64) * circumradius)
        .collect();
    Region::from_part(PolygonWithHoles::new(pts, vec![]))
}

/// Union of 2 to 4 integer rectangles that all contain the point (15, 15); the
/// result is one simple rectilinear polygon without holes. Retries until it has
/// at most `max_vertices` vertices.
pub fn random_rectilinear(rng: &mut impl Rng, max_vertices: usize) -> Region {
    loop {
        let n = rng.gen_range(2..=4);
        let rects: Vec<Region> = (0..n)
            .map(|_| {
                let x0 = rng.gen_range(0..15) as f64;
                let y0 = rng.gen_range(0..15) as f64;
                let x1 = rng.gen_range(16..31) as f64;
                let y1 = rng.gen_range(16..31) as f64;
                Region::rect(x0, y0, x1, y1)
            })
            .collect();
        let u = union_all(rects.iter());
        if u.parts.len() == 1 && u.parts[0].holes.is_empty() && u.parts[0].outer.len() <= max_vertices {
            return u;
        }
    }
}

/// Three radius-22 disks joined by an 80 x 30 bar: a multi-lobe pocket
/// outline made of long arcs and short straight runs.
pub fn lobes() -> Region {
    let bar = Region::rect(25.0, 15.0, 105.0, 45.0);
    let disks: Vec<Region> = [(25.0, 30.0), (65.0, 45.0), (105.0, 30.0)]
        .iter()
        .map(|&(x, y)| regular_polygon(256, 22.0, Point::new(x, y)))
        .collect();
    union_all(std::iter::once(&bar).chain(disks.iter()))
}
