use super::{Intent, LinkStyle, Move, MoveKind, Point3, Toolpath, HSM_MAX_LINK_STEPOVERS};
use crate::geometry::{Point, Region};

/// Arc leaving `p` along unit tangent `t` and ending at `q`; a line when the
/// three are collinear.
fn arc_through(p: Point, t: Point, q: Point, z: f64, intent: Intent) -> Move {
    let w = q - p;
    let cross = t.cross(w);
    if cross.abs() < 1e-9 * w.norm_sq().max(1e-12) {
        return Move::line(Point3::at(p, z), Point3::at(q, z), intent);
    }
    let rho = w.norm_sq() / (2.0 * cross);
    let c = p + t.perp() * rho;
    Move::arc(Point3::at(p, z), Point3::at(q, z), c, cross > 0.0, intent)
}

/// Two tangent-continuous arcs from `a` (unit tangent `ta`) to `b` (unit
/// tangent `tb`), with equal control-leg lengths.
pub fn biarc(a: Point, ta: Point, b: Point, tb: Point, z: f64, intent: Intent) -> Vec<Move> {
    let v = b - a;
    let vv = v.norm_sq();
    if vv < 1e-18 {
        return vec![];
    }
    let t = ta + tb;
    let vt = v.dot(t);
    let denom = 4.0 - t.norm_sq();
    let d = if denom.abs() < 1e-12 {
        if vt <= 1e-12 {
            return vec![Move::line(Point3::at(a, z), Point3::at(b, z), intent)];
        }
        vv / (2.0 * vt)
    } else {
        (-vt + (vt * vt + denom * vv).sqrt()) / denom
    };
    let j = a + ta * d;
    let k = b - tb * d;
    let m = (j + k) * 0.5;
    let tm = (k - j).normalized();
    if (k - j).norm() < 1e-12 {
        return vec![Move::line(Point3::at(a, z), Point3::at(b, z), intent)];
    }
    vec![arc_through(a, ta, m, z, intent), arc_through(m, tm, b, z, intent)]
}

fn samples(m: &Move, n: usize) -> impl Iterator<Item = Point> + '_ {
    (0..=n).map(move |i| m.point_at(i as f64 / n as f64).xy())
}

/// Replaces each short straight link between two cut moves by a tangent
/// biarc (a semicircle for the usual stepover between antiparallel passes).
/// With a `zone`, a blend whose tool centre would leave the zone is dropped
/// in favour of the straight link and reported in `flags`.
pub fn hsm_links(path: &Toolpath, style: LinkStyle, stepover: f64, zone: Option<&Region>) -> Toolpath {
    if style == LinkStyle::Classic {
        return path.clone();
    }
    let max_len = HSM_MAX_LINK_STEPOVERS * stepover;
    let mut out: Vec<Move> = Vec::with_capacity(path.moves.len() + 8);
    let mut flags = path.flags.clone();
    let ms = &path.moves;
    for i in 0..ms.len() {
        let m = ms[i];
        let blendable = m.kind == MoveKind::Line
            && m.intent == Intent::Link
            && i > 0
            && i + 1 < ms.len()
            && ms[i - 1].intent == Intent::Cut
            && ms[i + 1].intent == Intent::Cut
            && (m.start.z - m.end.z).abs() < 1e-12
            && m.length() <= max_len + 1e-9;
        if !blendable {
            out.push(m);
            continue;
        }
        let ta = ms[i - 1].tangent_xy(true);
        let tb = ms[i + 1].tangent_xy(false);
        let blend = biarc(m.start.xy(), ta, m.end.xy(), tb, m.start.z, Intent::Link);
        let inside = zone.is_none_or(|z| blend.iter().all(|b| samples(b, 16).all(|p| z.contains(p) || z.boundary_distance(p) < 1e-6)));
        if blend.is_empty() || !inside {
            if !inside {
                flags.push(format!("hsm link {i} leaves the zone; kept straight"));
            }
            out.push(m);
        } else {
            out.extend(blend);
        }
    }
    Toolpath {
        moves: out,
        flags,
        ..path.clone()
    }
}
