use super::{Intent, Move, MoveKind, Point3, Toolpath};

/// Tangent fillet between two cut lines meeting at `v`. Returns the trimmed
/// end of the first line, the arc, and the trimmed start of the second line.
fn fillet(a: &Move, b: &Move, radius: f64) -> Option<(Point3, Move, Point3)> {
    let v = a.end.xy();
    let (l1, l2) = (a.xy_length(), b.xy_length());
    if l1 < 1e-9 || l2 < 1e-9 {
        return None;
    }
    let d1 = (v - a.start.xy()) / l1;
    let d2 = (b.end.xy() - v) / l2;
    let theta = d1.cross(d2).atan2(d1.dot(d2));
    let turn = theta.abs();
    if turn < 1e-6 || turn > std::f64::consts::PI - 1e-6 {
        return None;
    }
    let half = (turn / 2.0).tan();
    let mut t = radius * half;
    let t_max = 0.5 * l1.min(l2);
    let mut rho = radius;
    if t > t_max {
        t = t_max;
        rho = t / half;
    }
    if rho < 1e-9 {
        return None;
    }
    let p1 = v - d1 * t;
    let p2 = v + d2 * t;
    let ccw = theta > 0.0;
    let n = if ccw { d1.perp() } else { -d1.perp() };
    let c = p1 + n * rho;
    let z = a.end.z;
    Some((
        Point3::at(p1, z),
        Move::arc(Point3::at(p1, z), Point3::at(p2, z), c, ccw, Intent::Cut),
        Point3::at(p2, z),
    ))
}

/// Rounds every corner between two straight cut moves with a tangent arc of
/// `radius`, shrunk where the legs are too short (each fillet may use at most
/// half of each leg).
pub fn cornerize(path: &Toolpath, radius: f64) -> Toolpath {
    if radius <= 0.0 || path.moves.len() < 2 {
        return path.clone();
    }
    let is_cut_line = |m: &Move| m.kind == MoveKind::Line && m.intent == Intent::Cut && (m.start.z - m.end.z).abs() < 1e-12;
    let mut out: Vec<Move> = Vec::with_capacity(path.moves.len() * 2);
    let mut pending_start: Option<Point3> = None;
    for i in 0..path.moves.len() {
        let mut m = path.moves[i];
        if let Some(s) = pending_start.take() {
            m.start = s;
        }
        let next = path.moves.get(i + 1);
        match next {
            Some(nx) if is_cut_line(&path.moves[i]) && is_cut_line(nx) && m.end.dist(nx.start) < 1e-9 => {
                // Leg lengths come from the original moves so both corners of a leg share it fairly.
                match fillet(&path.moves[i], nx, radius) {
                    Some((end, arc, start)) => {
                        m.end = end;
                        out.push(m);
                        out.push(arc);
                        pending_start = Some(start);
                    }
                    None => out.push(m),
                }
            }
            _ => out.push(m),
        }
    }
    Toolpath {
        moves: out,
        ..path.clone()
    }
}
