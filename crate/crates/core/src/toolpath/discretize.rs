use super::{Move, Toolpath};

/// Chords needed for a radius-`r` arc of `sweep` radians so that no chord
/// strays more than `tol` from the arc.
pub fn chord_count(r: f64, sweep: f64, tol: f64) -> usize {
    let step = if tol >= r {
        std::f64::consts::PI
    } else {
        (2.0 * (1.0 - tol / r).acos()).min(std::f64::consts::PI)
    };
    ((sweep / step) - 1e-9).ceil().max(1.0) as usize
}

/// Replaces every arc by chords within `tol`, interpolating z on helices.
pub fn discretize_arcs(path: &Toolpath, tol: f64) -> Toolpath {
    let mut out = Vec::with_capacity(path.moves.len() * 4);
    for m in &path.moves {
        if !m.is_arc() {
            out.push(*m);
            continue;
        }
        let n = chord_count(m.radius(), m.sweep(), tol);
        let mut prev = m.start;
        for k in 1..=n {
            let p = if k == n { m.end } else { m.point_at(k as f64 / n as f64) };
            out.push(Move::line(prev, p, m.intent));
            prev = p;
        }
    }
    Toolpath {
        moves: out,
        ..path.clone()
    }
}
