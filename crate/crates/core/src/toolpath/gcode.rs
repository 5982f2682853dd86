use std::fmt::Write;

use super::{MoveKind, Toolpath};

/// Linear and circular interpolation blocks, absolute millimetres, four decimals.
pub fn to_gcode(path: &Toolpath) -> String {
    let mut s = String::new();
    let feed = path.feed * 60.0;
    let _ = writeln!(s, "G21 G90 G17");
    let Some(first) = path.moves.first() else {
        return s;
    };
    let _ = writeln!(
        s,
        "G1 X{:.4} Y{:.4} Z{:.4} F{:.4}",
        first.start.x, first.start.y, first.start.z, feed
    );
    let mut z = first.start.z;
    for m in &path.moves {
        let word = match m.kind {
            MoveKind::Line => "G1",
            MoveKind::ArcCw => "G2",
            MoveKind::ArcCcw => "G3",
        };
        let _ = write!(s, "{word} X{:.4} Y{:.4}", m.end.x, m.end.y);
        if (m.end.z - z).abs() > 1e-12 {
            let _ = write!(s, " Z{:.4}", m.end.z);
            z = m.end.z;
        }
        if let Some(c) = m.center {
            let _ = write!(s, " I{:.4} J{:.4}", c.x - m.start.x, c.y - m.start.y);
        }
        let _ = writeln!(s, " F{feed:.4}");
    }
    s
}
