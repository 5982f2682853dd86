//! Look-ahead feed planning and machining time estimation.
//!
//! The path is cut into blocks (one per move). Each block gets a speed cap
//! (programmed feed, centripetal limit on arcs), each junction a cap from the
//! per-axis velocity jump allowance and from how far ahead the controller can
//! see. Runs of blocks with equal caps and transparent junctions are planned
//! as one segment; segment boundary speeds come from forward and backward
//! passes, and each segment is an accelerate/cruise/decelerate profile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::toolpath::{path_length, segment_histogram, MoveKind, Toolpath, DEFAULT_BIN_EDGES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccelMode {
    Brisk,
    Soft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineParams {
    /// mm/s²
    pub a_max: f64,
    /// mm/s³, used in soft mode.
    pub jerk: f64,
    #[serde(rename = "mode", alias = "accel_mode")]
    pub accel_mode: AccelMode,
    /// Number of blocks the controller sees ahead.
    pub lookahead: usize,
    pub anticipation: bool,
    /// Per-axis velocity jump allowed at a junction, mm/s.
    pub corner_dv: f64,
    /// Minimum time the controller spends on one block, s. Zero disables the cap.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub block_time: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl Default for MachineParams {
    fn default() -> Self {
        MachineParams {
            a_max: 5000.0,
            jerk: 100_000.0,
            accel_mode: AccelMode::Brisk,
            lookahead: 50,
            anticipation: true,
            corner_dv: 20.0,
            block_time: 0.0,
        }
    }
}

impl MachineParams {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.a_max) {
            return Err(Error::invalid("a_max must be positive"));
        }
        if self.accel_mode == AccelMode::Soft && !pos(self.jerk) {
            return Err(Error::invalid("jerk must be positive in soft mode"));
        }
        if self.lookahead < 1 {
            return Err(Error::invalid("lookahead must be at least 1"));
        }
        if !(self.corner_dv >= 0.0 && self.corner_dv.is_finite()) {
            return Err(Error::invalid("corner_dv must be non-negative"));
        }
        if !(self.block_time >= 0.0 && self.block_time.is_finite()) {
            return Err(Error::invalid("block_time must be non-negative"));
        }
        Ok(())
    }
}

/// Highest feed an arc of radius `r` sustains at acceleration `a_max`.
pub fn arc_feed_limit(r: f64, vf: f64, a_max: f64) -> f64 {
    vf.min((r * a_max).sqrt())
}

/// Largest speed through a junction keeping each axis's velocity jump within
/// `corner_dv`; `v` when the directions agree.
pub fn corner_speed_limit(dir_in: [f64; 3], dir_out: [f64; 3], v: f64, machine: &MachineParams) -> f64 {
    let jump = (0..3)
        .map(|k| (dir_out[k] - dir_in[k]).abs())
        .fold(0.0, f64::max);
    if jump < 1e-12 {
        v
    } else {
        v.min(machine.corner_dv / jump)
    }
}

/// Speed change from `v0` to `v1` with zero acceleration at both ends.
#[derive(Debug, Clone, Copy)]
struct Transition {
    v0: f64,
    v1: f64,
    /// Peak acceleration reached.
    ap: f64,
    /// Jerk phase duration (zero in brisk mode).
    tj: f64,
    /// Constant acceleration duration.
    ta: f64,
    jerk: f64,
}

impl Transition {
    fn new(v0: f64, v1: f64, m: &MachineParams) -> Self {
        let (lo, hi) = (v0.min(v1), v0.max(v1));
        let dv = hi - lo;
        let a = m.a_max;
        match m.accel_mode {
            AccelMode::Brisk => Transition { v0: lo, v1: hi, ap: a, tj: 0.0, ta: dv / a, jerk: f64::INFINITY },
            AccelMode::Soft => {
                let j = m.jerk;
                if dv <= a * a / j {
                    let tj = (dv / j).sqrt();
                    Transition { v0: lo, v1: hi, ap: j * tj, tj, ta: 0.0, jerk: j }
                } else {
                    Transition { v0: lo, v1: hi, ap: a, tj: a / j, ta: dv / a - a / j, jerk: j }
                }
            }
        }
    }

    fn time(&self) -> f64 {
        2.0 * self.tj + self.ta
    }

    fn dist(&self) -> f64 {
        // The profile is point-symmetric, so the mean speed is the midpoint.
        0.5 * (self.v0 + self.v1) * self.time()
    }

    /// (position, speed, acceleration) at time `t` of the accelerating version.
    fn state(&self, t: f64) -> (f64, f64, f64) {
        let (tj, ta, ap, j) = (self.tj, self.ta, self.ap, self.jerk);
        let total = self.time();
        let t = t.clamp(0.0, total);
        if tj > 0.0 && t < tj {
            return (self.v0 * t + j * t * t * t / 6.0, self.v0 + 0.5 * j * t * t, j * t);
        }
        let x1 = if tj > 0.0 { self.v0 * tj + j * tj * tj * tj / 6.0 } else { 0.0 };
        let v1 = self.v0 + 0.5 * ap * tj;
        if t < tj + ta {
            let u = t - tj;
            return (x1 + v1 * u + 0.5 * ap * u * u, v1 + ap * u, ap);
        }
        let u = total - t;
        if tj > 0.0 {
            (self.dist() - (self.v1 * u - j * u * u * u / 6.0), self.v1 - 0.5 * j * u * u, j * u)
        } else {
            (self.dist(), self.v1, 0.0)
        }
    }

    /// Speed and acceleration after distance `s` along the accelerating version.
    fn at_dist(&self, s: f64) -> (f64, f64) {
        let d = self.dist();
        if s <= 0.0 || d <= 0.0 {
            let (_, v, a) = self.state(0.0);
            return (v, a);
        }
        if s >= d {
            return (self.v1, 0.0);
        }
        let (mut lo, mut hi) = (0.0, self.time());
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.state(mid).0 < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (_, v, a) = self.state(0.5 * (lo + hi));
        (v, a)
    }
}

/// Highest speed reachable from `v0` within distance `d`, ending with zero acceleration.
fn reach(v0: f64, d: f64, m: &MachineParams) -> f64 {
    if d <= 0.0 {
        return v0;
    }
    match m.accel_mode {
        AccelMode::Brisk => (v0 * v0 + 2.0 * m.a_max * d).sqrt(),
        AccelMode::Soft => {
            let (a, j) = (m.a_max, m.jerk);
            let dv_knee = a * a / j;
            let d_knee = (2.0 * v0 + dv_knee) * (dv_knee / j).sqrt();
            if d <= d_knee {
                // With u = sqrt(dv): u^3 + 2 v0 u - d sqrt(j) = 0, increasing in u.
                let f = |u: f64| u * u * u + 2.0 * v0 * u - d * j.sqrt();
                let (mut lo, mut hi) = (0.0, dv_knee.sqrt());
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let u = 0.5 * (lo + hi);
                v0 + u * u
            } else {
                // d = (2 v0 + dv)/2 * (dv/a + a/j): quadratic in dv.
                let qa = 1.0 / (2.0 * a);
                let qb = v0 / a + a / (2.0 * j);
                let qc = v0 * a / j - d;
                let dv = (-qb + (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa);
                v0 + dv
            }
        }
    }
}

/// One planned stretch of constant cap: speed goes `v_start -> peak -> v_end`.
#[derive(Debug, Clone, Copy)]
struct Segment {
    s0: f64,
    length: f64,
    up: Transition,
    down: Transition,
    peak: f64,
    /// Distance where the up transition ends.
    d_up: f64,
    /// Distance where the down transition starts.
    d_down: f64,
    time: f64,
}

impl Segment {
    fn plan(s0: f64, length: f64, vs: f64, ve: f64, cap: f64, m: &MachineParams) -> Self {
        let fits = |vp: f64| Transition::new(vs, vp, m).dist() + Transition::new(vp, ve, m).dist() <= length;
        let floor = vs.max(ve);
        let peak = if fits(cap) {
            cap
        } else if !fits(floor) {
            floor
        } else {
            let (mut lo, mut hi) = (floor, cap);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if fits(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        let up = Transition::new(vs, peak, m);
        let down = Transition::new(peak, ve, m);
        let (du, dd) = (up.dist(), down.dist());
        let cruise = (length - du - dd).max(0.0);
        let time = if du + dd > length && du + dd > 0.0 {
            // Boundary speeds only just out of reach (rounding): scale the transition.
            (up.time() + down.time()) * length / (du + dd)
        } else {
            up.time() + down.time() + if peak > 0.0 { cruise / peak } else { 0.0 }
        };
        Segment { s0, length, up, down, peak, d_up: du, d_down: length - dd, time }
    }

    fn speed_accel(&self, s: f64) -> (f64, f64) {
        let s = s - self.s0;
        if s < self.d_up {
            self.up.at_dist(s)
        } else if s <= self.d_down {
            (self.peak, 0.0)
        } else {
            let (v, a) = self.down.at_dist(self.length - s);
            (v, -a)
        }
    }
}

/// A planned feed profile along the path's arc length.
#[derive(Debug, Clone)]
pub struct VelocityPlan {
    segments: Vec<Segment>,
    /// Speed at each segment boundary.
    boundaries: Vec<f64>,
    pub length: f64,
    pub time: f64,
}

impl VelocityPlan {
    fn locate(&self, s: f64) -> Option<&Segment> {
        let i = self.segments.partition_point(|g| g.s0 + g.length < s);
        self.segments.get(i.min(self.segments.len().saturating_sub(1)))
    }

    /// Planned speed at arc length `s`.
    pub fn speed_at(&self, s: f64) -> f64 {
        self.locate(s).map_or(0.0, |g| g.speed_accel(s).0)
    }

    /// Planned tangential acceleration at arc length `s`.
    pub fn accel_at(&self, s: f64) -> f64 {
        self.locate(s).map_or(0.0, |g| g.speed_accel(s).1)
    }

    /// `n` evenly spaced (arc length, speed) pairs including both ends.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64)> {
        let n = n.max(2);
        (0..n)
            .map(|k| {
                let s = self.length * k as f64 / (n - 1) as f64;
                (s, self.speed_at(s))
            })
            .collect()
    }

    /// Lowest speed at an interior segment boundary or plateau.
    pub fn min_speed(&self) -> f64 {
        if self.segments.is_empty() {
            return 0.0;
        }
        let inner = &self.boundaries[1..self.boundaries.len() - 1];
        inner
            .iter()
            .copied()
            .chain(self.segments.iter().map(|g| g.peak))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Per-block speed caps and junction caps (`junction[i]` sits before block `i`;
/// the first and last entries are the rest conditions).
#[derive(Debug, Clone, PartialEq)]
pub struct Caps {
    pub lengths: Vec<f64>,
    pub block: Vec<f64>,
    pub junction: Vec<f64>,
}

const MIN_BLOCK: f64 = 1e-9;

pub fn speed_caps(path: &Toolpath, machine: &MachineParams, vf: f64) -> Caps {
    let moves: Vec<_> = path.moves.iter().filter(|m| m.length() > MIN_BLOCK).collect();
    let n = moves.len();
    let lengths: Vec<f64> = moves.iter().map(|m| m.length()).collect();
    let axial = |k: usize| moves[k].kind == MoveKind::Line && moves[k].xy_length() <= MIN_BLOCK;
    let block: Vec<f64> = moves
        .iter()
        .zip(&lengths)
        .map(|(m, &l)| {
            let mut c = if m.is_arc() { arc_feed_limit(m.radius(), vf, machine.a_max) } else { vf };
            if machine.block_time > 0.0 {
                c = c.min(l / machine.block_time);
            }
            c
        })
        .collect();
    let mut prefix = vec![0.0; n + 1];
    for k in 0..n {
        prefix[k + 1] = prefix[k] + lengths[k];
    }
    let mut junction = vec![0.0; n + 1];
    for k in 1..n {
        if !machine.anticipation || axial(k - 1) || axial(k) {
            continue;
        }
        let v = block[k - 1].min(block[k]);
        let v = corner_speed_limit(moves[k - 1].tangent_at(1.0), moves[k].tangent_at(0.0), v, machine);
        let seen = prefix[(k + machine.lookahead).min(n)] - prefix[k];
        junction[k] = v.min(reach(0.0, seen, machine));
    }
    Caps { lengths, block, junction }
}

/// Plans the feed profile for `path` at programmed feed `vf`, rest to rest.
pub fn plan_profile(path: &Toolpath, machine: &MachineParams, vf: f64) -> Result<VelocityPlan> {
    machine.validate()?;
    if !(vf > 0.0 && vf.is_finite()) {
        return Err(Error::invalid("feed must be positive"));
    }
    path.check_continuity()?;
    let caps = speed_caps(path, machine, vf);
    let n = caps.lengths.len();
    // Merge blocks joined by transparent junctions with equal caps.
    let mut runs: Vec<(f64, f64, f64)> = Vec::new(); // (start, length, cap)
    let mut bound_caps = vec![0.0];
    let mut s = 0.0;
    for k in 0..n {
        let (l, c) = (caps.lengths[k], caps.block[k]);
        let transparent = k > 0 && {
            let prev = runs.last().expect("run").2;
            (prev - c).abs() <= 1e-12 * c && caps.junction[k] >= c * (1.0 - 1e-12)
        };
        if transparent {
            runs.last_mut().expect("run").1 += l;
        } else {
            if k > 0 {
                bound_caps.push(caps.junction[k]);
            }
            runs.push((s, l, c));
        }
        s += l;
    }
    bound_caps.push(0.0);
    let m = runs.len();
    let mut w = bound_caps.clone();
    if m > 0 {
        for k in 0..m {
            w[k + 1] = w[k + 1].min(reach(w[k], runs[k].1, machine)).min(runs[k].2);
        }
        for k in (0..m).rev() {
            w[k] = w[k].min(reach(w[k + 1], runs[k].1, machine));
        }
    }
    let segments: Vec<Segment> = runs
        .iter()
        .enumerate()
        .map(|(k, &(s0, l, c))| Segment::plan(s0, l, w[k], w[k + 1], c, machine))
        .collect();
    let time = segments.iter().map(|g| g.time).sum();
    Ok(VelocityPlan { segments, boundaries: w, length: s, time })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub min_mm: f64,
    /// Open-ended when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_mm: Option<f64>,
    pub count: usize,
}

pub fn histogram_bins(path: &Toolpath) -> Vec<HistogramBin> {
    segment_histogram(path, &DEFAULT_BIN_EDGES)
        .into_iter()
        .zip(DEFAULT_BIN_EDGES.windows(2))
        .map(|(count, w)| HistogramBin {
            min_mm: w[0],
            max_mm: w[1].is_finite().then_some(w[1]),
            count,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// Planned machining time, s.
    pub time: f64,
    /// Path length over programmed feed, s.
    pub cam_time: f64,
    /// (arc length mm, speed mm/s) samples.
    pub profile: Vec<(f64, f64)>,
    pub min_speed: f64,
    pub histogram: Vec<HistogramBin>,
}

/// Profile sample count: one per millimetre, at least 200.
pub fn sample_count(length: f64) -> usize {
    ((length.ceil() as usize) + 1).max(200)
}

pub fn simulate(path: &Toolpath, machine: &MachineParams, vf: f64) -> Result<SimResult> {
    let plan = plan_profile(path, machine, vf)?;
    Ok(SimResult {
        time: plan.time,
        cam_time: path_length(path).total / vf,
        profile: plan.samples(sample_count(plan.length)),
        min_speed: plan.min_speed(),
        histogram: histogram_bins(path),
    })
}
