//! Pixel-grid reference implementation of the morphological operations.
//!
//! Membership is decided at pixel centres with an even-odd crossing test and
//! distances come from an exact Euclidean distance transform, so nothing here
//! shares code with the polygon offsetter under test.

use pocketforge_core::geometry::{Point, Region};

#[derive(Debug, Clone, Copy)]
pub struct Grid {
    pub x0: f64,
    pub y0: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    /// Covers the region's bounding box plus `margin`, with the origin on a multiple of `h`.
    pub fn around(r: &Region, margin: f64, h: f64) -> Grid {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for l in r.loops() {
            for p in l {
                x0 = x0.min(p.x);
                y0 = y0.min(p.y);
                x1 = x1.max(p.x);
                y1 = y1.max(p.y);
            }
        }
        let x0 = ((x0 - margin) / h).floor() * h;
        let y0 = ((y0 - margin) / h).floor() * h;
        Grid {
            x0,
            y0,
            h,
            nx: ((x1 + margin - x0) / h).ceil() as usize + 1,
            ny: ((y1 + margin - y0) / h).ceil() as usize + 1,
        }
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.x0 + (i as f64 + 0.5) * self.h,
            self.y0 + (j as f64 + 0.5) * self.h,
        )
    }
}

#[derive(Debug, Clone)]
pub struct Mask {
    pub g: Grid,
    pub cells: Vec<bool>,
}

pub fn rasterize(r: &Region, g: Grid) -> Mask {
    let mut cells = vec![false; g.nx * g.ny];
    let edges: Vec<(Point, Point)> = r
        .loops()
        .flat_map(|l| (0..l.len()).map(move |i| (l[i], l[(i + 1) % l.len()])))
        .collect();
    for j in 0..g.ny {
        let y = g.y0 + (j as f64 + 0.5) * g.h;
        let mut xs: Vec<f64> = edges
            .iter()
            .filter(|(a, b)| (a.y > y) != (b.y > y))
            .map(|(a, b)| a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y))
            .collect();
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks_exact(2) {
            let i0 = ((pair[0] - g.x0) / g.h - 0.5).ceil().max(0.0) as usize;
            let i1 = ((pair[1] - g.x0) / g.h - 0.5).floor();
            if i1 < 0.0 {
                continue;
            }
            for i in i0..=(i1 as usize).min(g.nx - 1) {
                cells[j * g.nx + i] = !cells[j * g.nx + i];
            }
        }
    }
    Mask { g, cells }
}

fn dt1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let mut first = None;
    for q in 0..n {
        if f[q].is_finite() {
            first = Some(q);
            break;
        }
    }
    let Some(q0) = first else {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    };
    v[0] = q0;
    for q in q0 + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Squared distance, in pixels, from every pixel centre to the nearest centre where `target` holds.
pub fn edt(nx: usize, ny: usize, target: impl Fn(usize) -> bool) -> Vec<f64> {
    let mut d = vec![0f64; nx * ny];
    let mut col = vec![0f64; ny];
    let mut colout = vec![0f64; ny];
    for i in 0..nx {
        for j in 0..ny {
            col[j] = if target(j * nx + i) { 0.0 } else { f64::INFINITY };
        }
        dt1d(&col, &mut colout);
        for j in 0..ny {
            d[j * nx + i] = colout[j];
        }
    }
    let mut row = vec![0f64; nx];
    for j in 0..ny {
        dt1d(&d[j * nx..(j + 1) * nx], &mut row);
        d[j * nx..(j + 1) * nx].copy_from_slice(&row);
    }
    d
}

impl Mask {
    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 * self.g.h * self.g.h
    }

    /// Pixels whose centre lies at least `r` from the complement; the boundary
    /// is taken halfway between inside and outside centres.
    pub fn erode(&self, r: f64) -> Mask {
        let g = self.g;
        let d = edt(g.nx, g.ny, |k| !self.cells[k]);
        let cells = d
            .iter()
            .zip(&self.cells)
            .map(|(&d2, &c)| c && d2.sqrt() * g.h - g.h / 2.0 >= r - 1e-9)
            .collect();
        Mask { g, cells }
    }

    pub fn dilate(&self, r: f64) -> Mask {
        let g = self.g;
        let d = edt(g.nx, g.ny, |k| self.cells[k]);
        let cells = d
            .iter()
            .map(|&d2| d2.sqrt() * g.h <= r + g.h / 2.0 + 1e-9)
            .collect();
        Mask { g, cells }
    }

    pub fn open(&self, d: f64) -> Mask {
        self.erode(d / 2.0).dilate(d / 2.0)
    }

    pub fn xor_area(&self, o: &Mask) -> f64 {
        let n = self.cells.iter().zip(&o.cells).filter(|(a, b)| a != b).count();
        n as f64 * self.g.h * self.g.h
    }

    pub fn and_not_area(&self, o: &Mask) -> f64 {
        let n = self.cells.iter().zip(&o.cells).filter(|(a, b)| **a && !**b).count();
        n as f64 * self.g.h * self.g.h
    }

    pub fn union(&self, o: &Mask) -> Mask {
        Mask {
            g: self.g,
            cells: self.cells.iter().zip(&o.cells).map(|(a, b)| *a || *b).collect(),
        }
    }

    /// 4-connected components.
    pub fn components(&self) -> usize {
        let g = self.g;
        let mut seen = vec![false; self.cells.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.cells.len() {
            if !self.cells[start] || seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(k) = stack.pop() {
                let (i, j) = (k % g.nx, k / g.nx);
                let mut nb = Vec::with_capacity(4);
                if i > 0 {
                    nb.push(k - 1);
                }
                if i + 1 < g.nx {
                    nb.push(k + 1);
                }
                if j > 0 {
                    nb.push(k - g.nx);
                }
                if j + 1 < g.ny {
                    nb.push(k + g.nx);
                }
                for n in nb {
                    if self.cells[n] && !seen[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
        }
        count
    }

    /// Marks every pixel whose centre lies within `r` of some point of `pts`.
    pub fn stamp_disks(g: Grid, pts: &[Point], r: f64) -> Mask {
        let mut cells = vec![false; g.nx * g.ny];
        let rp = (r / g.h).ceil() as isize + 1;
        for p in pts {
            let ci = ((p.x - g.x0) / g.h - 0.5).round() as isize;
            let cj = ((p.y - g.y0) / g.h - 0.5).round() as isize;
            for j in (cj - rp).max(0)..=(cj + rp).min(g.ny as isize - 1) {
                for i in (ci - rp).max(0)..=(ci + rp).min(g.nx as isize - 1) {
                    if g.center(i as usize, j as usize).dist(*p) <= r {
                        cells[j as usize * g.nx + i as usize] = true;
                    }
                }
            }
        }
        Mask { g, cells }
    }
}

/// Largest inscribed radius estimated as the maximum distance-to-outside over the grid.
pub fn inscribed_radius(m: &Mask) -> f64 {
    let g = m.g;
    let d = edt(g.nx, g.ny, |k| !m.cells[k]);
    d.iter().cloned().fold(0.0, f64::max).sqrt() * g.h - g.h / 2.0
}
