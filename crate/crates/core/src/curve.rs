//! Ordered polylines in the plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered polyline. A closed curve does not repeat its first point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathCurve {
    pub points: Vec<Complex64>,
    pub closed: bool,
}

impl PathCurve {
    pub fn open(points: Vec<Complex64>) -> Self {
        PathCurve { points, closed: false }.dedup()
    }

    pub fn closed(points: Vec<Complex64>) -> Self {
        let mut c = PathCurve { points, closed: true }.dedup();
        while c.points.len() > 1 && c.points.first() == c.points.last() {
            c.points.pop();
        }
        c
    }

    fn dedup(mut self) -> Self {
        self.points.dedup();
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Segments, including the closing one for closed curves.
    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.points.len();
        let m = if self.closed && n > 1 { n } else { n.saturating_sub(1) };
        (0..m).map(move |k| (self.points[k], self.points[(k + 1) % n]))
    }

    pub fn arclength(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn min_segment(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Winding number of the closed curve around `p`.
    pub fn winding_number(&self, p: Complex64) -> i64 {
        let mut total = 0.0;
        let n = self.points.len();
        for k in 0..n {
            let a = self.points[k] - p;
            let b = self.points[(k + 1) % n] - p;
            total += (b / a).arg();
        }
        (total / std::f64::consts::TAU).round() as i64
    }

    pub fn conj(&self) -> PathCurve {
        PathCurve {
            points: self.points.iter().map(|z| z.conj()).collect(),
            closed: self.closed,
        }
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> PathCurve {
        PathCurve {
            points: self.points.iter().map(|z| f(*z)).collect(),
            closed: self.closed,
        }
    }

    pub fn reversed(&self) -> PathCurve {
        let mut points = self.points.clone();
        points.reverse();
        PathCurve { points, closed: self.closed }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounds(&self) -> Option<(Complex64, Complex64)> {
        let first = *self.points.first()?;
        Some(self.points.iter().fold((first, first), |(lo, hi), z| {
            (
                Complex64::new(lo.re.min(z.re), lo.im.min(z.im)),
                Complex64::new(hi.re.max(z.re), hi.im.max(z.im)),
            )
        }))
    }

    /// Whether two non-adjacent segments intersect.
    pub fn has_self_crossing(&self) -> bool {
        let segs: Vec<(Complex64, Complex64)> = self.segments().collect();
        let m = segs.len();
        if m < 4 {
            return false;
        }
        // bucket segments on a grid sized to the mean segment length
        let (lo, hi) = self.bounds().unwrap();
        let mean = self.arclength() / m as f64;
        let cell = mean.max((hi - lo).norm() / 4096.0).max(1e-300);
        let nx = (((hi.re - lo.re) / cell) as usize + 1).min(1 << 12);
        let ny = (((hi.im - lo.im) / cell) as usize + 1).min(1 << 12);
        let sx = (hi.re - lo.re).max(1e-300) / nx as f64;
        let sy = (hi.im - lo.im).max(1e-300) / ny as f64;
        let key = |z: Complex64| {
            let i = (((z.re - lo.re) / sx) as usize).min(nx - 1);
            let j = (((z.im - lo.im) / sy) as usize).min(ny - 1);
            (i, j)
        };
        let mut buckets: std::collections::HashMap<(usize, usize), Vec<usize>> = Default::default();
        for (k, (a, b)) in segs.iter().enumerate() {
            let (i0, j0) = key(*a);
            let (i1, j1) = key(*b);
            for i in i0.min(i1)..=i0.max(i1) {
                for j in j0.min(j1)..=j0.max(j1) {
                    buckets.entry((i, j)).or_default().push(k);
                }
            }
        }
        for list in buckets.values() {
            for (x, &p) in list.iter().enumerate() {
                for &q in &list[x + 1..] {
                    let adjacent = q == p + 1 || p == q + 1 || (self.closed && ((p == 0 && q == m - 1) || (q == 0 && p == m - 1)));
                    if adjacent {
                        continue;
                    }
                    if segments_intersect(segs[p], segs[q]) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// CSV with columns `index,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (k, z) in self.points.iter().enumerate() {
            out.push_str(&format!("{k},{:e},{:e}\n", z.re, z.im));
        }
        out
    }

    /// Reads the format written by [`PathCurve::to_csv`].
    pub fn from_csv(text: &str, closed: bool) -> Result<PathCurve> {
        let mut points = Vec::new();
        for (n, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Io(format!("line {}: expected 3 columns", n + 1)));
            }
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Io(format!("line {}: {e}", n + 1)));
            points.push(Complex64::new(parse(cols[1])?, parse(cols[2])?));
        }
        Ok(PathCurve { points, closed })
    }
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Proper or touching intersection of two closed segments.
pub fn segments_intersect(s: (Complex64, Complex64), t: (Complex64, Complex64)) -> bool {
    let (p, p2) = s;
    let (q, q2) = t;
    let r = p2 - p;
    let u = q2 - q;
    let d1 = cross(r, q - p);
    let d2 = cross(r, q2 - p);
    let d3 = cross(u, p - q);
    let d4 = cross(u, p2 - q);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: Complex64, b: Complex64, c: Complex64, d: f64| {
        d == 0.0 && c.re >= a.re.min(b.re) && c.re <= a.re.max(b.re) && c.im >= a.im.min(b.im) && c.im <= a.im.max(b.im)
    };
    on(p, p2, q, d1) || on(p, p2, q2, d2) || on(q, q2, p, d3) || on(q, q2, p2, d4)
}

/// Distance from `p` to the segment `a b`.
pub fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}
