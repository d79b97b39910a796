//! Meromorphic quadratic differentials `φ(z) dz²` on the sphere, their
//! critical points, residues of `√φ`, and vertical trajectories.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::compare::hausdorff;
use crate::curve::{point_segment_distance, PathCurve};
use crate::error::{Error, Result};
use crate::kernels::SpherePoint;
use crate::poly::Poly;
use crate::quadrature::{GL_NODES, GL_WEIGHTS};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A pole of the differential together with the source weight it is meant to carry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub location: SpherePoint,
    /// Zero marks a degenerate factor whose double pole is cancelled by the numerator.
    pub weight: f64,
}

/// `factor · numerator(z) / Π (z - p_k)²` over the finite poles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadDiff {
    pub numerator: Poly,
    pub poles: Vec<Pole>,
    pub factor: f64,
}

/// A zero (`order ≥ 1`) or simple pole (`order = -1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub point: Complex64,
    pub order: i32,
}

/// The differential with sources of weight `a0` at 0, `a1` at 1 and `a_inf` at infinity.
pub fn build_three_source(a0: f64, a1: f64, a_inf: f64) -> Result<QuadDiff> {
    if !(a0 > 0.0) || !(a1 >= 0.0) || !(a_inf >= 0.0) || !a0.is_finite() || !a1.is_finite() || !a_inf.is_finite() {
        return Err(Error::Parameter(format!("weights ({a0}, {a1}, {a_inf})")));
    }
    let numerator = Poly::real(&[a0 * a0, a1 * a1 - a0 * a0 - a_inf * a_inf, a_inf * a_inf]);
    let mut poles = vec![
        Pole { location: SpherePoint::Finite(Complex64::new(0.0, 0.0)), weight: a0 },
        Pole { location: SpherePoint::Finite(Complex64::new(1.0, 0.0)), weight: a1 },
    ];
    if a_inf > 0.0 {
        poles.push(Pole { location: SpherePoint::Infinity, weight: a_inf });
    }
    Ok(QuadDiff { numerator, poles, factor: 0.25 })
}

impl QuadDiff {
    /// `(Σ c_k / (z - p_k))²` for finite simple poles `p_k` of the log-derivative.
    ///
    /// The square of `∂_z G` for a divisor in the disc has this form, with
    /// `c_k = ∓ a_k / 2` at the sources and their reflections.
    pub fn squared_partial_fractions(terms: &[(Complex64, Complex64)]) -> Result<QuadDiff> {
        if terms.is_empty() {
            return Err(Error::Parameter("no poles".into()));
        }
        let mut n = Poly::constant(Complex64::new(0.0, 0.0));
        for (k, (_, ck)) in terms.iter().enumerate() {
            let mut term = Poly::constant(*ck);
            for (l, (pl, _)) in terms.iter().enumerate() {
                if l != k {
                    term = term.mul(&Poly::linear_factor(*pl));
                }
            }
            n = n.add(&term);
        }
        let total: Complex64 = terms.iter().map(|t| t.1).sum();
        let mut poles: Vec<Pole> = terms
            .iter()
            .map(|(p, c)| Pole { location: SpherePoint::Finite(*p), weight: 2.0 * c.norm() })
            .collect();
        if total.norm() > 1e-14 {
            poles.push(Pole { location: SpherePoint::Infinity, weight: 2.0 * total.norm() });
        }
        Ok(QuadDiff { numerator: n.mul(&n), poles, factor: 1.0 })
    }

    pub fn finite_poles(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.poles.iter().filter_map(|p| p.location.finite())
    }

    pub fn denominator(&self) -> Poly {
        self.finite_poles().fold(Poly::constant(Complex64::new(1.0, 0.0)), |acc, p| {
            let f = Poly::linear_factor(p);
            acc.mul(&f).mul(&f)
        })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut den = Complex64::new(1.0, 0.0);
        for p in self.finite_poles() {
            let d = z - p;
            den *= d * d;
        }
        self.numerator.eval(z) * self.factor / den
    }

    /// The differential in the chart `w = 1/z` around infinity.
    pub fn eval_at_infinity_chart(&self, w: Complex64) -> Complex64 {
        let z = Complex64::new(1.0, 0.0) / w;
        let w2 = w * w;
        self.eval(z) / (w2 * w2)
    }

    /// Order of the differential at infinity.
    pub fn order_at_infinity(&self) -> i32 {
        2 * self.finite_poles().count() as i32 - self.numerator.degree() as i32 - 4
    }
}

fn cluster_roots(roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let scale = roots.iter().fold(1.0f64, |m, r| m.max(r.norm()));
    let tol = 1e-7 * scale;
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for r in roots {
        if let Some(c) = out.iter_mut().find(|c| (c.0 / c.1 as f64 - r).norm() < tol) {
            c.0 += r;
            c.1 += 1;
        } else {
            out.push((*r, 1));
        }
    }
    out.into_iter().map(|(s, m)| (s / m as f64, m)).collect()
}

/// Zeros of the differential and its simple poles, in the finite plane.
pub fn finite_critical_points(qd: &QuadDiff) -> Result<Vec<CriticalPoint>> {
    let roots = qd.numerator.roots()?;
    let clusters = cluster_roots(&roots);
    let poles: Vec<Complex64> = qd.finite_poles().collect();
    let mut out = Vec::new();
    let mut used = vec![false; clusters.len()];
    for p in &poles {
        let mut mult = 0;
        for (k, (r, m)) in clusters.iter().enumerate() {
            if (r - p).norm() < 1e-9 * (1.0 + p.norm()) {
                mult += m;
                used[k] = true;
            }
        }
        let order = mult as i32 - 2;
        if order == -1 || order > 0 {
            out.push(CriticalPoint { point: *p, order });
        }
    }
    for (k, (r, m)) in clusters.iter().enumerate() {
        if !used[k] {
            out.push(CriticalPoint { point: *r, order: *m as i32 });
        }
    }
    out.sort_by(|a, b| a.point.re.partial_cmp(&b.point.re).unwrap().then(a.point.im.partial_cmp(&b.point.im).unwrap()));
    Ok(out)
}

/// Double poles (net order −2) of the differential in the finite plane.
fn double_poles(qd: &QuadDiff, crit: &[CriticalPoint]) -> Vec<Complex64> {
    qd.finite_poles()
        .filter(|p| !crit.iter().any(|c| (c.point - p).norm() < 1e-9 * (1.0 + p.norm())))
        .collect()
}

fn sqrt_near(phi: Complex64, reference: Complex64) -> Complex64 {
    let s = phi.sqrt();
    if (s - reference).norm() <= (s + reference).norm() {
        s
    } else {
        -s
    }
}

/// `(1/2πi) ∮ √f dz` over `|z - center| = radius` with a continued branch.
/// `None` when the branch does not close up or the integral fails to settle.
fn contour_residue<F: Fn(Complex64) -> Complex64>(f: &F, center: Complex64, radius: f64) -> Option<Complex64> {
    let mut prev_estimate: Option<Complex64> = None;
    let mut n = 64usize;
    while n <= 1 << 16 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut reference = f(center + radius).sqrt();
        let first = reference;
        let mut max_jump: f64 = 0.0;
        for k in 0..n {
            let e = Complex64::from_polar(1.0, TAU * k as f64 / n as f64);
            let phi = f(center + e * radius);
            if !phi.re.is_finite() || !phi.im.is_finite() || phi.norm() == 0.0 {
                return None;
            }
            let s = sqrt_near(phi, reference);
            max_jump = max_jump.max((s - reference).norm() / s.norm());
            reference = s;
            acc += s * e * radius;
        }
        // continue once more to the starting node and compare branches
        let closing = sqrt_near(f(center + radius), reference);
        if (closing - first).norm() > (closing + first).norm() {
            return None;
        }
        let estimate = acc * (TAU / n as f64) / (TAU * I);
        if max_jump < 0.25 {
            if let Some(p) = prev_estimate {
                if (p - estimate).norm() <= 1e-14 * (1.0 + estimate.norm()) {
                    return Some(estimate);
                }
            }
            prev_estimate = Some(estimate);
        }
        n *= 2;
    }
    prev_estimate
}

/// `|Res(√φ)|` at a listed double pole, by a numeric contour integral.
pub fn residue_sqrt(qd: &QuadDiff, pole: SpherePoint) -> Result<f64> {
    let crit = finite_critical_points(qd)?;
    let mut features: Vec<Complex64> = crit.iter().map(|c| c.point).collect();
    features.extend(qd.finite_poles());
    let (center, mut radius, at_infinity) = match pole {
        SpherePoint::Finite(p) => {
            if !qd.finite_poles().any(|q| q == p) {
                return Err(Error::Parameter(format!("{p} is not a listed pole")));
            }
            if crit.iter().any(|c| (c.point - p).norm() < 1e-9) {
                return Err(Error::Parameter(format!("{p} is not a double pole")));
            }
            let gap = features
                .iter()
                .filter(|q| (*q - p).norm() > 1e-12)
                .map(|q| (q - p).norm())
                .fold(f64::INFINITY, f64::min);
            (p, if gap.is_finite() { 0.5 * gap } else { 0.5 }, false)
        }
        SpherePoint::Infinity => {
            if qd.order_at_infinity() != -2 {
                return Err(Error::Parameter("infinity is not a double pole".into()));
            }
            let far = features.iter().fold(0.0f64, |m, q| m.max(q.norm()));
            (Complex64::new(0.0, 0.0), 0.5 / (1.0 + far), true)
        }
    };
    for _ in 0..=8 {
        let res = if at_infinity {
            contour_residue(&|w| qd.eval_at_infinity_chart(w), center, radius)
        } else {
            contour_residue(&|z| qd.eval(z), center, radius)
        };
        if let Some(r) = res {
            return Ok(r.norm());
        }
        radius *= 0.5;
    }
    Err(Error::Branch(format!("no consistent branch of √φ around {pole:?}")))
}

/// Checks `|Res √φ| = weight / 2` at every pole with positive weight.
pub fn check_residues(qd: &QuadDiff, tol: f64) -> Result<()> {
    for p in &qd.poles {
        if p.weight > 0.0 {
            let r = residue_sqrt(qd, p.location)?;
            if (r - p.weight / 2.0).abs() > tol {
                return Err(Error::InvariantViolation(format!(
                    "residue {r} at {:?} does not match weight {}",
                    p.location, p.weight
                )));
            }
        }
    }
    Ok(())
}

/// How a traced trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TrajectoryEnd {
    /// Returned to its start with matching direction.
    Closed,
    /// Reached the listed critical point.
    Critical(Complex64),
    MaxArclength,
    Escape,
    /// Came within one step of a double pole.
    Pole(Complex64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub curve: PathCurve,
    pub end: TrajectoryEnd,
    /// Miss distance at the terminal point for closed or critical endings.
    pub closure_gap: f64,
    pub arclength: f64,
    /// `Re ∫ √φ` from the start at the last traced point, as tracked by the integrator.
    pub level_residual: f64,
}

struct Tracer<'a> {
    qd: &'a QuadDiff,
    crit: Vec<CriticalPoint>,
    doubles: Vec<Complex64>,
    escape_radius: f64,
}

impl<'a> Tracer<'a> {
    fn new(qd: &'a QuadDiff) -> Result<Self> {
        let crit = finite_critical_points(qd)?;
        let doubles = double_poles(qd, &crit);
        let far = crit
            .iter()
            .map(|c| c.point.norm())
            .chain(qd.finite_poles().map(|p| p.norm()))
            .fold(0.0f64, f64::max);
        Ok(Tracer { qd, crit, doubles, escape_radius: 10.0 * (1.0 + far) })
    }

    /// Unit vertical direction near `v_ref` and the matching branch of `√φ`.
    fn field(&self, z: Complex64, v_ref: Complex64) -> (Complex64, Complex64) {
        let s = self.qd.eval(z).sqrt();
        let u = I * s.conj() / s.norm();
        if (u * v_ref.conj()).re < 0.0 {
            (-u, -s)
        } else {
            (u, s)
        }
    }

    fn rk4(&self, z: Complex64, h: f64, v_ref: Complex64) -> Complex64 {
        let k1 = self.field(z, v_ref).0;
        let k2 = self.field(z + k1 * (h / 2.0), v_ref).0;
        let k3 = self.field(z + k2 * (h / 2.0), v_ref).0;
        let k4 = self.field(z + k3 * h, v_ref).0;
        z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    }

    /// `Re ∫ √φ dz` along the chord `a → b`, with the branch fixed by `s_b` at `b`.
    /// When `a` is a critical point the substitution `t = σ²` removes the
    /// algebraic endpoint singularity.
    fn chord_level(&self, a: Complex64, b: Complex64, s_b: Complex64, singular_a: bool) -> f64 {
        let d = b - a;
        let mut reference = s_b;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..GL_NODES.len()).rev() {
            let x = 0.5 * (GL_NODES[k] + 1.0);
            let (t, jac) = if singular_a { (x * x, 2.0 * x) } else { (x, 1.0) };
            let s = sqrt_near(self.qd.eval(a + d * t), reference);
            reference = s;
            acc += s * (jac * GL_WEIGHTS[k] * 0.5);
        }
        (acc * d).re
    }

    /// Local model `φ ≈ c (z - z0)^m` at a critical point.
    fn local_coefficient(&self, cp: &CriticalPoint) -> Complex64 {
        let z0 = cp.point;
        let clusters = cluster_roots(&self.qd.numerator.roots().unwrap_or_default());
        let k: usize = clusters
            .iter()
            .filter(|(r, _)| (r - z0).norm() < 1e-7 * (1.0 + z0.norm()))
            .map(|(_, m)| *m)
            .sum();
        let ntil = self.qd.numerator.taylor(z0, k);
        let mut dtil = Complex64::new(1.0, 0.0);
        for p in self.qd.finite_poles() {
            if (p - z0).norm() > 1e-9 * (1.0 + z0.norm()) {
                dtil *= (z0 - p) * (z0 - p);
            }
        }
        ntil * self.qd.factor / dtil
    }

    /// The `m + 2` admissible unit directions leaving a critical point of order `m`.
    fn rays(&self, cp: &CriticalPoint) -> Vec<Complex64> {
        let c = self.local_coefficient(cp);
        let m = cp.order;
        let count = (m + 2) as usize;
        (0..count)
            .map(|k| Complex64::from_polar(1.0, (PI - c.arg() + TAU * k as f64) / (m + 2) as f64))
            .collect()
    }

    fn trace(&self, start: Complex64, direction: Complex64, start_critical: bool, step: f64, max_arclen: f64) -> Result<Trajectory> {
        let tol = 1e-11;
        let mut points = vec![start];
        let mut v = direction / direction.norm();
        let mut z;
        let mut level;
        let mut arclength;
        if start_critical {
            let other = self
                .crit
                .iter()
                .map(|c| c.point)
                .chain(self.qd.finite_poles())
                .filter(|p| (p - start).norm() > 1e-12)
                .map(|p| (p - start).norm())
                .fold(f64::INFINITY, f64::min);
            let h0 = step.min(0.1 * other);
            let z1 = start + v * h0;
            let (_, s1) = self.field(z1, v);
            let f1 = self.chord_level(start, z1, s1, true);
            let zc = z1 - s1.conj() * (f1 / s1.norm_sqr());
            let (u, sc) = self.field(zc, v);
            level = self.chord_level(start, zc, sc, true);
            z = zc;
            v = u;
            arclength = (zc - start).norm();
            points.push(zc);
        } else {
            z = start;
            v = self.field(z, v).0;
            level = 0.0;
            arclength = 0.0;
        }
        let start_dir = v;
        let mut left_start = false;
        let mut h = step;
        loop {
            // adaptive RK4 by step doubling
            let z_new = loop {
                if h < 1e-14 {
                    return Err(Error::Step(format!("{z}")));
                }
                let big = self.rk4(z, h, v);
                let half = self.rk4(z, h / 2.0, v);
                let v_half = self.field(half, v).0;
                let small = self.rk4(half, h / 2.0, v_half);
                let err = (big - small).norm();
                if err <= tol * (1.0 + z.norm()) {
                    let grow = if err == 0.0 { 2.0 } else { (0.9 * (tol / err).powf(0.2)).min(2.0) };
                    h = (h * grow).min(step);
                    break small;
                }
                h *= (0.9 * (tol / err).powf(0.2)).clamp(0.1, 0.5);
            };
            // one Newton correction onto the level set
            let (_, s_new) = self.field(z_new, v);
            let f_new = level + self.chord_level(z, z_new, s_new, false);
            let zc = z_new - s_new.conj() * (f_new / s_new.norm_sqr());
            let (u, sc) = self.field(zc, v);
            let f_c = level + self.chord_level(z, zc, sc, false);
            let z_prev = z;
            arclength += (zc - z).norm();
            z = zc;
            level = f_c;
            v = u;
            if !left_start && (z - start).norm() > 2.0 * step {
                left_start = true;
            }

            // critical points
            for cp in &self.crit {
                let is_start = (cp.point - start).norm() < 1e-12;
                if is_start && !left_start {
                    continue;
                }
                let dist = (z - cp.point).norm();
                if dist < step {
                    let f_end = level - self.chord_level(cp.point, z, sc, true);
                    if f_end.abs() < 1e-7 * (1.0 + arclength) {
                        let gap = (Complex64::new(0.0, 1.0) * (cp.point - z) * v.conj()).re.abs();
                        let seg = z - z_prev;
                        let t = ((cp.point - z_prev) * seg.conj()).re / seg.norm_sqr();
                        if t >= 1.0 {
                            points.push(z);
                        }
                        let end = if is_start && start_critical {
                            TrajectoryEnd::Closed
                        } else {
                            points.push(cp.point);
                            TrajectoryEnd::Critical(cp.point)
                        };
                        let closed = end == TrajectoryEnd::Closed;
                        let curve = if closed { PathCurve::closed(points) } else { PathCurve::open(points) };
                        return Ok(Trajectory { curve, end, closure_gap: gap, arclength, level_residual: f_end });
                    }
                }
            }
            for p in &self.doubles {
                if (z - p).norm() < step {
                    points.push(z);
                    return Ok(Trajectory { curve: PathCurve::open(points), end: TrajectoryEnd::Pole(*p), closure_gap: f64::NAN, arclength, level_residual: level });
                }
            }
            if !start_critical && left_start && (z - start).norm() < step && (v * start_dir.conj()).arg().abs() < 0.05 {
                let gap = point_segment_distance(start, z_prev, z);
                let seg = z - z_prev;
                let t = ((start - z_prev) * seg.conj()).re / seg.norm_sqr();
                if t >= 1.0 {
                    points.push(z);
                }
                return Ok(Trajectory { curve: PathCurve::closed(points), end: TrajectoryEnd::Closed, closure_gap: gap, arclength, level_residual: level });
            }
            points.push(z);
            if z.norm() > self.escape_radius {
                return Ok(Trajectory { curve: PathCurve::open(points), end: TrajectoryEnd::Escape, closure_gap: f64::NAN, arclength, level_residual: level });
            }
            if arclength > max_arclen {
                return Ok(Trajectory { curve: PathCurve::open(points), end: TrajectoryEnd::MaxArclength, closure_gap: f64::NAN, arclength, level_residual: level });
            }
        }
    }
}

/// Traces the vertical trajectory through `start` leaving in `direction`.
///
/// At a zero of order `m` the direction is snapped to the nearest of the
/// `m + 2` admissible rays; elsewhere it must satisfy `arg(φ·dir²) = π`
/// within 0.1 rad.
pub fn trace_vertical(qd: &QuadDiff, start: Complex64, direction: Complex64, step: f64, max_arclen: f64) -> Result<Trajectory> {
    if !(step > 0.0) || !(max_arclen > 0.0) || direction.norm() == 0.0 {
        return Err(Error::Parameter("step, max_arclen and direction must be positive".into()));
    }
    let tracer = Tracer::new(qd)?;
    if qd.finite_poles().any(|p| (p - start).norm() < 1e-14) {
        return Err(Error::SingularStart(format!("{start}")));
    }
    let dir = direction / direction.norm();
    if let Some(cp) = tracer.crit.iter().find(|c| c.order > 0 && (c.point - start).norm() < 1e-12) {
        let rays = tracer.rays(cp);
        let best = rays
            .iter()
            .copied()
            .min_by(|a, b| (a * dir.conj()).arg().abs().partial_cmp(&(b * dir.conj()).arg().abs()).unwrap())
            .unwrap();
        if (best * dir.conj()).arg().abs() > 0.1 {
            return Err(Error::Parameter(format!("direction {dir} is not a separatrix direction at {start}")));
        }
        return tracer.trace(cp.point, best, true, step, max_arclen);
    }
    let phi = tracer.qd.eval(start);
    let a = (phi * dir * dir).arg();
    if (a.abs() - PI).abs() > 0.1 {
        return Err(Error::Parameter(format!("direction {dir} is not vertical at {start}")));
    }
    tracer.trace(start, dir, false, step, max_arclen)
}

/// Admissible leaving directions at a critical point.
pub fn separatrix_directions(qd: &QuadDiff, cp: &CriticalPoint) -> Result<Vec<Complex64>> {
    Ok(Tracer::new(qd)?.rays(cp))
}

/// `Re ∫ √φ dz` from the first point, accumulated along the polyline by
/// composite Simpson quadrature with a continued branch. Entry `k` is the
/// value at point `k`.
pub fn level_along(qd: &QuadDiff, curve: &PathCurve) -> Vec<f64> {
    let pts = &curve.points;
    let mut out = vec![0.0; pts.len()];
    if pts.len() < 2 {
        return out;
    }
    // branch anchored at the second point, where √φ is finite and nonzero
    let mut reference = qd.eval(pts[1]).sqrt();
    let sub = 8;
    let mut acc = 0.0;
    for k in 0..pts.len() - 1 {
        let (a, b) = (pts[k], pts[k + 1]);
        let d = b - a;
        let mut vals = Vec::with_capacity(sub + 1);
        for j in 0..=sub {
            let z = a + d * (j as f64 / sub as f64);
            let phi = qd.eval(z);
            if !phi.re.is_finite() || !phi.im.is_finite() || phi.norm() == 0.0 {
                vals.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let s = sqrt_near(phi, reference);
            reference = s;
            vals.push(s);
        }
        let mut seg = Complex64::new(0.0, 0.0);
        for (j, v) in vals.iter().enumerate() {
            let w = if j == 0 || j == sub { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
            seg += v * w;
        }
        acc += (seg * d / (3.0 * sub as f64)).re;
        out[k + 1] = acc;
    }
    out
}

/// Where an edge of the critical graph ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EdgeEnd {
    Vertex(usize),
    Closed,
    Escape,
    Truncated,
    Pole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: usize,
    /// Unit tangent at the starting vertex.
    pub tangent: Complex64,
    pub curve: PathCurve,
    pub end: EdgeEnd,
    pub closure_gap: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalGraph {
    pub vertices: Vec<CriticalPoint>,
    pub edges: Vec<GraphEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphOptions {
    pub step: f64,
    pub max_arclen: f64,
}

impl Default for GraphOptions {
    fn default() -> Self {
        GraphOptions { step: 1e-3, max_arclen: 50.0 }
    }
}

/// Separatrices from every zero and simple pole, with duplicates removed.
pub fn critical_graph(qd: &QuadDiff, opts: GraphOptions) -> Result<CriticalGraph> {
    let tracer = Tracer::new(qd)?;
    let vertices = tracer.crit.clone();
    let mut edges: Vec<GraphEdge> = Vec::new();
    for (vi, cp) in vertices.iter().enumerate() {
        for ray in tracer.rays(cp) {
            let edge = match tracer.trace(cp.point, ray, true, opts.step, opts.max_arclen) {
                Ok(t) => {
                    let end = match t.end {
                        TrajectoryEnd::Closed => EdgeEnd::Closed,
                        TrajectoryEnd::Critical(p) => EdgeEnd::Vertex(
                            vertices.iter().position(|c| c.point == p).unwrap_or(vi),
                        ),
                        TrajectoryEnd::Escape => EdgeEnd::Escape,
                        TrajectoryEnd::MaxArclength => EdgeEnd::Truncated,
                        TrajectoryEnd::Pole(_) => EdgeEnd::Pole,
                    };
                    GraphEdge { from: vi, tangent: ray, curve: t.curve, end, closure_gap: t.closure_gap, error: None }
                }
                Err(e) => GraphEdge {
                    from: vi,
                    tangent: ray,
                    curve: PathCurve::open(vec![cp.point]),
                    end: EdgeEnd::Truncated,
                    closure_gap: f64::NAN,
                    error: Some(e.to_string()),
                },
            };
            let duplicate = edges.iter().any(|e| {
                let same_ends = match (e.end, edge.end) {
                    (EdgeEnd::Closed, EdgeEnd::Closed) => e.from == edge.from,
                    (EdgeEnd::Vertex(a), EdgeEnd::Vertex(b)) => a == edge.from && b == e.from,
                    _ => false,
                };
                same_ends
                    && e.error.is_none()
                    && edge.error.is_none()
                    && hausdorff(&e.curve, &edge.curve).map(|d| d < 10.0 * opts.step).unwrap_or(false)
            });
            if !duplicate {
                edges.push(edge);
            }
        }
    }
    Ok(CriticalGraph { vertices, edges })
}

impl CriticalGraph {
    /// The first closed edge, if any.
    pub fn loop_edge(&self) -> Option<&GraphEdge> {
        self.edges.iter().find(|e| e.end == EdgeEnd::Closed)
    }
}
