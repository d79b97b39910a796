//! Stationary Jordan curves: level-line potentials, reduced Green's energy,
//! Hadamard variation quadratures, the four-droplet potential and the
//! welding homeomorphism.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::curve::PathCurve;
use crate::error::{Error, Result};
use crate::kernels::{conformal_radius_disc, greens_disc, Circle, Mobius, SpherePoint, WeightedDivisor};
use crate::quadrature::periodic_trapezoid;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A harmonic function off a finite set with logarithmic singularities.
pub trait Potential {
    fn value(&self, z: Complex64) -> Result<f64>;
    /// `H'` for the local analytic `H` with `Re H = R`; the gradient of `R` is `conj(H')`.
    fn complex_gradient(&self, z: Complex64) -> Complex64;
    /// `H''`, used for step control near saddles.
    fn complex_hessian(&self, z: Complex64) -> Complex64;
    /// Singular points carrying positive and negative logarithmic charge.
    fn supports(&self) -> (Vec<Complex64>, Vec<Complex64>);
}

/// `R(z) = Σ b_j log|z - w_j|⁻¹ - Σ a_j log|z - z_j|⁻¹`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelPotential {
    pub pos: WeightedDivisor,
    pub neg: WeightedDivisor,
}

impl LevelPotential {
    /// Only the finite atoms enter the sum; an atom at infinity is implicit.
    pub fn new(pos: WeightedDivisor, neg: WeightedDivisor) -> Result<Self> {
        for (w, _) in pos.finite_atoms() {
            if neg.finite_atoms().any(|(z, _)| z == w) {
                return Err(Error::Parameter(format!("supports share {w}")));
            }
        }
        Ok(LevelPotential { pos, neg })
    }
}

impl Potential for LevelPotential {
    fn value(&self, z: Complex64) -> Result<f64> {
        let mut r = 0.0;
        for (w, b) in self.pos.finite_atoms() {
            if z == w {
                return Err(Error::Pole(format!("{z}")));
            }
            r -= b * (z - w).norm().ln();
        }
        for (p, a) in self.neg.finite_atoms() {
            if z == p {
                return Err(Error::Pole(format!("{z}")));
            }
            r += a * (z - p).norm().ln();
        }
        Ok(r)
    }

    fn complex_gradient(&self, z: Complex64) -> Complex64 {
        let mut h = Complex64::new(0.0, 0.0);
        for (p, a) in self.neg.finite_atoms() {
            h += a / (z - p);
        }
        for (w, b) in self.pos.finite_atoms() {
            h -= b / (z - w);
        }
        h
    }

    fn complex_hessian(&self, z: Complex64) -> Complex64 {
        let mut h = Complex64::new(0.0, 0.0);
        for (p, a) in self.neg.finite_atoms() {
            h -= a / ((z - p) * (z - p));
        }
        for (w, b) in self.pos.finite_atoms() {
            h += b / ((z - w) * (z - w));
        }
        h
    }

    fn supports(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        (self.pos.finite_atoms().map(|a| a.0).collect(), self.neg.finite_atoms().map(|a| a.0).collect())
    }
}

/// Potential `a·R_{x1} - b·R_{x2}` with `R_x(z) = log|(1 - z x) / (z - x)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourDropletSpec {
    pub x1: f64,
    pub x2: f64,
    pub a: f64,
    pub b: f64,
}

impl FourDropletSpec {
    pub fn new(x1: f64, x2: f64, a: f64, b: f64) -> Result<Self> {
        if !(x1.abs() < 1.0 && x2.abs() < 1.0) || x1 == x2 || !(a > 0.0) || !(b > 0.0) {
            return Err(Error::Parameter(format!("four-droplet spec ({x1}, {x2}, {a}, {b})")));
        }
        Ok(FourDropletSpec { x1, x2, a, b })
    }

    fn singular(&self, z: Complex64) -> bool {
        let hits = |x: f64| z == Complex64::new(x, 0.0) || (x != 0.0 && z == Complex64::new(1.0 / x, 0.0));
        hits(self.x1) || hits(self.x2)
    }
}

/// `R_x(z) = log|(1 - z x) / (z - x)|`.
pub fn r_x(x: f64, z: Complex64) -> f64 {
    (Complex64::new(1.0, 0.0) - z * x).norm().ln() - (z - x).norm().ln()
}

fn r_x_gradient(x: f64, z: Complex64) -> Complex64 {
    -x / (Complex64::new(1.0, 0.0) - z * x) - 1.0 / (z - x)
}

fn r_x_hessian(x: f64, z: Complex64) -> Complex64 {
    let u = Complex64::new(1.0, 0.0) - z * x;
    -(x * x) / (u * u) + 1.0 / ((z - x) * (z - x))
}

impl Potential for FourDropletSpec {
    fn value(&self, z: Complex64) -> Result<f64> {
        if self.singular(z) {
            return Err(Error::Pole(format!("{z}")));
        }
        Ok(self.a * r_x(self.x1, z) - self.b * r_x(self.x2, z))
    }

    fn complex_gradient(&self, z: Complex64) -> Complex64 {
        r_x_gradient(self.x1, z) * self.a - r_x_gradient(self.x2, z) * self.b
    }

    fn complex_hessian(&self, z: Complex64) -> Complex64 {
        r_x_hessian(self.x1, z) * self.a - r_x_hessian(self.x2, z) * self.b
    }

    fn supports(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut pos = vec![Complex64::new(self.x1, 0.0)];
        let mut neg = vec![Complex64::new(self.x2, 0.0)];
        if self.x1 != 0.0 {
            neg.push(Complex64::new(1.0 / self.x1, 0.0));
        }
        if self.x2 != 0.0 {
            pos.push(Complex64::new(1.0 / self.x2, 0.0));
        }
        (pos, neg)
    }
}

/// `R(z)` for any potential.
pub fn potential_value<P: Potential>(r: &P, z: Complex64) -> Result<f64> {
    r.value(z)
}

/// A traced level line with its topological flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCurve {
    pub curve: PathCurve,
    pub level: f64,
    pub is_jordan: bool,
    /// All negative support points on one side and all positive ones on the other.
    pub separates: bool,
}

fn newton_to_level<P: Potential>(r: &P, level: f64, mut z: Complex64, iterations: usize) -> Result<Complex64> {
    for _ in 0..iterations {
        let g = r.complex_gradient(z);
        if g.norm() < 1e-10 {
            return Err(Error::CriticalLevel(format!("|∇R| vanishes near {z}")));
        }
        let f = r.value(z)? - level;
        if f.abs() < 1e-14 * (1.0 + level.abs()) {
            break;
        }
        // gradient of R is conj(H'), so the step is f · H'^{-1}-conjugate direction
        z -= g.conj() * (f / g.norm_sqr());
    }
    Ok(z)
}

/// Traces the component of `{R = level}` through (the Newton-corrected) `seed`.
pub fn trace_level<P: Potential>(r: &P, level: f64, seed: Complex64) -> Result<LevelCurve> {
    let start = newton_to_level(r, level, seed, 30).map_err(|e| match e {
        Error::CriticalLevel(m) => Error::CriticalLevel(m),
        other => Error::Seed(other.to_string()),
    })?;
    let miss = (r.value(start)? - level).abs();
    if !(miss < 1e-6) {
        return Err(Error::Seed(format!("Newton left a residual {miss}")));
    }
    let (pos, neg) = r.supports();
    let scale = pos
        .iter()
        .chain(neg.iter())
        .map(|p| (p - start).norm())
        .fold(f64::INFINITY, f64::min);
    let scale = if scale.is_finite() { scale } else { 1.0 };
    let h_max = 1e-3 * scale;
    let max_points = 20_000_000usize;

    let tangent = |z: Complex64| -> Result<Complex64> {
        let g = r.complex_gradient(z);
        let n = g.norm();
        if !(n >= 1e-10) {
            return Err(Error::CriticalLevel(format!("|∇R| = {n} at {z}")));
        }
        Ok(I * g.conj() / n)
    };

    let mut points = vec![start];
    let mut z = start;
    let t0 = tangent(z)?;
    let mut left = false;
    let mut travelled = 0.0;
    loop {
        let g = r.complex_gradient(z);
        let hess = r.complex_hessian(z);
        let local = g.norm() / hess.norm().max(1e-300);
        let h = h_max.min(0.05 * local).max(1e-14);
        let k1 = tangent(z)?;
        let k2 = tangent(z + k1 * (h / 2.0))?;
        let k3 = tangent(z + k2 * (h / 2.0))?;
        let k4 = tangent(z + k3 * h)?;
        let pred = z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let next = newton_to_level(r, level, pred, 1)?;
        travelled += (next - z).norm();
        let prev = z;
        z = next;
        if !left && (z - start).norm() > 3.0 * h_max {
            left = true;
        }
        if left && (z - start).norm() < 1.5 * h.max(h_max.min((z - prev).norm() * 1.5)) && (tangent(z)? * t0.conj()).re > 0.0 {
            // stop before overshooting the start
            let seg = z - prev;
            let t = ((start - prev) * seg.conj()).re / seg.norm_sqr();
            if t >= 1.0 {
                points.push(z);
            }
            break;
        }
        points.push(z);
        if points.len() > max_points || travelled > 1e6 * scale {
            return Err(Error::Seed("level line did not close".into()));
        }
    }
    let curve = PathCurve::closed(points);
    let is_jordan = !curve.has_self_crossing();
    let inside = |p: &Complex64| curve.winding_number(*p) != 0;
    let neg_in = neg.iter().all(inside);
    let neg_out = neg.iter().all(|p| !inside(p));
    let pos_in = pos.iter().all(inside);
    let pos_out = pos.iter().all(|p| !inside(p));
    let separates = (neg_in && pos_out && !neg.is_empty()) || (pos_in && neg_out && !pos.is_empty());
    Ok(LevelCurve { curve, level, is_jordan, separates })
}

/// Region of the four-droplet configuration containing a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DropletLabel {
    D1,
    D2,
    D3,
    D4,
    Boundary,
}

/// Labels `z` by the sign of `R` and the side of the unit circle.
pub fn classify_four_droplet(spec: &FourDropletSpec, z: Complex64) -> Result<DropletLabel> {
    let r = spec.value(z)?;
    let m = z.norm();
    let tol = 1e-10;
    if r.abs() < tol || (m - 1.0).abs() < tol {
        return Ok(DropletLabel::Boundary);
    }
    Ok(match (m < 1.0, r > 0.0) {
        (true, true) => DropletLabel::D1,
        (true, false) => DropletLabel::D2,
        (false, false) => DropletLabel::D3,
        (false, true) => DropletLabel::D4,
    })
}

/// Boundary curves of the four droplets, traced at levels `±eps` so that the
/// saddles where the level-zero set meets the unit circle are avoided.
pub fn four_droplet_curves(spec: &FourDropletSpec, eps: f64) -> Result<Vec<(DropletLabel, LevelCurve)>> {
    if !(eps >= 1e-8) {
        return Err(Error::Parameter(format!("level offset {eps} below 1e-8")));
    }
    let (lo, hi) = if spec.x1 < spec.x2 { (spec.x1, spec.x2) } else { (spec.x2, spec.x1) };
    let f = |x: f64| spec.value(Complex64::new(x, 0.0));
    let solve = |target: f64| -> Result<f64> {
        let (mut a, mut b) = (lo + 1e-9 * (hi - lo), hi - 1e-9 * (hi - lo));
        let (fa, fb) = (f(a)? - target, f(b)? - target);
        if fa.signum() == fb.signum() {
            return Err(Error::Seed(format!("no crossing of level {target} between the sources")));
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (f(m)? - target).signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    };
    let s_pos = Complex64::new(solve(eps)?, 0.0);
    let s_neg = Complex64::new(solve(-eps)?, 0.0);
    let one = Complex64::new(1.0, 0.0);
    Ok(vec![
        (DropletLabel::D1, trace_level(spec, eps, s_pos)?),
        (DropletLabel::D2, trace_level(spec, -eps, s_neg)?),
        (DropletLabel::D3, trace_level(spec, -eps, one / s_pos)?),
        (DropletLabel::D4, trace_level(spec, eps, one / s_neg)?),
    ])
}

/// `M_D(0) + M_{D*}(∞)` for the disc `|z - center| < radius`, `d = 1·0`, `d* = 1·∞`.
pub fn reduced_energy_circle_pair(center: Complex64, radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::Parameter(format!("radius {radius}")));
    }
    let q = center.norm_sqr() / (radius * radius);
    if !(q < 1.0) {
        return Err(Error::Domain("the origin is not inside the circle".into()));
    }
    Ok((-q).ln_1p())
}

/// A simply connected domain given as a disc or a Möbius image of the unit disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DiscDomain {
    UnitDisc,
    Disc { center: Complex64, radius: f64 },
    /// Image of the unit disc; the pole of the map must lie outside the closed disc.
    MobiusImage(Mobius),
}

/// Reduced Green's energy `Σ_{j≠k} a_j a_k G(z_j, z_k) + Σ a_j² M_D(z_j)`.
pub fn reduced_energy_general(domain: &DiscDomain, d: &WeightedDivisor) -> Result<f64> {
    let atoms: Vec<(Complex64, f64)> = d
        .atoms()
        .iter()
        .map(|a| {
            a.point
                .finite()
                .map(|z| (z, a.weight))
                .ok_or_else(|| Error::Domain("divisor atom at infinity".into()))
        })
        .collect::<Result<_>>()?;
    match *domain {
        DiscDomain::UnitDisc => disc_energy(Complex64::new(0.0, 0.0), 1.0, &atoms),
        DiscDomain::Disc { center, radius } => disc_energy(center, radius, &atoms),
        DiscDomain::MobiusImage(f) => {
            if let SpherePoint::Finite(p) = f.pole() {
                if p.norm() <= 1.0 {
                    return Err(Error::UnsupportedDomain("map has a pole in the closed disc".into()));
                }
            }
            let inv = f.inverse();
            let mut pulled = Vec::with_capacity(atoms.len());
            let mut correction = 0.0;
            for &(z, a) in &atoms {
                let u = inv
                    .apply(z)
                    .finite()
                    .ok_or_else(|| Error::Domain(format!("{z} is not in the image domain")))?;
                if !(u.norm() < 1.0) {
                    return Err(Error::Domain(format!("{z} is not in the image domain")));
                }
                correction += a * a * f.derivative(u).norm().ln();
                pulled.push((u, a));
            }
            Ok(disc_energy(Complex64::new(0.0, 0.0), 1.0, &pulled)? + correction)
        }
    }
}

fn disc_energy(center: Complex64, radius: f64, atoms: &[(Complex64, f64)]) -> Result<f64> {
    let u = |z: Complex64| (z - center) / radius;
    let mut total = 0.0;
    for (j, &(zj, aj)) in atoms.iter().enumerate() {
        for (k, &(zk, ak)) in atoms.iter().enumerate() {
            if j != k {
                total += aj * ak * greens_disc(u(zj), u(zk))?;
            }
        }
        total += aj * aj * conformal_radius_disc(center, radius, zj)?.ln();
    }
    Ok(total)
}

/// Kernel sums `(Σ a P, Σ b Q)` at a boundary point.
fn kernel_sums(circle: &Circle, d: &WeightedDivisor, d_star: &WeightedDivisor, zeta: Complex64) -> (f64, f64) {
    let p: f64 = d.finite_atoms().map(|(z, a)| a * circle.poisson_inside(z, zeta)).sum();
    let q: f64 = d_star.atoms().iter().map(|at| at.weight * circle.poisson_outside(at.point, zeta)).sum();
    (p, q)
}

fn check_sides(circle: &Circle, d: &WeightedDivisor, d_star: &WeightedDivisor) -> Result<()> {
    for a in d.atoms() {
        match a.point {
            SpherePoint::Finite(z) if circle.contains(z) => {}
            _ => return Err(Error::UnsupportedDomain(format!("{:?} is not inside the circle", a.point))),
        }
    }
    for a in d_star.atoms() {
        if let SpherePoint::Finite(z) = a.point {
            if !((z - circle.center).norm() > circle.radius) {
                return Err(Error::UnsupportedDomain(format!("{z} is not outside the circle")));
            }
        }
    }
    Ok(())
}

/// `(1/2π) ∮ (ΣaP + ΣbQ)(ΣaP - ΣbQ)² |dζ|` over a circle.
pub fn hadamard_gradient_quadrature(circle: &Circle, d: &WeightedDivisor, d_star: &WeightedDivisor) -> Result<f64> {
    check_sides(circle, d, d_star)?;
    let v = periodic_trapezoid(
        |t| {
            let (p, q) = kernel_sums(circle, d, d_star, circle.point(t));
            (p + q) * (p - q) * (p - q) * circle.radius
        },
        1e-15,
    );
    Ok(v / TAU)
}

/// Area and perimeter variation `(∮ (ΣaP - ΣbQ)|dζ|, ∮ κ (ΣaP - ΣbQ)|dζ|)` on a circle.
pub fn area_perimeter_variation(circle: &Circle, d: &WeightedDivisor, d_star: &WeightedDivisor) -> Result<(f64, f64)> {
    check_sides(circle, d, d_star)?;
    let area = periodic_trapezoid(
        |t| {
            let (p, q) = kernel_sums(circle, d, d_star, circle.point(t));
            (p - q) * circle.radius
        },
        1e-15,
    );
    Ok((area, area / circle.radius))
}

/// Circle map `θ ↦ λ Π ((e^{iθ} - x_j)/(1 - x̄_j e^{iθ}))^{a_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeldingMap {
    anchors: Vec<(Complex64, f64)>,
    rotation: Complex64,
    /// Set when the total weight is an integer other than one.
    pub degree_warning: bool,
}

impl WeldingMap {
    pub fn new(anchors: Vec<(Complex64, f64)>, rotation: Complex64) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::Parameter("no anchors".into()));
        }
        for (x, a) in &anchors {
            if !(x.norm() < 1.0) {
                return Err(Error::Branch(format!("anchor {x} is not inside the disc")));
            }
            if !(*a > 0.0) {
                return Err(Error::Parameter(format!("anchor weight {a}")));
            }
        }
        if (rotation.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("rotation {rotation} is not unimodular")));
        }
        let total: f64 = anchors.iter().map(|a| a.1).sum();
        let degree = total.round();
        if (total - degree).abs() > 1e-9 || degree < 1.0 {
            return Err(Error::Parameter(format!("total weight {total} is not a positive integer")));
        }
        Ok(WeldingMap { anchors, rotation, degree_warning: degree != 1.0 })
    }

    /// Continuous argument of `h(e^{iθ})`, increasing by `2π·degree` per turn.
    pub fn lift(&self, theta: f64) -> f64 {
        let e = Complex64::from_polar(1.0, theta);
        let one = Complex64::new(1.0, 0.0);
        let mut total = self.rotation.arg();
        for (x, a) in &self.anchors {
            let psi = theta + (one - *x * e.conj()).arg() - (one - x.conj() * e).arg();
            total += a * psi;
        }
        total
    }

    pub fn evaluate(&self, theta: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.lift(theta))
    }

    /// `Σ a_j P(x_j, e^{iθ})`, the derivative of the lift.
    pub fn lift_derivative(&self, theta: f64) -> f64 {
        let e = Complex64::from_polar(1.0, theta);
        self.anchors.iter().map(|(x, a)| a * (1.0 - x.norm_sqr()) / (x - e).norm_sqr()).sum()
    }
}

pub fn welding_evaluate(w: &WeldingMap, theta: f64) -> Complex64 {
    w.evaluate(theta)
}
