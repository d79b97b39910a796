//! Closed-form complex-analytic primitives on the unit disc.
//!
//! Everything downstream (energies, Poisson kernels of circles, the
//! four-droplet potential) is reduced to these functions through explicit
//! affine or Möbius changes of variable.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used to decide membership of the unit circle.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// A point of the Riemann sphere. Infinity is never encoded as an IEEE infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(&self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(*z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::Finite(z)
    }
}

/// One weighted point of a divisor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: SpherePoint,
    pub weight: f64,
}

/// A positive divisor `Σ a_j z_j`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WeightedDivisor {
    atoms: Vec<Atom>,
}

impl WeightedDivisor {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for (k, a) in atoms.iter().enumerate() {
            if !(a.weight > 0.0) || !a.weight.is_finite() {
                return Err(Error::Parameter(format!("atom {k} has weight {}", a.weight)));
            }
            if let SpherePoint::Finite(z) = a.point {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::Parameter(format!("atom {k} is not finite")));
                }
            }
            for b in &atoms[..k] {
                if b.point == a.point {
                    return Err(Error::Parameter(format!("atom {k} repeats a point")));
                }
            }
        }
        Ok(WeightedDivisor { atoms })
    }

    /// Divisor with finite support given as `(point, weight)` pairs.
    pub fn finite(pairs: &[(Complex64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(z, w)| Atom { point: SpherePoint::Finite(z), weight: w })
                .collect(),
        )
    }

    pub fn point_at_infinity(weight: f64) -> Result<Self> {
        Self::new(vec![Atom { point: SpherePoint::Infinity, weight }])
    }

    pub fn empty() -> Self {
        WeightedDivisor { atoms: Vec::new() }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total weight `|d|`.
    pub fn weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.atoms
                .iter()
                .map(|a| Atom { point: a.point, weight: a.weight * factor })
                .collect(),
        )
    }

    /// Finite atoms as `(point, weight)`.
    pub fn finite_atoms(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        self.atoms.iter().filter_map(|a| a.point.finite().map(|z| (z, a.weight)))
    }

    pub fn infinite_weight(&self) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.point.is_infinite())
            .map(|a| a.weight)
            .sum()
    }
}

fn check_in_disc(z: Complex64, name: &str) -> Result<()> {
    if !(z.norm() < 1.0) {
        return Err(Error::Domain(format!("{name} = {z} is not in the open unit disc")));
    }
    Ok(())
}

fn check_on_circle(z: Complex64, name: &str) -> Result<()> {
    if !((z.norm() - 1.0).abs() <= BOUNDARY_TOL) {
        return Err(Error::Domain(format!("{name} = {z} is not on the unit circle")));
    }
    Ok(())
}

/// Green's function of the unit disc, `log |(1 - z w̄) / (z - w)|`.
pub fn greens_disc(z: Complex64, w: Complex64) -> Result<f64> {
    check_in_disc(z, "z")?;
    check_in_disc(w, "w")?;
    if z == w {
        return Err(Error::Pole(format!("z = w = {z}")));
    }
    let num = Complex64::new(1.0, 0.0) - z * w.conj();
    Ok(num.norm().ln() - (z - w).norm().ln())
}

/// Poisson kernel of the unit disc without the `1/2π` factor.
pub fn poisson_disc(z: Complex64, zeta: Complex64) -> Result<f64> {
    check_in_disc(z, "z")?;
    check_on_circle(zeta, "zeta")?;
    Ok((1.0 - z.norm_sqr()) / (z - zeta).norm_sqr())
}

/// `Σ a_k G(z, z_k)` for a divisor supported in the disc.
pub fn greens_divisor_disc(d: &WeightedDivisor, z: Complex64) -> Result<f64> {
    let mut total = 0.0;
    for a in d.atoms() {
        let w = a
            .point
            .finite()
            .ok_or_else(|| Error::Domain("divisor atom at infinity".into()))?;
        total += a.weight * greens_disc(z, w)?;
    }
    Ok(total)
}

/// Conformal radius of the disc `|z - center| < radius` seen from `at`.
pub fn conformal_radius_disc(center: Complex64, radius: f64, at: Complex64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::Parameter(format!("radius {radius}")));
    }
    let r2 = (at - center).norm_sqr();
    if !(r2 < radius * radius) {
        return Err(Error::Domain(format!("{at} is outside the disc")));
    }
    Ok((radius * radius - r2) / radius)
}

/// Disc automorphism `z ↦ λ (z - x) / (1 - x̄ z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscAutomorphism {
    pub x: Complex64,
    pub rotation: Complex64,
}

impl DiscAutomorphism {
    pub fn new(x: Complex64, rotation: Complex64) -> Result<Self> {
        check_in_disc(x, "x")?;
        if (rotation.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("rotation {rotation} is not unimodular")));
        }
        Ok(DiscAutomorphism { x, rotation })
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.rotation * (z - self.x) / (Complex64::new(1.0, 0.0) - self.x.conj() * z)
    }

    pub fn inverse(&self) -> DiscAutomorphism {
        let lam = self.rotation;
        DiscAutomorphism { x: -lam * self.x, rotation: lam.conj() }
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = Complex64::new(1.0, 0.0) - self.x.conj() * z;
        self.rotation * (1.0 - self.x.norm_sqr()) / (den * den)
    }
}

/// Möbius transformation `z ↦ (a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-14 {
            return Err(Error::Degenerate("Möbius map with zero determinant".into()));
        }
        Ok(Mobius { a, b, c, d })
    }

    pub fn affine(scale: Complex64, shift: Complex64) -> Result<Self> {
        Self::new(scale, shift, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn apply(&self, z: Complex64) -> SpherePoint {
        let den = self.c * z + self.d;
        if den == Complex64::new(0.0, 0.0) {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite((self.a * z + self.b) / den)
        }
    }

    pub fn apply_sphere(&self, p: SpherePoint) -> SpherePoint {
        match p {
            SpherePoint::Finite(z) => self.apply(z),
            SpherePoint::Infinity => {
                if self.c == Complex64::new(0.0, 0.0) {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a / self.c)
                }
            }
        }
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.c * z + self.d;
        (self.a * self.d - self.b * self.c) / (den * den)
    }

    pub fn inverse(&self) -> Mobius {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Preimage of infinity, if finite.
    pub fn pole(&self) -> SpherePoint {
        if self.c == Complex64::new(0.0, 0.0) {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite(-self.d / self.c)
        }
    }
}

/// A round circle in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Parameter(format!("circle radius {radius}")));
        }
        Ok(Circle { center, radius })
    }

    pub fn unit() -> Self {
        Circle { center: Complex64::new(0.0, 0.0), radius: 1.0 }
    }

    /// Image of the unit circle under a Möbius map whose pole is off the circle.
    pub fn mobius_image(m: &Mobius) -> Result<Self> {
        let pts: Vec<Complex64> = [0.0, 2.0, 4.0]
            .iter()
            .map(|t: &f64| match m.apply(Complex64::from_polar(1.0, *t)) {
                SpherePoint::Finite(z) => Ok(z),
                SpherePoint::Infinity => Err(Error::UnsupportedDomain("image circle passes through infinity".into())),
            })
            .collect::<Result<_>>()?;
        circumcircle(pts[0], pts[1], pts[2])
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    pub fn point(&self, theta: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, theta)
    }

    /// Poisson kernel of the inside disc (no `1/2π`), in arclength measure.
    pub fn poisson_inside(&self, z: Complex64, zeta: Complex64) -> f64 {
        (self.radius * self.radius - (z - self.center).norm_sqr()) / (self.radius * (z - zeta).norm_sqr())
    }

    /// Poisson kernel of the outside domain at a finite point or at infinity.
    pub fn poisson_outside(&self, w: SpherePoint, zeta: Complex64) -> f64 {
        match w {
            SpherePoint::Infinity => 1.0 / self.radius,
            SpherePoint::Finite(w) => {
                ((w - self.center).norm_sqr() - self.radius * self.radius) / (self.radius * (w - zeta).norm_sqr())
            }
        }
    }
}

/// Circle through three points.
pub fn circumcircle(a: Complex64, b: Complex64, c: Complex64) -> Result<Circle> {
    let d = 2.0 * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
    if d.abs() < 1e-300 {
        return Err(Error::Degenerate("collinear points".into()));
    }
    let (a2, b2, c2) = (a.norm_sqr(), b.norm_sqr(), c.norm_sqr());
    let ux = (a2 * (b.im - c.im) + b2 * (c.im - a.im) + c2 * (a.im - b.im)) / d;
    let uy = (a2 * (c.re - b.re) + b2 * (a.re - c.re) + c2 * (b.re - a.re)) / d;
    let center = Complex64::new(ux, uy);
    Circle::new(center, (a - center).norm())
}
