//! Dense complex polynomials.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polynomial with coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Poly { coeffs }
    }

    pub fn real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `z - a`.
    pub fn linear_factor(a: Complex64) -> Self {
        Self::new(vec![-a, Complex64::new(1.0, 0.0)])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::constant(Complex64::new(0.0, 0.0));
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Poly, k: usize| p.coeffs.get(k).copied().unwrap_or_default();
        Poly::new((0..n).map(|k| get(self, k) + get(other, k)).collect())
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Taylor coefficient of order `k` at `z0`.
    pub fn taylor(&self, z0: Complex64, k: usize) -> Complex64 {
        let mut p = self.clone();
        let mut fact = 1.0;
        for j in 0..k {
            p = p.derivative();
            fact *= (j + 1) as f64;
        }
        p.eval(z0) / fact
    }

    /// All roots, repeated by multiplicity.
    ///
    /// Degrees one and two use closed forms; higher degrees use the
    /// eigenvalues of the companion matrix polished by Newton steps.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() {
            return Err(Error::Degenerate("zero polynomial".into()));
        }
        let c = &self.coeffs;
        match self.degree() {
            0 => Ok(Vec::new()),
            1 => Ok(vec![-c[0] / c[1]]),
            2 => {
                let (a, b, cc) = (c[2], c[1], c[0]);
                let disc = (b * b - a * cc * 4.0).sqrt();
                // pick the sign that avoids cancellation
                let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) * 0.5 } else { -(b - disc) * 0.5 };
                if q == Complex64::new(0.0, 0.0) {
                    return Ok(vec![Complex64::new(0.0, 0.0); 2]);
                }
                let mut r = vec![q / a, cc / q];
                r.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap()));
                Ok(r)
            }
            n => {
                let lead = c[n];
                let mut m = DMatrix::<Complex64>::zeros(n, n);
                for i in 1..n {
                    m[(i, i - 1)] = Complex64::new(1.0, 0.0);
                }
                for i in 0..n {
                    m[(i, n - 1)] = -c[i] / lead;
                }
                let eig = m
                    .eigenvalues()
                    .ok_or_else(|| Error::Degenerate("companion eigen solve did not converge".into()))?;
                let d = self.derivative();
                let mut roots: Vec<Complex64> = eig
                    .iter()
                    .map(|&z0| {
                        let mut z = z0;
                        for _ in 0..3 {
                            let dz = d.eval(z);
                            if dz.norm() == 0.0 {
                                break;
                            }
                            let next = z - self.eval(z) / dz;
                            if !next.re.is_finite() || !next.im.is_finite() {
                                break;
                            }
                            z = next;
                        }
                        z
                    })
                    .collect();
                roots.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap()));
                Ok(roots)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root_is_exact() {
        let p = Poly::real(&[4.0, -3.0]);
        assert_eq!(p.roots().unwrap(), vec![Complex64::new(4.0 / 3.0, 0.0)]);
    }

    #[test]
    fn quadratic_roots_back_substitute() {
        let p = Poly::real(&[1.0, -1.0, 1.0]);
        for r in p.roots().unwrap() {
            assert!(p.eval(r).norm() < 1e-12);
        }
    }

    #[test]
    fn companion_roots_for_quartic() {
        let roots = [1.0, -2.0, 0.5, 3.0].map(|r| Complex64::new(r, 0.3 * r));
        let p = roots
            .iter()
            .fold(Poly::constant(Complex64::new(1.0, 0.0)), |acc, r| acc.mul(&Poly::linear_factor(*r)));
        let found = p.roots().unwrap();
        for r in roots {
            assert!(found.iter().any(|f| (f - r).norm() < 1e-10));
        }
    }

    #[test]
    fn taylor_coefficients() {
        let p = Poly::real(&[1.0, 2.0, 3.0]);
        let z0 = Complex64::new(1.0, 0.0);
        assert_eq!(p.taylor(z0, 0), Complex64::new(6.0, 0.0));
        assert_eq!(p.taylor(z0, 1), Complex64::new(8.0, 0.0));
        assert_eq!(p.taylor(z0, 2), Complex64::new(3.0, 0.0));
    }
}
