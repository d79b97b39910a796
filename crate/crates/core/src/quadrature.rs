//! Quadrature rules shared by the analytic modules.

use num_complex::Complex64;

/// Integral of a smooth `2π`-periodic function over one period.
///
/// The trapezoid rule converges geometrically for analytic periodic
/// integrands; the node count doubles until two successive estimates agree.
pub fn periodic_trapezoid<F: FnMut(f64) -> f64>(mut f: F, tol: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut n = 16usize;
    let mut sum: f64 = (0..n).map(|k| f(two_pi * k as f64 / n as f64)).sum();
    let mut estimate = sum * two_pi / n as f64;
    while n < (1 << 22) {
        // the new nodes interleave the old ones
        let extra: f64 = (0..n).map(|k| f(two_pi * (k as f64 + 0.5) / n as f64)).sum();
        sum += extra;
        n *= 2;
        let next = sum * two_pi / n as f64;
        if (next - estimate).abs() <= tol * (1.0 + next.abs()) {
            return next;
        }
        estimate = next;
    }
    estimate
}

pub const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
pub const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Five-point Gauss–Legendre approximation of `∫ g(z) dz` along the segment `a → b`.
pub fn gauss_segment<F: FnMut(Complex64) -> Complex64>(a: Complex64, b: Complex64, mut g: F) -> Complex64 {
    let mid = (a + b) * 0.5;
    let half = (b - a) * 0.5;
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        acc += g(mid + half * *x) * *w;
    }
    acc * half
}
