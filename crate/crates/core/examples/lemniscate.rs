//! Level line of `-(1/3) Σ log|z - p_j|` through `z = 1`.
use hslab::kernels::WeightedDivisor;
use hslab::stationary::{trace_level, LevelPotential, Potential};
use hslab::Complex64;

fn main() -> hslab::Result<()> {
    let third = 1.0 / 3.0;
    let pts = [Complex64::new(0.5, 0.0), Complex64::new(-0.25, 0.4), Complex64::new(-0.25, -0.4)];
    let r = LevelPotential::new(WeightedDivisor::empty(), WeightedDivisor::finite(&pts.map(|p| (p, third)))?)?;
    let seed = Complex64::new(1.0, 0.0);
    let lc = trace_level(&r, r.value(seed)?, seed)?;
    println!("{} points, jordan {}, separates {}", lc.curve.len(), lc.is_jordan, lc.separates);
    println!("length {:.6}", lc.curve.arclength());
    Ok(())
}
