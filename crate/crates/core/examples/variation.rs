//! Hadamard gradient and area variation for a source off the centre.
use hslab::kernels::{Circle, WeightedDivisor};
use hslab::stationary::{area_perimeter_variation, hadamard_gradient_quadrature};
use hslab::Complex64;

fn main() -> hslab::Result<()> {
    let inf = WeightedDivisor::point_at_infinity(1.0)?;
    for x in [0.0, 0.2, 0.4, 0.6, 0.8] {
        let d = WeightedDivisor::finite(&[(Complex64::new(x, 0.0), 1.0)])?;
        let g = hadamard_gradient_quadrature(&Circle::unit(), &d, &inf)?;
        let (a, p) = area_perimeter_variation(&Circle::unit(), &d, &inf)?;
        println!("source at {x}: gradient {g:.10} area {a:.3e} perimeter {p:.3e}");
    }
    Ok(())
}
