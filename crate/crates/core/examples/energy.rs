//! Reduced Green's energy of discs.
use hslab::kernels::WeightedDivisor;
use hslab::stationary::{reduced_energy_circle_pair, reduced_energy_general, DiscDomain};
use hslab::Complex64;

fn main() -> hslab::Result<()> {
    for x in [0.0, 0.25, 0.5, 0.75] {
        let e = reduced_energy_circle_pair(Complex64::new(x, 0.0), 1.0)?;
        println!("unit circle centred at {x}: {e:.12}");
    }
    let d = WeightedDivisor::finite(&[(Complex64::new(0.3, 0.0), 1.0), (Complex64::new(-0.3, 0.0), 1.0)])?;
    println!("two unit sources at +-0.3: {:.12}", reduced_energy_general(&DiscDomain::UnitDisc, &d)?);
    Ok(())
}
