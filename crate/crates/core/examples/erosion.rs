//! Plane pair erosion run with snapshots and the invariant checker on.
use hslab::erosion::{check_invariants, discrete_energy, plane_pair_setup, run, ClockMode, RunOptions};

fn main() -> hslab::Result<()> {
    let state = plane_pair_setup(0.05, 0.2)?;
    println!("initial energy {:.4}", discrete_energy(&state)?);
    let out = run(state, 5.0, ClockMode::Poisson, 7, &[1.0, 2.5, 5.0], RunOptions::default())?;
    for s in &out.snapshots {
        let counts: Vec<usize> = s.droplets.iter().map(|d| d.cell_count()).collect();
        println!("t = {}: cell counts {counts:?}", s.time);
    }
    let m = &out.summary;
    println!("{} events, {} captures, {} source-square, {} rejected", m.events, m.captures, m.source_square, m.rejected);
    println!("final energy {:.4}, invariants ok {}", discrete_energy(&out.state)?, check_invariants(&out.state).is_ok());
    Ok(())
}
