//! Small mesh ladder against the closed trajectory loop, with an SVG overlay.
use hslab::compare::{convergence_study, lattice_interface_to_curve, StudyConfig, StudySetup};
use hslab::erosion::{plane_pair_setup, run, ClockMode, RunOptions};
use hslab::svg::{emit_svg, CellRaster, CurveStyle, StyledCurve};

fn main() -> hslab::Result<()> {
    let target = hslab::cli::three_source_loop()?;
    let cfg = StudyConfig {
        setup: StudySetup::PlanePair,
        meshes: vec![0.1, 0.05],
        seeds: vec![1, 2, 3],
        t_end: 5.0,
        radius: 0.2,
        droplet: 1,
        target: Some(target.clone()),
        stabilization: vec![(2.5, 5.0)],
        mode: ClockMode::Poisson,
        threads: None,
    };
    let report = convergence_study(&cfg)?;
    print!("{}", report.to_csv());

    let out = run(plane_pair_setup(0.05, 0.2)?, 5.0, ClockMode::Poisson, 1, &[5.0], RunOptions::default())?;
    let inner = lattice_interface_to_curve(&out.state, 1)?;
    let curves = [
        StyledCurve { curve: target, style: CurveStyle::line("black") },
        StyledCurve { curve: inner, style: CurveStyle::line("#1b9e77") },
    ];
    let path = std::env::temp_dir().join("compare.svg");
    emit_svg(&curves, Some(&CellRaster::from_snapshot(&out.snapshots[0])), &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
