//! The four droplet boundaries for both figure parameter sets, written as SVG.
use hslab::stationary::{four_droplet_curves, FourDropletSpec};
use hslab::svg::{emit_svg, CurveStyle, StyledCurve, PALETTE};

fn main() -> hslab::Result<()> {
    for (x1, x2) in [(-0.5, 0.5), (-0.9, 0.9)] {
        let spec = FourDropletSpec::new(x1, x2, 6.0, 1.0)?;
        let curves = four_droplet_curves(&spec, 1e-6)?;
        let styled: Vec<StyledCurve> = curves
            .iter()
            .enumerate()
            .map(|(k, (_, lc))| StyledCurve { curve: lc.curve.clone(), style: CurveStyle::line(PALETTE[k]) })
            .collect();
        for (label, lc) in &curves {
            println!("x = ({x1}, {x2}) {label:?}: {} points", lc.curve.len());
        }
        let path = std::env::temp_dir().join(format!("four_droplet_{x2}.svg"));
        emit_svg(&styled, None, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
