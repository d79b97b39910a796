//! Command execution behind the `hslab` binary. Each command reads its
//! section of a [`RunConfig`] and writes CSV, JSON and SVG files into the
//! output directory, together with the effective configuration.

use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::compare::{convergence_study, lattice_interface_to_curve, StudyConfig, StudySetup};
use crate::config::{divisor_from_rows, Command, RunConfig, Target};
use crate::curve::PathCurve;
use crate::erosion::{self, check_invariants, discrete_energy, plane_pair_setup, torus_pair_setup, RunOptions, Snapshot};
use crate::error::{Error, Result};
use crate::greens_surface::{from_weighted_tree, greens_value, layout, validate_greens_type, GreensTypeSurface, SurfacePoint};
use crate::kernels::{Circle, WeightedDivisor};
use crate::quad_diff::{build_three_source, critical_graph, finite_critical_points, residue_sqrt, GraphOptions};
use crate::stationary::{
    area_perimeter_variation, four_droplet_curves, hadamard_gradient_quadrature, potential_value, reduced_energy_circle_pair,
    reduced_energy_general, trace_level, DiscDomain, FourDropletSpec, LevelPotential,
};
use crate::svg::{render_svg, CellRaster, CurveStyle, StyledCurve, PALETTE};

const SCHEMA_PREFIX: &str = "hslab.";

struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Outputs {
    fn put(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents)?;
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, schema: &str, value: &T) -> Result<()> {
        let mut v = serde_json::to_value(value)?;
        if let serde_json::Value::Object(m) = &mut v {
            m.insert("schema".into(), serde_json::Value::String(format!("{SCHEMA_PREFIX}{schema}.v1")));
        }
        self.put(name, &(serde_json::to_string_pretty(&v)? + "\n"))
    }
}

fn curves_csv(curves: &[(String, &PathCurve)]) -> String {
    let mut out = String::from("curve,index,x,y\n");
    for (name, c) in curves {
        for (k, z) in c.points.iter().enumerate() {
            let _ = writeln!(out, "{name},{k},{},{}", z.re, z.im);
        }
    }
    out
}

fn styled(curves: &[(String, &PathCurve)]) -> Vec<StyledCurve> {
    curves
        .iter()
        .enumerate()
        .map(|(k, (_, c))| StyledCurve { curve: (*c).clone(), style: CurveStyle::line(PALETTE[k % PALETTE.len()]) })
        .collect()
}

/// Runs the configured command and returns the files written.
pub fn execute(config: &RunConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let command = config.command.ok_or_else(|| Error::Config("no command given".into()))?;
    std::fs::create_dir_all(&config.output_dir)?;
    let mut out = Outputs { dir: config.output_dir.clone(), written: Vec::new() };
    out.put("effective_config.json", &(config.effective_json() + "\n"))?;
    match command {
        Command::TraceQd => trace_qd(config, &mut out)?,
        Command::Lemniscate => lemniscate(config, &mut out)?,
        Command::FourDroplet => four_droplet(config, &mut out)?,
        Command::Energy => energy(config, &mut out)?,
        Command::Variation => variation(config, &mut out)?,
        Command::Surface => surface(config, &mut out)?,
        Command::Erode => erode(config, &mut out)?,
        Command::Compare => compare(config, &mut out)?,
    }
    Ok(out.written)
}

fn trace_qd(config: &RunConfig, out: &mut Outputs) -> Result<()> {
    let t = &config.trace_qd;
    let qd = build_three_source(t.a0, t.a1, t.a_inf)?;
    let crit = finite_critical_points(&qd)?;
    let graph = critical_graph(&qd, GraphOptions { step: t.step, max_arclen: t.max_arclen })?;
    let residues: Vec<(Complex64, f64)> = qd
        .finite_poles()
        .filter_map(|p| residue_sqrt(&qd, crate::kernels::SpherePoint::Finite(p)).ok().map(|r| (p, r)))
        .collect();
    #[derive(Serialize)]
    struct Summary<'a> {
        critical_points: &'a [crate::quad_diff::CriticalPoint],
        residues: Vec<(Complex64, f64)>,
        edges: Vec<(usize, String, f64)>,
    }
    let edges = graph.edges.iter().map(|e| (e.from, format!("{:?}", e.end), e.closure_gap)).collect();
    out.json("critical_graph.json", "critical_graph", &Summary { critical_points: &crit, residues, edges })?;
    let named: Vec<(String, &PathCurve)> = graph.edges.iter().enumerate().map(|(k, e)| (format!("edge{k}"), &e.curve)).collect();
    out.put("trajectories.csv", &curves_csv(&named))?;
    if config.svg {
        out.put("trajectories.svg", &render_svg(&styled(&named), None))?;
    }
    Ok(())
}

fn lemniscate(config: &RunConfig, out: &mut Outputs) -> Result<()> {
    let l = &config.lemniscate;
    let r = LevelPotential::new(divisor_from_rows(&l.pos, 0.0)?, divisor_from_rows(&l.neg, 0.0)?)?;
    let seed = Complex64::new(l.seed[0], l.seed[1]);
    let level = match l.level {
        Some(v) => v,
        None => potential_value(&r, seed)?,
    };
    let lc = trace_level(&r, level, seed)?;
    #[derive(Serialize)]
    struct Summary {
        level: f64,
        points: usize,
        is_jordan: bool,
        separates: bool,
        length: f64,
    }
    out.json(
        "lemniscate.json",
        "lemniscate",
        &Summary { level, points: lc.curve.len(), is_jordan: lc.is_jordan, separates: lc.separates, length: lc.curve.arclength() },
    )?;
    let named = vec![("level".to_string(), &lc.curve)];
    out.put("lemniscate.csv", &curves_csv(&named))?;
    if config.svg {
        out.put("lemniscate.svg", &render_svg(&styled(&named), None))?;
    }
    Ok(())
}

fn four_droplet(config: &RunConfig, out: &mut Outputs) -> Result<()> {
    let f = &config.four_droplet;
    let spec = FourDropletSpec::new(f.x1, f.x2, f.a, f.b)?;
    let curves = four_droplet_curves(&spec, f.eps)?;
    #[derive(Serialize)]
    struct Row {
        label: String,
        level: f64,
        points: usize,
        is_jordan: bool,
        separates: bool,
    }
    let rows: Vec<Row> = curves
        .iter()
        .map(|(label, lc)| Row { label: format!("{label:?}"), level: lc.level, points: lc.curve.len(), is_jordan: lc.is_jordan, separates: lc.separates })
        .collect();
    #[derive(Serialize)]
    struct Summary {
        spec: FourDropletSpec,
        curves: Vec<Row>,
    }
    out.json("four_droplet.json", "four_droplet", &Summary { spec, curves: rows })?;
    let mut named: Vec<(String, &PathCurve)> = curves.iter().map(|(label, lc)| (format!("{label:?}"), &lc.curve)).collect();
    let unit = Circle::unit();
    let circle = PathCurve::closed((0..720).map(|k| unit.point(std::f64::consts::TAU * k as f64 / 720.0)).collect());
    out.put("four_droplet.csv", &curves_csv(&named))?;
    if config.svg {
        named.push(("unit".into(), &circle));
        let mut s = styled(&named);
        s.last_mut().expect("unit circle").style = CurveStyle { stroke: "#999999".into(), width: 1.0, fill: None };
        out.put("four_droplet.svg", &render_svg(&s, None))?;
    }
    Ok(())
}

fn energy(config: &RunConfig, out: &mut Outputs) -> Result<()> {
    let e = &config.energy;
    let center = Complex64::new(e.center[0], e.center[1]);
    let pair = reduced_energy_circle_pair(center, e.radius)?;
    let d = if e.divisor.is_empty() {
        WeightedDivisor::finite(&[(Complex64::new(0.0, 0.0), 1.0)])?
    } else {
        divisor_from_rows(&e.divisor, 0.0)?
    };
    let general = reduced_energy_general(&DiscDomain::Disc { center, radius: e.radius }, &d)?;
    #[derive(Serialize)]
    struct Summary {
        center: [f64; 2],
        radius: f64,
        circle_pair: f64,
        general: f64,
    }
    out.json("energy.json", "energy", &Summary { center: e.center, radius: e.radius, circle_pair: pair, general })?;
    out.put("energy.csv", &format!("center_x,center_y,radius,circle_pair,general\n{},{},{},{pair},{general}\n", e.center[0], e.center[1], e.radius))
}

fn variation(config: &RunConfig, out: &mut Outputs) -> Result<()> {
    let v = &config.variation;
    let circle = Circle::new(Complex64::new(v.center[0], v.center[1]), v.radius)?;
    let d = divisor_from_rows(&v.d, 0.0)?;
    let d_star = divisor_from_rows(&v.d_star, v.d_star_infinity)?;
    let gradient = hadamard_gradient_quadrature(&circle, &d, &d_star)?;
    let (area, perimeter) = area_perimeter_variation(&circle, &d, &d_star)?;
    #[derive(Serialize)]
    struct Summary {
        gradient: f64,
        area: f64,
        perimeter: f64,
        area_expected: f64,
    }
    let expected = std::f64::consts::TAU * (d.weight() - d_star.weight());
    out.json("variation.json", "variation", &Summary { gradient, area, perimeter, area_expected: expected })?;
    out.put("variation.csv", &format!("gradient,area,perimeter,area_expected\n{gradient},{area},{perimeter},{expected}\n"))
}

fn surface(config: &RunConfig, out: &mut Outputs) -> Result<()> {
    let s = &config.surface;
    let t = from_weighted_tree(&s.tree).map_err(|e| Error::Config(format!("surface.tree: {e}")))?;
    let pieces = layout(&t, s.y0, s.x_min);
    let mut samples = String::from("path,x,y,green\n");
    for p in &pieces {
        let n = p.corners.len() as f64;
        let mid = p.corners.iter().sum::<Complex64>() / n;
        let local = mid - p.corners[0];
        let point = SurfacePoint::new(p.path.clone(), local);
        if let Ok(g) = greens_value(&t, &point) {
            let path: Vec<String> = p.path.iter().map(|k| k.to_string()).collect();
            let _ = writeln!(samples, "{},{},{},{g}", path.join("/"), mid.re, mid.im);
        }
    }
    let slit = validate_greens_type(&GreensTypeSurface::slit_plane());
    #[derive(Serialize)]
    struct Summary<'a> {
        height: f64,
        weight: f64,
        depth: usize,
        leaves: usize,
        pieces: &'a [crate::greens_surface::LayoutPiece],
        slit_plane_valid: bool,
    }
    out.json(
        "surface.json",
        "surface",
        &Summary { height: t.height(), weight: t.weight(), depth: t.depth(), leaves: t.leaf_count(), pieces: &pieces, slit_plane_valid: slit.is_valid() },
    )?;
    out.put("surface.csv", &samples)?;
    if config.svg {
        let outlines: Vec<StyledCurve> = pieces
            .iter()
            .map(|p| StyledCurve {
                curve: PathCurve::closed(p.corners.clone()),
                style: CurveStyle { stroke: "#333333".into(), width: 1.0, fill: Some(if p.is_strip { "#cfe8f3" } else { "#f3e3cf" }.into()) },
            })
            .collect();
        out.put("surface.svg", &render_svg(&outlines, None))?;
    }
    Ok(())
}

fn erode(config: &RunConfig, out: &mut Outputs) -> Result<()> {
    let e = &config.erode;
    let state = match e.setup {
        StudySetup::PlanePair => plane_pair_setup(e.mesh, e.radius)?,
        StudySetup::TorusPair => torus_pair_setup(e.mesh, e.radius)?,
    };
    let e0 = discrete_energy(&state)?;
    let opts = RunOptions { check_every: e.check_every, log_events: e.log_events, ..Default::default() };
    let result = erosion::run(state, e.t_end, e.mode, config.seed, &e.snapshot_times, opts)?;
    let report = check_invariants(&result.state);
    if !report.is_ok() {
        return Err(Error::InvariantViolation(report.violations.join("; ")));
    }
    let final_snap = Snapshot::capture(&result.state, e.t_end);
    let e1 = discrete_energy(&result.state)?;
    #[derive(Serialize)]
    struct Summary<'a> {
        seed: u64,
        t_end: f64,
        summary: &'a erosion::RunSummary,
        cell_counts: Vec<usize>,
        energy_start: f64,
        energy_end: f64,
    }
    let counts = final_snap.droplets.iter().map(|d| d.cell_count()).collect();
    out.json(
        "erode_summary.json",
        "erode_summary",
        &Summary { seed: config.seed, t_end: e.t_end, summary: &result.summary, cell_counts: counts, energy_start: e0, energy_end: e1 },
    )?;
    let mut all = result.snapshots.clone();
    all.push(final_snap.clone());
    out.put("snapshots.json", &(serde_json::to_string(&all)? + "\n"))?;
    if e.log_events {
        out.put("events.csv", &result.event_log)?;
    }
    if config.svg {
        let curves: Vec<StyledCurve> = (0..result.state.droplet_count())
            .map(|k| {
                Ok(StyledCurve { curve: lattice_interface_to_curve(&result.state, k)?, style: CurveStyle::line("#000000") })
            })
            .collect::<Result<_>>()?;
        out.put("final.svg", &render_svg(&curves, Some(&CellRaster::from_snapshot(&final_snap))))?;
    }
    Ok(())
}

/// The closed critical trajectory for weights (2, 1, 0).
pub fn three_source_loop() -> Result<PathCurve> {
    let qd = build_three_source(2.0, 1.0, 0.0)?;
    let graph = critical_graph(&qd, GraphOptions::default())?;
    graph
        .loop_edge()
        .map(|e| e.curve.clone())
        .ok_or_else(|| Error::Degenerate("no closed critical trajectory".into()))
}

fn compare(config: &RunConfig, out: &mut Outputs) -> Result<()> {
    let c = &config.compare;
    let target = match c.target {
        Target::ThreeSourceLoop => Some(three_source_loop()?),
        Target::None => None,
    };
    let study = StudyConfig {
        setup: c.setup,
        meshes: c.meshes.clone(),
        seeds: c.seeds.clone(),
        t_end: c.t_end,
        radius: c.radius,
        droplet: c.droplet,
        target: target.clone(),
        stabilization: c.stabilization.iter().map(|&[a, b]| (a, b)).collect(),
        mode: c.mode,
        threads: c.threads,
    };
    let report = convergence_study(&study)?;
    out.put("comparison.json", &(serde_json::to_string_pretty(&report)? + "\n"))?;
    out.put("comparison.csv", &report.to_csv())?;
    if config.svg {
        if let Some(t) = target {
            let c = vec![StyledCurve { curve: t, style: CurveStyle::line("#000000") }];
            out.put("target.svg", &render_svg(&c, None))?;
        }
    }
    Ok(())
}
