//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Exits nonzero when a criterion fails that is not listed in `KNOWN_UNATTAINABLE`.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hslab::compare::{convergence_study, StudyConfig, StudySetup};
use hslab::erosion::{
    check_invariants, discrete_energy, plane_pair_setup, run, single_event, torus_pair_setup, ClockMode, DropletSpec, ErosionState,
    EventOutcome, InterfaceChange, RunOptions, Simulation, Snapshot,
};
use hslab::greens_surface::{
    from_weighted_tree, greens_value, to_weighted_tree, validate_greens_type, GreensSurface, GreensTypeSurface, SurfacePoint, WeightedTree,
};
use hslab::kernels::{Atom, Circle, Mobius, SpherePoint, WeightedDivisor};
use hslab::lattice::{CellId, ScriptedSteps, TiledSurface, Vertex};
use hslab::quad_diff::{
    build_three_source, critical_graph, finite_critical_points, level_along, residue_sqrt, trace_vertical, GraphOptions, TrajectoryEnd,
};
use hslab::stationary::{
    area_perimeter_variation, four_droplet_curves, hadamard_gradient_quadrature, reduced_energy_circle_pair, FourDropletSpec, Potential,
};
use hslab::svg::{render_svg, CurveStyle, StyledCurve};
use hslab::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose failure is recorded as unattainable in the decisions ledger.
const KNOWN_UNATTAINABLE: [usize; 1] = [13];

struct Outcome {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn secs(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn critical_point() -> Outcome {
    let q = build_three_source(2.0, 1.0, 0.0).unwrap();
    let cps = finite_critical_points(&q).unwrap();
    let mut times: Vec<f64> = (0..101)
        .map(|_| {
            let t = Instant::now();
            let _ = finite_critical_points(&q).unwrap();
            t.elapsed().as_secs_f64()
        })
        .collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let err = cps.first().map(|p| (p.point - c(4.0 / 3.0, 0.0)).norm()).unwrap_or(f64::INFINITY);
    let t = times[50];
    verdict(cps.len() == 1 && err < 1e-12 && t < 1e-3, format!("points {} error {err:.2e} median runtime {:.1}us", cps.len(), t * 1e6))
}

fn residues() -> Outcome {
    let t = Instant::now();
    let q = build_three_source(2.0, 1.0, 0.0).unwrap();
    let r0 = residue_sqrt(&q, SpherePoint::Finite(c(0.0, 0.0))).unwrap();
    let r1 = residue_sqrt(&q, SpherePoint::Finite(c(1.0, 0.0))).unwrap();
    let el = t.elapsed();
    let pass = (r0 - 1.0).abs() < 1e-8 && (r1 - 0.5).abs() < 1e-8 && el < Duration::from_millis(100);
    verdict(pass, format!("res0 {r0:.12} res1 {r1:.12} runtime {}", secs(el)))
}

fn loop_trajectory() -> Outcome {
    let t = Instant::now();
    let q = build_three_source(2.0, 1.0, 0.0).unwrap();
    let tr = trace_vertical(&q, c(4.0 / 3.0, 0.0), Complex64::from_polar(1.0, TAU / 3.0), 1e-3, 50.0).unwrap();
    let el = t.elapsed();
    let w1 = tr.curve.winding_number(c(1.0, 0.0));
    let w0 = tr.curve.winding_number(c(0.0, 0.0));
    let sym = hslab::compare::hausdorff(&tr.curve, &tr.curve.conj()).unwrap();
    let pass = tr.end == TrajectoryEnd::Closed && tr.closure_gap < 1e-5 && w1 == 1 && w0 == 0 && sym < 1e-5 && el < Duration::from_secs(5);
    verdict(pass, format!("gap {:.2e} winding(1) {w1} winding(0) {w0} conj-hausdorff {sym:.2e} runtime {}", tr.closure_gap, secs(el)))
}

fn level_fidelity() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut traced, mut failed, mut worst_ratio) = (0usize, 0usize, 0.0f64);
    let mut errors = 0usize;
    for _ in 0..50 {
        let a0 = rng.gen_range(0.2..3.0);
        let a1 = rng.gen_range(0.2..3.0);
        let a_inf = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.2..3.0) };
        let q = build_three_source(a0, a1, a_inf).unwrap();
        let g = critical_graph(&q, GraphOptions::default()).unwrap();
        for e in &g.edges {
            if e.error.is_some() {
                errors += 1;
                continue;
            }
            traced += 1;
            let len = e.curve.arclength();
            let drift = level_along(&q, &e.curve).iter().fold(0.0f64, |m, d| m.max(d.abs()));
            let ratio = drift / (1e-6 * (1.0 + len));
            worst_ratio = worst_ratio.max(ratio);
            if ratio >= 1.0 {
                failed += 1;
            }
        }
    }
    let el = t.elapsed();
    let pass = failed == 0 && errors == 0 && traced > 0 && el < Duration::from_secs(60);
    verdict(
        pass,
        format!("{traced} trajectories, {failed} over budget, {errors} untraceable, worst drift/budget {worst_ratio:.3} runtime {}", secs(el)),
    )
}

fn energy_identities() -> Outcome {
    let closed: Vec<f64> = [0.5, 1.0, 2.0].iter().map(|&r| reduced_energy_circle_pair(c(0.0, 0.0), r).unwrap()).collect();
    let exact = closed.iter().all(|&v| v == 0.0);
    // numeric route: log conformal radius at the centre minus log radius
    let numeric_worst = [0.5f64, 1.0, 2.0]
        .iter()
        .map(|&r| (hslab::kernels::conformal_radius_disc(c(0.0, 0.0), r, c(0.0, 0.0)).unwrap().ln() - r.ln()).abs())
        .fold(0.0, f64::max);
    let v = reduced_energy_circle_pair(c(0.5, 0.0), 1.0).unwrap();
    let oracle = (1.0 - 0.25f64).ln();
    let pass = exact && numeric_worst < 1e-12 && (v - oracle).abs() < 1e-10;
    verdict(pass, format!("centred values {closed:?} numeric {numeric_worst:.1e} offset value {v:.15} vs log 0.75 {oracle:.15}"))
}

fn random_point_off(rng: &mut ChaCha8Rng, circle: &Circle, inside: bool) -> Complex64 {
    loop {
        let rho = if inside { rng.gen_range(0.0..0.9) } else { rng.gen_range(1.15..4.0) };
        let z = circle.center + Complex64::from_polar(circle.radius * rho, rng.gen_range(0.0..TAU));
        if circle.contains(z) == inside {
            return z;
        }
    }
}

fn random_divisors(rng: &mut ChaCha8Rng, circle: &Circle) -> (WeightedDivisor, WeightedDivisor) {
    let n_in = rng.gen_range(1..4);
    let d: Vec<(Complex64, f64)> = (0..n_in).map(|_| (random_point_off(rng, circle, true), rng.gen_range(0.1..2.0))).collect();
    let n_out = rng.gen_range(0..3);
    let mut atoms: Vec<Atom> = (0..n_out)
        .map(|_| Atom { point: SpherePoint::Finite(random_point_off(rng, circle, false)), weight: rng.gen_range(0.1..2.0) })
        .collect();
    if n_out == 0 || rng.gen_bool(0.5) {
        atoms.push(Atom { point: SpherePoint::Infinity, weight: rng.gen_range(0.1..2.0) });
    }
    (WeightedDivisor::finite(&d).unwrap(), WeightedDivisor::new(atoms).unwrap())
}

fn random_mobius_circle(rng: &mut ChaCha8Rng) -> Circle {
    loop {
        let mut z = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (a, b, cc, d) = (z(), z(), z() * 0.3, z());
        let Ok(m) = Mobius::new(a, b, cc, d) else { continue };
        if let SpherePoint::Finite(p) = m.pole() {
            if (p.norm() - 1.0).abs() < 0.2 {
                continue;
            }
        }
        if let Ok(circle) = Circle::mobius_image(&m) {
            if circle.radius > 0.05 && circle.radius < 20.0 {
                return circle;
            }
        }
    }
}

fn gradient_positivity() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let circle = random_mobius_circle(&mut rng);
        let (d, ds) = random_divisors(&mut rng, &circle);
        worst = worst.min(hadamard_gradient_quadrature(&circle, &d, &ds).unwrap());
    }
    let d0 = WeightedDivisor::finite(&[(c(0.0, 0.0), 1.0)]).unwrap();
    let inf = WeightedDivisor::point_at_infinity(1.0).unwrap();
    let centred = [0.3, 1.0, 2.5]
        .iter()
        .map(|&r| hadamard_gradient_quadrature(&Circle::new(c(0.0, 0.0), r).unwrap(), &d0, &inf).unwrap().abs())
        .fold(0.0, f64::max);
    let el = t.elapsed();
    let pass = worst >= -1e-10 && centred < 1e-10 && el < Duration::from_secs(30);
    verdict(pass, format!("min over 100 configs {worst:.3e} centred max {centred:.1e} runtime {}", secs(el)))
}

fn area_variation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let circle = Circle::new(c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), rng.gen_range(0.2..3.0)).unwrap();
        let (d, ds) = random_divisors(&mut rng, &circle);
        let expect = TAU * (d.weight() - ds.weight());
        let (a, _) = area_perimeter_variation(&circle, &d, &ds).unwrap();
        worst = worst.max((a - expect).abs() / expect.abs().max(1e-300));
    }
    verdict(worst < 1e-6, format!("worst relative error {worst:.2e} over 50 configs"))
}

fn four_droplet() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let spec = FourDropletSpec::new(
            rng.gen_range(-0.95..-0.05),
            rng.gen_range(0.05..0.95),
            rng.gen_range(0.5..6.0),
            rng.gen_range(0.5..6.0),
        )
        .unwrap();
        for _ in 0..1000 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let r = spec.value(z).unwrap();
            worst = worst.max((spec.value(c(1.0, 0.0) / z).unwrap() + r).abs());
            worst = worst.max((spec.value(z.conj()).unwrap() - r).abs());
        }
    }
    let mut rendered = Vec::new();
    for (x1, x2) in [(-0.5, 0.5), (-0.9, 0.9)] {
        let spec = FourDropletSpec::new(x1, x2, 6.0, 1.0).unwrap();
        let ok = four_droplet_curves(&spec, 1e-6).map(|curves| {
            let styled: Vec<StyledCurve> =
                curves.into_iter().map(|(_, lc)| StyledCurve { curve: lc.curve, style: CurveStyle::line("black") }).collect();
            render_svg(&styled, None).contains("<polygon")
        });
        rendered.push(matches!(ok, Ok(true)));
    }
    let pass = worst < 1e-12 && rendered.iter().all(|&r| r);
    verdict(pass, format!("symmetry defect {worst:.2e} figure sets rendered {rendered:?}"))
}

fn random_tree(rng: &mut ChaCha8Rng, levels: usize) -> WeightedTree {
    if levels == 0 || rng.gen_bool(0.3) {
        WeightedTree::Leaf { weight: rng.gen_range(0.05..5.0) }
    } else {
        let n = rng.gen_range(1..4);
        WeightedTree::Node { width: rng.gen_range(0.05..3.0), children: (0..n).map(|_| random_tree(rng, levels - 1)).collect() }
    }
}

fn leaf_paths(t: &GreensSurface, path: Vec<usize>, out: &mut Vec<(Vec<usize>, f64)>) {
    match t {
        GreensSurface::HalfStrip { weight } => out.push((path, PI * weight)),
        GreensSurface::Assembly { children, .. } => {
            for (k, ch) in children.iter().enumerate() {
                let mut p = path.clone();
                p.push(k);
                leaf_paths(ch, p, out);
            }
        }
    }
}

fn greens_surfaces() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut seam, mut slope, mut depth_ok, mut round_trip) = (0.0f64, 0.0f64, true, true);
    for _ in 0..200 {
        let tree = random_tree(&mut rng, 3);
        let t = from_weighted_tree(&tree).unwrap();
        depth_ok &= t.depth() <= 4;
        round_trip &= to_weighted_tree(&t) == tree;
        let mut leaves = Vec::new();
        leaf_paths(&t, vec![], &mut leaves);
        for (path, h) in leaves {
            let y = rng.gen_range(0.0..1.0) * h;
            let dx = rng.gen_range(0.01..5.0);
            let v_edge = greens_value(&t, &SurfacePoint::new(path.clone(), c(0.0, y))).unwrap();
            if let Some((_, parent)) = path.split_last() {
                if let GreensSurface::Assembly { rect_width, children } = t.node(parent).unwrap() {
                    let below: f64 = children[..path[path.len() - 1]].iter().map(|c| c.height()).sum();
                    let v_rect = greens_value(&t, &SurfacePoint::new(parent.to_vec(), c(-rect_width, below + y))).unwrap();
                    seam = seam.max((v_edge - v_rect).abs());
                }
            }
            let v_in = greens_value(&t, &SurfacePoint::new(path, c(-dx, y))).unwrap();
            slope = slope.max((v_in - v_edge - 2.0 * dx).abs());
        }
        let top = greens_value(&t, &SurfacePoint::new(vec![], c(0.0, 0.5 * t.height()))).unwrap();
        slope = slope.max(top.abs());
    }
    let slit = validate_greens_type(&GreensTypeSurface::slit_plane()).is_valid();
    let pass = seam < 1e-12 && slope < 1e-12 && depth_ok && round_trip && slit;
    verdict(pass, format!("seam jump {seam:.1e} law defect {slope:.1e} depth<=4 {depth_ok} round trip {round_trip} slit plane valid {slit}"))
}

fn invariant_suite() -> Outcome {
    let t = Instant::now();
    let mut problems = Vec::new();
    for (name, make) in [("plane", plane_pair_setup as fn(f64, f64) -> hslab::Result<ErosionState>), ("torus", torus_pair_setup)] {
        for seed in 0..3u64 {
            let mut sim = Simulation::new(make(0.05, 0.2).unwrap(), ClockMode::Poisson, seed, RunOptions { check_every: 1, ..Default::default() })
                .unwrap();
            for k in 0..1000 {
                if let Err(e) = sim.step() {
                    problems.push(format!("{name} seed {seed} event {k}: {e}"));
                    break;
                }
            }
            let report = check_invariants(&sim.state);
            if !report.is_ok() {
                problems.push(format!("{name} seed {seed}: {:?}", report.violations));
            }
        }
    }
    let el = t.elapsed();
    let pass = problems.is_empty() && el < Duration::from_secs(120);
    verdict(pass, format!("6 runs x 1000 events checked every event, problems {problems:?} runtime {}", secs(el)))
}

fn cells(list: &[(i64, i64)]) -> Vec<CellId> {
    list.iter().map(|&(i, j)| CellId::new(i, j)).collect()
}

fn rotated(walk: &[Vertex], expected: &[(i64, i64)]) -> bool {
    let first = Vertex::new(expected[0].0, expected[0].1);
    let Some(k) = walk.iter().position(|&v| v == first) else { return false };
    let got: Vec<Vertex> = walk[k..].iter().chain(&walk[..k]).copied().collect();
    got == expected.iter().map(|&(i, j)| Vertex::new(i, j)).collect::<Vec<_>>()
}

fn droplet(list: &[(i64, i64)], source: (i64, i64)) -> DropletSpec {
    DropletSpec { cells: cells(list), sources: vec![(CellId::new(source.0, source.1), 1.0)] }
}

fn golden_fixtures() -> Outcome {
    const E: u8 = 0;
    let block = [(1, 1), (2, 1), (1, 2), (2, 2)];
    let mut results = Vec::new();

    let mut s = ErosionState::from_cells(TiledSurface::plane(1.0).unwrap(), &[droplet(&block, (1, 1)), droplet(&[(3, 1)], (3, 1))]).unwrap();
    let before = Snapshot::capture(&s, 0.0);
    let ev = single_event(&mut s, 0, &mut ScriptedSteps::new(vec![E, E]), 0.0, false).unwrap();
    results.push(ev.outcome == EventOutcome::SourceSquare { cell: CellId::new(3, 1) } && Snapshot::capture(&s, 0.0) == before);

    let torus = TiledSurface::torus(6, 6, 1.0, c(0.0, 0.0)).unwrap();
    let mut s = ErosionState::from_cells(torus, &[droplet(&block, (1, 1)), droplet(&[(4, 4)], (4, 4))]).unwrap();
    let ev = single_event(&mut s, 0, &mut ScriptedSteps::new(vec![E, E]), 0.5, false).unwrap();
    results.push(
        ev.outcome == EventOutcome::Capture { cell: CellId::new(3, 1), from: None }
            && rotated(s.interface(0).unwrap(), &[(1, 1), (2, 1), (3, 1), (4, 1), (4, 2), (3, 2), (3, 3), (2, 3), (1, 3), (1, 2)])
            && s.cell_count(0).unwrap() == 5
            && ev.changes == vec![InterfaceChange { droplet: 0, before: 8, after: 10 }]
            && check_invariants(&s).is_ok(),
    );

    let mut s = ErosionState::from_cells(
        TiledSurface::plane(1.0).unwrap(),
        &[droplet(&[(1, 1), (2, 1)], (1, 1)), droplet(&[(4, 0), (4, 1), (4, 2), (4, 3), (3, 1)], (4, 0))],
    )
    .unwrap();
    let ev = single_event(&mut s, 0, &mut ScriptedSteps::new(vec![E, E]), 0.0, false).unwrap();
    results.push(
        ev.outcome == EventOutcome::Capture { cell: CellId::new(3, 1), from: Some(1) }
            && rotated(s.interface(1).unwrap(), &[(4, 0), (5, 0), (5, 1), (5, 2), (5, 3), (5, 4), (4, 4), (4, 3), (4, 2), (4, 1)])
            && rotated(s.interface(0).unwrap(), &[(1, 1), (2, 1), (3, 1), (4, 1), (4, 2), (3, 2), (2, 2), (1, 2)])
            && ev.changes.contains(&InterfaceChange { droplet: 1, before: 12, after: 10 })
            && check_invariants(&s).is_ok(),
    );
    verdict(results.iter().all(|&r| r), format!("source-square, torus capture, slit removal: {results:?}"))
}

fn study() -> (Outcome, Outcome) {
    let t = Instant::now();
    let cfg = StudyConfig {
        setup: StudySetup::PlanePair,
        meshes: vec![0.1, 0.05, 0.025],
        seeds: (1..=10).collect(),
        t_end: 50.0,
        radius: 0.2,
        droplet: 1,
        target: Some(hslab::cli::three_source_loop().unwrap()),
        stabilization: vec![],
        mode: ClockMode::Poisson,
        threads: None,
    };
    let report = convergence_study(&cfg).unwrap();
    let el = t.elapsed();
    let medians: Vec<f64> = report.rows.iter().map(|r| r.distance.as_ref().map(|q| q.median).unwrap_or(f64::NAN)).collect();
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    let c12 = verdict(
        decreasing && el < Duration::from_secs(1800),
        format!("median distances {:?} for meshes 1/10, 1/20, 1/40 runtime {}", medians.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>(), secs(el)),
    );
    let ratios: Vec<f64> = report.rows.iter().map(|r| r.count_ratio.as_ref().map(|q| q.median).unwrap_or(f64::NAN)).collect();
    let at_20 = ratios[1];
    let c13 = verdict(
        (at_20 - 2.0).abs() <= 0.2,
        format!("median count ratio {at_20:.2} at mesh 1/20 (target 2 +- 0.2); all meshes {:?}", ratios.iter().map(|m| format!("{m:.2}")).collect::<Vec<_>>()),
    );
    (c12, c13)
}

fn energy_growth() -> Outcome {
    let t = Instant::now();
    let gains: Vec<f64> = (1..=20u64)
        .map(|seed| {
            let state = torus_pair_setup(0.05, 0.2).unwrap();
            let e0 = discrete_energy(&state).unwrap();
            let out = run(state, 4.0, ClockMode::Poisson, seed, &[], RunOptions::default()).unwrap();
            discrete_energy(&out.state).unwrap() - e0
        })
        .collect();
    let m = median(gains.clone());
    let positive = gains.iter().filter(|&&g| g > 0.0).count();
    verdict(m > 0.0, format!("median energy change {m:.4} ({positive}/20 seeds positive) runtime {}", secs(t.elapsed())))
}

fn run_bin(dir: &Path, threads: &str, args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_hslab"))
        .current_dir(dir)
        .env("HSLAB_THREADS", threads)
        .args(args)
        .stdout(std::process::Stdio::null())
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let commands: [&[&str]; 3] = [
        &["compare", "--meshes", "0.1,0.05", "--seeds", "1,2,3,4,5", "--t-end", "3", "--output-dir", "out"],
        &["erode", "--mesh", "0.05", "--t-end", "2", "--seed", "11", "--snapshots", "0.5,1,2", "--output-dir", "out"],
        &["trace-qd", "--output-dir", "out"],
    ];
    let mut mismatches = Vec::new();
    let mut compared = 0usize;
    for args in commands {
        let runs: Vec<Option<Vec<(String, Vec<u8>)>>> = ["1", "8", "8"]
            .iter()
            .map(|threads| {
                let tmp = tempfile::tempdir().unwrap();
                run_bin(tmp.path(), threads, args).then(|| dir_bytes(&tmp.path().join("out")))
            })
            .collect();
        match (&runs[0], &runs[1], &runs[2]) {
            (Some(a), Some(b), Some(c)) => {
                compared += a.len();
                if a != b || b != c {
                    mismatches.push(args[0]);
                }
            }
            _ => mismatches.push(args[0]),
        }
    }
    verdict(mismatches.is_empty(), format!("{compared} output files compared across HSLAB_THREADS 1, 8, 8; mismatching commands {mismatches:?}"))
}

fn main() {
    let criteria: Vec<(usize, &str, Box<dyn FnOnce() -> Outcome>)> = vec![
        (1, "critical point of the three-source differential", Box::new(critical_point)),
        (2, "square-root residues at the sources", Box::new(residues)),
        (3, "closed upper-branch trajectory", Box::new(loop_trajectory)),
        (4, "level-set fidelity of traced trajectories", Box::new(level_fidelity)),
        (5, "reduced energy identities", Box::new(energy_identities)),
        (6, "Hadamard gradient positivity", Box::new(gradient_positivity)),
        (7, "area variation", Box::new(area_variation)),
        (8, "four-droplet symmetries and figure sets", Box::new(four_droplet)),
        (9, "Green's surfaces", Box::new(greens_surfaces)),
        (10, "erosion invariant suite", Box::new(invariant_suite)),
        (11, "erosion golden fixtures", Box::new(golden_fixtures)),
    ];
    let mut lines: Vec<(usize, &str, Outcome)> = criteria.into_iter().map(|(k, name, f)| (k, name, f())).collect();
    let (c12, c13) = study();
    lines.push((12, "mesh-ladder convergence to the loop", c12));
    lines.push((13, "droplet cell-count ratio", c13));
    lines.push((14, "statistical energy growth on the torus", energy_growth()));
    lines.push((15, "byte-identical outputs across runs and thread counts", determinism()));

    let mut unexpected = Vec::new();
    for (k, name, o) in &lines {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_UNATTAINABLE.contains(k) { " [known unattainable, see decisions ledger]" } else { "" };
        println!("criterion {k:>2} {tag}: {name}: {}{note}", o.detail);
        if !o.pass && !KNOWN_UNATTAINABLE.contains(k) {
            unexpected.push(*k);
        }
    }
    let passed = lines.iter().filter(|(_, _, o)| o.pass).count();
    println!("acceptance: {passed}/{} criteria pass", lines.len());
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
