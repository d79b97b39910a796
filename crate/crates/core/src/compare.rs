//! Distances between curves and the lattice-to-continuum comparison harness.

use num_complex::Complex64;
use rstar::primitives::Line;
use rstar::RTree;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{point_segment_distance, PathCurve};
use crate::erosion::{self, plane_pair_setup, torus_pair_setup, topology::lift, ClockMode, ErosionState, RunOptions, Snapshot};
use crate::error::{Error, Result};
use crate::lattice::{TiledSurface, Vertex};

/// Segments of a polyline in an R-tree for nearest-distance queries.
struct SegmentIndex {
    tree: RTree<Line<[f64; 2]>>,
}

impl SegmentIndex {
    fn new(curve: &PathCurve) -> Self {
        let mut lines: Vec<Line<[f64; 2]>> = curve
            .segments()
            .map(|(a, b)| Line::new([a.re, a.im], [b.re, b.im]))
            .collect();
        if lines.is_empty() {
            let p = curve.points[0];
            lines.push(Line::new([p.re, p.im], [p.re, p.im]));
        }
        SegmentIndex { tree: RTree::bulk_load(lines) }
    }

    fn distance(&self, p: Complex64) -> f64 {
        let q = [p.re, p.im];
        let line = self.tree.nearest_neighbor(&q).expect("nonempty index");
        point_segment_distance(p, Complex64::new(line.from[0], line.from[1]), Complex64::new(line.to[0], line.to[1]))
    }
}

fn resample(curve: &PathCurve, step: f64) -> Vec<Complex64> {
    let mut out = Vec::new();
    if curve.points.len() == 1 {
        return curve.points.clone();
    }
    for (a, b) in curve.segments() {
        let len = (b - a).norm();
        let n = ((len / step).ceil() as usize).max(1);
        for k in 0..n {
            out.push(a + (b - a) * (k as f64 / n as f64));
        }
    }
    if !curve.closed {
        out.push(*curve.points.last().unwrap());
    }
    out
}

fn directed(samples: &[Complex64], index: &SegmentIndex) -> f64 {
    samples.iter().map(|p| index.distance(*p)).fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two polylines.
///
/// Both curves are resampled at the shortest segment length, floored so that
/// at most about 2·10⁵ samples are taken per curve.
pub fn hausdorff(a: &PathCurve, b: &PathCurve) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let total = a.arclength() + b.arclength();
    let mut step = a.min_segment().min(b.min_segment());
    if !step.is_finite() || step <= 0.0 {
        step = total.max(1e-12);
    }
    step = step.max(total / 2e5).max(1e-300);
    let sa = resample(a, step);
    let sb = resample(b, step);
    let ia = SegmentIndex::new(a);
    let ib = SegmentIndex::new(b);
    Ok(directed(&sa, &ib).max(directed(&sb, &ia)))
}

/// A torus interface unrolled into the universal cover, starting in the
/// fundamental domain. `cuts` lists the steps `k → k + 1` that leave the
/// fundamental domain through one of its sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnrolledInterface {
    pub curve: PathCurve,
    pub cuts: Vec<usize>,
}

/// Unrolls a wrapped interface walk; vertices go to `origin + mesh·(i, j)`.
pub fn walk_to_curve(surface: &TiledSurface, walk: &[Vertex]) -> Result<UnrolledInterface> {
    if walk.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let lifted = lift(surface, walk).ok_or_else(|| Error::InvariantViolation("interface steps are not lattice steps".into()))?;
    let n = walk.len();
    let cuts = (0..n)
        .filter(|&k| {
            let (p, q) = (lifted[k], lifted[k + 1]);
            let w = walk[(k + 1) % n];
            (q.0 - w.i, q.1 - w.j) != (p.0 - walk[k].i, p.1 - walk[k].j)
        })
        .collect();
    let points = lifted[..n].iter().map(|&(i, j)| surface.vertex_point(Vertex::new(i, j))).collect();
    Ok(UnrolledInterface { curve: PathCurve::closed(points), cuts })
}

/// The interface of droplet `k` as a closed curve in continuum coordinates.
pub fn lattice_interface_to_curve(state: &ErosionState, k: usize) -> Result<PathCurve> {
    Ok(walk_to_curve(&state.surface, state.interface(k)?)?.curve)
}

/// Interface of droplet `k` of a snapshot as a closed curve.
pub fn snapshot_interface_curve(snapshot: &Snapshot, k: usize) -> Result<PathCurve> {
    let d = snapshot.droplets.get(k).ok_or(Error::MissingDroplet(k))?;
    let walk: Vec<Vertex> = d.interface.iter().map(|&[i, j]| Vertex::new(i, j)).collect();
    Ok(walk_to_curve(&snapshot.surface, &walk)?.curve)
}

/// Hausdorff distance minimized over deck translations of `b`; plain
/// Hausdorff distance on the plane.
pub fn deck_hausdorff(surface: &TiledSurface, a: &PathCurve, b: &PathCurve) -> Result<f64> {
    let Some((w, h)) = surface.dims() else {
        return hausdorff(a, b);
    };
    let (pw, ph) = (w as f64 * surface.mesh(), h as f64 * surface.mesh());
    let centre = |c: &PathCurve| c.bounds().map(|(lo, hi)| (lo + hi) / 2.0).ok_or(Error::EmptyCurve);
    let d = centre(a)? - centre(b)?;
    let (p0, q0) = ((d.re / pw).round() as i64, (d.im / ph).round() as i64);
    let mut best = f64::INFINITY;
    for p in p0 - 1..=p0 + 1 {
        for q in q0 - 1..=q0 + 1 {
            let shift = Complex64::new(p as f64 * pw, q as f64 * ph);
            best = best.min(hausdorff(a, &b.map(|z| z + shift))?);
        }
    }
    Ok(best)
}

/// Median and quartiles (linear interpolation between order statistics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl Quartiles {
    pub fn of(values: &[f64]) -> Option<Quartiles> {
        if values.is_empty() || values.iter().any(|v| v.is_nan()) {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let at = |p: f64| {
            let x = p * (v.len() - 1) as f64;
            let (lo, hi) = (x.floor() as usize, x.ceil() as usize);
            v[lo] + (v[hi] - v[lo]) * (x - lo as f64)
        };
        Some(Quartiles { q1: at(0.25), median: at(0.5), q3: at(0.75) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudySetup {
    /// Discs around 0 and 1 in the plane with weights 2 and 1.
    PlanePair,
    /// The same sources on the torus `[-0.5, 1.5] × [-1, 1]`.
    TorusPair,
}

/// Parameters of a mesh-ladder study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub setup: StudySetup,
    pub meshes: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Macroscopic end time.
    pub t_end: f64,
    pub radius: f64,
    /// Droplet whose interface is compared with the target.
    pub droplet: usize,
    /// Continuum interface to compare against at `t_end`.
    pub target: Option<PathCurve>,
    /// Pairs `(t, t')` at which interfaces are compared with each other.
    pub stabilization: Vec<(f64, f64)>,
    pub mode: ClockMode,
    /// Worker count; `None` reads `HSLAB_THREADS`, then machine parallelism.
    pub threads: Option<usize>,
}

/// Result of one `(mesh, seed)` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub distance: Option<f64>,
    /// Largest distance over droplets, one per stabilization pair.
    pub stabilization: Vec<f64>,
    pub cell_counts: Vec<usize>,
    pub events: u64,
    pub rejected: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshRow {
    pub mesh: f64,
    pub runs: Vec<SeedResult>,
    pub distance: Option<Quartiles>,
    pub stabilization: Vec<Option<Quartiles>>,
    /// Cell count of droplet 0 over droplet 1.
    pub count_ratio: Option<Quartiles>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema: String,
    pub meshes: Vec<f64>,
    pub seeds: Vec<u64>,
    pub t_end: f64,
    pub rows: Vec<MeshRow>,
}

pub const REPORT_SCHEMA: &str = "hslab.comparison.v1";

impl ComparisonReport {
    pub fn medians(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.distance.map(|q| q.median)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("mesh,seed,distance,cells_0,cells_1,events,rejected\n");
        for row in &self.rows {
            for r in &row.runs {
                let d = r.distance.map(|d| d.to_string()).unwrap_or_default();
                let c = |k: usize| r.cell_counts.get(k).map(|c| c.to_string()).unwrap_or_default();
                out.push_str(&format!("{},{},{},{},{},{},{}\n", row.mesh, r.seed, d, c(0), c(1), r.events, r.rejected));
            }
        }
        out
    }
}

/// Worker count from `HSLAB_THREADS`, if set to a positive integer.
pub fn env_threads() -> Option<usize> {
    std::env::var("HSLAB_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

fn run_cell(config: &StudyConfig, mesh: f64, seed: u64) -> Result<SeedResult> {
    let state = match config.setup {
        StudySetup::PlanePair => plane_pair_setup(mesh, config.radius)?,
        StudySetup::TorusPair => torus_pair_setup(mesh, config.radius)?,
    };
    let surface = state.surface;
    let mut times: Vec<f64> = config.stabilization.iter().flat_map(|&(a, b)| [a, b]).collect();
    times.push(config.t_end);
    let opts = RunOptions { check_every: 0, ..Default::default() };
    let out = erosion::run(state, config.t_end, config.mode, seed, &times, opts)?;
    let at = |t: f64| out.snapshots.iter().find(|s| s.time == t).expect("snapshot requested");
    let last = at(config.t_end);
    let distance = match &config.target {
        Some(target) => Some(deck_hausdorff(&surface, &snapshot_interface_curve(last, config.droplet)?, target)?),
        None => None,
    };
    let mut stabilization = Vec::new();
    for &(a, b) in &config.stabilization {
        let (sa, sb) = (at(a), at(b));
        let mut worst: f64 = 0.0;
        for k in 0..sa.droplets.len() {
            let d = deck_hausdorff(&surface, &snapshot_interface_curve(sa, k)?, &snapshot_interface_curve(sb, k)?)?;
            worst = worst.max(d);
        }
        stabilization.push(worst);
    }
    Ok(SeedResult {
        seed,
        distance,
        stabilization,
        cell_counts: last.droplets.iter().map(|d| d.cell_count()).collect(),
        events: out.summary.events,
        rejected: out.summary.rejected,
    })
}

/// Runs every `(mesh, seed)` pair on a worker pool and reports distances to
/// the target and between interface pairs, with medians and quartiles.
pub fn convergence_study(config: &StudyConfig) -> Result<ComparisonReport> {
    if config.meshes.is_empty() || config.seeds.is_empty() {
        return Err(Error::Parameter("empty mesh ladder or seed list".into()));
    }
    if config.stabilization.iter().any(|&(a, b)| !(a >= 0.0 && b >= 0.0 && a <= config.t_end && b <= config.t_end)) {
        return Err(Error::Parameter("stabilization times must lie in [0, t_end]".into()));
    }
    let threads = config.threads.or_else(env_threads).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Parameter(format!("worker pool: {e}")))?;
    let jobs: Vec<(usize, f64, u64)> = config
        .meshes
        .iter()
        .enumerate()
        .flat_map(|(m, &mesh)| config.seeds.iter().map(move |&s| (m, mesh, s)))
        .collect();
    let results: Vec<Result<SeedResult>> =
        pool.install(|| jobs.par_iter().map(|&(_, mesh, seed)| run_cell(config, mesh, seed)).collect());
    let mut rows: Vec<MeshRow> = Vec::new();
    for (&(m, mesh, _), r) in jobs.iter().zip(results) {
        if rows.len() == m {
            rows.push(MeshRow { mesh, runs: Vec::new(), distance: None, stabilization: Vec::new(), count_ratio: None });
        }
        rows[m].runs.push(r?);
    }
    for row in &mut rows {
        let d: Vec<f64> = row.runs.iter().filter_map(|r| r.distance).collect();
        row.distance = Quartiles::of(&d);
        row.stabilization = (0..config.stabilization.len())
            .map(|p| Quartiles::of(&row.runs.iter().map(|r| r.stabilization[p]).collect::<Vec<_>>()))
            .collect();
        let ratios: Vec<f64> = row
            .runs
            .iter()
            .filter(|r| r.cell_counts.len() >= 2)
            .map(|r| r.cell_counts[0] as f64 / r.cell_counts[1] as f64)
            .collect();
        row.count_ratio = Quartiles::of(&ratios);
    }
    Ok(ComparisonReport {
        schema: REPORT_SCHEMA.into(),
        meshes: config.meshes.clone(),
        seeds: config.seeds.clone(),
        t_end: config.t_end,
        rows,
    })
}
