//! Interface erosion: Poisson-clocked walks from source squares capture the
//! square where they leave their droplet; interfaces are rerouted around the
//! captured square and slits are removed.

mod check;
mod energy;
mod snapshot;
pub mod topology;

pub use check::{check_invariants, InvariantReport};
pub use energy::{discrete_energy, droplet_green_matrix};
pub use snapshot::{Snapshot, SNAPSHOT_SCHEMA};
pub use topology::{remove_slits, trace_boundary};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::kernels::WeightedDivisor;
use crate::lattice::{cell_side, CellId, SimRng, StepSource, TiledSurface, Vertex, STEPS};
use topology::{is_simple, reroute_around, RING};

/// Default cap on the length of one walk.
pub const MAX_WALK: u64 = 1_000_000_000;

const MARGIN: i64 = 2;

/// Ownership of squares: 0 is free, `k + 1` is droplet `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwnerGrid {
    i0: i64,
    j0: i64,
    w: i64,
    h: i64,
    torus: bool,
    data: Vec<u8>,
}

impl OwnerGrid {
    fn new(surface: &TiledSurface) -> Self {
        match surface.dims() {
            Some((w, h)) => OwnerGrid { i0: 0, j0: 0, w, h, torus: true, data: vec![0; (w * h) as usize] },
            None => OwnerGrid { i0: -8, j0: -8, w: 16, h: 16, torus: false, data: vec![0; 256] },
        }
    }

    #[inline]
    fn index(&self, c: CellId) -> Option<usize> {
        let (x, y) = (c.i - self.i0, c.j - self.j0);
        if x < 0 || y < 0 || x >= self.w || y >= self.h {
            None
        } else {
            Some((y * self.w + x) as usize)
        }
    }

    #[inline]
    pub fn get(&self, c: CellId) -> u8 {
        let c = if self.torus { CellId::new(c.i.rem_euclid(self.w), c.j.rem_euclid(self.h)) } else { c };
        self.index(c).map_or(0, |k| self.data[k])
    }

    fn set(&mut self, c: CellId, owner: u8) {
        if !self.torus {
            self.reserve(c);
        }
        let c = if self.torus { CellId::new(c.i.rem_euclid(self.w), c.j.rem_euclid(self.h)) } else { c };
        let k = self.index(c).expect("cell inside the grid");
        self.data[k] = owner;
    }

    fn reserve(&mut self, c: CellId) {
        let inside = c.i - MARGIN >= self.i0
            && c.j - MARGIN >= self.j0
            && c.i + MARGIN < self.i0 + self.w
            && c.j + MARGIN < self.j0 + self.h;
        if inside {
            return;
        }
        let pad_x = (self.w / 2).max(16);
        let pad_y = (self.h / 2).max(16);
        let i0 = if c.i - MARGIN < self.i0 { c.i - MARGIN - pad_x } else { self.i0 };
        let j0 = if c.j - MARGIN < self.j0 { c.j - MARGIN - pad_y } else { self.j0 };
        let i1 = if c.i + MARGIN >= self.i0 + self.w { c.i + MARGIN + pad_x } else { self.i0 + self.w };
        let j1 = if c.j + MARGIN >= self.j0 + self.h { c.j + MARGIN + pad_y } else { self.j0 + self.h };
        let (w, h) = (i1 - i0, j1 - j0);
        let mut data = vec![0u8; (w * h) as usize];
        for y in 0..self.h {
            let src = (y * self.w) as usize;
            let dst = ((y + self.j0 - j0) * w + (self.i0 - i0)) as usize;
            data[dst..dst + self.w as usize].copy_from_slice(&self.data[src..src + self.w as usize]);
        }
        *self = OwnerGrid { i0, j0, w, h, torus: false, data };
    }

    /// Squares owned by `code`, sorted by row then column.
    fn cells_of(&self, code: u8) -> Vec<CellId> {
        let mut out = Vec::new();
        for y in 0..self.h {
            for x in 0..self.w {
                if self.data[(y * self.w + x) as usize] == code {
                    out.push(CellId::new(x + self.i0, y + self.j0));
                }
            }
        }
        out
    }

    fn count(&self, code: u8) -> usize {
        self.data.iter().filter(|&&o| o == code).count()
    }

    /// Walks from `start` while the squares are owned by `me`. Returns the last
    /// square inside, the first square outside and the number of steps.
    fn walk<S: StepSource>(
        &self,
        start: CellId,
        me: u8,
        rng: &mut S,
        cap: u64,
        mut record: Option<&mut Vec<CellId>>,
    ) -> Result<(CellId, CellId, u64)> {
        if self.torus {
            let (w, h) = (self.w, self.h);
            let (mut i, mut j) = (start.i, start.j);
            let mut steps = 0u64;
            loop {
                let d = rng.next_dir()?;
                let (di, dj) = STEPS[d as usize];
                let (ni, nj) = ((i + di).rem_euclid(w), (j + dj).rem_euclid(h));
                steps += 1;
                if let Some(r) = record.as_deref_mut() {
                    r.push(CellId::new(ni, nj));
                }
                if self.data[(nj * w + ni) as usize] != me {
                    return Ok((CellId::new(i, j), CellId::new(ni, nj), steps));
                }
                if steps >= cap {
                    return Err(Error::WalkOverflow(steps));
                }
                i = ni;
                j = nj;
            }
        }
        let w = self.w as isize;
        let delta = [1isize, w, -1, -w];
        let mut at = self.index(start).expect("source inside the grid") as isize;
        let mut steps = 0u64;
        loop {
            let d = rng.next_dir()? as usize;
            let next = at + delta[d];
            steps += 1;
            if let Some(r) = record.as_deref_mut() {
                r.push(self.cell_at(next as usize));
            }
            // droplet squares keep a margin from the border, so `next` is in range
            if self.data[next as usize] != me {
                return Ok((self.cell_at(at as usize), self.cell_at(next as usize), steps));
            }
            if steps >= cap {
                return Err(Error::WalkOverflow(steps));
            }
            at = next;
        }
    }

    fn cell_at(&self, k: usize) -> CellId {
        let k = k as i64;
        CellId::new(k % self.w + self.i0, k / self.w + self.j0)
    }
}

/// An injection point: the square it lies in and its Poisson rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Source {
    pub droplet: usize,
    pub cell: CellId,
    pub rate: f64,
}

/// Cells and sources of one droplet, for building a state directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropletSpec {
    pub cells: Vec<CellId>,
    pub sources: Vec<(CellId, f64)>,
}

/// A disc around `center`, discretized by square centres, with its sources.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleSpec {
    pub center: Complex64,
    pub radius: f64,
    pub divisor: WeightedDivisor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErosionState {
    pub surface: TiledSurface,
    grid: OwnerGrid,
    /// Counter-clockwise interface walk of each droplet.
    interfaces: Vec<Vec<Vertex>>,
    counts: Vec<usize>,
    /// Sorted by droplet, then by position in the droplet's divisor.
    pub sources: Vec<Source>,
    /// Macroscopic time of the last event.
    pub clock: f64,
    pub events: u64,
}

impl ErosionState {
    /// Builds a state from explicit cell sets; interfaces are traced.
    pub fn from_cells(surface: TiledSurface, droplets: &[DropletSpec]) -> Result<Self> {
        surface.validate()?;
        if droplets.is_empty() || droplets.len() > 254 {
            return Err(Error::Parameter(format!("{} droplets", droplets.len())));
        }
        let mut grid = OwnerGrid::new(&surface);
        let mut interfaces = Vec::new();
        let mut counts = Vec::new();
        let mut sources = Vec::new();
        for (k, d) in droplets.iter().enumerate() {
            let cells: HashSet<CellId> = d.cells.iter().map(|&c| surface.wrap(c)).collect();
            if cells.is_empty() {
                return Err(Error::EmptyInterface(format!("droplet {k} has no squares")));
            }
            for &c in &cells {
                if grid.get(c) != 0 {
                    return Err(Error::Overlap(format!("square ({}, {}) is claimed twice", c.i, c.j)));
                }
            }
            if d.sources.is_empty() {
                return Err(Error::Parameter(format!("droplet {k} has no source")));
            }
            for &(c, rate) in &d.sources {
                let c = surface.wrap(c);
                if !cells.contains(&c) {
                    return Err(Error::SourceOutside(format!("source square ({}, {}) of droplet {k}", c.i, c.j)));
                }
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::Parameter(format!("source rate {rate}")));
                }
                if sources.iter().any(|s: &Source| s.cell == c) {
                    return Err(Error::Parameter(format!("two sources in square ({}, {})", c.i, c.j)));
                }
                sources.push(Source { droplet: k, cell: c, rate });
            }
            let walk = trace_boundary(&surface, &cells)?;
            let code = (k + 1) as u8;
            let mut sorted: Vec<CellId> = cells.iter().copied().collect();
            sorted.sort();
            for c in sorted {
                grid.set(c, code);
            }
            interfaces.push(walk);
            counts.push(cells.len());
        }
        let state = ErosionState { surface, grid, interfaces, counts, sources, clock: 0.0, events: 0 };
        let report = check_invariants(&state);
        if !report.is_ok() {
            return Err(Error::InvariantViolation(report.violations.join("; ")));
        }
        Ok(state)
    }

    pub fn droplet_count(&self) -> usize {
        self.interfaces.len()
    }

    pub fn interface(&self, k: usize) -> Result<&[Vertex]> {
        self.interfaces.get(k).map(|v| v.as_slice()).ok_or(Error::MissingDroplet(k))
    }

    pub fn cell_count(&self, k: usize) -> Result<usize> {
        self.counts.get(k).copied().ok_or(Error::MissingDroplet(k))
    }

    /// Squares of droplet `k`, sorted by row then column.
    pub fn cells(&self, k: usize) -> Result<Vec<CellId>> {
        if k >= self.interfaces.len() {
            return Err(Error::MissingDroplet(k));
        }
        Ok(self.grid.cells_of((k + 1) as u8))
    }

    pub fn owner(&self, c: CellId) -> Option<usize> {
        match self.grid.get(c) {
            0 => None,
            o => Some(o as usize - 1),
        }
    }

    pub fn is_source_square(&self, c: CellId) -> bool {
        let c = self.surface.wrap(c);
        self.sources.iter().any(|s| s.cell == c)
    }

    fn ring_mask(&self, c: CellId, code: u8) -> u8 {
        let mut m = 0u8;
        for (k, (di, dj)) in RING.iter().enumerate() {
            if self.grid.get(CellId::new(c.i + di, c.j + dj)) == code {
                m |= 1 << k;
            }
        }
        m
    }

    /// Microscopic events per unit of macroscopic time and unit rate, `N²`.
    pub fn time_scale(&self) -> f64 {
        time_scale(&self.surface)
    }
}

/// `N² = mesh⁻²`, with `1/mesh` snapped to an integer when it is one.
pub fn time_scale(surface: &TiledSurface) -> f64 {
    let n = 1.0 / surface.mesh();
    let r = n.round();
    let n = if (n - r).abs() < 1e-9 * n { r } else { n };
    n * n
}

/// Discretized discs: squares whose centres lie strictly inside the circle,
/// restricted to the 4-connected piece holding the first source.
pub fn init_circles(surface: TiledSurface, specs: &[CircleSpec]) -> Result<ErosionState> {
    surface.validate()?;
    let mesh = surface.mesh();
    let mut droplets = Vec::new();
    for (k, spec) in specs.iter().enumerate() {
        if !(spec.radius > 0.0) {
            return Err(Error::Parameter(format!("radius {}", spec.radius)));
        }
        let mut sources = Vec::new();
        for a in spec.divisor.atoms() {
            let z = a
                .point
                .finite()
                .ok_or_else(|| Error::Parameter(format!("droplet {k} has a source at infinity")))?;
            sources.push((surface.cell_containing(z), a.weight));
        }
        if sources.is_empty() {
            return Err(Error::Parameter(format!("droplet {k} has an empty divisor")));
        }
        let reach = (spec.radius / mesh).ceil() as i64 + 1;
        let centre = surface.cell_containing(spec.center);
        let mut disc = HashSet::new();
        for di in -reach..=reach {
            for dj in -reach..=reach {
                let c = surface.wrap(CellId::new(centre.i + di, centre.j + dj));
                if displacement(&surface, spec.center, surface.cell_center(c)).norm() < spec.radius {
                    disc.insert(c);
                }
            }
        }
        for &(c, _) in &sources {
            if !disc.contains(&c) {
                return Err(Error::SourceOutside(format!(
                    "source square ({}, {}) is not inside circle {k}",
                    c.i, c.j
                )));
            }
        }
        // keep the piece holding the first source
        let mut piece = HashSet::from([sources[0].0]);
        let mut stack = vec![sources[0].0];
        while let Some(c) = stack.pop() {
            for d in 0..4 {
                let n = surface.step(c, d);
                if disc.contains(&n) && piece.insert(n) {
                    stack.push(n);
                }
            }
        }
        let mut cells: Vec<CellId> = piece.into_iter().collect();
        cells.sort();
        droplets.push(DropletSpec { cells, sources });
    }
    ErosionState::from_cells(surface, &droplets)
}

/// Two discs of radius `radius` around 0 and 1 in the plane, with source
/// weights 2 and 1.
pub fn plane_pair_setup(mesh: f64, radius: f64) -> Result<ErosionState> {
    init_circles(TiledSurface::plane(mesh)?, &pair_specs(radius)?)
}

/// The torus `[-0.5, 1.5] × [-1, 1]` with discs of radius `radius` around the
/// sources 0 (weight 2) and 1 (weight 1).
pub fn torus_pair_setup(mesh: f64, radius: f64) -> Result<ErosionState> {
    let n = (2.0 / mesh).round() as i64;
    if ((2.0 / mesh) - n as f64).abs() > 1e-9 {
        return Err(Error::Parameter(format!("mesh {mesh} does not tile a side of length 2")));
    }
    let surface = TiledSurface::torus(n, n, mesh, Complex64::new(-0.5, -1.0))?;
    init_circles(surface, &pair_specs(radius)?)
}

fn pair_specs(radius: f64) -> Result<Vec<CircleSpec>> {
    let at = |x: f64, w: f64| -> Result<CircleSpec> {
        let z = Complex64::new(x, 0.0);
        Ok(CircleSpec { center: z, radius, divisor: WeightedDivisor::finite(&[(z, w)])? })
    };
    Ok(vec![at(0.0, 2.0)?, at(1.0, 1.0)?])
}

/// Shortest displacement from `a` to `b`, over deck translations on the torus.
pub fn displacement(surface: &TiledSurface, a: Complex64, b: Complex64) -> Complex64 {
    let d = b - a;
    match surface.dims() {
        None => d,
        Some((w, h)) => {
            let (pw, ph) = (w as f64 * surface.mesh(), h as f64 * surface.mesh());
            Complex64::new(d.re - pw * (d.re / pw).round(), d.im - ph * (d.im / ph).round())
        }
    }
}

/// Why a capture was refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    /// The losing droplet would vanish.
    Annihilation,
    /// The losing droplet would split or change topology.
    LoserTopology,
    /// The capturing droplet would enclose a region or touch itself across the square.
    CapturerTopology,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventOutcome {
    SourceSquare { cell: CellId },
    Capture { cell: CellId, from: Option<usize> },
    Rejected { cell: CellId, reason: Rejection },
}

/// Interface length of a droplet before and after an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterfaceChange {
    pub droplet: usize,
    pub before: usize,
    pub after: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErosionEvent {
    pub index: u64,
    pub time: f64,
    pub source: usize,
    pub walk_length: u64,
    /// Squares visited after the source square, when recorded.
    pub walk: Option<Vec<CellId>>,
    pub outcome: EventOutcome,
    pub changes: Vec<InterfaceChange>,
}

impl ErosionEvent {
    pub fn outcome_label(&self) -> &'static str {
        match self.outcome {
            EventOutcome::SourceSquare { .. } => "source_square",
            EventOutcome::Capture { .. } => "capture",
            EventOutcome::Rejected { reason: Rejection::Annihilation, .. } => "rejected_annihilation",
            EventOutcome::Rejected { reason: Rejection::LoserTopology, .. } => "rejected_loser_topology",
            EventOutcome::Rejected { reason: Rejection::CapturerTopology, .. } => "rejected_capturer_topology",
        }
    }

    pub fn end_cell(&self) -> CellId {
        match self.outcome {
            EventOutcome::SourceSquare { cell } | EventOutcome::Capture { cell, .. } | EventOutcome::Rejected { cell, .. } => cell,
        }
    }
}

/// Fires source `source` once at macroscopic time `time`.
pub fn single_event<S: StepSource>(
    state: &mut ErosionState,
    source: usize,
    rng: &mut S,
    time: f64,
    record_walk: bool,
) -> Result<ErosionEvent> {
    single_event_capped(state, source, rng, time, record_walk, MAX_WALK)
}

fn single_event_capped<S: StepSource>(
    state: &mut ErosionState,
    source: usize,
    rng: &mut S,
    time: f64,
    record_walk: bool,
    cap: u64,
) -> Result<ErosionEvent> {
    let src = *state
        .sources
        .get(source)
        .ok_or_else(|| Error::Parameter(format!("no source {source}")))?;
    let me = (src.droplet + 1) as u8;
    let mut walk = record_walk.then(Vec::new);
    let (u, v, steps) = state.grid.walk(src.cell, me, rng, cap, walk.as_mut())?;
    state.clock = time;
    let index = state.events;
    state.events += 1;
    let mut event = ErosionEvent { index, time, source, walk_length: steps, walk, outcome: EventOutcome::SourceSquare { cell: v }, changes: Vec::new() };
    if state.is_source_square(v) {
        return Ok(event);
    }
    let loser = state.grid.get(v);
    if loser != 0 {
        let mask = state.ring_mask(v, loser);
        if mask & 0b0101_0101 == 0 {
            event.outcome = EventOutcome::Rejected { cell: v, reason: Rejection::Annihilation };
            return Ok(event);
        }
        if !is_simple(mask) {
            event.outcome = EventOutcome::Rejected { cell: v, reason: Rejection::LoserTopology };
            return Ok(event);
        }
    }
    if !is_simple(state.ring_mask(v, me)) {
        event.outcome = EventOutcome::Rejected { cell: v, reason: Rejection::CapturerTopology };
        return Ok(event);
    }
    let d = state.surface.direction(u, v).expect("walk steps are adjacent");
    let edge = cell_side(&state.surface, u, d);
    let a = edge.origin;
    let b = state.surface.step_vertex(a, if edge.horizontal { 0 } else { 1 });
    let mut affected = vec![src.droplet];
    if loser != 0 {
        affected.push(loser as usize - 1);
    }
    for &k in &affected {
        let before = state.interfaces[k].len();
        let mut walk = std::mem::take(&mut state.interfaces[k]);
        if !reroute_around(&state.surface, &mut walk, a, b, v) {
            return Err(Error::InvariantViolation(format!(
                "event {index}: interface {k} does not pass through the crossed edge at ({}, {})",
                a.i, a.j
            )));
        }
        let walk = remove_slits(&walk).map_err(|e| Error::InvariantViolation(format!("event {index}: {e}")))?;
        event.changes.push(InterfaceChange { droplet: k, before, after: walk.len() });
        state.interfaces[k] = walk;
    }
    state.grid.set(v, me);
    state.counts[src.droplet] += 1;
    if loser != 0 {
        state.counts[loser as usize - 1] -= 1;
    }
    event.outcome = EventOutcome::Capture { cell: v, from: (loser != 0).then(|| loser as usize - 1) };
    Ok(event)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClockMode {
    Poisson,
    RoundRobin,
}

/// Firing schedule in microscopic time.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheduler {
    mode: ClockMode,
    rates: Vec<f64>,
    next: Vec<f64>,
    fired: Vec<u64>,
    clock_rng: SimRng,
}

impl Scheduler {
    pub fn new(rates: &[f64], mode: ClockMode, seed: u64) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::Parameter("no sources".into()));
        }
        let mut clock_rng = SimRng::new(seed, 0);
        let next = match mode {
            ClockMode::Poisson => rates.iter().map(|&r| clock_rng.exponential(r)).collect(),
            ClockMode::RoundRobin => rates.iter().map(|&r| 1.0 / r).collect(),
        };
        Ok(Scheduler { mode, rates: rates.to_vec(), next, fired: vec![0; rates.len()], clock_rng })
    }

    /// Earliest pending firing; ties go to the smaller source index.
    pub fn peek(&self) -> (f64, usize) {
        let mut best = 0;
        for k in 1..self.next.len() {
            if self.next[k] < self.next[best] {
                best = k;
            }
        }
        (self.next[best], best)
    }

    /// Consumes the earliest firing and schedules that source's next one.
    pub fn pop(&mut self) -> (f64, usize) {
        let (t, k) = self.peek();
        self.fired[k] += 1;
        self.next[k] = match self.mode {
            ClockMode::Poisson => t + self.clock_rng.exponential(self.rates[k]),
            ClockMode::RoundRobin => (self.fired[k] + 1) as f64 / self.rates[k],
        };
        (t, k)
    }
}

/// `(time, source)` of the next firing without consuming it.
pub fn next_event_time(scheduler: &Scheduler) -> (f64, usize) {
    scheduler.peek()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Full invariant check every this many events; 0 disables.
    pub check_every: u64,
    pub record_walks: bool,
    pub log_events: bool,
    pub max_walk: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { check_every: 1000, record_walks: false, log_events: false, max_walk: MAX_WALK }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub events: u64,
    pub captures: u64,
    pub source_square: u64,
    pub rejected: u64,
    pub checks: u64,
    pub walk_steps: u64,
    pub longest_walk: u64,
}

/// A running simulation: state, clocks and one walk generator per source.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub state: ErosionState,
    pub scheduler: Scheduler,
    walk_rngs: Vec<SimRng>,
    pub options: RunOptions,
    pub summary: RunSummary,
    pub seed: u64,
    log: String,
}

impl Simulation {
    pub fn new(state: ErosionState, mode: ClockMode, seed: u64, options: RunOptions) -> Result<Self> {
        let rates: Vec<f64> = state.sources.iter().map(|s| s.rate).collect();
        let scheduler = Scheduler::new(&rates, mode, seed)?;
        let walk_rngs = (0..rates.len()).map(|k| SimRng::new(seed, 1 + k as u64)).collect();
        Ok(Simulation { state, scheduler, walk_rngs, options, summary: RunSummary::default(), seed, log: String::from(snapshot::EVENT_LOG_HEADER) })
    }

    /// Macroscopic time of the next firing.
    pub fn next_time(&self) -> f64 {
        self.scheduler.peek().0 / self.state.time_scale()
    }

    pub fn step(&mut self) -> Result<ErosionEvent> {
        let (micro, k) = self.scheduler.pop();
        let time = micro / self.state.time_scale();
        let event = single_event_capped(&mut self.state, k, &mut self.walk_rngs[k], time, self.options.record_walks, self.options.max_walk)
            .map_err(|e| match e {
                Error::InvariantViolation(m) => Error::InvariantViolation(format!("{m} (seed {}, source {k}, time {time})", self.seed)),
                other => other,
            })?;
        let s = &mut self.summary;
        s.events += 1;
        s.walk_steps += event.walk_length;
        s.longest_walk = s.longest_walk.max(event.walk_length);
        match event.outcome {
            EventOutcome::Capture { .. } => s.captures += 1,
            EventOutcome::SourceSquare { .. } => s.source_square += 1,
            EventOutcome::Rejected { .. } => s.rejected += 1,
        }
        if self.options.log_events {
            snapshot::append_event(&mut self.log, &event);
        }
        if self.options.check_every > 0 && s.events % self.options.check_every == 0 {
            s.checks += 1;
            let report = check_invariants(&self.state);
            if !report.is_ok() {
                let replay = serde_json::to_string(&event).unwrap_or_default();
                return Err(Error::InvariantViolation(format!(
                    "after event {} (seed {}): {}; event {replay}",
                    event.index,
                    self.seed,
                    report.violations.join("; ")
                )));
            }
        }
        Ok(event)
    }

    /// Applies every event with macroscopic time at most `t_end`.
    pub fn run_until(&mut self, t_end: f64) -> Result<()> {
        let limit = t_end * self.state.time_scale();
        while self.scheduler.peek().0 <= limit {
            self.step()?;
        }
        Ok(())
    }

    /// Runs to `t_end`, capturing the state after the last event at or before each time.
    pub fn run_with_snapshots(&mut self, t_end: f64, times: &[f64]) -> Result<Vec<Snapshot>> {
        let mut times: Vec<f64> = times.to_vec();
        times.sort_by(f64::total_cmp);
        let mut out = Vec::new();
        for t in times {
            if t > t_end {
                break;
            }
            self.run_until(t)?;
            out.push(Snapshot::capture(&self.state, t));
        }
        self.run_until(t_end)?;
        Ok(out)
    }

    /// CSV event log (header only unless `log_events` is set).
    pub fn event_log(&self) -> &str {
        &self.log
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: ErosionState,
    pub snapshots: Vec<Snapshot>,
    pub summary: RunSummary,
    pub event_log: String,
}

/// Runs a fresh simulation from `state` to macroscopic time `t_end`.
pub fn run(state: ErosionState, t_end: f64, mode: ClockMode, seed: u64, snapshot_times: &[f64], options: RunOptions) -> Result<RunOutput> {
    if !(t_end >= state.clock) {
        return Err(Error::Parameter(format!("end time {t_end} precedes the clock {}", state.clock)));
    }
    let mut sim = Simulation::new(state, mode, seed, options)?;
    let snapshots = sim.run_with_snapshots(t_end, snapshot_times)?;
    let event_log = sim.log.clone();
    Ok(RunOutput { state: sim.state, snapshots, summary: sim.summary, event_log })
}

#[cfg(test)]
mod tests;
