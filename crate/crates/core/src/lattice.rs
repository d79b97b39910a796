//! Square lattices on the plane and the flat torus, and the seeded random-walk engine.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Steps east, north, west, south, indexed by direction code.
pub const STEPS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// The plane, or a torus of `width × height` cells whose fundamental domain
/// has its lower-left corner at `origin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TiledSurface {
    Plane {
        mesh: f64,
    },
    Torus {
        width_cells: i64,
        height_cells: i64,
        mesh: f64,
        #[serde(default)]
        origin: Complex64,
    },
}

/// A square of the lattice, i.e. a vertex of the dual lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId {
    pub i: i64,
    pub j: i64,
}

impl CellId {
    pub const fn new(i: i64, j: i64) -> Self {
        CellId { i, j }
    }

    /// Lower-left, lower-right, upper-right and upper-left corners.
    pub fn corners(self) -> [Vertex; 4] {
        let (i, j) = (self.i, self.j);
        [Vertex::new(i, j), Vertex::new(i + 1, j), Vertex::new(i + 1, j + 1), Vertex::new(i, j + 1)]
    }
}

/// A vertex of the primal lattice, at `mesh·(i, j)` from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub i: i64,
    pub j: i64,
}

impl Vertex {
    pub const fn new(i: i64, j: i64) -> Self {
        Vertex { i, j }
    }
}

/// The primal edge from `origin` to `origin + (1, 0)` or `origin + (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimalEdge {
    pub origin: Vertex,
    pub horizontal: bool,
}

impl TiledSurface {
    pub fn plane(mesh: f64) -> Result<Self> {
        let s = TiledSurface::Plane { mesh };
        s.validate()?;
        Ok(s)
    }

    pub fn torus(width_cells: i64, height_cells: i64, mesh: f64, origin: Complex64) -> Result<Self> {
        let s = TiledSurface::Torus { width_cells, height_cells, mesh, origin };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let mesh = self.mesh();
        if !(mesh > 0.0 && mesh.is_finite()) {
            return Err(Error::Parameter(format!("mesh {mesh}")));
        }
        if let TiledSurface::Torus { width_cells, height_cells, .. } = *self {
            if width_cells < 4 || height_cells < 4 {
                return Err(Error::Parameter(format!("torus {width_cells}×{height_cells} is smaller than 4×4")));
            }
        }
        Ok(())
    }

    pub fn mesh(&self) -> f64 {
        match *self {
            TiledSurface::Plane { mesh } | TiledSurface::Torus { mesh, .. } => mesh,
        }
    }

    pub fn origin(&self) -> Complex64 {
        match *self {
            TiledSurface::Plane { .. } => Complex64::new(0.0, 0.0),
            TiledSurface::Torus { origin, .. } => origin,
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, TiledSurface::Torus { .. })
    }

    /// `(width, height)` in cells on the torus.
    pub fn dims(&self) -> Option<(i64, i64)> {
        match *self {
            TiledSurface::Plane { .. } => None,
            TiledSurface::Torus { width_cells, height_cells, .. } => Some((width_cells, height_cells)),
        }
    }

    pub fn wrap(&self, c: CellId) -> CellId {
        match self.dims() {
            None => c,
            Some((w, h)) => CellId::new(c.i.rem_euclid(w), c.j.rem_euclid(h)),
        }
    }

    pub fn wrap_vertex(&self, v: Vertex) -> Vertex {
        match self.dims() {
            None => v,
            Some((w, h)) => Vertex::new(v.i.rem_euclid(w), v.j.rem_euclid(h)),
        }
    }

    pub fn contains(&self, c: CellId) -> bool {
        match self.dims() {
            None => true,
            Some((w, h)) => (0..w).contains(&c.i) && (0..h).contains(&c.j),
        }
    }

    pub fn step(&self, c: CellId, dir: u8) -> CellId {
        let (di, dj) = STEPS[dir as usize & 3];
        self.wrap(CellId::new(c.i + di, c.j + dj))
    }

    pub fn step_vertex(&self, v: Vertex, dir: u8) -> Vertex {
        let (di, dj) = STEPS[dir as usize & 3];
        self.wrap_vertex(Vertex::new(v.i + di, v.j + dj))
    }

    /// Direction code of the step from `a` to the adjacent `b`.
    pub fn direction(&self, a: CellId, b: CellId) -> Option<u8> {
        (0..4u8).find(|&d| self.step(a, d) == self.wrap(b))
    }

    /// Direction code of the primal step from `a` to the adjacent `b`.
    pub fn vertex_direction(&self, a: Vertex, b: Vertex) -> Option<u8> {
        (0..4u8).find(|&d| self.step_vertex(a, d) == self.wrap_vertex(b))
    }

    /// Center `origin + mesh·(i + ½, j + ½)`.
    pub fn cell_center(&self, c: CellId) -> Complex64 {
        self.origin() + Complex64::new(c.i as f64 + 0.5, c.j as f64 + 0.5) * self.mesh()
    }

    pub fn vertex_point(&self, v: Vertex) -> Complex64 {
        self.origin() + Complex64::new(v.i as f64, v.j as f64) * self.mesh()
    }

    /// The square containing `z`; on a lattice line the smaller index wins.
    pub fn cell_containing(&self, z: Complex64) -> CellId {
        let u = (z - self.origin()) / self.mesh();
        let index = |x: f64| {
            let r = x.round();
            if (x - r).abs() <= 1e-9 * (1.0 + x.abs()) {
                r as i64 - 1
            } else {
                x.floor() as i64
            }
        };
        self.wrap(CellId::new(index(u.re), index(u.im)))
    }
}

/// The four dual neighbours in direction order east, north, west, south.
pub fn neighbors(surface: &TiledSurface, c: CellId) -> [CellId; 4] {
    [0, 1, 2, 3].map(|d| surface.step(c, d))
}

/// The primal edge between two adjacent squares.
pub fn separating_edge(surface: &TiledSurface, a: CellId, b: CellId) -> Result<PrimalEdge> {
    let a = surface.wrap(a);
    let d = surface
        .direction(a, b)
        .ok_or_else(|| Error::Adjacency(format!("({}, {}) and ({}, {})", a.i, a.j, b.i, b.j)))?;
    Ok(cell_side(surface, a, d))
}

/// Side of `c` facing direction `d`.
pub fn cell_side(surface: &TiledSurface, c: CellId, d: u8) -> PrimalEdge {
    let (origin, horizontal) = match d & 3 {
        0 => (Vertex::new(c.i + 1, c.j), false),
        1 => (Vertex::new(c.i, c.j + 1), true),
        2 => (Vertex::new(c.i, c.j), false),
        _ => (Vertex::new(c.i, c.j), true),
    };
    PrimalEdge { origin: surface.wrap_vertex(origin), horizontal }
}

/// The edge joining two adjacent primal vertices.
pub fn primal_edge(surface: &TiledSurface, a: Vertex, b: Vertex) -> Option<PrimalEdge> {
    let d = surface.vertex_direction(a, b)?;
    let a = surface.wrap_vertex(a);
    Some(match d {
        0 => PrimalEdge { origin: a, horizontal: true },
        1 => PrimalEdge { origin: a, horizontal: false },
        2 => PrimalEdge { origin: surface.wrap_vertex(b), horizontal: true },
        _ => PrimalEdge { origin: surface.wrap_vertex(b), horizontal: false },
    })
}

/// Source of walk directions: the seeded generator, or a fixed script in tests.
pub trait StepSource {
    fn next_dir(&mut self) -> Result<u8>;
}

/// ChaCha8 with an explicit 64-bit seed and stream id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimRng {
    inner: ChaCha8Rng,
    pub seed: u64,
    pub stream: u64,
}

impl SimRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        SimRng { inner, seed, stream }
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    /// Exponential variate with the given rate.
    pub fn exponential(&mut self, rate: f64) -> f64 {
        let u: f64 = self.inner.gen();
        -(1.0 - u).ln() / rate
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.gen()
    }
}

impl StepSource for SimRng {
    #[inline]
    fn next_dir(&mut self) -> Result<u8> {
        Ok((self.inner.next_u32() >> 30) as u8)
    }
}

/// A fixed list of direction codes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScriptedSteps {
    steps: Vec<u8>,
    at: usize,
}

impl ScriptedSteps {
    pub fn new(steps: Vec<u8>) -> Self {
        ScriptedSteps { steps, at: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.steps.len() - self.at
    }
}

impl StepSource for ScriptedSteps {
    fn next_dir(&mut self) -> Result<u8> {
        let d = *self
            .steps
            .get(self.at)
            .ok_or_else(|| Error::Parameter("scripted walk exhausted".into()))?;
        self.at += 1;
        Ok(d & 3)
    }
}

/// One uniform step to a dual neighbour; consumes one draw.
pub fn walk_step<S: StepSource>(surface: &TiledSurface, c: CellId, rng: &mut S) -> Result<CellId> {
    Ok(surface.step(c, rng.next_dir()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn torus(n: i64) -> TiledSurface {
        TiledSurface::torus(n, n, 1.0, Complex64::new(0.0, 0.0)).unwrap()
    }

    #[test]
    fn torus_neighbors_wrap() {
        let got: HashSet<CellId> = neighbors(&torus(4), CellId::new(0, 0)).into_iter().collect();
        let want: HashSet<CellId> = [(1, 0), (3, 0), (0, 1), (0, 3)].map(|(i, j)| CellId::new(i, j)).into_iter().collect();
        assert_eq!(got, want);
        let plane = TiledSurface::plane(1.0).unwrap();
        assert_eq!(
            neighbors(&plane, CellId::new(5, 7)),
            [CellId::new(6, 7), CellId::new(5, 8), CellId::new(4, 7), CellId::new(5, 6)]
        );
        assert_eq!(neighbors(&plane, CellId::new(0, 0))[2], CellId::new(-1, 0));
        assert!(TiledSurface::torus(3, 8, 1.0, Complex64::new(0.0, 0.0)).is_err());
        assert!(TiledSurface::plane(0.0).is_err());
    }

    #[test]
    fn neighbor_relation_is_symmetric() {
        for s in [torus(5), TiledSurface::plane(0.5).unwrap()] {
            for i in -2..7 {
                for j in -2..7 {
                    let c = s.wrap(CellId::new(i, j));
                    assert!(s.contains(c));
                    for n in neighbors(&s, c) {
                        assert!(neighbors(&s, n).contains(&c));
                    }
                }
            }
        }
    }

    #[test]
    fn separating_edges() {
        let s = TiledSurface::plane(1.0).unwrap();
        let (a, b, c) = (CellId::new(0, 0), CellId::new(1, 0), CellId::new(0, 1));
        assert_eq!(separating_edge(&s, a, b).unwrap(), PrimalEdge { origin: Vertex::new(1, 0), horizontal: false });
        assert_eq!(separating_edge(&s, a, c).unwrap(), PrimalEdge { origin: Vertex::new(0, 1), horizontal: true });
        assert!(matches!(separating_edge(&s, a, CellId::new(1, 1)), Err(Error::Adjacency(_))));
        let t = torus(6);
        for i in 0..6 {
            for j in 0..6 {
                let c = CellId::new(i, j);
                for n in neighbors(&t, c) {
                    assert_eq!(separating_edge(&t, c, n).unwrap(), separating_edge(&t, n, c).unwrap());
                }
            }
        }
        assert_eq!(
            separating_edge(&t, CellId::new(5, 2), CellId::new(0, 2)).unwrap(),
            PrimalEdge { origin: Vertex::new(0, 2), horizontal: false }
        );
    }

    #[test]
    fn primal_edges_match_cell_sides() {
        let t = torus(4);
        let c = CellId::new(3, 3);
        let [v0, v1, v2, v3] = c.corners();
        assert_eq!(primal_edge(&t, v0, v1), Some(cell_side(&t, c, 3)));
        assert_eq!(primal_edge(&t, v1, v2), Some(cell_side(&t, c, 0)));
        assert_eq!(primal_edge(&t, v3, v2), Some(cell_side(&t, c, 1)));
        assert_eq!(primal_edge(&t, v0, v3), Some(cell_side(&t, c, 2)));
        assert_eq!(primal_edge(&t, v2, v1), primal_edge(&t, v1, v2));
        assert_eq!(primal_edge(&t, v0, v2), None);
    }

    #[test]
    fn coordinates() {
        let s = TiledSurface::plane(0.05).unwrap();
        assert_eq!(s.cell_containing(Complex64::new(0.0, 0.0)), CellId::new(-1, -1));
        assert_eq!(s.cell_containing(Complex64::new(1.0, 0.0)), CellId::new(19, -1));
        assert_eq!(s.cell_containing(Complex64::new(0.01, 0.01)), CellId::new(0, 0));
        assert!((s.cell_center(CellId::new(0, 0)) - Complex64::new(0.025, 0.025)).norm() < 1e-15);
        let t = TiledSurface::torus(80, 80, 1.0 / 40.0, Complex64::new(-0.5, -1.0)).unwrap();
        assert_eq!(t.cell_containing(Complex64::new(0.0, 0.0)), CellId::new(19, 39));
        assert_eq!(t.cell_containing(Complex64::new(1.0, 0.0)), CellId::new(59, 39));
    }

    #[test]
    fn uniform_steps() {
        let s = TiledSurface::plane(1.0).unwrap();
        let mut rng = SimRng::new(7, 3);
        let n = 1_000_000;
        let mut counts = [0usize; 4];
        let start = CellId::new(0, 0);
        for _ in 0..n {
            let c = walk_step(&s, start, &mut rng).unwrap();
            counts[s.direction(start, c).unwrap() as usize] += 1;
        }
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for k in counts {
            assert!((k as f64 - n as f64 / 4.0).abs() < 4.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn golden_first_step() {
        let t = TiledSurface::torus(8, 8, 1.0, Complex64::new(0.0, 0.0)).unwrap();
        let mut rng = SimRng::new(42, 0);
        assert_eq!(walk_step(&t, CellId::new(0, 0), &mut rng).unwrap(), GOLDEN_SEED_42);
    }

    const GOLDEN_SEED_42: CellId = CellId::new(1, 0);

    #[test]
    fn equal_seeds_and_streams_agree() {
        let mut a = SimRng::new(99, 5);
        let mut b = SimRng::new(99, 5);
        let mut c = SimRng::new(99, 6);
        let xs: Vec<u32> = (0..1000).map(|_| a.next_u32()).collect();
        let ys: Vec<u32> = (0..1000).map(|_| b.next_u32()).collect();
        let zs: Vec<u32> = (0..1000).map(|_| c.next_u32()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }

    #[test]
    fn torus_walk_occupation_is_uniform() {
        let t = torus(8);
        let mut rng = SimRng::new(2024, 1);
        let mut c = CellId::new(0, 0);
        let mut counts = vec![0f64; 64];
        // odd thinning decorrelates the samples and alternates the parity class
        let thin = 129;
        let steps = 10_000_000usize;
        for k in 1..=steps {
            c = walk_step(&t, c, &mut rng).unwrap();
            if k % thin == 0 {
                counts[(c.i * 8 + c.j) as usize] += 1.0;
            }
        }
        let n: f64 = counts.iter().sum();
        let e = n / 64.0;
        let chi2: f64 = counts.iter().map(|k| (k - e) * (k - e) / e).sum();
        // 63 degrees of freedom
        assert!(chi2 < 63.0 + 5.0 * (2.0f64 * 63.0).sqrt(), "{chi2}");
    }

    #[test]
    fn scripted_steps() {
        let s = TiledSurface::plane(1.0).unwrap();
        let mut script = ScriptedSteps::new(vec![0, 1]);
        let c = walk_step(&s, CellId::new(0, 0), &mut script).unwrap();
        let c = walk_step(&s, c, &mut script).unwrap();
        assert_eq!(c, CellId::new(1, 1));
        assert!(walk_step(&s, c, &mut script).is_err());
    }
}
