use std::collections::{HashMap, HashSet, VecDeque};

use super::topology::{interior, lift};
use super::ErosionState;
use crate::lattice::{CellId, Vertex};

/// Outcome of a full invariant check; empty when everything holds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InvariantReport {
    pub violations: Vec<String>,
}

impl InvariantReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A pass of an interface through a vertex: the side it arrives from and the side it leaves by.
struct Visit {
    droplet: usize,
    sides: (u8, u8),
}

fn straight(s: (u8, u8)) -> bool {
    (s.0 + 2) % 4 == s.1
}

/// Checks interface closure and simplicity, cell counts, source ownership,
/// interface/ownership duality, connectivity, and interface compatibility.
pub fn check_invariants(state: &ErosionState) -> InvariantReport {
    let mut v = Vec::new();
    let surface = &state.surface;
    let mut visits: HashMap<Vertex, Vec<Visit>> = HashMap::new();
    let mut edges: HashMap<(Vertex, u8), Vec<(usize, bool)>> = HashMap::new();

    for (k, walk) in state.interfaces.iter().enumerate() {
        let n = walk.len();
        if n < 4 {
            v.push(format!("interface {k} has {n} vertices"));
            continue;
        }
        let mut dirs = Vec::with_capacity(n);
        for t in 0..n {
            match surface.vertex_direction(walk[t], walk[(t + 1) % n]) {
                Some(d) => dirs.push(d),
                None => {
                    v.push(format!("interface {k}: vertices {t} and {} are not adjacent", (t + 1) % n));
                    break;
                }
            }
        }
        if dirs.len() != n {
            continue;
        }
        let mut seen = HashSet::new();
        for t in 0..n {
            let d = dirs[t];
            // undirected key: lower endpoint with direction east or north
            let key = if d < 2 { (walk[t], d) } else { (walk[(t + 1) % n], d - 2) };
            if !seen.insert(key) {
                v.push(format!("interface {k} repeats the edge at ({}, {})", key.0.i, key.0.j));
            }
            edges.entry(key).or_default().push((k, d < 2));
            let arrive = (dirs[(t + n - 1) % n] + 2) % 4;
            visits.entry(walk[t]).or_default().push(Visit { droplet: k, sides: (arrive, d) });
        }

        let count = state.counts[k];
        let owned = state.grid.count((k + 1) as u8);
        if owned != count {
            v.push(format!("droplet {k} records {count} squares but owns {owned}"));
        }
        match lift(surface, walk).and_then(|l| interior(&l)) {
            None => v.push(format!("interface {k} does not close in the cover")),
            Some((cells, lo, hi)) => {
                if lo < 0 || hi > 1 {
                    v.push(format!("interface {k} has winding numbers in [{lo}, {hi}]"));
                }
                let inside: HashSet<CellId> = cells.iter().map(|&c| surface.wrap(c)).collect();
                let code = (k + 1) as u8;
                if inside.len() != cells.len() || inside.len() != owned || inside.iter().any(|&c| state.grid.get(c) != code) {
                    v.push(format!(
                        "interface {k} encloses {} squares, droplet owns {owned}",
                        inside.len()
                    ));
                }
            }
        }
        if !connected(state, k) {
            v.push(format!("droplet {k} is not 4-connected"));
        }
    }

    for s in &state.sources {
        if state.grid.get(s.cell) != (s.droplet + 1) as u8 {
            v.push(format!("source square ({}, {}) left droplet {}", s.cell.i, s.cell.j, s.droplet));
        }
    }

    for ((at, _), uses) in &edges {
        if uses.len() > 2 {
            v.push(format!("edge at ({}, {}) lies on {} interfaces", at.i, at.j, uses.len()));
        } else if uses.len() == 2 && uses[0].1 == uses[1].1 {
            v.push(format!(
                "interfaces {} and {} run the same way along the edge at ({}, {})",
                uses[0].0, uses[1].0, at.i, at.j
            ));
        }
    }

    for (at, list) in &visits {
        for a in 0..list.len() {
            for b in a + 1..list.len() {
                let (p, q) = (&list[a], &list[b]);
                if straight(p.sides) && straight(q.sides) && p.sides.0 % 2 != q.sides.0 % 2 {
                    v.push(format!(
                        "interfaces {} and {} cross at ({}, {})",
                        p.droplet, q.droplet, at.i, at.j
                    ));
                }
            }
        }
    }
    InvariantReport { violations: v }
}

fn connected(state: &ErosionState, k: usize) -> bool {
    let code = (k + 1) as u8;
    let cells = state.grid.cells_of(code);
    let Some(&start) = cells.first() else {
        return false;
    };
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for d in 0..4 {
            let n = state.surface.step(c, d);
            if state.grid.get(n) == code && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == cells.len()
}
