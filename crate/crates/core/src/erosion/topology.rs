//! Interface walks: boundary tracing, slit removal, rerouting, and the
//! simple-point table that decides whether a capture keeps droplet topology.

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::lattice::{CellId, TiledSurface, Vertex, STEPS};

/// The eight cells around a square, in counter-clockwise order starting east.
pub const RING: [(i64, i64); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];

fn find(parent: &mut [usize; 8], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

fn components(members: [bool; 8], edges: &[(usize, usize)], counted: impl Fn(usize) -> bool) -> usize {
    let mut parent = [0, 1, 2, 3, 4, 5, 6, 7];
    for &(a, b) in edges {
        if members[a] && members[b] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let mut roots = Vec::new();
    for k in 0..8 {
        if members[k] && counted(k) {
            let r = find(&mut parent, k);
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
    }
    roots.len()
}

/// Whether adding or removing the centre square preserves the topology of a
/// 4-connected set whose complement is taken with 8-connectivity. Bit `k` of
/// the mask is set when `RING[k]` belongs to the set.
pub fn is_simple(mask: u8) -> bool {
    static TABLE: OnceLock<[bool; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [false; 256];
        let ring: Vec<(usize, usize)> = (0..8).map(|k| (k, (k + 1) % 8)).collect();
        let mut diag = ring.clone();
        diag.extend([(0, 2), (2, 4), (4, 6), (6, 0)]);
        for (m, slot) in t.iter_mut().enumerate() {
            let inside: [bool; 8] = std::array::from_fn(|k| m >> k & 1 == 1);
            let outside: [bool; 8] = std::array::from_fn(|k| !inside[k]);
            let t4 = components(inside, &ring, |k| k % 2 == 0);
            let t8 = components(outside, &diag, |_| true);
            *slot = t4 == 1 && t8 == 1;
        }
        t
    })[mask as usize]
}

/// Counter-clockwise boundary walk of a 4-connected cell set without holes.
///
/// At a vertex where the set touches itself diagonally the walk turns left,
/// so that it hugs the square it is going around.
pub fn trace_boundary(surface: &TiledSurface, cells: &HashSet<CellId>) -> Result<Vec<Vertex>> {
    if cells.is_empty() {
        return Err(Error::EmptyInterface("empty cell set".into()));
    }
    let mut out: BTreeMap<Vertex, Vec<u8>> = BTreeMap::new();
    let mut total = 0usize;
    for &c in cells {
        let [ll, lr, ur, ul] = c.corners().map(|v| surface.wrap_vertex(v));
        for (d, (from, dir)) in [(lr, 1u8), (ur, 2), (ul, 3), (ll, 0)].into_iter().enumerate() {
            if !cells.contains(&surface.step(c, d as u8)) {
                out.entry(from).or_default().push(dir);
                total += 1;
            }
        }
    }
    let start = *out.keys().next().expect("nonempty");
    let mut walk = Vec::with_capacity(total);
    let mut at = start;
    let mut dir = out[&start][0];
    let mut used = 0usize;
    loop {
        walk.push(at);
        out.get_mut(&at).expect("vertex on boundary").retain(|&d| d != dir);
        used += 1;
        at = surface.step_vertex(at, dir);
        let options = &out[&at];
        if options.is_empty() {
            if at != start {
                return Err(Error::InvariantViolation(format!("boundary walk stuck at ({}, {})", at.i, at.j)));
            }
            break;
        }
        dir = [(dir + 1) % 4, dir, (dir + 3) % 4]
            .into_iter()
            .find(|d| options.contains(d))
            .ok_or_else(|| Error::InvariantViolation(format!("boundary walk reverses at ({}, {})", at.i, at.j)))?;
    }
    if used != total {
        return Err(Error::InvariantViolation(format!(
            "cell set boundary has more than one cycle ({used} of {total} edges traced)"
        )));
    }
    Ok(walk)
}

/// Deletes back-and-forth edge pairs `v → w → v` until none remain.
pub fn remove_slits(walk: &[Vertex]) -> Result<Vec<Vertex>> {
    if walk.len() < 3 {
        return Err(Error::EmptyInterface(format!("walk of {} vertices", walk.len())));
    }
    let mut stack: Vec<Vertex> = Vec::with_capacity(walk.len() + 1);
    for &v in walk.iter().chain(std::iter::once(&walk[0])) {
        if stack.len() >= 2 && stack[stack.len() - 2] == v {
            stack.pop();
        } else {
            stack.push(v);
        }
    }
    // the stack is a closed path; peel pairs that straddle the seam
    let mut lo = 0usize;
    let mut hi = stack.len() - 1;
    while hi >= lo + 2 && stack[lo] == stack[hi] && stack[lo + 1] == stack[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    if hi < lo + 3 || stack[lo] != stack[hi] {
        return Err(Error::EmptyInterface("slit removal consumed the interface".into()));
    }
    Ok(stack[lo..hi].to_vec())
}

/// Replaces the traversal of edge `a b` by the three other sides of `cell`.
pub fn reroute_around(surface: &TiledSurface, walk: &mut Vec<Vertex>, a: Vertex, b: Vertex, cell: CellId) -> bool {
    let n = walk.len();
    let Some(k) = (0..n).find(|&k| {
        let (p, q) = (walk[k], walk[(k + 1) % n]);
        (p == a && q == b) || (p == b && q == a)
    }) else {
        return false;
    };
    let (p, q) = (walk[k], walk[(k + 1) % n]);
    let corners = cell.corners().map(|v| surface.wrap_vertex(v));
    let ip = corners.iter().position(|&c| c == p).expect("edge on the cell");
    let iq = corners.iter().position(|&c| c == q).expect("edge on the cell");
    // go the long way round from p to q
    let step = if (ip + 1) % 4 == iq { 3 } else { 1 };
    let m1 = corners[(ip + step) % 4];
    let m2 = corners[(ip + 2 * step) % 4];
    walk.insert(k + 1, m2);
    walk.insert(k + 1, m1);
    true
}

/// Lifts a wrapped walk to the universal cover; `None` if a step is not a lattice step.
pub fn lift(surface: &TiledSurface, walk: &[Vertex]) -> Option<Vec<(i64, i64)>> {
    let mut out = Vec::with_capacity(walk.len() + 1);
    let mut at = (walk[0].i, walk[0].j);
    out.push(at);
    for k in 0..walk.len() {
        let d = surface.vertex_direction(walk[k], walk[(k + 1) % walk.len()])?;
        let (di, dj) = STEPS[d as usize];
        at = (at.0 + di, at.1 + dj);
        out.push(at);
    }
    Some(out)
}

/// Cells of winding number one for a closed lifted walk, with the winding
/// values seen; `None` if the walk does not close in the cover.
pub fn interior(lifted: &[(i64, i64)]) -> Option<(Vec<CellId>, i64, i64)> {
    if lifted.first() != lifted.last() {
        return None;
    }
    let mut rows: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
    for w in lifted.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x0 == x1 {
            let (row, s) = if y1 > y0 { (y0, 1) } else { (y1, -1) };
            rows.entry(row).or_default().push((x0, s));
        }
    }
    let mut cells = Vec::new();
    let (mut lo, mut hi) = (0i64, 0i64);
    for (row, mut edges) in rows {
        edges.sort();
        // winding of cell i is the signed count of upward edges to its right
        let mut wind: i64 = edges.iter().map(|e| e.1).sum();
        let mut k = 0;
        while k < edges.len() {
            let x = edges[k].0;
            while k < edges.len() && edges[k].0 == x {
                wind -= edges[k].1;
                k += 1;
            }
            lo = lo.min(wind);
            hi = hi.max(wind);
            if wind == 1 && k < edges.len() {
                cells.extend((x..edges[k].0).map(|i| CellId::new(i, row)));
            }
        }
    }
    Some((cells, lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: i64, j: i64) -> Vertex {
        Vertex::new(i, j)
    }

    fn plane() -> TiledSurface {
        TiledSurface::plane(1.0).unwrap()
    }

    fn set(cells: &[(i64, i64)]) -> HashSet<CellId> {
        cells.iter().map(|&(i, j)| CellId::new(i, j)).collect()
    }

    #[test]
    fn simple_point_table() {
        assert!(!is_simple(0));
        assert!(!is_simple(0xff));
        // left half of the ring
        assert!(is_simple(0b0011_1000));
        // only a diagonal neighbour: not 4-adjacent
        assert!(!is_simple(0b0000_0010));
        // east and west without a connection: a bridge
        assert!(!is_simple(0b0001_0001));
        // a single 4-neighbour
        assert!(is_simple(0b0000_0001));
        // surrounded except one diagonal: the centre is a pocket reached through a corner
        assert!(is_simple(0b1101_1111));
    }

    #[test]
    fn single_cell_boundary() {
        let w = trace_boundary(&plane(), &set(&[(0, 0)])).unwrap();
        assert_eq!(w, vec![v(0, 0), v(1, 0), v(1, 1), v(0, 1)]);
    }

    #[test]
    fn diagonal_pinch_hugs_each_square() {
        // an L-tromino plus a square touching it at a corner, joined elsewhere
        let cells = set(&[(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)]);
        // ring with a hole is rejected
        assert!(trace_boundary(&plane(), &cells).is_err());
        let pinched = set(&[(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (1, 1)]);
        let w = trace_boundary(&plane(), &pinched).unwrap();
        let lifted = lift(&plane(), &w).unwrap();
        let (inside, lo, hi) = interior(&lifted).unwrap();
        assert_eq!((lo, hi), (0, 1));
        assert_eq!(inside.into_iter().collect::<HashSet<_>>(), pinched);
    }

    #[test]
    fn torus_boundary_wraps() {
        let t = TiledSurface::torus(6, 6, 1.0, Default::default()).unwrap();
        let cells = set(&[(5, 0), (0, 0)]);
        let w = trace_boundary(&t, &cells).unwrap();
        assert_eq!(w.len(), 6);
        let lifted = lift(&t, &w).unwrap();
        let (inside, _, _) = interior(&lifted).unwrap();
        let wrapped: HashSet<CellId> = inside.into_iter().map(|c| t.wrap(c)).collect();
        assert_eq!(wrapped, cells);
    }

    #[test]
    fn slit_examples() {
        let square = vec![v(0, 0), v(1, 0), v(1, 1), v(0, 1)];
        assert_eq!(remove_slits(&square).unwrap(), square);
        // spur of length one out of the right side
        let spur = vec![v(0, 0), v(1, 0), v(2, 0), v(1, 0), v(1, 1), v(0, 1)];
        assert_eq!(remove_slits(&spur).unwrap(), square);
        // nested spur of length two
        let nested = vec![v(0, 0), v(1, 0), v(2, 0), v(3, 0), v(2, 0), v(1, 0), v(1, 1), v(0, 1)];
        assert_eq!(remove_slits(&nested).unwrap(), square);
        // a spur straddling the start of the list
        let seam = vec![v(1, 0), v(0, 0), v(-1, 0), v(0, 0), v(0, 1), v(1, 1)];
        let cleaned = remove_slits(&seam).unwrap();
        assert_eq!(cleaned.len(), 4);
        assert!(!cleaned.contains(&v(-1, 0)));
        assert!(matches!(remove_slits(&[v(0, 0), v(1, 0), v(2, 0), v(1, 0)]), Err(Error::EmptyInterface(_))));
    }

    #[test]
    fn reroute_bulges_and_retracts() {
        let s = plane();
        let mut w = vec![v(0, 0), v(1, 0), v(1, 1), v(0, 1)];
        // capture the square east of the unit square
        assert!(reroute_around(&s, &mut w, v(1, 0), v(1, 1), CellId::new(1, 0)));
        assert_eq!(w, vec![v(0, 0), v(1, 0), v(2, 0), v(2, 1), v(1, 1), v(0, 1)]);
        // lose it again through its east side
        let mut back = w.clone();
        assert!(reroute_around(&s, &mut back, v(2, 0), v(2, 1), CellId::new(1, 0)));
        assert_eq!(remove_slits(&back).unwrap(), vec![v(0, 0), v(1, 0), v(1, 1), v(0, 1)]);
        assert!(!reroute_around(&s, &mut back, v(5, 5), v(5, 6), CellId::new(5, 5)));
    }
}
