use std::collections::HashMap;

use super::ErosionState;
use crate::error::{Error, Result};
use crate::lattice::CellId;

const TOL: f64 = 1e-12;

/// Killed-walk Green's function of droplet `k` between its sources: entry
/// `(j, l)` is the expected number of visits to source `l` of a walk started
/// at source `j` before it leaves the droplet.
pub fn droplet_green_matrix(state: &ErosionState, k: usize) -> Result<Vec<Vec<f64>>> {
    let cells = state.cells(k)?;
    if cells.is_empty() {
        return Err(Error::Solve(format!("droplet {k} is empty")));
    }
    let index: HashMap<CellId, usize> = cells.iter().enumerate().map(|(n, &c)| (c, n)).collect();
    let nbrs: Vec<Vec<usize>> = cells
        .iter()
        .map(|&c| (0..4).filter_map(|d| index.get(&state.surface.step(c, d)).copied()).collect())
        .collect();
    let sources: Vec<usize> = state
        .sources
        .iter()
        .filter(|s| s.droplet == k)
        .map(|s| index[&s.cell])
        .collect();
    let mut g = Vec::with_capacity(sources.len());
    for &s in &sources {
        let mut rhs = vec![0.0; cells.len()];
        rhs[s] = 1.0;
        let x = conjugate_gradient(&nbrs, &rhs)?;
        g.push(sources.iter().map(|&t| x[t]).collect());
    }
    Ok(g)
}

fn apply(nbrs: &[Vec<usize>], x: &[f64], out: &mut [f64]) {
    for (n, list) in nbrs.iter().enumerate() {
        out[n] = x[n] - 0.25 * list.iter().map(|&m| x[m]).sum::<f64>();
    }
}

/// Solves `(I - P) x = b` for the symmetric positive definite killed-walk operator.
fn conjugate_gradient(nbrs: &[Vec<usize>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    for _ in 0..(10 * n + 100) {
        if rr.sqrt() <= TOL * b_norm {
            return Ok(x);
        }
        apply(nbrs, &p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(Error::Solve("operator is not positive definite".into()));
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let next: f64 = r.iter().map(|v| v * v).sum();
        let beta = next / rr;
        rr = next;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(Error::Solve(format!("conjugate gradient did not converge on {n} squares")))
}

/// Lattice reduced energy: for each droplet, `Σ a_j a_l G(z_j, z_l)` over all
/// pairs of its sources, diagonal included.
pub fn discrete_energy(state: &ErosionState) -> Result<f64> {
    let mut total = 0.0;
    for k in 0..state.droplet_count() {
        let g = droplet_green_matrix(state, k)?;
        let rates: Vec<f64> = state.sources.iter().filter(|s| s.droplet == k).map(|s| s.rate).collect();
        for (j, row) in g.iter().enumerate() {
            for (l, &v) in row.iter().enumerate() {
                total += rates[j] * rates[l] * v;
            }
        }
    }
    Ok(total)
}
