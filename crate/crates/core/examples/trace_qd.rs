//! Critical graph of the three-source differential with weights 2, 1, 0.
use hslab::quad_diff::{build_three_source, critical_graph, finite_critical_points, GraphOptions};

fn main() -> hslab::Result<()> {
    let q = build_three_source(2.0, 1.0, 0.0)?;
    for cp in finite_critical_points(&q)? {
        println!("zero at {} (order {})", cp.point, cp.order);
    }
    let g = critical_graph(&q, GraphOptions::default())?;
    for e in &g.edges {
        println!("edge from vertex {}: {:?}, {} points, length {:.4}", e.from, e.end, e.curve.len(), e.curve.arclength());
    }
    if let Some(l) = g.loop_edge() {
        let (lo, hi) = l.curve.bounds().unwrap();
        println!("loop around 1 spans {lo} .. {hi}");
    }
    Ok(())
}
