//! A two-strip Green's surface: layout and values of `-2 x_T`.
use hslab::greens_surface::{from_weighted_tree, greens_value, layout, validate_greens_type, GreensTypeSurface, SurfacePoint, WeightedTree};
use hslab::Complex64;

fn main() -> hslab::Result<()> {
    let tree = WeightedTree::Node { width: 1.0, children: vec![WeightedTree::Leaf { weight: 1.0 }, WeightedTree::Leaf { weight: 2.0 }] };
    let t = from_weighted_tree(&tree)?;
    println!("height {:.6}, {} leaves", t.height(), t.leaf_count());
    for piece in layout(&t, 0.0, -4.0) {
        let corners: Vec<String> = piece.corners.iter().map(|z| format!("({:.4}, {:.4})", z.re, z.im)).collect();
        println!("{:?} strip {} corners {}", piece.path, piece.is_strip, corners.join(" "));
    }
    for x in [-0.25, -0.5, -1.0, -3.0] {
        let path = if x > -1.0 { vec![] } else { vec![1] };
        let local = if x > -1.0 { Complex64::new(x, 4.0) } else { Complex64::new(x + 1.0, 1.0) };
        println!("G at x = {x}: {}", greens_value(&t, &SurfacePoint::new(path, local))?);
    }
    println!("slit plane valid: {}", validate_greens_type(&GreensTypeSurface::slit_plane()).is_valid());
    Ok(())
}
