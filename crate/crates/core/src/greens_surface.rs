//! Green's surfaces built from half-strips and rectangles, and surfaces of
//! Green's type glued along their right-most sides by minus-translations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Truncation depth used when drawing or sampling half-strips.
pub const DEFAULT_X_MIN: f64 = -40.0;

const TOL: f64 = 1e-12;

/// A half-strip `{Re z ≤ 0, 0 ≤ Im z ≤ π·weight}` or a rectangle `[-b, 0] × [0, H]`
/// with children glued bottom to top along its left side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GreensSurface {
    HalfStrip { weight: f64 },
    Assembly { rect_width: f64, children: Vec<GreensSurface> },
}

pub fn strip(a: f64) -> Result<GreensSurface> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Parameter(format!("strip weight {a}")));
    }
    Ok(GreensSurface::HalfStrip { weight: a })
}

pub fn assemble(rect_width: f64, children: Vec<GreensSurface>) -> Result<GreensSurface> {
    if children.is_empty() {
        return Err(Error::Parameter("assembly without children".into()));
    }
    if !(rect_width > 0.0 && rect_width.is_finite()) {
        return Err(Error::Parameter(format!("rectangle width {rect_width}")));
    }
    Ok(GreensSurface::Assembly { rect_width, children })
}

impl GreensSurface {
    /// Length of the unpaired right-most side.
    pub fn height(&self) -> f64 {
        match self {
            GreensSurface::HalfStrip { weight } => PI * weight,
            GreensSurface::Assembly { children, .. } => children.iter().map(|c| c.height()).sum(),
        }
    }

    /// Total source weight.
    pub fn weight(&self) -> f64 {
        match self {
            GreensSurface::HalfStrip { weight } => *weight,
            GreensSurface::Assembly { children, .. } => children.iter().map(|c| c.weight()).sum(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            GreensSurface::HalfStrip { .. } => 1,
            GreensSurface::Assembly { children, .. } => 1 + children.iter().map(|c| c.depth()).max().unwrap_or(0),
        }
    }

    /// Number of half-strips, one per source point.
    pub fn leaf_count(&self) -> usize {
        match self {
            GreensSurface::HalfStrip { .. } => 1,
            GreensSurface::Assembly { children, .. } => children.iter().map(|c| c.leaf_count()).sum(),
        }
    }

    /// The subtree addressed by `path`.
    pub fn node(&self, path: &[usize]) -> Result<&GreensSurface> {
        let mut node = self;
        for (depth, &k) in path.iter().enumerate() {
            node = match node {
                GreensSurface::Assembly { children, .. } if k < children.len() => &children[k],
                _ => return Err(Error::Address(format!("no child {k} at depth {depth}"))),
            };
        }
        Ok(node)
    }
}

/// A point given by a path of child indices and a local coordinate in the
/// addressed strip or rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub path: Vec<usize>,
    pub local: Complex64,
}

impl SurfacePoint {
    pub fn new(path: Vec<usize>, local: Complex64) -> Self {
        SurfacePoint { path, local }
    }
}

/// Canonical `x_T`: zero on the unpaired side, `x_{T_i} - b` inside children.
pub fn x_coordinate(t: &GreensSurface, p: &SurfacePoint) -> Result<f64> {
    let mut node = t;
    let mut shift = 0.0;
    for (depth, &k) in p.path.iter().enumerate() {
        match node {
            GreensSurface::Assembly { rect_width, children } if k < children.len() => {
                shift -= rect_width;
                node = &children[k];
            }
            _ => return Err(Error::Address(format!("no child {k} at depth {depth}"))),
        }
    }
    let z = p.local;
    let h = node.height();
    let inside = match node {
        GreensSurface::HalfStrip { .. } => z.re <= TOL,
        GreensSurface::Assembly { rect_width, .. } => z.re <= TOL && z.re >= -rect_width - TOL,
    } && z.im >= -TOL
        && z.im <= h + TOL;
    if !inside {
        return Err(Error::Address(format!("{z} is outside the addressed polygon")));
    }
    Ok(z.re + shift)
}

/// Green's function `-2 x_T`.
pub fn greens_value(t: &GreensSurface, p: &SurfacePoint) -> Result<f64> {
    Ok(-2.0 * x_coordinate(t, p)?)
}

/// A polygon of the planar layout, in global coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutPiece {
    pub path: Vec<usize>,
    pub is_strip: bool,
    pub corners: Vec<Complex64>,
}

/// Lays the tree out with the unpaired side on `Re z = 0` starting at height
/// `y0`; half-strips are cut at `x_min`.
pub fn layout(t: &GreensSurface, y0: f64, x_min: f64) -> Vec<LayoutPiece> {
    let mut out = Vec::new();
    layout_into(t, Vec::new(), 0.0, y0, x_min, &mut out);
    out
}

fn layout_into(t: &GreensSurface, path: Vec<usize>, x0: f64, y0: f64, x_min: f64, out: &mut Vec<LayoutPiece>) {
    let h = t.height();
    let rect = |left: f64| {
        vec![
            Complex64::new(left, y0),
            Complex64::new(x0, y0),
            Complex64::new(x0, y0 + h),
            Complex64::new(left, y0 + h),
        ]
    };
    match t {
        GreensSurface::HalfStrip { .. } => {
            out.push(LayoutPiece { path, is_strip: true, corners: rect(x_min.min(x0 - 1.0)) });
        }
        GreensSurface::Assembly { rect_width, children } => {
            out.push(LayoutPiece { path: path.clone(), is_strip: false, corners: rect(x0 - rect_width) });
            let mut y = y0;
            for (k, c) in children.iter().enumerate() {
                let mut p = path.clone();
                p.push(k);
                layout_into(c, p, x0 - rect_width, y, x_min, out);
                y += c.height();
            }
        }
    }
}

/// Nested divisor data: leaves carry source weights, nodes carry rectangle widths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightedTree {
    Leaf { weight: f64 },
    Node { width: f64, children: Vec<WeightedTree> },
}

pub fn from_weighted_tree(tree: &WeightedTree) -> Result<GreensSurface> {
    match tree {
        WeightedTree::Leaf { weight } => strip(*weight),
        WeightedTree::Node { width, children } => {
            assemble(*width, children.iter().map(from_weighted_tree).collect::<Result<_>>()?)
        }
    }
}

pub fn to_weighted_tree(t: &GreensSurface) -> WeightedTree {
    match t {
        GreensSurface::HalfStrip { weight } => WeightedTree::Leaf { weight: *weight },
        GreensSurface::Assembly { rect_width, children } => WeightedTree::Node {
            width: *rect_width,
            children: children.iter().map(to_weighted_tree).collect(),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingKind {
    MinusTranslation,
    Translation,
}

/// Identification of `[s, t]` on piece `i` with `[s', t']` on piece `j`, as
/// heights along the right-most sides, by `z ↦ -z + offset` (or `z + offset`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub i: usize,
    pub interval: [f64; 2],
    pub j: usize,
    pub interval_j: [f64; 2],
    pub offset: Complex64,
    #[serde(default = "minus")]
    pub kind: PairingKind,
}

fn minus() -> PairingKind {
    PairingKind::MinusTranslation
}

impl Pairing {
    pub fn minus_translation(i: usize, interval: [f64; 2], j: usize, interval_j: [f64; 2], offset: Complex64) -> Self {
        Pairing { i, interval, j, interval_j, offset, kind: PairingKind::MinusTranslation }
    }

    fn apply(&self, z: Complex64) -> Complex64 {
        match self.kind {
            PairingKind::MinusTranslation => -z + self.offset,
            PairingKind::Translation => z + self.offset,
        }
    }

    fn is_inverse_of(&self, other: &Pairing) -> bool {
        let close = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).abs() < TOL && (a[1] - b[1]).abs() < TOL;
        self.kind == other.kind
            && self.i == other.j
            && self.j == other.i
            && close(self.interval, other.interval_j)
            && close(self.interval_j, other.interval)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreensTypeSurface {
    pub pieces: Vec<GreensSurface>,
    pub pairings: Vec<Pairing>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum GluingIssue {
    LengthMismatch { pairing: usize, left: f64, right: f64 },
    CoverageGap { piece: usize, from: f64, to: f64 },
    Overlap { piece: usize, from: f64, to: f64 },
    NonInvolutive { pairing: usize },
    Orientation { pairing: usize },
    BadInterval { pairing: usize },
    UnknownPiece { pairing: usize, piece: usize },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<GluingIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

pub fn validate_greens_type(s: &GreensTypeSurface) -> ValidationReport {
    let mut issues = Vec::new();
    let mut cover: Vec<Vec<(f64, f64)>> = vec![Vec::new(); s.pieces.len()];
    for (n, p) in s.pairings.iter().enumerate() {
        let mut known = true;
        for piece in [p.i, p.j] {
            if piece >= s.pieces.len() {
                issues.push(GluingIssue::UnknownPiece { pairing: n, piece });
                known = false;
            }
        }
        if !known {
            continue;
        }
        let ok_interval = |iv: [f64; 2], piece: usize| iv[0] < iv[1] && iv[0] >= -TOL && iv[1] <= s.pieces[piece].height() + TOL;
        if !ok_interval(p.interval, p.i) || !ok_interval(p.interval_j, p.j) {
            issues.push(GluingIssue::BadInterval { pairing: n });
            continue;
        }
        let (la, lb) = (p.interval[1] - p.interval[0], p.interval_j[1] - p.interval_j[0]);
        if (la - lb).abs() > TOL * (1.0 + la) {
            issues.push(GluingIssue::LengthMismatch { pairing: n, left: la, right: lb });
            continue;
        }
        if p.kind == PairingKind::Translation || p.offset.re.abs() > TOL {
            // pieces must end up on opposite sides of the shared segment
            issues.push(GluingIssue::Orientation { pairing: n });
            continue;
        }
        let a = p.apply(Complex64::new(0.0, p.interval[0]));
        let b = p.apply(Complex64::new(0.0, p.interval[1]));
        let (lo, hi) = (a.im.min(b.im), a.im.max(b.im));
        if (lo - p.interval_j[0]).abs() > TOL * (1.0 + lo.abs()) || (hi - p.interval_j[1]).abs() > TOL * (1.0 + hi.abs()) {
            issues.push(GluingIssue::NonInvolutive { pairing: n });
            continue;
        }
        if s.pairings[..n].iter().any(|q| q.is_inverse_of(p)) {
            continue;
        }
        cover[p.i].push((p.interval[0], p.interval[1]));
        cover[p.j].push((p.interval_j[0], p.interval_j[1]));
    }
    for (piece, list) in cover.iter_mut().enumerate() {
        list.sort_by(|x, y| x.0.total_cmp(&y.0));
        let h = s.pieces[piece].height();
        let mut at = 0.0;
        for &(a, b) in list.iter() {
            if a > at + TOL {
                issues.push(GluingIssue::CoverageGap { piece, from: at, to: a });
            } else if a < at - TOL {
                issues.push(GluingIssue::Overlap { piece, from: a, to: at.min(b) });
            }
            at = at.max(b);
        }
        if at < h - TOL {
            issues.push(GluingIssue::CoverageGap { piece, from: at, to: h });
        }
    }
    ValidationReport { issues }
}

impl GreensTypeSurface {
    /// The slit-plane surface: one unit strip folded onto itself at `πi/2`.
    pub fn slit_plane() -> Self {
        GreensTypeSurface {
            pieces: vec![GreensSurface::HalfStrip { weight: 1.0 }],
            pairings: vec![Pairing::minus_translation(0, [0.0, PI / 2.0], 0, [PI / 2.0, PI], Complex64::new(0.0, PI))],
        }
    }

    /// Two unit strips glued along their whole right-most sides.
    pub fn circle() -> Self {
        GreensTypeSurface {
            pieces: vec![GreensSurface::HalfStrip { weight: 1.0 }, GreensSurface::HalfStrip { weight: 1.0 }],
            pairings: vec![Pairing::minus_translation(0, [0.0, PI], 1, [0.0, PI], Complex64::new(0.0, PI))],
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
