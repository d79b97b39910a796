//! Validated run configuration shared by the command line and the library.
//!
//! A configuration is a TOML or JSON document. Every field has a default, and
//! the fully resolved document is written next to the outputs of each run.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::compare::StudySetup;
use crate::erosion::ClockMode;
use crate::error::{Error, Result};
use crate::greens_surface::WeightedTree;
use crate::kernels::{Atom, SpherePoint, WeightedDivisor};

pub const CONFIG_SCHEMA: &str = "hslab.config.v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    TraceQd,
    Lemniscate,
    FourDroplet,
    Energy,
    Variation,
    Surface,
    Erode,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::TraceQd => "trace-qd",
            Command::Lemniscate => "lemniscate",
            Command::FourDroplet => "four-droplet",
            Command::Energy => "energy",
            Command::Variation => "variation",
            Command::Surface => "surface",
            Command::Erode => "erode",
            Command::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceQdConfig {
    pub a0: f64,
    pub a1: f64,
    pub a_inf: f64,
    pub step: f64,
    pub max_arclen: f64,
}

impl Default for TraceQdConfig {
    fn default() -> Self {
        TraceQdConfig { a0: 2.0, a1: 1.0, a_inf: 0.0, step: 1e-3, max_arclen: 50.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemniscateConfig {
    /// Points `[x, y, weight]` where the potential tends to `+∞`.
    pub pos: Vec<[f64; 3]>,
    /// Points `[x, y, weight]` where the potential tends to `-∞`.
    pub neg: Vec<[f64; 3]>,
    /// The level is the potential value at the seed unless given.
    pub level: Option<f64>,
    pub seed: [f64; 2],
}

impl Default for LemniscateConfig {
    fn default() -> Self {
        let third = 1.0 / 3.0;
        LemniscateConfig {
            pos: Vec::new(),
            neg: vec![[0.5, 0.0, third], [-0.25, 0.4, third], [-0.25, -0.4, third]],
            level: None,
            seed: [1.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FourDropletConfig {
    pub x1: f64,
    pub x2: f64,
    pub a: f64,
    pub b: f64,
    pub eps: f64,
}

impl Default for FourDropletConfig {
    fn default() -> Self {
        FourDropletConfig { x1: -0.9, x2: 0.9, a: 6.0, b: 1.0, eps: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyConfig {
    pub center: [f64; 2],
    pub radius: f64,
    /// Atoms `[x, y, weight]` inside the disc for the general energy; empty means `1·0`.
    pub divisor: Vec<[f64; 3]>,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig { center: [0.5, 0.0], radius: 1.0, divisor: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariationConfig {
    pub center: [f64; 2],
    pub radius: f64,
    /// Atoms `[x, y, weight]` inside the circle.
    pub d: Vec<[f64; 3]>,
    /// Atoms `[x, y, weight]` outside the circle.
    pub d_star: Vec<[f64; 3]>,
    /// Weight of `d*` at infinity.
    pub d_star_infinity: f64,
}

impl Default for VariationConfig {
    fn default() -> Self {
        VariationConfig { center: [0.0, 0.0], radius: 1.0, d: vec![[0.0, 0.0, 1.0]], d_star: Vec::new(), d_star_infinity: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceConfig {
    pub tree: WeightedTree,
    pub y0: f64,
    pub x_min: f64,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        SurfaceConfig {
            tree: WeightedTree::Node {
                width: 1.0,
                children: vec![WeightedTree::Leaf { weight: 1.0 }, WeightedTree::Leaf { weight: 2.0 }],
            },
            y0: 0.0,
            x_min: -8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErodeConfig {
    pub setup: StudySetup,
    pub mesh: f64,
    pub radius: f64,
    pub t_end: f64,
    pub mode: ClockMode,
    pub snapshot_times: Vec<f64>,
    pub check_every: u64,
    pub log_events: bool,
}

impl Default for ErodeConfig {
    fn default() -> Self {
        ErodeConfig {
            setup: StudySetup::PlanePair,
            mesh: 0.05,
            radius: 0.2,
            t_end: 1.0,
            mode: ClockMode::Poisson,
            snapshot_times: vec![0.1, 0.5],
            check_every: 1000,
            log_events: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// The closed critical trajectory of the three-source differential with weights (2, 1, 0).
    ThreeSourceLoop,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub setup: StudySetup,
    pub meshes: Vec<f64>,
    pub seeds: Vec<u64>,
    pub t_end: f64,
    pub radius: f64,
    pub droplet: usize,
    pub target: Target,
    pub stabilization: Vec<[f64; 2]>,
    pub mode: ClockMode,
    pub threads: Option<usize>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            setup: StudySetup::PlanePair,
            meshes: vec![0.1, 0.05],
            seeds: vec![1, 2, 3],
            t_end: 2.0,
            radius: 0.2,
            droplet: 1,
            target: Target::ThreeSourceLoop,
            stabilization: Vec::new(),
            mode: ClockMode::Poisson,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub command: Option<Command>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub svg: bool,
    pub trace_qd: TraceQdConfig,
    pub lemniscate: LemniscateConfig,
    pub four_droplet: FourDropletConfig,
    pub energy: EnergyConfig,
    pub variation: VariationConfig,
    pub surface: SurfaceConfig,
    pub erode: ErodeConfig,
    pub compare: CompareConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema: CONFIG_SCHEMA.into(),
            command: None,
            output_dir: PathBuf::from("hslab-out"),
            seed: 1,
            svg: true,
            trace_qd: TraceQdConfig::default(),
            lemniscate: LemniscateConfig::default(),
            four_droplet: FourDropletConfig::default(),
            energy: EnergyConfig::default(),
            variation: VariationConfig::default(),
            surface: SurfaceConfig::default(),
            erode: ErodeConfig::default(),
            compare: CompareConfig::default(),
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {x}")))
    }
}

fn mesh_ok(name: &str, mesh: f64, setup: StudySetup) -> Result<()> {
    positive(name, mesh)?;
    if setup == StudySetup::TorusPair {
        let n = 2.0 / mesh;
        if (n - n.round()).abs() > 1e-9 || n.round() < 4.0 {
            return Err(Error::Config(format!("{name} {mesh} does not tile the torus side 2")));
        }
    }
    Ok(())
}

/// Divisor from `[x, y, weight]` rows plus an optional weight at infinity.
pub fn divisor_from_rows(rows: &[[f64; 3]], at_infinity: f64) -> Result<WeightedDivisor> {
    let mut atoms: Vec<Atom> = rows
        .iter()
        .map(|&[x, y, w]| Atom { point: SpherePoint::Finite(Complex64::new(x, y)), weight: w })
        .collect();
    if at_infinity > 0.0 {
        atoms.push(Atom { point: SpherePoint::Infinity, weight: at_infinity });
    }
    WeightedDivisor::new(atoms).map_err(|e| Error::Config(e.to_string()))
}

impl RunConfig {
    /// Checks ranges and cross-field constraints; the error names the field.
    pub fn validate(&self) -> Result<()> {
        if self.schema != CONFIG_SCHEMA {
            return Err(Error::Config(format!("unknown schema {}", self.schema)));
        }
        let t = &self.trace_qd;
        for (n, w) in [("trace_qd.a0", t.a0), ("trace_qd.a1", t.a1), ("trace_qd.a_inf", t.a_inf)] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::Config(format!("{n} must be nonnegative, got {w}")));
            }
        }
        positive("trace_qd.step", t.step)?;
        positive("trace_qd.max_arclen", t.max_arclen)?;
        let l = &self.lemniscate;
        if l.pos.is_empty() && l.neg.is_empty() {
            return Err(Error::Config("lemniscate needs at least one point".into()));
        }
        divisor_from_rows(&l.pos, 0.0)?;
        divisor_from_rows(&l.neg, 0.0)?;
        let f = &self.four_droplet;
        if !(-1.0 < f.x1 && f.x1 < f.x2 && f.x2 < 1.0) {
            return Err(Error::Config(format!("four_droplet needs -1 < x1 < x2 < 1, got {} and {}", f.x1, f.x2)));
        }
        positive("four_droplet.a", f.a)?;
        positive("four_droplet.b", f.b)?;
        positive("four_droplet.eps", f.eps)?;
        positive("energy.radius", self.energy.radius)?;
        divisor_from_rows(&self.energy.divisor, 0.0)?;
        let v = &self.variation;
        positive("variation.radius", v.radius)?;
        divisor_from_rows(&v.d, 0.0)?;
        divisor_from_rows(&v.d_star, v.d_star_infinity)?;
        crate::greens_surface::from_weighted_tree(&self.surface.tree).map_err(|e| Error::Config(format!("surface.tree: {e}")))?;
        if !(self.surface.x_min < 0.0) {
            return Err(Error::Config("surface.x_min must be negative".into()));
        }
        let e = &self.erode;
        mesh_ok("erode.mesh", e.mesh, e.setup)?;
        positive("erode.radius", e.radius)?;
        if !(e.t_end >= 0.0 && e.t_end.is_finite()) {
            return Err(Error::Config(format!("erode.t_end must be nonnegative, got {}", e.t_end)));
        }
        if e.snapshot_times.iter().any(|&s| !(s >= 0.0 && s <= e.t_end)) {
            return Err(Error::Config("erode.snapshot_times must lie in [0, t_end]".into()));
        }
        let c = &self.compare;
        if c.meshes.is_empty() || c.seeds.is_empty() {
            return Err(Error::Config("compare needs meshes and seeds".into()));
        }
        for &m in &c.meshes {
            mesh_ok("compare.meshes", m, c.setup)?;
        }
        positive("compare.radius", c.radius)?;
        positive("compare.t_end", c.t_end)?;
        if c.droplet > 1 {
            return Err(Error::Config(format!("compare.droplet must be 0 or 1, got {}", c.droplet)));
        }
        if c.stabilization.iter().flatten().any(|&s| !(s >= 0.0 && s <= c.t_end)) {
            return Err(Error::Config("compare.stabilization times must lie in [0, t_end]".into()));
        }
        if c.threads == Some(0) {
            return Err(Error::Config("compare.threads must be positive".into()));
        }
        Ok(())
    }

    /// Parses a TOML document, or JSON when `json` is set.
    pub fn parse(text: &str, json: bool) -> Result<Self> {
        let c: RunConfig = if json {
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        };
        c.validate()?;
        Ok(c)
    }

    /// Fields present in the file at `path` override the fields of `self`.
    pub fn overlay_file(&self, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let json = path.extension().is_some_and(|e| e == "json");
        let layer: serde_json::Value = if json {
            serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        };
        let mut base = serde_json::to_value(self).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut base, layer);
        let c: RunConfig = serde_json::from_value(base).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// The resolved configuration as pretty JSON.
    pub fn effective_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }
}

fn merge(base: &mut serde_json::Value, layer: serde_json::Value) {
    match (base, layer) {
        (serde_json::Value::Object(b), serde_json::Value::Object(l)) => {
            for (k, v) in l {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, l) => *b = l,
    }
}
