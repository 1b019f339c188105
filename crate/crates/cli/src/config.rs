use std::path::Path;

use anyhow::{bail, Context, Result};
use cagecalc::geometry::{BoundaryCondition, CageConfig, Curve, WireModel, WireShape};
use cagecalc::homogenized::Equation;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub cage: CageSection,
    #[serde(default)]
    pub source: SourceSection,
    pub sweep: Option<SweepSection>,
    pub grid: Option<GridSection>,
    pub resonance: Option<ResonanceSection>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveName {
    Circle,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeName {
    Disk,
    Perpendicular,
    Tangential,
    Square,
}

impl ShapeName {
    pub fn shape(self) -> WireShape {
        match self {
            ShapeName::Disk => WireShape::Disk,
            ShapeName::Perpendicular => WireShape::PerpendicularSegment,
            ShapeName::Tangential => WireShape::TangentialSegment,
            ShapeName::Square => WireShape::Square,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "disk" => Some(ShapeName::Disk),
            "perpendicular" => Some(ShapeName::Perpendicular),
            "tangential" => Some(ShapeName::Tangential),
            "square" => Some(ShapeName::Square),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CageSection {
    pub curve: CurveName,
    /// Number of wires; 0 means no cage at all.
    pub m: usize,
    pub delta: f64,
    #[serde(default = "disk")]
    pub shape: ShapeName,
    /// Wire model, 1 or 2.
    #[serde(default = "one")]
    pub model: u8,
    #[serde(default)]
    pub phase: f64,
}

fn disk() -> ShapeName {
    ShapeName::Disk
}

fn one() -> u8 {
    1
}

impl CageSection {
    pub fn wire_model(&self) -> WireModel {
        if self.model == 2 {
            WireModel::Model2
        } else {
            WireModel::Model1
        }
    }

    pub fn curve(&self) -> Curve {
        match self.curve {
            CurveName::Circle => Curve::UnitCircle,
            CurveName::Square => Curve::UnitSquare,
        }
    }

    /// Core cage description with m and δ overridden (sweeps vary them).
    pub fn core(&self, m: usize, delta: f64) -> CageConfig {
        let mut c = CageConfig::new(self.curve(), m, delta, self.shape.shape(), self.wire_model());
        c.phase = self.phase;
        c
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    #[serde(default = "helmholtz")]
    pub equation: Equation,
    #[serde(default = "two")]
    pub z0: [f64; 2],
    #[serde(default = "unit")]
    pub k: f64,
}

fn helmholtz() -> Equation {
    Equation::Helmholtz
}

fn two() -> [f64; 2] {
    [2.0, 0.0]
}

fn unit() -> f64 {
    1.0
}

impl Default for SourceSection {
    fn default() -> Self {
        Self { equation: helmholtz(), z0: two(), k: unit() }
    }
}

impl SourceSection {
    pub fn z0(&self) -> Complex64 {
        Complex64::new(self.z0[0], self.z0[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    K,
    Delta,
    M,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::K => "k",
            Variable::Delta => "delta",
            Variable::M => "m",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Discrete,
    Thin,
    Thick,
    Resonance,
    NeumannShell,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Discrete => "discrete",
            Model::Thin => "thin",
            Model::Thick => "thick",
            Model::Resonance => "resonance",
            Model::NeumannShell => "neumann-shell",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: Variable,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default = "linear")]
    pub spacing: Spacing,
    pub models: Vec<Model>,
    #[serde(default = "origin")]
    pub probes: Vec<[f64; 2]>,
    /// Peak tracking over (δ, M) instead of a plain sweep.
    pub track: Option<TrackSection>,
}

fn linear() -> Spacing {
    Spacing::Linear
}

fn origin() -> Vec<[f64; 2]> {
    vec![[0.0, 0.0]]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackSection {
    pub deltas: Vec<f64>,
    pub ms: Vec<usize>,
}

impl SweepSection {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                let v = match self.spacing {
                    Spacing::Linear => self.start + t * (self.stop - self.start),
                    Spacing::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
                };
                if self.variable == Variable::M {
                    v.round()
                } else {
                    v
                }
            })
            .collect()
    }

    pub fn probes(&self) -> Vec<Complex64> {
        self.probes.iter().map(|p| Complex64::new(p[0], p[1])).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceSection {
    /// (m, q) on the circle, (l, m) on the square.
    #[serde(default = "first_mode")]
    pub mode: [usize; 2],
    #[serde(default = "dirichlet")]
    pub bc: BoundaryCondition,
    /// Also locate the peak with the discrete solver.
    #[serde(default)]
    pub compare: bool,
    #[serde(default = "origin_point")]
    pub probe: [f64; 2],
}

fn first_mode() -> [usize; 2] {
    [0, 1]
}

fn dirichlet() -> BoundaryCondition {
    BoundaryCondition::Dirichlet
}

fn origin_point() -> [f64; 2] {
    [0.0, 0.0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "ten")]
    pub p: usize,
    #[serde(default = "yes")]
    pub symmetry: bool,
}

fn ten() -> usize {
    10
}

fn yes() -> bool {
    true
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { p: ten(), symmetry: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "dot")]
    pub dir: String,
    #[serde(default = "stem")]
    pub name: String,
}

fn dot() -> String {
    ".".into()
}

fn stem() -> String {
    "cagecalc".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: dot(), name: stem() }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        // toml's messages carry the line, column and offending key.
        let cfg: Config = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let c = &self.cage;
        if c.model != 1 && c.model != 2 {
            bail!("cage.model: expected 1 or 2, got {}", c.model);
        }
        if c.m != 0 && c.m < 3 {
            bail!("cage.m: need 0 (no cage) or at least 3 wires, got {}", c.m);
        }
        if !(c.delta > 0.0) && c.m != 0 {
            bail!("cage.delta: must be positive, got {}", c.delta);
        }
        if self.source.k < 0.0 || !self.source.k.is_finite() {
            bail!("source.k: must be finite and non-negative, got {}", self.source.k);
        }
        if let Some(s) = &self.sweep {
            if s.count < 2 {
                bail!("sweep.count: need at least 2 samples, got {}", s.count);
            }
            if !(s.start.is_finite() && s.stop.is_finite()) || s.start == s.stop {
                bail!("sweep.start/stop: need two distinct finite endpoints, got {} and {}", s.start, s.stop);
            }
            if s.spacing == Spacing::Log && !(s.start > 0.0 && s.stop > 0.0) {
                bail!("sweep.spacing: log spacing needs positive endpoints");
            }
            if s.models.is_empty() {
                bail!("sweep.models: list at least one model");
            }
            if s.probes.is_empty() {
                bail!("sweep.probes: list at least one probe point");
            }
            if let Some(t) = &s.track {
                if s.variable != Variable::K {
                    bail!("sweep.track: peak tracking sweeps k, not {}", s.variable.name());
                }
                if t.deltas.is_empty() || t.ms.is_empty() {
                    bail!("sweep.track: deltas and ms must be non-empty");
                }
            }
        }
        if let Some(g) = &self.grid {
            if g.nx < 2 || g.ny < 2 {
                bail!("grid.nx/ny: need at least 2 points per axis");
            }
        }
        Ok(())
    }

    /// SHA-256 of the parsed configuration, so formatting and comments in
    /// the file do not change it.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canon.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[cage]\ncurve = \"circle\"\nm = 30\ndelta = 0.1\n";

    #[test]
    fn defaults_fill_in() {
        let c = Config::parse(MINIMAL).unwrap();
        assert_eq!(c.source.z0, [2.0, 0.0]);
        assert_eq!(c.solver.p, 10);
        assert_eq!(c.cage.wire_model(), WireModel::Model1);
    }

    #[test]
    fn hash_ignores_layout() {
        let a = Config::parse(MINIMAL).unwrap().hash();
        let b = Config::parse("# comment\n[cage]\nm = 30\ncurve = \"circle\"\ndelta = 0.10\n").unwrap().hash();
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn unknown_key_names_the_line() {
        let err = Config::parse("[cage]\ncurve = \"circle\"\nm = 30\ndelta = 0.1\nwires = 3\n").unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("line 5") && msg.contains("wires"), "{msg}");
    }

    #[test]
    fn sweep_values() {
        let mut s = SweepSection {
            variable: Variable::M,
            start: 10.0,
            stop: 40.0,
            count: 4,
            spacing: Spacing::Log,
            models: vec![Model::Thin],
            probes: origin(),
            track: None,
        };
        assert_eq!(s.values(), vec![10.0, 16.0, 25.0, 40.0]);
        s.variable = Variable::K;
        s.spacing = Spacing::Linear;
        assert_eq!(s.values(), vec![10.0, 20.0, 30.0, 40.0]);
    }
}
