//! Run configuration: one JSON document, every field optional, flags applied on
//! top after parsing.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtComplex;
use crate::hyperbolic::{MultiCenterPotential, PointUHS};

pub const DEFAULT_SEED: u64 = 0x5eed_2011;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Module {
    Hyperbolic,
    Twistor,
    Spectral,
    Metric,
    Euclidean,
    Symplectic,
    Scattering,
}

impl Module {
    pub const ALL: [Module; 7] = [
        Module::Hyperbolic,
        Module::Twistor,
        Module::Spectral,
        Module::Metric,
        Module::Euclidean,
        Module::Symplectic,
        Module::Scattering,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Module::Hyperbolic => "hyperbolic",
            Module::Twistor => "twistor",
            Module::Spectral => "spectral",
            Module::Metric => "metric",
            Module::Euclidean => "euclidean",
            Module::Symplectic => "symplectic",
            Module::Scattering => "scattering",
        }
    }
}

/// Centers in upper half-space coordinates with their charges. `lambda`
/// defaults to `1 + 2 mass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonopoleConfig {
    pub centers: Vec<[f64; 3]>,
    pub charges: Vec<u32>,
    pub mass: f64,
    pub lambda: Option<f64>,
}

impl Default for MonopoleConfig {
    fn default() -> Self {
        MonopoleConfig { centers: vec![[0.2, -0.1, 1.3]], charges: vec![1], mass: 0.5, lambda: None }
    }
}

impl MonopoleConfig {
    pub fn potential(&self) -> Result<MultiCenterPotential> {
        let centers = self
            .centers
            .iter()
            .map(|&[x, y, z]| PointUHS::new(x, y, z))
            .collect::<Result<Vec<_>>>()?;
        let lambda = self.lambda.unwrap_or(1.0 + 2.0 * self.mass);
        MultiCenterPotential::new(lambda, centers, self.charges.clone(), self.mass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub ode: f64,
    pub metric_step: f64,
    pub contour_nodes: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { ode: 1e-10, metric_step: 1e-2, contour_nodes: 2048 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub only: Option<Module>,
    /// Non-closed term `ε x dy` added to the connection; nonzero values make
    /// the curvature and Hodge checks fail.
    pub broken_connection: f64,
    pub random_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { only: None, broken_connection: 0.0, random_samples: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => vec![],
            1 => vec![self.min],
            n => (0..n).map(|k| self.min + (self.max - self.min) * k as f64 / (n - 1) as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricGrid {
    /// Boundary point of the horospherical gauge as `[re, im]`; absent means ∞.
    pub boundary_point: Option<[f64; 2]>,
    pub x: Axis,
    pub y: Axis,
    pub z: Axis,
    pub theta: Axis,
    /// Grid points within this hyperbolic distance of a center are skipped.
    pub exclusion: f64,
}

impl Default for MetricGrid {
    fn default() -> Self {
        MetricGrid {
            boundary_point: None,
            x: Axis { min: -0.5, max: 0.5, count: 3 },
            y: Axis { min: -0.5, max: 0.5, count: 3 },
            z: Axis { min: 0.6, max: 2.0, count: 3 },
            theta: Axis { min: 0.0, max: 0.0, count: 1 },
            exclusion: 0.05,
        }
    }
}

impl MetricGrid {
    pub fn boundary(&self) -> ExtComplex {
        match self.boundary_point {
            Some([re, im]) => ExtComplex::finite(re, im),
            None => ExtComplex::Infinity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ScatterMode {
    /// Growth of the fundamental solution near a center of the abelian field.
    Growth,
    /// Spectral indicator and `M_γ` over a family of lines in the charge-1
    /// Euclidean fixture.
    Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSpec {
    pub through: [f64; 3],
    pub direction: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScatterConfig {
    pub mode: ScatterMode,
    pub center: usize,
    pub delta: f64,
    pub impacts: Vec<f64>,
    pub lines: Vec<LineSpec>,
    pub horizon: f64,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        ScatterConfig {
            mode: ScatterMode::Growth,
            center: 0,
            delta: 0.5,
            impacts: vec![1e-2, 1e-3, 1e-4, 1e-5],
            lines: (0..=8)
                .map(|k| LineSpec { through: [0.0, 0.25 * k as f64, 0.0], direction: [1.0, 0.0, 0.0] })
                .collect(),
            horizon: crate::scattering::EUCLIDEAN_HORIZON,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralConfig {
    pub q: [f64; 3],
    /// Argument of the residual `U(1)` phase.
    pub phase: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig { q: [0.3, 0.4, 0.9], phase: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymplecticConfig {
    pub max_sheets: usize,
    pub instances: usize,
}

impl Default for SymplecticConfig {
    fn default() -> Self {
        SymplecticConfig { max_sheets: 3, instances: 100 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub monopole: MonopoleConfig,
    pub tolerances: Tolerances,
    pub verify: VerifyConfig,
    pub metric: MetricGrid,
    pub scatter: ScatterConfig,
    pub spectral: SpectralConfig,
    pub symplectic: SymplecticConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            monopole: MonopoleConfig::default(),
            tolerances: Tolerances::default(),
            verify: VerifyConfig::default(),
            metric: MetricGrid::default(),
            scatter: ScatterConfig::default(),
            spectral: SpectralConfig::default(),
            symplectic: SymplecticConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks everything that can be checked before any computation starts.
    pub fn validate(&self) -> Result<()> {
        self.monopole.potential()?;
        let t = &self.tolerances;
        if !(t.ode > 0.0 && t.ode < 1e-2) {
            return Err(Error::Config(format!("ode tolerance {} outside (0, 1e-2)", t.ode)));
        }
        if !(t.metric_step > 0.0 && t.metric_step < 0.25) {
            return Err(Error::Config(format!("metric step {} outside (0, 0.25)", t.metric_step)));
        }
        if t.contour_nodes < 64 {
            return Err(Error::Config(format!("contour needs at least 64 nodes, got {}", t.contour_nodes)));
        }
        for (name, axis) in [("x", self.metric.x), ("y", self.metric.y), ("z", self.metric.z), ("theta", self.metric.theta)] {
            if !(axis.min.is_finite() && axis.max.is_finite()) || axis.max < axis.min {
                return Err(Error::Config(format!("metric axis {name} is not an interval")));
            }
        }
        if self.metric.z.min <= 0.0 {
            return Err(Error::Config("metric grid must stay in z > 0".into()));
        }
        if !(self.scatter.delta > 0.0) || !(self.scatter.horizon > 0.0) {
            return Err(Error::Config("scatter delta and horizon must be positive".into()));
        }
        let [x, y, z] = self.spectral.q;
        PointUHS::new(x, y, z)?;
        if self.symplectic.max_sheets == 0 {
            return Err(Error::Config("symplectic.max_sheets must be positive".into()));
        }
        Ok(())
    }
}
