use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spinsurf::geometry::SurfaceChart;
use spinsurf::grid::{Grid2D, StencilOrder};
use spinsurf::hamiltonian::{CaseLabel, ConfinementCase};
use spinsurf::spectral::{SolveMode, SolveOptions};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceConfig {
    /// `torus`, `sphere`, `cylinder`, `plane` or `custom`.
    pub preset: String,
    /// Custom shapes: `egg_crate` or `fd_torus`.
    pub shape: String,
    pub major: f64,
    pub minor: f64,
    pub radius: f64,
    pub length: f64,
    pub lx: f64,
    pub ly: f64,
    pub amplitude: f64,
    pub period: f64,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        SurfaceConfig {
            preset: "torus".into(),
            shape: "egg_crate".into(),
            major: 2.0,
            minor: 0.5,
            radius: 1.0,
            length: 2.0,
            lx: std::f64::consts::TAU,
            ly: std::f64::consts::TAU,
            amplitude: 0.25,
            period: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n1: usize,
    pub n2: usize,
    /// Stencil order, 2 or 4.
    pub order: u32,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n1: 16, n2: 16, order: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsConfig {
    pub m: f64,
    /// `linear`, `harmonic` or `square_well` (also `a`, `b`, `c`).
    pub case: String,
    pub omega: f64,
    pub well_width: f64,
    pub normal_nodes: usize,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        PhysicsConfig { m: 10.0, case: "square_well".into(), omega: 1.0, well_width: 1.0, normal_nodes: 256 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub k: usize,
    /// `auto`, `dense` or `iterative`.
    pub mode: String,
    pub tol: f64,
    pub max_iter: usize,
    pub dense_limit: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        let d = SolveOptions::default();
        SolveConfig { k: d.k, mode: "auto".into(), tol: d.tol, max_iter: d.max_iter, dense_limit: d.dense_limit }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FwConfig {
    pub masses: Vec<f64>,
    /// Grid for the full-matrix FW study, independent of `[grid]`.
    pub n1: usize,
    pub n2: usize,
    pub steps: usize,
    /// Even potential amplitude `v₀` in `βv₀ cos q₁`.
    pub v0: f64,
    /// `surface` or `free_mode`.
    pub input: String,
    /// Momentum of the `free_mode` input.
    pub momentum: f64,
    pub slope_max: f64,
}

impl Default for FwConfig {
    fn default() -> Self {
        FwConfig {
            masses: vec![10.0, 20.0, 40.0, 80.0],
            n1: 8,
            n2: 8,
            steps: 3,
            v0: 1.0,
            input: "surface".into(),
            momentum: 1.0,
            slope_max: -2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    /// Random points for the metric expansion identity.
    pub samples: usize,
    /// Normal offsets as a fraction of the local curvature radius.
    pub q3_fraction: f64,
    pub identity_tol: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig { samples: 64, q3_fraction: 0.1, identity_tol: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub json: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into(), json: true }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub surface: SurfaceConfig,
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub solve: SolveConfig,
    pub fw: FwConfig,
    pub geometry: GeometryConfig,
    pub output: OutputConfig,
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid("config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))
    }

    /// Checks every field that does not need geometry to be evaluated.
    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.surface;
        match s.preset.as_str() {
            "torus" => {
                positive("surface.major", s.major)?;
                positive("surface.minor", s.minor)?;
                if s.major <= s.minor {
                    return Err(invalid("surface.major", format!("torus requires R > r, got R = {}, r = {}", s.major, s.minor)));
                }
            }
            "sphere" => positive("surface.radius", s.radius)?,
            "cylinder" => {
                positive("surface.radius", s.radius)?;
                positive("surface.length", s.length)?;
            }
            "plane" => {
                positive("surface.lx", s.lx)?;
                positive("surface.ly", s.ly)?;
            }
            "custom" => match s.shape.as_str() {
                "egg_crate" => {
                    positive("surface.period", s.period)?;
                    if !s.amplitude.is_finite() {
                        return Err(invalid("surface.amplitude", "must be finite"));
                    }
                }
                "fd_torus" => {
                    positive("surface.major", s.major)?;
                    positive("surface.minor", s.minor)?;
                }
                other => return Err(invalid("surface.shape", format!("unknown custom shape `{other}`"))),
            },
            other => return Err(invalid("surface.preset", format!("unknown preset `{other}`"))),
        }
        self.stencil()?;
        self.case_label()?;
        self.solve_mode()?;
        positive("physics.m", self.physics.m)?;
        positive("physics.omega", self.physics.omega)?;
        positive("physics.well_width", self.physics.well_width)?;
        positive("solve.tol", self.solve.tol)?;
        if self.solve.max_iter == 0 {
            return Err(invalid("solve.max_iter", "must be at least 1"));
        }
        if self.fw.masses.is_empty() {
            return Err(invalid("fw.masses", "must list at least one mass"));
        }
        for (i, &m) in self.fw.masses.iter().enumerate() {
            positive(&format!("fw.masses[{i}]"), m)?;
        }
        if self.fw.steps > spinsurf::fw::MAX_STEPS {
            return Err(invalid("fw.steps", format!("at most {} steps, got {}", spinsurf::fw::MAX_STEPS, self.fw.steps)));
        }
        if !matches!(self.fw.input.as_str(), "surface" | "free_mode") {
            return Err(invalid("fw.input", format!("expected `surface` or `free_mode`, got `{}`", self.fw.input)));
        }
        if !self.fw.v0.is_finite() || !self.fw.momentum.is_finite() || !self.fw.slope_max.is_finite() {
            return Err(invalid("fw", "v0, momentum and slope_max must be finite"));
        }
        positive("geometry.q3_fraction", self.geometry.q3_fraction)?;
        if self.geometry.q3_fraction >= 1.0 {
            return Err(invalid("geometry.q3_fraction", "must stay below 1"));
        }
        positive("geometry.identity_tol", self.geometry.identity_tol)?;
        if self.output.dir.is_empty() {
            return Err(invalid("output.dir", "must not be empty"));
        }
        Ok(())
    }

    /// `--out` beats `SPINSURF_OUT`, which beats `output.dir`.
    pub fn resolve(&mut self, out: Option<PathBuf>, env_out: Option<String>, seed: Option<u64>) {
        if let Some(dir) = out.map(|p| p.to_string_lossy().into_owned()).or(env_out.filter(|s| !s.is_empty())) {
            self.output.dir = dir;
        }
        if let Some(seed) = seed {
            self.seed = seed;
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(&self.output.dir)
    }

    pub fn stencil(&self) -> Result<StencilOrder, CliError> {
        StencilOrder::from_int(self.grid.order).map_err(|e| invalid("grid.order", e))
    }

    pub fn case_label(&self) -> Result<CaseLabel, CliError> {
        self.physics.case.parse().map_err(|e| invalid("physics.case", e))
    }

    pub fn solve_mode(&self) -> Result<SolveMode, CliError> {
        self.solve.mode.parse().map_err(|e| invalid("solve.mode", e))
    }

    pub fn chart(&self) -> Result<SurfaceChart, CliError> {
        let s = &self.surface;
        let chart = match (s.preset.as_str(), s.shape.as_str()) {
            ("torus", _) => SurfaceChart::torus(s.major, s.minor),
            ("sphere", _) => SurfaceChart::sphere(s.radius),
            ("cylinder", _) => SurfaceChart::cylinder(s.radius, s.length),
            ("plane", _) => SurfaceChart::plane(s.lx, s.ly),
            ("custom", "egg_crate") => SurfaceChart::egg_crate(s.amplitude, s.period),
            ("custom", "fd_torus") => SurfaceChart::torus_fd(s.major, s.minor),
            (p, _) => return Err(invalid("surface.preset", format!("unknown preset `{p}`"))),
        };
        chart.map_err(|e| invalid("surface", e))
    }

    pub fn grid_for(&self, chart: &SurfaceChart) -> Result<Grid2D, CliError> {
        Grid2D::for_chart(chart, [self.grid.n1, self.grid.n2], self.stencil()?).map_err(|e| invalid("grid", e))
    }

    pub fn fw_grid_for(&self, chart: &SurfaceChart) -> Result<Grid2D, CliError> {
        Grid2D::for_chart(chart, [self.fw.n1, self.fw.n2], self.stencil()?).map_err(|e| invalid("fw", e))
    }

    pub fn confinement(&self, label: CaseLabel, m: f64) -> Result<ConfinementCase, CliError> {
        ConfinementCase::from_label(label, self.physics.omega, self.physics.well_width, m)
            .map_err(|e| invalid("physics", e))
    }

    pub fn solve_options(&self, k: usize) -> Result<SolveOptions, CliError> {
        Ok(SolveOptions {
            k,
            mode: self.solve_mode()?,
            tol: self.solve.tol,
            max_iter: self.solve.max_iter,
            seed: self.seed,
            dense_limit: self.solve.dense_limit,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn sections_override_defaults() {
        let c = RunConfig::parse("[surface]\npreset = \"sphere\"\nradius = 2.0\n[grid]\nn1 = 12\n").unwrap();
        assert_eq!(c.surface.preset, "sphere");
        assert_eq!(c.grid.n1, 12);
        assert_eq!(c.grid.n2, 16);
        c.validate().unwrap();
    }

    #[test]
    fn field_level_messages() {
        let bad = |text: &str| match RunConfig::parse(text).and_then(|c| c.validate()) {
            Err(CliError::Config(msg)) => msg,
            other => panic!("expected config error, got {other:?}"),
        };
        assert!(bad("[surface]\nmajor = 0.5\nminor = 1.0\n").starts_with("surface.major"));
        assert!(bad("[grid]\norder = 3\n").starts_with("grid.order"));
        assert!(bad("[physics]\ncase = \"d\"\n").starts_with("physics.case"));
        assert!(bad("[solve]\ntol = -1.0\n").starts_with("solve.tol"));
        assert!(bad("[fw]\nsteps = 4\n").starts_with("fw.steps"));
        assert!(bad("[grid]\nnodes = 3\n").contains("unknown field"));
    }

    #[test]
    fn output_precedence() {
        let mut c = RunConfig::default();
        c.resolve(None, Some("env".into()), None);
        assert_eq!(c.output.dir, "env");
        c.resolve(Some("flag".into()), Some("env".into()), Some(7));
        assert_eq!((c.output.dir.as_str(), c.seed), ("flag", 7));
        let mut d = RunConfig::default();
        d.resolve(None, Some(String::new()), None);
        assert_eq!(d.output.dir, "out");
    }
}
